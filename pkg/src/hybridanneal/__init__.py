"""Hybrid classical/annealing MIMO detection toolkit.

MIMO detection problems are reduced to QUBOs, seeded with a greedy
classical solution and refined by a schedule-driven annealing simulator
(forward, reverse and forward-reverse schedules).  Benchmark harnesses
report success probability, time-to-solution and energy-gap distributions.
"""

from .bench import (
    Problem,
    Report,
    algorithm_comparison,
    initial_state_study,
    make_problem,
    simplification_study,
    sweep_sp,
)
from .classical import (
    BruteForceCapError,
    brute_force,
    greedy_search,
    inject_constraints,
    prefix_simplify,
)
from .engine import EngineParams
from .metrics import delta_e_histogram, success_probability, tts
from .mimo import MimoInstance, generate_instance, mimo_to_qubo, residual_norm_sq
from .qubo import (
    DegenerateMetricError,
    IsingInstance,
    QuboInstance,
    delta_e_percent,
    energy,
    qubo_to_ising,
)
from .sampler import SampleSet, anneal_sample, run_sampler
from .schedules import AnnealSchedule, ScheduleError, schedule_fa, schedule_fr, schedule_ra

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule",
    "BruteForceCapError",
    "DegenerateMetricError",
    "EngineParams",
    "IsingInstance",
    "MimoInstance",
    "Problem",
    "QuboInstance",
    "Report",
    "SampleSet",
    "ScheduleError",
    "algorithm_comparison",
    "anneal_sample",
    "brute_force",
    "delta_e_histogram",
    "delta_e_percent",
    "energy",
    "generate_instance",
    "greedy_search",
    "initial_state_study",
    "inject_constraints",
    "make_problem",
    "mimo_to_qubo",
    "prefix_simplify",
    "qubo_to_ising",
    "residual_norm_sq",
    "run_sampler",
    "schedule_fa",
    "schedule_fr",
    "schedule_ra",
    "simplification_study",
    "success_probability",
    "sweep_sp",
    "tts",
]
