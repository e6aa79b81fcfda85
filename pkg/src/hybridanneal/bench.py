"""Experiment harnesses: s_p sweeps, initial-state study, algorithm comparison
and the variable-fixing ratio study.

Every harness returns a :class:`Report` whose rows serialise to CSV and JSON.
Runs are seeded from a single integer; each sub-run derives its own seed
from its position in the experiment, so reports are reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classical import brute_force, greedy_search, prefix_simplify
from .engine import EngineParams
from .metrics import (
    DEFAULT_BUCKETS,
    Histogram,
    average_histograms,
    delta_e_histogram,
    delta_e_values,
    success_probability,
    tts,
)
from .mimo import MimoInstance, generate_instance, get_modulation, mimo_to_qubo
from .qubo import DegenerateMetricError, QuboInstance, energies, energy
from .sampler import DEFAULT_NUM_SAMPLES, run_sampler
from .schedules import schedule_fa, schedule_fr, schedule_ra

__all__ = [
    "ALGORITHMS",
    "DEFAULT_SP_GRID",
    "Problem",
    "Report",
    "algorithm_comparison",
    "build_schedule",
    "initial_state_study",
    "make_problem",
    "simplification_study",
    "sweep_sp",
]

DEFAULT_SP_GRID = tuple(round(0.25 + 0.04 * k, 2) for k in range(19))  # 0.25 .. 0.97
ALGORITHMS = ("FA", "FR", "RA-greedy", "RA-random")


@dataclass
class Report:
    columns: tuple
    rows: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, **row) -> None:
        self.rows.append({c: row.get(c) for c in self.columns})

    def column(self, name) -> list:
        return [r[name] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow(["" if r[c] is None else _fmt(r[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"columns": list(self.columns), "rows": self.rows, "flags": self.flags, "meta": self.meta},
            indent=1, default=_jsonable,
        )


def _fmt(v):
    if isinstance(v, float) and math.isnan(v):
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


@dataclass(frozen=True, eq=False)
class Problem:
    """A QUBO with its known ground energy (and optionally the MIMO source)."""

    name: str
    qubo: QuboInstance
    E_g: float
    ground_state: np.ndarray
    source: MimoInstance | None = None


def make_problem(instance: MimoInstance | QuboInstance, name: str = "") -> Problem:
    """Attach the exact ground energy.

    Noiseless MIMO problems have zero residual at the transmitted bits, which
    is the global minimum of a squared norm, so no search is needed.  Plain
    QUBOs go through :func:`brute_force`.
    """
    if isinstance(instance, MimoInstance):
        qubo = mimo_to_qubo(instance)
        return Problem(name, qubo, energy(qubo, instance.tx_bits), instance.tx_bits.copy(), instance)
    gs = brute_force(instance)
    return Problem(name, instance, gs.energy, gs.states[0])


def build_schedule(algo: str, s_p: float, c_p: float | None = None, t_a: float = 1.0, t_p: float = 1.0):
    if algo == "FA":
        return schedule_fa(t_a, t_p, s_p)
    if algo == "FR":
        return schedule_fr(t_a, t_p, s_p, c_p)
    if algo.startswith("RA"):
        return schedule_ra(t_p, s_p)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")


def _initial_for(algo: str, problem: Problem):
    if algo in ("FA", "FR"):
        return None
    provider = algo.partition("-")[2]
    if provider == "greedy":
        return greedy_search(problem.qubo)
    if provider == "random":
        return "random"
    if provider == "ground":
        return problem.ground_state
    raise ValueError(f"RA needs an initial-state provider (RA-greedy, RA-random, RA-ground), got {algo!r}")


def _seed(base: int, *key: int) -> int:
    return int(np.random.SeedSequence(base, spawn_key=key).generate_state(1)[0])


def _run_point(problem, algo, s_p, c_p, n_samples, params, seed, t_a, t_p, C_t):
    sched = build_schedule(algo, s_p, c_p, t_a, t_p)
    ss = run_sampler(problem.qubo, sched, n_samples, _initial_for(algo, problem), params, seed)
    p = success_probability(ss, problem.E_g)
    d = float(sched.duration)
    return {
        "p_star": p,
        "duration_us": d,
        "tts_us": tts(p, d, C_t),
        "mean_cost": float(ss.energies.mean()),
        "mean_delta_e": mean_delta_e(ss, problem.E_g),
        "samples": ss,
    }


def mean_delta_e(samples, E_g: float) -> float:
    """Mean percent gap, or NaN when ``E_g`` is too close to zero for a percentage."""
    try:
        return float(delta_e_values(samples, E_g).mean())
    except DegenerateMetricError:
        return math.nan


def sweep_sp(
    problems: Sequence[Problem],
    algorithms: Sequence[str] = ("FA", "RA-greedy", "FR"),
    sp_grid: Sequence[float] = DEFAULT_SP_GRID,
    C_t: float = 99.0,
    n_samples: int = DEFAULT_NUM_SAMPLES,
    params: EngineParams | None = None,
    seed: int = 0,
    cp_grid: Sequence[float] | None = None,
    t_a: float = 1.0,
    t_p: float = 1.0,
) -> Report:
    """p*, duration and TTS per (instance, algorithm, s_p).

    FR rows report the best turning point ``c_p`` from ``cp_grid`` (default:
    the s_p grid) among those above ``s_p``; grid points with no valid
    ``c_p`` are skipped and flagged.
    """
    if not problems or not sp_grid or not algorithms:
        raise ValueError("problems, algorithms and the s_p grid must be non-empty")
    cp_grid = tuple(sp_grid if cp_grid is None else cp_grid)
    report = Report(("instance", "algo", "s_p", "c_p", "p_star", "duration_us", "tts_us", "mean_cost"))
    report.meta = {"C_t": C_t, "n_samples": n_samples, "seed": seed, "t_a": t_a, "t_p": t_p}
    for pi, prob in enumerate(problems):
        for ai, algo in enumerate(algorithms):
            for si, s_p in enumerate(sp_grid):
                key = (pi, ai, si)
                if algo == "FR":
                    best = None
                    for ci, c_p in enumerate(cp_grid):
                        if c_p <= s_p:
                            continue
                        res = _run_point(prob, algo, s_p, c_p, n_samples, params, _seed(seed, *key, ci), t_a, t_p, C_t)
                        better = best is None or (res["p_star"], -res["tts_us"]) > (best[1]["p_star"], -best[1]["tts_us"])
                        if better:
                            best = (c_p, res)
                    if best is None:
                        report.flags.append(f"{prob.name}: no c_p above s_p={s_p} for FR")
                        continue
                    c_p, res = best
                else:
                    c_p = None
                    res = _run_point(prob, algo, s_p, None, n_samples, params, _seed(seed, *key), t_a, t_p, C_t)
                report.add(instance=prob.name, algo=algo, s_p=s_p, c_p=c_p, p_star=res["p_star"],
                           duration_us=res["duration_us"], tts_us=res["tts_us"], mean_cost=res["mean_cost"])
    return report


def harvest_initial_states(problem: Problem, pool_size: int, params=None, seed: int = 0,
                           max_gap: float = 10.0, pool_sp: float = 0.41):
    """Distinct candidate start states below ``max_gap`` percent, with their gaps.

    The pool merges forward-anneal samples, the greedy answer and the known
    ground state.  Returns ``(states, gaps)`` sorted by gap then bit pattern.
    """
    ss = run_sampler(problem.qubo, schedule_fa(1.0, 1.0, pool_sp), pool_size, None, params, seed)
    pool = np.vstack([ss.states, greedy_search(problem.qubo)[None, :], problem.ground_state[None, :]])
    states = np.unique(pool, axis=0)
    gaps = delta_e_values(energies(problem.qubo, states), problem.E_g)
    keep = gaps < max_gap
    states, gaps = states[keep], gaps[keep]
    order = np.lexsort(tuple(states.T[::-1]) + (gaps,))
    return states[order], gaps[order]


def initial_state_study(
    problem: Problem,
    delta: float = 2.0,
    s_p: float = 0.41,
    n_samples: int = DEFAULT_NUM_SAMPLES,
    params: EngineParams | None = None,
    seed: int = 0,
    pool_size: int = 20_000,
    states_per_bin: int = 5,
    max_gap: float = 10.0,
    t_p: float = 1.0,
) -> Report:
    """Reverse-anneal success as a function of the start state's energy gap.

    Candidate states are binned by gap in steps of ``delta`` percent up to
    ``max_gap``.  From each bin up to ``states_per_bin`` states are drawn and
    each seeds ``n_samples`` reverse anneals at ``s_p``; a row reports the
    mean success probability and mean sample energy over the bin.  Empty
    bins are left out and listed in ``flags``.
    """
    if delta <= 0:
        raise ValueError("bin width must be positive")
    states, gaps = harvest_initial_states(problem, pool_size, params, _seed(seed, 0), max_gap)
    rng = np.random.default_rng(_seed(seed, 1))
    edges = np.arange(0.0, max_gap + delta / 2, delta)
    if edges[-1] < max_gap:
        edges = np.append(edges, max_gap)
    edges[-1] = max_gap
    sched = schedule_ra(t_p, s_p)
    report = Report(("bin_lo", "bin_hi", "p_star", "mean_cost", "n_states"))
    report.meta = {"delta": delta, "s_p": s_p, "n_samples": n_samples, "seed": seed,
                   "pool_size": pool_size, "n_candidates": int(len(states))}
    for b, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        members = np.flatnonzero((gaps >= lo) & (gaps < hi))
        if members.size == 0:
            report.flags.append(f"empty bin [{lo:g}, {hi:g})")
            continue
        if members.size > states_per_bin:
            members = np.sort(rng.choice(members, states_per_bin, replace=False))
        ps, costs = [], []
        for k, m in enumerate(members):
            ss = run_sampler(problem.qubo, sched, n_samples, states[m], params, _seed(seed, 2, b, k))
            ps.append(success_probability(ss, problem.E_g))
            costs.append(ss.energies.mean())
        report.add(bin_lo=float(lo), bin_hi=float(hi), p_star=float(np.mean(ps)),
                   mean_cost=float(np.mean(costs)), n_states=int(members.size))
    return report


@dataclass
class Comparison:
    """Per-algorithm outcome of :func:`algorithm_comparison`."""

    s_p: dict
    p_star: dict
    mean_delta_e: dict
    histograms: dict
    report: Report


def algorithm_comparison(
    problems: Sequence[Problem],
    algorithms: Sequence[str] = ("FA", "RA-random", "RA-greedy"),
    sp_grid: Sequence[float] = DEFAULT_SP_GRID,
    n_samples: int = DEFAULT_NUM_SAMPLES,
    calibration_samples: int = 1000,
    params: EngineParams | None = None,
    seed: int = 0,
    edges=DEFAULT_BUCKETS,
) -> Comparison:
    """Energy-gap distributions of several algorithms at their typical best setting.

    A calibration sweep finds each instance's best s_p per algorithm (highest
    p*, then lowest mean gap, then lowest s_p); the median of these over
    instances, snapped to the grid, is the setting used for the final
    ``n_samples`` runs.  Histograms are averaged with equal instance weights.
    """
    sp_grid = tuple(sp_grid)
    chosen, p_star, mean_de, hists = {}, {}, {}, {}
    report = Report(("instance", "algo", "s_p", "p_star", "mean_delta_e"))
    for ai, algo in enumerate(algorithms):
        best_idx = []
        for pi, prob in enumerate(problems):
            scores = []
            for si, s_p in enumerate(sp_grid):
                r = _run_point(prob, algo, s_p, None, calibration_samples, params,
                               _seed(seed, 0, ai, pi, si), 1.0, 1.0, 99.0)
                scores.append((-r["p_star"], r["mean_delta_e"], si))
            best_idx.append(min(scores)[2])
        s_p = sp_grid[int(np.round(np.median(best_idx)))]
        chosen[algo] = s_p
        p_star[algo], mean_de[algo], per_inst = [], [], []
        for pi, prob in enumerate(problems):
            r = _run_point(prob, algo, s_p, None, n_samples, params, _seed(seed, 1, ai, pi), 1.0, 1.0, 99.0)
            p_star[algo].append(r["p_star"])
            mean_de[algo].append(r["mean_delta_e"])
            per_inst.append(delta_e_histogram(r["samples"], prob.E_g, edges))
            report.add(instance=prob.name, algo=algo, s_p=s_p, p_star=r["p_star"], mean_delta_e=r["mean_delta_e"])
        hists[algo] = average_histograms(per_inst)
    return Comparison(chosen, p_star, mean_de, hists, report)


def histogram_report(hist: Histogram) -> Report:
    report = Report(("bucket_lo", "bucket_hi", "mass"))
    for lo, hi, m in hist.rows():
        report.add(bucket_lo=lo, bucket_hi=hi, mass=m)
    return report


def simplification_study(
    modulations: Sequence[str] = ("bpsk", "qpsk", "qam16", "qam64"),
    max_vars: int = 48,
    min_vars: int = 2,
    n_instances: int = 50,
    seed: int = 0,
) -> Report:
    """Share of MIMO QUBOs in which variable fixing fires, per size and modulation.

    ``avg_fixed`` averages the fixed-variable count over the simplified
    instances only (0.0 when none simplified).
    """
    report = Report(("n_vars", "modulation", "ratio_simplified", "avg_fixed"))
    for mi, name in enumerate(modulations):
        mod = get_modulation(name)
        for users in range(1, max_vars // mod.bits_per_symbol + 1):
            n_vars = users * mod.bits_per_symbol
            if n_vars < min_vars:
                continue
            counts = []
            for k in range(n_instances):
                inst = generate_instance(users, mod, _seed(seed, mi, users, k))
                counts.append(prefix_simplify(mimo_to_qubo(inst)).n_fixed)
            counts = np.array(counts)
            hit = counts > 0
            report.add(n_vars=n_vars, modulation=mod.key, ratio_simplified=float(hit.mean()),
                       avg_fixed=float(counts[hit].mean()) if hit.any() else 0.0)
    return report
