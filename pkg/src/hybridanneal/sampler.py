"""Sampling front end: initial-state handling, sample sets and their files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classical import greedy_search
from .engine import EngineParams, run_kernel, sample_seeds
from .qubo import QuboInstance, as_bitstring, energies
from .schedules import AnnealSchedule, sweep_profile

__all__ = ["DEFAULT_NUM_SAMPLES", "SampleSet", "anneal_sample", "resolve_initial", "run_sampler"]

DEFAULT_NUM_SAMPLES = 10_000


@dataclass(frozen=True, eq=False)
class SampleSet:
    """All draws of one solver configuration, indexed by sample number."""

    states: np.ndarray
    energies: np.ndarray
    schedule: AnnealSchedule
    seed: int | None = None
    initial: str = "none"
    params: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return self.states.shape[0]

    @property
    def best_energy(self) -> float:
        return float(self.energies.min())

    @property
    def best_state(self) -> np.ndarray:
        return self.states[int(np.argmin(self.energies))]

    def records(self) -> list[tuple[np.ndarray, float, int]]:
        """Distinct bitstrings as ``(bits, energy, count)``, lowest energy first."""
        uniq, first, counts = np.unique(self.states, axis=0, return_index=True, return_counts=True)
        e = self.energies[first]
        order = np.lexsort((np.arange(len(e)), e))
        return [(uniq[k], float(e[k]), int(counts[k])) for k in order]

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "seed": self.seed,
            "initial": self.initial,
            "params": self.params,
            "schedule": self.schedule.to_dict(),
            "samples": [
                {"bits": "".join(map(str, bits)), "energy": e, "count": c}
                for bits, e, c in self.records()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SampleSet":
        states, es = [], []
        for rec in data["samples"]:
            bits = np.array([int(ch) for ch in rec["bits"]], dtype=np.uint8)
            states.extend([bits] * int(rec["count"]))
            es.extend([float(rec["energy"])] * int(rec["count"]))
        if len(states) != int(data["n_samples"]):
            raise ValueError("sample counts do not add up to n_samples")
        return cls(np.array(states), np.array(es), AnnealSchedule.from_dict(data["schedule"]),
                   data.get("seed"), data.get("initial", "none"), data.get("params", {}))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load(cls, path) -> "SampleSet":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _check_initial(schedule: AnnealSchedule, has_initial: bool) -> None:
    if schedule.starts_classical and not has_initial:
        raise ValueError(f"{schedule.kind} schedule starts at s = 1 and needs an initial state")
    if not schedule.starts_classical and has_initial:
        raise ValueError(f"{schedule.kind} schedule starts from s < 1 and takes no initial state")


def resolve_initial(qubo: QuboInstance, initial):
    """Turn an initial-state provider into a fixed bitstring, ``"random"`` or None.

    Accepted providers: None, ``"greedy"``, ``"random"`` and an explicit bitstring.
    """
    if initial is None or (isinstance(initial, str) and initial == "none"):
        return None, "none"
    if isinstance(initial, str):
        if initial == "greedy":
            return greedy_search(qubo), "greedy"
        if initial == "random":
            return "random", "random"
        raise ValueError(f"unknown initial-state provider {initial!r}")
    return as_bitstring(initial, qubo.n), "fixed"


def run_sampler(
    qubo: QuboInstance,
    schedule: AnnealSchedule,
    n_samples: int = DEFAULT_NUM_SAMPLES,
    initial=None,
    params: EngineParams | None = None,
    seed: int = 0,
) -> SampleSet:
    """Draw ``n_samples`` independent anneals of ``qubo`` under ``schedule``.

    ``initial`` selects the start of schedules that begin at s = 1: a fixed
    bitstring, ``"greedy"`` (the greedy-search result, same for every
    sample) or ``"random"`` (a fresh uniform state per sample).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    params = params or EngineParams()
    start, label = resolve_initial(qubo, initial)
    _check_initial(schedule, start is not None)
    seeds = sample_seeds(seed, n_samples)
    init = None
    if start is not None and not isinstance(start, str):
        init = np.broadcast_to(start, (n_samples, qubo.n))
    profile = sweep_profile(schedule, params.sweeps_per_microsecond)
    states = run_kernel(qubo.coeffs, profile, params, seeds, init)
    return SampleSet(states, energies(qubo, states), schedule, seed, label, params.to_dict())


def anneal_sample(
    qubo: QuboInstance,
    schedule: AnnealSchedule,
    initial=None,
    params: EngineParams | None = None,
    seed: int = 0,
) -> np.ndarray:
    """One anneal; identical to sample 0 of ``run_sampler`` with the same seed."""
    return run_sampler(qubo, schedule, 1, initial, params, seed).states[0]
