"""Success probability, time-to-solution and energy-gap distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qubo import DELTA_E_EPS, DegenerateMetricError

__all__ = [
    "DEFAULT_BUCKETS",
    "Histogram",
    "average_histograms",
    "delta_e_histogram",
    "delta_e_values",
    "ground_tolerance",
    "success_probability",
    "tts",
]

# 1%-wide buckets over [0, 100) plus one open bucket above
DEFAULT_BUCKETS = np.append(np.arange(0.0, 101.0, 1.0), np.inf)


def ground_tolerance(E_g: float) -> float:
    return 1e-9 * (1.0 + abs(E_g))


def _sample_energies(samples) -> np.ndarray:
    e = getattr(samples, "energies", samples)
    e = np.asarray(e, dtype=np.float64)
    if e.size == 0:
        raise ValueError("empty sample set")
    return e


def success_probability(samples, E_g: float) -> float:
    """Fraction of samples within ``1e-9 * (1 + |E_g|)`` of the ground energy."""
    e = _sample_energies(samples)
    return float(np.mean(e <= E_g + ground_tolerance(E_g)))


def tts(p_star: float, duration: float, C_t: float = 99.0) -> float:
    """Time to reach the optimum with confidence ``C_t`` percent.

    ``duration * log(1 - C_t/100) / log(1 - p_star)``; a certain success
    (``p_star == 1``) costs one run and ``p_star == 0`` returns ``inf``.
    """
    if not 0.0 <= p_star <= 1.0:
        raise ValueError(f"p_star must lie in [0, 1], got {p_star!r}")
    if not 0.0 < C_t < 100.0:
        raise ValueError(f"C_t must lie in (0, 100), got {C_t!r}")
    if p_star == 1.0:
        return float(duration)
    if p_star == 0.0:
        return math.inf
    return float(duration) * (math.log1p(-C_t / 100.0) / math.log1p(-p_star))


def delta_e_values(samples, E_g: float) -> np.ndarray:
    """Per-sample ``100 * (E_s - E_g) / |E_g|``.

    Energies below ``E_g`` by less than the ground tolerance count as 0;
    anything lower means ``E_g`` was not the optimum and raises.
    """
    if abs(E_g) <= DELTA_E_EPS:
        raise DegenerateMetricError(f"reference energy {E_g!r} is too close to zero")
    gap = _sample_energies(samples) - E_g
    if np.any(gap < -ground_tolerance(E_g)):
        raise ValueError("sample energy below the reference optimum")
    return 100.0 * np.maximum(gap, 0.0) / abs(E_g)


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    mass: np.ndarray

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(lo), float(hi), float(m)) for lo, hi, m in zip(self.edges[:-1], self.edges[1:], self.mass)]

    def bucket_of(self, value: float) -> int:
        return int(np.searchsorted(self.edges, value, side="right") - 1)

    def mean(self) -> float:
        """Mass-weighted bucket midpoint (open last bucket uses its lower edge)."""
        hi = np.where(np.isfinite(self.edges[1:]), self.edges[1:], self.edges[:-1])
        return float(np.sum(self.mass * 0.5 * (self.edges[:-1] + hi)))


def delta_e_histogram(samples, E_g: float, edges=DEFAULT_BUCKETS) -> Histogram:
    """Empirical distribution of per-sample percent gaps over ``[lo, hi)`` buckets."""
    edges = np.asarray(edges, dtype=np.float64)
    d = delta_e_values(samples, E_g)
    idx = np.searchsorted(edges, d, side="right") - 1
    if np.any(idx < 0) or np.any(idx >= edges.size - 1):
        raise ValueError("bucket edges do not cover every sample")
    mass = np.bincount(idx, minlength=edges.size - 1).astype(np.float64) / d.size
    return Histogram(edges, mass)


def average_histograms(histograms) -> Histogram:
    """Equal-weight average of per-instance histograms sharing the same buckets."""
    histograms = list(histograms)
    if not histograms:
        raise ValueError("no histograms to average")
    edges = histograms[0].edges
    for h in histograms[1:]:
        if not np.array_equal(h.edges, edges):
            raise ValueError("histograms use different buckets")
    return Histogram(edges, np.mean([h.mass for h in histograms], axis=0))
