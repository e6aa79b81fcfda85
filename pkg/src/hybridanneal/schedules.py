"""Piecewise-linear annealing programs (forward, reverse, forward-reverse).

A schedule is a list of ``(time_us, s)`` breakpoints.  ``s = 0`` is full
quantum fluctuation and ``s = 1`` a classical register.  Builder arithmetic is
generic, so ``fractions.Fraction`` parameters give exact breakpoints.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from numbers import Real

import numpy as np

__all__ = [
    "AnnealSchedule",
    "ScheduleError",
    "schedule_fa",
    "schedule_fr",
    "schedule_ra",
    "sweep_profile",
]

KINDS = ("FA", "RA", "FR", "custom")


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class AnnealSchedule:
    breakpoints: tuple
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple((t, s) for t, s in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if self.kind not in KINDS:
            raise ScheduleError(f"unknown schedule kind {self.kind!r}")
        if len(pts) < 2:
            raise ScheduleError("a schedule needs at least two breakpoints")
        if pts[0][0] != 0:
            raise ScheduleError("schedules start at time 0")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if not t1 > t0:
                raise ScheduleError(f"breakpoint times must increase strictly ({t0} -> {t1})")
        for _, s in pts:
            if not 0 <= s <= 1:
                raise ScheduleError(f"s={s} outside [0, 1]")
        if pts[-1][1] != 1:
            raise ScheduleError("schedules must end at s = 1")
        start = {"FA": 0, "FR": 0, "RA": 1}.get(self.kind)
        if start is not None and pts[0][1] != start:
            raise ScheduleError(f"{self.kind} schedules start at s = {start}")

    @property
    def duration(self):
        return self.breakpoints[-1][0]

    @property
    def starts_classical(self) -> bool:
        """True when the program begins at s = 1 and so needs an initial state."""
        return self.breakpoints[0][1] == 1

    def times(self) -> np.ndarray:
        return np.array([float(t) for t, _ in self.breakpoints])

    def s_values(self) -> np.ndarray:
        return np.array([float(s) for _, s in self.breakpoints])

    def s_at(self, t):
        return np.interp(t, self.times(), self.s_values())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": {k: float(v) for k, v in self.params.items()},
            "breakpoints": [[float(t), float(s)] for t, s in self.breakpoints],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnnealSchedule":
        return cls(tuple(tuple(p) for p in data["breakpoints"]), data.get("kind", "custom"),
                   dict(data.get("params", {})))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["time_us", "s"])
        for t, s in self.breakpoints:
            writer.writerow([repr(float(t)), repr(float(s))])
        return buf.getvalue()


def _check_fraction(name, value, lo=0, hi=1):
    if not isinstance(value, Real) or not lo < value < hi:
        raise ScheduleError(f"{name} must lie strictly between {lo} and {hi}, got {value!r}")


def _check_nonneg(name, value):
    if not isinstance(value, Real) or value < 0:
        raise ScheduleError(f"{name} must be non-negative, got {value!r}")


def _dedupe(points):
    # a zero-length pause repeats the previous breakpoint
    out = [points[0]]
    for p in points[1:]:
        if p[0] != out[-1][0]:
            out.append(p)
    return tuple(out)


def schedule_fa(t_a, t_p, s_p) -> AnnealSchedule:
    """Forward ramp to ``s_p``, pause ``t_p``, then finish the ramp to 1.

    Breakpoints ``(0, 0) -> (s_p, s_p) -> (s_p + t_p, s_p) -> (t_a + t_p, 1)``.
    """
    _check_fraction("s_p", s_p)
    _check_nonneg("t_p", t_p)
    if not isinstance(t_a, Real) or not t_a > s_p:
        raise ScheduleError(f"t_a must exceed s_p so the final ramp has positive length (t_a={t_a!r})")
    pts = [(0, 0), (s_p, s_p), (s_p + t_p, s_p), (t_a + t_p, 1)]
    return AnnealSchedule(_dedupe(pts), "FA", {"t_a": t_a, "t_p": t_p, "s_p": s_p})


def schedule_ra(t_p, s_p) -> AnnealSchedule:
    """Reverse from a classical state at s = 1 down to ``s_p``, pause, ramp back up.

    Breakpoints ``(0, 1) -> (1 - s_p, s_p) -> (1 - s_p + t_p, s_p) -> (2(1 - s_p) + t_p, 1)``.
    """
    _check_fraction("s_p", s_p)
    _check_nonneg("t_p", t_p)
    pts = [(0, 1), (1 - s_p, s_p), (1 - s_p + t_p, s_p), (2 * (1 - s_p) + t_p, 1)]
    return AnnealSchedule(_dedupe(pts), "RA", {"t_p": t_p, "s_p": s_p})


def schedule_fr(t_a, t_p, s_p, c_p) -> AnnealSchedule:
    """Forward to ``c_p``, reverse to ``s_p``, pause, forward to 1 in one program.

    Breakpoints ``(0, 0) -> (c_p, c_p) -> (2c_p - s_p, s_p) -> (2c_p - s_p + t_p, s_p)
    -> (2c_p - 2s_p + t_p + t_a, 1)``.
    """
    _check_fraction("s_p", s_p)
    _check_fraction("c_p", c_p)
    _check_nonneg("t_p", t_p)
    if not s_p < c_p:
        raise ScheduleError(f"s_p must be below c_p (s_p={s_p!r}, c_p={c_p!r})")
    if not isinstance(t_a, Real) or not t_a > s_p:
        raise ScheduleError(f"t_a must exceed s_p so the final ramp has positive length (t_a={t_a!r})")
    pts = [
        (0, 0),
        (c_p, c_p),
        (2 * c_p - s_p, s_p),
        (2 * c_p - s_p + t_p, s_p),
        (2 * c_p - 2 * s_p + t_p + t_a, 1),
    ]
    return AnnealSchedule(_dedupe(pts), "FR", {"t_a": t_a, "t_p": t_p, "s_p": s_p, "c_p": c_p})


def sweep_profile(schedule: AnnealSchedule, sweeps_per_microsecond: float) -> np.ndarray:
    """Value of ``s`` at each Monte Carlo sweep.

    The duration is cut into ``round(duration * sweeps_per_microsecond)``
    equal steps (at least one) and ``s`` is sampled at the end of each, so
    the final sweep always runs at ``s = 1``.
    """
    duration = float(schedule.duration)
    n_sweeps = max(1, int(round(duration * sweeps_per_microsecond)))
    t = duration * np.arange(1, n_sweeps + 1) / n_sweeps
    return schedule.s_at(t)
