"""Integrity checks for stored instances.

For each instance the stored QUBO (``<stem>.qubo.json`` next to the
instance, or a fresh reduction when absent) is checked against the complex
residual ``||y - H x(q)||^2``:

* ``N_v <= 16``: every bitstring (``exhaustive``);
* ``N_v > 16``: 1,000 random bitstrings plus ``tx_bits`` (``sampled``);
* ``N_v <= 20``: the exhaustive minimum of the residual is 0 and ``tx_bits``
  is among the minimisers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classical import brute_force
from .mimo import MimoInstance, load_instance, mimo_to_qubo, residuals
from .qubo import QuboInstance, energies, load_qubo

__all__ = ["CheckResult", "verify_instance", "verify_directory", "EXHAUSTIVE_MAX", "GROUND_TRUTH_MAX"]

EXHAUSTIVE_MAX = 16
GROUND_TRUTH_MAX = 20
SAMPLED_CHECKS = 1000


@dataclass
class CheckResult:
    name: str
    n_vars: int
    mode: str  # "exhaustive" or "sampled"
    ok: bool
    message: str = ""


def _all_states(n: int) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)[None, :]) & 1).astype(np.uint8)


def verify_instance(instance: MimoInstance, qubo: QuboInstance | None = None, name: str = "",
                    seed: int = 0) -> CheckResult:
    qubo = mimo_to_qubo(instance) if qubo is None else qubo
    n = instance.num_variables
    if qubo.n != n:
        return CheckResult(name, n, "exhaustive", False, f"QUBO has {qubo.n} variables, instance has {n}")
    if n <= EXHAUSTIVE_MAX:
        mode, states = "exhaustive", _all_states(n)
    else:
        rng = np.random.default_rng(seed)
        mode = "sampled"
        states = np.vstack([instance.tx_bits[None, :], rng.integers(0, 2, (SAMPLED_CHECKS, n), dtype=np.uint8)])
    res = residuals(instance, states)
    e = energies(qubo, states) + qubo.offset
    bad = np.flatnonzero(np.abs(e - res) > 1e-9 * (1.0 + res))
    if bad.size:
        k = bad[0]
        bits = "".join(map(str, states[k]))
        return CheckResult(name, n, mode, False,
                           f"identity violated at {bits}: energy+offset={e[k]!r}, residual={res[k]!r}")
    if n <= GROUND_TRUTH_MAX:
        gs = brute_force(qubo, max_vars=GROUND_TRUTH_MAX)
        ground = residuals(instance, gs.states)
        tol = 1e-9 * (1.0 + np.abs(qubo.coeffs).sum())
        if abs(gs.energy + qubo.offset) > tol or np.any(ground > tol):
            return CheckResult(name, n, mode, False, f"minimum residual is {gs.energy + qubo.offset!r}, not 0")
        if not np.any(np.all(gs.states == instance.tx_bits, axis=1)):
            return CheckResult(name, n, mode, False, "tx_bits is not among the minimisers")
    return CheckResult(name, n, mode, True)


def verify_directory(path) -> list[CheckResult]:
    """Check every instance file (``*.json`` except ``*.qubo.json``) in a directory."""
    path = Path(path)
    files = sorted(p for p in path.glob("*.json") if not p.name.endswith(".qubo.json") and p.name != "manifest.json")
    if path.joinpath("instances").is_dir():
        files += sorted(p for p in (path / "instances").glob("*.json") if not p.name.endswith(".qubo.json"))
    results = []
    for k, f in enumerate(files):
        try:
            inst = load_instance(f)
        except (KeyError, ValueError, TypeError) as err:
            results.append(CheckResult(f.name, 0, "-", False, f"unreadable instance: {err}"))
            continue
        qpath = f.with_name(f.name[: -len(".json")] + ".qubo.json")
        qubo = load_qubo(qpath) if qpath.exists() else None
        results.append(verify_instance(inst, qubo, f.name, seed=k))
    return results
