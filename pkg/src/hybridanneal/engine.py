"""Schedule-driven Monte Carlo kernels standing in for annealing hardware.

Two modes read the same ``s`` profile (one value per sweep):

``sa``
    Metropolis single-flip dynamics on the QUBO at temperature
    ``base_temperature + gamma0 * (1 - s) / s`` (infinite at ``s = 0``).
``sqa``
    Path-integral Monte Carlo over ``P`` imaginary-time replicas of the
    Ising form.  The problem term is weighted by ``s`` and the transverse
    field is ``gamma0 * (1 - s)``, which couples neighbouring replicas with
    ``J_perp = -log(tanh(beta * Gamma / P)) / 2``.  Each sweep does local flips
    on every replica site and one collective flip per spin across replicas.

Coefficients are divided by their largest magnitude before sampling.  Every
sample re-seeds the kernel RNG from its own seed, so results depend only on
``(seed, sample index)`` and not on evaluation order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numba
import numpy as np

__all__ = ["EngineParams", "run_kernel", "sample_seeds"]

MODES = ("sqa", "sa")
J_PERP_MAX = 12.0


@dataclass(frozen=True)
class EngineParams:
    mode: str = "sqa"
    trotter_slices: int = 20
    base_temperature: float = 0.05
    sweeps_per_microsecond: float = 100.0
    gamma0: float = 1.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.trotter_slices) != self.trotter_slices or self.trotter_slices < 1:
            raise ValueError("trotter_slices must be a positive integer")
        if not self.sweeps_per_microsecond >= 1:
            raise ValueError("sweeps_per_microsecond must be at least 1")
        if not self.base_temperature > 0:
            raise ValueError("base_temperature must be positive")
        if not self.gamma0 > 0:
            raise ValueError("gamma0 must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def sample_seeds(seed: int, n_samples: int, start: int = 0) -> np.ndarray:
    """Independent 32-bit kernel seeds for sample indices ``start .. start+n-1``."""
    return np.array(
        [
            np.random.SeedSequence(seed, spawn_key=(i,)).generate_state(1)[0]
            for i in range(start, start + n_samples)
        ],
        dtype=np.int64,
    )


@numba.njit(cache=True)
def _sa_kernel(diag, W, betas, init, random_init, seeds):
    n_samples = seeds.size
    n = diag.size
    out = np.zeros((n_samples, n), dtype=np.uint8)
    q = np.zeros(n, dtype=np.int64)
    field = np.zeros(n)
    for k in range(n_samples):
        np.random.seed(seeds[k])
        for i in range(n):
            if random_init:
                q[i] = 1 if np.random.random() < 0.5 else 0
            else:
                q[i] = init[k, i]
        for i in range(n):
            f = diag[i]
            for m in range(n):
                f += W[i, m] * q[m]
            field[i] = f
        for beta in betas:
            for i in range(n):
                delta = (1 - 2 * q[i]) * field[i]
                if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                    step = 1 - 2 * q[i]
                    q[i] += step
                    for m in range(n):
                        field[m] += W[m, i] * step
        for i in range(n):
            out[k, i] = q[i]
    return out


@numba.njit(cache=True)
def _sqa_kernel(h, J, weights, jperps, n_slices, init, random_init, seeds):
    n_samples = seeds.size
    n = h.size
    P = n_slices
    out = np.zeros((n_samples, n), dtype=np.uint8)
    spin = np.zeros((P, n), dtype=np.int64)
    field = np.zeros((P, n))
    for k in range(n_samples):
        np.random.seed(seeds[k])
        for p in range(P):
            for i in range(n):
                if random_init:
                    spin[p, i] = 1 if np.random.random() < 0.5 else -1
                else:
                    spin[p, i] = 2 * init[k, i] - 1
        for p in range(P):
            for i in range(n):
                f = h[i]
                for m in range(n):
                    f += J[i, m] * spin[p, m]
                field[p, i] = f
        for t in range(weights.size):
            a = weights[t]
            jp = jperps[t]
            for p in range(P):
                up = p - 1 if p > 0 else P - 1
                dn = p + 1 if p < P - 1 else 0
                for i in range(n):
                    sg = spin[p, i]
                    d = -2.0 * sg * field[p, i] * a
                    if P > 1:
                        d += 2.0 * jp * sg * (spin[up, i] + spin[dn, i])
                    if d <= 0.0 or np.random.random() < np.exp(-d):
                        spin[p, i] = -sg
                        for m in range(n):
                            field[p, m] -= 2.0 * J[m, i] * sg
            # collective flip of one spin across all replicas
            for i in range(n):
                d = 0.0
                for p in range(P):
                    d += -2.0 * spin[p, i] * field[p, i]
                d *= a
                if d <= 0.0 or np.random.random() < np.exp(-d):
                    for p in range(P):
                        sg = spin[p, i]
                        spin[p, i] = -sg
                        for m in range(n):
                            field[p, m] -= 2.0 * J[m, i] * sg
        for i in range(n):
            out[k, i] = 1 if spin[0, i] > 0 else 0
    return out


def _sa_betas(s_profile, params: EngineParams) -> np.ndarray:
    s = np.asarray(s_profile, dtype=np.float64)
    betas = np.zeros_like(s)
    pos = s > 0
    temp = params.base_temperature + params.gamma0 * (1.0 - s[pos]) / s[pos]
    betas[pos] = 1.0 / temp
    return betas


def _sqa_couplings(s_profile, params: EngineParams):
    s = np.asarray(s_profile, dtype=np.float64)
    beta = 1.0 / params.base_temperature
    P = int(params.trotter_slices)
    weights = beta * s / P
    x = beta * params.gamma0 * (1.0 - s) / P
    with np.errstate(divide="ignore"):
        jperp = -0.5 * np.log(np.tanh(x))
    jperp = np.where(x > 0, np.minimum(jperp, J_PERP_MAX), J_PERP_MAX)
    return weights, jperp


def run_kernel(Q: np.ndarray, s_profile, params: EngineParams, seeds, init=None) -> np.ndarray:
    """Draw one bitstring per seed for the upper-triangular QUBO ``Q``.

    ``init`` is either None (uniformly random start, drawn from the sample's
    own stream) or an array of shape (n_samples, n) with one start each.
    """
    Q = np.asarray(Q, dtype=np.float64)
    n = Q.shape[0]
    scale = np.abs(Q).max()
    Qn = Q / scale if scale > 0 else Q.copy()
    seeds = np.asarray(seeds, dtype=np.int64)
    random_init = init is None
    init_arr = (
        np.zeros((1, n), dtype=np.uint8) if random_init else np.ascontiguousarray(init, dtype=np.uint8)
    )
    if not random_init and init_arr.shape != (seeds.size, n):
        raise ValueError(f"init must have shape ({seeds.size}, {n})")
    diag = np.diag(Qn).copy()
    upper = np.triu(Qn, 1)
    W = upper + upper.T
    if params.mode == "sa":
        return _sa_kernel(diag, W, _sa_betas(s_profile, params), init_arr, random_init, seeds)
    h = 0.5 * diag + 0.25 * W.sum(axis=1)
    Jsym = 0.25 * W
    weights, jperp = _sqa_couplings(s_profile, params)
    return _sqa_kernel(h, Jsym, weights, jperp, int(params.trotter_slices), init_arr, random_init, seeds)
