"""QUBO and Ising models, energy evaluation and the solution-quality percentile.

A QUBO over ``n`` binary variables is stored as a dense upper-triangular
matrix ``Q`` (diagonal entries are the linear terms) together with a constant
``offset``.  The energy of a bitstring ``q`` is

    E(q) = sum_{i <= j} Q_ij q_i q_j

and the external objective (for instance a detection residual) is
``E(q) + offset``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "DegenerateMetricError",
    "IsingInstance",
    "QuboInstance",
    "as_bitstring",
    "delta_e_percent",
    "energies",
    "energy",
    "energy_with_offset",
    "ising_energy",
    "load_qubo",
    "qubo_to_ising",
    "save_qubo",
]

DELTA_E_EPS = 1e-12


class DegenerateMetricError(ValueError):
    """Raised when the reference energy is too close to zero for a percentile."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuboInstance:
    """Immutable QUBO problem with an upper-triangular coefficient matrix.

    Parameters
    ----------
    coeffs : array_like, shape (n, n)
        Upper-triangular coefficients.  Any non-zero entry below the
        diagonal is rejected.
    offset : float
        Constant added to the energy to obtain the external objective.
    """

    coeffs: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        Q = np.asarray(self.coeffs, dtype=np.float64)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError(f"coefficient matrix must be square, got shape {Q.shape}")
        if Q.shape[0] < 1:
            raise ValueError("a QUBO needs at least one variable")
        if not np.all(np.isfinite(Q)) or not np.isfinite(self.offset):
            raise ValueError("QUBO coefficients and offset must be finite")
        if np.any(np.tril(Q, -1) != 0.0):
            raise ValueError("coefficients below the diagonal are not allowed (store i <= j only)")
        object.__setattr__(self, "coeffs", _frozen(Q))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def coeff(self, i: int, j: int) -> float:
        """Return ``Q_ij``; lower-triangular access (``i > j``) is an error."""
        if i > j:
            raise IndexError(f"lower-triangular access Q[{i}, {j}]; use Q[{j}, {i}]")
        return float(self.coeffs[i, j])

    @property
    def linear(self) -> np.ndarray:
        return np.diag(self.coeffs).copy()

    def symmetric_couplings(self) -> np.ndarray:
        """Symmetric off-diagonal coupling matrix ``W`` with ``W_ij = W_ji = Q_ij``."""
        U = np.triu(self.coeffs, 1)
        return U + U.T

    def with_offset(self, offset: float) -> "QuboInstance":
        return QuboInstance(self.coeffs, offset)

    def to_dict(self) -> dict:
        iu, ju = np.nonzero(np.triu(self.coeffs))
        terms = [[int(i), int(j), float(self.coeffs[i, j])] for i, j in zip(iu, ju)]
        return {"n": self.n, "offset": self.offset, "terms": terms}

    @classmethod
    def from_dict(cls, data: dict) -> "QuboInstance":
        n = int(data["n"])
        if n < 1:
            raise ValueError("'n' must be a positive integer")
        Q = np.zeros((n, n))
        for term in data.get("terms", []):
            i, j, value = int(term[0]), int(term[1]), float(term[2])
            if i > j:
                raise ValueError(f"term ({i}, {j}) violates i <= j")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"term ({i}, {j}) out of range for n={n}")
            Q[i, j] += value
        return cls(Q, float(data.get("offset", 0.0)))


@dataclass(frozen=True, eq=False)
class IsingInstance:
    """Ising model ``sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`` over spins in {-1, +1}."""

    h: np.ndarray
    J: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.float64)
        J = np.asarray(self.J, dtype=np.float64)
        if h.ndim != 1 or J.shape != (h.size, h.size):
            raise ValueError("h must be a vector and J a matching square matrix")
        if np.any(np.tril(J) != 0.0):
            raise ValueError("J must be strictly upper triangular")
        object.__setattr__(self, "h", _frozen(h))
        object.__setattr__(self, "J", _frozen(J))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.h.size


def as_bitstring(q, n: int | None = None) -> np.ndarray:
    """Validate ``q`` as a 0/1 vector (of length ``n`` if given) and return it as uint8."""
    arr = np.asarray(q)
    if arr.ndim != 1:
        raise ValueError("a bitstring must be one-dimensional")
    if n is not None and arr.size != n:
        raise ValueError(f"bitstring length {arr.size} does not match variable count {n}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bitstring entries must be 0 or 1")
    return arr.astype(np.uint8)


def energies(qubo: QuboInstance, states) -> np.ndarray:
    """Energies of a batch of bitstrings, shape (m, n) -> (m,). Offset excluded."""
    X = np.asarray(states, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != qubo.n:
        raise ValueError(f"expected states of shape (m, {qubo.n}), got {X.shape}")
    return np.einsum("bi,ij,bj->b", X, qubo.coeffs, X)


def energy(qubo: QuboInstance, q) -> float:
    """Energy ``sum_{i<=j} Q_ij q_i q_j`` of one bitstring (offset excluded)."""
    q = as_bitstring(q, qubo.n)
    return float(energies(qubo, q[None, :])[0])


def energy_with_offset(qubo: QuboInstance, q) -> float:
    return energy(qubo, q) + qubo.offset


def qubo_to_ising(qubo: QuboInstance) -> IsingInstance:
    """Rewrite a QUBO over ``q`` as an Ising model over ``s = 2q - 1``.

    The offsets are arranged so that ``ising_energy(s) + ising.offset``
    equals ``energy(q) + qubo.offset`` for every configuration.
    """
    Q = qubo.coeffs
    diag = np.diag(Q)
    upper = np.triu(Q, 1)
    h = 0.5 * diag + 0.25 * (upper.sum(axis=1) + upper.sum(axis=0))
    J = 0.25 * upper
    offset = qubo.offset + 0.5 * diag.sum() + 0.25 * upper.sum()
    return IsingInstance(h, J, offset)


def ising_energy(ising: IsingInstance, spins) -> float:
    """Ising energy of a spin vector (offset excluded)."""
    s = np.asarray(spins, dtype=np.float64)
    if s.shape != (ising.n,):
        raise ValueError(f"expected {ising.n} spins, got shape {s.shape}")
    if not np.all(np.abs(s) == 1.0):
        raise ValueError("spins must be -1 or +1")
    return float(ising.h @ s + s @ ising.J @ s)


def delta_e_percent(E_s: float, E_g: float) -> float:
    """Percent gap of a sample energy ``E_s`` above the optimum ``E_g``.

    Computed as ``100 * (E_s - E_g) / |E_g|``.  For ``E_g <= E_s <= 0`` this
    is the same as ``100 * (|E_g| - |E_s|) / |E_g|``; unlike that form it
    stays monotone in ``E_s`` when ``E_s`` is positive.
    """
    if abs(E_g) <= DELTA_E_EPS:
        raise DegenerateMetricError(f"reference energy {E_g!r} is too close to zero")
    if E_s < E_g:
        raise ValueError(f"sample energy {E_s!r} is below the reference optimum {E_g!r}")
    return 100.0 * (E_s - E_g) / abs(E_g)


def save_qubo(qubo: QuboInstance, path) -> None:
    Path(path).write_text(json.dumps(qubo.to_dict(), indent=1))


def load_qubo(path) -> QuboInstance:
    return QuboInstance.from_dict(json.loads(Path(path).read_text()))
