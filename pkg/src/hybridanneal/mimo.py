"""Random noiseless MIMO detection instances and their reduction to QUBO form.

Bits are laid out user by user.  Inside one user's group the first
``bits_per_real_dimension`` bits select the in-phase amplitude and the next
ones the quadrature amplitude (BPSK has a single real bit).  A real amplitude
is the natural-binary weighting

    a = sum_b 2**(B - 1 - b) * (2 q_b - 1),

which is linear in the bits, so ``||y - H x(q)||^2`` is a quadratic form in
``q`` and expands exactly into a QUBO plus a constant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .qubo import QuboInstance, as_bitstring

__all__ = [
    "BPSK",
    "QAM16",
    "QAM64",
    "QPSK",
    "MODULATIONS",
    "MimoInstance",
    "Modulation",
    "bit_errors",
    "generate_instance",
    "get_modulation",
    "load_instance",
    "mimo_to_qubo",
    "residual_norm_sq",
    "residuals",
    "save_instance",
    "symbol_of_bits",
    "symbols_of_bits",
]


@dataclass(frozen=True)
class Modulation:
    name: str
    bits_per_symbol: int
    bits_per_real_dimension: int

    @property
    def is_real(self) -> bool:
        return self.bits_per_symbol == self.bits_per_real_dimension

    @property
    def key(self) -> str:
        return _KEYS[self.name]


BPSK = Modulation("BPSK", 1, 1)
QPSK = Modulation("QPSK", 2, 1)
QAM16 = Modulation("16-QAM", 4, 2)
QAM64 = Modulation("64-QAM", 6, 3)

MODULATIONS = {"bpsk": BPSK, "qpsk": QPSK, "qam16": QAM16, "qam64": QAM64}
_KEYS = {m.name: k for k, m in MODULATIONS.items()}
_ALIASES = {"16-qam": QAM16, "16qam": QAM16, "64-qam": QAM64, "64qam": QAM64}


def get_modulation(name) -> Modulation:
    """Look up a modulation by key (``"qam16"``) or display name (``"16-QAM"``)."""
    if isinstance(name, Modulation):
        return name
    key = str(name).strip().lower()
    try:
        return MODULATIONS.get(key) or _ALIASES[key]
    except KeyError:
        raise ValueError(
            f"unknown modulation {name!r}; choose from {sorted(MODULATIONS)}"
        ) from None


def _amplitude(bits) -> int:
    B = len(bits)
    return sum((2 ** (B - 1 - b)) * (2 * int(q) - 1) for b, q in enumerate(bits))


def symbol_of_bits(bits, modulation) -> complex:
    """Map one symbol's bit group to its constellation point."""
    mod = get_modulation(modulation)
    bits = as_bitstring(bits, mod.bits_per_symbol)
    B = mod.bits_per_real_dimension
    if mod.is_real:
        return complex(_amplitude(bits), 0.0)
    return complex(_amplitude(bits[:B]), _amplitude(bits[B:]))


def symbols_of_bits(q, modulation) -> np.ndarray:
    """Map a full bitstring to the vector of transmitted symbols."""
    mod = get_modulation(modulation)
    q = np.asarray(q)
    if q.ndim != 1 or q.size % mod.bits_per_symbol:
        raise ValueError(
            f"bitstring length {q.size} is not a multiple of {mod.bits_per_symbol}"
        )
    groups = q.reshape(-1, mod.bits_per_symbol)
    return np.array([symbol_of_bits(g, mod) for g in groups], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class MimoInstance:
    """A noiseless spatial-multiplexing detection problem ``y = H x``."""

    H: np.ndarray
    y: np.ndarray
    modulation: Modulation
    tx_bits: np.ndarray
    seed: int | None = None

    @property
    def num_users(self) -> int:
        return self.H.shape[1]

    @property
    def num_receive(self) -> int:
        return self.H.shape[0]

    @property
    def num_variables(self) -> int:
        return self.num_users * self.modulation.bits_per_symbol

    def to_dict(self) -> dict:
        return {
            "num_users": self.num_users,
            "num_receive": self.num_receive,
            "modulation": self.modulation.key,
            "seed": self.seed,
            "tx_bits": [int(b) for b in self.tx_bits],
            "H": [[[float(z.real), float(z.imag)] for z in row] for row in self.H],
            "y": [[float(z.real), float(z.imag)] for z in self.y],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MimoInstance":
        H = np.array([[complex(re, im) for re, im in row] for row in data["H"]])
        y = np.array([complex(re, im) for re, im in data["y"]])
        mod = get_modulation(data["modulation"])
        if H.ndim != 2 or y.shape != (H.shape[0],):
            raise ValueError("inconsistent H / y shapes in instance file")
        tx = as_bitstring(data["tx_bits"], H.shape[1] * mod.bits_per_symbol)
        return cls(H, y, mod, tx, data.get("seed"))


def generate_instance(
    num_users: int, modulation, seed: int, num_receive: int | None = None
) -> MimoInstance:
    """Draw a unit-gain, random-phase channel and uniformly random transmitted bits."""
    if num_users < 1:
        raise ValueError("num_users must be at least 1")
    mod = get_modulation(modulation)
    n_r = num_users if num_receive is None else int(num_receive)
    if n_r < 1:
        raise ValueError("num_receive must be at least 1")
    rng = np.random.default_rng(seed)
    tx_bits = rng.integers(0, 2, size=num_users * mod.bits_per_symbol).astype(np.uint8)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(n_r, num_users))
    H = np.exp(1j * theta)
    y = H @ symbols_of_bits(tx_bits, mod)
    return MimoInstance(H, y, mod, tx_bits, seed)


def _real_system(instance: MimoInstance):
    """Real-valued stacking: returns (A, d) with residual ``||d - A q||^2``."""
    mod = instance.modulation
    H, y = instance.H, instance.y
    n_t = instance.num_users
    B = mod.bits_per_real_dimension
    if mod.is_real:
        H_r = np.vstack([H.real, H.imag])
        n_dim = n_t
    else:
        H_r = np.block([[H.real, -H.imag], [H.imag, H.real]])
        n_dim = 2 * n_t
    y_r = np.concatenate([y.real, y.imag])

    # x_r = T q + c
    T = np.zeros((n_dim, instance.num_variables))
    c = np.full(n_dim, -(2.0**B - 1.0))
    weights = 2.0 ** (B - np.arange(B))
    for u in range(n_t):
        base = u * mod.bits_per_symbol
        T[u, base:base + B] = weights
        if not mod.is_real:
            T[n_t + u, base + B:base + 2 * B] = weights
    return H_r @ T, y_r - H_r @ c


def mimo_to_qubo(instance: MimoInstance) -> QuboInstance:
    """Expand the maximum-likelihood residual into a QUBO.

    The returned offset makes ``energy(q) + offset`` equal to
    ``||y - H x(q)||^2`` for every bitstring.
    """
    A, d = _real_system(instance)
    G = A.T @ A
    lin = -2.0 * (A.T @ d)
    Q = 2.0 * np.triu(G, 1)
    Q[np.diag_indices_from(Q)] = np.diag(G) + lin
    return QuboInstance(Q, float(d @ d))


def residual_norm_sq(instance: MimoInstance, q) -> float:
    """``||y - H x(q)||^2`` evaluated directly in the complex domain."""
    q = as_bitstring(q, instance.num_variables)
    r = instance.y - instance.H @ symbols_of_bits(q, instance.modulation)
    return float(np.vdot(r, r).real)


def residuals(instance: MimoInstance, states) -> np.ndarray:
    """Vectorised :func:`residual_norm_sq` over the rows of ``states``."""
    states = np.atleast_2d(np.asarray(states, dtype=np.int64))
    mod = instance.modulation
    B = mod.bits_per_real_dimension
    groups = states.reshape(states.shape[0], instance.num_users, mod.bits_per_symbol)
    w = 2 ** np.arange(B - 1, -1, -1)
    x = (2 * groups[..., :B] - 1) @ w
    if not mod.is_real:
        x = x + 1j * ((2 * groups[..., B:] - 1) @ w)
    r = instance.y[None, :] - x @ instance.H.T
    return np.sum(np.abs(r) ** 2, axis=1)


def _to_gray(bits: np.ndarray) -> np.ndarray:
    g = bits.copy()
    g[1:] ^= bits[:-1]
    return g


def bit_errors(instance: MimoInstance, q, labeling: str = "natural") -> int:
    """Count bit errors of ``q`` against the transmitted bits.

    ``labeling="gray"`` relabels each real dimension with its reflected Gray
    code before comparing; the QUBO itself always uses natural binary.
    """
    q = as_bitstring(q, instance.num_variables)
    tx = instance.tx_bits
    if labeling == "natural":
        return int(np.sum(q != tx))
    if labeling != "gray":
        raise ValueError(f"unknown labeling {labeling!r}")
    B = instance.modulation.bits_per_real_dimension
    a = q.reshape(-1, B)
    b = tx.reshape(-1, B)
    return int(sum(np.sum(_to_gray(x) != _to_gray(z)) for x, z in zip(a, b)))


def save_instance(instance: MimoInstance, path) -> None:
    Path(path).write_text(json.dumps(instance.to_dict(), indent=1))


def load_instance(path) -> MimoInstance:
    return MimoInstance.from_dict(json.loads(Path(path).read_text()))
