"""Observables of the dimer state: imbalance moments and mode entanglement.

Everything reported here is a function of the basis probabilities
p_n = |c_n|^2 plus, for the energy, the nearest-neighbor coherences.
Probabilities are renormalized by their sum before use, so a state whose
norm has drifted by round-off still yields the observables of the ray it
represents; the drift itself is reported separately as norm_error.

The entanglement between the two modes of a pure state is the von Neumann
entropy of either reduced density matrix, which for fixed total number
collapses to the Shannon entropy of the basis weights,

    E = -sum_n p_n log2 p_n,

bounded by log2(N+1) (uniform weights) and 0 (a single Fock state).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import TridiagonalHamiltonian, imbalance_diagonal
from .spectral import StateVector

__all__ = [
    "ObservableRecord",
    "ObservableSeries",
    "compute_series",
    "entanglement_entropy",
    "expectation_imbalance",
    "record",
    "variance_imbalance",
]

# Weights below this underflow log2 into junk; they contribute exactly zero,
# as does an exact zero weight.
_ENTROPY_FLOOR = 1e-300


@dataclass(frozen=True)
class ObservableRecord:
    """One time sample: imbalance moments, entanglement and diagnostics."""

    t: float
    imbalance: float
    imbalance_scaled: float
    variance: float
    entanglement_bits: float
    norm_error: float
    energy: float


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Per-time observables over a grid, stored column-wise."""

    t: np.ndarray
    imbalance: np.ndarray
    imbalance_scaled: np.ndarray
    variance: np.ndarray
    entanglement_bits: np.ndarray
    norm_error: np.ndarray
    energy: np.ndarray

    COLUMNS = (
        "t",
        "imbalance",
        "imbalance_scaled",
        "variance",
        "entanglement_bits",
        "norm_error",
        "energy",
    )

    def __post_init__(self):
        n = None
        for name in self.COLUMNS:
            a = np.asarray(getattr(self, name), dtype=np.float64)
            if a.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            if n is None:
                n = a.size
            elif a.size != n:
                raise ValueError("all series columns must have equal length")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self) -> int:
        return self.t.size

    def records(self) -> list:
        cols = [getattr(self, name) for name in self.COLUMNS]
        return [ObservableRecord(*(float(v) for v in row)) for row in zip(*cols)]


def _normalized_probabilities(state: StateVector) -> np.ndarray:
    p = state.probabilities()
    total = p.sum()
    if total == 0.0:
        raise ValueError("state has zero norm")
    return p / total


def expectation_imbalance(state: StateVector) -> float:
    """<N1 - N2> = sum_n p_n (N - 2n)."""
    p = _normalized_probabilities(state)
    return float(p @ imbalance_diagonal(state.n_total)) + 0.0


def variance_imbalance(state: StateVector) -> float:
    """<(N1-N2)^2> - <N1-N2>^2, clamped at zero against round-off."""
    p = _normalized_probabilities(state)
    d = imbalance_diagonal(state.n_total)
    var = float(p @ d**2) - float(p @ d) ** 2
    return var if var > 0.0 else 0.0


def _entropy_bits(p: np.ndarray) -> np.ndarray:
    terms = np.zeros_like(p)
    mask = p > _ENTROPY_FLOOR
    np.log2(p, out=terms, where=mask)
    terms *= p
    # -sum p log2 p; the trailing +0.0 turns -0.0 into +0.0.
    return -terms.sum(axis=-1) + 0.0


def entanglement_entropy(state: StateVector) -> float:
    """Mode entanglement in bits, in [0, log2(N+1)]."""
    return float(_entropy_bits(_normalized_probabilities(state)))


def record(state: StateVector, t: float, h: TridiagonalHamiltonian) -> ObservableRecord:
    """Bundle all observables of one state at time t under Hamiltonian h."""
    if h.dim != state.dim:
        raise ValueError(
            f"state dimension {state.dim} does not match Hamiltonian "
            f"dimension {h.dim}"
        )
    n_total = state.n_total
    c = state.coefficients
    p_raw = state.probabilities()
    total = p_raw.sum()
    if total == 0.0:
        raise ValueError("state has zero norm")
    p = p_raw / total
    d = imbalance_diagonal(n_total)

    imbalance = float(p @ d) + 0.0
    var = float(p @ d**2) - imbalance**2
    energy = float(h.diagonal @ p)
    if h.offdiagonal.size:
        cross = (np.conj(c[:-1]) * c[1:]).real
        energy += 2.0 * float(h.offdiagonal @ cross) / total
    return ObservableRecord(
        t=float(t),
        imbalance=imbalance,
        imbalance_scaled=imbalance / n_total if n_total else 0.0,
        variance=var if var > 0.0 else 0.0,
        entanglement_bits=float(_entropy_bits(p)),
        norm_error=abs(float(np.sqrt(total)) - 1.0),
        energy=energy,
    )


def compute_series(states, t_grid, h: TridiagonalHamiltonian) -> ObservableSeries:
    """Vectorized observables along a trajectory.

    states and t_grid must have equal length; each row of the result matches
    record(states[j], t_grid[j], h) to round-off.
    """
    t = np.asarray(t_grid, dtype=np.float64)
    states = list(states)
    if t.ndim != 1 or t.size != len(states):
        raise ValueError("t_grid and states must have equal length")
    if t.size == 0:
        empty = np.empty(0)
        return ObservableSeries(*([empty] * 7))
    for s in states:
        if s.dim != h.dim:
            raise ValueError("state dimension does not match Hamiltonian")

    n_total = h.n_total
    c = np.stack([s.coefficients for s in states])
    p_raw = c.real**2 + c.imag**2
    total = p_raw.sum(axis=1)
    if np.any(total == 0.0):
        raise ValueError("state has zero norm")
    p = p_raw / total[:, None]
    d = imbalance_diagonal(n_total)

    imbalance = p @ d + 0.0
    variance = np.maximum(p @ d**2 - imbalance**2, 0.0)
    energy = p @ h.diagonal
    if h.offdiagonal.size:
        cross = (np.conj(c[:, :-1]) * c[:, 1:]).real
        energy += 2.0 * (cross @ h.offdiagonal) / total
    return ObservableSeries(
        t=t,
        imbalance=imbalance,
        imbalance_scaled=imbalance / n_total if n_total else np.zeros_like(imbalance),
        variance=variance,
        entanglement_bits=_entropy_bits(p),
        norm_error=np.abs(np.sqrt(total) - 1.0),
        energy=energy,
    )
