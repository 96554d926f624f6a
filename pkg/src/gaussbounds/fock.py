"""
Truncated Fock-space linear algebra.

States live on ``cutoff**modes`` dimensional spaces spanned by number states
|0>, ..., |cutoff-1> of each mode. Probability mass that does not fit in the
truncated space is kept in ``FockState.trace_deficit`` instead of being
silently renormalized away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import xlog1py

__all__ = [
    "DimensionError",
    "NotAStateError",
    "FockState",
    "ladder_operator",
    "number_operator",
    "thermal_state",
    "fock_projector",
    "renormalize",
    "von_neumann_entropy",
    "entropy_from_eigenvalues",
    "g",
    "g_inverse",
    "mean_photons",
    "tensor",
    "partial_trace",
    "ptrace",
    "thermal_tail_cutoff",
]

EIG_CLAMP = 1e-14
NEGATIVE_EIG_TOL = 1e-8


class DimensionError(ValueError):
    """Raised for cutoffs, mode indices or shapes that do not fit together."""


class NotAStateError(ValueError):
    """Raised when a matrix has eigenvalues too negative to be a density matrix."""


@dataclass(frozen=True, eq=False)
class FockState:
    """Density matrix on ``modes`` bosonic modes, each truncated at ``cutoff`` levels.

    ``trace(matrix) + trace_deficit == 1``; the deficit is the mass lost to
    truncation anywhere upstream. Construction checks shape, hermiticity and
    the trace identity; positivity is only checked by :meth:`validate`, since
    it needs a full eigendecomposition.
    """

    modes: int
    cutoff: int
    matrix: np.ndarray
    trace_deficit: float = 0.0

    def __post_init__(self):
        if self.modes < 1:
            raise DimensionError(f"modes must be positive, got {self.modes}")
        if self.cutoff < 2:
            raise DimensionError(f"cutoff must be >= 2, got {self.cutoff}")
        m = np.array(self.matrix, dtype=complex)
        dim = self.cutoff**self.modes
        if m.shape != (dim, dim):
            raise DimensionError(
                f"matrix shape {m.shape} does not match {self.modes} modes at cutoff {self.cutoff}"
            )
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
            raise NotAStateError("matrix is not Hermitian")
        if self.trace_deficit < -1e-12:
            raise NotAStateError(f"negative trace deficit {self.trace_deficit}")
        if abs(np.trace(m).real + self.trace_deficit - 1.0) > 1e-10:
            raise NotAStateError(
                f"trace {np.trace(m).real:.3e} + deficit {self.trace_deficit:.3e} != 1"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "trace_deficit", max(float(self.trace_deficit), 0.0))

    @property
    def dim(self) -> int:
        return self.cutoff**self.modes

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def validate(self, tol: float = 1e-10) -> "FockState":
        lo = np.linalg.eigvalsh(self.matrix)[0]
        if lo < -tol:
            raise NotAStateError(f"minimum eigenvalue {lo:.3e} below -{tol:g}")
        return self

    @classmethod
    def from_matrix(cls, matrix, modes: int = 1, trace_deficit: float | None = None) -> "FockState":
        """Wrap a square matrix, inferring the per-mode cutoff.

        Small anti-Hermitian noise is projected out. If ``trace_deficit`` is
        omitted it is set to ``1 - trace``.
        """
        m = np.asarray(matrix, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        cutoff = round(m.shape[0] ** (1.0 / modes))
        if cutoff**modes != m.shape[0]:
            raise DimensionError(f"dimension {m.shape[0]} is not a {modes}-th power")
        if trace_deficit is None:
            trace_deficit = 1.0 - float(np.trace(m).real)
        return cls(modes, cutoff, m, trace_deficit)


def _check_cutoff(cutoff: int) -> None:
    if int(cutoff) != cutoff or cutoff < 2:
        raise DimensionError(f"cutoff must be an integer >= 2, got {cutoff}")


def ladder_operator(cutoff: int) -> np.ndarray:
    """Lowering operator a|n> = sqrt(n)|n-1> on the first ``cutoff`` levels."""
    _check_cutoff(cutoff)
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def number_operator(cutoff: int, modes: int = 1) -> np.ndarray:
    """Diagonal of the total photon number on ``modes`` modes (returned as a vector)."""
    _check_cutoff(cutoff)
    levels = np.arange(cutoff, dtype=float)
    total = np.zeros(1)
    for _ in range(modes):
        total = np.add.outer(total, levels).ravel()
    return total


def thermal_weights(E: float, cutoff: int) -> np.ndarray:
    """Populations (1/(E+1)) (E/(E+1))^k for k < cutoff, not renormalized."""
    if E < 0:
        raise ValueError(f"mean photon number must be >= 0, got {E}")
    if E == 0:
        w = np.zeros(cutoff)
        w[0] = 1.0
        return w
    q = E / (E + 1.0)
    return q ** np.arange(cutoff) / (E + 1.0)


def thermal_state(E: float, cutoff: int) -> FockState:
    """One-mode thermal state with mean photon number ``E``.

    Normalized over the infinite series, so the mass above the cutoff,
    ``(E/(E+1))**cutoff``, is reported as the trace deficit.
    """
    _check_cutoff(cutoff)
    w = thermal_weights(E, cutoff)
    deficit = 0.0 if E == 0 else (E / (E + 1.0)) ** cutoff
    return FockState(1, cutoff, np.diag(w).astype(complex), deficit)


def fock_projector(levels: Sequence[int], cutoff: int) -> FockState:
    """|n_1 ... n_k><n_1 ... n_k| for the given occupation numbers."""
    _check_cutoff(cutoff)
    idx = 0
    for n in levels:
        if not 0 <= n < cutoff:
            raise DimensionError(f"level {n} outside cutoff {cutoff}")
        idx = idx * cutoff + n
    dim = cutoff ** len(levels)
    m = np.zeros((dim, dim), dtype=complex)
    m[idx, idx] = 1.0
    return FockState(len(levels), cutoff, m)


def renormalize(state: FockState) -> FockState:
    """Rescale to unit trace; the deficit is dropped."""
    tr = state.trace
    if tr <= 0:
        raise NotAStateError("cannot renormalize a state with non-positive trace")
    return FockState(state.modes, state.cutoff, state.matrix / tr, 0.0)


def entropy_from_eigenvalues(eigs) -> float:
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size and eigs.min() < -NEGATIVE_EIG_TOL:
        raise NotAStateError(f"eigenvalue {eigs.min():.3e} is too negative for a state")
    p = eigs[eigs > EIG_CLAMP]
    # eigenvalues a hair above 1 would give -0.0 or -1e-16
    return max(0.0, float(-np.sum(p * np.log(p))))


def von_neumann_entropy(state) -> float:
    """-Tr rho ln rho in nats.

    Accepts a :class:`FockState` or a bare Hermitian matrix. Eigenvalues below
    1e-14 count as zero. Diagonal inputs skip the eigendecomposition.
    """
    m = state.matrix if isinstance(state, FockState) else np.asarray(state)
    d = np.diagonal(m).real
    if np.count_nonzero(m - np.diag(np.diagonal(m))) == 0:
        return entropy_from_eigenvalues(d)
    return entropy_from_eigenvalues(np.linalg.eigvalsh(m))


def g(E):
    """Entropy of the thermal state with mean photon number E: (E+1)ln(E+1) - E ln E.

    Evaluated as ln(1+E) + E ln(1+1/E), which avoids cancellation for large E.
    Accepts scalars or arrays.
    """
    if np.ndim(E) == 0:
        E = float(E)
        if E > 0:
            return math.log1p(E) + E * math.log1p(1.0 / E)
        if E == 0:
            return 0.0
        raise ValueError("g is defined for E >= 0")
    E = np.asarray(E, dtype=float)
    if np.any(E < 0):
        raise ValueError("g is defined for E >= 0")
    with np.errstate(divide="ignore"):
        inv = np.where(E > 0, 1.0 / np.where(E > 0, E, 1.0), 0.0)
    return np.log1p(E) + xlog1py(E, inv)


def _g_inverse_scalar(x: float) -> float:
    if x < 0:
        raise ValueError(f"g_inverse needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    # g(E) >= ln(E+1) puts the root inside [0, e^x]
    return brentq(lambda E: g(E) - x, 0.0, math.exp(x), xtol=1e-300, rtol=1e-14, maxiter=500)


def g_inverse(x):
    """Mean photon number of the thermal state with entropy ``x`` nats."""
    if np.ndim(x) == 0:
        return _g_inverse_scalar(float(x))
    x = np.asarray(x, dtype=float)
    return np.array([_g_inverse_scalar(v) for v in x.ravel()]).reshape(x.shape)


def mean_photons(state: FockState, per_mode: bool = False) -> float:
    """Tr[H rho] with H the total photon number (truncated space only)."""
    total = float(np.dot(number_operator(state.cutoff, state.modes), np.diagonal(state.matrix).real))
    return total / state.modes if per_mode else total


def tensor(a: FockState, b: FockState) -> FockState:
    if a.cutoff != b.cutoff:
        raise DimensionError(f"cutoffs differ: {a.cutoff} vs {b.cutoff}")
    deficit = 1.0 - (1.0 - a.trace_deficit) * (1.0 - b.trace_deficit)
    return FockState(a.modes + b.modes, a.cutoff, np.kron(a.matrix, b.matrix), deficit)


def ptrace(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a matrix on a tensor product with subsystem sizes ``dims``.

    Subsystems listed in ``keep`` survive, in their original order.
    """
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep={keep} out of range for {n} subsystems")
    t = np.asarray(matrix).reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace out from the highest index so the remaining axis numbers stay valid
    for count, i in enumerate(sorted(traced, reverse=True)):
        m = n - count
        t = np.trace(t, axis1=i, axis2=i + m)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def partial_trace(joint: FockState, keep: Sequence[int]) -> FockState:
    keep = sorted(set(keep))
    if not keep:
        raise DimensionError("keep must name at least one mode")
    m = ptrace(joint.matrix, [joint.cutoff] * joint.modes, keep)
    return FockState(len(keep), joint.cutoff, 0.5 * (m + m.conj().T), joint.trace_deficit)


def thermal_tail_cutoff(E: float, tol: float, minimum: int = 2) -> int:
    """Smallest cutoff D with (E/(E+1))**D < tol."""
    if E <= 0:
        return minimum
    q = E / (E + 1.0)
    return max(minimum, int(np.floor(np.log(tol) / np.log(q))) + 1)
