"""
One-mode quantum Gaussian channels on truncated Fock spaces.

Attenuators, amplifiers and phase-contravariant channels are simulated through
their unitary dilations: the input is paired with a thermal environment,
rotated by a beam splitter or a two-mode squeezer, and one of the two output
modes is traced out. The additive noise channel is a Gaussian average of
displacements, evaluated with a polar quadrature.

Both dilation unitaries conserve a photon-number combination (n + m for the
beam splitter, n - m for the squeezer), so they are assembled block by block.
Beam-splitter blocks are finite and exact; squeezer blocks are padded well
beyond the output cutoff so that the mass they push above it is measured
instead of reflected. Each channel is compiled once into a sparse
superoperator acting on one mode; n-fold tensor powers apply it mode by mode.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_laguerre

from .fock import (
    DimensionError,
    FockState,
    ladder_operator,
    thermal_tail_cutoff,
    thermal_weights,
)

__all__ = [
    "ChannelKind",
    "ChannelSpec",
    "DilationPlan",
    "TruncationError",
    "ResourceError",
    "beam_splitter_unitary",
    "two_mode_squeezer",
    "displacement_operator",
    "default_plan",
    "apply_channel",
    "apply_tensor_power",
    "dilation_marginals",
    "is_entanglement_breaking",
    "additive_noise_via_composition",
    "output_photons",
    "resize_cutoff",
    "trace_distance",
]

ENV_TAIL_TOL = 1e-10
DEFAULT_MEMORY_BUDGET = 2 * 1024**3


class TruncationError(RuntimeError):
    """More probability mass leaked out of the truncated space than allowed."""

    def __init__(self, message: str, deficit: float):
        super().__init__(message)
        self.deficit = deficit


class ResourceError(MemoryError):
    pass


class ChannelKind(str, enum.Enum):
    ATTENUATOR = "attenuator"
    AMPLIFIER = "amplifier"
    CONTRAVARIANT = "contravariant"
    ADDITIVE_NOISE = "additive-noise"


@dataclass(frozen=True)
class ChannelSpec:
    """One of the four one-mode Gaussian channels.

    ``eta`` is used by the attenuator, ``kappa`` by the amplifier and the
    contravariant channel; ``env`` is the environment mean photon number
    (the noise variance for the additive noise channel).
    """

    kind: ChannelKind
    eta: float | None = None
    kappa: float | None = None
    env: float = 0.0

    def __post_init__(self):
        kind = ChannelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.env < 0 or not math.isfinite(self.env):
            raise ValueError(f"environment photon number must be finite and >= 0, got {self.env}")
        if kind is ChannelKind.ATTENUATOR:
            if self.eta is None or not 0.0 <= self.eta <= 1.0:
                raise ValueError(f"attenuator needs 0 <= eta <= 1, got {self.eta}")
        elif kind in (ChannelKind.AMPLIFIER, ChannelKind.CONTRAVARIANT):
            if self.kappa is None or not (self.kappa >= 1.0 and math.isfinite(self.kappa)):
                raise ValueError(f"{kind.value} needs kappa >= 1, got {self.kappa}")
            if kind is ChannelKind.CONTRAVARIANT and self.kappa == 1.0 and self.env == 0.0:
                raise ValueError("contravariant channel with kappa = 1 and E = 0 is trivial")

    @classmethod
    def attenuator(cls, eta: float, env: float = 0.0) -> "ChannelSpec":
        return cls(ChannelKind.ATTENUATOR, eta=eta, env=env)

    @classmethod
    def amplifier(cls, kappa: float, env: float = 0.0) -> "ChannelSpec":
        return cls(ChannelKind.AMPLIFIER, kappa=kappa, env=env)

    @classmethod
    def contravariant(cls, kappa: float, env: float = 0.0) -> "ChannelSpec":
        return cls(ChannelKind.CONTRAVARIANT, kappa=kappa, env=env)

    @classmethod
    def additive_noise(cls, env: float) -> "ChannelSpec":
        return cls(ChannelKind.ADDITIVE_NOISE, env=env)

    @property
    def is_identity(self) -> bool:
        if self.kind is ChannelKind.ATTENUATOR:
            return self.eta == 1.0
        if self.kind is ChannelKind.AMPLIFIER:
            return self.kappa == 1.0
        if self.kind is ChannelKind.ADDITIVE_NOISE:
            return self.env == 0.0
        return False

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "eta": self.eta, "kappa": self.kappa, "env": self.env}


@dataclass(frozen=True)
class DilationPlan:
    system_cutoff: int
    env_cutoff: int
    output_cutoff: int
    radial_nodes: int = 24
    angular_nodes: int = 32
    max_leakage: float = 1e-6

    def __post_init__(self):
        for name in ("system_cutoff", "env_cutoff", "output_cutoff"):
            if getattr(self, name) < 2:
                raise DimensionError(f"{name} must be >= 2")
        if self.radial_nodes < 1 or self.angular_nodes < 1:
            raise ValueError("quadrature needs at least one node per direction")


def output_photons(spec: ChannelSpec, N: float) -> float:
    """Mean output photons per mode for an input with N photons per mode."""
    E = spec.env
    if spec.kind is ChannelKind.ATTENUATOR:
        return spec.eta * N + (1 - spec.eta) * E
    if spec.kind is ChannelKind.AMPLIFIER:
        return spec.kappa * N + (spec.kappa - 1) * (E + 1)
    if spec.kind is ChannelKind.CONTRAVARIANT:
        return (spec.kappa - 1) * (N + 1) + spec.kappa * E
    return N + E


def default_plan(
    spec: ChannelSpec,
    cutoff: int,
    input_photons: float | None = None,
    tail_tol: float = 1e-8,
    **overrides,
) -> DilationPlan:
    """Cutoffs for pushing a ``cutoff``-level input through ``spec``.

    Without ``input_photons`` the output cutoff is sized for the worst case:
    amplifiers get ceil(kappa*D + 10), the other channels D plus the thermal
    tail of the noise they add. With ``input_photons`` it is the smallest
    cutoff whose thermal tail at the predicted output photon number is below
    ``tail_tol``; the actual leakage is still measured.
    """
    env_cutoff = thermal_tail_cutoff(spec.env, ENV_TAIL_TOL)
    kind = spec.kind
    if kind is ChannelKind.ATTENUATOR and spec.env == 0.0:
        out = cutoff  # a passive channel with vacuum environment never adds photons
    elif input_photons is not None:
        out = thermal_tail_cutoff(output_photons(spec, input_photons), tail_tol)
    elif kind in (ChannelKind.AMPLIFIER, ChannelKind.CONTRAVARIANT):
        out = math.ceil(spec.kappa * cutoff + 10)
    elif kind is ChannelKind.ATTENUATOR:
        out = cutoff + thermal_tail_cutoff((1 - spec.eta) * spec.env, tail_tol) - 1
    else:
        out = cutoff + thermal_tail_cutoff(spec.env, tail_tol) - 1
    plan = DilationPlan(cutoff, env_cutoff, max(out, 2))
    return replace(plan, **overrides) if overrides else plan


# --------------------------------------------------------------------------
# dilation unitaries


@functools.lru_cache(maxsize=64)
def _tridiag_eig(offdiag: tuple):
    # iG is Hermitian tridiagonal with imaginary couplings; conjugating by
    # diag(i**k) turns it into the real symmetric tridiagonal with couplings offdiag
    return eigh_tridiagonal(np.zeros(len(offdiag) + 1), np.asarray(offdiag))


def _antisym_expm(offdiag, t: float) -> np.ndarray:
    """exp(t G) for the real antisymmetric tridiagonal G with G[i+1, i] = offdiag[i].

    Computed from the eigendecomposition of the Hermitian generator iG.
    """
    size = len(offdiag) + 1
    if t == 0.0 or size == 1:
        return np.eye(size)
    w, v = _tridiag_eig(tuple(np.asarray(offdiag, dtype=float)))
    x = (v * np.exp(-1j * t * w)) @ v.T
    k = np.arange(size)
    phase = (1j) ** ((k[:, None] - k[None, :]) % 4)
    return (phase * x).real


@functools.lru_cache(maxsize=1024)
def _bs_block(N: int, theta: float) -> np.ndarray:
    """Beam splitter on the (N+1)-dim span of |k, N-k>, indexed by k."""
    k = np.arange(N, dtype=float)
    return _antisym_expm(np.sqrt((k + 1) * (N - k)), theta)


@functools.lru_cache(maxsize=256)
def _sq_block(delta: int, r: float, size: int) -> np.ndarray:
    """Two-mode squeezer on |da + s, db + s>, s < size, with da - db = delta."""
    da, db = max(delta, 0), max(-delta, 0)
    s = np.arange(size - 1, dtype=float)
    return _antisym_expm(np.sqrt((da + s + 1) * (db + s + 1)), r)


def _bs_angle(eta: float) -> float:
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    return math.acos(math.sqrt(eta))


def _sq_rate(kappa: float) -> float:
    if not kappa >= 1.0:
        raise ValueError(f"squeezing parameter must be >= 1, got {kappa}")
    return math.acosh(math.sqrt(kappa))


def _generator_unitary(gen: np.ndarray, t: float) -> np.ndarray:
    """exp(t A) for anti-Hermitian A = gen, through eigh of iA."""
    w, v = np.linalg.eigh(1j * gen)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def beam_splitter_unitary(eta: float, cutoff: int) -> np.ndarray:
    """exp(theta (a^dag b - b^dag a)), theta = arccos sqrt(eta), on cutoff**2 levels.

    Built from the truncated generator, so it is exactly unitary and agrees
    with the untruncated operator on states with fewer than ``cutoff`` photons
    in total. Basis index is ``n_a * cutoff + n_b``.
    """
    theta = _bs_angle(eta)
    a = ladder_operator(cutoff)
    eye = np.eye(cutoff)
    A, B = np.kron(a, eye), np.kron(eye, a)
    gen = A.conj().T @ B - B.conj().T @ A
    return _generator_unitary(gen, theta)


def two_mode_squeezer(kappa: float, cutoff: int, return_leakage: bool = False):
    """exp(r (a^dag b^dag - a b)), r = arccosh sqrt(kappa), on cutoff**2 levels.

    The truncated generator gives an exactly unitary matrix, which departs
    from the true operator for inputs whose image reaches the cutoff. With
    ``return_leakage`` a second array holds, per input basis state, the norm
    the untruncated operator sends outside the box.
    """
    r = _sq_rate(kappa)
    a = ladder_operator(cutoff)
    eye = np.eye(cutoff)
    A, B = np.kron(a, eye), np.kron(eye, a)
    gen = A.conj().T @ B.conj().T - A @ B
    U = _generator_unitary(gen, r)
    if not return_leakage:
        return U
    leak = np.zeros(cutoff * cutoff)
    for n in range(cutoff):
        for m in range(cutoff):
            delta = n - m
            s_in = min(n, m)
            size = _squeezer_block_size(kappa, cutoff, cutoff, cutoff)
            col = _sq_block(delta, r, size)[:, s_in]
            inside = cutoff - max(n, m) + s_in  # s_out with both levels < cutoff
            leak[n * cutoff + m] = math.sqrt(max(0.0, 1.0 - float(np.sum(col[:inside] ** 2))))
    return U, leak


def _squeezer_block_size(kappa: float, d_in: int, d_env: int, d_out: int) -> int:
    tanh_r = math.sqrt((kappa - 1.0) / kappa)
    if tanh_r == 0.0:
        return max(d_in, d_env, d_out) + 1
    decay = math.ceil(math.log(1e-17) / math.log(tanh_r))
    spread = math.ceil(2 * kappa * (max(d_in, d_env) + 1))
    return max(d_out, spread) + decay + 20


def displacement_operator(alpha: complex, cutoff: int, pad: int = 40) -> np.ndarray:
    """D(alpha) = exp(alpha a^dag - conj(alpha) a) projected onto ``cutoff`` levels.

    Evaluated on ``cutoff + pad`` levels and cropped, which keeps the
    truncation edge away from the returned block.
    """
    D = _displacement_padded(abs(alpha), cutoff + pad)[:cutoff, :cutoff]
    return D * _phase_conj(float(np.angle(alpha)), cutoff, cutoff)


def _phase_conj(phi: float, rows: int, cols: int) -> np.ndarray:
    # R X R^dag with R = exp(i phi N) multiplies X[k, n] by exp(i phi (k - n))
    return np.exp(1j * phi * (np.arange(rows)[:, None] - np.arange(cols)[None, :]))


def _displacement_padded(x: float, size: int) -> np.ndarray:
    """exp(x (a^dag - a)) for real x on ``size`` levels."""
    return _antisym_expm(np.sqrt(np.arange(1, size, dtype=float)), x)


# --------------------------------------------------------------------------
# channel compilation


@dataclass(frozen=True, eq=False)
class _Kernel:
    """Compiled one-mode channel: superoperator mapping vec(rho) (d_in**2) to d_out**2."""

    d_in: int
    d_out: int
    superop: object  # scipy sparse or dense ndarray
    kraus: np.ndarray | None = None  # dense Kraus stack, kept when cheaper to apply directly

    def apply(self, rho: np.ndarray) -> np.ndarray:
        if self.kraus is not None:
            out = np.einsum("akn,nm,alm->kl", self.kraus, rho, self.kraus.conj(), optimize=True)
        else:
            out = (self.superop @ rho.reshape(-1)).reshape(self.d_out, self.d_out)
        return out

    def apply_mode(self, t: np.ndarray, mode: int, modes: int) -> np.ndarray:
        """Act on mode ``mode`` of a 2*modes-index density tensor."""
        t = np.moveaxis(t, (mode, modes + mode), (0, 1))
        rest = t.shape[2:]
        flat = t.reshape(self.d_in * self.d_in, -1)
        if self.superop is None:
            raise RuntimeError("kernel has no superoperator")
        out = self.superop @ flat
        out = np.asarray(out).reshape((self.d_out, self.d_out) + rest)
        return np.moveaxis(out, (0, 1), (mode, modes + mode))


def _superop_from_kraus_rows(rows, cols, vals, n_rows, d_in, d_out) -> sp.csr_matrix:
    """Sparse superoperator from Kraus entries W[a, k*d_in + n] = K_a[k, n]."""
    W = sp.csr_matrix((vals, (rows, cols)), shape=(n_rows, d_out * d_in))
    C = (W.T @ W.conj()).tocoo()  # C[(k,n),(l,n')] = sum_a K_a[k,n] conj(K_a[l,n'])
    k, n = np.divmod(C.row, d_in)
    l, n2 = np.divmod(C.col, d_in)
    S = sp.coo_matrix((C.data, (k * d_out + l, n * d_in + n2)), shape=(d_out * d_out, d_in * d_in))
    return S.tocsr()


def _dilation_entries(spec: ChannelSpec, plan: DilationPlan, keep: str):
    """Nonzero amplitudes <k, j| U |n, m> with n < D_s, m < D_e.

    Only the kept output mode (k for ``keep="A"``, j for ``"B"``) is cut at
    D_o; the traced mode keeps its full range so no mass is dropped there.
    Returns flat arrays (m, n, k, j, amp).
    """
    Ds, De, Do = plan.system_cutoff, plan.env_cutoff, plan.output_cutoff
    ms, ns, ks, js, amps = [], [], [], [], []
    if spec.kind is ChannelKind.ATTENUATOR:
        theta = _bs_angle(spec.eta)
        for N in range(Ds + De - 1):
            U = _bs_block(N, theta)
            n = np.arange(max(0, N - De + 1), min(N, Ds - 1) + 1)
            k = np.arange(N + 1)
            k = k[k < Do] if keep == "A" else k[N - k < Do]
            kk, nn = np.meshgrid(k, n, indexing="ij")
            ms.append((N - nn).ravel())
            ns.append(nn.ravel())
            ks.append(kk.ravel())
            js.append((N - kk).ravel())
            amps.append(U[kk, nn].ravel())
    else:
        r = _sq_rate(spec.kappa)
        size = _squeezer_block_size(spec.kappa, Ds, De, Do)
        for delta in range(-(De - 1), Ds):
            da, db = max(delta, 0), max(-delta, 0)
            s_in = np.arange(min(Ds - da, De - db))
            s_out = np.arange(max(0, Do - (da if keep == "A" else db)))
            if s_in.size == 0 or s_out.size == 0:
                continue
            U = _sq_block(delta, r, size)
            so, si = np.meshgrid(s_out, s_in, indexing="ij")
            ms.append((db + si).ravel())
            ns.append((da + si).ravel())
            ks.append((da + so).ravel())
            js.append((db + so).ravel())
            amps.append(U[so, si].ravel())
    return tuple(np.concatenate(x) for x in (ms, ns, ks, js, amps))


@functools.lru_cache(maxsize=64)
def _dilation_kernel(spec: ChannelSpec, plan: DilationPlan, keep: str) -> _Kernel:
    Ds, Do = plan.system_cutoff, plan.output_cutoff
    m, n, k, j, amp = _dilation_entries(spec, plan, keep)
    p = thermal_weights(spec.env, plan.env_cutoff)
    vals = np.sqrt(p[m]) * amp
    if keep == "A":  # Kraus index (m, j), output mode A
        traced, kept = j, k
    else:
        traced, kept = k, j
    span = int(traced.max()) + 1
    rows, cols = m * span + traced, kept * Ds + n
    S = _superop_from_kraus_rows(rows, cols, vals, plan.env_cutoff * span, Ds, Do)
    return _Kernel(Ds, Do, S)


def _quadrature_nodes(radial: int, angular: int):
    """Nodes z and weights for int f(z) exp(-|z|^2) d^2z / pi.

    Radial part: Gauss-Laguerre in u = |z|^2. Angular part: equally spaced
    nodes, exact for trigonometric polynomials of degree below ``angular``.
    """
    u, wu = roots_laguerre(radial)
    phi = 2 * np.pi * np.arange(angular) / angular
    return np.sqrt(u), wu, phi, np.full(angular, 1.0 / angular)


@functools.lru_cache(maxsize=32)
def _additive_kernel(E: float, plan: DilationPlan, with_superop: bool) -> _Kernel:
    Ds, Do = plan.system_cutoff, plan.output_cutoff
    if E == 0.0:
        eye = sp.identity(Ds * Ds, format="csr", dtype=complex)
        if Do != Ds:
            raise DimensionError("identity channel needs output_cutoff == system_cutoff")
        return _Kernel(Ds, Ds, eye)
    r, wr, phi, wphi = _quadrature_nodes(plan.radial_nodes, plan.angular_nodes)
    size = max(Ds, Do) + 40
    kraus = []
    for ri, wi in zip(r, wr):
        D = _displacement_padded(math.sqrt(E) * ri, size)[:Do, :Ds]
        for ph, wp in zip(phi, wphi):
            kraus.append(math.sqrt(wi * wp) * D * _phase_conj(ph, Do, Ds))
    kraus = np.array(kraus)
    S = None
    if with_superop:
        W = kraus.reshape(len(kraus), Do * Ds)
        C = W.T @ W.conj()
        S = C.reshape(Do, Ds, Do, Ds).transpose(0, 2, 1, 3).reshape(Do * Do, Ds * Ds)
    return _Kernel(Ds, Do, S, kraus)


def _kernel(spec: ChannelSpec, plan: DilationPlan, multimode: bool = False) -> _Kernel:
    if spec.kind is ChannelKind.ADDITIVE_NOISE:
        return _additive_kernel(spec.env, plan, multimode)
    keep = "B" if spec.kind is ChannelKind.CONTRAVARIANT else "A"
    return _dilation_kernel(spec, plan, keep)


def _finish(out: np.ndarray, modes: int, cutoff: int, tr_in: float, plan: DilationPlan) -> FockState:
    out = 0.5 * (out + out.conj().T)
    tr_out = float(np.trace(out).real)
    leakage = tr_in - tr_out
    deficit = max(0.0, 1.0 - tr_out)
    if leakage > plan.max_leakage:
        raise TruncationError(
            f"channel leaked {leakage:.3e} of probability (cap {plan.max_leakage:g}); "
            "raise the output cutoff",
            deficit,
        )
    return FockState(modes, cutoff, out, deficit)


def apply_channel(spec: ChannelSpec, state: FockState, plan: DilationPlan | None = None) -> FockState:
    """Output of a one-mode channel; leaked mass is added to the trace deficit."""
    if state.modes != 1:
        raise DimensionError("apply_channel takes one-mode states; use apply_tensor_power")
    plan = plan or default_plan(spec, state.cutoff)
    if plan.system_cutoff != state.cutoff:
        raise DimensionError(f"plan expects cutoff {plan.system_cutoff}, state has {state.cutoff}")
    if spec.is_identity:
        return state
    out = _kernel(spec, plan).apply(np.asarray(state.matrix))
    return _finish(out, 1, plan.output_cutoff, state.trace, plan)


def apply_tensor_power(
    spec: ChannelSpec,
    state: FockState,
    n: int | None = None,
    plan: DilationPlan | None = None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> FockState:
    """Apply the channel independently to each of the ``n`` modes of ``state``."""
    n = state.modes if n is None else n
    if state.modes != n:
        raise DimensionError(f"state has {state.modes} modes, expected {n}")
    plan = plan or default_plan(spec, state.cutoff)
    if plan.system_cutoff != state.cutoff:
        raise DimensionError(f"plan expects cutoff {plan.system_cutoff}, state has {state.cutoff}")
    if spec.is_identity:
        return state
    big = max(plan.system_cutoff, plan.output_cutoff)
    need = 16 * big ** (2 * n) * 3
    if need > memory_budget:
        raise ResourceError(f"{n}-mode application needs ~{need / 2**30:.1f} GiB, budget {memory_budget / 2**30:.1f} GiB")
    if n == 1:
        return apply_channel(spec, state, plan)
    kernel = _kernel(spec, plan, multimode=True)
    t = np.asarray(state.matrix).reshape((state.cutoff,) * (2 * n))
    for mode in range(n):
        t = kernel.apply_mode(t, mode, n)
    d = plan.output_cutoff**n
    return _finish(t.reshape(d, d), n, plan.output_cutoff, state.trace, plan)


def dilation_marginals(spec: ChannelSpec, state: FockState, plan: DilationPlan | None = None):
    """Both output marginals of one squeezer or beam-splitter dilation.

    Returns (mode A state, mode B state). For a squeezer these are the
    amplifier and the contravariant outputs with the same (kappa, E).
    """
    if spec.kind is ChannelKind.ADDITIVE_NOISE:
        raise ValueError("the additive noise channel has no two-mode dilation here")
    if state.modes != 1:
        raise DimensionError("dilation_marginals takes one-mode states")
    plan = plan or default_plan(spec, state.cutoff)
    rho = np.asarray(state.matrix)
    out = []
    for keep in ("A", "B"):
        o = _dilation_kernel(spec, plan, keep).apply(rho)
        out.append(_finish(o, 1, plan.output_cutoff, state.trace, plan))
    return tuple(out)


def is_entanglement_breaking(spec: ChannelSpec) -> bool:
    """Parameter thresholds above which each channel is entanglement breaking."""
    E = spec.env
    if spec.kind is ChannelKind.ATTENUATOR:
        if spec.eta == 1.0:
            return False
        return E >= spec.eta / (1.0 - spec.eta)
    if spec.kind is ChannelKind.AMPLIFIER:
        if spec.kappa == 1.0:
            return False
        return E >= 1.0 / (spec.kappa - 1.0)
    if spec.kind is ChannelKind.CONTRAVARIANT:
        return True
    return E >= 1.0


def resize_cutoff(state: FockState, cutoff: int) -> FockState:
    """Zero-pad or crop every mode to ``cutoff`` levels; cropped mass joins the deficit."""
    n, d = state.modes, state.cutoff
    t = np.asarray(state.matrix).reshape((d,) * (2 * n))
    if cutoff >= d:
        out = np.zeros((cutoff,) * (2 * n), dtype=complex)
        out[(slice(0, d),) * (2 * n)] = t
    else:
        out = t[(slice(0, cutoff),) * (2 * n)]
    dim = cutoff**n
    m = out.reshape(dim, dim)
    return FockState(n, cutoff, m, max(0.0, 1.0 - float(np.trace(m).real)))


def trace_distance(a: FockState, b: FockState) -> float:
    if (a.modes, a.cutoff) != (b.modes, b.cutoff):
        raise DimensionError("trace distance needs matching modes and cutoffs")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))


def additive_noise_via_composition(E: float, state: FockState, plan: DilationPlan | None = None) -> FockState:
    """Quantum-limited attenuator 1/(E+1) followed by quantum-limited amplifier E+1.

    The composition equals the additive noise channel with noise E; it serves
    as an independent check of the quadrature route. ``plan`` (if given) fixes
    the amplifier stage's output cutoff and leakage cap.
    """
    if E <= 0:
        raise ValueError(f"additive noise needs E > 0, got {E}")
    att = ChannelSpec.attenuator(1.0 / (E + 1.0))
    amp = ChannelSpec.amplifier(E + 1.0)
    mid = apply_channel(att, state, default_plan(att, state.cutoff))
    amp_plan = default_plan(amp, state.cutoff)
    if plan is not None:
        amp_plan = replace(amp_plan, output_cutoff=plan.output_cutoff, max_leakage=plan.max_leakage)
    return apply_channel(amp, mid, amp_plan)
