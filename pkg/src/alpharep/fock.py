"""Truncated Fock-space states and operators.

Everything here is deliberately brute force: states are dense amplitude
tensors and operators are dense matrices (matrix exponentials of truncated
generators, or exact recursions for passive optics). The analytic formulas
in :mod:`alpharep.alpha` and the gate runs in :mod:`alpharep.gates` are
checked against these objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from ._kernels import beam_splitter_elements
from .errors import (
    InvalidDimensionError,
    InvalidLevelError,
    InvalidSplitterError,
    InvalidSqueezingError,
    TruncationRiskError,
    ZeroProbabilityBranch,
)

GUARD = 4
UNITARITY_TOL = 1e-8
ZERO_BRANCH = 1e-15
COHERENT_TAIL = 1e-10


def cutoff_for(alpha) -> int:
    """Smallest Fock cutoff the library accepts for coherent content of amplitude ``alpha``.

    ``ceil(|alpha|^2 + 6|alpha| + 10)``; the Poisson tail beyond it is below 1e-10.
    """
    a = abs(alpha)
    return int(math.ceil(a * a + 6.0 * a + 10.0))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiModeState:
    """Pure state of K bosonic modes on a truncated Fock lattice.

    ``amplitudes`` has shape ``cutoffs``; mode ``m`` holds levels
    ``0..cutoffs[m]-1``. Instances are immutable: every operation returns a
    new state and the amplitude array is read-only.
    """

    cutoffs: tuple
    amplitudes: np.ndarray
    norm_tolerance: float = 1e-10

    def __post_init__(self):
        cutoffs = tuple(int(c) for c in np.atleast_1d(self.cutoffs))
        if not cutoffs or min(cutoffs) < 1:
            raise InvalidDimensionError(f"every cutoff must be >= 1, got {cutoffs}")
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.size != math.prod(cutoffs):
            raise InvalidDimensionError(
                f"{amps.size} amplitudes do not fit cutoffs {cutoffs}"
            )
        amps = amps.reshape(cutoffs)
        amps.setflags(write=False)
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def is_normalized(self) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= self.norm_tolerance

    def normalize(self) -> MultiModeState:
        nrm = self.norm()
        if nrm == 0.0:
            raise ZeroProbabilityBranch(0.0, "cannot normalize the zero vector")
        return self._with(self.amplitudes / nrm)

    def scaled(self, factor) -> MultiModeState:
        return self._with(self.amplitudes * factor)

    def inner(self, other: MultiModeState) -> complex:
        """``<self|other>``."""
        _check_same_cutoffs(self, other)
        return complex(np.vdot(self.vector, other.vector))

    def tensor(self, other: MultiModeState) -> MultiModeState:
        amps = np.multiply.outer(self.amplitudes, other.amplitudes)
        return MultiModeState(self.cutoffs + other.cutoffs, amps, self.norm_tolerance)

    def __add__(self, other: MultiModeState) -> MultiModeState:
        _check_same_cutoffs(self, other)
        return self._with(self.amplitudes + other.amplitudes)

    def marginal(self, mode: int) -> np.ndarray:
        """Photon-number distribution of one mode (unnormalized if the state is)."""
        probs = np.abs(self.amplitudes) ** 2
        axes = tuple(i for i in range(self.n_modes) if i != mode)
        return probs.sum(axis=axes)

    def mean_photon_number(self, mode: int = 0) -> float:
        p = self.marginal(mode)
        return float(np.dot(np.arange(p.size), p) / p.sum())

    def total_photon_number(self) -> float:
        probs = np.abs(self.amplitudes) ** 2
        grids = np.meshgrid(*[np.arange(c) for c in self.cutoffs], indexing="ij")
        return float(np.sum(sum(grids) * probs) / probs.sum())

    def apply(self, op: ModeOperator, modes) -> MultiModeState:
        """Apply a one- or two-mode operator to the given mode(s)."""
        modes = (modes,) if np.isscalar(modes) else tuple(modes)
        if len(modes) != op.arity:
            raise InvalidDimensionError(f"operator of arity {op.arity} applied to modes {modes}")
        dims = tuple(self.cutoffs[m] for m in modes)
        if dims != op.dims:
            raise InvalidDimensionError(f"operator dims {op.dims} do not match mode cutoffs {dims}")
        k = op.arity
        mat = op.matrix.reshape(op.dims + op.dims)
        out = np.tensordot(mat, self.amplitudes, axes=(list(range(k, 2 * k)), list(modes)))
        out = np.moveaxis(out, list(range(k)), list(modes))
        return self._with(out)

    def _with(self, amps) -> MultiModeState:
        return MultiModeState(self.cutoffs, amps, self.norm_tolerance)


def _check_same_cutoffs(s1, s2):
    if s1.cutoffs != s2.cutoffs:
        raise InvalidDimensionError(f"cutoff mismatch: {s1.cutoffs} vs {s2.cutoffs}")


@dataclass(frozen=True)
class ConditionalOutcome:
    """Result of a measurement branch: its probability and the post-measurement state.

    ``state`` is ``None`` only for a zero-probability branch that the caller
    chose not to raise on.
    """

    probability: float
    state: MultiModeState | None

    @property
    def heralded(self) -> bool:
        return self.state is not None


def fock_state(n: int, dim: int) -> MultiModeState:
    if not 0 <= n < dim:
        raise InvalidLevelError(f"level {n} outside 0..{dim - 1}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[n] = 1.0
    return MultiModeState((dim,), amps)


def vacuum(*cutoffs: int) -> MultiModeState:
    amps = np.zeros(cutoffs, dtype=np.complex128)
    amps[(0,) * len(cutoffs)] = 1.0
    return MultiModeState(cutoffs, amps)


def coherent_amplitudes(alpha, dim: int) -> np.ndarray:
    """Fock amplitudes ``exp(-|a|^2/2) a^n / sqrt(n!)`` for ``n < dim`` (no tail check)."""
    alpha = complex(alpha)
    n = np.arange(dim)
    log_mag = -0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1)
    if alpha == 0:
        out = np.zeros(dim, dtype=np.complex128)
        out[0] = 1.0
        return out
    return np.exp(log_mag + n * np.log(abs(alpha))) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha, dim: int) -> MultiModeState:
    """Coherent state |0, alpha> built from its Poisson amplitudes."""
    amps = coherent_amplitudes(alpha, dim)
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail > COHERENT_TAIL:
        raise TruncationRiskError(
            f"cutoff {dim} drops {tail:.2e} of |{complex(alpha):.4g}>; need >= {cutoff_for(alpha)}"
        )
    return MultiModeState((dim,), amps)


def product_state(*states: MultiModeState) -> MultiModeState:
    out = states[0]
    for s in states[1:]:
        out = out.tensor(s)
    return out


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeOperator:
    """Dense operator on one mode, or on a pair of modes (row-major pair index).

    When ``unitary`` is set, construction verifies ``max|M M^+ - I| < 1e-8``
    on the guarded block: single-mode levels ``n < d - guard``; for two modes
    the pairs with ``n1 + n2 < min(d1, d2) - guard``.
    """

    matrix: np.ndarray
    dims: tuple
    guard: int = GUARD
    unitary: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in np.atleast_1d(self.dims))
        if len(dims) not in (1, 2):
            raise InvalidDimensionError(f"arity must be 1 or 2, got dims {dims}")
        mat = np.array(self.matrix, dtype=np.complex128)
        size = math.prod(dims)
        if mat.shape != (size, size):
            raise InvalidDimensionError(f"matrix shape {mat.shape} does not match dims {dims}")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)
        if self.unitary:
            res = self.unitarity_residual()
            if res >= UNITARITY_TOL:
                raise TruncationRiskError(
                    f"{self.label or 'operator'} unitarity residual {res:.2e} on guarded block"
                )

    @property
    def arity(self) -> int:
        return len(self.dims)

    def guarded_indices(self) -> np.ndarray:
        if self.arity == 1:
            return np.arange(max(self.dims[0] - self.guard, 0))
        d1, d2 = self.dims
        n1, n2 = np.meshgrid(np.arange(d1), np.arange(d2), indexing="ij")
        keep = (n1 + n2) < min(d1, d2) - self.guard
        return (n1 * d2 + n2)[keep]

    def unitarity_residual(self) -> float:
        idx = self.guarded_indices()
        if idx.size == 0:
            return 0.0
        rows = self.matrix[idx]
        gram = rows @ rows.conj().T
        return float(np.max(np.abs(gram - np.eye(idx.size))))

    def dagger(self) -> ModeOperator:
        return ModeOperator(self.matrix.conj().T, self.dims, self.guard, False, self.label + "^+")

    def __matmul__(self, other: ModeOperator) -> ModeOperator:
        if self.dims != other.dims:
            raise InvalidDimensionError("cannot compose operators on different dims")
        return ModeOperator(self.matrix @ other.matrix, self.dims, self.guard, False)


def _annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(np.complex128)


def ladder_ops(dim: int) -> tuple[ModeOperator, ModeOperator]:
    """Truncated annihilation and creation operators ``(a, a^+)``."""
    if dim < 2:
        raise InvalidDimensionError(f"ladder operators need dim >= 2, got {dim}")
    a = _annihilation(dim)
    return ModeOperator(a, (dim,), label="a"), ModeOperator(a.conj().T, (dim,), label="a^+")


def displacement_operator(alpha, dim: int) -> ModeOperator:
    """D(alpha) = exp(alpha a^+ - alpha^* a), dense matrix exponential of the truncated generator."""
    alpha = complex(alpha)
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    if abs(alpha) ** 2 > dim / 4:
        raise TruncationRiskError(f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds dim/4 for dim={dim}")
    a = _annihilation(dim)
    full = expm(alpha * a.conj().T - np.conj(alpha) * a)
    return ModeOperator(full, (dim,), unitary=True, label=f"D({alpha:.4g})")


def matrix_element_oracle(m: int, n: int, alpha) -> complex:
    """<m|D(alpha)|n> from the associated-Laguerre closed form."""
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    if m >= n:
        mag = math.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)) - 0.5 * x)
        return complex(mag * alpha ** (m - n) * eval_genlaguerre(n, m - n, x))
    mag = math.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)) - 0.5 * x)
    return complex(mag * (-alpha.conjugate()) ** (n - m) * eval_genlaguerre(m, n - m, x))


def displaced_number_state(n: int, alpha, dim: int) -> MultiModeState:
    """|n, alpha> = D(alpha)|n> on a ``dim``-level mode."""
    if not 0 <= n < dim:
        raise InvalidLevelError(f"level {n} outside 0..{dim - 1}")
    D = displacement_operator(alpha, dim)
    return MultiModeState((dim,), D.matrix[:, n])


def two_mode_squeezer(r: float, dims: Sequence[int]) -> ModeOperator:
    """S12(r) = exp(r (a1^+ a2^+ - a1 a2))."""
    d1, d2 = (int(d) for d in dims)
    if r < 0:
        raise InvalidSqueezingError(f"squeezing must be >= 0, got {r}")
    if math.tanh(r) ** min(d1, d2) > 1e-6:
        raise TruncationRiskError(f"tanh({r})^{min(d1, d2)} > 1e-6; raise the cutoffs")
    a1, a2 = _annihilation(d1), _annihilation(d2)
    gen = r * (np.kron(a1.conj().T, a2.conj().T) - np.kron(a1, a2))
    return ModeOperator(expm(gen), (d1, d2), unitary=True, label=f"S12({r:.4g})")


def single_mode_squeezer(r: float, dim: int) -> ModeOperator:
    """S(r) = exp(r (a^+^2 - a^2) / 2)."""
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    if math.tanh(abs(r)) ** (dim // 2) > 1e-6:
        raise TruncationRiskError(f"tanh(|{r}|)^{dim // 2} > 1e-6; raise the cutoff")
    a = _annihilation(dim)
    ad = a.conj().T
    return ModeOperator(expm(0.5 * r * (ad @ ad - a @ a)), (dim,), unitary=True, label=f"S({r:.4g})")


SPLITTER_CONVENTIONS = ("B13", "B24", "B12", "B12prime")


def splitter_matrix(t: float, r: float, phi: float = 0.0, convention: str = "B13") -> np.ndarray:
    """2x2 matrix acting on the coherent-amplitude column of the two input modes.

    ``B13``: [[t, -r e^{-i phi}], [r e^{i phi}, t]]; ``B24``: the same with
    ``phi -> -phi``; ``B12``: [[t, -r], [r, t]]; ``B12prime``: [[t, r], [-r, t]].
    ``phi`` is ignored by the two real conventions.
    """
    if abs(t * t + r * r - 1.0) > 1e-12:
        raise InvalidSplitterError(f"t^2 + r^2 = {t * t + r * r!r} != 1")
    e = np.exp(1j * phi)
    if convention == "B13":
        return np.array([[t, -r / e], [r * e, t]], dtype=np.complex128)
    if convention == "B24":
        return np.array([[t, -r * e], [r / e, t]], dtype=np.complex128)
    if convention == "B12":
        return np.array([[t, -r], [r, t]], dtype=np.complex128)
    if convention == "B12prime":
        return np.array([[t, r], [-r, t]], dtype=np.complex128)
    raise InvalidSplitterError(f"unknown convention {convention!r}; use one of {SPLITTER_CONVENTIONS}")


def linear_optics_operator(M, dims: Sequence[int], guard: int = GUARD) -> ModeOperator:
    """Fock-space unitary of the passive two-mode network with amplitude matrix ``M``.

    A coherent input ``|b1, b2>`` leaves as ``|M @ (b1, b2)>``.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.shape != (2, 2) or not np.allclose(M @ M.conj().T, np.eye(2), atol=1e-12):
        raise InvalidSplitterError("mode-mixing matrix must be a 2x2 unitary")
    d1, d2 = (int(d) for d in dims)
    el = beam_splitter_elements(M, d1, d2)
    return ModeOperator(el.reshape(d1 * d2, d1 * d2), (d1, d2), guard=guard, unitary=True, label="BS")


def beam_splitter(t: float, r: float, phi: float, dims: Sequence[int], convention: str = "B13") -> ModeOperator:
    return linear_optics_operator(splitter_matrix(t, r, phi, convention), dims)


def phase_shifter(theta: float, dim: int) -> ModeOperator:
    """exp(i theta a^+ a); theta = pi maps |0, beta> to |0, -beta>."""
    return ModeOperator(np.diag(np.exp(1j * theta * np.arange(dim))), (dim,), unitary=True, label="P")


# ---------------------------------------------------------------------------
# measurements and figures of merit
# ---------------------------------------------------------------------------


def _remove_mode(state: MultiModeState, mode: int, amps: np.ndarray) -> MultiModeState:
    cutoffs = state.cutoffs[:mode] + state.cutoffs[mode + 1:]
    if not cutoffs:
        cutoffs = (1,)
        amps = np.reshape(amps, (1,))
    return MultiModeState(cutoffs, amps, state.norm_tolerance)


def project_fock(state: MultiModeState, mode: int, n: int, raise_on_zero: bool = True) -> ConditionalOutcome:
    """Project ``mode`` onto |n>; the measured mode is removed from the result."""
    if not 0 <= n < state.cutoffs[mode]:
        raise InvalidLevelError(f"level {n} outside mode {mode} cutoff {state.cutoffs[mode]}")
    sl = np.take(state.amplitudes, n, axis=mode)
    prob = float(np.sum(np.abs(sl) ** 2))
    if prob < ZERO_BRANCH:
        if raise_on_zero:
            raise ZeroProbabilityBranch(prob)
        return ConditionalOutcome(prob, None)
    return ConditionalOutcome(prob, _remove_mode(state, mode, sl / math.sqrt(prob)))


def apd_click(state: MultiModeState, mode: int, raise_on_zero: bool = True) -> ConditionalOutcome:
    """On/off detector click, POVM element ``I - |0><0|``; the mode is kept."""
    amps = np.array(state.amplitudes)
    idx = [slice(None)] * state.n_modes
    idx[mode] = 0
    amps[tuple(idx)] = 0.0
    prob = float(np.sum(np.abs(amps) ** 2))
    if prob < ZERO_BRANCH:
        if raise_on_zero:
            raise ZeroProbabilityBranch(prob)
        return ConditionalOutcome(prob, None)
    return ConditionalOutcome(prob, state._with(amps / math.sqrt(prob)))


def fidelity(s1: MultiModeState, s2: MultiModeState) -> float:
    """Pure-state fidelity ``|<s1|s2>|^2``."""
    return abs(s1.inner(s2)) ** 2
