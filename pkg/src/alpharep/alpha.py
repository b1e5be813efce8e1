"""Analytic expansions over displaced number states.

For a fixed displacement ``alpha`` the set ``{|n, alpha>}`` is an orthonormal
basis; this module gives closed forms for the expansion coefficients of
number states, of the two-mode squeezed vacuum and of the vacuum/single
photon superpositions in that basis. Nothing here builds a Fock-space
operator; the tests compare every formula with :mod:`alpharep.fock`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from . import fock
from ._kernels import coeff_block, log_factorials
from .errors import InvalidLevelError, InvalidSqueezingError, TruncationRiskError


def coeff_c(l: int, n: int, alpha) -> complex:
    """Coefficient c_ln(alpha) of |n, alpha> in the expansion of the number state |l>.

    The full amplitude is ``exp(-|alpha|^2/2) * c_ln(alpha) = <n, alpha|l>``.
    """
    if l < 0 or n < 0:
        raise InvalidLevelError("levels must be non-negative")
    return complex(coeff_block(l + 1, n + 1, alpha)[l, n])


def coeff_matrix(n_rows: int, n_cols: int, alpha) -> np.ndarray:
    """All ``c_ln(alpha)`` for ``l < n_rows``, ``n < n_cols``."""
    return coeff_block(n_rows, n_cols, alpha)


def prob_P(l: int, n: int, alpha) -> float:
    """Probability of |n, alpha> in |l>: ``exp(-|alpha|^2) |c_ln(alpha)|^2``."""
    return math.exp(-abs(alpha) ** 2) * abs(coeff_c(l, n, alpha)) ** 2


def prob_row(l: int, alpha, n_max: int) -> np.ndarray:
    """``prob_P(l, n, alpha)`` for ``n = 0..n_max``."""
    c = coeff_block(l + 1, n_max + 1, alpha)[l]
    return math.exp(-abs(alpha) ** 2) * np.abs(c) ** 2


def displaced_cutoff(l: int, alpha) -> int:
    """Levels needed to hold |l> in the alpha-basis (or |l, alpha> in the Fock basis)."""
    return fock.cutoff_for(math.sqrt(l) + abs(alpha))


def displaced_overlap(l: int, alpha_p, n: int, alpha) -> complex:
    """Coefficient of |n, alpha> in |l, alpha'>, i.e. ``<n, alpha | l, alpha'>``.

    Finite double sum obtained by normal-ordering ``D(alpha')`` around
    ``D(alpha)``; with ``beta = alpha' - alpha`` the prefactor is
    ``exp(-|alpha'|^2/2 - |alpha|^2/2 + alpha' alpha^*)``.
    """
    alpha_p, alpha = complex(alpha_p), complex(alpha)
    beta = alpha_p - alpha
    lf = log_factorials(l + n + 1)
    acc = 0.0j
    for j in range(max(0, l - n), l + 1):
        m = n - l + j  # power of beta
        w = math.exp(0.5 * (lf[l] + lf[n]) - lf[j] - lf[l - j] - lf[m])
        acc += w * (-beta.conjugate()) ** j * beta**m
    pref = np.exp(-0.5 * abs(alpha_p) ** 2 - 0.5 * abs(alpha) ** 2 + alpha_p * alpha.conjugate())
    return complex(pref * acc)


@dataclass(frozen=True)
class AlphaMatrix:
    """Truncated transformation between number states and displaced number states.

    Row ``l`` of ``prefactor * coeffs`` is |l> written in the basis
    ``|n, alpha>``; its conjugate transpose maps back.
    """

    alpha: complex
    cutoff: int
    coeffs: np.ndarray
    prefactor: float

    @property
    def U(self) -> np.ndarray:
        return self.prefactor * self.coeffs

    @property
    def U_inv(self) -> np.ndarray:
        return self.U.conj().T

    def guarded_size(self) -> int:
        """Rows whose displaced-basis support fits the cutoff under the cutoff policy."""
        k = 0
        while k < self.cutoff and displaced_cutoff(k, self.alpha) <= self.cutoff:
            k += 1
        return k

    def unitarity_residual(self) -> float:
        k = self.guarded_size()
        if k == 0:
            return 0.0
        rows = self.U[:k]
        return float(np.max(np.abs(rows @ rows.conj().T - np.eye(k))))

    def oracle_residual(self) -> float:
        k = self.guarded_size()
        worst = 0.0
        for l in range(k):
            for n in range(k):
                ref = np.conj(fock.matrix_element_oracle(l, n, self.alpha))
                worst = max(worst, abs(self.U[l, n] - ref))
        return worst


def alpha_matrix(alpha, cutoff: int) -> AlphaMatrix:
    alpha = complex(alpha)
    if cutoff < fock.cutoff_for(alpha):
        raise TruncationRiskError(f"cutoff {cutoff} below policy {fock.cutoff_for(alpha)} for alpha={alpha}")
    return AlphaMatrix(alpha, cutoff, coeff_block(cutoff, cutoff, alpha), math.exp(-0.5 * abs(alpha) ** 2))


# ---------------------------------------------------------------------------
# two-mode squeezed vacuum
# ---------------------------------------------------------------------------


def tmsv_delta(alpha, r: float) -> complex:
    """``alpha^* (1 - tanh^2 r) / tanh r``."""
    if r <= 0:
        raise InvalidSqueezingError(f"squeezing must be > 0, got {r}")
    lam = math.tanh(r)
    return complex(alpha).conjugate() * (1.0 - lam * lam) / lam


def alpha_from_delta(delta, r: float) -> complex:
    lam = math.tanh(r)
    return complex(delta).conjugate() * lam / (1.0 - lam * lam)


def tmsv_norms(delta, n_max: int) -> np.ndarray:
    """N_n for n = 0..n_max: ``sqrt(sum_l |delta|^(2l) n! / ((n-l)! (l!)^2))``."""
    d2 = abs(delta) ** 2
    lf = log_factorials(n_max)
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        l = np.arange(n + 1)
        with np.errstate(divide="ignore"):
            logt = l * math.log(d2) if d2 > 0 else np.where(l == 0, 0.0, -np.inf)
        out[n] = math.sqrt(np.sum(np.exp(logt + lf[n] - lf[n - l] - 2 * lf[l])))
    return out


def tmsv_probabilities(delta, r: float, n_max: int) -> np.ndarray:
    """P_n(delta, r) for n = 0..n_max; depends on delta only through |delta|."""
    lam = math.tanh(r)
    N = tmsv_norms(delta, n_max)
    n = np.arange(n_max + 1)
    return lam ** (2 * n) * N**2 * math.exp(-math.sinh(r) ** 2 * abs(delta) ** 2) / math.cosh(r) ** 2


def tmsv_nmax(delta, r: float, tol: float = 1e-12) -> int:
    """Smallest n_max with the TMSV tail below ``tol``."""
    n_max = 8
    while True:
        p = tmsv_probabilities(delta, r, n_max)
        if 1.0 - p.sum() < tol or n_max > 4000:
            return n_max
        n_max *= 2


@dataclass(frozen=True)
class TmsvAlphaRepr:
    alpha: complex
    r: float
    delta: complex
    n_max: int
    norms: np.ndarray
    amps: np.ndarray
    probs: np.ndarray

    @property
    def beta(self) -> complex:
        """Displacement of the unmeasured mode, ``alpha^* tanh r``."""
        return self.alpha.conjugate() * math.tanh(self.r)


def tmsv_alpha_repr(alpha, r: float, n_max: int | None = None) -> TmsvAlphaRepr:
    """Amplitudes of S12(r)|00> on the correlated pairs D(beta)|Psi_n> x |n, alpha>."""
    alpha = complex(alpha)
    delta = tmsv_delta(alpha, r)
    if n_max is None:
        n_max = tmsv_nmax(delta, r)
    lam = math.tanh(r)
    norms = tmsv_norms(delta, n_max)
    n = np.arange(n_max + 1)
    amps = math.exp(-0.5 * math.sinh(r) ** 2 * abs(delta) ** 2) / math.cosh(r) * lam**n * norms
    return TmsvAlphaRepr(alpha, float(r), delta, int(n_max), norms, amps, amps**2)


def psi_n_closed(n: int, delta, dim: int) -> fock.MultiModeState:
    """Normalized (a^+ - delta^*)^n |0> on ``dim`` levels."""
    if not 0 <= n < dim:
        raise InvalidLevelError(f"level {n} outside 0..{dim - 1}")
    delta = complex(delta)
    lf = log_factorials(n)
    amps = np.zeros(dim, dtype=np.complex128)
    for l in range(n + 1):
        w = math.exp(0.5 * (lf[n] - lf[n - l]) - lf[l])
        amps[n - l] = (-delta.conjugate()) ** l * w
    return fock.MultiModeState((dim,), amps).normalize()


def psi_n_series(n: int, alpha, r: float, l_max: int) -> fock.MultiModeState:
    """Unnormalized partner of |n, alpha> in the TMSV: sum_l c_ln(alpha) tanh(r)^l |l>, l < l_max."""
    lam = math.tanh(r)
    c = coeff_block(l_max + 1, n + 1, alpha)[:, n]
    bound = lam**l_max * math.exp(0.5 * abs(alpha) ** 2)
    if bound >= 1e-12:
        raise TruncationRiskError(f"series tail bound {bound:.2e} >= 1e-12; raise l_max")
    return fock.MultiModeState((l_max,), c[:l_max] * lam ** np.arange(l_max))


def series_l_max(alpha, r: float) -> int:
    """Smallest l_max accepted by :func:`psi_n_series`."""
    lam = math.tanh(r)
    need = (math.log(1e-12) - 0.5 * abs(alpha) ** 2) / math.log(lam)
    return int(math.floor(need)) + 1


def psi_n_check(n: int, alpha, r: float, l_max: int | None = None, margin: int = 16) -> float:
    """Fidelity between the normalized series and D(alpha^* tanh r) |Psi_n>.

    Both vectors are embedded in ``l_max + margin`` levels so the truncated
    displacement is exact on the support of the series.
    """
    alpha = complex(alpha)
    if l_max is None:
        l_max = max(series_l_max(alpha, r), n + 1 + fock.GUARD, 2 * fock.cutoff_for(alpha.conjugate() * math.tanh(r)))
    dim = l_max + margin
    series = psi_n_series(n, alpha, r, l_max).normalize()
    series = fock.MultiModeState((dim,), np.pad(series.vector, (0, margin)))
    beta = alpha.conjugate() * math.tanh(r)
    closed = psi_n_closed(n, tmsv_delta(alpha, r), dim)
    shifted = closed.apply(fock.displacement_operator(beta, dim), 0)
    return fock.fidelity(series, shifted)


def tmsv_pair_amplitudes(n_max: int, alpha, r: float, dim: int | None = None) -> np.ndarray:
    """Brute-force ``<Psi_n, beta|_1 <n, alpha|_2 S12(r)|00>`` for n = 0..n_max.

    The squeezed vacuum is propagated from |00> with the sparse action of the
    truncated two-mode generator's exponential, so this is independent of
    the closed forms above.
    """
    alpha = complex(alpha)
    delta = tmsv_delta(alpha, r)
    lam = math.tanh(r)
    beta = alpha.conjugate() * lam
    if dim is None:
        need_sq = int(math.ceil(math.log(1e-8) / math.log(lam))) + 1
        dim = max(displaced_cutoff(n_max, alpha), displaced_cutoff(n_max, beta), need_sq)
    a = sparse.diags(np.sqrt(np.arange(1, dim)), 1, format="csr", dtype=np.complex128)
    ad = a.conj().T
    gen = r * (sparse.kron(ad, ad) - sparse.kron(a, a))
    vac = np.zeros(dim * dim, dtype=np.complex128)
    vac[0] = 1.0
    tmsv = expm_multiply(gen.tocsr(), vac)
    D1 = fock.displacement_operator(beta, dim)
    D2 = fock.displacement_operator(alpha, dim)
    out = np.empty(n_max + 1, dtype=np.complex128)
    for n in range(n_max + 1):
        mode1 = D1.matrix @ psi_n_closed(n, delta, dim).vector
        mode2 = D2.matrix[:, n]
        out[n] = np.vdot(np.kron(mode1, mode2), tmsv)
    return out


# ---------------------------------------------------------------------------
# vacuum / single-photon superpositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuperposAlphaRepr:
    sign: int
    alpha: complex
    n_max: int
    amps: np.ndarray
    probs: np.ndarray


def superpos_amplitudes(sign: int, alpha, n_max: int) -> np.ndarray:
    """Amplitudes of (|0> + sign |1>)/sqrt(2) on |n, alpha>, n = 0..n_max."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    lf = log_factorials(n_max)
    out = np.empty(n_max + 1, dtype=np.complex128)
    out[0] = math.exp(-0.5 * x) * (1 + sign * alpha.conjugate()) / math.sqrt(2)
    for n in range(1, n_max + 1):
        mag = math.exp(-0.5 * x - 0.5 * lf[n]) / math.sqrt(2)
        out[n] = mag * (-1) ** n * alpha ** (n - 1) * (alpha - sign * (n - x))
    return out


def superpos_probabilities(sign: int, alpha, n_max: int) -> np.ndarray:
    """Closed-form P_{n, sign}(alpha) = exp(-x) x^(n-1) |alpha -/+ (n - x)|^2 / (2 n!)."""
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    lf = log_factorials(n_max)
    n = np.arange(n_max + 1)
    out = np.empty(n_max + 1)
    out[0] = math.exp(-x) * abs(1 + sign * alpha.conjugate()) ** 2 / 2
    if x == 0:
        out[1:] = 0.0
        out[1] = 0.5
        return out
    k = n[1:]
    out[1:] = np.exp(-x + (k - 1) * math.log(x) - lf[k]) * np.abs(alpha - sign * (k - x)) ** 2 / 2
    return out


def superpos_alpha_repr(sign: int, alpha, n_max: int | None = None) -> SuperposAlphaRepr:
    alpha = complex(alpha)
    if n_max is None:
        n_max = displaced_cutoff(1, alpha)
    amps = superpos_amplitudes(sign, alpha, n_max)
    return SuperposAlphaRepr(sign, alpha, int(n_max), amps, np.abs(amps) ** 2)


def count_peaks(values) -> int:
    """Strict interior-or-edge local maxima of a 1-D sequence."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return int(v.size)
    left = np.concatenate(([-np.inf], v[:-1]))
    right = np.concatenate((v[1:], [-np.inf]))
    return int(np.sum((v > left) & (v > right)))


__all__ = [
    "AlphaMatrix",
    "SuperposAlphaRepr",
    "TmsvAlphaRepr",
    "alpha_from_delta",
    "alpha_matrix",
    "coeff_c",
    "coeff_matrix",
    "count_peaks",
    "displaced_cutoff",
    "displaced_overlap",
    "prob_P",
    "prob_row",
    "psi_n_check",
    "psi_n_closed",
    "psi_n_series",
    "superpos_alpha_repr",
    "tmsv_pair_amplitudes",
    "superpos_amplitudes",
    "superpos_probabilities",
    "tmsv_alpha_repr",
    "tmsv_delta",
    "tmsv_norms",
    "tmsv_probabilities",
]
