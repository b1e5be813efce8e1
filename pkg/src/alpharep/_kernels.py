"""Inner loops that dominate runtime, each in a jitted and a numpy flavour.

The public names ``beam_splitter_elements`` and ``coeff_block`` dispatch on
:data:`alpharep._accel.JIT_ENABLED`. Both flavours are importable so tests
and the benchmark can compare them directly.
"""

import numpy as np

from ._accel import JIT_ENABLED, njit


def log_factorials(n_max):
    """``log(k!)`` for ``k = 0..n_max`` by cumulative summation."""
    out = np.zeros(n_max + 1)
    if n_max > 0:
        out[1:] = np.cumsum(np.log(np.arange(1, n_max + 1)))
    return out


# -- two-mode passive linear optics -----------------------------------------
#
# Elements <m1, m2| U |n1, n2> of the Fock-space unitary whose action on
# creation operators is U a_i^+ U^+ = sum_j M[j, i] a_j^+. Columns are built
# by repeated application of the transformed creation operators, so every
# entry inside the (d1, d2) box is exact even though the box is truncated.


@njit(cache=True)
def _bs_elements_jit(M, d1, d2):
    out = np.zeros((d1, d2, d1, d2), dtype=np.complex128)
    out[0, 0, 0, 0] = 1.0
    sq = np.sqrt(np.arange(max(d1, d2) + 1).astype(np.float64))
    for n1 in range(d1):
        for n2 in range(d2):
            if n1 == 0 and n2 == 0:
                continue
            if n1 > 0:
                s1, s2 = n1 - 1, n2
                c1, c2 = M[0, 0], M[1, 0]
                norm = sq[n1]
            else:
                s1, s2 = n1, n2 - 1
                c1, c2 = M[0, 1], M[1, 1]
                norm = sq[n2]
            total = n1 + n2
            lo = max(0, total - (d2 - 1))
            hi = min(total, d1 - 1)
            for m1 in range(lo, hi + 1):
                m2 = total - m1
                val = 0.0j
                if m1 > 0:
                    val += c1 * sq[m1] * out[m1 - 1, m2, s1, s2]
                if m2 > 0:
                    val += c2 * sq[m2] * out[m1, m2 - 1, s1, s2]
                out[m1, m2, n1, n2] = val / norm
    return out


def _bs_elements_np(M, d1, d2):
    out = np.zeros((d1, d2, d1, d2), dtype=np.complex128)
    out[0, 0, 0, 0] = 1.0
    sq1 = np.sqrt(np.arange(d1))[:, None]
    sq2 = np.sqrt(np.arange(d2))[None, :]
    for n1 in range(d1):
        for n2 in range(d2):
            if n1 == 0 and n2 == 0:
                continue
            if n1 > 0:
                src = out[:, :, n1 - 1, n2]
                c1, c2, norm = M[0, 0], M[1, 0], np.sqrt(n1)
            else:
                src = out[:, :, n1, n2 - 1]
                c1, c2, norm = M[0, 1], M[1, 1], np.sqrt(n2)
            col = np.zeros((d1, d2), dtype=np.complex128)
            col[1:, :] += c1 * sq1[1:] * src[:-1, :]
            col[:, 1:] += c2 * sq2[:, 1:] * src[:, :-1]
            out[:, :, n1, n2] = col / norm
    return out


# -- displaced-basis expansion coefficients -----------------------------------
#
# c[l, n] with exp(-|alpha|^2/2) c[l, n] = <n, alpha | l>. With p = min(l, n),
# q = max(l, n) both branches reduce to
#   pref * sum_k (-1)^k C(p, k) x^k sqrt(q!) / (sqrt(p!) (q - p + k)!)
# where x = |alpha|^2, pref = (-alpha)^(n-l) for n >= l and conj(alpha)^(l-n)
# otherwise.


@njit(cache=True)
def _coeff_block_jit(n_rows, n_cols, alpha, lf):
    out = np.zeros((n_rows, n_cols), dtype=np.complex128)
    x = alpha.real * alpha.real + alpha.imag * alpha.imag
    for l in range(n_rows):
        for n in range(n_cols):
            if n >= l:
                p, q = l, n
                pref = (-alpha) ** (n - l)
            else:
                p, q = n, l
                pref = np.conj(alpha) ** (l - n)
            acc = 0.0
            xk = 1.0
            for k in range(p + 1):
                lw = lf[p] - lf[k] - lf[p - k] + 0.5 * lf[q] - 0.5 * lf[p] - lf[q - p + k]
                term = np.exp(lw) * xk
                if k % 2 == 1:
                    acc -= term
                else:
                    acc += term
                xk *= x
            out[l, n] = pref * acc
    return out


def _coeff_block_np(n_rows, n_cols, alpha, lf):
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    l = np.arange(n_rows)[:, None]
    n = np.arange(n_cols)[None, :]
    p = np.minimum(l, n)
    q = np.maximum(l, n)
    acc = np.zeros((n_rows, n_cols))
    for k in range(int(p.max(initial=0)) + 1):
        live = k <= p
        pk = np.where(live, p, k)
        lw = lf[pk] - lf[k] - lf[pk - k] + 0.5 * lf[q] - 0.5 * lf[pk] - lf[np.where(live, q - pk + k, 0)]
        term = np.where(live, np.exp(lw) * x**k, 0.0)
        acc += -term if k % 2 else term
    with np.errstate(invalid="ignore"):
        pref = np.where(
            n >= l,
            np.power(-alpha, np.maximum(n - l, 0)),
            np.power(np.conj(alpha), np.maximum(l - n, 0)),
        )
    return pref * acc


def beam_splitter_elements(M, d1, d2):
    M = np.ascontiguousarray(M, dtype=np.complex128)
    if JIT_ENABLED:
        return _bs_elements_jit(M, int(d1), int(d2))
    return _bs_elements_np(M, int(d1), int(d2))


def coeff_block(n_rows, n_cols, alpha):
    lf = log_factorials(max(n_rows, n_cols) + 1)
    if JIT_ENABLED:
        return _coeff_block_jit(int(n_rows), int(n_cols), complex(alpha), lf)
    return _coeff_block_np(int(n_rows), int(n_cols), complex(alpha), lf)
