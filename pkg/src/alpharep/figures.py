"""Tabulated data behind the probability-distribution and detector-ratio figures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import alpha as arep
from .gates import apd_ratio_curve

FIGURE_IDS = (1, 2, 3, 4, 5, 7)
ALPHA_GRID = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
DELTA_GRID = (0.5, 1.0, 2.0)
R_GRID = (0.3, 0.8, 1.5)
N_MAX = 30


@dataclass
class Table:
    header: list
    rows: np.ndarray
    meta: dict = field(default_factory=dict)


def _fmt(x) -> str:
    return f"{x:g}"


def number_state_figure(l: int, alphas=ALPHA_GRID, n_max: int = N_MAX) -> Table:
    """Columns ``P_{l,n}(alpha)`` for n = 0..n_max, one per alpha."""
    n = np.arange(n_max + 1)
    cols = [arep.prob_row(l, a, n_max) for a in alphas]
    return Table(
        ["n", *(f"P_{l},n(alpha={_fmt(a)})" for a in alphas)],
        np.column_stack([n, *cols]),
        {"quantity": "P_ln(alpha) = exp(-|alpha|^2) |c_ln(alpha)|^2", "l": l, "alphas": list(alphas)},
    )


def tmsv_figure(deltas=DELTA_GRID, rs=R_GRID, n_max: int | None = None) -> Table:
    """Columns ``P_n(delta, r)`` over the (delta, r) grid."""
    pairs = [(d, r) for d in deltas for r in rs]
    if n_max is None:
        n_max = max(N_MAX, *(arep.tmsv_nmax(d, r) for d, r in pairs))
    n = np.arange(n_max + 1)
    cols = [arep.tmsv_probabilities(d, r, n_max) for d, r in pairs]
    return Table(
        ["n", *(f"P_n(delta={_fmt(d)},r={_fmt(r)})" for d, r in pairs)],
        np.column_stack([n, *cols]),
        {"quantity": "P_n(delta, r) of the squeezed pair on displaced states", "deltas": list(deltas), "rs": list(rs)},
    )


def superpos_figure(sign: int, alphas=ALPHA_GRID, n_max: int = N_MAX) -> Table:
    n = np.arange(n_max + 1)
    cols = [arep.superpos_probabilities(sign, a, n_max) for a in alphas]
    label = "+" if sign > 0 else "-"
    return Table(
        ["n", *(f"P_n{label}(alpha={_fmt(a)})" for a in alphas)],
        np.column_stack([n, *cols]),
        {"quantity": f"P_n{label}(alpha) of (|0> {label} |1>)/sqrt2", "alphas": list(alphas)},
    )


def ratio_figure(delta: float = 1.0, k_max: int = 7, s_grid=None) -> Table:
    if s_grid is None:
        s_grid = np.round(np.arange(1, 51) * 0.02, 10)
    rows = apd_ratio_curve(delta, s_grid, k_max)
    return Table(
        ["s", *(f"P1/P{k}" for k in range(2, k_max + 1))],
        rows,
        {"quantity": "P_1(delta, s) / P_k(delta, s)", "delta": delta, "k_max": k_max},
    )


def figure_table(fig_id: int, alpha=None, delta=None, r=None, k_max: int = 7, n_max: int = N_MAX) -> Table:
    """Data for one figure; scalar ``alpha`` / ``delta`` / ``r`` narrow the default grids."""
    alphas = ALPHA_GRID if alpha is None else (alpha,)
    if fig_id == 1:
        return number_state_figure(1, alphas, n_max)
    if fig_id == 2:
        return number_state_figure(3, alphas, n_max)
    if fig_id == 3:
        deltas = DELTA_GRID if delta is None else (delta,)
        rs = R_GRID if r is None else (r,)
        return tmsv_figure(deltas, rs)
    if fig_id == 4:
        return superpos_figure(1, alphas, n_max)
    if fig_id == 5:
        return superpos_figure(-1, alphas, n_max)
    if fig_id == 7:
        return ratio_figure(1.0 if delta is None else delta, k_max)
    raise ValueError(f"figure id must be one of {FIGURE_IDS}, got {fig_id}")
