"""Heralded gates built from a coherent control, a squeezed pair and weak splitters.

The interferometer has four modes:

* mode 0 carries the control qubit ``a|beta0> + b|-beta0>``,
* mode 1 starts in vacuum (second arm of the Mach-Zehnder),
* modes 2 and 3 hold the two-mode squeezed vacuum; mode 3 is heralded.

Every run propagates the full truncated state through the splitter chain and
compares the heralded output with the ideal state built from closed forms.
Output states keep modes 0, 1 and 2 (control, dark arm, target); the dark
arm is compared against vacuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import alpha as arep
from . import fock
from .errors import InvalidConfigError, TruncationRiskError, ZeroProbabilityBranch

TARGET_DIM = 8
ORTHOGONALITY_TOL = 1e-4
LOW_WEIGHT = 1e-2


@dataclass(frozen=True)
class GateConfig:
    """Interferometer parameters.

    ``s`` is the pair squeezing, ``bs_r`` the reflectivity of the two weak
    splitters that displace the pair modes, ``phi`` their phase and
    ``alpha`` the displacement scale that fixes the target qubit. ``alpha``
    defaults to ``sinh s cosh s`` (so that delta = 1).
    """

    s: float = 0.1
    bs_r: float = 0.05
    phi: float = math.pi / 2
    alpha: complex | None = None
    cutoffs: tuple | None = None

    def __post_init__(self):
        if not self.s > 0:
            raise InvalidConfigError(f"squeezing s must be > 0, got {self.s}")
        if not 0 < self.bs_r <= 0.3:
            raise InvalidConfigError(f"bs_r must lie in (0, 0.3], got {self.bs_r}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", math.sinh(self.s) * math.cosh(self.s))
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.alpha == 0:
            raise InvalidConfigError("alpha must be nonzero")
        overlap = math.exp(-4 * abs(self.gamma) ** 2)
        if overlap >= ORTHOGONALITY_TOL:
            raise InvalidConfigError(
                f"control basis overlap exp(-4|gamma|^2) = {overlap:.2e} >= {ORTHOGONALITY_TOL}"
            )
        if self.cutoffs is None:
            c = fock.cutoff_for(self.beta0)
            d = max(TARGET_DIM, int(math.ceil(math.log(1e-7) / math.log(self.lam))) + 1)
            object.__setattr__(self, "cutoffs", (c, c, d, d))
        else:
            cutoffs = tuple(int(c) for c in self.cutoffs)
            if len(cutoffs) != 4:
                raise InvalidConfigError(f"need four cutoffs, got {cutoffs}")
            # both arms carry the full control amplitude at some point of the chain
            need = fock.cutoff_for(self.beta0)
            if min(cutoffs[:2]) < need:
                raise TruncationRiskError(f"modes 0 and 1 need cutoff >= {need} for |beta0| = {abs(self.beta0):.4g}")
            object.__setattr__(self, "cutoffs", cutoffs)

    @property
    def t(self) -> float:
        return math.sqrt(1.0 - self.bs_r**2)

    @property
    def lam(self) -> float:
        return math.tanh(self.s)

    @property
    def t1(self) -> float:
        """Transmission of the first balanced-arm splitter, ``tanh s / sqrt(1 + tanh^2 s)``."""
        return self.lam / math.sqrt(1 + self.lam**2)

    @property
    def r1(self) -> float:
        return 1.0 / math.sqrt(1 + self.lam**2)

    @property
    def delta(self) -> complex:
        return arep.tmsv_delta(self.alpha, self.s)

    @property
    def beta0(self) -> complex:
        """Input control amplitude ``alpha e^{i phi} sqrt(1 + tanh^2 s) / r``."""
        return self.alpha * np.exp(1j * self.phi) * math.sqrt(1 + self.lam**2) / self.bs_r

    @property
    def gamma(self) -> complex:
        """Logical amplitude ``alpha t sqrt(1 + tanh^2 s) / r``."""
        return self.alpha * self.t * math.sqrt(1 + self.lam**2) / self.bs_r

    @property
    def control_out(self) -> complex:
        """Amplitude of the '0' control branch after the interferometer and the pi shift."""
        return -self.t * self.beta0

    def target_qubit(self, sign: int = 1) -> np.ndarray:
        """Heralded target on the '0' (sign=+1) or '1' (sign=-1) control branch."""
        d = self.delta
        return np.array([-sign * d.conjugate(), 1.0]) / math.sqrt(1 + abs(d) ** 2)

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "bs_r": self.bs_r,
            "phi": self.phi,
            "alpha": self.alpha,
            "cutoffs": list(self.cutoffs),
            "t": self.t,
            "t1": self.t1,
            "r1": self.r1,
            "delta": self.delta,
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class Qubit2:
    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-12:
            raise InvalidConfigError(f"|a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2!r} != 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def normalized(cls, a, b) -> Qubit2:
        nrm = math.hypot(abs(a), abs(b))
        return cls(complex(a) / nrm, complex(b) / nrm)

    @property
    def column(self) -> np.ndarray:
        return np.array([self.a, self.b])


@dataclass
class GateReport:
    kind: str
    success_probability: float
    output: fock.MultiModeState
    ideal: fock.MultiModeState
    fidelity: float
    config: GateConfig
    control: Qubit2
    ideal_description: str = ""
    extras: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _coh(amp, dim) -> np.ndarray:
    return fock.coherent_amplitudes(amp, dim)


def _basis(n, dim) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[n] = 1.0
    return v


def _pad(vec, dim) -> np.ndarray:
    return np.pad(np.asarray(vec, dtype=np.complex128), (0, dim - len(vec)))


def _outer(*vecs) -> np.ndarray:
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return out


def _state(amps) -> fock.MultiModeState:
    amps = np.asarray(amps)
    return fock.MultiModeState(amps.shape, amps).normalize()


def _reduced_fidelity(ideal: fock.MultiModeState, state: fock.MultiModeState) -> float:
    """Fidelity of a pure ``ideal`` on the leading modes with the reduced state of ``state``.

    The trailing mode of ``state`` is traced out: ``sum_k |<ideal, k|state>|^2``.
    """
    amps = state.amplitudes
    return float(sum(abs(np.vdot(ideal.amplitudes, amps[..., k])) ** 2 for k in range(amps.shape[-1])))


# ---------------------------------------------------------------------------
# control-sign gate
# ---------------------------------------------------------------------------


def build_input(config: GateConfig, control: Qubit2) -> fock.MultiModeState:
    """Control superposition, vacuum arm and squeezed pair as one 4-mode state."""
    c0, c1, c2, c3 = config.cutoffs
    b0 = config.beta0
    for amp in (b0, -b0):
        fock.coherent_state(amp, c0)
    mode0 = fock.MultiModeState((c0,), control.a * _coh(b0, c0) + control.b * _coh(-b0, c0)).normalize()
    pair = fock.vacuum(c2, c3).apply(fock.two_mode_squeezer(config.s, (c2, c3)), (0, 1))
    return fock.product_state(mode0, fock.vacuum(c1), pair)


def interferometer(config: GateConfig, state: fock.MultiModeState) -> fock.MultiModeState:
    """The four splitters and the pi phase shift, applied in that order."""
    c0, c1, c2, c3 = config.cutoffs
    t, r, phi = config.t, config.bs_r, config.phi
    st = state.apply(fock.beam_splitter(config.t1, config.r1, 0.0, (c0, c1), "B12prime"), (0, 1))
    st = st.apply(fock.beam_splitter(t, r, phi, (c0, c2), "B13"), (0, 2))
    st = st.apply(fock.beam_splitter(t, r, phi, (c1, c3), "B24"), (1, 3))
    st = st.apply(fock.beam_splitter(config.t1, config.r1, 0.0, (c0, c1), "B12"), (0, 1))
    return st.apply(fock.phase_shifter(math.pi, c0), 0)


def _branch(config: GateConfig, sign: int, dims) -> np.ndarray:
    c0, c1, c2 = dims
    return _outer(_coh(sign * config.control_out, c0), _basis(0, c1), _pad(config.target_qubit(sign), c2))


def ideal_cz(config: GateConfig, control: Qubit2) -> fock.MultiModeState:
    """``a|g>|0>(a1|0> + b1|1>) + b|-g>|0>(-a1|0> + b1|1>)`` on modes (0, 1, 2)."""
    dims = config.cutoffs[:3]
    return _state(control.a * _branch(config, 1, dims) + control.b * _branch(config, -1, dims))


def _herald(config, control, apd, raise_on_zero=True):
    st = interferometer(config, build_input(config, control))
    if apd:
        return fock.apd_click(st, 3, raise_on_zero=raise_on_zero)
    return fock.project_fock(st, 3, 1, raise_on_zero=raise_on_zero)


def run_cz(config: GateConfig, control: Qubit2, apd: bool = False) -> GateReport:
    """Control-sign gate heralded on one photon in mode 3 (or on a detector click).

    With ``apd=True`` the heralded state keeps mode 3 and the fidelity is the
    one of the reduced state on modes (0, 1, 2).
    """
    out = _herald(config, control, apd)
    ideal = ideal_cz(config, control)
    fid = _reduced_fidelity(ideal, out.state) if apd else fock.fidelity(ideal, out.state)
    a1, b1 = config.target_qubit(1)
    return GateReport(
        kind="cz",
        success_probability=out.probability,
        output=out.state,
        ideal=ideal,
        fidelity=fid,
        config=config,
        control=control,
        ideal_description="a|g>|0>(a1|0>+b1|1>) + b|-g>|0>(-a1|0>+b1|1>)",
        extras={"detector": "apd" if apd else "pnrd", "a1": a1, "b1": b1, "control_out": config.control_out},
    )


def cz_amplitudes(report: GateReport) -> np.ndarray:
    """Heralded output on the four product basis states, ordered (00, 01, 10, 11).

    Control basis ``|g>, |-g>`` (solved through their Gram matrix, so the
    small overlap does not leak between the two); target basis permuted,
    i.e. logical 0 is |1> and logical 1 is |0>.
    """
    cfg = report.config
    c0 = cfg.cutoffs[0]
    g = cfg.control_out
    amps = report.output.amplitudes[:, 0, :]
    ctrl = np.stack([_coh(g, c0), _coh(-g, c0)])
    coeff = np.linalg.solve(ctrl.conj() @ ctrl.T, ctrl.conj() @ amps)
    return np.array([coeff[0, 1], coeff[0, 0], coeff[1, 1], coeff[1, 0]])


def cz_sign_pattern(report: GateReport) -> np.ndarray:
    """Phases of the extracted amplitudes relative to the unentangled product input.

    The input column is ``(a A, a B, b A, b B)`` with ``(A, B)`` the target
    amplitudes on the permuted basis. A control-sign gate gives phases
    ``(0, 0, 0, pi)`` up to a common offset, which is removed.
    """
    a1, b1 = report.config.target_qubit(1)
    A, B = b1, a1
    a, b = report.control.a, report.control.b
    product = np.array([a * A, a * B, b * A, b * B])
    ratio = cz_amplitudes(report) / product
    return np.angle(ratio / ratio[0])


# ---------------------------------------------------------------------------
# Hadamard variants
# ---------------------------------------------------------------------------


def _require_unit_delta(config: GateConfig):
    d = config.delta
    if abs(abs(d) - 1) > 1e-9 or abs(d.imag) > 1e-9:
        raise InvalidConfigError(f"Hadamard runs need delta = +-1 (alpha = +-sinh s cosh s); delta = {d:.6g}")


def hybrid_basis(config: GateConfig) -> tuple[fock.MultiModeState, fock.MultiModeState]:
    """``Phi_+-`` on modes (0, 1, 2): the two control branches summed and subtracted."""
    dims = config.cutoffs[:3]
    p, m = _branch(config, 1, dims), _branch(config, -1, dims)
    return _state(p + m), _state(p - m)


def run_hadamard_hybrid(config: GateConfig, control: Qubit2) -> GateReport:
    """Hadamard between the coherent control and the hybrid basis ``Phi_+-``."""
    _require_unit_delta(config)
    out = _herald(config, control, apd=False)
    phi_p, phi_m = hybrid_basis(config)
    a, b = control.a, control.b
    ideal = _state((a + b) / math.sqrt(2) * phi_p.amplitudes + (a - b) / math.sqrt(2) * phi_m.amplitudes)
    return GateReport(
        kind="hadamard",
        success_probability=out.probability,
        output=out.state,
        ideal=ideal,
        fidelity=fock.fidelity(ideal, out.state),
        config=config,
        control=control,
        ideal_description="((a+b)/sqrt2)|Phi+> + ((a-b)/sqrt2)|Phi->",
        extras={
            "phi_overlap": phi_m.inner(phi_p),
            "weight_phi_plus": abs(phi_p.inner(out.state)) ** 2,
            "weight_phi_minus": abs(phi_m.inner(out.state)) ** 2,
        },
    )


def default_measured_photons(config: GateConfig) -> int:
    return max(1, int(round(abs(config.control_out) ** 2)))


def run_hadamard_macro_micro(config: GateConfig, control: Qubit2, n_measured: int | None = None) -> GateReport:
    """Hadamard from the coherent control onto the single-rail target.

    Mode 0 is additionally projected on ``|n_measured>``; the result holds
    modes (1, 2). For even ``n`` the target picks up the extra ``U_y(-pi/2)``
    relative to the odd case.
    """
    _require_unit_delta(config)
    if n_measured is None:
        n_measured = default_measured_photons(config)
    herald = _herald(config, control, apd=False)
    p_n = fock.project_fock(herald.state, 0, n_measured, raise_on_zero=False)
    if p_n.state is None:
        raise ZeroProbabilityBranch(
            herald.probability * p_n.probability, f"no weight on |{n_measured}> in the control mode"
        )
    c1, c2 = config.cutoffs[1:3]
    g = config.control_out
    w = _coh(g, n_measured + 1)[n_measured]
    warnings = []
    if abs(w) ** 2 < LOW_WEIGHT:
        warnings.append(
            f"|<{n_measured}|g>|^2 = {abs(w) ** 2:.2e}: n is far from |g|^2 = {abs(g) ** 2:.3g}, branch is rare"
        )
    target = control.a * w * config.target_qubit(1) + control.b * (-1) ** n_measured * w * config.target_qubit(-1)
    ideal = _state(_outer(_basis(0, c1), _pad(target, c2)))
    return GateReport(
        kind="macro-micro",
        success_probability=herald.probability * p_n.probability,
        output=p_n.state,
        ideal=ideal,
        fidelity=fock.fidelity(ideal, p_n.state),
        config=config,
        control=control,
        ideal_description="|0> x (a q+ + (-1)^n b q-) with q+- the two heralded targets",
        extras={"n_measured": n_measured, "target": target / np.linalg.norm(target)},
        warnings=warnings,
    )


def _reverse_splitter(T: float, dims) -> fock.ModeOperator:
    r = math.sqrt(1 - T)
    return fock.beam_splitter(math.sqrt(T), r, math.pi, dims, "B13")


def hybrid_input(config: GateConfig, hybrid_in: Qubit2, qubit_dim: int = TARGET_DIM) -> fock.MultiModeState:
    """``a Phi_+ + b Phi_-`` on (coherent mode, qubit mode)."""
    _require_unit_delta(config)
    A = config.control_out
    c = fock.cutoff_for(A)
    p = _outer(_coh(A, c), _pad(config.target_qubit(1), qubit_dim))
    m = _outer(_coh(-A, c), _pad(config.target_qubit(-1), qubit_dim))
    phi_p, phi_m = _state(p + m), _state(p - m)
    return _state(hybrid_in.a * phi_p.amplitudes + hybrid_in.b * phi_m.amplitudes)


def run_reverse_hadamard(
    config: GateConfig,
    hybrid_in: Qubit2,
    state: fock.MultiModeState | None = None,
    T: float | None = None,
    modes: Sequence[int] = (0, 1),
) -> GateReport:
    """Map a hybrid qubit back onto coherent states.

    The qubit mode is mixed with the coherent mode on a weak splitter of
    transmissivity ``T`` (phase pi) and projected on |1>. ``state`` may be
    any state whose ``modes = (coherent, qubit)`` hold the hybrid qubit, e.g.
    the output of :func:`run_hadamard_hybrid`; other modes ride along.
    """
    T = config.t**2 if T is None else float(T)
    if not 0 < T < 1:
        raise InvalidConfigError(f"transmissivity must lie in (0, 1), got {T}")
    if state is None:
        state = hybrid_input(config, hybrid_in)
        modes = (0, 1)
    cm, qm = modes
    bs = _reverse_splitter(T, (state.cutoffs[qm], state.cutoffs[cm]))
    mixed = state.apply(bs, (qm, cm))
    out = fock.project_fock(mixed, qm, 1)
    A = config.control_out
    A_out = math.sqrt(T) * A
    dims = out.state.cutoffs
    cm_out = cm if cm < qm else cm - 1
    a, b = hybrid_in.a, hybrid_in.b
    ideal_c = (a + b) / math.sqrt(2) * _coh(A_out, dims[cm_out]) + (a - b) / math.sqrt(2) * _coh(-A_out, dims[cm_out])
    rest = [_basis(0, d) for d in dims]
    rest[cm_out] = ideal_c
    ideal = _state(_outer(*rest))
    literal = abs(config.gamma) / T
    return GateReport(
        kind="reverse",
        success_probability=out.probability,
        output=out.state,
        ideal=ideal,
        fidelity=fock.fidelity(ideal, out.state),
        config=config,
        control=hybrid_in,
        ideal_description="((a+b)/sqrt2)|tA> + ((a-b)/sqrt2)|-tA>",
        extras={
            "T": T,
            "input_amplitude": A,
            "output_amplitude": A_out,
            "literal_output_amplitude": literal,
            "coherent_mode": cm_out,
        },
    )


def coherent_pair_amplitudes(state: fock.MultiModeState, amp, mode: int = 0) -> np.ndarray:
    """Least-squares ``(a, b)`` with ``state ~ a|amp> + b|-amp>`` on ``mode``, others in vacuum.

    The result is normalized and its global phase fixed so ``a`` is real and
    non-negative (or ``b`` if ``a`` vanishes).
    """
    d = state.cutoffs[mode]
    amps = np.moveaxis(state.amplitudes, mode, 0).reshape(d, -1)[:, 0]
    basis = np.stack([_coh(amp, d), _coh(-amp, d)])
    coeff = np.linalg.solve(basis.conj() @ basis.T, basis.conj() @ amps)
    coeff = coeff / np.linalg.norm(coeff)
    ref = coeff[0] if abs(coeff[0]) > 1e-12 else coeff[1]
    return coeff * np.exp(-1j * np.angle(ref))


# ---------------------------------------------------------------------------
# detector realism
# ---------------------------------------------------------------------------


def apd_ratio_curve(delta, s_grid, k_max: int) -> np.ndarray:
    """Rows ``(s, P1/P2, ..., P1/P_kmax)`` of the displaced-pair distribution at fixed delta."""
    if k_max < 2:
        raise InvalidConfigError(f"k_max must be >= 2, got {k_max}")
    rows = []
    for s in s_grid:
        p = arep.tmsv_probabilities(delta, float(s), k_max)
        rows.append([float(s), *(p[1] / p[2:])])
    return np.array(rows)


def attenuate_coherent(alpha_in, T: float) -> complex:
    """Amplitude after an absorber that maps |alpha> to |alpha / T> (T >= 1)."""
    if T < 1:
        raise InvalidConfigError(f"attenuation factor must be >= 1, got {T}")
    return complex(alpha_in) / T


# ---------------------------------------------------------------------------
# squeezed states as cat-state approximations
# ---------------------------------------------------------------------------


def _squeeze_dim(r: float, alpha: float) -> int:
    base = fock.cutoff_for(alpha)
    lam = math.tanh(abs(r))
    if lam == 0:
        return base
    return max(base, 2 * int(math.ceil(math.log(1e-7) / math.log(lam))) + 2)


def scs_fidelity(r: float, alpha: float, which="even") -> float:
    """Fidelity of a squeezed vacuum / photon / superposition with the matching cat.

    ``which`` is ``"even"`` (S(r)|0> vs even cat), ``"odd"`` (S(r)|1> vs odd
    cat) or a pair ``(a, b)`` (S(r)(a|0> + b|1>) vs ``(a+b)|alpha> + (a-b)|-alpha>``).
    """
    dim = _squeeze_dim(r, alpha)
    if which == "even":
        a, b = 1.0, 0.0
    elif which == "odd":
        a, b = 0.0, 1.0
    else:
        a, b = which
    inp = np.zeros(dim, dtype=np.complex128)
    inp[0], inp[1] = a, b
    sq = fock.MultiModeState((dim,), inp).normalize()
    if r != 0:
        sq = sq.apply(fock.single_mode_squeezer(r, dim), 0)
    plus, minus = _coh(alpha, dim), _coh(-alpha, dim)
    target = (a + b) * plus + (a - b) * minus
    if np.linalg.norm(target) < 1e-14:
        # |alpha> - |-alpha> vanishes at alpha = 0; its limit is |1>
        target = _basis(1, dim) * (a - b)
    tgt = fock.MultiModeState((dim,), target).normalize()
    return fock.fidelity(tgt, sq)


def best_scs_fidelity(alpha: float, which="even", r_max: float = 1.2) -> tuple[float, float]:
    """``(r, fidelity)`` maximizing :func:`scs_fidelity` over ``r`` in ``(0, r_max]``."""
    grid = np.linspace(r_max / 60, r_max, 60)
    vals = [scs_fidelity(r, alpha, which) for r in grid]
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda r: -scs_fidelity(r, alpha, which), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6})
    if -res.fun >= vals[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(vals[i])
