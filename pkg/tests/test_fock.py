import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from alpharep import fock
from alpharep.errors import (
    InvalidDimensionError,
    InvalidLevelError,
    InvalidSplitterError,
    InvalidSqueezingError,
    TruncationRiskError,
    ZeroProbabilityBranch,
)

amplitudes = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def random_state(cutoffs, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=cutoffs) + 1j * rng.normal(size=cutoffs)
    return fock.MultiModeState(cutoffs, amps).normalize()


# -- states -------------------------------------------------------------------


def test_state_is_immutable():
    s = fock.vacuum(3)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2.0


def test_state_rejects_bad_shapes():
    with pytest.raises(InvalidDimensionError):
        fock.MultiModeState((0,), [])
    with pytest.raises(InvalidDimensionError):
        fock.MultiModeState((2, 2), np.ones(3))


def test_normalize_and_tolerance():
    s = fock.MultiModeState((3,), [1, 1j, 0]).normalize()
    assert s.is_normalized()
    assert abs(s.norm() - 1) < 1e-15
    with pytest.raises(ZeroProbabilityBranch):
        fock.MultiModeState((2,), [0, 0]).normalize()


def test_coherent_state_poisson_and_guard():
    s = fock.coherent_state(1.0, fock.cutoff_for(1.0))
    assert abs(s.amplitudes[0] - math.exp(-0.5)) < 1e-15
    with pytest.raises(TruncationRiskError):
        fock.coherent_state(3.0, 10)


def test_cutoff_policy_tail():
    for a in (0.0, 0.5, 1.0, 2.0, 3.0):
        d = fock.cutoff_for(a)
        tail = 1 - np.sum(np.abs(fock.coherent_amplitudes(a, d)) ** 2)
        assert tail < 1e-10


# -- ladder and displacement -----------------------------------------------------


def test_ladder_ops():
    a, ad = fock.ladder_ops(2)
    assert np.count_nonzero(a.matrix) == 1 and a.matrix[0, 1] == 1
    a, ad = fock.ladder_ops(4)
    assert abs(a.matrix[2, 3] - math.sqrt(3)) < 1e-15
    assert np.allclose(np.diag((ad @ a).matrix), np.arange(4))
    assert np.allclose(ad.matrix, a.matrix.conj().T)
    with pytest.raises(InvalidDimensionError):
        fock.ladder_ops(1)


def test_displacement_examples():
    assert np.allclose(fock.displacement_operator(0, 12).matrix, np.eye(12))
    D = fock.displacement_operator(1.0, 20)
    assert abs(D.matrix[0, 0] - 0.6065307) < 1e-7
    a = 0.7 + 0.3j
    prod = fock.displacement_operator(a, 30) @ fock.displacement_operator(-a, 30)
    idx = prod.guarded_indices()
    assert np.max(np.abs(prod.matrix[np.ix_(idx, idx)] - np.eye(idx.size))) < 1e-10


def test_displacement_refuses_small_cutoff():
    with pytest.raises(TruncationRiskError):
        fock.displacement_operator(2.0, 12)


def test_oracle_examples():
    assert abs(fock.matrix_element_oracle(0, 0, 1) - 0.6065307) < 1e-7
    assert abs(fock.matrix_element_oracle(1, 1, 1)) < 1e-15
    assert abs(fock.matrix_element_oracle(1, 0, 1j) - 1j * math.exp(-0.5)) < 1e-15


@settings(max_examples=25, deadline=None)
@given(amplitudes)
def test_oracle_matches_expm(a):
    dim = fock.cutoff_for(math.sqrt(12) + abs(a)) + fock.GUARD
    D = fock.displacement_operator(a, dim).matrix
    ref = np.array([[fock.matrix_element_oracle(m, n, a) for n in range(13)] for m in range(13)])
    assert np.max(np.abs(D[:13, :13] - ref)) < 1e-10


def test_displaced_number_state_energy_and_ladder():
    s = fock.displaced_number_state(2, 1.5, 40)
    assert abs(s.mean_photon_number() - 4.25) < 1e-6
    with pytest.raises(InvalidLevelError):
        fock.displaced_number_state(5, 0.1, 5)
    assert np.allclose(fock.displaced_number_state(0, 0, 4).vector, [1, 0, 0, 0])


@pytest.mark.parametrize("alpha", [0.0, 0.8, 1.5, -0.6 + 1.0j])
def test_shifted_ladder_relations(alpha):
    dim = 50
    a = fock.ladder_ops(dim)[0].matrix
    A = a - alpha * np.eye(dim)
    for n in range(1, 9):
        lhs = A @ fock.displaced_number_state(n, alpha, dim).vector
        rhs = math.sqrt(n) * fock.displaced_number_state(n - 1, alpha, dim).vector
        assert np.max(np.abs(lhs - rhs)) < 1e-8
        lhs = A.conj().T @ fock.displaced_number_state(n, alpha, dim).vector
        rhs = math.sqrt(n + 1) * fock.displaced_number_state(n + 1, alpha, dim).vector
        assert np.max(np.abs(lhs - rhs)) < 1e-8


# -- squeezers -----------------------------------------------------------------


def test_two_mode_squeezer():
    st0 = fock.vacuum(20, 20)
    assert np.allclose(st0.apply(fock.two_mode_squeezer(0.0, (20, 20)), (0, 1)).amplitudes, st0.amplitudes)
    s = st0.apply(fock.two_mode_squeezer(0.5, (20, 20)), (0, 1))
    assert abs(s.amplitudes[1, 1] - math.tanh(0.5) / math.cosh(0.5)) < 1e-12
    lam, ch = math.tanh(0.5), math.cosh(0.5)
    diag = np.array([lam**n / ch for n in range(8)])
    assert np.max(np.abs(np.diag(s.amplitudes)[:8] - diag)) < 1e-12
    off = s.amplitudes - np.diag(np.diag(s.amplitudes))
    assert np.max(np.abs(off)) < 1e-12
    with pytest.raises(TruncationRiskError):
        fock.two_mode_squeezer(0.5, (8, 8))
    with pytest.raises(InvalidSqueezingError):
        fock.two_mode_squeezer(-0.1, (8, 8))


def test_single_mode_squeezer():
    assert np.allclose(fock.single_mode_squeezer(0.0, 10).matrix, np.eye(10))
    s = fock.vacuum(60).apply(fock.single_mode_squeezer(0.4, 60), 0)
    assert np.max(np.abs(s.amplitudes[1::2])) == 0
    assert abs(s.amplitudes[0] - 1 / math.sqrt(math.cosh(0.4))) < 1e-12


# -- beam splitters -------------------------------------------------------------


def splitter_by_expm(M, d):
    """Two-mode passive unitary as exp of the generator log(M) lifted to Fock space."""
    from scipy.linalg import logm

    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    ops = [np.kron(a, np.eye(d)), np.kron(np.eye(d), a)]
    H = logm(M)
    gen = sum(H[j, i] * ops[j].conj().T @ ops[i] for i in range(2) for j in range(2))
    return expm(gen)


@pytest.mark.parametrize("conv", fock.SPLITTER_CONVENTIONS)
def test_splitter_matches_generator_exponential(conv):
    d = 12
    M = fock.splitter_matrix(0.8, 0.6, math.pi / 3, conv)
    U = fock.linear_optics_operator(M, (d, d))
    ref = splitter_by_expm(M, d)
    n1, n2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    # photon number is conserved, so every column with n1 + n2 < d is exact in both
    cols = (n1 * d + n2)[(n1 + n2) < d]
    rows = (n1 * d + n2)[(n1 + n2) < d]
    assert np.max(np.abs(U.matrix[np.ix_(rows, cols)] - ref[np.ix_(rows, cols)])) < 1e-10


def test_splitter_coherent_action():
    t, r, phi = 0.8, 0.6, math.pi / 3
    b1, b2 = 0.5, -0.2j
    d = 20
    inp = fock.product_state(fock.coherent_state(b1, d), fock.coherent_state(b2, d))
    out = inp.apply(fock.beam_splitter(t, r, phi, (d, d), "B13"), (0, 1))
    e = np.exp(1j * phi)
    c1, c2 = t * b1 - r / e * b2, r * e * b1 + t * b2
    ref = fock.product_state(fock.coherent_state(c1, d), fock.coherent_state(c2, d))
    assert fock.fidelity(ref, out) > 1 - 1e-9


def test_splitter_identity_and_validation():
    U = fock.beam_splitter(1.0, 0.0, 0.0, (6, 6))
    assert np.allclose(U.matrix, np.eye(36))
    with pytest.raises(InvalidSplitterError):
        fock.splitter_matrix(0.8, 0.8)
    with pytest.raises(InvalidSplitterError):
        fock.splitter_matrix(0.8, 0.6, 0.0, "B99")


@pytest.mark.parametrize("seed", range(3))
def test_splitter_conserves_photon_number(seed):
    d = 10
    rng = np.random.default_rng(seed)
    amps = np.zeros((d, d), dtype=complex)
    for n1 in range(4):
        for n2 in range(4 - n1):
            amps[n1, n2] = rng.normal() + 1j * rng.normal()
    s = fock.MultiModeState((d, d), amps).normalize()
    out = s.apply(fock.beam_splitter(0.6, 0.8, 1.1, (d, d), "B24"), (0, 1))
    assert abs(out.total_photon_number() - s.total_photon_number()) < 1e-10


def test_phase_shifter_flips_coherent_state():
    d = fock.cutoff_for(1.3)
    out = fock.coherent_state(1.3, d).apply(fock.phase_shifter(math.pi, d), 0)
    assert fock.fidelity(out, fock.coherent_state(-1.3, d)) > 1 - 1e-12


# -- apply / tensor ------------------------------------------------------------------


def test_apply_on_non_adjacent_modes_matches_kron():
    s = random_state((3, 4, 3), 1)
    U = fock.beam_splitter(0.6, 0.8, 0.2, (3, 3))
    out = s.apply(U, (2, 0))
    # reference: permute to (2, 0, 1), apply on the leading pair, permute back
    perm = np.transpose(s.amplitudes, (2, 0, 1)).reshape(9, 4)
    ref = (U.matrix @ perm).reshape(3, 3, 4).transpose(1, 2, 0)
    assert np.allclose(out.amplitudes, ref)


def test_apply_rejects_mismatch():
    s = fock.vacuum(3, 4)
    with pytest.raises(InvalidDimensionError):
        s.apply(fock.phase_shifter(0.1, 3), 1)
    with pytest.raises(InvalidDimensionError):
        s.apply(fock.phase_shifter(0.1, 3), (0, 1))


# -- measurements -----------------------------------------------------------------------


def test_project_fock_examples():
    amps = np.zeros((2, 2))
    amps[0, 1] = amps[1, 0] = 1 / math.sqrt(2)
    out = fock.project_fock(fock.MultiModeState((2, 2), amps), 0, 0)
    assert abs(out.probability - 0.5) < 1e-15
    assert np.allclose(out.state.vector, [0, 1])
    tm = fock.vacuum(20, 20).apply(fock.two_mode_squeezer(0.5, (20, 20)), (0, 1))
    p = fock.project_fock(tm, 1, 1).probability
    assert abs(p - math.tanh(0.5) ** 2 / math.cosh(0.5) ** 2) < 1e-12
    with pytest.raises(ZeroProbabilityBranch):
        fock.project_fock(fock.vacuum(3), 0, 1)
    soft = fock.project_fock(fock.vacuum(3), 0, 1, raise_on_zero=False)
    assert soft.probability == 0 and not soft.heralded
    with pytest.raises(InvalidLevelError):
        fock.project_fock(fock.vacuum(3), 0, 3)


@pytest.mark.parametrize("seed", range(3))
def test_projection_completeness(seed):
    s = random_state((4, 5), seed)
    total = sum(fock.project_fock(s, 1, n, raise_on_zero=False).probability for n in range(5))
    assert abs(total - 1) < 1e-10


def test_apd_click_examples():
    with pytest.raises(ZeroProbabilityBranch):
        fock.apd_click(fock.vacuum(4), 0)
    one = fock.fock_state(1, 4)
    out = fock.apd_click(one, 0)
    assert out.probability == pytest.approx(1.0) and fock.fidelity(out.state, one) == pytest.approx(1.0)
    coh = fock.coherent_state(0.3, fock.cutoff_for(0.3))
    assert abs(fock.apd_click(coh, 0).probability - (1 - math.exp(-0.09))) < 1e-12
    assert abs(fock.apd_click(coh, 0).probability - 0.08607) < 1e-5


def test_fidelity_examples():
    s = random_state((5,), 0)
    assert fock.fidelity(s, s) == pytest.approx(1.0)
    assert fock.fidelity(fock.fock_state(1, 4), fock.fock_state(2, 4)) == 0
    d = fock.cutoff_for(2.0)
    f = fock.fidelity(fock.coherent_state(2.0, d), fock.coherent_state(-2.0, d))
    assert f == pytest.approx(math.exp(-16), rel=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_fidelity_symmetric_and_bounded(s1, s2):
    a, b = random_state((3, 3), s1), random_state((3, 3), s2)
    f = fock.fidelity(a, b)
    assert 0 <= f <= 1 + 1e-12
    assert f == pytest.approx(fock.fidelity(b, a), abs=1e-14)


@pytest.mark.parametrize(
    "make",
    [
        lambda: fock.displacement_operator(1.2 - 0.4j, 30),
        lambda: fock.two_mode_squeezer(0.3, (14, 14)),
        lambda: fock.single_mode_squeezer(0.6, 60),
        lambda: fock.beam_splitter(0.3, math.sqrt(0.91), 0.7, (15, 15), "B12prime"),
    ],
)
def test_operators_unitary_on_guarded_block(make):
    assert make().unitarity_residual() < 1e-8
