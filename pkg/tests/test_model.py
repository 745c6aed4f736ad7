import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramphop import (
    Boundary,
    LatticeParams,
    RegimeKind,
    build_flux_twisted,
    build_hamiltonian,
    build_hatano_nelson,
    classify_regime,
    eig_general,
)
from _oracles import dense_matrix, max_pairing_gap

finite_t = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
finite_gamma = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
small_length = st.integers(min_value=2, max_value=14)


@pytest.mark.parametrize(
    "t, gamma, length, kind, split",
    [
        (1.0, 0.01, 100, RegimeKind.FULLY_HERMITIZABLE, None),
        (1.0, 0.02, 100, RegimeKind.INTEGER_SPLIT, 50),
        (1.0, 0.0, 10, RegimeKind.HERMITIAN, None),
        (1.0, 1.5, 10, RegimeKind.FULLY_ANTI_HERMITIZABLE, None),
        (1.0, 0.011, 100, RegimeKind.NON_INTEGER_SPLIT, 90),
        (1.0, 0.07, 100, RegimeKind.NON_INTEGER_SPLIT, 14),
        (1.0, 1.0, 10, RegimeKind.INTEGER_SPLIT, 1),
        (0.0, 0.5, 10, RegimeKind.FULLY_ANTI_HERMITIZABLE, None),
    ],
)
def test_regime_classification(t, gamma, length, kind, split):
    regime = classify_regime(LatticeParams(t=t, gamma=gamma, length=length))
    assert regime.kind is kind
    assert regime.split == split


def test_regime_snaps_nearly_integer_ratio():
    # 1/0.02 is not exactly 50 in floating point but must classify as such
    regime = classify_regime(LatticeParams(t=1.0, gamma=0.02, length=100))
    assert regime.kind is RegimeKind.INTEGER_SPLIT and regime.split == 50


@given(finite_t, finite_gamma, small_length)
@settings(max_examples=80, deadline=None)
def test_regime_is_total_and_mirror_invariant(t, gamma, length):
    params = LatticeParams(t=t, gamma=gamma, length=length)
    regime = classify_regime(params)
    assert regime.kind in RegimeKind
    mirrored = classify_regime(LatticeParams(t=-t, gamma=-gamma, length=length))
    assert mirrored.kind is regime.kind and mirrored.split == regime.split


def test_builder_small_chain_entries():
    h = build_hamiltonian(LatticeParams(t=1.0, gamma=0.5, length=3))
    assert np.allclose(h.upper, [1.5, 2.0])
    assert np.allclose(h.lower, [0.5, 0.0])


def test_builder_last_bond_of_long_chain():
    h = build_hamiltonian(LatticeParams(t=1.0, gamma=0.01, length=100))
    assert h.upper[98] == pytest.approx(1.99)
    assert h.lower[98] == pytest.approx(0.01)


def test_builder_ring_corner_amplitudes():
    h = build_hamiltonian(
        LatticeParams(t=1.0, gamma=0.1, length=4, boundary=Boundary.PBC)
    )
    assert h.corner_up == pytest.approx(1.4)
    assert h.corner_down == pytest.approx(0.6)
    # the assembled matrix must agree with direct entry-wise construction
    assert np.allclose(h.to_dense(), dense_matrix(1.0, 0.1, 4, pbc=True))
    mine = eig_general(h).eigenvalues
    ref = np.linalg.eigvals(dense_matrix(1.0, 0.1, 4, pbc=True))
    assert max_pairing_gap(mine, ref) < 1e-10


@given(finite_t, finite_gamma, small_length)
@settings(max_examples=80, deadline=None)
def test_bond_identities(t, gamma, length):
    h = build_hamiltonian(LatticeParams(t=t, gamma=gamma, length=length))
    j = np.arange(1, length, dtype=float)
    # entries equal the defining expressions bit for bit
    assert np.all(h.upper == t + gamma * j)
    assert np.all(h.lower == t - gamma * j)
    # sum/difference identities hold to a rounding error of the two additions
    scale = np.abs(h.upper) + np.abs(h.lower)
    eps = np.finfo(float).eps
    assert np.all(np.abs(h.upper + h.lower - 2.0 * t) <= 2.0 * eps * scale)
    assert np.all(np.abs(h.upper - h.lower - 2.0 * gamma * j) <= 2.0 * eps * scale)


@given(finite_t, finite_gamma, st.integers(min_value=2, max_value=12))
@settings(max_examples=60, deadline=None)
def test_alternating_sign_similarity_flips_sign(t, gamma, length):
    h = build_hamiltonian(LatticeParams(t=t, gamma=gamma, length=length)).to_dense()
    s = np.diag((-1.0) ** np.arange(length))
    assert np.array_equal(s @ h @ s, -h)


def test_flux_zero_matches_plain_ring():
    params = LatticeParams(t=1.0, gamma=0.1, length=6, boundary=Boundary.PBC)
    h0 = build_hamiltonian(params).to_dense()
    ht = build_flux_twisted(params, 0.0).to_dense()
    assert np.array_equal(h0, ht)


def test_flux_full_turn_is_periodic():
    params = LatticeParams(t=1.0, gamma=0.1, length=6, boundary=Boundary.PBC)
    h0 = build_hamiltonian(params).to_dense()
    ht = build_flux_twisted(params, 2.0 * np.pi).to_dense()
    assert np.max(np.abs(ht - h0)) < 1e-14


def test_flux_pi_flips_corners_and_moves_spectrum():
    params = LatticeParams(t=1.0, gamma=0.001, length=20, boundary=Boundary.PBC)
    ht = build_flux_twisted(params, np.pi)
    cu, cd = ht.effective_corners()
    assert cu == pytest.approx(-(1.0 + 0.001 * 20))
    assert cd == pytest.approx(-(1.0 - 0.001 * 20))
    e0 = np.sort(np.linalg.eigvals(build_hamiltonian(params).to_dense()).real)
    e1 = np.sort(np.linalg.eigvals(ht.to_dense()).real)
    assert np.max(np.abs(e0 - e1)) > 1e-3


def test_flux_requires_ring():
    with pytest.raises(ValueError):
        build_flux_twisted(LatticeParams(t=1.0, gamma=0.1, length=6), 0.3)


def test_hatano_nelson_real_and_imaginary_regimes():
    weak = eig_general(build_hatano_nelson(1.0, 0.5, 50)).eigenvalues
    assert np.max(np.abs(weak.imag)) < 1e-8
    strong = eig_general(build_hatano_nelson(1.0, 1.5, 50)).eigenvalues
    assert np.max(np.abs(strong.real)) < 1e-8


def test_hatano_nelson_reciprocal_limit_is_symmetric():
    h = build_hatano_nelson(1.0, 0.0, 10)
    assert np.array_equal(h.upper, h.lower)
    hd = h.to_dense()
    assert np.array_equal(hd, hd.T)


def test_matvec_matches_dense():
    rng = np.random.default_rng(5)
    for boundary in (Boundary.OBC, Boundary.PBC):
        params = LatticeParams(t=1.3, gamma=0.4, length=9, boundary=boundary)
        h = build_hamiltonian(params)
        v = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        assert np.allclose(h.matvec(v), h.to_dense() @ v)
    ht = build_flux_twisted(
        LatticeParams(t=1.3, gamma=0.4, length=9, boundary=Boundary.PBC), 0.7
    )
    v = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    assert np.allclose(ht.matvec(v), ht.to_dense() @ v)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"t": 1.0, "gamma": 0.1, "length": 1},
        {"t": 1.0, "gamma": 0.1, "length": 2, "boundary": Boundary.PBC},
        {"t": float("nan"), "gamma": 0.1, "length": 5},
        {"t": 1.0, "gamma": float("inf"), "length": 5},
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ValueError):
        LatticeParams(**kwargs)
