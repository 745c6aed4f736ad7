"""End-to-end acceptance checks for the ramped-hopping laboratory.

Each test pins one headline claim at its stated tolerance and prints a
PASS line (run with ``pytest tests/test_acceptance.py -v -s``).
"""

import numpy as np
import pytest

from ramphop import (
    Boundary,
    EigenClass,
    LatticeParams,
    classify,
    decoupling_check,
    eig_general,
    fit_envelope,
    global_envelope,
    level_spacings,
    solve_spectrum,
    spectral_moments,
    winding_number,
)
from ramphop.analysis import LADDER_RELATIVE_STDEV
from ramphop.model import build_hamiltonian, classify_regime
from ramphop.solve import block_spectra
from _oracles import charpoly, closure_defect, contour_roots, dense_matrix, max_pairing_gap

L100 = 100


@pytest.fixture(scope="module")
def spec_001():
    return solve_spectrum(LatticeParams(t=1.0, gamma=0.01, length=L100))


@pytest.fixture(scope="module")
def spec_002():
    return solve_spectrum(LatticeParams(t=1.0, gamma=0.02, length=L100))


@pytest.fixture(scope="module")
def spec_0011_vectors():
    return solve_spectrum(
        LatticeParams(t=1.0, gamma=0.011, length=L100), want_vectors=True
    )


def test_01_weak_ramp_spectrum_is_purely_real(spec_001):
    cs = classify(spec_001)
    assert cs.counts.n_real == 100
    max_imag = float(np.max(np.abs(spec_001.eigenvalues.imag)))
    assert max_imag < 1e-6
    print(f"ACCEPTANCE 01 PASS - 100 real eigenvalues, max |Im E| = {max_imag:.2e}")


def test_02_integer_split_counts_and_block_match(spec_002):
    cs = classify(spec_002)
    assert cs.counts.n_real == 50
    assert cs.counts.n_imaginary == 50
    params = LatticeParams(t=1.0, gamma=0.02, length=L100)
    sigma_a, sigma_b = block_spectra(params)
    union = np.concatenate([sigma_a.astype(complex), sigma_b])
    full = eig_general(build_hamiltonian(params)).eigenvalues
    gap = max_pairing_gap(union, full)
    assert gap <= 1e-8
    print(f"ACCEPTANCE 02 PASS - 50/50 split, block union pairs to {gap:.2e}")


def test_03_non_integer_blocks_miss_the_spectrum():
    params = LatticeParams(t=1.0, gamma=0.07, length=L100)
    spec = solve_spectrum(params)
    cs = classify(spec)
    assert cs.counts.n_complex == 0
    sigma_a, sigma_b = block_spectra(params)
    union = np.concatenate([sigma_a.astype(complex), sigma_b])
    worst = max(float(np.min(np.abs(spec.eigenvalues - v))) for v in union)
    assert worst > 1e-4
    print(
        "ACCEPTANCE 03 PASS - spectrum stays on the axes, "
        f"worst block mismatch {worst:.2e} > 1e-4"
    )


def test_04_ten_imaginary_levels_with_gaussian_bound_pair(spec_0011_vectors):
    spec = spec_0011_vectors
    cs = classify(spec)
    assert cs.counts.n_imaginary == 10
    gamma = 0.011
    reported = 0.6864
    centers = []
    widths = []
    for target in (reported * 1j, -reported * 1j):
        idx = int(np.argmin(np.abs(spec.eigenvalues - target)))
        assert abs(abs(spec.eigenvalues[idx].imag) - reported) <= 1e-3
        fit = fit_envelope(spec.eigenvectors[:, idx], gamma)
        assert fit.center == pytest.approx(32.0, abs=1.0)
        assert fit.width_param == pytest.approx(gamma / 2.0, rel=0.2)
        centers.append(fit.center)
        widths.append(fit.width_param)
    print(
        "ACCEPTANCE 04 PASS - 10 imaginary levels; pair at +-0.6864i with "
        f"centers {centers[0]:.2f}/{centers[1]:.2f}, widths "
        f"{widths[0]:.5f}/{widths[1]:.5f} (target {gamma / 2.0:.5f})"
    )


def test_05_strong_ramp_spectrum_is_purely_imaginary():
    cs = classify(solve_spectrum(LatticeParams(t=1.0, gamma=1.5, length=L100)))
    assert cs.counts.n_imaginary == 100
    print("ACCEPTANCE 05 PASS - 100 imaginary eigenvalues at strong ramp")


def test_06_real_ladder_flat_imaginary_ladder_not(spec_001, spec_002):
    real_stats = level_spacings(classify(spec_001), EigenClass.REAL)
    assert real_stats.relative_stdev < LADDER_RELATIVE_STDEV
    imag_stats = level_spacings(classify(spec_002), EigenClass.IMAGINARY)
    assert imag_stats.relative_stdev > LADDER_RELATIVE_STDEV
    print(
        "ACCEPTANCE 06 PASS - real ladder spread "
        f"{real_stats.relative_stdev:.4f} < 0.05 < "
        f"{imag_stats.relative_stdev:.4f} imaginary spread"
    )


def test_07_skin_envelope_is_a_boundary_gaussian():
    gamma = 0.001
    spec = solve_spectrum(LatticeParams(t=1.0, gamma=gamma, length=L100), want_vectors=True)
    env = global_envelope(spec.eigenvectors)
    peak_site = int(np.argmax(env)) + 1
    assert abs(peak_site - 1.0) <= 0.5  # the distribution centers on site 1
    fit = fit_envelope(env, gamma, center=1.0)
    assert fit.width_param == pytest.approx(gamma / 2.0, rel=0.2)
    print(
        f"ACCEPTANCE 07 PASS - envelope peaks at site {peak_site}, width "
        f"{fit.width_param:.6f} vs 5.0e-04"
    )


def test_08_block_confinement_and_non_integer_tails(spec_0011_vectors):
    report = decoupling_check(LatticeParams(t=1.0, gamma=0.02, length=L100))
    assert report.max_residual < report.residual_tolerance
    assert report.max_tail < 1e-12
    params = LatticeParams(t=1.0, gamma=0.021, length=L100)
    spec = solve_spectrum(params, want_vectors=True)
    cs = classify(spec)
    split = classify_regime(params).split
    tails = []
    for i, entry in enumerate(cs.entries):
        if entry.label is EigenClass.REAL:
            amp = np.abs(spec.eigenvectors[:, i])
            tails.append(float(np.max(amp[split:]) / np.max(amp)))
    assert tails and max(tails) > 0.0
    assert max(tails) < 1e-3
    print(
        "ACCEPTANCE 08 PASS - padded block states residual "
        f"{report.max_residual:.2e}, exact zero tails; non-integer tails "
        f"up to {max(tails):.2e} (nonzero, < 1e-3)"
    )


def test_09_point_gap_winds_then_dissolves():
    ring_weak = LatticeParams(t=1.0, gamma=0.001, length=L100, boundary=Boundary.PBC)
    w_weak = winding_number(ring_weak, 0.0)
    assert w_weak != 0
    ring_strong = LatticeParams(t=1.0, gamma=2.0, length=L100, boundary=Boundary.PBC)
    w_strong = winding_number(ring_strong, 1.0)
    assert w_strong == 0
    lam = solve_spectrum(ring_strong).eigenvalues
    max_re = float(np.max(np.abs(lam.real)))
    assert max_re < 1e-6
    print(
        f"ACCEPTANCE 09 PASS - W = {w_weak} at weak ramp; W = 0 and "
        f"max |Re E| = {max_re:.2e} at strong ramp"
    )


@pytest.mark.parametrize("length", [200, 400])
def test_10_longer_chains_keep_the_hundred_site_block(length):
    params = LatticeParams(t=1.0, gamma=0.01, length=length)
    cs = classify(solve_spectrum(params))
    assert cs.counts.n_real > 0
    assert cs.counts.n_imaginary > 0
    report = decoupling_check(params)
    assert report.split == 100
    assert report.max_residual < report.residual_tolerance
    assert report.max_tail < 1e-12
    print(
        f"ACCEPTANCE 10 PASS - L={length}: {cs.counts.n_real} real / "
        f"{cs.counts.n_imaginary} imaginary, first-100-site residual "
        f"{report.max_residual:.2e}"
    )


def test_11_property_suite_on_random_instances():
    rng = np.random.default_rng(20260808)
    n_checked = 0
    n_contour = 0
    for _ in range(200):
        length = int(rng.integers(2, 13))
        t = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 2.0))
        gamma = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 2.0))
        boundary = Boundary.PBC if (length >= 3 and rng.random() < 0.4) else Boundary.OBC
        params = LatticeParams(t=t, gamma=gamma, length=length, boundary=boundary)
        h = build_hamiltonian(params)
        fro = h.frobenius_norm()
        spec = eig_general(h, want_vectors=True)
        lam = spec.eigenvalues

        mom = spectral_moments(h)
        assert abs(np.sum(lam)) <= 1e-9 * length * fro
        assert abs(np.sum(lam**2) - mom.trace_sq) <= 1e-6 * abs(mom.trace_sq) + 1e-9 * fro**2

        assert closure_defect(lam, np.conj) <= 1e-8 * fro
        if boundary is Boundary.OBC or length % 2 == 0:
            assert closure_defect(lam, lambda z: -z) <= 1e-8 * fro

        assert not np.any(spec.unconverged)
        assert np.max(spec.residuals) < 1e-8 * fro

        if length <= 6:
            coeffs = charpoly(
                dense_matrix(t, gamma, length, pbc=boundary is Boundary.PBC)
            )
            roots = contour_roots(coeffs, length)
            assert max_pairing_gap(lam, roots) < 1e-8
            n_contour += 1
        n_checked += 1
    assert n_checked == 200
    print(
        f"ACCEPTANCE 11 PASS - 200 random instances: moments, symmetry "
        f"closures, residuals; {n_contour} contour-oracle cross-checks"
    )
