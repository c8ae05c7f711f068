import numpy as np
import pytest

from conftest import interior_bump
from thetalab.gridop import eigensystem, semigroup_eig
from thetalab.moyal import (
    D_group,
    MoyalSymbol,
    MoyalWeylSystem,
    X_group,
    combined_action,
    doubled_matrix,
    harmonic_oscillator,
    lambda_action,
    relation_phase_errors,
    semigroup_symbol_route,
    trace,
)
from thetalab.skewform import SkewMatrix, canonical_form, rotation_block, spectral_gap
from thetalab.twistcal import CocycleParams, GridField, GridGeometry, group_apply, sigma

SQRT5 = 2.23606797749979


@pytest.fixture(scope="module")
def geom2():
    return GridGeometry(2, 32, 8.0)


def test_doubled_matrix_gap():
    for th12 in (0.0, 0.5, 1.0, 3.0):
        theta = SkewMatrix.from_array(rotation_block(th12)) if th12 else SkewMatrix.zero(2)
        big = doubled_matrix(theta)
        # oracle: characteristic-polynomial roots give sqrt(th12^2 + 4)
        assert spectral_gap(big) == pytest.approx(np.sqrt(th12**2 + 4.0), abs=1e-9)
    cf = canonical_form(doubled_matrix(SkewMatrix.from_array(rotation_block(1.0))))
    assert cf.alphas == pytest.approx([(SQRT5 + 1) / 2, (SQRT5 - 1) / 2], abs=1e-12)


def test_lambda_action_product_law(geom2, theta_rot):
    f = interior_bump(geom2, [0.2, -0.3], 0.8)
    h = geom2.h
    rng = np.random.default_rng(0)
    coc = CocycleParams(theta_rot)
    worst = 0.0
    for _ in range(100):
        s = h * rng.integers(-3, 4, size=2)
        t = h * rng.integers(-3, 4, size=2)
        lhs = lambda_action(theta_rot, s, lambda_action(theta_rot, t, f))
        rhs = lambda_action(theta_rot, s + t, f)
        worst = max(worst, np.max(np.abs(lhs.values - sigma(coc, s, t) * rhs.values)))
    assert worst < 1e-12
    # unitary on the discrete l2 norm
    moved = lambda_action(theta_rot, np.array([3 * h, -h]), f)
    assert moved.lp_norm(2) == pytest.approx(f.lp_norm(2), rel=1e-14)


def test_specific_product_phase(theta_rot):
    coc = CocycleParams(theta_rot)
    assert sigma(coc, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(np.exp(0.5j), abs=1e-15)


def test_trace_reads_origin(geom2, theta_rot):
    amp = 2.5 - 0.7j
    f = GridField.from_function(
        geom2, lambda pts: amp * np.exp(-np.sum(pts**2, axis=1))
    )
    assert trace(MoyalSymbol(f, theta_rot)) == pytest.approx(amp, rel=1e-15)
    assert trace(MoyalSymbol(GridField.zeros(geom2), theta_rot)) == 0.0


def test_trace_symmetry_under_composition(geom2, theta_rot):
    # tau(f * g) = tau(g * f) where * is the twisted convolution composition
    from thetalab.twistcal import twisted_convolve

    coc = CocycleParams(theta_rot)
    f = interior_bump(geom2, [0.4, 0.0], 0.7)
    g = interior_bump(geom2, [-0.3, 0.2], 0.8)
    fg = trace(MoyalSymbol(twisted_convolve(coc, f, g), theta_rot))
    gf = trace(MoyalSymbol(twisted_convolve(coc, g, f), theta_rot))
    assert abs(fg - gf) < 1e-8


def test_coordinate_group_equals_universal_axis_action(geom2, theta_rot):
    f = interior_bump(geom2, [0.1, 0.3], 0.8)
    m = MoyalSymbol(f, theta_rot)
    coc = CocycleParams(theta_rot)
    h = geom2.h
    for k, t in ((1, 3 * h), (2, -2 * h)):
        vec = np.zeros(2)
        vec[k - 1] = t
        a = X_group(theta_rot, k, t, m).f.values
        b = group_apply(coc, vec, f).values
        assert np.max(np.abs(a - b)) < 1e-12


def test_derivation_group_is_modulation(geom2, theta_rot):
    f = interior_bump(geom2, [0.1, 0.3], 0.8)
    m = MoyalSymbol(f, theta_rot)
    out = D_group(2, 0.37, m)  # any real t, no grid constraint
    pts = geom2.points()[:, 1].reshape(geom2.N, geom2.N)
    assert np.max(np.abs(out.f.values - np.exp(1j * 0.37 * pts) * f.values)) < 1e-14
    # flat case: coordinate group is a pure translation
    th0 = SkewMatrix.zero(1)
    g1 = GridGeometry(1, 32, 8.0)
    f1 = interior_bump(g1, [0.2], 0.8)
    moved = X_group(th0, 1, 4 * g1.h, MoyalSymbol(f1, th0)).f.values
    assert np.max(np.abs(moved - np.roll(f1.values, 4))) < 1e-15


def test_commutation_relations(geom2, theta_rot):
    errs = relation_phase_errors(theta_rot, geom2, cases=100)
    assert max(errs.values()) < 1e-12


def test_combined_action_is_ordered_product(geom2, theta_rot):
    # closed form vs explicit composition with the triangular phase
    rng = np.random.default_rng(1)
    h = geom2.h
    big = doubled_matrix(theta_rot)
    upper = np.triu(big.entries)
    f = interior_bump(geom2, [0.1, -0.1], 0.7)
    for _ in range(20):
        u = np.concatenate([
            h * rng.integers(-2, 3, size=2),
            rng.uniform(-1.0, 1.0, size=2),
        ])
        m = MoyalSymbol(f, theta_rot)
        for k in (2, 1):
            if u[2 + k - 1]:
                m = D_group(k, u[2 + k - 1], m)
        for k in (2, 1):
            if u[k - 1]:
                m = X_group(theta_rot, k, u[k - 1], m)
        composed = np.exp(-0.5j * float(u @ upper @ u)) * m.f.values
        direct = combined_action(theta_rot, u, f).values
        assert np.max(np.abs(composed - direct)) < 1e-12


def test_combined_action_projective_law(geom2, theta_rot):
    # the 2d-parameter family satisfies the doubled-matrix cocycle law
    big = doubled_matrix(theta_rot)
    coc_big = CocycleParams(big)
    h = geom2.h
    rng = np.random.default_rng(2)
    f = interior_bump(geom2, [0.0, 0.2], 0.7)
    worst = 0.0
    for _ in range(100):
        u = np.concatenate([h * rng.integers(-2, 3, size=2),
                            rng.uniform(-1, 1, size=2)])
        v = np.concatenate([h * rng.integers(-2, 3, size=2),
                            rng.uniform(-1, 1, size=2)])
        lhs = combined_action(theta_rot, u, combined_action(theta_rot, v, f))
        rhs = combined_action(theta_rot, u + v, f)
        worst = max(
            worst,
            np.max(np.abs(lhs.values - sigma(coc_big, u, v) * rhs.values)),
        )
    assert worst < 1e-12


def test_weyl_system_matrices_are_unitary(theta_rot):
    geom = GridGeometry(1, 16, 4.0)
    sys0 = MoyalWeylSystem(SkewMatrix.zero(1), geom)
    rng = np.random.default_rng(3)
    for _ in range(5):
        u = np.array([geom.h * rng.integers(-3, 4), rng.uniform(-2, 2)])
        m = sys0.exp_matrix(u)
        assert np.max(np.abs(m.conj().T @ m - np.eye(geom.N))) < 1e-12


def test_weyl_system_matches_combined_action():
    geom = GridGeometry(1, 16, 4.0)
    th0 = SkewMatrix.zero(1)
    system = MoyalWeylSystem(th0, geom)
    rng = np.random.default_rng(4)
    f = interior_bump(geom, [0.1], 0.6)
    for _ in range(5):
        u = np.array([geom.h * rng.integers(-3, 4), rng.uniform(-2, 2)])
        via_matrix = system.exp_matrix(u) @ f.values
        via_action = combined_action(th0, u, f).values
        assert np.max(np.abs(via_matrix - via_action)) < 1e-13


def test_oscillator_d1_values():
    geom = GridGeometry(1, 200, 10.0)
    _, rep = harmonic_oscillator(SkewMatrix.zero(1), geom)
    assert rep.alpha_ref == pytest.approx(1.0, abs=1e-12)
    expect = np.array([1.0, 3.0, 5.0, 7.0, 9.0])
    assert np.max(np.abs(rep.eigenvalues[:5] - expect) / expect) < 0.01


def test_oscillator_d2_gap():
    geom = GridGeometry(2, 40, 7.0)
    theta = SkewMatrix.from_array(rotation_block(1.0))
    _, rep = harmonic_oscillator(theta, geom)
    assert rep.alpha_ref == pytest.approx(SQRT5, abs=1e-9)
    assert abs(rep.lambda_min - SQRT5) / SQRT5 < 0.03


def test_oscillator_theta_continuity():
    geom = GridGeometry(2, 24, 7.0)
    small = SkewMatrix.from_array(rotation_block(0.01))
    _, rep = harmonic_oscillator(small, geom)
    # alpha(0.01) = sqrt(0.01^2 + 4) ~ 2: lambda_min within 1% of the flat gap
    assert abs(rep.lambda_min - 2.0) / 2.0 < 0.01


def test_semigroup_symbol_route_crossval():
    # eigendecomposition route vs kernel-representation route at t = 0.5
    geom = GridGeometry(1, 24, 6.0)
    th0 = SkewMatrix.zero(1)
    op, _ = harmonic_oscillator(th0, geom)
    f = interior_bump(geom, [0.3], 0.9)
    eig_route = semigroup_eig(op, 0.5, f)
    kern_route = semigroup_symbol_route(th0, geom, 0.5, f)
    rel = np.linalg.norm(eig_route.values - kern_route.values) / np.linalg.norm(
        eig_route.values
    )
    assert rel < 0.02
