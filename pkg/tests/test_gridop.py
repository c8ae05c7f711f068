import numpy as np
import pytest

from conftest import interior_bump
from thetalab.gridop import (
    SizeCapError,
    build_P,
    build_Q,
    build_universal_tuple,
    eigensystem,
    oscillator_operator,
    semigroup_crossval,
    spectrum,
    sum_of_squares,
    universal_sum_of_squares,
)
from thetalab.skewform import SkewMatrix, rotation_block
from thetalab.twistcal import GridGeometry


@pytest.fixture(scope="module")
def geom1():
    return GridGeometry(1, 64, 8.0)


@pytest.fixture(scope="module")
def geom2():
    return GridGeometry(2, 24, 8.0)


def test_position_momentum_basics(geom1, geom2):
    q1 = build_Q(1, geom2)
    q2 = build_Q(2, geom2)
    # coordinates commute exactly
    assert np.array_equal(q1.entries @ q2.entries, q2.entries @ q1.entries)
    p1 = build_P(1, geom2)
    assert q1.hermiticity_defect() < 1e-15
    assert p1.hermiticity_defect() < 1e-15
    rng = np.random.default_rng(0)
    f = rng.standard_normal(geom2.size) + 1j * rng.standard_normal(geom2.size)
    assert abs(np.imag(f.conj() @ (p1.entries @ f))) < 1e-9 * np.linalg.norm(f) ** 2


def test_canonical_commutator_on_interior_fields(geom1):
    # [P, Q] f = -i f + O(h^2) away from the boundary
    p = build_P(1, geom1).entries
    q = build_Q(1, geom1).entries
    f = interior_bump(geom1, [0.2], 1.0).values
    comm = p @ (q @ f) - q @ (p @ f)
    inner = slice(8, geom1.N - 8)
    err = np.max(np.abs(comm[inner] + 1j * f[inner]))
    assert err < 5 * geom1.h**2


def test_universal_tuple_components(geom2, theta_rot):
    ops = build_universal_tuple(theta_rot, geom2)
    q1 = build_Q(1, geom2).entries
    q2 = build_Q(2, geom2).entries
    p1 = build_P(1, geom2).entries
    p2 = build_P(2, geom2).entries
    assert np.allclose(ops[0].entries, 0.5 * q2 - p1)
    assert np.allclose(ops[1].entries, -0.5 * q1 - p2)
    for op in ops:
        assert op.hermiticity_defect() < 1e-15
    # flat case: components are just -P_k
    flat = build_universal_tuple(SkewMatrix.zero(2), geom2)
    assert np.array_equal(flat[0].entries, -p1)
    assert np.array_equal(flat[1].entries, -p2)
    single = build_universal_tuple(SkewMatrix.zero(1), GridGeometry(1, 16, 4.0))
    assert np.array_equal(single[0].entries,
                          -build_P(1, GridGeometry(1, 16, 4.0)).entries)


def test_tuple_commutator_is_minus_i(geom2, theta_rot):
    ops = build_universal_tuple(theta_rot, geom2)
    f = interior_bump(geom2, [0.1, -0.2], 1.0).values.ravel()
    comm = ops[0].entries @ (ops[1].entries @ f) - ops[1].entries @ (
        ops[0].entries @ f
    )
    mask = np.abs(f) > 1e-6
    err = np.max(np.abs(comm[mask] + 1j * f[mask]))
    assert err < 10 * geom2.h


def test_sum_of_squares_psd(geom2, theta_rot):
    lit = sum_of_squares(build_universal_tuple(theta_rot, geom2))
    assert lit.hermiticity_defect() < 1e-10
    w = np.linalg.eigvalsh(lit.entries)
    assert w[0] > -1e-10
    compact = universal_sum_of_squares(theta_rot, geom2)
    assert compact.hermiticity_defect() < 1e-10
    wc, _ = eigensystem(compact)
    assert wc[0] > -1e-10
    # the compact correction is positive semidefinite
    dw = np.linalg.eigvalsh(compact.entries - lit.entries)
    assert dw[0] > -1e-10


def test_flat_sum_is_discrete_laplacian():
    geom = GridGeometry(1, 128, 10.0)
    op = universal_sum_of_squares(SkewMatrix.zero(1), geom)
    w, _ = eigensystem(op)
    # exact spectrum of the 3-point Dirichlet Laplacian on N nodes
    ks = np.arange(1, 6)
    exact = (4.0 / geom.h**2) * np.sin(ks * np.pi / (2 * (geom.N + 1))) ** 2
    assert np.max(np.abs(w[:5] - exact)) < 1e-10
    # the box gap vanishes as the box grows
    wide = GridGeometry(1, 256, 20.0)
    w2, _ = eigensystem(universal_sum_of_squares(SkewMatrix.zero(1), wide))
    assert 0 < w2[0] < w[0] < 0.03


def test_size_cap():
    with pytest.raises(SizeCapError):
        build_Q(1, GridGeometry(2, 96, 8.0))


def test_twisted_spectrum_and_scaling(theta_rot, theta_rot2):
    geom = GridGeometry(2, 48, 8.0)
    op = universal_sum_of_squares(theta_rot, geom)
    rep = spectrum(op, theta_rot)
    assert 0.97 <= rep.lambda_min <= 1.03
    assert abs(rep.gap_residual) <= 0.03
    op2 = universal_sum_of_squares(theta_rot2, geom)
    rep2 = spectrum(op2, theta_rot2)
    assert rep2.lambda_min == pytest.approx(2.0, rel=0.03)
    # spectral scaling: low eigenvalues of the scaled operator are twice
    # the unscaled ones within 2%
    lo = rep.eigenvalues[:6]
    lo2 = rep2.eigenvalues[:6]
    assert np.max(np.abs(lo2 - 2.0 * lo) / (2.0 * lo)) < 0.02


def test_flat_gap_is_zero():
    geom = GridGeometry(1, 128, 10.0)
    rep = spectrum(universal_sum_of_squares(SkewMatrix.zero(1), geom),
                   SkewMatrix.zero(1))
    assert rep.alpha_ref == 0.0
    assert abs(rep.gap_residual) < 0.01


def test_oscillator_ladder_d1():
    geom = GridGeometry(1, 200, 10.0)
    op = oscillator_operator(SkewMatrix.zero(1), geom)
    w, _ = eigensystem(op)
    expect = np.array([1.0, 3.0, 5.0, 7.0, 9.0])
    assert np.max(np.abs(w[:5] - expect) / expect) < 0.01


def test_semigroup_crossval(theta_rot):
    assert semigroup_crossval(theta_rot, GridGeometry(2, 48, 8.0), 0.5) < 0.02
    assert semigroup_crossval(SkewMatrix.zero(1), GridGeometry(1, 512, 10.0), 1.0) < 1e-3
    assert semigroup_crossval(SkewMatrix.zero(1), GridGeometry(1, 512, 10.0), 1e-3) < 1e-3


def test_mehler_trace():
    geom = GridGeometry(1, 200, 10.0)
    op = oscillator_operator(SkewMatrix.zero(1), geom)
    w, _ = eigensystem(op)
    kept = w[w < 60.0]
    for t in (0.5, 1.0, 2.0):
        # oracle: geometric series sum_k e^{-(2k+1)t} = 1/(2 sinh t)
        ks = np.arange(2000)
        series = float(np.sum(np.exp(-(2 * ks + 1) * t)))
        assert series == pytest.approx(1.0 / (2.0 * np.sinh(t)), rel=1e-12)
        tr = float(np.sum(np.exp(-t * kept)))
        assert abs(tr - series) / series < 0.01
