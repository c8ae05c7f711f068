import numpy as np
import pytest

from thetalab.skewform import (
    DecompositionError,
    SkewMatrix,
    SkewSymmetryError,
    block_diagonal,
    canonical_form,
    rotation_block,
    spectral_gap,
)

SQRT5 = 2.23606797749979


def random_skew(rng, n):
    a = rng.standard_normal((n, n))
    return SkewMatrix.from_array((a - a.T) / 2)


def test_construction_validates_symmetry():
    with pytest.raises(SkewSymmetryError):
        SkewMatrix.from_array(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(SkewSymmetryError):
        SkewMatrix.from_array(np.array([[1.0]]))
    # within-tolerance asymmetry gets symmetrized exactly
    m = SkewMatrix.from_array(np.array([[0.0, 1.0 + 5e-13], [-1.0, 0.0]]))
    assert np.array_equal(m.entries, -m.entries.T)
    assert np.all(np.diag(m.entries) == 0.0)


def test_basic_rotation_block():
    cf = canonical_form(SkewMatrix.from_array(rotation_block(1.0)))
    assert cf.block_count == 1
    assert cf.alphas[0] == pytest.approx(1.0, abs=1e-14)
    assert cf.alpha == pytest.approx(1.0, abs=1e-14)
    assert cf.beta == pytest.approx(1.0, abs=1e-14)


def test_zero_matrix_convention():
    cf = canonical_form(SkewMatrix.zero(5))
    assert cf.block_count == 0
    assert cf.alpha == 0.0
    assert cf.beta == 0.0
    assert spectral_gap(SkewMatrix.zero(5)) == 0.0


def test_doubled_block_spectrum():
    # [[J, -I], [I, 0]] at theta = 1: block magnitudes are the roots'
    # imaginary parts (sqrt(5) +- 1)/2, summing to sqrt(5)
    blk = np.block([[rotation_block(1.0), -np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
    theta = SkewMatrix.from_array(blk)
    cf = canonical_form(theta)
    # oracle: generic eigensolver on the raw matrix
    ev = np.linalg.eigvals(blk)
    pos = np.sort(ev.imag[ev.imag > 1e-10])[::-1]
    assert np.allclose(cf.alphas, pos, atol=1e-12)
    assert cf.alphas == pytest.approx([(SQRT5 + 1) / 2, (SQRT5 - 1) / 2], abs=1e-12)
    assert cf.alpha == pytest.approx(SQRT5, abs=1e-12)
    assert cf.reconstruction_residual(theta) < 1e-10


def test_gap_sums_block_magnitudes():
    theta = SkewMatrix.from_array(block_diagonal([2.0, 3.0], 4))
    assert spectral_gap(theta) == pytest.approx(5.0, abs=1e-12)


def test_alphas_match_generic_eigenvalues():
    rng = np.random.default_rng(5)
    for n in (2, 3, 5, 8, 11, 16):
        theta = random_skew(rng, n)
        cf = canonical_form(theta)
        ev = np.linalg.eigvals(theta.entries)
        pos = np.sort(ev.imag[ev.imag > 1e-10])[::-1]
        assert len(cf.alphas) == len(pos)
        assert np.max(np.abs(cf.alphas - pos)) < 1e-9 if len(pos) else True


def test_orthogonal_conjugation_invariance():
    rng = np.random.default_rng(6)
    for n in (4, 7):
        theta = random_skew(rng, n)
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        conj = SkewMatrix.from_array(q.T @ theta.entries @ q)
        a1 = canonical_form(theta).alphas
        a2 = canonical_form(conj).alphas
        assert np.max(np.abs(a1 - a2)) < 1e-9


def test_reconstruction_on_random_inputs():
    rng = np.random.default_rng(7)
    for n in (3, 6, 9, 12):
        theta = random_skew(rng, n)
        cf = canonical_form(theta)
        assert cf.reconstruction_residual(theta) < 1e-10
        o = cf.O
        assert np.max(np.abs(o @ o.T - np.eye(n))) < 1e-10


def test_degenerate_blocks_reconstruct():
    # equal magnitudes: the basis is non-unique, invariants must still hold
    theta = SkewMatrix.from_array(block_diagonal([2.0, 2.0, 2.0], 6))
    rng = np.random.default_rng(8)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    scrambled = SkewMatrix.from_array(q.T @ theta.entries @ q)
    cf = canonical_form(scrambled)
    assert np.allclose(cf.alphas, [2.0, 2.0, 2.0], atol=1e-10)
    assert cf.reconstruction_residual(scrambled) < 1e-10
