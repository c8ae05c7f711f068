"""Canonical 2x2-block decomposition of real skew-symmetric matrices.

A real skew-symmetric Theta is orthogonally similar to a block diagonal
matrix J with blocks [[0, a_j], [-a_j, 0]] (a_j > 0) and a trailing zero
block: Theta = O^T J O.  The derived constants are alpha = sum(a_j)
(the spectral gap of the associated sum-of-squares operator) and
beta = min(a_j).
"""

from dataclasses import dataclass

import numpy as np

SKEW_ATOL = 1e-12      # asymmetry tolerance at construction
ZERO_EIG_TOL = 1e-10   # |eigenvalue| below this counts as the zero block


class SkewSymmetryError(ValueError):
    pass


class DecompositionError(RuntimeError):
    """Eigensolver failed; input is numerically degenerate."""


@dataclass(frozen=True)
class SkewMatrix:
    """Real skew-symmetric matrix, exactly antisymmetric after construction."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_array(cls, a, atol: float = SKEW_ATOL) -> "SkewMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise SkewSymmetryError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise SkewSymmetryError("matrix contains non-finite entries")
        if np.max(np.abs(a + a.T)) > atol:
            raise SkewSymmetryError(
                f"matrix is not skew-symmetric within {atol:g}: "
                f"max |A + A^T| = {np.max(np.abs(a + a.T)):.3e}"
            )
        sym = (a - a.T) / 2.0  # exact antisymmetry, exact zero diagonal
        np.fill_diagonal(sym, 0.0)
        sym.setflags(write=False)
        return cls(sym)

    @classmethod
    def zero(cls, n: int) -> "SkewMatrix":
        return cls.from_array(np.zeros((n, n)))


def rotation_block(a: float) -> np.ndarray:
    """The 2x2 block [[0, a], [-a, 0]]."""
    return np.array([[0.0, a], [-a, 0.0]])


def rotation_generator() -> np.ndarray:
    """rotation_block(1), the basic 2x2 skew matrix."""
    return rotation_block(1.0)


def block_diagonal(alphas, n: int) -> np.ndarray:
    """Block diagonal J from block magnitudes, zero-padded to size n."""
    j = np.zeros((n, n))
    for i, a in enumerate(alphas):
        j[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = rotation_block(a)
    return j


@dataclass(frozen=True)
class CanonicalForm:
    """Orthogonal O and block data with Theta = O^T J O, alphas descending."""

    O: np.ndarray
    alphas: np.ndarray
    dim: int

    @property
    def block_count(self) -> int:
        return len(self.alphas)

    @property
    def alpha(self) -> float:
        """Sum of block magnitudes; 0 for the zero matrix."""
        return float(np.sum(self.alphas))

    @property
    def beta(self) -> float:
        """Smallest block magnitude; 0 when there are no blocks."""
        return float(np.min(self.alphas)) if self.block_count else 0.0

    @property
    def J(self) -> np.ndarray:
        return block_diagonal(self.alphas, self.dim)

    def reconstruct(self) -> np.ndarray:
        return self.O.T @ self.J @ self.O

    def reconstruction_residual(self, theta: SkewMatrix) -> float:
        return float(np.max(np.abs(self.reconstruct() - theta.entries)))


def canonical_form(theta: SkewMatrix, zero_tol: float = ZERO_EIG_TOL) -> CanonicalForm:
    """Decompose Theta = O^T J O with J block diagonal.

    Works on the Hermitian matrix i*Theta: its eigenpairs come in (+a, v),
    (-a, conj v) pairs, and sqrt(2)*Re v, sqrt(2)*Im v span the invariant
    2-plane of the block.  Repeated magnitudes are fine: eigh returns an
    orthonormal eigenbasis and the real/imaginary parts of distinct
    eigenvectors are automatically orthogonal.
    """
    n = theta.dim
    herm = 1j * theta.entries
    try:
        vals, vecs = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigensolver did not converge: {exc}") from exc

    pos = vals > zero_tol
    order = np.argsort(vals[pos])[::-1]  # descending magnitudes
    alphas = vals[pos][order]
    rows = []
    for v in vecs[:, pos][:, order].T:
        e = np.sqrt(2.0) * v.real
        f = np.sqrt(2.0) * v.imag
        # rows (f, e) place +a in the upper-right corner of the block
        rows.append(f)
        rows.append(e)

    if rows:
        o = np.array(rows)
        if 2 * len(alphas) < n:
            import scipy.linalg

            null = scipy.linalg.null_space(o).T  # orthonormal kernel rows
            o = np.vstack([o, null])
    else:
        o = np.eye(n)
    return CanonicalForm(O=o, alphas=np.asarray(alphas, dtype=float), dim=n)


def spectral_gap(theta: SkewMatrix) -> float:
    """alpha = sum of block magnitudes of the canonical form."""
    return canonical_form(theta).alpha
