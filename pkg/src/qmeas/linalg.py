"""Small dense Hermitian linear algebra.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``. The
``as_*`` helpers validate and return a fresh read-only copy so that
validated values can be shared freely.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import DimensionError, ValidationError

TOL_HERM = 1e-12
TOL_PSD = 1e-10
TOL_TRACE = 1e-10
TOL_RECON = 1e-9
TOL_ORTHO = 1e-10
TOL_IMAG = 1e-10


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def as_matrix(m, name="operator"):
    """Return `m` as a finite square complex matrix."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"{name}: expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name}: entries must be finite")
    return _frozen(a)


def hermiticity_residual(m):
    """Max absolute entry of ``m - m^dagger``."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def as_hermitian(m, name="operator", tol=TOL_HERM):
    """Validate that `m` is Hermitian within `tol` (max entry deviation)."""
    a = as_matrix(m, name)
    res = hermiticity_residual(a)
    if res > tol:
        raise ValidationError(f"{name}: not Hermitian (max |A - A^dagger| = {res:.3e})")
    return a


def min_eigenvalue(m):
    return float(np.linalg.eigvalsh(np.asarray(m))[0])


def as_density(rho, name="rho"):
    """Validate a density operator: Hermitian, PSD, unit trace."""
    a = as_hermitian(rho, name)
    lo = min_eigenvalue(a)
    if lo < -TOL_PSD:
        raise ValidationError(f"{name}: not positive semidefinite (min eigenvalue {lo:.3e})")
    tr = np.trace(a).real
    if abs(tr - 1.0) > TOL_TRACE:
        raise ValidationError(f"{name}: trace is {tr!r}, expected 1")
    return a


def pure_state(psi):
    """Density operator ``|psi><psi|`` for a (not necessarily normalized) vector."""
    v = np.asarray(psi, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return _frozen(np.outer(v, v.conj()))


def check_same_dim(*ops):
    dims = {np.shape(op) for op in ops}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")


class SpectralDecomposition(NamedTuple):
    """Ascending eigenvalues and matching orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(op):
    """Spectral decomposition of a Hermitian operator.

    Backed by LAPACK (``numpy.linalg.eigh``). Each eigenvector is rotated
    so that its largest-modulus component (first one on ties) is real and
    positive, which makes the output independent of the solver's phase
    choices. Within a degenerate eigenspace the basis is arbitrary.

    Examples
    --------
    >>> s = eigh(np.diag([1.0, -1.0]))
    >>> s.eigenvalues
    array([-1.,  1.])
    """
    a = as_hermitian(op)
    # exact Hermitian part; removes sub-tolerance asymmetry before LAPACK reads one triangle
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    v = v * (np.abs(pivots) / pivots)
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def commutator(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return a @ b - b @ a


def is_projector(p, tol=TOL_RECON):
    p = np.asarray(p)
    return float(np.max(np.abs(p @ p - p))) < tol


def rank(op, tol=1e-8):
    """Number of eigenvalues of a PSD operator above `tol`."""
    return int(np.sum(np.linalg.eigvalsh(np.asarray(op)) > tol))


def expectation(rho, op):
    """``Tr(rho op)`` as a real number.

    Raises if the imaginary part exceeds ``TOL_IMAG`` (which would mean
    one of the operands is not Hermitian).
    """
    rho = np.asarray(rho)
    op = np.asarray(op)
    check_same_dim(rho, op)
    val = np.einsum("ij,ji->", rho, op)
    if abs(val.imag) > TOL_IMAG:
        raise ValidationError(f"Tr(rho op) has imaginary part {val.imag:.3e}")
    return float(val.real)


def variance(rho, op):
    """``<op^2> - <op>^2``, clipped at zero against roundoff."""
    op = np.asarray(op)
    m = expectation(rho, op)
    return max(expectation(rho, op @ op) - m * m, 0.0)


class HKRReport(NamedTuple):
    deltaA: float
    deltaB: float
    bound: float
    satisfied: bool


def hkr_report(rho, A, B, slack=1e-10):
    """Check ``dA dB >= |<[A, B]>| / 2`` for a state and two observables."""
    rho = as_density(rho)
    A = as_hermitian(A, "A")
    B = as_hermitian(B, "B")
    check_same_dim(rho, A, B)
    da = np.sqrt(variance(rho, A))
    db = np.sqrt(variance(rho, B))
    # <[A,B]> is purely imaginary for Hermitian A, B; take the modulus of the full trace
    c = np.einsum("ij,ji->", rho, commutator(A, B))
    bound = 0.5 * abs(c)
    return HKRReport(float(da), float(db), float(bound), bool(da * db >= bound - slack))
