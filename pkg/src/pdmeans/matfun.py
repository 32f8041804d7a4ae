"""Dense symmetric linear algebra: validated matrix types, spectral
functional calculus, order predicates, the Thompson metric, and unitarily
invariant norms.

Every operation is a pure function over immutable values. Matrices are
real symmetric; positive definite inputs are wrapped in :class:`SpdMatrix`,
indefinite symmetric ones in :class:`SymMatrix`. Both carry their spectral
decomposition so repeated functional-calculus calls cost one matmul, not
one eigensolve.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import (
    DimensionMismatch,
    InvalidNormParameter,
    NoConvergence,
    NonFinite,
    NotPositiveDefinite,
    NotSymmetric,
)

__all__ = [
    "SpdMatrix",
    "SymMatrix",
    "NormKind",
    "validate_spd",
    "validate_sym",
    "eigh",
    "matrix_power",
    "matrix_log",
    "matrix_exp",
    "loewner_leq",
    "thompson_distance",
    "norm",
]


def _as_square_array(entries):
    a = np.asarray(entries, dtype=np.float64)
    if a.ndim == 1 and a.size == 1:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def _check_finite(a):
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix contains NaN or infinite entries")


def _check_symmetric(a, sym_tol):
    scale = max(1.0, float(np.linalg.norm(a, "fro")))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > sym_tol * scale:
        raise NotSymmetric(
            f"asymmetry {asym:.3e} exceeds {sym_tol:.1e} * max(1, ||A||_F)"
        )


def _jacobi(a):
    lam, vec, ok = _kernels.jacobi_eigh(a)
    if not ok:
        raise NoConvergence(
            f"Jacobi eigensolver did not converge in {_kernels.JACOBI_MAX_SWEEPS} sweeps"
        )
    return lam, vec


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymMatrix:
    """A validated real symmetric matrix with cached spectral data."""

    dim: int
    entries: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, type(self)) and np.array_equal(
            self.entries, other.entries
        )


@dataclass(frozen=True)
class SpdMatrix(SymMatrix):
    """A validated symmetric positive definite matrix.

    Eigenvalues are sorted ascending, eigenvectors are the corresponding
    orthonormal columns. Instances are immutable; the entry array is
    write-protected.
    """


def _spectral_checks(a, lam, vec, recon_tol):
    scale = max(1.0, float(np.linalg.norm(a, "fro")))
    recon = (vec * lam) @ vec.T
    if float(np.linalg.norm(recon - a, "fro")) > recon_tol * scale:
        raise NoConvergence("spectral reconstruction residual exceeds recon_tol")
    d = a.shape[0]
    if float(np.linalg.norm(vec.T @ vec - np.eye(d), "fro")) > recon_tol:
        raise NoConvergence("eigenvector orthonormality residual exceeds recon_tol")


def validate_sym(entries, tol: ToleranceConfig = DEFAULT_TOL) -> SymMatrix:
    """Validate a real symmetric matrix and attach its spectral data.

    Parameters
    ----------
    entries : array-like, shape (d, d)
    tol : ToleranceConfig

    Raises
    ------
    NonFinite, NotSymmetric, DimensionMismatch
    """
    a = _as_square_array(entries)
    _check_finite(a)
    _check_symmetric(a, tol.sym_tol)
    a = 0.5 * (a + a.T)
    lam, vec = _jacobi(a)
    _spectral_checks(a, lam, vec, tol.recon_tol)
    return SymMatrix(int(a.shape[0]), _freeze(a), _freeze(lam), _freeze(vec))


def validate_spd(entries, tol: ToleranceConfig = DEFAULT_TOL) -> SpdMatrix:
    """Validate a symmetric positive definite matrix.

    Parameters
    ----------
    entries : array-like, shape (d, d)
    tol : ToleranceConfig

    Returns
    -------
    SpdMatrix
        With populated spectral cache; min eigenvalue > ``tol.spd_tol``.

    Raises
    ------
    NonFinite, NotSymmetric, NotPositiveDefinite, DimensionMismatch
    """
    s = validate_sym(entries, tol)
    if s.eigenvalues[0] <= tol.spd_tol:
        raise NotPositiveDefinite(
            f"minimal eigenvalue {s.eigenvalues[0]:.6e} <= spd_tol {tol.spd_tol:.1e}"
        )
    return SpdMatrix(s.dim, s.entries, s.eigenvalues, s.eigenvectors)


def _wrap_spd(raw, tol: ToleranceConfig) -> SpdMatrix:
    """Symmetrize a computed result and re-validate it as SPD."""
    return validate_spd(0.5 * (raw + raw.T), tol)


def eigh(a: SymMatrix):
    """Return (eigenvalues ascending, orthonormal eigenvectors).

    Deterministic: identical input yields bit-identical output. The cached
    decomposition computed at validation time is returned directly.
    """
    return a.eigenvalues, a.eigenvectors


def matrix_power(a: SpdMatrix, s: float, tol: ToleranceConfig = DEFAULT_TOL) -> SpdMatrix:
    """A^s = Q diag(lam^s) Q^T for real s.

    Covers square roots, inverses and fractional powers in one place.
    """
    if not np.isfinite(s):
        raise NonFinite("exponent must be finite")
    lam, vec = eigh(a)
    return _wrap_spd((vec * lam ** float(s)) @ vec.T, tol)


def matrix_log(a: SpdMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> SymMatrix:
    """Principal logarithm of an SPD matrix (a symmetric matrix)."""
    lam, vec = eigh(a)
    return validate_sym((vec * np.log(lam)) @ vec.T, tol)


def matrix_exp(s: SymMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> SpdMatrix:
    """Exponential of a symmetric matrix (an SPD matrix)."""
    lam, vec = eigh(s)
    return _wrap_spd((vec * np.exp(lam)) @ vec.T, tol)


def loewner_leq(a: SymMatrix, b: SymMatrix, margin_tol: float = DEFAULT_TOL.margin_tol):
    """Test A <= B in the Loewner order.

    Parameters
    ----------
    a, b : SymMatrix or SpdMatrix of equal dimension
    margin_tol : float
        Negative margins above ``-margin_tol`` still count as holding.

    Returns
    -------
    (holds, margin) : (bool, float)
        ``margin`` is the minimal eigenvalue of B - A.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim} differ")
    lam, _ = _jacobi(b.entries - a.entries)
    margin = float(lam[0])
    return margin >= -margin_tol, margin


def thompson_distance(a: SpdMatrix, b: SpdMatrix) -> float:
    """Thompson metric d(A, B) = || log(A^(-1/2) B A^(-1/2)) ||_op.

    Symmetric in its arguments and zero exactly when A = B.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim} differ")
    return float(_kernels.thompson(a.entries, b.entries))


_SIMPLE_TAGS = ("operator", "frobenius", "trace")


@dataclass(frozen=True)
class NormKind:
    """A unitarily invariant norm selector.

    Use the factory classmethods: ``NormKind.operator()``,
    ``NormKind.frobenius()``, ``NormKind.trace()``, ``NormKind.schatten(p)``,
    ``NormKind.ky_fan(k)``.
    """

    tag: str
    p: float | None = None
    k: int | None = None

    def __post_init__(self):
        if self.tag in _SIMPLE_TAGS:
            return
        if self.tag == "schatten":
            if self.p is None or self.p < 1.0:
                raise InvalidNormParameter(f"schatten p must be >= 1, got {self.p}")
        elif self.tag == "ky_fan":
            if self.k is None or self.k < 1:
                raise InvalidNormParameter(f"ky_fan k must be >= 1, got {self.k}")
        else:
            raise InvalidNormParameter(f"unknown norm tag {self.tag!r}")

    @classmethod
    def operator(cls):
        return cls("operator")

    @classmethod
    def frobenius(cls):
        return cls("frobenius")

    @classmethod
    def trace(cls):
        return cls("trace")

    @classmethod
    def schatten(cls, p: float):
        return cls("schatten", p=float(p))

    @classmethod
    def ky_fan(cls, k: int):
        return cls("ky_fan", k=int(k))


def _singular_values(a) -> np.ndarray:
    """Singular values, descending.

    Symmetric inputs use |eigenvalues|; a raw ndarray (possibly a
    nonsymmetric product) goes through the spectral decomposition of its
    Gram matrix.
    """
    if isinstance(a, SymMatrix):
        return np.sort(np.abs(a.eigenvalues))[::-1]
    m = _as_square_array(a)
    _check_finite(m)
    lam, _ = _jacobi(0.5 * ((m.T @ m) + (m.T @ m).T))
    return np.sqrt(np.maximum(lam, 0.0))[::-1]


def norm(a, kind: NormKind) -> float:
    """Evaluate a unitarily invariant norm.

    Parameters
    ----------
    a : SymMatrix, SpdMatrix, or array-like square matrix
    kind : NormKind

    Raises
    ------
    InvalidNormParameter
        If a Ky Fan order exceeds the matrix dimension.
    """
    sv = _singular_values(a)
    d = sv.shape[0]
    if kind.tag == "operator":
        return float(sv[0])
    if kind.tag == "frobenius":
        return float(np.sqrt(np.sum(sv * sv)))
    if kind.tag == "trace":
        return float(np.sum(sv))
    if kind.tag == "schatten":
        return float(np.sum(sv ** kind.p) ** (1.0 / kind.p))
    if kind.k > d:
        raise InvalidNormParameter(f"ky_fan k={kind.k} exceeds dimension {d}")
    return float(np.sum(sv[: kind.k]))
