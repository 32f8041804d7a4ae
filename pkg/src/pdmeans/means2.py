"""Two-variable weighted geometric mean and the scalar constants that the
operator inequalities are stated with: the Kantorovich constant, the Specht
ratio, its generalized-power form, and the Ky Fan-Furuta bound.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import DimensionMismatch, ParameterOutOfRange
from .matfun import SpdMatrix, validate_spd

__all__ = [
    "ScalarBounds",
    "spectral_bounds",
    "geo_mean2",
    "kantorovich",
    "specht",
    "gen_kantorovich",
    "furuta_bound",
]


@dataclass(frozen=True)
class ScalarBounds:
    """Scalar spectral bounds 0 < m <= M with condition ratio h = M/m."""

    m: float
    M: float

    def __post_init__(self):
        if not (0.0 < self.m <= self.M) or not math.isfinite(self.M):
            raise ParameterOutOfRange(f"need 0 < m <= M, got ({self.m}, {self.M})")

    @property
    def h(self) -> float:
        return self.M / self.m


def spectral_bounds(operands) -> ScalarBounds:
    """Tightest common scalar bounds m <= A_i <= M for a family of SPD matrices."""
    ms = [float(a.eigenvalues[0]) for a in operands]
    Ms = [float(a.eigenvalues[-1]) for a in operands]
    return ScalarBounds(min(ms), max(Ms))


def geo_mean2(
    a: SpdMatrix, b: SpdMatrix, t: float, tol: ToleranceConfig = DEFAULT_TOL
) -> SpdMatrix:
    """t-weighted geometric mean A^(1/2) (A^(-1/2) B A^(-1/2))^t A^(1/2).

    The geodesic from A (t=0) to B (t=1) for the trace metric; its midpoint
    t=1/2 is the two-variable geometric mean, the unique positive solution
    of X A^(-1) X = B.

    Parameters
    ----------
    a, b : SpdMatrix of equal dimension
    t : float in [0, 1]

    Raises
    ------
    DimensionMismatch, ParameterOutOfRange
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim} differ")
    if not (0.0 <= t <= 1.0):
        raise ParameterOutOfRange(f"t must lie in [0, 1], got {t}")
    return validate_spd(_kernels.geo2(a.entries, b.entries, float(t)), tol)


def kantorovich(bounds: ScalarBounds) -> float:
    """Kantorovich constant (m+M)^2 / (4mM); equals 1 iff m = M."""
    m, M = bounds.m, bounds.M
    return (m + M) ** 2 / (4.0 * m * M)


# Below 1 + 1e-6 the closed form for the Specht ratio loses all significant
# digits to 0/0 cancellation; the quadratic Taylor term takes over there.
_SPECHT_TAYLOR_CUT = 1e-6


def specht(h: float) -> float:
    """Specht ratio S(h) = (h-1) h^(1/(h-1)) / (e log h), with S(1) = 1.

    The optimal factor in the scalar reverse arithmetic-geometric mean
    inequality for values confined to [m, M] with h = M/m.

    Raises
    ------
    ParameterOutOfRange
        If h < 1.
    """
    if not (h >= 1.0) or not math.isfinite(h):
        raise ParameterOutOfRange(f"Specht ratio needs h >= 1, got {h}")
    x = h - 1.0
    if x == 0.0:
        return 1.0
    if x < _SPECHT_TAYLOR_CUT:
        return 1.0 + x * x / 8.0
    return x * h ** (1.0 / x) / (math.e * math.log(h))


def gen_kantorovich(bounds: ScalarBounds, p: float) -> float:
    """Generalized Kantorovich constant K(m, M, p) for p >= 1.

    K(m, M, p) = ((p-1)^(p-1) / p^p) * (M^p - m^p)^p
                 / ((M - m) (m M^p - M m^p)^(p-1)),
    with the limit conventions K(m, M, 1) = 1 and K(m, m, p) = 1. For p = 2
    this reduces to the Kantorovich constant (m+M)^2 / (4mM).
    """
    if p < 1.0:
        raise ParameterOutOfRange(f"generalized Kantorovich needs p >= 1, got {p}")
    m, M = bounds.m, bounds.M
    # Analytic limits; the closed form would evaluate 0^0 or 0/0 there.
    if p == 1.0 or M / m - 1.0 <= 1e-8:
        return 1.0
    lead = (p - 1.0) ** (p - 1.0) / p ** p
    return lead * (M ** p - m ** p) ** p / ((M - m) * (m * M ** p - M * m ** p) ** (p - 1.0))


def furuta_bound(bounds: ScalarBounds, p: float) -> float:
    """Ky Fan-Furuta constant (M/m)^(p-1); dominates K(m, M, p) for p >= 1."""
    if p < 1.0:
        raise ParameterOutOfRange(f"Ky Fan-Furuta bound needs p >= 1, got {p}")
    return bounds.h ** (p - 1.0)


def _riccati_residual(x: SpdMatrix, a: SpdMatrix, b: SpdMatrix) -> float:
    """Relative residual of X A^(-1) X = B; zero for the geometric mean."""
    ainv = _kernels.sym_pow(a.entries, -1.0)
    r = x.entries @ ainv @ x.entries - b.entries
    return float(np.linalg.norm(r, "fro") / np.linalg.norm(b.entries, "fro"))
