"""n-variable means of positive definite matrices.

Four families live here:

* the inductive arithmetic/geometric/harmonic means obtained by repeatedly
  replacing each operand with the (n-1)-variable mean of the others, with
  the induced weights extracted from the scalar form of the recursion;
* the order-t power means, solved as the fixed point of
  X -> sum_i w_i (X #_t A_i), a strict Thompson-metric contraction;
* the Karcher (Riemannian barycenter) mean, solved from its gradient
  equation sum_i w_i log(X^(-1/2) A_i X^(-1/2)) = 0 by a damped
  exponential-map iteration;
* the chaotic geometric mean exp(sum_i w_i log A_i), the commuting-case
  surrogate, which also serves as the Karcher initializer.

All solvers report an :class:`IterationTrace` and raise
:class:`~pdmeans.errors.NoConvergence` when the iteration cap is hit.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import DEFAULT_TOL, ToleranceConfig
from .errors import (
    DimensionMismatch,
    NoConvergence,
    ParameterOutOfRange,
    ZeroOrder,
)
from .matfun import SpdMatrix, validate_spd

__all__ = [
    "WeightVector",
    "MeanProblem",
    "IterationTrace",
    "weighted_arithmetic",
    "weighted_harmonic",
    "lawson_lim_weights",
    "lawson_lim_geometric",
    "power_mean",
    "karcher_mean",
    "karcher_residual",
    "chaotic_geometric_mean",
]

# Exact recursion into the (n-1)-variable mean grows factorially; past six
# operands a single evaluation stops being desk-scale.
MAX_GEOMETRIC_OPERANDS = 6

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WeightVector:
    """A probability vector of n >= 2 nonnegative weights summing to 1."""

    n: int
    w: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, WeightVector)
            and self.n == other.n
            and np.array_equal(self.w, other.w)
        )

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] != self.n or self.n < 2:
            raise ParameterOutOfRange(f"need n >= 2 weights, got shape {w.shape}")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ParameterOutOfRange("weights must be finite and nonnegative")
        if abs(float(w.sum()) - 1.0) > _WEIGHT_SUM_TOL:
            raise ParameterOutOfRange(f"weights sum to {w.sum():.17g}, not 1")
        w = np.ascontiguousarray(w)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(n, np.full(n, 1.0 / n))

    @classmethod
    def of(cls, values) -> "WeightVector":
        values = np.asarray(values, dtype=np.float64)
        return cls(int(values.shape[0]), values)

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.w > 0.0))


@dataclass(frozen=True)
class IterationTrace:
    """Outcome of one iterative solve.

    ``final_residual`` is the Thompson-metric step size for the fixed-point
    solvers and the gradient Frobenius norm for the Karcher solver.
    """

    iterations: int
    final_residual: float
    converged: bool


@dataclass(frozen=True)
class MeanProblem:
    """A bundled, validated mean computation: operands, weights, order."""

    operands: tuple
    weights: WeightVector
    order_t: float
    tol: ToleranceConfig = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(self.operands))
        if len(self.operands) != self.weights.n:
            raise DimensionMismatch(
                f"{len(self.operands)} operands for {self.weights.n} weights"
            )
        _common_dim(self.operands)
        if not (-1.0 <= self.order_t <= 1.0):
            raise ParameterOutOfRange(f"order t={self.order_t} outside [-1, 1]")


def _common_dim(operands) -> int:
    if len(operands) < 2:
        raise ParameterOutOfRange("need at least two operands")
    d = operands[0].dim
    for i, a in enumerate(operands):
        if a.dim != d:
            raise DimensionMismatch(f"operand {i} has dim {a.dim}, expected {d}")
    return d


def _stack(operands) -> np.ndarray:
    return np.stack([a.entries for a in operands])


def _require_positive_weights(weights: WeightVector):
    if not weights.strictly_positive:
        raise ParameterOutOfRange(
            "iterative mean solvers need strictly positive weights"
        )


def weighted_arithmetic(
    weights: WeightVector, operands, tol: ToleranceConfig = DEFAULT_TOL
) -> SpdMatrix:
    """Weighted arithmetic mean sum_i w_i A_i."""
    _check_family(weights, operands)
    acc = np.einsum("i,ijk->jk", weights.w, _stack(operands))
    return validate_spd(acc, tol)


def weighted_harmonic(
    weights: WeightVector, operands, tol: ToleranceConfig = DEFAULT_TOL
) -> SpdMatrix:
    """Weighted harmonic mean (sum_i w_i A_i^(-1))^(-1)."""
    _check_family(weights, operands)
    inv = np.stack([_kernels.sym_pow(a.entries, -1.0) for a in operands])
    acc = np.einsum("i,ijk->jk", weights.w, inv)
    return validate_spd(_kernels.sym_pow(0.5 * (acc + acc.T), -1.0), tol)


def _check_family(weights: WeightVector, operands):
    if len(operands) != weights.n:
        raise DimensionMismatch(
            f"{len(operands)} operands for {weights.n} weights"
        )
    _common_dim(operands)


_weights_cache: dict = {}


def lawson_lim_weights(
    n: int, t: float, tol: ToleranceConfig = DEFAULT_TOL
) -> WeightVector:
    """Weights t[n]_i induced by the inductive arithmetic-mean recursion.

    Running the recursion on the coordinate vectors e_1, ..., e_n tracks the
    coefficient of each original operand; all rows converge to the common
    limit (t[n]_1, ..., t[n]_n), which depends on n and t only. For n = 2
    the weights are (1-t, t) exactly.

    Raises
    ------
    NoConvergence
        If the coefficient iteration fails to settle (it contracts
        geometrically, so this indicates a far-too-tight tolerance).
    """
    if n < 2:
        raise ParameterOutOfRange(f"need n >= 2, got {n}")
    if not (0.0 < t < 1.0):
        raise ParameterOutOfRange(f"t must lie in (0, 1), got {t}")
    key = (n, float(t), tol.fixed_point_tol)
    hit = _weights_cache.get(key)
    if hit is not None:
        return hit
    if n == 2:
        out = WeightVector.of(np.array([1.0 - t, t]))
    else:
        sub = lawson_lim_weights(n - 1, t, tol).w
        coeff = np.eye(n)
        converged = False
        for _ in range(tol.max_iterations):
            nxt = np.empty_like(coeff)
            for i in range(n):
                others = np.delete(coeff, i, axis=0)
                nxt[i] = sub @ others
            delta = float(np.max(np.abs(nxt - coeff)))
            coeff = nxt
            if delta <= tol.fixed_point_tol:
                converged = True
                break
        if not converged:
            raise NoConvergence(
                f"weight recursion for n={n}, t={t} did not settle",
                iterations=tol.max_iterations,
                residual=delta,
            )
        limit = coeff.mean(axis=0)
        out = WeightVector.of(limit / limit.sum())
    _weights_cache[key] = out
    return out


_LAWSON_LEVELS = {
    3: _kernels.lawson_geo_3,
    4: _kernels.lawson_geo_4,
    5: _kernels.lawson_geo_5,
    6: _kernels.lawson_geo_6,
}


def lawson_lim_geometric(
    operands, t: float, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[SpdMatrix, IterationTrace]:
    """Inductive n-variable weighted geometric mean.

    For n = 2 this is the geodesic mean A_1 #_t A_2 directly. For n >= 3
    each operand is replaced by the (n-1)-variable mean of the others until
    both the per-round movement and the pairwise spread drop below
    ``tol.fixed_point_tol`` in the Thompson metric; the first operand's
    limit is returned. The t = 1/2 case is the classical recursive
    geometric mean of n matrices.
    """
    d = _common_dim(operands)
    n = len(operands)
    if not (0.0 < t < 1.0):
        raise ParameterOutOfRange(f"t must lie in (0, 1), got {t}")
    if n > MAX_GEOMETRIC_OPERANDS:
        raise ParameterOutOfRange(
            f"geometric recursion supports n <= {MAX_GEOMETRIC_OPERANDS}, got {n}"
        )
    if n == 2:
        g = _kernels.geo2(operands[0].entries, operands[1].entries, float(t))
        return validate_spd(g, tol), IterationTrace(0, 0.0, True)
    raw, rounds, step, ok = _LAWSON_LEVELS[n](
        _stack(operands), float(t), tol.fixed_point_tol, tol.max_iterations
    )
    if not ok:
        raise NoConvergence(
            f"geometric recursion (n={n}, d={d}, t={t}) hit the iteration cap",
            iterations=rounds,
            residual=step,
        )
    return validate_spd(raw, tol), IterationTrace(int(rounds), float(step), True)


def _power_mean_cap(t: float, tol: ToleranceConfig) -> int:
    # The fixed-point map contracts like (1 - t); small orders need the cap
    # scaled by 1/t to reach a given Thompson step size.
    needed = int(math.ceil((10.0 + math.log(1.0 / tol.fixed_point_tol)) / abs(t)))
    return max(tol.max_iterations, needed)


def power_mean(
    weights: WeightVector, operands, t: float, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[SpdMatrix, IterationTrace]:
    """Order-t power mean, the unique SPD solution of X = sum_i w_i (X #_t A_i).

    For t in (0, 1] the defining fixed point is iterated from the weighted
    arithmetic mean. For t in [-1, 0) the dual route is used:
    P_t(w; A) = P_{-t}(w; A^(-1))^(-1). The order t = 0 is rejected; its
    limit is the Karcher mean.

    Raises
    ------
    ZeroOrder, ParameterOutOfRange, NoConvergence
    """
    _check_family(weights, operands)
    _require_positive_weights(weights)
    if t == 0.0:
        raise ZeroOrder("t = 0 is the Karcher mean; call karcher_mean instead")
    if not (-1.0 <= t <= 1.0):
        raise ParameterOutOfRange(f"order t={t} outside [-1, 1]")
    if t < 0.0:
        inv_ops = [matrix_inverse(a, tol) for a in operands]
        dual, trace = power_mean(weights, inv_ops, -t, tol)
        return matrix_inverse(dual, tol), trace
    stack = _stack(operands)
    x0 = np.einsum("i,ijk->jk", weights.w, stack)
    raw, iters, step, ok = _kernels.power_mean_iter(
        stack, weights.w, float(t), x0, tol.fixed_point_tol, _power_mean_cap(t, tol)
    )
    if not ok:
        raise NoConvergence(
            f"power mean (t={t}) did not reach step {tol.fixed_point_tol:.1e}",
            iterations=iters,
            residual=step,
        )
    return validate_spd(raw, tol), IterationTrace(int(iters), float(step), True)


def matrix_inverse(a: SpdMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> SpdMatrix:
    """Inverse via the spectral cache; convenience for the dual routes."""
    lam, vec = a.eigenvalues, a.eigenvectors
    return validate_spd((vec / lam) @ vec.T, tol)


def chaotic_geometric_mean(
    weights: WeightVector, operands, tol: ToleranceConfig = DEFAULT_TOL
) -> SpdMatrix:
    """Chaotic geometric mean exp(sum_i w_i log A_i)."""
    _check_family(weights, operands)
    logs = np.stack([_kernels.sym_log(a.entries) for a in operands])
    acc = np.einsum("i,ijk->jk", weights.w, logs)
    return validate_spd(_kernels.sym_exp(0.5 * (acc + acc.T)), tol)


def karcher_residual(x: SpdMatrix, weights: WeightVector, operands) -> float:
    """Frobenius norm of sum_i w_i log(X^(-1/2) A_i X^(-1/2)).

    Zero exactly at the Karcher mean.
    """
    _check_family(weights, operands)
    if x.dim != operands[0].dim:
        raise DimensionMismatch(f"X has dim {x.dim}, operands {operands[0].dim}")
    _, res = _kernels.karcher_gradient(x.entries, _stack(operands), weights.w)
    return float(res)


def karcher_mean(
    weights: WeightVector, operands, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[SpdMatrix, IterationTrace]:
    """Karcher mean: the unique SPD zero of the weighted log-gradient.

    Damped fixed-point iteration X -> X^(1/2) exp(theta * S(X)) X^(1/2)
    started from the chaotic geometric mean, with theta halved whenever the
    residual would increase. For two operands it coincides with the
    weighted geodesic mean A_1 #_{w_2} A_2.
    """
    _check_family(weights, operands)
    _require_positive_weights(weights)
    x0 = chaotic_geometric_mean(weights, operands, tol)
    raw, iters, res, ok = _kernels.karcher_iter(
        _stack(operands), weights.w, x0.entries, tol.fixed_point_tol, tol.max_iterations
    )
    if not ok:
        raise NoConvergence(
            f"Karcher iteration did not reach residual {tol.fixed_point_tol:.1e}",
            iterations=iters,
            residual=res,
        )
    return validate_spd(raw, tol), IterationTrace(int(iters), float(res), True)
