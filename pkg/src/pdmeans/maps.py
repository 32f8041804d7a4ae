"""A gallery of concrete positive unital linear maps.

Four constructively unital families: compression onto an isometry range,
the normalized trace, pinching to a block-diagonal pattern, and mixtures
of orthogonal conjugations. All four are strictly positive, so they are
admissible wherever a theorem needs strict positivity (negative-order
power means).
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import (
    BadPartition,
    DimensionMismatch,
    NotIsometry,
    NotUnital,
    ParameterOutOfRange,
)
from .matfun import SpdMatrix, SymMatrix, validate_spd, validate_sym

__all__ = [
    "PositiveUnitalMap",
    "compression",
    "normalized_trace",
    "pinching",
    "unitary_mixture",
    "build_map",
    "apply_map",
]

_STRUCT_TOL = 1e-10

KINDS = ("compression", "normalized_trace", "pinching", "unitary_mixture")


@dataclass(frozen=True)
class PositiveUnitalMap:
    """A concrete positive unital linear map from d x d to k x k matrices."""

    kind: str
    in_dim: int
    out_dim: int
    isometry: np.ndarray | None = None
    blocks: tuple | None = None
    unitaries: np.ndarray | None = None
    probs: np.ndarray | None = None

    def __call__(self, a):
        return apply_map(self, a)


def _apply_raw(phi: PositiveUnitalMap, a: np.ndarray) -> np.ndarray:
    if phi.kind == "compression":
        v = phi.isometry
        return v.T @ a @ v
    if phi.kind == "normalized_trace":
        return np.array([[np.trace(a) / phi.in_dim]])
    if phi.kind == "pinching":
        out = np.zeros_like(a)
        for block in phi.blocks:
            idx = np.asarray(block)
            out[np.ix_(idx, idx)] = a[np.ix_(idx, idx)]
        return out
    acc = np.zeros_like(a)
    for u, p in zip(phi.unitaries, phi.probs):
        acc += p * (u @ a @ u.T)
    return acc


def _certify_unital(phi: PositiveUnitalMap) -> PositiveUnitalMap:
    image = _apply_raw(phi, np.eye(phi.in_dim))
    if np.max(np.abs(image - np.eye(phi.out_dim))) > _STRUCT_TOL:
        raise NotUnital(f"{phi.kind} map sends I to something else")
    return phi


def compression(v) -> PositiveUnitalMap:
    """Phi(A) = V^T A V for a d x k matrix V with orthonormal columns."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] > v.shape[0]:
        raise NotIsometry(f"isometry must be d x k with k <= d, got {v.shape}")
    gram = v.T @ v
    if np.max(np.abs(gram - np.eye(v.shape[1]))) > _STRUCT_TOL:
        raise NotIsometry("columns are not orthonormal: ||V^T V - I|| too large")
    return _certify_unital(
        PositiveUnitalMap("compression", v.shape[0], v.shape[1], isometry=v)
    )


def normalized_trace(dim: int) -> PositiveUnitalMap:
    """Phi(A) = (tr A / d) as a 1 x 1 matrix."""
    if dim < 1:
        raise ParameterOutOfRange(f"dimension must be positive, got {dim}")
    return _certify_unital(PositiveUnitalMap("normalized_trace", dim, 1))


def pinching(dim: int, blocks) -> PositiveUnitalMap:
    """Zero out all entries outside the given diagonal blocks.

    ``blocks`` must partition the index set 0..dim-1.
    """
    seen = sorted(i for block in blocks for i in block)
    if seen != list(range(dim)):
        raise BadPartition(f"blocks {blocks} do not partition 0..{dim - 1}")
    frozen = tuple(tuple(int(i) for i in block) for block in blocks)
    return _certify_unital(PositiveUnitalMap("pinching", dim, dim, blocks=frozen))


def unitary_mixture(unitaries, probs) -> PositiveUnitalMap:
    """Phi(A) = sum_j p_j U_j A U_j^T for orthogonal U_j and a probability vector p."""
    us = np.ascontiguousarray(np.asarray(unitaries, dtype=np.float64))
    ps = np.asarray(probs, dtype=np.float64)
    if us.ndim != 3 or us.shape[1] != us.shape[2] or us.shape[0] != ps.shape[0]:
        raise ParameterOutOfRange("need a stack of square matrices with one weight each")
    if np.any(ps < 0.0) or abs(ps.sum() - 1.0) > _STRUCT_TOL:
        raise ParameterOutOfRange(f"probabilities sum to {ps.sum():.17g}, not 1")
    d = us.shape[1]
    for j, u in enumerate(us):
        if np.max(np.abs(u.T @ u - np.eye(d))) > _STRUCT_TOL:
            raise NotIsometry(f"matrix {j} in the mixture is not orthogonal")
    return _certify_unital(
        PositiveUnitalMap("unitary_mixture", d, d, unitaries=us, probs=ps)
    )


def build_map(spec: dict) -> PositiveUnitalMap:
    """Construct a gallery map from a plain dict (the CLI config form).

    Recognized shapes::

        {"kind": "compression", "isometry": [[...], ...]}
        {"kind": "normalized_trace", "dim": d}
        {"kind": "pinching", "dim": d, "blocks": [[0, 1], [2]]}
        {"kind": "unitary_mixture", "unitaries": [...], "probs": [...]}
    """
    kind = spec.get("kind")
    if kind == "compression":
        return compression(spec["isometry"])
    if kind == "normalized_trace":
        return normalized_trace(int(spec["dim"]))
    if kind == "pinching":
        return pinching(int(spec["dim"]), spec["blocks"])
    if kind == "unitary_mixture":
        return unitary_mixture(spec["unitaries"], spec["probs"])
    raise ParameterOutOfRange(f"unknown map kind {kind!r}; expected one of {KINDS}")


def apply_map(phi: PositiveUnitalMap, a, tol: ToleranceConfig = DEFAULT_TOL):
    """Apply the map, preserving the input's kind (SPD in, SPD out).

    Raises
    ------
    DimensionMismatch
        If the operand dimension differs from the map's input dimension.
    """
    if isinstance(a, SymMatrix):
        if a.dim != phi.in_dim:
            raise DimensionMismatch(f"map expects dim {phi.in_dim}, got {a.dim}")
        raw = _apply_raw(phi, a.entries)
        if isinstance(a, SpdMatrix):
            return validate_spd(raw, tol)
        return validate_sym(raw, tol)
    raw = np.asarray(a, dtype=np.float64)
    if raw.shape != (phi.in_dim, phi.in_dim):
        raise DimensionMismatch(f"map expects dim {phi.in_dim}, got {raw.shape}")
    return _apply_raw(phi, raw)
