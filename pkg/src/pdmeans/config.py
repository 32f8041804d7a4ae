"""Tolerance configuration shared by every solver and predicate."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Convergence and order-check tolerances.

    Attributes
    ----------
    sym_tol : float
        Allowed relative asymmetry |a_ij - a_ji| / max(1, ||A||_F).
    spd_tol : float
        Eigenvalues must exceed this to count as positive definite.
    recon_tol : float
        Relative residual allowed for spectral reconstruction Q L Q^T ~ A
        and for orthonormality Q^T Q ~ I.
    margin_tol : float
        Slack for Loewner-order predicates, scaled by the operator norm
        of the right-hand side.
    rel_slack : float
        Relative slack for scalar trace/norm predicates.
    fixed_point_tol : float
        Thompson-metric step size (or Karcher residual norm) at which the
        iterative mean solvers stop.
    max_iterations : int
        Outer iteration cap for the mean solvers.  The power-mean solver
        scales this cap by 1/t for small orders t, where the contraction
        rate degrades like 1 - t.
    """

    sym_tol: float = 1e-10
    spd_tol: float = 1e-12
    recon_tol: float = 1e-9
    margin_tol: float = 1e-8
    rel_slack: float = 1e-9
    fixed_point_tol: float = 1e-10
    max_iterations: int = 500

    def with_overrides(self, **kwargs) -> "ToleranceConfig":
        """Return a copy with the given fields replaced."""
        return replace(self, **kwargs)


DEFAULT_TOL = ToleranceConfig()
