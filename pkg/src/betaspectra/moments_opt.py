"""Constrained minimization of the Hermite coefficient rate over measures
with prescribed leading moments.

The primal value comes from the moments -> Jacobi map (the minimizer keeps
the prescribed coefficients and continues with the free tail); the dual is a
concave log-integral maximization solved by damped Newton ascent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .equilibria import SC, ChebGrid, density
from .errors import NotPositiveDefiniteError, ParameterError
from .jacobi import JacobiCoeffs
from .rates import hermite_rate

__all__ = [
    "MomentConstraint",
    "moments_to_jacobi",
    "constrained_rate_primal",
    "constrained_rate_dual",
    "DualResult",
    "moment_opt_report",
]

HANKEL_MIN_EIG_REL = 1e-10


@dataclass(frozen=True)
class MomentConstraint:
    """Prescribed moments c_1..c_{2l-1} (odd length; c_0 = 1 implicit)."""

    c: np.ndarray

    def __post_init__(self) -> None:
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        if c.size % 2 == 0 or c.size < 1:
            raise ParameterError("need an odd number of moments c_1..c_{2l-1}")
        object.__setattr__(self, "c", c)

    @property
    def order(self) -> int:
        return len(self.c)

    @property
    def level(self) -> int:
        """l with 2l - 1 prescribed moments."""
        return (len(self.c) + 1) // 2

    @property
    def extended(self) -> np.ndarray:
        """(1, c_1, ..., c_{2l-1})."""
        return np.concatenate(([1.0], self.c))

    def hankel(self) -> np.ndarray:
        ext = self.extended
        l = self.level
        return np.array([[ext[i + j] for j in range(l)] for i in range(l)])

    def shifted_hankel(self) -> np.ndarray:
        ext = self.extended
        l = self.level
        return np.array([[ext[i + j + 1] for j in range(l)] for i in range(l)])

    def to_json(self) -> dict:
        return {"c": self.c.tolist()}

    @staticmethod
    def from_json(obj: dict) -> "MomentConstraint":
        return MomentConstraint(np.asarray(obj["c"], dtype=float))


def _check_interior(h: np.ndarray) -> None:
    eigs = np.linalg.eigvalsh(h)
    if eigs.min() <= HANKEL_MIN_EIG_REL * np.trace(h):
        raise NotPositiveDefiniteError(
            "Hankel matrix is singular or indefinite: moments on or outside the boundary"
        )


def moments_to_jacobi(c: MomentConstraint) -> JacobiCoeffs:
    """Jacobi coefficients b_0..b_{l-1}, a_0..a_{l-2} reproducing the moments.

    Orthogonalizes the monomial basis against the Hankel Gram matrix: with
    H = L L^T, the l x l section is J = L^{-1} H1 L^{-T} where H1 is the
    shifted Hankel matrix.
    """
    h = c.hankel()
    _check_interior(h)
    try:
        low = cholesky(h, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    h1 = c.shifted_hankel()
    tmp = solve_triangular(low, h1, lower=True)
    j = solve_triangular(low, tmp.T, lower=True).T
    b = np.diag(j).copy()
    a = np.diag(j, 1).copy()
    if a.size and a.min() <= 0.0:
        raise NotPositiveDefiniteError("nonpositive recurrence coefficient from moments")
    return JacobiCoeffs(b, a)


def constrained_rate_primal(c: MomentConstraint) -> float:
    """inf of sum b^2/2 + sum G(a) over measures matching c: the finite sum
    over the coefficients the moments determine."""
    return hermite_rate(moments_to_jacobi(c)).value


@dataclass
class DualResult:
    value: float
    v: np.ndarray
    grad_norm: float
    certified: bool
    flags: list = field(default_factory=list)

    def __float__(self) -> float:
        return self.value


def constrained_rate_dual(
    c: MomentConstraint, grid: ChebGrid | None = None, max_iter: int = 200
) -> DualResult:
    """sup over (v_0, v) of v_0 + sum v_j c_j + int log(1 - v_0 - sum v_j x^j) dSC.

    Concave; solved by damped Newton from v = 0 with feasibility
    backtracking (the integrand requires 1 - sum v_j x^j > 0 on [-2, 2]).
    Equality with the primal is claimed only for moments of measures
    supported in [-2, 2].
    """
    _check_interior(c.hankel())
    if grid is None:
        grid = ChebGrid.for_interval(-2.0, 2.0, 512)
    order = c.order
    ext = c.extended
    w_sc = grid.weights * density(SC, grid.nodes)
    powers = np.vstack([grid.nodes**j for j in range(2 * order + 1)])
    check_x = np.linspace(-2.0, 2.0, 4097)
    check_powers = np.vstack([check_x**j for j in range(order + 1)])

    def u_quad(v):
        return 1.0 - v @ powers[: order + 1]

    def feasible(v):
        return bool(np.all(1.0 - v @ check_powers > 0.0))

    def psi(v, u):
        return float(v @ ext + w_sc @ np.log(u))

    v = np.zeros(order + 1)
    u = u_quad(v)
    val = psi(v, u)
    grad = np.empty(order + 1)
    hess = np.empty((order + 1, order + 1))
    grad_norm = math.inf
    flags: list = []
    for _ in range(max_iter):
        inv_u = 1.0 / u
        for j in range(order + 1):
            grad[j] = ext[j] - w_sc @ (powers[j] * inv_u)
        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm < 1e-8:
            break
        inv_u2 = inv_u * inv_u
        for j in range(order + 1):
            for k in range(j, order + 1):
                hess[j, k] = hess[k, j] = -float(w_sc @ (powers[j + k] * inv_u2))
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.solve(hess - 1e-12 * np.eye(order + 1), -grad)
        t = 1.0
        while t > 1e-14:
            v_new = v + t * step
            if feasible(v_new):
                u_new = u_quad(v_new)
                val_new = psi(v_new, u_new)
                if val_new >= val - 1e-15:
                    v, u, val = v_new, u_new, val_new
                    break
            t *= 0.5
        else:
            flags.append("line search stalled")
            break
    certified = grad_norm < 1e-8
    if not certified and "line search stalled" not in flags:
        flags.append("gradient certificate not met")
    return DualResult(value=val, v=v.copy(), grad_norm=grad_norm, certified=certified, flags=flags)


def moment_opt_report(c: MomentConstraint, grid: ChebGrid | None = None) -> dict:
    """Primal and dual values with the recovered coefficients, as JSON."""
    coeffs = moments_to_jacobi(c)
    primal = hermite_rate(coeffs).value
    dual = constrained_rate_dual(c, grid)
    flags = list(dual.flags)
    # dual equality is only claimed when the primal achiever stays in [-2, 2]
    from .sumrule import TailJacobiModel, outliers

    model = TailJacobiModel(head=coeffs)
    if outliers(model):
        flags.append("primal achiever has outliers: dual equality not claimed")
    return {
        "primal": primal,
        "dual": dual.value,
        "coeffs": coeffs.to_json(),
        "flags": flags,
    }
