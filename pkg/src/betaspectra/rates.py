"""Large-deviation rate functions.

Outlier costs F_G / F_L / F_J, the coordinate rates x^2/2, g, G and the
symmetric-beta rate h (paper-literal and corrected variants), ensemble-level
coefficient functionals, and reversed Kullback information K(P|Q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .equilibria import EquilibriumLaw, density, integrate_against, mp_edges
from .errors import ParameterError

__all__ = [
    "RateReport",
    "CoordinateRate",
    "CoordinateFamily",
    "BetaHVariant",
    "GridDensity",
    "rate_fg",
    "rate_fl",
    "rate_fj",
    "small_g",
    "big_g",
    "beta_h",
    "hermite_rate",
    "laguerre_rate",
    "jacobi_ensemble_rate",
    "kullback",
]

INF = float("inf")


@dataclass
class RateReport:
    """A rate value with its per-term breakdown and truncation bookkeeping."""

    value: float
    terms: list = field(default_factory=list)
    truncation: int = 0
    tail_bound: float = 0.0
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "terms": [[label, val] for label, val in self.terms],
            "truncation": self.truncation,
            "tail_bound": self.tail_bound,
            "flags": list(self.flags),
        }


def rate_fg(x: float) -> float:
    """Extreme-eigenvalue cost for the Hermite bulk [-2, 2]:
    integral of sqrt(t^2 - 4) from 2 to |x|; 0 inside the bulk."""
    ax = abs(x)
    if ax <= 2.0:
        return 0.0
    root = math.sqrt(ax * ax - 4.0)
    return 0.5 * ax * root - 2.0 * math.log(0.5 * (ax + root))


def rate_fl(x: float, tau: float) -> float:
    """Extreme-eigenvalue cost for the Laguerre bulk [a(tau), b(tau)].

    Upper leg x >= b(tau); lower leg 0 < x <= a(tau); 0 inside the bulk;
    +inf at and below 0 (the integrand ~ c/t diverges).
    """
    if not (0.0 < tau <= 1.0):
        raise ParameterError(f"tau must be in (0, 1], got {tau}")
    a, b = mp_edges(tau)
    if x <= 0.0:
        return INF
    if a <= x <= b:
        return 0.0
    if x > b:
        val, _ = quad(lambda t: math.sqrt((t - a) * (t - b)) / t, b, x)
    else:
        val, _ = quad(lambda t: math.sqrt((a - t) * (b - t)) / t, x, a)
    return val


def rate_fj(x: float, u_minus: float, u_plus: float) -> float:
    """Extreme-eigenvalue cost for the Jacobi bulk [u_-, u_+] inside (0, 1)."""
    if not (0.0 <= u_minus < u_plus <= 1.0):
        raise ParameterError(f"need 0 <= u_minus < u_plus <= 1, got ({u_minus}, {u_plus})")
    if x <= 0.0 or x >= 1.0:
        return INF
    if u_minus <= x <= u_plus:
        return 0.0
    if x > u_plus:
        val, _ = quad(
            lambda t: math.sqrt((t - u_minus) * (t - u_plus)) / (t * (1.0 - t)), u_plus, x
        )
    else:
        val, _ = quad(
            lambda t: math.sqrt((u_minus - t) * (u_plus - t)) / (t * (1.0 - t)), x, u_minus
        )
    return val


def small_g(x: float) -> float:
    """g(x) = x - 1 - log x for x > 0, +inf otherwise; zero only at 1."""
    if x <= 0.0:
        return INF
    return x - 1.0 - math.log(x)


def big_g(x: float) -> float:
    """G(x) = g(x^2) for x > 0, +inf otherwise."""
    if x <= 0.0:
        return INF
    return small_g(x * x)


class BetaHVariant(str, Enum):
    CORRECTED = "corrected"
    PAPER_LITERAL = "paper_literal"


def beta_h(u: float, v: float, q: float, variant: BetaHVariant = BetaHVariant.CORRECTED) -> float:
    """Rate of beta_s(un + ..., vn + ...) at speed n.

    The literal variant is the printed formula q(u-v) - u log(1+q)
    - v log(1-q), transcribed into this package's sign convention for
    symmetric-beta variables (mean (b - a)/(b + a), which flips q relative
    to the source display): q(v-u) - u log(1-q) - v log(1+q). The corrected
    variant is the contraction of the gamma rates under the same
    convention: it is nonnegative, strictly convex on (-1, 1) and vanishes
    exactly at q* = (v - u)/(u + v). The two differ by a function affine
    in q.
    """
    if u <= 0.0 or v <= 0.0:
        raise ParameterError("beta_h needs u, v > 0")
    if not (-1.0 < q < 1.0):
        return INF
    if variant is BetaHVariant.PAPER_LITERAL:
        return q * (v - u) - u * math.log1p(-q) - v * math.log1p(q)
    uv = u + v
    return (
        u * math.log(u)
        + v * math.log(v)
        - uv * math.log(uv / 2.0)
        - u * math.log1p(-q)
        - v * math.log1p(q)
    )


class CoordinateFamily(str, Enum):
    GAUSS_SQ = "gauss_sq"
    GAMMA_G = "gamma_g"
    BETA_H = "beta_h"


@dataclass(frozen=True)
class CoordinateRate:
    """One coordinate rate: x^2/2 (Gaussian), g(alpha x) (gamma) or the
    symmetric-beta rate h_{u,v}."""

    family: CoordinateFamily
    alpha: float = 1.0
    u: float = 1.0
    v: float = 1.0
    variant: BetaHVariant = BetaHVariant.CORRECTED

    def __call__(self, x: float) -> float:
        if self.family is CoordinateFamily.GAUSS_SQ:
            return 0.5 * x * x
        if self.family is CoordinateFamily.GAMMA_G:
            return small_g(self.alpha * x)
        return beta_h(self.u, self.v, x, self.variant)


def hermite_rate(coeffs, order: int | None = None) -> RateReport:
    """Coefficient-side Hermite rate: sum b_j^2/2 + sum G(a_j) over the
    available (or requested) coefficient range."""
    b = np.asarray(coeffs.b, dtype=float)
    a = np.asarray(coeffs.a, dtype=float)
    if order is not None:
        b, a = b[:order], a[:order]
    terms = []
    total = 0.0
    for j, bj in enumerate(b):
        t = 0.5 * bj * bj
        terms.append((f"b_{j}^2/2", t))
        total += t
    for j, aj in enumerate(a):
        t = big_g(aj)
        terms.append((f"G(a_{j})", t))
        total += t
    flags = ["infinite"] if not math.isfinite(total) else []
    return RateReport(value=total, terms=terms, truncation=len(b), tail_bound=0.0, flags=flags)


def laguerre_rate(d, s, tau: float, check_tau1_identity: bool = True) -> RateReport:
    """Laguerre coefficient-side rate: sum G(d_k) + tau * sum G(s_k/sqrt(tau)).

    At tau = 1 the same value is recomputed from the assembled Jacobi
    coefficients (b_0 - 1 + sum(b_k - 2) - 2 sum log a_k plus the finite
    truncation boundary term s_L^2 - 1) and asserted equal to 1e-10.
    """
    if not (0.0 < tau <= 1.0):
        raise ParameterError(f"tau must be in (0, 1], got {tau}")
    d = np.asarray(d, dtype=float)
    s = np.asarray(s, dtype=float)
    terms = []
    total = 0.0
    for k, dk in enumerate(d, start=1):
        t = big_g(dk)
        terms.append((f"G(d_{k})", t))
        total += t
    rt = math.sqrt(tau)
    for k, sk in enumerate(s, start=1):
        t = tau * big_g(sk / rt)
        terms.append((f"tau*G(s_{k}/sqrt(tau))", t))
        total += t
    flags = ["infinite"] if not math.isfinite(total) else []
    if tau == 1.0 and check_tau1_identity and len(s) == len(d) and math.isfinite(total):
        from .jacobi import ds_assemble

        coeffs = ds_assemble(d, s)
        alt = (
            coeffs.b[0]
            - 1.0
            + float(np.sum(coeffs.b[1 : len(d)] - 2.0))
            + (s[-1] ** 2 - 1.0)
            - 2.0 * float(np.sum(np.log(coeffs.a)))
        )
        if abs(alt - total) > 1e-10 * (1.0 + abs(total)):
            raise AssertionError(f"tau=1 identity violated: {alt} vs {total}")
    return RateReport(value=total, terms=terms, truncation=len(d), tail_bound=0.0, flags=flags)


def jacobi_ensemble_rate(
    alpha,
    kappa1: float,
    kappa2: float,
    variant: BetaHVariant = BetaHVariant.CORRECTED,
) -> RateReport:
    """Verblunsky-side rate of the Jacobi ensemble with slopes (kappa1, kappa2).

    paper_literal evaluates the displayed series verbatim; corrected sums
    the corrected symmetric-beta rate with (u, v) = (1 + kappa1, 1 + kappa2)
    at even indices and (1 + kappa1 + kappa2, 1) at odd ones, which vanishes
    at the almost-sure limits of the coefficients. At kappa = 0 both reduce
    to -sum log(1 - alpha_k^2).
    """
    vec = np.asarray(alpha.alpha if hasattr(alpha, "alpha") else alpha, dtype=float)
    k1, k2 = kappa1, kappa2
    terms = []
    total = 0.0
    for k, al in enumerate(vec):
        if not (-1.0 < al < 1.0):
            return RateReport(value=INF, terms=[], truncation=len(vec), flags=["infinite"])
        if variant is BetaHVariant.PAPER_LITERAL:
            if k % 2 == 0:
                t = (
                    al * (k1 - k2)
                    - (1.0 + k1) * math.log1p(al)
                    - (1.0 + k2) * math.log1p(-al)
                )
            else:
                t = (
                    al * (k1 + k2)
                    - (1.0 + k1 + k2) * math.log1p(al)
                    - math.log1p(-al)
                )
        else:
            u, v = (1.0 + k1, 1.0 + k2) if k % 2 == 0 else (1.0 + k1 + k2, 1.0)
            t = beta_h(u, v, al, BetaHVariant.CORRECTED)
        terms.append((f"alpha_{k}", t))
        total += t
    return RateReport(value=total, terms=terms, truncation=len(vec), tail_bound=0.0)


@dataclass(frozen=True)
class GridDensity:
    """A density tabulated on a grid, integrated by the trapezoid rule."""

    x: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))

    def normalized(self) -> "GridDensity":
        z = np.trapezoid(self.p, self.x)
        return GridDensity(self.x, self.p / z)


_DIVERGENCE_THRESHOLD = 1e13


def kullback(p, q, n: int = 1024) -> float:
    """Reversed Kullback information K(P|Q) = int log(dP/dQ) dP.

    P is an EquilibriumLaw or GridDensity; Q is an EquilibriumLaw, a
    GridDensity, or a plain callable Lebesgue density. Returns +inf when
    Q's density vanishes where P has mass (detected by integrand blowup).
    """
    q_density = _as_density(q)
    if isinstance(p, EquilibriumLaw):
        lo, hi = p.support
        from .equilibria import ChebGrid

        grid = ChebGrid.for_interval(lo, hi, n)
        px = density(p, grid.nodes)
        qx = np.asarray(q_density(grid.nodes), dtype=float)
        if np.any(qx <= 0.0):
            return INF
        logratio = np.log(px) - np.log(qx)
        if np.max(logratio) > math.log(_DIVERGENCE_THRESHOLD):
            return INF
        return float(np.dot(grid.weights, px * logratio))
    if isinstance(p, GridDensity):
        qx = np.asarray(q_density(p.x), dtype=float)
        mask = p.p > 0.0
        if np.any(mask & (qx <= 0.0)):
            return INF
        vals = np.zeros_like(p.p)
        vals[mask] = p.p[mask] * (np.log(p.p[mask]) - np.log(qx[mask]))
        return float(np.trapezoid(vals, p.x))
    raise ParameterError(f"unsupported reference object {type(p).__name__}")


def _as_density(q):
    if isinstance(q, EquilibriumLaw):
        return lambda x: density(q, x)
    if isinstance(q, GridDensity):
        return lambda x: np.interp(x, q.x, q.p, left=0.0, right=0.0)
    if callable(q):
        return q
    raise ParameterError(f"unsupported density object {type(q).__name__}")
