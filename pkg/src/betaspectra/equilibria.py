"""Classical equilibrium laws and the moment-space metric.

Covers the semicircle, Marchenko-Pastur, Kesten-McKay and arcsine families:
densities, Cauchy-Stieltjes transforms (Herglotz branch), edge-aware
quadrature built on a Gauss-Chebyshev rule, moments, and the metric
d(mu, nu) = sum_k 2^-k |m_k(mu) - m_k(nu)| / (1 + |...|).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "Family",
    "EquilibriumLaw",
    "MomentVector",
    "ChebGrid",
    "density",
    "stieltjes",
    "moment",
    "moment_distance",
    "MomentDistance",
    "sigma_pm",
    "u_pm",
    "law_grid",
    "integrate_against",
    "SC",
    "ARCSINE_SYM",
    "ARCSINE_01",
    "mp_edges",
]


class Family(str, Enum):
    SEMICIRCLE = "sc"
    MARCHENKO_PASTUR = "mp"
    KESTEN_MCKAY = "kmk"
    ARCSINE = "arcsine"


def mp_edges(tau: float) -> tuple[float, float]:
    """Support endpoints a(tau) = (1-sqrt(tau))^2, b(tau) = (1+sqrt(tau))^2."""
    rt = math.sqrt(tau)
    return (1.0 - rt) ** 2, (1.0 + rt) ** 2


@dataclass(frozen=True)
class EquilibriumLaw:
    """One of the four reference laws, with family-specific parameters.

    MP takes tau in (0, 1]; KMK takes 0 <= u_minus < u_plus <= 1; the
    arcsine family carries an interval flag ("[-2,2]" or "[0,1]").
    """

    family: Family
    tau: float | None = None
    u_minus: float | None = None
    u_plus: float | None = None
    interval: str = "[-2,2]"

    def __post_init__(self) -> None:
        if self.family is Family.MARCHENKO_PASTUR:
            if self.tau is None or not (0.0 < self.tau <= 1.0):
                raise ParameterError(f"MP requires tau in (0, 1], got {self.tau}")
        elif self.family is Family.KESTEN_MCKAY:
            um, up = self.u_minus, self.u_plus
            if um is None or up is None or not (0.0 <= um < up <= 1.0):
                raise ParameterError(f"KMK requires 0 <= u_minus < u_plus <= 1, got ({um}, {up})")
        elif self.family is Family.ARCSINE:
            if self.interval not in ("[-2,2]", "[0,1]"):
                raise ParameterError(f"arcsine interval must be '[-2,2]' or '[0,1]', got {self.interval!r}")

    @property
    def support(self) -> tuple[float, float]:
        if self.family is Family.SEMICIRCLE:
            return (-2.0, 2.0)
        if self.family is Family.MARCHENKO_PASTUR:
            return mp_edges(self.tau)
        if self.family is Family.KESTEN_MCKAY:
            return (self.u_minus, self.u_plus)
        return (-2.0, 2.0) if self.interval == "[-2,2]" else (0.0, 1.0)

    @property
    def kmk_constant(self) -> float:
        """Normalizing constant C_{u-,u+} of the KMK density."""
        um, up = self.u_minus, self.u_plus
        inv = 0.5 * (1.0 - math.sqrt(um * up) - math.sqrt((1.0 - um) * (1.0 - up)))
        return 1.0 / inv

    def to_json(self) -> dict:
        out = {"family": self.family.value}
        if self.family is Family.MARCHENKO_PASTUR:
            out["tau"] = self.tau
        elif self.family is Family.KESTEN_MCKAY:
            out["u_minus"] = self.u_minus
            out["u_plus"] = self.u_plus
        elif self.family is Family.ARCSINE:
            out["interval"] = self.interval
        return out

    @staticmethod
    def from_json(obj: dict) -> "EquilibriumLaw":
        fam = Family(obj["family"])
        return EquilibriumLaw(
            fam,
            tau=obj.get("tau"),
            u_minus=obj.get("u_minus"),
            u_plus=obj.get("u_plus"),
            interval=obj.get("interval", "[-2,2]"),
        )


SC = EquilibriumLaw(Family.SEMICIRCLE)
ARCSINE_SYM = EquilibriumLaw(Family.ARCSINE, interval="[-2,2]")
ARCSINE_01 = EquilibriumLaw(Family.ARCSINE, interval="[0,1]")


def density(law: EquilibriumLaw, x):
    """Lebesgue density of the law at x (vectorized); 0 outside the open support."""
    x = np.asarray(x, dtype=float)
    lo, hi = law.support
    inside = (x > lo) & (x < hi)
    out = np.zeros_like(x)
    xs = np.where(inside, x, 0.5 * (lo + hi))
    if law.family is Family.SEMICIRCLE:
        val = np.sqrt(4.0 - xs * xs) / (2.0 * math.pi)
    elif law.family is Family.MARCHENKO_PASTUR:
        val = np.sqrt((xs - lo) * (hi - xs)) / (2.0 * math.pi * law.tau * xs)
    elif law.family is Family.KESTEN_MCKAY:
        val = law.kmk_constant * np.sqrt((xs - lo) * (hi - xs)) / (2.0 * math.pi * xs * (1.0 - xs))
    else:  # arcsine
        val = 1.0 / (math.pi * np.sqrt((xs - lo) * (hi - xs)))
    out = np.where(inside, val, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def _sqrt_two_cuts(z: complex, e_lo: float, e_hi: float) -> complex:
    """sqrt((z - e_lo)(z - e_hi)) analytic off [e_lo, e_hi], ~ z at infinity.

    Principal-branch product; on the real axis left of the support it
    evaluates to -sqrt((e_lo - z)(e_hi - z)), which is the Herglotz branch.
    """
    return cmath.sqrt(z - e_lo) * cmath.sqrt(z - e_hi)


def stieltjes(law: EquilibriumLaw, z) -> complex:
    """Cauchy-Stieltjes transform m(z) = int dmu(x) / (x - z).

    Branch: m is Herglotz (Im m > 0 on the upper half plane) and
    m(z) ~ -1/z at infinity. Real z must lie outside the support.
    """
    z = complex(z)
    lo, hi = law.support
    if z.imag == 0.0 and lo <= z.real <= hi:
        raise DomainError(f"z = {z.real} lies in the support [{lo}, {hi}]")
    if law.family is Family.SEMICIRCLE:
        return (-z + _sqrt_two_cuts(z, -2.0, 2.0)) / 2.0
    if law.family is Family.MARCHENKO_PASTUR:
        if z == 0:
            raise DomainError("MP transform is evaluated away from z = 0")
        tau = law.tau
        return (-z + (1.0 - tau) + _sqrt_two_cuts(z, lo, hi)) / (2.0 * tau * z)
    if law.family is Family.ARCSINE and law.interval == "[-2,2]":
        return -1.0 / _sqrt_two_cuts(z, -2.0, 2.0)
    # KMK (and arcsine on [0,1] = KMK(0,1)). The closed form below is the
    # unique rational + algebraic combination with Im m = pi * density on
    # the cut, no poles at 0 or 1, and m ~ -1/z at infinity.
    um, up = lo, hi
    if z == 0 or z == 1:
        raise DomainError("KMK transform is evaluated away from z in {0, 1}")
    c = law.kmk_constant if law.family is Family.KESTEN_MCKAY else 2.0
    root = _sqrt_two_cuts(z, um, up)
    return c * (
        math.sqrt(um * up) / (2.0 * z)
        - math.sqrt((1.0 - um) * (1.0 - up)) / (2.0 * (1.0 - z))
        + root / (2.0 * z * (1.0 - z))
    )


@dataclass(frozen=True)
class ChebGrid:
    """Gauss-Chebyshev rule mapped to [center - radius, center + radius].

    Nodes x_k = center + radius * cos(theta_k), theta_k = (2k-1)pi/(2n).
    ``weights`` are Lebesgue weights (intrinsic weight pi/n times the
    Jacobian radius*sin(theta_k)); the substitution absorbs inverse
    square-root edge singularities.
    """

    n: int
    center: float
    radius: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @staticmethod
    def for_interval(lo: float, hi: float, n: int = 512) -> "ChebGrid":
        if hi <= lo:
            raise ParameterError(f"empty interval [{lo}, {hi}]")
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        theta = (2.0 * np.arange(1, n + 1) - 1.0) * math.pi / (2.0 * n)
        nodes = c + r * np.cos(theta)
        weights = (math.pi / n) * r * np.sin(theta)
        return ChebGrid(n=n, center=c, radius=r, nodes=nodes, weights=weights)

    @property
    def intrinsic_weight(self) -> float:
        return math.pi / self.n

    def integrate(self, f) -> float:
        """Lebesgue integral of f over the interval (f vectorized)."""
        return float(np.dot(self.weights, f(self.nodes)))

    def integrate_chebyshev(self, g) -> float:
        """Integral of g against the rule's intrinsic Chebyshev-type weight
        1/sqrt(radius^2 - (x-center)^2); exact for polynomials of degree < 2n."""
        return self.intrinsic_weight * float(np.sum(g(self.nodes)))


def law_grid(law: EquilibriumLaw, n: int = 512) -> ChebGrid:
    lo, hi = law.support
    return ChebGrid.for_interval(lo, hi, n)


def integrate_against(law: EquilibriumLaw, f, n: int = 512) -> float:
    """int f(x) dmu(x) for the law mu; edge singularities handled by the grid."""
    grid = law_grid(law, n)
    vals = np.asarray(f(grid.nodes), dtype=float) * density(law, grid.nodes)
    return float(np.dot(grid.weights, vals))


def moment(law: EquilibriumLaw, k: int, n: int = 1024) -> float:
    """k-th moment of the law; SC odd moments short-circuit to exact 0."""
    if k < 1:
        raise ParameterError("moment order must be >= 1")
    symmetric = law.family is Family.SEMICIRCLE or (
        law.family is Family.ARCSINE and law.interval == "[-2,2]"
    )
    if symmetric and k % 2 == 1:
        return 0.0
    return integrate_against(law, lambda x: x**k, n=n)


@dataclass(frozen=True)
class MomentVector:
    """Finite prefix (m_1, ..., m_order) of a moment sequence; m_0 = 1 implied."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def order(self) -> int:
        return len(self.values)

    def with_zeroth(self) -> np.ndarray:
        return np.concatenate(([1.0], self.values))

    def hankel(self, k: int) -> np.ndarray:
        """(k+1) x (k+1) Hankel matrix [m_{i+j}], needs order >= 2k."""
        m = self.with_zeroth()
        if 2 * k >= len(m):
            raise DomainError(f"Hankel of size {k + 1} needs {2 * k} stored moments")
        return np.array([[m[i + j] for j in range(k + 1)] for i in range(k + 1)])

    def is_nonnegative_definite(self, tol: float = 1e-10) -> bool:
        """Necessary moment-sequence condition: every stored Hankel is PSD."""
        kmax = (self.order) // 2
        for k in range(kmax + 1):
            w = np.linalg.eigvalsh(self.hankel(k))
            if w[0] < -tol * max(1.0, abs(w[-1])):
                return False
        return True

    @staticmethod
    def of_law(law: EquilibriumLaw, order: int) -> "MomentVector":
        return MomentVector(np.array([moment(law, k) for k in range(1, order + 1)]))

    @staticmethod
    def of_atoms(locations, weights, order: int) -> "MomentVector":
        loc = np.asarray(locations, dtype=float)
        w = np.asarray(weights, dtype=float)
        return MomentVector(np.array([float(np.dot(w, loc**k)) for k in range(1, order + 1)]))


@dataclass(frozen=True)
class MomentDistance:
    value: float
    remainder_bound: float
    truncation: int


def moment_distance(mu: MomentVector, nu: MomentVector, truncation: int = 64) -> MomentDistance:
    """Moment-convergence metric, truncated at order K with remainder in [0, 2^-K]."""
    k = min(truncation, mu.order, nu.order)
    delta = np.abs(mu.values[:k] - nu.values[:k])
    terms = np.power(0.5, np.arange(1, k + 1)) * delta / (1.0 + delta)
    return MomentDistance(value=float(np.sum(terms)), remainder_bound=2.0**-k, truncation=k)


def sigma_pm(b: float, c: float) -> tuple[float, float]:
    """sigma_-(b,c), sigma_+(b,c) = [1 + sqrt(bc) -+ sqrt((1-b)(1-c))]/2."""
    if not (0.0 < b < 1.0 and 0.0 < c < 1.0):
        raise ParameterError(f"sigma_pm needs arguments in (0,1), got ({b}, {c})")
    s = math.sqrt(b * c)
    t = math.sqrt((1.0 - b) * (1.0 - c))
    return 0.5 * (1.0 + s - t), 0.5 * (1.0 + s + t)


def u_pm(x: float, y: float) -> tuple[float, float]:
    """u_-(x,y), u_+(x,y) = (sqrt((1-x)(1-y)) -+ sqrt(xy))^2."""
    if not (0.0 < x < 1.0 and 0.0 < y < 1.0):
        raise ParameterError(f"u_pm needs arguments in (0,1), got ({x}, {y})")
    base = 1.0 - x - y + 2.0 * x * y
    cross = 2.0 * math.sqrt(x * (1.0 - x) * y * (1.0 - y))
    return base - cross, base + cross
