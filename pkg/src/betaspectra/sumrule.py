"""Exact spectral data for finite-rank perturbations of constant-tail Jacobi
operators, and the sum-rule machinery built on top of it.

The m-function of a TailJacobiModel is a finite continued fraction
terminated by the closed-form transform of the constant tail; its boundary
values give the a.c. density, its real poles outside the bulk give the
outliers. sumrule_verify checks the Killip-Simon identity; conjecture_probe
evaluates the (unproven) Laguerre and Jacobi analogues and reports gaps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import (
    ARCSINE_01,
    SC,
    ChebGrid,
    EquilibriumLaw,
    Family,
    density,
    mp_edges,
    u_pm,
)
from .errors import DomainError, ParameterError, PoleError
from .jacobi import JacobiCoeffs, VerblunskyCoeffs, affine_s, ds_factorize, geronimus
from .rates import (
    BetaHVariant,
    RateReport,
    beta_h,
    big_g,
    hermite_rate,
    laguerre_rate,
    rate_fg,
    rate_fj,
    rate_fl,
)

__all__ = [
    "TailJacobiModel",
    "MeasureDecomposition",
    "m_function",
    "ac_density",
    "outliers",
    "decompose",
    "measure_side_rate",
    "sumrule_verify",
    "SumRuleReport",
    "conjecture_probe_laguerre",
    "conjecture_probe_jacobi",
    "ConjectureReport",
    "jacobi_limit_alphas",
]

EDGE_DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class TailJacobiModel:
    """Constant-coefficient Jacobi tail (a_inf, b_inf) with a finite head
    overriding the leading entries.

    head.b overrides b_0..; head.a overrides a_0..; the two override lists
    may have different lengths. The essential spectrum (bulk) is
    [b_inf - 2 a_inf, b_inf + 2 a_inf].
    """

    a_inf: float = 1.0
    b_inf: float = 0.0
    head: JacobiCoeffs = field(default_factory=lambda: JacobiCoeffs(np.empty(0), np.empty(0)))

    def __post_init__(self) -> None:
        if self.a_inf <= 0.0:
            raise ParameterError("tail off-diagonal a_inf must be > 0")

    @property
    def bulk(self) -> tuple[float, float]:
        return (self.b_inf - 2.0 * self.a_inf, self.b_inf + 2.0 * self.a_inf)

    @property
    def head_len(self) -> int:
        return max(len(self.head.b), len(self.head.a))

    def b_at(self, j: int) -> float:
        return float(self.head.b[j]) if j < len(self.head.b) else self.b_inf

    def a_at(self, j: int) -> float:
        return float(self.head.a[j]) if j < len(self.head.a) else self.a_inf

    def coefficients(self, n: int) -> JacobiCoeffs:
        """The n x n truncation."""
        b = np.array([self.b_at(j) for j in range(n)])
        a = np.array([self.a_at(j) for j in range(n - 1)])
        return JacobiCoeffs(b, a)

    def to_json(self) -> dict:
        return {
            "tail": {"a": self.a_inf, "b": self.b_inf},
            "head": self.head.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "TailJacobiModel":
        return TailJacobiModel(
            a_inf=float(obj["tail"]["a"]),
            b_inf=float(obj["tail"]["b"]),
            head=JacobiCoeffs.from_json(obj.get("head", {"b": [], "a": []})),
        )


def _m_free_complex(w):
    """Transform of the free matrix at complex w: (-w + sqrt(w^2 - 4))/2,
    branch analytic off [-2, 2] with m ~ -1/w at infinity."""
    w = np.asarray(w, dtype=complex)
    return 0.5 * (-w + np.sqrt(w - 2.0) * np.sqrt(w + 2.0))


def _m_free_real(w: float) -> float:
    """Free transform on the real axis outside [-2, 2] (Herglotz branch)."""
    if abs(w) <= 2.0:
        raise DomainError(f"real argument {w} inside the free bulk")
    root = math.sqrt(w * w - 4.0)
    return 0.5 * (-w + root) if w > 2.0 else 0.5 * (-w - root)


def _m_free_boundary(w):
    """Boundary value lim_{eta->0} of the free transform at w + i eta in (-2, 2)."""
    w = np.asarray(w, dtype=float)
    return 0.5 * (-w + 1j * np.sqrt(np.maximum(4.0 - w * w, 0.0)))


def m_function(model: TailJacobiModel, z, level: int = 0):
    """m_level(z) = <e_1, (J_level - z)^{-1} e_1> of the model stripped
    ``level`` times, by backward continued-fraction recursion from the tail.

    Accepts complex z (vectorized) or real z strictly outside the bulk.
    """
    k = max(model.head_len, level)
    zc = np.asarray(z)
    if np.iscomplexobj(zc) and np.any(zc.imag != 0.0):
        w = (np.asarray(z, dtype=complex) - model.b_inf) / model.a_inf
        m = _m_free_complex(w) / model.a_inf
        for j in range(k - 1, level - 1, -1):
            m = 1.0 / (model.b_at(j) - np.asarray(z, dtype=complex) - model.a_at(j) ** 2 * m)
        return m if m.ndim else complex(m)
    # real axis, outside the bulk
    x = float(z.real if np.iscomplexobj(zc) else z)
    lo, hi = model.bulk
    if lo <= x <= hi:
        raise DomainError(f"real z = {x} lies in the bulk [{lo}, {hi}]")
    m = _m_free_real((x - model.b_inf) / model.a_inf) / model.a_inf
    for j in range(k - 1, level - 1, -1):
        den = model.b_at(j) - x - model.a_at(j) ** 2 * m
        # a zero denominator is a pole of this stripping level; the limit of
        # the next level is 0, which 1/inf reproduces
        m = math.inf if den == 0.0 else 1.0 / den
    if not math.isfinite(m):
        raise PoleError(f"z = {x} is an eigenvalue of the operator")
    return m


def ac_density(model: TailJacobiModel, x):
    """Lebesgue density of the a.c. part at x inside the open bulk:
    Im m(x + i0)/pi with the exact tail boundary value (vectorized)."""
    xs = np.asarray(x, dtype=float)
    lo, hi = model.bulk
    if np.any((xs <= lo) | (xs >= hi)):
        raise DomainError("ac_density is defined strictly inside the bulk")
    w = (xs - model.b_inf) / model.a_inf
    m = _m_free_boundary(w) / model.a_inf
    for j in range(model.head_len - 1, -1, -1):
        m = 1.0 / (model.b_at(j) - xs - model.a_at(j) ** 2 * m)
    out = np.imag(m) / math.pi
    return float(out) if out.ndim == 0 else out


def _reciprocal_m(model: TailJacobiModel, x: float) -> float:
    try:
        m = m_function(model, x)
    except PoleError:
        return 0.0
    if m == 0.0:
        return math.inf
    return 1.0 / m


def _secular(model: TailJacobiModel, x):
    """Secular function on the real axis outside the bulk (vectorized).

    Running the continued fraction as a joint numerator/denominator
    recursion m_j = N_j/D_j with N_j = D_{j+1}, D_j = (b_j - x) D_{j+1}
    - a_j^2 N_{j+1} keeps the result pole-free: eigenvalues of the model
    are exactly the (simple) zeros of D_0. Each step is renormalized, so
    only the sign and the zeros are meaningful.
    """
    xs = np.asarray(x, dtype=float)
    w = (xs - model.b_inf) / model.a_inf
    root = np.sqrt(np.maximum(w * w - 4.0, 0.0))
    mt = np.where(w > 0.0, 0.5 * (-w + root), 0.5 * (-w - root)) / model.a_inf
    num = mt
    den = np.ones_like(xs)
    for j in range(model.head_len - 1, -1, -1):
        num, den = den, (model.b_at(j) - xs) * den - model.a_at(j) ** 2 * num
        scale = np.maximum(np.abs(num), np.abs(den))
        scale = np.where(scale == 0.0, 1.0, scale)
        num = num / scale
        den = den / scale
    return den


def _scan_side(model: TailJacobiModel, edge: float, direction: float, span: float, grid_n: int):
    """Sign-change scan of the secular function on one side of the bulk."""
    # quadratic spacing (dense near the edge) plus a geometric ladder for
    # roots exponentially close to the edge
    t = np.linspace(1e-8, 1.0, grid_n)
    offsets = np.concatenate(
        [span * model.a_inf * t * t, np.geomspace(1e-12, span * model.a_inf, grid_n // 2)]
    )
    offsets = np.unique(offsets)
    xs = edge + direction * offsets
    xs = np.sort(xs) if direction > 0 else np.sort(xs)[::-1]
    vals = _secular(model, xs)
    roots = []
    for i in np.flatnonzero(vals[:-1] * vals[1:] < 0.0):
        x1, x2 = float(xs[i]), float(xs[i + 1])
        g1 = float(vals[i])
        for _ in range(200):
            xm = 0.5 * (x1 + x2)
            if xm == x1 or xm == x2:
                break
            gm = float(_secular(model, np.array([xm]))[0])
            if gm == 0.0:
                x1 = x2 = xm
                break
            if (gm > 0) == (g1 > 0):
                x1, g1 = xm, gm
            else:
                x2 = xm
        roots.append(0.5 * (x1 + x2))
    return roots


def _residue_mass(model: TailJacobiModel, e: float, edge_dist: float) -> float:
    """Outlier mass = -1/(d(1/m)/dz at E), by Richardson-extrapolated
    central differences."""
    h = 1e-6 * max(1.0, abs(e))
    h = min(h, 0.25 * edge_dist)

    def diff(step):
        return (_reciprocal_m(model, e + step) - _reciprocal_m(model, e - step)) / (2.0 * step)

    d1 = diff(h)
    d2 = diff(h / 2.0)
    deriv = (4.0 * d2 - d1) / 3.0
    return -1.0 / deriv


def outliers(model: TailJacobiModel, span: float = 50.0, grid_n: int = 8000):
    """All isolated eigenvalues outside the bulk, with their masses.

    Roots of the pole-free secular function, located by sign-change
    bracketing and bisection; masses by numeric residue of m. Roots within
    1e-10 of a band edge are excluded (edge-degenerate warning case).
    """
    lo, hi = model.bulk
    found = []
    for edge, direction in ((hi, +1.0), (lo, -1.0)):
        for e in _scan_side(model, edge, direction, span, grid_n):
            if abs(e - hi) < EDGE_DEGENERACY_TOL or abs(e - lo) < EDGE_DEGENERACY_TOL:
                continue
            edge_dist = min(abs(e - hi), abs(e - lo))
            mass = _residue_mass(model, e, edge_dist)
            found.append((e, mass))
    found.sort(key=lambda t: t[0])
    return found


@dataclass
class MeasureDecomposition:
    """A.c. density on the bulk plus ordered outliers with masses."""

    bulk: tuple[float, float]
    ac: object  # callable density relative to Lebesgue on the open bulk
    outlier_list: list
    n_plus: int
    n_minus: int

    @property
    def outliers_above(self):
        return sorted((e, m) for e, m in self.outlier_list if e > self.bulk[1])

    @property
    def outliers_below(self):
        return sorted((e, m) for e, m in self.outlier_list if e < self.bulk[0])

    def total_mass(self, n: int = 8192) -> float:
        lo, hi = self.bulk
        grid = ChebGrid.for_interval(lo, hi, n)
        ac_mass = float(np.dot(grid.weights, self.ac(grid.nodes)))
        return ac_mass + sum(m for _, m in self.outlier_list)


def decompose(model: TailJacobiModel, span: float = 50.0) -> MeasureDecomposition:
    outs = outliers(model, span=span)
    lo, hi = model.bulk
    above = [e for e, _ in outs if e > hi]
    below = [e for e, _ in outs if e < lo]
    return MeasureDecomposition(
        bulk=model.bulk,
        ac=lambda x: ac_density(model, x),
        outlier_list=outs,
        n_plus=len(above),
        n_minus=len(below),
    )


def _kullback_vs_model(reference: EquilibriumLaw, model: TailJacobiModel, n: int) -> float:
    lo, hi = reference.support
    grid = ChebGrid.for_interval(lo, hi, n)
    px = density(reference, grid.nodes)
    qx = ac_density(model, grid.nodes)
    if np.any(qx <= 0.0):
        return math.inf
    return float(np.dot(grid.weights, px * (np.log(px) - np.log(qx))))


def measure_side_rate(
    model: TailJacobiModel, reference: EquilibriumLaw, n: int = 8192
) -> RateReport:
    """Measure-side rate K(reference | nu) + sum of outlier costs.

    reference must share its support with the model bulk: SC for the free
    tail, MP(tau) for the Laguerre tail.
    """
    lo, hi = model.bulk
    rlo, rhi = reference.support
    if abs(lo - rlo) > 1e-9 or abs(hi - rhi) > 1e-9:
        raise ParameterError(
            f"reference support [{rlo}, {rhi}] does not match model bulk [{lo}, {hi}]"
        )
    if reference.family is Family.SEMICIRCLE:
        cost = rate_fg
    elif reference.family is Family.MARCHENKO_PASTUR:
        cost = lambda e: rate_fl(e, reference.tau)
    else:
        cost = lambda e: rate_fj(e, rlo, rhi)
    terms = []
    flags = []
    kterm = _kullback_vs_model(reference, model, n)
    terms.append(("kullback", kterm))
    total = kterm
    for e, mass in outliers(model):
        c = cost(e)
        if c == 0.0:
            flags.append(f"outlier {e} inside bulk: zero cost by convention")
        terms.append((f"F({e:.12g})", c))
        total += c
    if not math.isfinite(total):
        flags.append("infinite")
    return RateReport(value=total, terms=terms, truncation=n, tail_bound=0.0, flags=flags)


@dataclass
class SumRuleReport:
    jacobi_side: float
    measure_side: float
    gap: float
    outlier_list: list

    def to_json(self) -> dict:
        return {
            "jacobi_side": self.jacobi_side,
            "measure_side": self.measure_side,
            "gap": self.gap,
            "outliers": [[e, m] for e, m in self.outlier_list],
        }


def sumrule_verify(model: TailJacobiModel, n: int = 8192) -> SumRuleReport:
    """Killip-Simon check for a free-tail model: coefficient side
    sum b_j^2/2 + sum G(a_j) against K(SC|nu) + sum F_G(E_j)."""
    if model.a_inf != 1.0 or model.b_inf != 0.0:
        raise ParameterError("sumrule_verify requires the free (SC) tail")
    jacobi_side = hermite_rate(model.head).value
    measure = measure_side_rate(model, SC, n=n)
    gap = jacobi_side - measure.value
    if math.isinf(jacobi_side) and math.isinf(measure.value):
        gap = 0.0
    return SumRuleReport(
        jacobi_side=jacobi_side,
        measure_side=measure.value,
        gap=gap,
        outlier_list=outliers(model),
    )


@dataclass
class ConjectureReport:
    """Gap report for an unproven sum rule. Never a pass/fail verdict."""

    family: str
    coefficient_side: RateReport
    measure_side: RateReport
    gap: float
    label: str = "CONJECTURE"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "family": self.family,
            "coefficient_side": self.coefficient_side.to_json(),
            "measure_side": self.measure_side.to_json(),
            "gap": self.gap,
        }


def conjecture_probe_laguerre(
    model: TailJacobiModel, tau: float, n_coeff: int = 2000, n_quad: int = 2048
) -> ConjectureReport:
    """Laguerre conjecture: sum G(d_k) + tau sum G(s_k/sqrt(tau)) against
    K(MP(tau) | nu) + sum F_L(E_j). Requires the MP(tau) tail."""
    rt = math.sqrt(tau)
    if abs(model.a_inf - rt) > 1e-12 or abs(model.b_inf - (1.0 + tau)) > 1e-12:
        raise ParameterError(f"model tail must be (sqrt(tau), 1+tau) for tau = {tau}")
    coeffs = model.coefficients(n_coeff)
    d, s = ds_factorize(coeffs)
    coeff_report = laguerre_rate(d, s, tau, check_tau1_identity=False)
    # tail estimate from the last computed terms of the factorization
    tail_terms = [big_g(dk) for dk in d[-10:]] + [tau * big_g(sk / rt) for sk in s[-10:]]
    coeff_report.tail_bound = float(n_coeff * max(tail_terms)) if tail_terms else 0.0
    mp = EquilibriumLaw(Family.MARCHENKO_PASTUR, tau=tau)
    measure_report = measure_side_rate(model, mp, n=n_quad)
    return ConjectureReport(
        family="laguerre",
        coefficient_side=coeff_report,
        measure_side=measure_report,
        gap=coeff_report.value - measure_report.value,
    )


def jacobi_limit_alphas(kappa1: float, kappa2: float) -> tuple[float, float]:
    """Almost-sure limits of the even/odd Verblunsky coefficients under the
    package's symmetric-beta convention (mean (b - a)/(b + a)).

    Note the even-index limit is the sign flip of the one displayed in the
    source analysis; the flipped value is the one consistent with the
    Kesten-McKay support geometry.
    """
    d = 2.0 + kappa1 + kappa2
    return (kappa1 - kappa2) / d, -(kappa1 + kappa2) / d


def _jacobi_coefficient_rate(alpha: np.ndarray, kappa1: float, kappa2: float) -> RateReport:
    """Per-index corrected rate vanishing at jacobi_limit_alphas: even index
    (u, v) = (1 + kappa2, 1 + kappa1), odd (u, v) = (1 + kappa1 + kappa2, 1)."""
    terms = []
    total = 0.0
    for k, al in enumerate(alpha):
        u, v = (
            (1.0 + kappa2, 1.0 + kappa1) if k % 2 == 0 else (1.0 + kappa1 + kappa2, 1.0)
        )
        t = beta_h(u, v, float(al), BetaHVariant.CORRECTED)
        terms.append((f"alpha_{k}", t))
        total += t
    return RateReport(value=total, terms=terms, truncation=len(alpha))


def conjecture_probe_jacobi(
    alpha_head,
    kappa1: float,
    kappa2: float,
    n_pairs: int = 300,
    n_quad: int = 2048,
) -> ConjectureReport:
    """Jacobi-ensemble conjecture: Verblunsky-side rate against
    K(KMK | nu) + sum F_J(E_j) after mapping the spectrum to [0, 1].

    alpha_head is a finite Verblunsky prefix (package convention); the
    sequence is extended by the limiting values, producing a constant-tail
    Jacobi model through the Geronimus relations.
    """
    head = np.asarray(
        alpha_head.alpha if isinstance(alpha_head, VerblunskyCoeffs) else alpha_head,
        dtype=float,
    )
    al_even, al_odd = jacobi_limit_alphas(kappa1, kappa2)
    total_len = 2 * n_pairs - 1
    alpha = np.array(
        [
            head[k] if k < len(head) else (al_even if k % 2 == 0 else al_odd)
            for k in range(total_len)
        ]
    )
    coeff_report = _jacobi_coefficient_rate(alpha, kappa1, kappa2)

    # constant-tail model via Geronimus: coefficients settle once past the head
    head_span = len(head) // 2 + 2
    full = geronimus(VerblunskyCoeffs(alpha), head_span + 4)
    a_star = math.sqrt((1.0 - al_odd**2) * (1.0 - al_even**2))
    b_star = -2.0 * al_odd * al_even
    model = TailJacobiModel(
        a_inf=a_star,
        b_inf=b_star,
        head=JacobiCoeffs(full.b[:head_span], full.a[:head_span]),
    )
    d = 2.0 + kappa1 + kappa2
    if kappa1 == 0.0 and kappa2 == 0.0:
        reference = ARCSINE_01
        u_minus, u_plus = 0.0, 1.0
    else:
        u_minus, u_plus = u_pm((1.0 + kappa1) / d, (1.0 + kappa1 + kappa2) / d)
        reference = EquilibriumLaw(Family.KESTEN_MCKAY, u_minus=u_minus, u_plus=u_plus)

    # Kullback term on [0, 1]: the model lives on [-2, 2], push through s
    lo, hi = reference.support
    grid = ChebGrid.for_interval(lo, hi, n_quad)
    px = density(reference, grid.nodes)
    qx = 4.0 * ac_density(model, 4.0 * grid.nodes - 2.0)
    if np.any(qx <= 0.0):
        kterm = math.inf
    else:
        kterm = float(np.dot(grid.weights, px * (np.log(px) - np.log(qx))))
    terms = [("kullback", kterm)]
    total = kterm
    for e, mass in outliers(model, span=4.0 / a_star):
        eu = float(affine_s(e))
        c = rate_fj(eu, u_minus, u_plus) if 0.0 < eu < 1.0 else math.inf
        terms.append((f"F_J({eu:.12g})", c))
        total += c
    measure_report = RateReport(value=total, terms=terms, truncation=n_quad)
    return ConjectureReport(
        family="jacobi_kn",
        coefficient_side=coeff_report,
        measure_side=measure_report,
        gap=coeff_report.value - measure_report.value,
    )
