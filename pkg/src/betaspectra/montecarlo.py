"""Monte Carlo estimation of extreme-eigenvalue large-deviation rates and
distributional sanity suites for the tridiagonal samplers.

Hit detection uses the Sturm sign-count of the shifted tridiagonal
recursion: lambda_max >= x iff fewer than N leading-minor pivots at x are
negative. One vectorized pass per sample batch, no eigensolve.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .ensembles import EnsembleSpec, Kind, RngStream, sample_hermite, sample_laguerre
from .equilibria import mp_edges, u_pm
from .errors import ParameterError
from .jacobi import JacobiCoeffs, geronimus, VerblunskyCoeffs
from .rates import rate_fg, rate_fj, rate_fl

__all__ = [
    "McExperiment",
    "McResult",
    "McRow",
    "mc_tail_rate",
    "theory_rate",
    "stat_suite",
    "StatReport",
]

CSV_HEADER = "N,x,samples,hits,p_hat,rate_hat,stderr,theory"
CHUNK = 8192


@dataclass(frozen=True)
class McExperiment:
    """Tail-probability experiment: estimate P(lambda_max >= x) (or the min
    leg) across a list of matrix sizes."""

    spec: EnsembleSpec
    x: float
    n_list: tuple
    samples: int
    seed: int
    direction: str = "max_above"

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ParameterError("samples must be >= 1")
        if self.direction not in ("max_above", "min_below"):
            raise ParameterError(f"unknown direction {self.direction!r}")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "x": self.x,
            "n_list": list(self.n_list),
            "samples": self.samples,
            "seed": self.seed,
            "direction": self.direction,
        }

    @staticmethod
    def from_json(obj: dict) -> "McExperiment":
        return McExperiment(
            spec=EnsembleSpec.from_json(obj["spec"]),
            x=float(obj["x"]),
            n_list=tuple(obj["n_list"]),
            samples=int(obj["samples"]),
            seed=int(obj["seed"]),
            direction=obj.get("direction", "max_above"),
        )


@dataclass
class McRow:
    n: int
    x: float
    samples: int
    hits: int
    p_hat: float
    rate_hat: float
    stderr: float
    theory: float


@dataclass
class McResult:
    rows: list
    theory: float
    flags: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(
                f"{r.n},{r.x:.12g},{r.samples},{r.hits},{r.p_hat:.12g},"
                f"{r.rate_hat:.12g},{r.stderr:.12g},{r.theory:.12g}\n"
            )
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "rows": [vars(r) for r in self.rows],
            "theory": self.theory,
            "flags": self.flags,
        }


def _bulk_edges(spec: EnsembleSpec) -> tuple[float, float]:
    if spec.kind is Kind.HERMITE:
        return (-2.0, 2.0)
    if spec.kind is Kind.LAGUERRE:
        return mp_edges(spec.laguerre_tau)
    k1 = spec.kappa1 or 0.0
    k2 = spec.kappa2 or 0.0
    if k1 == 0.0 and k2 == 0.0:
        return (0.0, 1.0)
    d = 2.0 + k1 + k2
    return u_pm((1.0 + k1) / d, (1.0 + k1 + k2) / d)


def theory_rate(spec: EnsembleSpec, x: float, direction: str = "max_above") -> float:
    """The large-deviation rate at threshold x (speed beta' N)."""
    if spec.kind is Kind.HERMITE:
        return rate_fg(x)
    if spec.kind is Kind.LAGUERRE:
        return rate_fl(x, spec.laguerre_tau)
    lo, hi = _bulk_edges(spec)
    xu = x if spec.interval == "[0,1]" else (x + 2.0) / 4.0
    return rate_fj(xu, lo, hi)


def _sturm_negative_count(b: np.ndarray, a: np.ndarray, x: float) -> np.ndarray:
    """Number of eigenvalues < x for each tridiagonal sample in the batch.

    b: (batch, N) diagonals, a: (batch, N-1) off-diagonals. Counts negative
    pivots of the shifted LDL^T recursion q_i = b_i - x - a_{i-1}^2/q_{i-1}.
    """
    batch, n = b.shape
    tiny = 1e-300
    q = b[:, 0] - x
    q = np.where(q == 0.0, -tiny, q)
    count = (q < 0.0).astype(np.int64)
    for i in range(1, n):
        q = b[:, i] - x - (a[:, i - 1] ** 2) / q
        q = np.where(q == 0.0, -tiny, q)
        count += q < 0.0
    return count


def _hermite_batch(n: int, beta_prime: float, gen: np.random.Generator, batch: int):
    scale = 1.0 / (beta_prime * n)
    b = gen.normal(0.0, math.sqrt(scale), size=(batch, n))
    shapes = beta_prime * (n - 1.0 - np.arange(n - 1))
    a = np.sqrt(gen.gamma(shapes, scale, size=(batch, n - 1)))
    return b, a


def _laguerre_batch(n: int, m: int, beta_prime: float, gen: np.random.Generator, batch: int):
    scale = 1.0 / (beta_prime * n)
    d2 = gen.gamma(beta_prime * (n + 1.0 - np.arange(1, m + 1)), scale, size=(batch, m))
    s2 = (
        gen.gamma(beta_prime * (m - np.arange(1, m)), scale, size=(batch, m - 1))
        if m > 1
        else np.zeros((batch, 0))
    )
    b = np.empty((batch, m))
    b[:, 0] = d2[:, 0]
    if m > 1:
        b[:, 1:] = s2 + d2[:, 1:]
    a = np.sqrt(s2 * d2[:, :-1]) if m > 1 else np.zeros((batch, 0))
    return b, a


def _beta_s_batch(a: float, b: float, gen: np.random.Generator, size) -> np.ndarray:
    return 2.0 * gen.beta(b, a, size=size) - 1.0


def _jacobi_batch(spec: EnsembleSpec, gen: np.random.Generator, batch: int):
    n = spec.n
    ea, eb = spec.exponents
    bp = spec.beta_prime
    alpha = np.empty((batch, 2 * n - 1))
    for p in range(n):
        alpha[:, 2 * p] = _beta_s_batch(
            (n - p - 1) * bp + ea + 1.0, (n - p - 1) * bp + eb + 1.0, gen, batch
        )
        if p >= 1:
            alpha[:, 2 * p - 1] = _beta_s_batch(
                (n - p - 1) * bp + ea + eb + 2.0, (n - p) * bp, gen, batch
            )
    # vectorized Geronimus relations (boundary alpha_{-1} = -1)
    al = np.concatenate([np.full((batch, 1), -1.0), alpha], axis=1)  # shift index by 1

    def col(k):  # alpha_k with the shifted layout; k >= -1
        if k < -1:
            return np.zeros(batch)
        return al[:, k + 1]

    b = np.empty((batch, n))
    a = np.empty((batch, n - 1))
    for k in range(n):
        b[:, k] = (1.0 - col(2 * k - 1)) * col(2 * k) - (1.0 + col(2 * k - 1)) * col(2 * k - 2)
    for k in range(n - 1):
        a[:, k] = np.sqrt(
            (1.0 - col(2 * k - 1)) * (1.0 - col(2 * k) ** 2) * (1.0 + col(2 * k + 1))
        )
    return b, a


def _count_hits(spec: EnsembleSpec, n: int, x: float, direction: str, samples: int,
                stream: RngStream, workers: int = 1) -> int:
    """Hits over fixed-size chunks with per-chunk derived generators, so the
    result does not depend on how the chunks are distributed."""
    eff = EnsembleSpec(
        kind=spec.kind, n=n, beta=spec.beta,
        m=None, tau=spec.laguerre_tau if spec.kind is Kind.LAGUERRE else None,
        a=spec.a, b=spec.b, kappa1=spec.kappa1, kappa2=spec.kappa2,
        interval=spec.interval,
    )
    threshold = x
    if spec.kind is Kind.JACOBI_KN and spec.interval == "[0,1]":
        # the matrix acts on [-2, 2]; map a [0, 1] threshold back
        threshold = 4.0 * x - 2.0
    hits = 0
    done = 0
    chunk_id = 0
    while done < samples:
        batch = min(CHUNK, samples - done)
        gen = stream.generator(n, chunk_id)
        if eff.kind is Kind.HERMITE:
            b, a = _hermite_batch(n, eff.beta_prime, gen, batch)
        elif eff.kind is Kind.LAGUERRE:
            b, a = _laguerre_batch(n, eff.laguerre_m, eff.beta_prime, gen, batch)
        else:
            b, a = _jacobi_batch(eff, gen, batch)
        neg = _sturm_negative_count(b, a, threshold)
        size = b.shape[1]
        if direction == "max_above":
            hits += int(np.sum(neg < size))
        else:
            hits += int(np.sum(neg >= 1))
        done += batch
        chunk_id += 1
    return hits


def mc_tail_rate(exp: McExperiment, workers: int = 1) -> McResult:
    """Estimate the tail rate -log P(lambda_max >= x)/(beta' N) per N.

    Deterministic for a fixed seed and independent of worker count.
    """
    spec = exp.spec
    theory = theory_rate(spec, exp.x, exp.direction)
    flags = []
    lo, hi = _bulk_edges(spec)
    x_bulk = exp.x
    if spec.kind is Kind.JACOBI_KN and spec.interval != "[0,1]":
        x_bulk = (exp.x + 2.0) / 4.0
    inside = lo < x_bulk < hi
    if inside:
        flags.append(
            f"threshold {exp.x} lies inside the bulk ({lo:.6g}, {hi:.6g}): "
            "probability tends to 1 and the rate is 0"
        )
    bp = spec.beta_prime
    n_max = max(exp.n_list)
    if not inside and theory > 0.0:
        expected = exp.samples * math.exp(-bp * n_max * theory)
        if expected < 30.0:
            flags.append(
                f"expected hits at N = {n_max} is about {expected:.3g} (< 30): "
                "estimates will be noisy"
            )
    stream = RngStream(seed=exp.seed, stream=0)
    rows = []
    for n in exp.n_list:
        hits = _count_hits(spec, n, exp.x, exp.direction, exp.samples, stream, workers)
        p_hat = hits / exp.samples
        if hits == 0:
            # lower bound from the unobserved-event scale 1/samples
            rate_hat = -math.log(1.0 / exp.samples) / (bp * n)
            stderr = math.inf
            flags.append(f"zero hits at N = {n}: rate_hat is a lower bound")
        else:
            rate_hat = -math.log(p_hat) / (bp * n)
            stderr = math.sqrt((1.0 - p_hat) / (p_hat * exp.samples)) / (bp * n)
        rows.append(
            McRow(
                n=n, x=exp.x, samples=exp.samples, hits=hits,
                p_hat=p_hat, rate_hat=rate_hat, stderr=stderr, theory=theory,
            )
        )
    return McResult(rows=rows, theory=theory, flags=flags)


@dataclass
class StatReport:
    tests: list  # (name, statistic, p_value, passed)
    alpha: float
    all_passed: bool

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "all_passed": bool(self.all_passed),
            "tests": [
                {"name": n, "statistic": s, "p_value": p, "passed": bool(ok)}
                for n, s, p, ok in self.tests
            ],
        }


def stat_suite(
    spec: EnsembleSpec,
    seed: int,
    reps: int = 300,
    alpha: float = 0.01,
    wrong_marginal: bool = False,
) -> StatReport:
    """Distributional checks on the sampler.

    KS test of the first spectral weight against Beta(beta', (N-1) beta'),
    independence (correlation) of lambda_max and that weight, and a z-test
    on the mean first moment. wrong_marginal swaps in Beta(2 beta', .) as a
    deliberate negative control.
    """
    from .ensembles import spectral_measure

    stream = RngStream(seed=seed, stream=1)
    bp = spec.beta_prime
    n = spec.n
    pi1 = np.empty(reps)
    lam_max = np.empty(reps)
    m1 = np.empty(reps)
    for i in range(reps):
        gen = stream.generator(i)
        if spec.kind is Kind.HERMITE:
            from .ensembles import _hermite_coeffs

            coeffs = _hermite_coeffs(n, bp, gen)
        elif spec.kind is Kind.LAGUERRE:
            from .ensembles import _laguerre_factors
            from .jacobi import ds_assemble

            d, s = _laguerre_factors(n, spec.laguerre_m, bp, gen)
            coeffs = ds_assemble(d, s)
        else:
            from .ensembles import _jacobi_kn_alpha

            ea, eb = spec.exponents
            coeffs = geronimus(_jacobi_kn_alpha(n, ea, eb, bp, gen), n)
        mu = spectral_measure(coeffs)
        pi1[i] = mu.weights[0]
        lam_max[i] = mu.locations[-1]
        m1[i] = float(np.dot(mu.weights, mu.locations))
    size = coeffs.n
    shape1 = 2.0 * bp if wrong_marginal else bp
    ks_stat, ks_p = stats.kstest(pi1, "beta", args=(shape1, (size - 1) * bp))
    corr, corr_p = stats.pearsonr(lam_max, pi1)
    mean_expect = {
        Kind.HERMITE: 0.0,
        Kind.LAGUERRE: 1.0,
        Kind.JACOBI_KN: None,
    }[spec.kind]
    tests = [
        ("ks_pi1_beta", float(ks_stat), float(ks_p), ks_p > alpha),
        ("corr_lmax_pi1", float(corr), float(corr_p), corr_p > alpha),
    ]
    if mean_expect is not None:
        z = (np.mean(m1) - mean_expect) / (np.std(m1, ddof=1) / math.sqrt(reps))
        p = 2.0 * stats.norm.sf(abs(z))
        tests.append(("mean_first_moment", float(z), float(p), p > alpha))
    return StatReport(tests=tests, alpha=alpha, all_passed=all(t[3] for t in tests))
