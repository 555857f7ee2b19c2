"""Tridiagonal samplers for the beta-Hermite, beta-Laguerre and
Killip-Nenciu beta-Jacobi ensembles, plus the primitive distributions.

All samplers are pure functions of an RngStream: identical (seed, stream)
reproduces identical coefficient sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterError
from .jacobi import (
    DiscreteMeasure,
    JacobiCoeffs,
    VerblunskyCoeffs,
    affine_s,
    ds_assemble,
    geronimus,
    spectral_decompose,
)

__all__ = [
    "Kind",
    "EnsembleSpec",
    "RngStream",
    "LaguerreDraw",
    "sample_primitive",
    "sample_hermite",
    "sample_laguerre",
    "sample_jacobi_kn",
    "spectral_measure",
    "esd",
]


class Kind(str, Enum):
    HERMITE = "hermite"
    LAGUERRE = "laguerre"
    JACOBI_KN = "jacobi_kn"


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream: (seed, stream id) -> generator.

    Substreams derived from integer keys are independent and stable across
    runs, platforms and chunking of parallel work.
    """

    seed: int
    stream: int = 0

    def generator(self, *subkeys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream, *subkeys))
        return np.random.default_rng(ss)

    def substream(self, *subkeys: int) -> "RngStream":
        # fold subkeys into a derived stream id deterministically
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream, *subkeys))
        return RngStream(seed=self.seed, stream=int(ss.generate_state(1, np.uint64)[0] >> 1))


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble to sample and with what parameters.

    Laguerre takes either m (column count) or tau = m/N; Jacobi-KN takes
    fixed exponents (a, b) or slopes (kappa1, kappa2) with the scaling
    b(N) = beta' * kappa1 * N, a(N) = beta' * kappa2 * N.
    """

    kind: Kind
    n: int
    beta: float
    m: int | None = None
    tau: float | None = None
    a: float | None = None
    b: float | None = None
    kappa1: float | None = None
    kappa2: float | None = None
    interval: str = "[-2,2]"

    def __post_init__(self) -> None:
        if self.beta <= 0.0:
            raise ParameterError(f"beta must be > 0, got {self.beta}")
        if self.n < 1:
            raise ParameterError(f"N must be >= 1, got {self.n}")
        if self.kind is Kind.LAGUERRE:
            if self.m is None and self.tau is None:
                raise ParameterError("Laguerre needs m or tau")
            if self.m is not None and not (1 <= self.m <= self.n):
                raise ParameterError(f"Laguerre needs 1 <= m <= N, got m = {self.m}")
            if self.tau is not None and not (0.0 < self.tau <= 1.0):
                raise ParameterError(f"Laguerre needs tau in (0, 1], got {self.tau}")
        if self.kind is Kind.JACOBI_KN:
            ea, eb = self.exponents
            if ea <= -1.0 or eb <= -1.0:
                raise ParameterError(f"Jacobi exponents must be > -1, got a = {ea}, b = {eb}")

    @property
    def beta_prime(self) -> float:
        return self.beta / 2.0

    @property
    def laguerre_m(self) -> int:
        if self.m is not None:
            return self.m
        return max(1, int(round(self.tau * self.n)))

    @property
    def laguerre_tau(self) -> float:
        return self.tau if self.tau is not None else self.m / self.n

    @property
    def exponents(self) -> tuple[float, float]:
        """Jacobi exponents (a, b), resolving slope scaling when given."""
        if self.kappa1 is not None or self.kappa2 is not None:
            k1 = self.kappa1 or 0.0
            k2 = self.kappa2 or 0.0
            if k1 < 0.0 or k2 < 0.0:
                raise ParameterError("slopes kappa must be >= 0")
            return self.beta_prime * k2 * self.n, self.beta_prime * k1 * self.n
        return (self.a if self.a is not None else 0.0, self.b if self.b is not None else 0.0)

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "n": self.n, "beta": self.beta}
        for key in ("m", "tau", "a", "b", "kappa1", "kappa2"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.kind is Kind.JACOBI_KN:
            out["interval"] = self.interval
        return out

    @staticmethod
    def from_json(obj: dict) -> "EnsembleSpec":
        return EnsembleSpec(
            kind=Kind(obj["kind"]),
            n=int(obj["n"]),
            beta=float(obj["beta"]),
            m=obj.get("m"),
            tau=obj.get("tau"),
            a=obj.get("a"),
            b=obj.get("b"),
            kappa1=obj.get("kappa1"),
            kappa2=obj.get("kappa2"),
            interval=obj.get("interval", "[-2,2]"),
        )


def sample_gauss(sigma2: float, rng: np.random.Generator, size=None):
    if sigma2 <= 0.0:
        raise ParameterError("variance must be > 0")
    return rng.normal(0.0, np.sqrt(sigma2), size=size)


def sample_gamma(shape: float, scale: float, rng: np.random.Generator, size=None):
    if shape <= 0.0 or scale <= 0.0:
        raise ParameterError("gamma shape and scale must be > 0")
    return rng.gamma(shape, scale, size=size)


def sample_beta_s(a: float, b: float, rng: np.random.Generator, size=None):
    """Symmetric-beta draw on (-1, 1] with density prop. to (1-x)^(a-1)(1+x)^(b-1).

    The (a, b) order is pinned by the mean (b - a)/(b + a): x = 2*Beta(b, a) - 1.
    """
    if a <= 0.0 or b <= 0.0:
        raise ParameterError("beta_s parameters must be > 0")
    return 2.0 * rng.beta(b, a, size=size) - 1.0


def sample_dirichlet(params, rng: np.random.Generator):
    params = np.asarray(params, dtype=float)
    if params.size == 0 or np.min(params) <= 0.0:
        raise ParameterError("Dirichlet parameters must be > 0")
    return rng.dirichlet(params)


def sample_primitive(dist: str, params, rng: RngStream | np.random.Generator, size=None):
    """Dispatch on {gauss, gamma, beta_s, dirichlet} with positional params."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    if dist == "gauss":
        return sample_gauss(params[0], gen, size)
    if dist == "gamma":
        return sample_gamma(params[0], params[1], gen, size)
    if dist == "beta_s":
        return sample_beta_s(params[0], params[1], gen, size)
    if dist == "dirichlet":
        return sample_dirichlet(params, gen)
    raise ParameterError(f"unknown primitive distribution {dist!r}")


def _hermite_coeffs(n: int, beta_prime: float, gen: np.random.Generator) -> JacobiCoeffs:
    scale = 1.0 / (beta_prime * n)
    b = gen.normal(0.0, np.sqrt(scale), size=n)
    shapes = beta_prime * (n - 1.0 - np.arange(n - 1))
    a = np.sqrt(gen.gamma(shapes, scale)) if n > 1 else np.empty(0)
    return JacobiCoeffs(b, a)


def sample_hermite(spec: EnsembleSpec, rng: RngStream) -> JacobiCoeffs:
    """Tridiagonal model of the normalized Gaussian beta-ensemble:
    b_j ~ N(0, 1/(beta' N)), a_j^2 ~ gamma(beta'(N-1-j), 1/(beta' N))."""
    if spec.kind is not Kind.HERMITE:
        raise ParameterError("spec.kind must be hermite")
    return _hermite_coeffs(spec.n, spec.beta_prime, rng.generator())


@dataclass(frozen=True)
class LaguerreDraw:
    d: np.ndarray
    s: np.ndarray
    coeffs: JacobiCoeffs


def _laguerre_factors(n: int, m: int, beta_prime: float, gen: np.random.Generator):
    scale = 1.0 / (beta_prime * n)
    d = np.sqrt(gen.gamma(beta_prime * (n + 1.0 - np.arange(1, m + 1)), scale))
    s = (
        np.sqrt(gen.gamma(beta_prime * (m - np.arange(1, m)), scale))
        if m > 1
        else np.empty(0)
    )
    return d, s


def sample_laguerre(spec: EnsembleSpec, rng: RngStream) -> LaguerreDraw:
    """Bidiagonal factors of the beta-Laguerre model and the Jacobi
    coefficients of L = B B^T (an m x m matrix)."""
    if spec.kind is not Kind.LAGUERRE:
        raise ParameterError("spec.kind must be laguerre")
    d, s = _laguerre_factors(spec.n, spec.laguerre_m, spec.beta_prime, rng.generator())
    return LaguerreDraw(d=d, s=s, coeffs=ds_assemble(d, s))


def _jacobi_kn_alpha(n: int, ea: float, eb: float, beta_prime: float, gen: np.random.Generator) -> VerblunskyCoeffs:
    # alpha_0..alpha_{2N-2}; even index 2p and odd index 2p-1 laws per Killip-Nenciu
    alpha = np.empty(2 * n - 1)
    for p in range(n):
        alpha[2 * p] = sample_beta_s(
            (n - p - 1) * beta_prime + ea + 1.0, (n - p - 1) * beta_prime + eb + 1.0, gen
        )
        if p >= 1:
            alpha[2 * p - 1] = sample_beta_s(
                (n - p - 1) * beta_prime + ea + eb + 2.0, (n - p) * beta_prime, gen
            )
    return VerblunskyCoeffs(alpha)


def sample_jacobi_kn(spec: EnsembleSpec, rng: RngStream) -> tuple[VerblunskyCoeffs, JacobiCoeffs]:
    """Killip-Nenciu sampler: independent symmetric-beta Verblunsky
    coefficients mapped through the Geronimus relations. The matrix acts on
    [-2, 2]; with interval == "[0,1]" the spectral data are to be pushed
    through the affine map s."""
    if spec.kind is not Kind.JACOBI_KN:
        raise ParameterError("spec.kind must be jacobi_kn")
    ea, eb = spec.exponents
    alpha = _jacobi_kn_alpha(spec.n, ea, eb, spec.beta_prime, rng.generator())
    return alpha, geronimus(alpha, spec.n)


def spectral_measure(coeffs: JacobiCoeffs, interval: str = "[-2,2]") -> DiscreteMeasure:
    """Spectral measure mu_w of (J, e_1); optionally mapped to [0, 1]."""
    mu = spectral_decompose(coeffs)
    if interval == "[0,1]":
        mu = mu.pushforward(affine_s)
    return mu


def esd(coeffs: JacobiCoeffs, interval: str = "[-2,2]") -> DiscreteMeasure:
    """Empirical spectral distribution: equal weights 1/N at the eigenvalues."""
    mu = spectral_decompose(coeffs)
    n = mu.n_atoms
    out = DiscreteMeasure(mu.locations, np.full(n, 1.0 / n))
    if interval == "[0,1]":
        out = out.pushforward(affine_s)
    return out
