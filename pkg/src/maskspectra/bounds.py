"""Analytic bounds on the peak off-center DFT magnitude of a Bernoulli mask.

Four bound families are provided for max_{k!=0} |A_k|, where A is the DFT
of a length-N mask with keep-probability p and support size n_p:

* worst case       -- exact maximum over all masks with n_p ones (prime N),
                      attained by a contiguous block; equals the Dirichlet
                      kernel value sin(pi*n_p/N)/sin(pi/N).
* Gaussian model   -- threshold T(eps) such that, modeling Re/Im parts as
                      N(0, p(1-p)N), the per-bin tail probability is <= eps.
* Gaussian, approx -- same threshold with Q(x) ~ exp(-x^2/2)/2, giving the
                      closed form 2*sqrt(p(1-p)N*ln(1/eps)).
* m-sigma          -- m*sqrt(p(1-p)N) for m in {3, 4}.

A large-N approximation of the worst-case-to-support ratio is also exposed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erfc

from .masks import is_prime

__all__ = [
    "BoundSpec",
    "GaussianModel",
    "BoundReport",
    "worst_case_bound",
    "dirichlet_closed_form",
    "ratio_approximation",
    "q_function",
    "q_inverse",
    "gaussian_bound",
    "gaussian_bound_approx",
    "sigma_bound",
    "bound_report",
]


@dataclass(frozen=True)
class BoundSpec:
    """Inputs shared by the bound evaluators.

    n_p defaults to ceil(n*p), the typical support size. union_mode=False
    keeps the per-bin tail budget eps as-is; union_mode=True divides it by
    the N-1 candidate bins (union bound over all of them).
    """

    n: int
    p: float
    n_p: int | None = None
    epsilon: float = 1e-4
    union_mode: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p!r}")
        if self.n_p is None:
            object.__setattr__(self, "n_p", math.ceil(self.n * self.p))
        if not 1 <= self.n_p <= self.n:
            raise ValueError(f"n_p must lie in [1, {self.n}], got {self.n_p!r}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")

    @property
    def effective_epsilon(self) -> float:
        return self.epsilon / (self.n - 1) if self.union_mode else self.epsilon


@dataclass(frozen=True)
class GaussianModel:
    """Zero-mean Gaussian model of Re{A_k} / Im{A_k} for k != 0.

    The default variance p(1-p)N matches the bound derivation; the exact
    single-component variance is p(1-p)N/2 (sum of cos^2 over a full period
    is N/2), selectable with exact=True.
    """

    variance: float
    mean: float = 0.0
    sigma: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.variance > 0.0:
            raise ValueError("variance must be positive")
        object.__setattr__(self, "sigma", math.sqrt(self.variance))

    @classmethod
    def for_mask(cls, n: int, p: float, exact: bool = False) -> "GaussianModel":
        v = p * (1.0 - p) * n
        return cls(variance=v / 2.0 if exact else v)


@dataclass(frozen=True)
class BoundReport:
    """All bound families evaluated for one (n, p, n_p, epsilon).

    worst_case_ratio is worst_case / n_p; worst_case_ratio_np divides by the
    continuous mean support N*p instead, which is the normalization used by
    the reference ratio figures. ratio_approx is the closed-form large-N
    approximation of worst_case / (N*p).
    """

    n: int
    p: float
    n_p: int
    epsilon: float
    worst_case: float
    worst_case_ratio: float
    worst_case_ratio_np: float
    gaussian_T: float
    gaussian_T_approx: float
    sigma3: float
    sigma4: float
    ratio_approx: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "n_p": self.n_p,
            "epsilon": self.epsilon,
            "worst_case": self.worst_case,
            "worst_case_ratio": self.worst_case_ratio,
            "worst_case_ratio_np": self.worst_case_ratio_np,
            "gaussian_T": self.gaussian_T,
            "gaussian_T_approx": self.gaussian_T_approx,
            "sigma3": self.sigma3,
            "sigma4": self.sigma4,
            "ratio_approx": self.ratio_approx,
        }


@lru_cache(maxsize=8)
def _cos_table(n: int) -> np.ndarray:
    i = np.arange(1, n // 2 + 1, dtype=np.float64)
    table = np.cos((2.0 * np.pi / n) * i)
    table.flags.writeable = False
    return table


def _warn_if_composite(n: int) -> None:
    if not is_prime(n):
        warnings.warn(
            f"worst-case bound assumes prime mask length; n={n} is composite, "
            "so the contiguous block may not be the true maximizer",
            stacklevel=3,
        )


def worst_case_bound(n: int, n_p: int) -> float:
    """Peak off-center DFT magnitude of the contiguous-block mask.

    Evaluates sqrt(n_p + 2 * sum_{i<n_p} (n_p - i) * cos(2*pi*i/n)). The
    radicand is identical for n_p and n - n_p ones (the block's spectrum
    magnitude depends only on sin^2(pi*n_p/n)), so the complementary block
    is summed when n_p > n/2: fewer terms, and no catastrophic cancellation
    as n_p approaches n. Terms are accumulated with exact (fsum) summation.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    if not 1 <= n_p <= n:
        raise ValueError(f"n_p must lie in [1, {n}], got {n_p!r}")
    _warn_if_composite(n)
    m = min(n_p, n - n_p)
    if m == 0:
        return 0.0
    if m == 1:
        return 1.0
    i = np.arange(1, m)
    terms = (m - i) * _cos_table(n)[: m - 1]
    radicand = m + 2.0 * math.fsum(terms.tolist())
    return math.sqrt(max(radicand, 0.0))


def dirichlet_closed_form(n: int, n_p: int) -> float:
    """|sin(pi*n_p/n) / sin(pi/n)|: the block spectrum's k=1 magnitude.

    Independent closed-form route to the same quantity as worst_case_bound.
    The numerator argument is reduced via sin(pi*n_p/n) = sin(pi*(n-n_p)/n)
    to keep it in [0, pi/2].
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    if not 1 <= n_p <= n:
        raise ValueError(f"n_p must lie in [1, {n}], got {n_p!r}")
    m = min(n_p, n - n_p)
    if m == 0:
        return 0.0
    return abs(math.sin(math.pi * m / n) / math.sin(math.pi / n))


def ratio_approximation(n: int, p: float) -> float:
    """Large-N closed form for the worst-case ratio |A_k|_max / (N*p).

    (1/(Np)) * sqrt(Np + (N^2/pi^2) sin^2(p*pi)
                    - N [sin(p*pi) - sin(2*p*pi)/(2*pi)]).
    The radicand can round below zero for tiny N*p; it is then clamped to 0
    with a warning. Tends to sin(p*pi)/(p*pi) as N grows.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < p <= 1.0 or n * p < 1.0:
        raise ValueError(f"need 0 < p <= 1 and n*p >= 1, got n={n}, p={p!r}")
    np_mean = n * p
    s = math.sin(p * math.pi)
    radicand = np_mean + (n / math.pi) ** 2 * s * s - n * (s - math.sin(2.0 * p * math.pi) / (2.0 * math.pi))
    if radicand < 0.0:
        warnings.warn(f"ratio approximation radicand {radicand:.3g} < 0 at n={n}, p={p}; clamped to 0")
        radicand = 0.0
    return math.sqrt(radicand) / np_mean


def q_function(x) -> float | np.ndarray:
    """Standard normal tail probability Q(x) = erfc(x/sqrt(2))/2."""
    out = 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


_SQRT_2PI = math.sqrt(2.0 * math.pi)


def q_inverse(y: float) -> float:
    """Inverse of q_function, solved to |Q(x) - y| <= 1e-12 * y.

    Bracketed Newton iteration on q_function itself (Q' = -pdf), falling
    back to bisection whenever a step leaves the bracket or the pdf
    underflows in the far tail.
    """
    if not 0.0 < y < 1.0:
        raise ValueError(f"q_inverse argument must lie in (0, 1), got {y!r}")
    if y == 0.5:
        return 0.0
    if y > 0.5:
        return -q_inverse(1.0 - y)

    lo, hi = 0.0, 1.0
    while q_function(hi) > y:
        lo, hi = hi, hi * 2.0
    x = 0.5 * (lo + hi)
    for _ in range(200):
        qx = q_function(x)
        err = qx - y
        if abs(err) <= 1e-12 * y:
            return x
        if err > 0.0:  # Q decreasing: x is still left of the root
            lo = x
        else:
            hi = x
        pdf = math.exp(-0.5 * x * x) / _SQRT_2PI
        step_ok = False
        if pdf > 0.0:
            nxt = x + err / pdf
            step_ok = lo < nxt < hi
        x = nxt if step_ok else 0.5 * (lo + hi)
        if hi - lo <= math.ulp(hi):
            return x
    return x


def gaussian_bound(spec: BoundSpec, exact_variance: bool = False) -> float:
    """Threshold T with per-bin P(|A_k| > T) <= eps under the Gaussian model.

    T = sqrt(2 * var) * Q^-1(eps'/2), splitting the eps budget between the
    real and imaginary parts; eps' is spec.effective_epsilon.
    """
    model = GaussianModel.for_mask(spec.n, spec.p, exact=exact_variance)
    return math.sqrt(2.0 * model.variance) * q_inverse(spec.effective_epsilon / 2.0)


def gaussian_bound_approx(spec: BoundSpec, exact_variance: bool = False) -> float:
    """gaussian_bound with the tail approximation Q(x) ~ exp(-x^2/2)/2.

    Closed form 2*sqrt(var * ln(1/eps')); an upper bound on gaussian_bound
    since Q(x) <= exp(-x^2/2)/2 for x >= 0.
    """
    model = GaussianModel.for_mask(spec.n, spec.p, exact=exact_variance)
    return 2.0 * math.sqrt(model.variance * math.log(1.0 / spec.effective_epsilon))


def sigma_bound(n: int, p: float, m: int, allow_general_m: bool = False) -> float:
    """m-standard-deviation bound m * sqrt(p(1-p)N), m in {3, 4}.

    The m=4 value is computed as (4/3) times the m=3 value so their ratio
    is exactly 4/3 in floating point. Other m need allow_general_m and are
    accepted with a warning.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    if m not in (3, 4):
        if not allow_general_m:
            raise ValueError(f"m must be 3 or 4 (pass allow_general_m=True to override), got {m!r}")
        warnings.warn(f"sigma bound with nonstandard multiplier m={m}")
        return m * math.sqrt(p * (1.0 - p) * n)
    sigma3 = 3.0 * math.sqrt(p * (1.0 - p) * n)
    return sigma3 if m == 3 else (4.0 / 3.0) * sigma3


def bound_report(spec: BoundSpec, exact_variance: bool = False) -> BoundReport:
    """Evaluate every bound family for one spec."""
    worst = worst_case_bound(spec.n, spec.n_p)
    sigma3 = sigma_bound(spec.n, spec.p, 3)
    return BoundReport(
        n=spec.n,
        p=spec.p,
        n_p=spec.n_p,
        epsilon=spec.epsilon,
        worst_case=worst,
        worst_case_ratio=worst / spec.n_p,
        worst_case_ratio_np=worst / (spec.n * spec.p),
        gaussian_T=gaussian_bound(spec, exact_variance=exact_variance),
        gaussian_T_approx=gaussian_bound_approx(spec, exact_variance=exact_variance),
        sigma3=sigma3,
        sigma4=(4.0 / 3.0) * sigma3,
        ratio_approx=ratio_approximation(spec.n, spec.p),
    )
