"""Macroscopic rescaling and the exact four-term increment decomposition.

The rescaled field is F(t, x) = gamma * f(ceil(t/alpha), ceil(x/beta))
with ceil the least-integer-above map (so ceil(-0.3) = 0). Because the
space map sends x + beta*a exactly to the lattice neighbor, the discrete
operators below evaluate on lattice stencils with no interpolation.

At a lattice point the one-step increment splits exactly into
    A  local average minus center height,
    B  half (q - r) times the squared spread of the stencil,
    C  epsilon times the fresh noise,
    D  whatever is left (the Taylor remainder of phi).
Scaled by gamma/alpha these become the discrete heat term, the squared
gradient term, the noise term and the remainder of the macroscopic
equation, with coefficients nu, lambda, D determined by the scheme.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Tuple

import numpy as np

from .driving import DrivingFunction, HessianAtOrigin, stencil_offsets
from .lattice import HeightHistory
from .noise import NoiseModel


@dataclass(frozen=True)
class ScalingScheme:
    """Time/space/height scale factors alpha, beta, gamma as functions of eps."""

    name: str
    alpha: Callable[[float], float]
    beta: Callable[[float], float]
    gamma: Callable[[float], float]

    def validate_on_grid(self, grid: Sequence[float]) -> None:
        """alpha and beta must be positive and shrink along a decreasing grid."""
        eps = list(grid)
        if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
            raise ValueError("epsilon grid must be strictly decreasing")
        a = [self.alpha(e) for e in eps]
        b = [self.beta(e) for e in eps]
        if any(v <= 0 for v in a + b):
            raise ValueError("alpha and beta must be positive")
        if any(a2 >= a1 for a1, a2 in zip(a, a[1:])) or \
           any(b2 >= b1 for b1, b2 in zip(b, b[1:])):
            raise ValueError("alpha and beta must decrease along the grid")


def intermediate_disorder_1d() -> ScalingScheme:
    """alpha = eps^4, beta = eps^2, gamma = 1 (d=1 weak-noise window)."""
    return ScalingScheme("intermediate-disorder-1d",
                         alpha=lambda e: e ** 4,
                         beta=lambda e: e ** 2,
                         gamma=lambda e: 1.0)


def exponential_2d(C: float = 1.0) -> ScalingScheme:
    """alpha = exp(-C/eps^2), beta = sqrt(alpha), gamma = 1/eps (d=2 regime)."""
    if C <= 0:
        raise ValueError("C must be positive")
    return ScalingScheme("2d-exponential",
                         alpha=lambda e: math.exp(-C / e ** 2),
                         beta=lambda e: math.exp(-C / (2 * e ** 2)),
                         gamma=lambda e: 1.0 / e)


def power_law(alpha_exp: float, beta_exp: float, gamma_exp: float = 0.0,
              alpha_coef: float = 1.0, beta_coef: float = 1.0,
              gamma_coef: float = 1.0) -> ScalingScheme:
    """Custom scheme alpha = a*eps^p, beta = b*eps^q, gamma = c*eps^s."""
    name = f"power-law[a={alpha_coef}e^{alpha_exp},b={beta_coef}e^{beta_exp}," \
           f"g={gamma_coef}e^{gamma_exp}]"
    return ScalingScheme(name,
                         alpha=lambda e: alpha_coef * e ** alpha_exp,
                         beta=lambda e: beta_coef * e ** beta_exp,
                         gamma=lambda e: gamma_coef * e ** gamma_exp)


def make_scheme(preset: str, **kw) -> ScalingScheme:
    if preset == "intermediate-disorder-1d":
        return intermediate_disorder_1d()
    if preset == "2d-exponential":
        return exponential_2d(kw.get("C", 1.0))
    if preset in ("power-law", "custom"):
        return power_law(kw["alpha_exp"], kw["beta_exp"],
                         kw.get("gamma_exp", 0.0),
                         kw.get("alpha_coef", 1.0), kw.get("beta_coef", 1.0),
                         kw.get("gamma_coef", 1.0))
    raise ValueError(f"unknown scheme preset {preset!r}")


@dataclass(frozen=True)
class Coefficients:
    """Macroscopic equation coefficients for one (scheme, eps, phi, noise)."""

    nu: float
    lam: float
    D: float


def coefficients(scheme: ScalingScheme, epsilon: float, d: int,
                 hessian: HessianAtOrigin, sigma: float) -> Coefficients:
    """nu = beta^2/((2d+1) alpha), lambda = 2(q-r) beta^2/(alpha gamma),
    D = sigma^2 eps^2 beta^d gamma^2 / alpha."""
    a = scheme.alpha(epsilon)
    b = scheme.beta(epsilon)
    g = scheme.gamma(epsilon)
    if hessian.q_minus_r == 0:
        raise ValueError("degenerate driving function: q == r, no gradient "
                         "coefficient exists")
    nu = b * b / ((2 * d + 1) * a)
    lam = 2.0 * hessian.q_minus_r * b * b / (a * g)
    Dco = sigma * sigma * epsilon * epsilon * b ** d * g * g / a
    return Coefficients(nu=nu, lam=lam, D=Dco)


def ceil_div(u: float) -> int:
    """Least integer >= u (so -0.3 maps to 0)."""
    return int(math.ceil(u))


def lattice_point(scheme: ScalingScheme, epsilon: float, t: float,
                  x: Sequence[float]) -> Tuple[int, Tuple[int, ...]]:
    """Map a macroscopic point (t > 0, x) to its lattice cell indices."""
    if t <= 0:
        raise ValueError("macroscopic time must be positive")
    a = scheme.alpha(epsilon)
    b = scheme.beta(epsilon)
    if isinstance(x, (int, float)):
        x = (x,)
    m = ceil_div(t / a)
    v = tuple(ceil_div(c / b) for c in x)
    return m, v


@dataclass(frozen=True)
class DecompositionSample:
    """One lattice increment split into its four exact pieces."""

    epsilon: float
    t: int
    x: Tuple[int, ...]
    A: float
    B: float
    C: float
    D: float
    increment: float
    # macroscopic views, filled by macro_terms
    time_derivative: float = float("nan")
    laplacian_term: float = float("nan")
    grad_sq_term: float = float("nan")
    noise_term: float = float("nan")
    remainder: float = float("nan")
    xi: float = float("nan")

    @property
    def reconstruction(self) -> float:
        return self.A + self.B + self.C + self.D


def decompose(history: HeightHistory, phi: DrivingFunction, noise: NoiseModel,
              epsilon: float, t_lattice: int, x) -> DecompositionSample:
    """Split f(t+1,x) - f(t,x) into A + B + C + D at one lattice point.

    Needs slices t and t+1 in the history; D is defined as the difference,
    so the reconstruction identity is exact by construction and the
    interesting content is D's smallness.
    """
    cur = history.at(t_lattice)
    nxt = history.at(t_lattice + 1)
    g = cur.geometry
    xs = g.wrap(x)
    stencil = cur.stencil_at(xs)
    f = stencil[0]
    fbar = stencil.mean()
    hess = phi.hessian_origin()
    A = fbar - f
    B = 0.5 * hess.q_minus_r * float(((stencil - fbar) ** 2).sum())
    C = epsilon * noise.sample(t_lattice + 1, xs)
    inc = nxt.value_at(xs) - f
    D = inc - A - B - C
    return DecompositionSample(epsilon=epsilon, t=t_lattice, x=xs,
                               A=A, B=B, C=C, D=D, increment=inc)


def macro_terms(sample: DecompositionSample, scheme: ScalingScheme,
                epsilon: float, sigma: float, hessian: HessianAtOrigin,
                d: int) -> DecompositionSample:
    """Fill the macroscopic fields of a decomposition sample.

    time_derivative = (gamma/alpha) * increment,
    laplacian_term  = nu * (2d+1) (gamma/beta^2) A,
    grad_sq_term    = (lambda/2) * gamma^2/((q-r) beta^2) B,
    noise_term      = sqrt(D) * xi with xi = C/(eps sigma sqrt(alpha) beta^{d/2}),
    remainder       = (gamma/alpha) * D.
    """
    a = scheme.alpha(epsilon)
    b = scheme.beta(epsilon)
    g = scheme.gamma(epsilon)
    co = coefficients(scheme, epsilon, d, hessian, sigma)
    xi = sample.C / (epsilon * sigma * math.sqrt(a) * b ** (d / 2.0))
    return replace(
        sample,
        time_derivative=(g / a) * sample.increment,
        laplacian_term=co.nu * (2 * d + 1) * g / (b * b) * sample.A,
        grad_sq_term=(co.lam / 2.0) * g * g / (hessian.q_minus_r * b * b) * sample.B,
        noise_term=math.sqrt(co.D) * xi,
        remainder=(g / a) * sample.D,
        xi=xi,
    )


def xi_value(noise: NoiseModel, scheme: ScalingScheme, epsilon: float,
             sigma: float, t: float, x) -> float:
    """Rescaled noise field at a macroscopic point.

    Piecewise constant on scheme cells; the lattice layer is the cell's
    time index plus one (the noise that lands during the cell's update).
    """
    m, v = lattice_point(scheme, epsilon, t, x)
    a = scheme.alpha(epsilon)
    b = scheme.beta(epsilon)
    d = len(v)
    return noise.sample(m + 1, v) / (sigma * math.sqrt(a) * b ** (d / 2.0))


# ---------------------------------------------------------------------------
# discrete operators on macroscopic fields (any callable g(t, x_vector))


def approx_time_derivative(gfun: Callable, t: float, x, alpha: float) -> float:
    return (gfun(t + alpha, x) - gfun(t, x)) / alpha


def local_mean(gfun: Callable, t: float, x, beta: float, d: int) -> float:
    x = np.asarray(x, dtype=np.float64)
    tot = 0.0
    for off in stencil_offsets(d):
        tot += gfun(t, x + beta * np.asarray(off))
    return tot / (2 * d + 1)


def approx_laplacian(gfun: Callable, t: float, x, beta: float, d: int) -> float:
    return (2 * d + 1) * (local_mean(gfun, t, x, beta, d) - gfun(t, np.asarray(x, dtype=np.float64))) / beta ** 2


def approx_grad_sq(gfun: Callable, t: float, x, beta: float, d: int) -> float:
    x = np.asarray(x, dtype=np.float64)
    m = local_mean(gfun, t, x, beta, d)
    tot = 0.0
    for off in stencil_offsets(d):
        tot += ((gfun(t, x + beta * np.asarray(off)) - m) / beta) ** 2
    return 0.5 * tot


def rescaled_field(history: HeightHistory, scheme: ScalingScheme,
                   epsilon: float) -> Callable:
    """The step-function field F(t,x) = gamma f(ceil(t/alpha), ceil(x/beta))."""
    g = scheme.gamma(epsilon)

    def F(t: float, x) -> float:
        m, v = lattice_point(scheme, epsilon, t, x)
        return g * history.at(m).value_at(v)

    return F
