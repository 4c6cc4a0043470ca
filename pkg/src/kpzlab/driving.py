"""Driving functions phi acting on nearest-neighbor stencils.

A stencil collects the heights (f(t, x+a)) for a in the closed neighborhood
{0, +e1, -e1, ..., +ed, -ed}, in that fixed order (center first, then the
two neighbors along each axis). All gradients and Hessians returned by this
module use the same indexing.

Built-ins:
  polymer  log of the average of exponentiated heights (log-sum-exp / 2d+1)
  gkpz     mean height plus a coupling times a sum of kink penalties
  ew       plain mean height (degenerate reference dynamics)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

Offset = Tuple[int, ...]


def stencil_offsets(d: int) -> List[Offset]:
    """Neighborhood offsets in stencil order: 0, +e1, -e1, ..., +ed, -ed."""
    offs: List[Offset] = [tuple(0 for _ in range(d))]
    for axis in range(d):
        for sign in (+1, -1):
            v = [0] * d
            v[axis] = sign
            offs.append(tuple(v))
    return offs


def stencil_size(d: int) -> int:
    return 2 * d + 1


@dataclass(frozen=True)
class Stencil:
    """Heights on the closed neighborhood of one site, center first."""

    d: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (2 * self.d + 1,):
            raise ValueError(f"stencil for d={self.d} needs {2*self.d+1} "
                             f"values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, d: int, c: float = 0.0) -> "Stencil":
        return cls(d, np.full(2 * d + 1, float(c)))

    @property
    def center(self) -> float:
        return float(self.values[0])

    @property
    def mean(self) -> float:
        return float(self.values.mean())


def _as_values(u, d: int) -> np.ndarray:
    if isinstance(u, Stencil):
        if u.d != d:
            raise ValueError(f"stencil dimension {u.d} != phi dimension {d}")
        return u.values
    v = np.asarray(u, dtype=np.float64)
    if v.shape != (2 * d + 1,):
        raise ValueError(f"expected {2*d+1} stencil values, got {v.shape}")
    return v


@dataclass(frozen=True)
class HessianAtOrigin:
    """Hessian of phi at the flat stencil: q on the diagonal, r off it."""

    q: float
    r: float

    @property
    def q_minus_r(self) -> float:
        return self.q - self.r


def psi_example(x):
    """Kink penalty used by the gkpz default: x^2 inside |x|<=1, then 2|x|-1.

    C1 everywhere, C2 near 0 with psi''(0)=2, slope bounded by 2.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.where(np.abs(x) <= 1.0, x * x, 2.0 * np.abs(x) - 1.0)
    return out if out.ndim else float(out)


def psi_example_prime(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.where(np.abs(x) <= 1.0, 2.0 * x, 2.0 * np.sign(x))
    return out if out.ndim else float(out)


PSI_EXAMPLE_CURVATURE = 2.0  # psi''(0)
PSI_EXAMPLE_MAX_SLOPE = 2.0


def gkpz_monotone_threshold(d: int, max_slope: float = PSI_EXAMPLE_MAX_SLOPE) -> float:
    """Largest coupling keeping the gkpz update monotone, 1/(4d*sup|psi'|).

    The worst-case gradient component is (1 - 4d*c*sup|psi'|)/(2d+1).
    """
    return 1.0 / (4.0 * d * max_slope)


class DrivingFunction:
    """Base: scalar/vectorized evaluation plus finite-difference fallbacks.

    Subclasses set `name` and `d` and override value_many (and, when
    closed forms exist, gradient_many and hessian_origin).
    """

    name = "custom"

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = int(d)
        self.n = 2 * d + 1

    # -- evaluation ---------------------------------------------------------

    def value_many(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value(self, u) -> float:
        v = _as_values(u, self.d)
        return float(self.value_many(v.reshape(self.n, 1))[0])

    # -- first derivatives ----------------------------------------------------

    def gradient_many(self, U: np.ndarray) -> np.ndarray:
        """Central finite differences, step 1e-5 * max(1, |u|_inf)."""
        U = np.asarray(U, dtype=np.float64)
        h = 1e-5 * np.maximum(1.0, np.abs(U).max(axis=0))
        G = np.empty_like(U)
        for a in range(self.n):
            Up = U.copy()
            Um = U.copy()
            Up[a] += h
            Um[a] -= h
            G[a] = (self.value_many(Up) - self.value_many(Um)) / (2.0 * h)
        return G

    def gradient(self, u) -> np.ndarray:
        v = _as_values(u, self.d)
        return self.gradient_many(v.reshape(self.n, 1))[:, 0]

    # -- second derivatives at the flat stencil -------------------------------

    def hessian_matrix_fd(self, h: float = 1e-4) -> np.ndarray:
        """Finite-difference Hessian at 0 via gradient differences.

        Raises if the mixed partials come out asymmetric, which is the
        operational signature of a phi that is not C2 near the origin.
        """
        n = self.n
        H = np.empty((n, n))
        for i in range(n):
            up = np.zeros(n)
            up[i] = h
            H[i] = (self.gradient(up) - self.gradient(-up)) / (2.0 * h)
        asym = np.abs(H - H.T).max()
        if asym > 1e-3:
            raise ArithmeticError(
                f"mixed partials asymmetric by {asym:.3e} at step {h}; "
                "phi does not look C2 near the origin")
        return 0.5 * (H + H.T)

    def hessian_origin(self) -> HessianAtOrigin:
        H = self.hessian_matrix_fd()
        n = self.n
        q = float(np.trace(H) / n)
        off = H[~np.eye(n, dtype=bool)]
        r = float(off.mean())
        return HessianAtOrigin(q, r)


class PolymerDriving(DrivingFunction):
    """phi(u) = log( (2d+1)^{-1} sum_a exp(u_a) ), evaluated max-shifted."""

    name = "polymer"

    def value_many(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        m = U.max(axis=0)
        return m + np.log(np.exp(U - m).sum(axis=0) / self.n)

    def gradient_many(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        E = np.exp(U - U.max(axis=0))
        return E / E.sum(axis=0)

    def hessian_origin(self) -> HessianAtOrigin:
        p = 1.0 / self.n
        return HessianAtOrigin(q=p - p * p, r=-p * p)


class GeneralizedKpzDriving(DrivingFunction):
    """phi(u) = mean(u) + coupling * sum_a psi(u_a - mean(u)).

    Monotone whenever coupling <= 1/(4d * sup|psi'|); the default coupling
    1/(16d) sits at half that threshold for the shipped psi.
    """

    name = "gkpz"

    def __init__(self, d: int, coupling: float | None = None,
                 psi: Callable = psi_example,
                 psi_prime: Callable = psi_example_prime,
                 psi_curvature: float = PSI_EXAMPLE_CURVATURE):
        super().__init__(d)
        self.coupling = float(coupling) if coupling is not None else 1.0 / (16.0 * d)
        if self.coupling <= 0:
            raise ValueError("coupling must be positive")
        self.psi = psi
        self.psi_prime = psi_prime
        self.psi_curvature = float(psi_curvature)

    def value_many(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        ubar = U.mean(axis=0)
        return ubar + self.coupling * self.psi(U - ubar).sum(axis=0)

    def gradient_many(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        ubar = U.mean(axis=0)
        P = self.psi_prime(U - ubar)
        return 1.0 / self.n + self.coupling * (P - P.sum(axis=0) / self.n)

    def hessian_origin(self) -> HessianAtOrigin:
        cw = self.coupling * self.psi_curvature
        return HessianAtOrigin(q=cw * (self.n - 1) / self.n, r=-cw / self.n)


class EdwardsWilkinsonDriving(DrivingFunction):
    """phi(u) = mean(u). Degenerate: flat Hessian, no strict domination."""

    name = "ew"

    def value_many(self, U: np.ndarray) -> np.ndarray:
        return np.asarray(U, dtype=np.float64).mean(axis=0)

    def gradient_many(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        return np.full_like(U, 1.0 / self.n)

    def hessian_origin(self) -> HessianAtOrigin:
        return HessianAtOrigin(0.0, 0.0)


class CallableDriving(DrivingFunction):
    """Wrap a user-supplied scalar function of 2d+1 stencil values.

    Derivatives fall back to finite differences; nothing is assumed about
    smoothness beyond what check_assumptions verifies.
    """

    name = "user"

    def __init__(self, d: int, fn: Callable[[np.ndarray], float], name: str = "user"):
        super().__init__(d)
        self.fn = fn
        self.name = name

    def value_many(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=np.float64)
        flatcols = U.reshape(self.n, -1)
        out = np.array([self.fn(flatcols[:, j]) for j in range(flatcols.shape[1])])
        return out.reshape(U.shape[1:])


def make_driving(name: str, d: int, coupling: float | None = None) -> DrivingFunction:
    if name == "polymer":
        return PolymerDriving(d)
    if name == "gkpz":
        return GeneralizedKpzDriving(d, coupling=coupling)
    if name == "ew":
        return EdwardsWilkinsonDriving(d)
    raise ValueError(f"unknown driving function {name!r}; "
                     "expected polymer, gkpz or ew")
