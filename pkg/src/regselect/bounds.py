"""Closed-form a priori risk bounds and the guarantees of grid selection.

Three bound families share the pattern U(lam) = noise term decreasing in
lam plus smoothness term increasing in lam:

  spectral:   C1^2 tau^2 / lam + C2^2 beta^2 lam^(2 alpha)
  convex:     tau^2 / (2 lam) + beta^2 lam / 2
  nonlinear:  (tau + beta lam)^2 / ((1 - beta C0) lam)

Each has a closed-form minimizer lam_star and a grid-refinement factor
cq(q) >= 1 with U(q lam_star) = cq(q) U(lam_star).  All logarithms are
natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the a priori bounds and the selection guarantee.

    tau: noise level; beta: smoothness scale of the truth; alpha: effective
    saturation exponent of the method; C1/C2: filter constants; C0: curvature
    constant of the nonlinear bound; M: loss bound; eta: failure probability;
    n: training-set size; N: grid size.
    """

    tau: float
    beta: float = 1.0
    alpha: float = 0.5
    C1: float = 1.0
    C2: float = 1.0
    C0: float = 0.0
    M: float = 4.0
    eta: float = 0.05
    n: int = 50
    N: int = 500

    def __post_init__(self):
        if self.tau <= 0 or self.beta <= 0:
            raise ValueError("tau and beta must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.C1 <= 0 or self.C2 <= 0:
            raise ValueError("C1 and C2 must be positive")
        if self.C0 < 0:
            raise ValueError("C0 must be nonnegative")
        if self.M <= 0:
            raise ValueError("M must be positive")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if self.n < 1 or self.N < 1:
            raise ValueError("n and N must be at least 1")


def spectral_bound(lam: float, p: BoundParams) -> float:
    """Risk bound of a spectral filter with effective exponent alpha."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    return (p.C1 ** 2 * p.tau ** 2) / lam + p.C2 ** 2 * p.beta ** 2 * lam ** (2 * p.alpha)


def spectral_optimal(p: BoundParams) -> tuple[float, float]:
    """Minimizer and minimum of the spectral bound, in closed form."""
    a = 2 * p.alpha
    lam_star = (p.C1 ** 2 / (a * p.C2 ** 2)) ** (1.0 / (a + 1)) * (p.tau / p.beta) ** (2.0 / (a + 1))
    u_star = (a + 1) * ((p.C1 ** 2 / a) ** a * p.C2 ** 2) ** (1.0 / (a + 1)) \
        * (p.tau ** a * p.beta) ** (2.0 / (a + 1))
    return lam_star, u_star


def convex_bound(lam: float, p: BoundParams) -> float:
    """Risk bound of strongly convex variational regularization."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    return p.tau ** 2 / (2 * lam) + p.beta ** 2 * lam / 2


def convex_optimal(p: BoundParams) -> tuple[float, float]:
    """Minimizer tau/beta and minimum beta*tau of the convex bound."""
    return p.tau / p.beta, p.beta * p.tau


def nonlinear_bound(lam: float, p: BoundParams) -> float:
    """Risk bound of the nonlinear least-squares setting; needs beta*C0 < 1."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    if p.beta * p.C0 >= 1:
        raise ValueError("bound needs beta * C0 < 1")
    return (p.tau + p.beta * lam) ** 2 / ((1 - p.beta * p.C0) * lam)


def nonlinear_optimal(p: BoundParams) -> tuple[float, float]:
    """Minimizer tau/beta and minimum 4 tau beta / (1 - beta C0)."""
    if p.beta * p.C0 >= 1:
        raise ValueError("bound needs beta * C0 < 1")
    return p.tau / p.beta, 4.0 * p.tau * p.beta / (1 - p.beta * p.C0)


def cq_factor(family: str, q: float, alpha: float | None = None) -> float:
    """Grid-refinement factor C(q) of a bound family, q >= 1; C(1) = 1.

    A grid with ratio at most q contains a point lam with
    U(lam) <= C(q) U(lam_star).
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    if family == "spectral":
        if alpha is None or alpha <= 0:
            raise ValueError("spectral family needs alpha > 0")
        a = 2 * alpha
        return (a + q ** (a + 1)) / (q * (a + 1))
    if family == "convex":
        return (1 + q ** 2) / (2 * q)
    if family == "nonlinear":
        return (1 + q) ** 2 / (4 * q)
    raise ValueError(f"unknown bound family: {family!r}")


def erm_bound(u_star: float, cq: float, p: BoundParams) -> float:
    """High-probability risk bound of the empirical grid minimizer.

    2 cq u_star + (13 M / (2 n)) ln(2 N / eta), holding with probability
    at least 1 - eta.
    """
    if u_star < 0 or cq < 1:
        raise ValueError("need u_star >= 0 and cq >= 1")
    return 2.0 * cq * u_star + (13.0 * p.M / (2.0 * p.n)) * math.log(2.0 * p.N / p.eta)


def hoeffding_bound(grid_opt_risk: float, p: BoundParams) -> float:
    """Distribution-free guarantee: grid-optimal risk plus 2 sqrt((M/n) ln(2N/eta))."""
    if grid_opt_risk < 0:
        raise ValueError("grid_opt_risk must be nonnegative")
    return grid_opt_risk + 2.0 * math.sqrt((p.M / p.n) * math.log(2.0 * p.N / p.eta))


def effective_alpha(filt, source_exponent: float) -> float:
    """Saturation-limited exponent of a filter for a truth of given smoothness.

    Tikhonov saturates at qualification 1; Landweber and spectral cut-off
    have unbounded qualification.
    """
    from .spectral import Landweber, SpectralCutoff, Tikhonov

    if source_exponent <= 0:
        raise ValueError("source exponent must be positive")
    if isinstance(filt, Tikhonov):
        return min(filt.qualification, source_exponent)
    if isinstance(filt, (Landweber, SpectralCutoff)):
        return source_exponent
    raise ValueError(f"unknown filter kind: {type(filt).__name__}")
