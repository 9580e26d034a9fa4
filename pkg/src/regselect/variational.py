"""Variational regularization: soft thresholding, lasso, TV denoising, Bregman losses."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import GradientOperator, image_gradient, gradient_adjoint


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver exhausts its iteration budget."""


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule for the accelerated proximal solvers.

    Iterations stop once the distance between consecutive iterates drops
    below `tolerance`; exceeding `max_iterations` raises ConvergenceError.
    """

    tolerance: float = 1e-6
    max_iterations: int = 200_000

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


LASSO_CONFIG = SolverConfig(tolerance=1e-6)
TV_CONFIG = SolverConfig(tolerance=1e-8)


def soft_threshold(y, lam: float):
    """Componentwise shrinkage: the proximal map of lam * l1 norm."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    y = np.asarray(y, dtype=float)
    return np.sign(y) * np.maximum(np.abs(y) - lam, 0.0)


def lasso_solve(op, y, lam: float, cfg: SolverConfig = LASSO_CONFIG, x0=None):
    """Minimize 0.5 ||A x - y||^2 + lam ||x||_1 by accelerated proximal descent.

    Constant stepsize 1/||A||^2; x0 warm-starts the iteration when given.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    y = np.asarray(y, dtype=float)
    step = 1.0 / op.operator_norm() ** 2
    x = np.zeros(op.domain_dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    z = x
    t = 1.0
    for _ in range(cfg.max_iterations):
        grad = op.adjoint_apply(op.apply(z) - y)
        x_next = soft_threshold(z - step * grad, step * lam)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = x_next + ((t - 1.0) / t_next) * (x_next - x)
        done = np.linalg.norm(x_next - x) <= cfg.tolerance
        x, t = x_next, t_next
        if done:
            return x
    raise ConvergenceError(f"lasso did not converge in {cfg.max_iterations} iterations")


def total_variation(img) -> float:
    """Anisotropic TV: l1 norm of all forward differences."""
    dv, dh = image_gradient(np.asarray(img, dtype=float))
    return float(np.abs(dv).sum() + np.abs(dh).sum())


def tv_denoise(y, lam: float, cfg: SolverConfig = TV_CONFIG, return_dual: bool = False):
    """Minimize 0.5 ||x - y||^2 + lam TV(x) for a square image y.

    Runs accelerated projected gradient on the dual problem
    min 0.5 ||D^T p - y||^2 over the box |p_j| <= lam and recovers
    x = y - D^T p.  With return_dual=True also returns the dual field p
    (flat, in GradientOperator layout), from which p/lam certifies a
    TV subgradient at the solution.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    y = np.asarray(y, dtype=float)
    if y.ndim != 2 or y.shape[0] != y.shape[1]:
        raise ValueError("expected a square image")
    d = y.shape[0]
    if lam == 0:
        x = y.copy()
        p = np.zeros(2 * d * (d - 1))
        return (x, p) if return_dual else x
    step = 1.0 / 8.0  # ||D||^2 < 8 for forward differences
    pv = np.zeros((d - 1, d))
    ph = np.zeros((d, d - 1))
    zv, zh = pv, ph
    t = 1.0
    for _ in range(cfg.max_iterations):
        resid = gradient_adjoint(zv, zh) - y
        gv, gh = image_gradient(resid)
        pv_next = np.clip(zv - step * gv, -lam, lam)
        ph_next = np.clip(zh - step * gh, -lam, lam)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        beta = (t - 1.0) / t_next
        zv = pv_next + beta * (pv_next - pv)
        zh = ph_next + beta * (ph_next - ph)
        delta = np.sqrt(((pv_next - pv) ** 2).sum() + ((ph_next - ph) ** 2).sum())
        pv, ph, t = pv_next, ph_next, t_next
        if delta <= cfg.tolerance:
            x = y - gradient_adjoint(pv, ph)
            if return_dual:
                return x, np.concatenate([pv.ravel(), ph.ravel()])
            return x
    raise ConvergenceError(f"tv denoise did not converge in {cfg.max_iterations} iterations")


def l1_subgradient(x):
    """Canonical subgradient of the l1 norm: sign with sign(0) = 0."""
    return np.sign(np.asarray(x, dtype=float))


def bregman_l1(x, x_ref) -> float:
    """l1 Bregman divergence of x from x_ref with the sign-rule subgradient.

    Equals ||x||_1 - <sign(x_ref), x>; nonnegative, and zero exactly when
    the signs of x match those of x_ref on the support of x.
    """
    x = np.asarray(x, dtype=float)
    x_ref = np.asarray(x_ref, dtype=float)
    if x.shape != x_ref.shape:
        raise ValueError("shape mismatch between x and x_ref")
    return float(np.abs(x).sum() - l1_subgradient(x_ref) @ x.ravel())


def bregman_tv(x, x_ref, dual_at_ref) -> float:
    """TV Bregman divergence of image x from x_ref.

    dual_at_ref is a gradient-space field eta (flat, GradientOperator
    layout, entries in [-1, 1]) certifying D^T eta as a TV subgradient at
    x_ref; for denoising solutions it is the dual field divided by lam.
    """
    if dual_at_ref is None:
        raise ValueError("missing dual certificate for the TV subgradient")
    x = np.asarray(x, dtype=float)
    x_ref = np.asarray(x_ref, dtype=float)
    if x.shape != x_ref.shape:
        raise ValueError("shape mismatch between x and x_ref")
    eta = np.asarray(dual_at_ref, dtype=float)
    op = GradientOperator(x.shape[0])
    if eta.shape != (op.range_dim,):
        raise ValueError("dual certificate has wrong dimension")
    if np.max(np.abs(eta)) > 1.0 + 1e-9:
        raise ValueError("dual certificate exceeds the unit box")
    grad_x = op.apply(x.ravel())
    grad_ref = op.apply(x_ref.ravel())
    return float(np.abs(grad_x).sum() - np.abs(grad_ref).sum() - eta @ (grad_x - grad_ref))


def regularization_path(solve, y, grid, warm_start: bool = True) -> list:
    """Solve along a parameter grid in order, warm-starting from the previous solution.

    `solve(y, lam, x0)` may ignore x0; cold starts pass x0 = None.
    """
    lams = np.asarray(getattr(grid, "values", grid), dtype=float)
    solutions = []
    x0 = None
    for lam in lams:
        x = solve(y, float(lam), x0)
        solutions.append(x)
        if warm_start:
            x0 = x
    return solutions
