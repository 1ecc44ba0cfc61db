"""Nonnegative factorization solvers.

Three objectives over ``X ~ HW`` with ``H, W >= 0``:

* ``mcc`` maximizes a per-row Gaussian-kernel similarity
  ``sum_d exp(-r_d^2 / sigma^2)`` where ``r_d`` is the Euclidean norm of row
  ``d`` of the residual.  Rows with large residuals get exponentially small
  influence, which is what makes this objective robust to grossly corrupted
  features.  Solved by alternating a closed-form reweighting step (auxiliary
  weights ``rho`` and an annealed bandwidth ``sigma``) with weighted
  multiplicative updates of ``H`` and ``W``.
* ``l2`` minimizes the squared Frobenius error with the classic
  multiplicative updates.
* ``kl`` minimizes the generalized Kullback-Leibler divergence
  ``sum(x*log(x/y) - x + y)`` with its multiplicative updates.

All updates multiply nonnegative quantities, so iterates stay nonnegative by
construction.  With all auxiliary weights fixed at ``-1`` the weighted
updates reduce exactly to the plain ``l2`` updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .matrix import DataMatrix, FactorPair, row_residual_norms

__all__ = [
    "OBJECTIVES",
    "SolverConfig",
    "McCState",
    "FitResult",
    "initial_factors",
    "mcc_objective",
    "mcc_estep",
    "mcc_update_h",
    "mcc_update_w",
    "l2_update_h",
    "l2_update_w",
    "kl_update_h",
    "kl_update_w",
    "squared_error",
    "kl_divergence",
    "mcc_factorize",
    "l2_factorize",
    "kl_factorize",
    "factorize",
]

OBJECTIVES = ("mcc", "l2", "kl")

# Guard for relative-change convergence tests when the objective is ~0.
_TINY = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by all solvers; ``theta``/``sigma_floor`` apply to mcc only."""

    max_iters: int = 200
    rel_tol: float = 1e-6
    seed: int = 0
    theta: float = 1.0
    sigma_floor: float = 1e-8
    denom_eps: float = 1e-12
    objective: str = "mcc"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.rel_tol <= 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.theta <= 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.sigma_floor <= 0:
            raise ValueError(f"sigma_floor must be positive, got {self.sigma_floor}")
        if self.denom_eps <= 0:
            raise ValueError(f"denom_eps must be positive, got {self.denom_eps}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")


@dataclass(frozen=True, eq=False)
class McCState:
    """Auxiliary solver state: weights ``rho`` in [-1, 0), bandwidth ``sigma``."""

    rho: np.ndarray
    sigma: float
    theta: float
    iteration: int = 0


@dataclass(eq=False)
class FitResult:
    factors: FactorPair
    objective_trace: np.ndarray
    iterations_run: int
    converged: bool
    final_state: McCState | None = None

    def to_json_dict(self) -> dict:
        out = {
            "objective_trace": [float(v) for v in self.objective_trace],
            "iterations_run": int(self.iterations_run),
            "converged": bool(self.converged),
        }
        if self.final_state is not None:
            out["final_sigma"] = float(self.final_state.sigma)
        return out


def initial_factors(rows: int, cols: int, rank: int, seed: int) -> FactorPair:
    """Seeded i.i.d. uniform (0, 1] initialization for both factors.

    Strictly positive entries avoid zero-locking under multiplicative updates.
    """
    rng = np.random.default_rng(seed)
    h = 1.0 - rng.random((rows, rank))
    w = 1.0 - rng.random((rank, cols))
    return FactorPair(h, w)


# -- correntropy objective and EM pieces -------------------------------------


def mcc_objective(x: DataMatrix, factors: FactorPair, sigma: float) -> float:
    """Gaussian-kernel similarity ``sum_d exp(-r_d^2 / sigma^2)``, in (0, D]."""
    if sigma <= 0:
        raise ValueError(f"kernel bandwidth must be positive, got {sigma}")
    r = row_residual_norms(x, factors)
    return float(np.exp(-(r * r) / (sigma * sigma)).sum())


def mcc_estep(
    x: DataMatrix, factors: FactorPair, theta: float, sigma_floor: float
) -> McCState:
    """Closed-form reweighting step.

    ``sigma = max(sigma_floor, sqrt(theta / (2D) * ||X - HW||_F^2))`` and
    ``rho_d = -exp(-r_d^2 / sigma^2)``, so every ``rho_d`` lies in [-1, 0) and
    rows with larger residuals carry weights closer to zero.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if sigma_floor <= 0:
        raise ValueError(f"sigma_floor must be positive, got {sigma_floor}")
    r = row_residual_norms(x, factors)
    frob_sq = float(r @ r)
    sigma = max(float(sigma_floor), math.sqrt(theta * frob_sq / (2.0 * x.rows)))
    rho = -np.exp(-(r * r) / (sigma * sigma))
    return McCState(rho=rho, sigma=sigma, theta=theta)


def _row_weights(state: McCState, rows: int) -> np.ndarray:
    weights = -np.asarray(state.rho, dtype=np.float64)
    if weights.shape != (rows,):
        raise ValueError(
            f"auxiliary weights have length {weights.shape}, expected ({rows},)"
        )
    if not (weights > 0).all():
        raise ValueError("auxiliary weights rho must be strictly negative")
    return weights


def mcc_update_h(
    x: DataMatrix, factors: FactorPair, state: McCState, denom_eps: float
) -> np.ndarray:
    """Weighted multiplicative basis update
    ``h <- h * (diag(-rho) X W^T) / (diag(-rho) H W W^T + eps)``."""
    weights = _row_weights(state, x.rows)
    num = weights[:, None] * x.matmul(factors.w.T)
    den = weights[:, None] * (factors.h @ (factors.w @ factors.w.T)) + denom_eps
    return factors.h * (num / den)


def mcc_update_w(
    x: DataMatrix, factors: FactorPair, state: McCState, denom_eps: float
) -> np.ndarray:
    """Weighted multiplicative coefficient update
    ``w <- w * (H^T diag(-rho) X) / (H^T diag(-rho) H W + eps)``.

    Expects the freshly updated basis in ``factors.h``.
    """
    weights = _row_weights(state, x.rows)
    weighted_h = weights[:, None] * factors.h
    num = x.rmatmul(weighted_h.T)
    den = (factors.h.T @ weighted_h) @ factors.w + denom_eps
    return factors.w * (num / den)


# -- baseline updates ---------------------------------------------------------


def l2_update_h(x: DataMatrix, factors: FactorPair, denom_eps: float) -> np.ndarray:
    num = x.matmul(factors.w.T)
    den = factors.h @ (factors.w @ factors.w.T) + denom_eps
    return factors.h * (num / den)


def l2_update_w(x: DataMatrix, factors: FactorPair, denom_eps: float) -> np.ndarray:
    num = x.rmatmul(factors.h.T)
    den = (factors.h.T @ factors.h) @ factors.w + denom_eps
    return factors.w * (num / den)


def kl_update_h(x: DataMatrix, factors: FactorPair, denom_eps: float) -> np.ndarray:
    ratio = x.divide_by_product(factors.h, factors.w, denom_eps)
    num = ratio.matmul(factors.w.T)
    den = factors.w.sum(axis=1)[None, :] + denom_eps
    return factors.h * (num / den)


def kl_update_w(x: DataMatrix, factors: FactorPair, denom_eps: float) -> np.ndarray:
    ratio = x.divide_by_product(factors.h, factors.w, denom_eps)
    num = ratio.rmatmul(factors.h.T)
    den = factors.h.sum(axis=0)[:, None] + denom_eps
    return factors.w * (num / den)


# -- objective evaluations -----------------------------------------------------


def squared_error(x: DataMatrix, factors: FactorPair) -> float:
    """Squared Frobenius norm of the residual ``X - HW``."""
    r = row_residual_norms(x, factors)
    return float(r @ r)


def kl_divergence(x: DataMatrix, factors: FactorPair, eps: float = 1e-12) -> float:
    """Generalized KL divergence ``sum(x*log(x/y) - x + y)`` with ``y = HW``.

    Zero entries of ``x`` contribute ``y`` only (``0*log 0`` treated as 0);
    ``y`` is floored at ``eps`` inside the log.
    """
    pos = 0.0
    total_x = 0.0
    total_y = 0.0
    for start, stop in x.blocks():
        xb = x.column_block(start, stop)
        yb = factors.h @ factors.w[:, start:stop]
        mask = xb > 0
        if mask.any():
            xv = xb[mask]
            pos += float((xv * np.log(xv / np.maximum(yb[mask], eps))).sum())
        total_x += float(xb.sum())
        total_y += float(yb.sum())
    return pos - total_x + total_y


# -- full solver loops ---------------------------------------------------------


def _check_problem(x: DataMatrix, rank: int) -> None:
    limit = min(x.rows, x.cols)
    if not 1 <= rank <= limit:
        raise ValueError(
            f"rank k={rank} must be within [1, {limit}] for a {x.rows}x{x.cols} matrix"
        )


def _resolve_init(x: DataMatrix, rank: int, cfg: SolverConfig, init) -> FactorPair:
    if init is None:
        return initial_factors(x.rows, x.cols, rank, cfg.seed)
    if init.h.shape != (x.rows, rank) or init.w.shape != (rank, x.cols):
        raise ValueError(
            f"init factors have shape {init.h.shape}/{init.w.shape}, "
            f"expected {(x.rows, rank)}/{(rank, x.cols)}"
        )
    return init


def _small_relative_change(current: float, previous: float, rel_tol: float) -> bool:
    return abs(current - previous) <= rel_tol * max(abs(current), _TINY)


def _normalize_columns(factors: FactorPair) -> FactorPair:
    """Rescale so columns of H have unit L2 norm; W absorbs the inverse."""
    norms = np.linalg.norm(factors.h, axis=0)
    scale = np.where(norms > 0, norms, 1.0)
    return FactorPair(factors.h / scale[None, :], factors.w * scale[:, None])


def mcc_factorize(
    x: DataMatrix, rank: int, cfg: SolverConfig, init: FactorPair | None = None
) -> FitResult:
    """Correntropy-maximizing factorization.

    Each iteration applies the weighted H update, then the W update with the
    new H, using the auxiliary weights and annealed bandwidth computed from
    the factors entering the iteration.  The recorded objective is evaluated
    at the updated factors with their own bandwidth (which is exactly the
    next iteration's reweighting, so each iteration costs one residual
    pass).  Stops when the relative objective change falls below
    ``cfg.rel_tol``.  Deterministic for a fixed seed.
    """
    _check_problem(x, rank)
    factors = _resolve_init(x, rank, cfg, init)
    state = mcc_estep(x, factors, cfg.theta, cfg.sigma_floor)
    trace: list[float] = []
    previous = None
    converged = False
    for iteration in range(1, cfg.max_iters + 1):
        new_h = mcc_update_h(x, factors, state, cfg.denom_eps)
        factors = FactorPair(new_h, factors.w)
        new_w = mcc_update_w(x, factors, state, cfg.denom_eps)
        factors = FactorPair(new_h, new_w)
        state = replace(
            mcc_estep(x, factors, cfg.theta, cfg.sigma_floor), iteration=iteration
        )
        # rho holds -exp(-r^2/sigma^2), so the objective is a free byproduct.
        objective = float(-state.rho.sum())
        trace.append(objective)
        if previous is not None and _small_relative_change(objective, previous, cfg.rel_tol):
            converged = True
            break
        previous = objective
    return FitResult(
        factors=_normalize_columns(factors),
        objective_trace=np.asarray(trace),
        iterations_run=len(trace),
        converged=converged,
        final_state=state,
    )


def l2_factorize(
    x: DataMatrix, rank: int, cfg: SolverConfig, init: FactorPair | None = None
) -> FitResult:
    """Multiplicative-update factorization under squared Frobenius error."""
    _check_problem(x, rank)
    factors = _resolve_init(x, rank, cfg, init)
    trace: list[float] = []
    previous = None
    converged = False
    for _ in range(cfg.max_iters):
        new_h = l2_update_h(x, factors, cfg.denom_eps)
        factors = FactorPair(new_h, factors.w)
        new_w = l2_update_w(x, factors, cfg.denom_eps)
        factors = FactorPair(new_h, new_w)
        objective = squared_error(x, factors)
        trace.append(objective)
        if previous is not None and _small_relative_change(objective, previous, cfg.rel_tol):
            converged = True
            break
        previous = objective
    return FitResult(
        factors=_normalize_columns(factors),
        objective_trace=np.asarray(trace),
        iterations_run=len(trace),
        converged=converged,
    )


def kl_factorize(
    x: DataMatrix, rank: int, cfg: SolverConfig, init: FactorPair | None = None
) -> FitResult:
    """Multiplicative-update factorization under generalized KL divergence."""
    _check_problem(x, rank)
    factors = _resolve_init(x, rank, cfg, init)
    trace: list[float] = []
    previous = None
    converged = False
    for _ in range(cfg.max_iters):
        new_h = kl_update_h(x, factors, cfg.denom_eps)
        factors = FactorPair(new_h, factors.w)
        new_w = kl_update_w(x, factors, cfg.denom_eps)
        factors = FactorPair(new_h, new_w)
        objective = kl_divergence(x, factors, cfg.denom_eps)
        trace.append(objective)
        if previous is not None and _small_relative_change(objective, previous, cfg.rel_tol):
            converged = True
            break
        previous = objective
    return FitResult(
        factors=_normalize_columns(factors),
        objective_trace=np.asarray(trace),
        iterations_run=len(trace),
        converged=converged,
    )


_FACTORIZERS = {"mcc": mcc_factorize, "l2": l2_factorize, "kl": kl_factorize}


def factorize(
    x: DataMatrix, rank: int, cfg: SolverConfig, init: FactorPair | None = None
) -> FitResult:
    """Dispatch to the solver selected by ``cfg.objective``."""
    return _FACTORIZERS[cfg.objective](x, rank, cfg, init)
