"""Automatic choice of the regularization parameter.

Three data-driven strategies plus a truth-aware oracle scan a geometric
parameter grid lambda_k = zeta0 * q**k, k = 1..T:

* discrepancy principle (``select_morozov``): largest grid lambda whose
  weighted node residual has dropped to the known noise level, optionally
  bisection-refined between neighboring grid points;
* L-curve (``select_lcurve``): maximal-curvature corner of the log-log
  residual-versus-smoothness curve, using a closed-form curvature;
* generalized cross validation (``select_gcv``): minimizer of the GCV score,
  available in closed form on interpolatory grids N = 2*degree + 1;
* oracle (``select_oracle``): minimizer of the true L2 error, for benchmarks.

All diagnostics here require a penalty with zero weight on the constant mode
(the power-law family); the constant-weight form is only meaningful for the
barycentric evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    TWO_PI,
    TrapezoidalGrid,
    analyze,
    basis_matrix,
    uniform_eval_points,
    weighted_norm,
)
from .penalty import PenaltySequence

__all__ = [
    "SelectionError",
    "GridExhaustedError",
    "InapplicableStrategyError",
    "ParameterGrid",
    "SelectionReport",
    "parameter_grid",
    "residual_sq",
    "penalty_sq",
    "residual_sq_prime",
    "penalty_sq_prime",
    "lcurve_curvature",
    "select_morozov",
    "select_lcurve",
    "gcv_value",
    "gcv_trace",
    "gcv_bounds",
    "select_gcv",
    "select_oracle",
]


class SelectionError(RuntimeError):
    """A selection strategy could not produce a parameter."""


class GridExhaustedError(SelectionError):
    """The discrepancy never dropped to the noise level anywhere on the grid."""


class InapplicableStrategyError(SelectionError):
    """The data degenerates the strategy's objective (e.g. nothing to penalize)."""


@dataclass(frozen=True)
class ParameterGrid:
    """Geometric candidate grid lambda_k = zeta0 * q**k, k = 1..t_max (decreasing)."""

    zeta0: float
    q: float
    t_max: int
    lambdas: np.ndarray


def parameter_grid(zeta0: float = 1.0, q: float = 2.0 ** -0.1, t_max: int = 400) -> ParameterGrid:
    """Build the candidate grid; defaults span [2**-40, 2**-0.1].

    Requires zeta0 > 0, 0 < q < 1 and t_max >= 1.
    """
    if not zeta0 > 0:
        raise ValueError(f"zeta0 must be > 0, got {zeta0}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"ratio q must lie strictly between 0 and 1, got {q}")
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    lambdas = zeta0 * np.power(float(q), np.arange(1, int(t_max) + 1, dtype=float))
    lambdas.flags.writeable = False
    return ParameterGrid(zeta0=float(zeta0), q=float(q), t_max=int(t_max), lambdas=lambdas)


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of one strategy: the chosen parameter plus per-lambda diagnostics.

    ``chosen_lambda`` is None when the strategy failed in a surfaced way
    (currently only: discrepancy-principle noise assumption violated).
    ``chosen_index`` is the 0-based offset into ``lambdas`` the scan stopped
    at; when ``refined`` is set, ``chosen_lambda`` was bisection-refined and
    lies between neighboring grid values instead of exactly on one.

    Per-lambda columns are filled only where the strategy computes them:
    ``residual_sq`` (weighted squared node residual), ``penalty_sq`` (squared
    smoothness seminorm of the solution), ``curvature``, ``gcv``,
    ``discrepancy`` (residual_sq minus squared noise norm) and ``l2_error``.
    """

    strategy: str
    lambdas: np.ndarray
    chosen_lambda: float | None
    chosen_index: int | None
    refined: bool = False
    residual_sq: np.ndarray | None = None
    penalty_sq: np.ndarray | None = None
    curvature: np.ndarray | None = None
    gcv: np.ndarray | None = None
    discrepancy: np.ndarray | None = None
    l2_error: np.ndarray | None = None
    noise_norm_used: float | None = None
    sigma_mean: float | None = None
    assumption_ok: bool | None = None


def _require_selection_penalty(penalty: PenaltySequence):
    if penalty.beta[0] != 0:
        raise ValueError(
            "selection diagnostics require zero weight on the constant mode; "
            "constant-form penalties are only accepted by the barycentric evaluator"
        )


def _check_problem(grid: TrapezoidalGrid, degree: int, penalty: PenaltySequence):
    if penalty.degree != degree:
        raise ValueError(
            f"penalty degree {penalty.degree} does not match requested degree {degree}"
        )
    if 2 * degree + 1 > grid.n_points:
        raise ValueError(
            f"degree {degree} too high for {grid.n_points} nodes: need "
            f"2*degree + 1 <= n_points"
        )
    _require_selection_penalty(penalty)


# ---------------------------------------------------------------------------
# Per-lambda diagnostics.  The scalar forms below are the reference
# definitions; scans over a whole ParameterGrid use the vectorized helpers.
# ---------------------------------------------------------------------------


def residual_sq(samples, grid: TrapezoidalGrid, degree: int, penalty: PenaltySequence, lam: float) -> float:
    """Weighted squared residual (2*pi/N) * sum_j (p_lam(x_j) - f_j)**2.

    Computed literally at the nodes.  Strictly increasing in lam whenever any
    penalized mode is active in the data.
    """
    if lam < 0:
        raise ValueError(f"regularization parameter must be >= 0, got {lam}")
    _check_problem(grid, degree, penalty)
    samples = np.asarray(samples, dtype=float)
    coeffs = analyze(samples, grid, degree)
    alpha = coeffs.values / (1.0 + lam * penalty.beta**2)
    resid = basis_matrix(grid.nodes, degree) @ alpha - samples
    return grid.weight * float(np.dot(resid, resid))


def penalty_sq(samples, grid: TrapezoidalGrid, degree: int, penalty: PenaltySequence, lam: float) -> float:
    """Squared smoothness seminorm sum_modes beta**2/(1 + lam*beta**2)**2 * c**2
    of the solved approximant (c are the unshrunk coefficients).

    Strictly decreasing in lam on the same condition that makes
    :func:`residual_sq` increasing.
    """
    if lam < 0:
        raise ValueError(f"regularization parameter must be >= 0, got {lam}")
    _check_problem(grid, degree, penalty)
    c = analyze(samples, grid, degree).values
    beta_sq = penalty.beta**2
    return float(np.sum(beta_sq * c**2 / (1.0 + lam * beta_sq) ** 2))


def residual_sq_prime(samples, grid: TrapezoidalGrid, degree: int, penalty: PenaltySequence, lam: float) -> float:
    """Closed-form derivative of :func:`residual_sq` with respect to lam:
    sum_modes 2*lam*beta**4/(1 + lam*beta**2)**3 * c**2 (nonnegative).
    """
    if lam < 0:
        raise ValueError(f"regularization parameter must be >= 0, got {lam}")
    _check_problem(grid, degree, penalty)
    c = analyze(samples, grid, degree).values
    beta_sq = penalty.beta**2
    return float(np.sum(2.0 * lam * beta_sq**2 * c**2 / (1.0 + lam * beta_sq) ** 3))


def penalty_sq_prime(samples, grid: TrapezoidalGrid, degree: int, penalty: PenaltySequence, lam: float) -> float:
    """Closed-form derivative of :func:`penalty_sq` with respect to lam:
    -sum_modes 2*beta**4/(1 + lam*beta**2)**3 * c**2 (nonpositive).

    Satisfies the exchange identity residual_sq' = -lam * penalty_sq'.
    """
    if lam < 0:
        raise ValueError(f"regularization parameter must be >= 0, got {lam}")
    _check_problem(grid, degree, penalty)
    c = analyze(samples, grid, degree).values
    beta_sq = penalty.beta**2
    return -float(np.sum(2.0 * beta_sq**2 * c**2 / (1.0 + lam * beta_sq) ** 3))


def _scan_tables(samples, grid, degree, penalty, lambdas):
    """Vectorized per-lambda node residuals J, seminorms K and K' over a grid.

    Returns (J, K, Kprime, coefficient vector).  Same definitions as the
    scalar functions, one matrix product for the whole scan.
    """
    samples = np.asarray(samples, dtype=float)
    c = analyze(samples, grid, degree).values
    beta_sq = penalty.beta**2
    shrink = 1.0 + np.multiply.outer(beta_sq, lambdas)  # (2L+1, T)
    mat = basis_matrix(grid.nodes, degree)
    resid = mat @ (c[:, None] / shrink) - samples[:, None]
    j_vals = grid.weight * np.einsum("jt,jt->t", resid, resid)
    k_vals = ((beta_sq * c**2)[:, None] / shrink**2).sum(axis=0)
    kp_vals = -(2.0 * (beta_sq**2 * c**2)[:, None] / shrink**3).sum(axis=0)
    return j_vals, k_vals, kp_vals, c


def lcurve_curvature(rho: float, eta: float, eta_prime: float, lam: float) -> float:
    """Signed curvature of the L-curve (log rho, log eta) at lambda = lam.

    Uses the residual/seminorm exchange identity rho' = -lam * eta' to
    eliminate rho', giving

        kappa = rho*eta/|eta'| * (lam*eta'*rho + rho*eta + lam**2*eta'*eta)
                / (lam**2*eta**2 + rho**2)**1.5.

    Negative at an L-shaped corner.  Undefined when eta or rho vanishes
    (nothing penalized / exact fit) or when eta' is not strictly negative.
    """
    if not rho > 0:
        raise ValueError(f"curvature undefined: residual must be > 0, got {rho}")
    if not eta > 0:
        raise ValueError(f"curvature undefined: seminorm must be > 0, got {eta}")
    if not eta_prime < 0:
        raise ValueError(
            f"curvature undefined: seminorm derivative must be < 0, got {eta_prime}"
        )
    num = lam * eta_prime * rho + rho * eta + lam**2 * eta_prime * eta
    den = (lam**2 * eta**2 + rho**2) ** 1.5
    return float(rho * eta / abs(eta_prime) * num / den)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


def select_morozov(
    samples,
    grid: TrapezoidalGrid,
    degree: int,
    penalty: PenaltySequence,
    params: ParameterGrid,
    noise_norm: float,
    refine: bool = True,
    check_assumption: bool = True,
):
    """Discrepancy principle: first grid lambda whose residual reaches the noise.

    Scans k = 1..T (lambda decreasing) and stops at the first
    F(lambda_k) = residual_sq - noise_norm**2 <= 0.  With ``refine`` the root
    of F is then bisected inside the bracketing interval (using zeta0 as the
    upper endpoint when the scan stops immediately, and 0 when it never
    stops) until |F| <= 1e-10 * noise_norm**2 or 60 iterations.

    The principle is only meaningful when the noise norm separates the
    full-degree residual from the residual of the node mean; if that
    assumption fails, the report carries ``assumption_ok=False`` and no
    chosen lambda rather than a silent fallback.  If F stays positive across
    the whole grid although the assumption was satisfied, the root lies below
    lambda_T and lambda_T is returned; with assumption checking disabled and
    no root anywhere, :class:`GridExhaustedError` is raised.
    """
    if noise_norm < 0:
        raise ValueError(f"noise norm must be >= 0, got {noise_norm}")
    _check_problem(grid, degree, penalty)
    samples = np.asarray(samples, dtype=float)
    noise_sq = float(noise_norm) ** 2

    j_vals, _, _, _ = _scan_tables(samples, grid, degree, penalty, params.lambdas)
    f_vals = j_vals - noise_sq

    def j_at(lam: float) -> float:
        return residual_sq(samples, grid, degree, penalty, lam)

    j_zero = j_at(0.0)
    sigma = float(np.mean(samples))
    upper = weighted_norm(samples - sigma, grid)
    lower = float(np.sqrt(j_zero))
    slack = 1e-10 * upper  # forgive pure roundoff in the interpolation residual
    assumption_ok = (lower <= noise_norm + slack) and (noise_norm <= upper + slack)

    report = dict(
        strategy="morozov",
        lambdas=params.lambdas,
        residual_sq=j_vals,
        discrepancy=f_vals,
        noise_norm_used=float(noise_norm),
        sigma_mean=sigma,
    )
    if check_assumption and not assumption_ok:
        return SelectionReport(
            chosen_lambda=None, chosen_index=None, assumption_ok=False, **report
        )

    def bisect(lo: float, hi: float) -> float:
        # invariant: F(lo) <= 0 <= F(hi)
        tol = 1e-10 * noise_sq
        mid = 0.5 * (lo + hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            f_mid = j_at(mid) - noise_sq
            if abs(f_mid) <= tol:
                return mid
            if f_mid > 0:
                hi = mid
            else:
                lo = mid
        return mid

    hits = np.nonzero(f_vals <= 0)[0]
    if hits.size:
        idx = int(hits[0])
        chosen = float(params.lambdas[idx])
        refined = False
        if refine:
            hi = float(params.lambdas[idx - 1]) if idx > 0 else params.zeta0
            if j_at(hi) - noise_sq >= 0:
                chosen = bisect(chosen, hi)
                refined = True
            # else: even the upper bracket endpoint sits below the noise level,
            # so the root lies above the grid; keep the largest grid value.
    else:
        # F > 0 everywhere on the grid.  Under the verified assumption the
        # root exists below lambda_T (F -> J(0) - noise**2 <= 0 as lam -> 0);
        # without it there is nothing to refine toward.
        if not assumption_ok:
            raise GridExhaustedError(
                "discrepancy never reached the noise level on the parameter grid "
                "and no root exists below it"
            )
        idx = params.t_max - 1
        chosen = float(params.lambdas[idx])
        refined = False
        if refine:
            chosen = bisect(0.0, chosen)
            refined = True
    return SelectionReport(
        chosen_lambda=chosen,
        chosen_index=idx,
        refined=refined,
        assumption_ok=assumption_ok,
        **report,
    )


def select_lcurve(
    samples,
    grid: TrapezoidalGrid,
    degree: int,
    penalty: PenaltySequence,
    params: ParameterGrid,
) -> SelectionReport:
    """L-curve corner: the grid lambda of maximal absolute curvature."""
    _check_problem(grid, degree, penalty)
    samples = np.asarray(samples, dtype=float)
    j_vals, k_vals, kp_vals, c = _scan_tables(samples, grid, degree, penalty, params.lambdas)
    # Quadrature roundoff leaves ~1e-16 relics on the penalized modes even
    # for an exactly constant signal, so the eta = 0 test must be relative.
    seminorm = np.max(np.abs(penalty.beta * c), initial=0.0)
    scale = np.max(penalty.beta) * np.max(np.abs(c), initial=0.0)
    if seminorm <= 1e-13 * scale:
        raise InapplicableStrategyError(
            "L-curve is inapplicable: the penalized seminorm of the data is "
            "identically zero (nothing but the constant mode present)"
        )
    lam = params.lambdas
    num = lam * kp_vals * j_vals + j_vals * k_vals + lam**2 * kp_vals * k_vals
    den = (lam**2 * k_vals**2 + j_vals**2) ** 1.5
    kappa = j_vals * k_vals / np.abs(kp_vals) * num / den
    idx = int(np.argmax(np.abs(kappa)))
    return SelectionReport(
        strategy="lcurve",
        lambdas=lam,
        chosen_lambda=float(lam[idx]),
        chosen_index=idx,
        residual_sq=j_vals,
        penalty_sq=k_vals,
        curvature=kappa,
    )


# ---------------------------------------------------------------------------
# GCV
# ---------------------------------------------------------------------------


def gcv_value(coeffs, penalty: PenaltySequence, lam: float) -> float:
    """Closed-form GCV score on an interpolatory grid (N = 2*degree + 1):

        V(lam) = sum_modes (lam*beta**2/(1+lam*beta**2) * c)**2
                 / [sum_modes lam*beta**2/(1+lam*beta**2)]**2.

    Undefined at lam = 0 (the trace denominator vanishes); refused when the
    coefficients were not analyzed on an interpolatory grid, because the
    shortcut identifying the residual with shrunk coefficients holds only
    there.
    """
    _require_selection_penalty(penalty)
    if coeffs.degree != penalty.degree:
        raise ValueError(
            f"coefficient degree {coeffs.degree} does not match penalty degree "
            f"{penalty.degree}"
        )
    if coeffs.n_points != 2 * coeffs.degree + 1:
        raise ValueError(
            "the closed-form GCV score requires coefficients from an interpolatory "
            f"grid with n_points = 2*degree + 1, got n_points = {coeffs.n_points}"
        )
    if not lam > 0:
        raise ValueError(f"the GCV score is undefined at lam = {lam}; it needs lam > 0")
    beta_sq = penalty.beta**2
    weight = lam * beta_sq / (1.0 + lam * beta_sq)
    trace = float(np.sum(weight))
    if trace == 0.0:
        raise ValueError("the GCV score is undefined: the penalty traces to zero")
    num = float(np.sum((weight * coeffs.values) ** 2))
    return num / trace**2


def gcv_trace(penalty: PenaltySequence, lam: float) -> float:
    """Effective residual degrees of freedom sum_modes lam*beta**2/(1+lam*beta**2)."""
    if lam < 0:
        raise ValueError(f"regularization parameter must be >= 0, got {lam}")
    beta_sq = penalty.beta**2
    return float(np.sum(lam * beta_sq / (1.0 + lam * beta_sq)))


def gcv_bounds(coeffs, lam: float) -> tuple[float, float]:
    """A-priori envelope for the GCV score from the extreme |coefficients|:

        0.5*(lam*z_min/(1+lam))**2  <=  V(lam)  <=  (1+lam)**2 * z_max**2 / (2*lam**2).
    """
    if not lam > 0:
        raise ValueError(f"the GCV envelope needs lam > 0, got {lam}")
    z = np.abs(coeffs.values)
    z_min = float(z.min())
    z_max = float(z.max())
    lower = 0.5 * (lam * z_min / (1.0 + lam)) ** 2
    upper = (1.0 + lam) ** 2 * z_max**2 / (2.0 * lam**2)
    return lower, upper


def select_gcv(
    samples,
    grid: TrapezoidalGrid,
    degree: int,
    penalty: PenaltySequence,
    params: ParameterGrid,
) -> SelectionReport:
    """Minimize the closed-form GCV score over the parameter grid.

    Requires the interpolatory setting N = 2*degree + 1 and nondegenerate
    data (some nonzero coefficient).
    """
    _check_problem(grid, degree, penalty)
    if grid.n_points != 2 * degree + 1:
        raise InapplicableStrategyError(
            "GCV selection requires the interpolatory setting "
            f"n_points = 2*degree + 1, got n_points = {grid.n_points}"
        )
    samples = np.asarray(samples, dtype=float)
    c = analyze(samples, grid, degree).values
    if not np.any(c):
        raise InapplicableStrategyError(
            "GCV is inapplicable: all data coefficients are zero"
        )
    beta_sq = penalty.beta**2
    lam = params.lambdas
    weight = np.multiply.outer(beta_sq, lam)
    weight /= 1.0 + weight
    num = ((weight * c[:, None]) ** 2).sum(axis=0)
    trace = weight.sum(axis=0)
    v_vals = num / trace**2
    idx = int(np.argmin(v_vals))
    return SelectionReport(
        strategy="gcv",
        lambdas=lam,
        chosen_lambda=float(lam[idx]),
        chosen_index=idx,
        gcv=v_vals,
    )


def select_oracle(
    samples,
    grid: TrapezoidalGrid,
    degree: int,
    penalty: PenaltySequence,
    params: ParameterGrid,
    true_function,
    eval_points: int = 10000,
) -> SelectionReport:
    """Benchmark selector: minimize the true L2 error against a known function.

    The error is the discretized L2 distance sqrt((2*pi/K) * sum (p - f)**2)
    on a K-point equidistant evaluation grid (K = ``eval_points``).
    """
    _check_problem(grid, degree, penalty)
    if eval_points < 1000:
        raise ValueError(f"eval_points must be >= 1000, got {eval_points}")
    samples = np.asarray(samples, dtype=float)
    c = analyze(samples, grid, degree).values
    beta_sq = penalty.beta**2
    shrink = 1.0 + np.multiply.outer(beta_sq, params.lambdas)
    x = uniform_eval_points(eval_points)
    truth = np.asarray(true_function(x), dtype=float)
    diff = basis_matrix(x, degree) @ (c[:, None] / shrink) - truth[:, None]
    errs = np.sqrt(TWO_PI / eval_points * np.einsum("jt,jt->t", diff, diff))
    idx = int(np.argmin(errs))
    return SelectionReport(
        strategy="oracle",
        lambdas=params.lambdas,
        chosen_lambda=float(params.lambdas[idx]),
        chosen_index=idx,
        l2_error=errs,
    )
