"""Seeded noise experiments: signal gallery, error metrics, strategy sweeps.

Noise convention
----------------
Noise is injected at a prescribed signal-to-noise ratio defined as

    SNR = 10 * log10(P_signal / (alpha * P_noise)),

where P_signal is the root-mean-square of the clean samples and P_noise the
standard deviation (ddof=0) of a raw standard-normal draw.  Solving for the
scale gives alpha = P_signal / (P_noise * 10**(snr_db/10)); the additive
noise is alpha times the raw draw.  The raw draw comes from
``numpy.random.default_rng(seed).standard_normal(N)``, so a (seed, N) pair
pins the realization bit for bit, and the scaled noise vector is kept on the
realization so every experiment is replayable.

Gallery conventions
-------------------
``f1``       exp(cos(x))                      (smooth, rapidly decaying modes)
``f2``       exp(cos(x)) + sin(30*x)          (smooth plus one high frequency)
``sine``     sin(x)
``square``   sign(sin(x))                     (unit amplitude, 0 at the jumps)
``sawtooth`` x/pi on [-pi, pi), continued 2*pi-periodically (unit amplitude)
``triangle`` (2/pi) * arcsin(sin(x))          (unit amplitude)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    TWO_PI,
    FourierCoefficients,
    TrapezoidalGrid,
    analyze,
    basis_matrix,
    make_grid,
    uniform_eval_points,
)
from .penalty import laplace_penalty
from .selection import (
    ParameterGrid,
    SelectionError,
    parameter_grid,
    select_gcv,
    select_lcurve,
    select_morozov,
)

__all__ = [
    "NoisyRealization",
    "SweepRow",
    "SweepReport",
    "add_noise_snr",
    "l2_error",
    "uniform_error",
    "gallery",
    "gallery_names",
    "vallee_poussin",
    "vallee_poussin_filter",
    "sweep",
    "STRATEGY_NAMES",
]

STRATEGY_NAMES = ("oracle", "lcurve", "morozov", "gcv")


# ---------------------------------------------------------------------------
# Noise injection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoisyRealization:
    """One seeded noisy sampling of a signal, with the noise kept for replay.

    ``epsilon`` is the scaled additive noise (noisy - clean), ``alpha_scale``
    the factor applied to the raw draw, ``eps_sup`` its max-norm and
    ``eps_wnorm`` its weighted 2-norm sqrt((2*pi/N) * sum eps**2).
    """

    clean: np.ndarray
    noisy: np.ndarray
    epsilon: np.ndarray
    snr_db: float
    seed: int
    alpha_scale: float
    eps_sup: float
    eps_wnorm: float


def add_noise_snr(clean, snr_db: float, seed: int) -> NoisyRealization:
    """Add seeded Gaussian noise scaled to the requested SNR (in dB)."""
    clean = np.asarray(clean, dtype=float)
    if clean.ndim != 1 or clean.size == 0:
        raise ValueError("clean samples must be a nonempty 1-d vector")
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    p_signal = float(np.sqrt(np.mean(clean**2)))
    if p_signal == 0.0:
        raise ValueError("SNR is undefined for an identically zero signal")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(clean.size)
    p_noise = float(np.std(raw))
    alpha = p_signal / (p_noise * 10.0 ** (snr_db / 10.0))
    epsilon = alpha * raw
    n = clean.size
    return NoisyRealization(
        clean=clean,
        noisy=clean + epsilon,
        epsilon=epsilon,
        snr_db=float(snr_db),
        seed=int(seed) if np.ndim(seed) == 0 else seed,
        alpha_scale=alpha,
        eps_sup=float(np.max(np.abs(epsilon))),
        eps_wnorm=float(np.sqrt(TWO_PI / n * np.dot(epsilon, epsilon))),
    )


# ---------------------------------------------------------------------------
# Error metrics
# ---------------------------------------------------------------------------


def _eval_diff(approximant, true_function, eval_points: int) -> np.ndarray:
    if eval_points < 1000:
        raise ValueError(f"eval_points must be >= 1000, got {eval_points}")
    x = uniform_eval_points(eval_points)
    return np.asarray(approximant(x), dtype=float) - np.asarray(
        true_function(x), dtype=float
    )


def l2_error(approximant, true_function, eval_points: int = 10000) -> float:
    """Discretized L2 distance sqrt((2*pi/K) * sum (p - f)**2) on K equidistant
    evaluation angles.  ``approximant`` is anything callable on angle arrays.
    """
    diff = _eval_diff(approximant, true_function, eval_points)
    return float(np.sqrt(TWO_PI / eval_points * np.dot(diff, diff)))


def uniform_error(approximant, true_function, eval_points: int = 10000) -> float:
    """Max absolute deviation over the same evaluation grid as :func:`l2_error`."""
    diff = _eval_diff(approximant, true_function, eval_points)
    return float(np.max(np.abs(diff)))


# ---------------------------------------------------------------------------
# Signal gallery
# ---------------------------------------------------------------------------


def _sawtooth(x):
    return np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) / np.pi - 1.0


_GALLERY = {
    "f1": lambda x: np.exp(np.cos(x)),
    "f2": lambda x: np.exp(np.cos(x)) + np.sin(30.0 * np.asarray(x, dtype=float)),
    "sine": np.sin,
    "square": lambda x: np.sign(np.sin(x)),
    "sawtooth": _sawtooth,
    "triangle": lambda x: 2.0 / np.pi * np.arcsin(np.sin(x)),
}


def gallery_names() -> list[str]:
    return sorted(_GALLERY)


def gallery(name: str):
    """Look up a test signal by name; see the module docstring for definitions."""
    try:
        return _GALLERY[name]
    except KeyError:
        raise ValueError(
            f"unknown gallery function {name!r}; choose one of {', '.join(gallery_names())}"
        ) from None


# ---------------------------------------------------------------------------
# Delayed-mean filtered approximation
# ---------------------------------------------------------------------------


def vallee_poussin_filter(ell: int, n: int) -> float:
    """Taper weight of frequency ell: 1 up to n, then linear decay to 0 at 2n."""
    if n < 1:
        raise ValueError(f"filter half-degree n must be >= 1, got {n}")
    if ell < 0:
        raise ValueError(f"frequency must be >= 0, got {ell}")
    if ell <= n:
        return 1.0
    if ell <= 2 * n - 1:
        return 1.0 - (ell - n) / n
    return 0.0


def vallee_poussin(f, n: int, quad_points: int) -> FourierCoefficients:
    """de la Vallee Poussin mean of ``f``: a degree 2n-1 polynomial whose
    coefficients are tapered quadrature approximations of the true ones.

    Reproduces every polynomial of degree <= n exactly and never amplifies
    the sup-norm by more than a factor 3.  ``quad_points`` must be odd and
    at least 4n+1 so the coefficient quadrature is exact through degree 2n.
    The result is callable.
    """
    if n < 1:
        raise ValueError(f"half-degree n must be >= 1, got {n}")
    if quad_points < 4 * n + 1:
        raise ValueError(
            f"quadrature with {quad_points} nodes cannot resolve the filtered "
            f"coefficients; need quad_points >= {4 * n + 1}"
        )
    grid = make_grid(quad_points)
    coeffs = analyze(np.asarray(f(grid.nodes), dtype=float), grid, 2 * n - 1)
    taper = np.array(
        [vallee_poussin_filter(idx.ell, n) for idx in coeffs.indices()]
    )
    return FourierCoefficients(
        degree=coeffs.degree, values=taper * coeffs.values, n_points=quad_points
    )


# ---------------------------------------------------------------------------
# Sweep protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One noise level: chosen lambdas, their errors, and failure notes.

    All dictionaries are keyed by strategy name ("oracle", "lcurve",
    "morozov", "gcv").  A strategy that failed has None entries and an
    explanatory message.  ``curve`` optionally carries the per-lambda
    (l2, uniform) error arrays over the parameter grid.
    """

    snr_db: float
    row_seed: int
    eps_wnorm: float
    eps_sup: float
    chosen: dict
    chosen_index: dict
    l2: dict
    uniform: dict
    messages: dict
    assumption_ok: bool | None
    curve: tuple | None = None


@dataclass(frozen=True)
class SweepReport:
    """Deterministic sweep outcome: one row per SNR level plus the setup."""

    function_name: str
    n_points: int
    degree: int
    exponent_s: float
    seed: int
    params: ParameterGrid
    eval_points: int
    rows: tuple


def _row_seed(seed: int, index: int) -> int:
    """Independent per-row stream derived from (master seed, row index)."""
    return int(np.random.SeedSequence((int(seed), int(index))).generate_state(1, np.uint64)[0])


def sweep(
    function,
    n_points: int,
    exponent_s: float = 1.0,
    snr_levels=(10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0),
    strategies=STRATEGY_NAMES,
    seed: int = 0,
    params: ParameterGrid | None = None,
    eval_points: int = 10000,
    emit_curves: bool = False,
) -> SweepReport:
    """Run every requested strategy at every SNR level on one signal.

    ``function`` is a gallery name or a callable.  The polynomial degree is
    (N-1)/2, i.e. the interpolatory setting, and every chosen lambda is a
    grid value (no bisection refinement) so rows stay comparable.  Identical
    arguments produce an identical report, bit for bit; each row draws its
    noise from an independent stream derived from (seed, row index).
    """
    if isinstance(function, str):
        name = function
        func = gallery(function)
    else:
        name = getattr(function, "__name__", "custom")
        func = function
    unknown = [s for s in strategies if s not in STRATEGY_NAMES]
    if unknown:
        raise ValueError(
            f"unknown strategies {unknown}; choose from {list(STRATEGY_NAMES)}"
        )
    grid = make_grid(n_points)
    degree = (grid.n_points - 1) // 2
    pen = laplace_penalty(degree, exponent_s)
    if params is None:
        params = parameter_grid()
    clean = np.asarray(func(grid.nodes), dtype=float)

    need_curve = emit_curves or "oracle" in strategies
    eval_x = uniform_eval_points(eval_points)
    truth = np.asarray(func(eval_x), dtype=float)
    eval_mat = basis_matrix(eval_x, degree) if need_curve or strategies else None
    beta_sq = pen.beta**2

    rows = []
    for i, snr_db in enumerate(snr_levels):
        row_seed = _row_seed(seed, i)
        realization = add_noise_snr(clean, snr_db, row_seed)
        c = analyze(realization.noisy, grid, degree).values

        l2_curve = uniform_curve = None
        if need_curve:
            shrink = 1.0 + np.multiply.outer(beta_sq, params.lambdas)
            diff = eval_mat @ (c[:, None] / shrink) - truth[:, None]
            l2_curve = np.sqrt(TWO_PI / eval_points * np.einsum("jt,jt->t", diff, diff))
            uniform_curve = np.abs(diff).max(axis=0)

        def errors_at(idx: int) -> tuple[float, float]:
            alpha = c / (1.0 + params.lambdas[idx] * beta_sq)
            diff = eval_mat @ alpha - truth
            return (
                float(np.sqrt(TWO_PI / eval_points * np.dot(diff, diff))),
                float(np.max(np.abs(diff))),
            )

        chosen, chosen_index, l2_by, uniform_by, messages = {}, {}, {}, {}, {}
        assumption_ok = None
        for strategy in strategies:
            try:
                if strategy == "oracle":
                    idx = int(np.argmin(l2_curve))
                    lam = float(params.lambdas[idx])
                elif strategy == "lcurve":
                    rep = select_lcurve(realization.noisy, grid, degree, pen, params)
                    idx, lam = rep.chosen_index, rep.chosen_lambda
                elif strategy == "gcv":
                    rep = select_gcv(realization.noisy, grid, degree, pen, params)
                    idx, lam = rep.chosen_index, rep.chosen_lambda
                else:  # morozov
                    rep = select_morozov(
                        realization.noisy,
                        grid,
                        degree,
                        pen,
                        params,
                        realization.eps_wnorm,
                        refine=False,
                    )
                    assumption_ok = rep.assumption_ok
                    if rep.chosen_lambda is None:
                        raise SelectionError(
                            "noise assumption violated: the noise norm does not "
                            "separate the full-degree residual from the mean residual"
                        )
                    idx, lam = rep.chosen_index, rep.chosen_lambda
            except SelectionError as exc:
                chosen[strategy] = None
                chosen_index[strategy] = None
                l2_by[strategy] = None
                uniform_by[strategy] = None
                messages[strategy] = str(exc)
                continue
            chosen[strategy] = lam
            chosen_index[strategy] = idx
            if l2_curve is not None:
                l2_by[strategy] = float(l2_curve[idx])
                uniform_by[strategy] = float(uniform_curve[idx])
            else:
                l2_by[strategy], uniform_by[strategy] = errors_at(idx)
        rows.append(
            SweepRow(
                snr_db=float(snr_db),
                row_seed=row_seed,
                eps_wnorm=realization.eps_wnorm,
                eps_sup=realization.eps_sup,
                chosen=chosen,
                chosen_index=chosen_index,
                l2=l2_by,
                uniform=uniform_by,
                messages=messages,
                assumption_ok=assumption_ok,
                curve=(l2_curve, uniform_curve) if emit_curves else None,
            )
        )
    return SweepReport(
        function_name=name,
        n_points=grid.n_points,
        degree=degree,
        exponent_s=float(exponent_s),
        seed=int(seed),
        params=params,
        eval_points=int(eval_points),
        rows=tuple(rows),
    )
