"""Penalization weight sequences for the coefficient-shrinkage solver.

A penalty attaches a nonnegative weight beta(ell, k) to every basis mode; the
regularized solver divides mode (ell, k) by 1 + lambda*beta**2, so larger
weights damp their modes harder.  The default family raises the frequency to
a power,

    beta(ell, k) = ell**s,   s > 0,

which grows with frequency and vanishes on the constant mode -- the shape all
selection and error-bound routines require.  A constant-weight form (every
mode weighted tau, including the constant mode) exists solely to mirror the
regularized barycentric evaluator and is flagged ``constant_form`` so that
the selection machinery can reject it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FourierCoefficients

__all__ = [
    "PenaltySequence",
    "laplace_penalty",
    "constant_penalty",
    "sobolev_norm_truncated",
]


@dataclass(frozen=True)
class PenaltySequence:
    """Mode weights in canonical harmonic order (length 2*degree + 1).

    ``exponent_s`` is set for the power-law family, ``constant_form`` marks
    the constant-weight family.
    """

    degree: int
    beta: np.ndarray
    exponent_s: float | None = None
    constant_form: bool = False


def _mode_degrees(degree: int) -> np.ndarray:
    """Frequency ell of each canonical slot: 0, 1, 1, 2, 2, ..."""
    ells = np.zeros(2 * degree + 1)
    if degree > 0:
        ells[1::2] = np.arange(1, degree + 1)
        ells[2::2] = np.arange(1, degree + 1)
    return ells


def laplace_penalty(degree: int, s: float = 1.0) -> PenaltySequence:
    """Power-law weights beta(ell, k) = ell**s (zero on the constant mode).

    The exponent must be positive; s = 1 matches second-derivative smoothing,
    larger s penalizes high frequencies more aggressively.
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if not s > 0:
        raise ValueError(f"smoothness exponent s must be > 0, got {s}")
    beta = _mode_degrees(degree) ** float(s)
    beta.flags.writeable = False
    return PenaltySequence(degree=degree, beta=beta, exponent_s=float(s))


def constant_penalty(degree: int, value: float) -> PenaltySequence:
    """Constant weights beta(ell, k) = value >= 0 on every mode.

    Note the square: the damping factor applied to each mode is
    1/(1 + lam*value**2), so ``constant_penalty(L, sqrt(tau))`` is the
    sequence that matches ``evaluate_barycentric(..., tau=tau, ...)``.

    Only the barycentric evaluator accepts this form; selection and
    error-bound routines require a penalty that vanishes on the constant
    mode (use :func:`laplace_penalty` there).
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if value < 0:
        raise ValueError(f"constant weight must be >= 0, got {value}")
    beta = np.full(2 * degree + 1, float(value))
    beta.flags.writeable = False
    return PenaltySequence(degree=degree, beta=beta, constant_form=True)


def sobolev_norm_truncated(coeffs: FourierCoefficients, penalty: PenaltySequence) -> float:
    """Weighted coefficient norm sqrt(sum_modes (beta * coefficient)**2).

    Measures the smoothness of the degree-L polynomial with the given
    coefficients; the constant mode never contributes under a power-law
    penalty because its weight is zero.
    """
    if coeffs.degree != penalty.degree:
        raise ValueError(
            f"coefficient degree {coeffs.degree} does not match penalty degree "
            f"{penalty.degree}"
        )
    return float(np.linalg.norm(penalty.beta * coeffs.values))
