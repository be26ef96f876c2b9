"""Expected real-zero counts from the Kac-Rice formula

    E N(a, b) = (1/pi) int_a^b sqrt(A C - B^2) / A dx.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import MIN_WINDOW_DEGREE, window
from .covariance import CovarianceModel, gamma_array
from .errors import BadDegree, DegenerateMoment
from .moments import MomentTriple, diagonal_arrays
from .quadrature import integrate

ENDPOINT_GUARD = 1e-12
DEFAULT_TOL = 1e-6
MAX_DEPTH = 40
# Geometric breakpoints y = 2^-k near each endpoint; the integrand behaves
# like 1/(2y) over most of that range.
_GEOMETRIC_LEVELS = 40


@dataclass(frozen=True)
class ZeroCountEstimate:
    interval: tuple[float, float]
    value: float
    quad_error: float
    method: str = "kac_rice"
    converged: bool = True


@dataclass(frozen=True)
class PartitionReport:
    n: int
    delta: float
    eps: float
    estimates: tuple[ZeroCountEstimate, ...]
    total_unit: ZeroCountEstimate

    @property
    def total_line(self) -> float:
        return 2.0 * self.total_unit.value

    @property
    def window_positive(self) -> ZeroCountEstimate:
        return self.estimates[4]

    @property
    def window_negative(self) -> ZeroCountEstimate:
        return self.estimates[1]

    @property
    def outer(self) -> tuple[ZeroCountEstimate, ...]:
        e = self.estimates
        return (e[0], e[2], e[3], e[5])


def integrand(t: MomentTriple) -> float:
    """sqrt(max(AC - B^2, 0)) / (pi A)."""
    if not t.A > 0:
        raise DegenerateMoment(f"A={t.A!r} at x={t.x}, n={t.n}")
    return math.sqrt(max(t.A * t.C - t.B * t.B, 0.0)) / (math.pi * t.A)


def integrand_values(model: CovarianceModel, n: int, xs) -> np.ndarray:
    """Vectorised Kac-Rice integrand via the diagonal moment sums."""
    A, B, C = diagonal_arrays(gamma_array(model, n), n, np.asarray(xs, dtype=float))
    if np.any(A <= 0):
        bad = np.asarray(xs, dtype=float).reshape(-1)[A <= 0][0]
        raise DegenerateMoment(f"A <= 0 at x={bad}, n={n}")
    return np.sqrt(np.maximum(A * C - B * B, 0.0)) / (math.pi * A)


def _breakpoints(n: int) -> list[float]:
    pts = [0.0]
    if n >= MIN_WINDOW_DEGREE:
        delta, eps = window(n)
        pts += [1 - eps, 1 - delta, -1 + eps, -1 + delta]
    ys = 2.0 ** -np.arange(1, _GEOMETRIC_LEVELS + 1)
    pts += list(1 - ys) + list(-1 + ys)
    return pts


def expected_zeros(
    model: CovarianceModel, n: int, a: float, b: float, *, tol: float = DEFAULT_TOL
) -> ZeroCountEstimate:
    """Expected number of zeros of P_n in (a, b), -1 <= a < b <= 1.

    Endpoints at +-1 are pulled in by ``ENDPOINT_GUARD``. An unmet tolerance
    does not raise; the estimate comes back with ``converged=False``.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if not -1.0 <= a < b <= 1.0:
        raise ValueError(f"need -1 <= a < b <= 1, got ({a}, {b})")
    if n == 0:
        return ZeroCountEstimate((a, b), 0.0, 0.0)
    lo = max(a, -1.0 + ENDPOINT_GUARD)
    hi = min(b, 1.0 - ENDPOINT_GUARD)
    res = integrate(lambda xs: integrand_values(model, n, xs), lo, hi,
                    breakpoints=_breakpoints(n), epsabs=tol, max_depth=MAX_DEPTH)
    return ZeroCountEstimate((a, b), max(float(res.value), 0.0), res.error, "kac_rice", res.converged)


def expected_zeros_total(model: CovarianceModel, n: int, *, tol: float = DEFAULT_TOL) -> ZeroCountEstimate:
    """E N(-inf, inf) = 2 E N(-1, 1) by the reversal x -> 1/x.

    Cutting (-1, 1) to (-1 + eta, 1 - eta) drops at most about 2 n eta / pi.
    """
    half = expected_zeros(model, n, -1.0, 1.0, tol=tol / 2)
    return ZeroCountEstimate((-math.inf, math.inf), 2 * half.value, 2 * half.quad_error,
                             "kac_rice", half.converged)


def partition_intervals(n: int) -> list[tuple[float, float]]:
    delta, eps = window(n)
    return [
        (-1.0, -1.0 + delta),
        (-1.0 + delta, -1.0 + eps),
        (-1.0 + eps, 0.0),
        (0.0, 1.0 - eps),
        (1.0 - eps, 1.0 - delta),
        (1.0 - delta, 1.0),
    ]


def partition_counts(model: CovarianceModel, n: int, *, tol: float = DEFAULT_TOL) -> PartitionReport:
    """Kac-Rice counts on the six-interval split of (-1, 1) around the window."""
    if n < MIN_WINDOW_DEGREE:
        raise BadDegree(f"partition needs n >= {MIN_WINDOW_DEGREE}")
    delta, eps = window(n)
    parts = tuple(expected_zeros(model, n, a, b, tol=tol / 6) for a, b in partition_intervals(n))
    total = expected_zeros(model, n, -1.0, 1.0, tol=tol)
    return PartitionReport(n, delta, eps, parts, total)
