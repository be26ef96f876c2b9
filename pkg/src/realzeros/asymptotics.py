"""Closed-form predictions and the near-endpoint window helpers.

All logarithms are natural. The window is (delta(n), eps(n)) in the distance
y = 1 - |x| from the endpoints, with delta = log log n / n and
eps = (log log n)^2 / log n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadDegree

LAWS = {
    "nonvanishing_density": ("two_over_pi_log_n", 2.0 / math.pi),
    "constant_covariance": ("one_over_pi_log_n", 1.0 / math.pi),
}

MIN_WINDOW_DEGREE = 16


@dataclass(frozen=True)
class Prediction:
    n: int
    law: str
    value: float
    error_order: str


def predicted_total(n: int, model_class: str = "nonvanishing_density", smoothness: str = "C1") -> Prediction:
    """Leading-order expected number of real zeros on the whole line.

    ``error_order`` is metadata: O(log log n) for C1 densities, o(log n)
    otherwise.
    """
    if n < 2:
        raise ValueError("prediction needs n >= 2")
    try:
        law, coef = LAWS[model_class]
    except KeyError:
        raise ValueError(f"unknown model class {model_class!r}; expected one of {sorted(LAWS)}") from None
    order = "O(log log n)" if smoothness == "C1" else "o(log n)"
    return Prediction(n, law, coef * math.log(n), order)


def window(n: int) -> tuple[float, float]:
    """(delta, eps) for degree n; raises :class:`BadDegree` for n < 16."""
    if n < MIN_WINDOW_DEGREE:
        raise BadDegree(f"window needs n >= {MIN_WINDOW_DEGREE}, got {n}")
    ll = math.log(math.log(n))
    delta = ll / n
    eps = ll * ll / math.log(n)
    if not delta < eps:
        raise BadDegree(f"delta={delta:.4g} >= eps={eps:.4g} at n={n}")
    return delta, eps


def g(y: float, n: int) -> float:
    """y log n / log log n."""
    if not y > 0:
        raise ValueError("y must be positive")
    if n < 3:
        raise BadDegree("log log n must be positive")
    return y * math.log(n) / math.log(math.log(n))


def gap_over_loglog(measured: float, predicted: float, n: int) -> float:
    """|measured - predicted| / log log n, for eyeballing the O(log log n) term."""
    return abs(measured - predicted) / math.log(math.log(n))
