"""Second moments of a random polynomial and its derivative.

For P_n(x) = sum_k X_k x^k with stationary coefficients,

    A(x) = E[P_n(x)^2]        = sum_{k,j} Gamma(k-j) x^{k+j}
    B(x) = E[P_n(x) P_n'(x)]  = sum_{k,j} Gamma(k-j) k x^{k+j-1}
    C(x) = E[P_n'(x)^2]       = sum_{k,j} Gamma(k-j) k j x^{k+j-2}

Three exact evaluations are provided (O(n^2) double sum, O(n) diagonal
regrouping, spectral quadrature) together with the near-endpoint
asymptotic forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import g as window_g, window
from .covariance import CovarianceModel, gamma_array, spectral_density
from .errors import OutsideWindow, QuadratureFailure
from .quadrature import integrate

METHODS = ("direct", "diagonal", "spectral", "asymptotic_pos", "asymptotic_neg")

# Elements per vectorised block in the diagonal path (batch * (n + 1)).
_BLOCK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class MomentTriple:
    x: float
    n: int
    A: float
    B: float
    C: float
    method: str

    @property
    def discriminant(self) -> float:
        """A*C - B^2, non-negative up to rounding."""
        return self.A * self.C - self.B * self.B


@dataclass(frozen=True)
class AsymptoticContext:
    y: float
    n: int
    g_value: float
    f_end: float


def moments_direct(model: CovarianceModel, n: int, x: float) -> MomentTriple:
    """Literal double sums; O(n^2) reference oracle.

    The Toeplitz matrix Gamma(|k-j|) is applied in row blocks so memory stays
    bounded for large n.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = float(x)
    gam = gamma_array(model, n)
    k = np.arange(n + 1)
    v = np.ones(n + 1)
    for i in range(1, n + 1):
        v[i] = v[i - 1] * x
    u = np.zeros(n + 1)
    u[1:] = k[1:] * v[:-1]  # k x^{k-1}; the k = 0 term is 0 by definition
    gv = np.empty(n + 1)
    gu = np.empty(n + 1)
    rows = max(1, _BLOCK_ELEMENTS // (n + 1))
    for start in range(0, n + 1, rows):
        stop = min(n + 1, start + rows)
        block = gam[np.abs(k[start:stop, None] - k[None, :])]
        gv[start:stop] = block @ v
        gu[start:stop] = block @ u
    return MomentTriple(x, n, float(v @ gv), float(u @ gv), float(u @ gu), "direct")


def _powers(logb: np.ndarray, k: np.ndarray) -> np.ndarray:
    # b^k from log b, with b^0 = 1 even when b = 0
    with np.errstate(invalid="ignore"):
        out = np.exp(np.outer(logb, k))
    out[:, np.asarray(k) == 0] = 1.0
    return out


def _signed_powers(x: np.ndarray, logx: np.ndarray, k: np.ndarray) -> np.ndarray:
    out = _powers(logx, k)
    neg_odd = (x[:, None] < 0) & (np.asarray(k)[None, :] % 2 == 1)
    out[neg_odd] = -out[neg_odd]
    return out


def diagonal_arrays(gam: np.ndarray, n: int, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised (A, B, C) at points ``xs`` by grouping terms on d = k - j.

    With t = x^2, T0(M) = sum_{m<=M} t^m, U1(M) = sum_{1<=m<=M} m t^{m-1},
    U2(M) = sum_{1<=m<=M} m^2 t^{m-1}:

        A = Gamma(0) T0(n) + 2 sum_{d>=1} Gamma(d) x^d T0(n-d)
        B = Gamma(0) x U1(n) + sum_{d>=1} Gamma(d) x^{d-1} (2 t U1(n-d) + d T0(n-d))
        C = Gamma(0) U2(n) + 2 sum_{d>=1} Gamma(d) x^d (U2(n-d) + d U1(n-d))

    The inner geometric sums are accumulated explicitly, which stays exact at
    |x| = 1 and avoids cancellation in 1 - x^2 near the endpoints.
    """
    xs = np.asarray(xs, dtype=float).reshape(-1)
    A = np.empty(xs.size)
    B = np.empty(xs.size)
    C = np.empty(xs.size)
    if n == 0:
        A[:] = gam[0]
        B[:] = 0.0
        C[:] = 0.0
        return A, B, C
    m = np.arange(n + 1, dtype=float)
    d = np.arange(1, n + 1)
    g = np.asarray(gam[1: n + 1], dtype=float)
    nz = np.flatnonzero(g)
    rows = max(1, _BLOCK_ELEMENTS // (n + 1))
    for start in range(0, xs.size, rows):
        x = xs[start: start + rows]
        t = x * x
        with np.errstate(divide="ignore"):
            logt = np.log(t)
        # t^m, with 0^0 = 1
        tp = _powers(logt, m)
        tm1 = np.zeros_like(tp)
        tm1[:, 1:] = tp[:, :-1]  # t^{m-1} for m >= 1
        T0 = np.cumsum(tp, axis=1)
        U1 = np.cumsum(m * tm1, axis=1)
        U2 = np.cumsum(m * m * tm1, axis=1)
        g0 = float(gam[0])
        a = g0 * T0[:, n]
        b = g0 * x * U1[:, n]
        c = g0 * U2[:, n]
        if nz.size:
            dd = d[nz]
            rev = n - dd
            absx = np.abs(x)
            with np.errstate(divide="ignore"):
                logx = np.log(absx)
            xd = _signed_powers(x, logx, dd)
            xd1 = _signed_powers(x, logx, dd - 1)
            gd = g[nz]
            t0r, u1r, u2r = T0[:, rev], U1[:, rev], U2[:, rev]
            a = a + 2.0 * (xd * t0r) @ gd
            b = b + (xd1 * (2.0 * t[:, None] * u1r + dd * t0r)) @ gd
            c = c + 2.0 * (xd * (u2r + dd * u1r)) @ gd
        A[start: start + rows] = a
        B[start: start + rows] = b
        C[start: start + rows] = c
    return A, B, C


def moments_diagonal(model: CovarianceModel, n: int, x: float) -> MomentTriple:
    """O(n) evaluation of (A, B, C) by regrouping the double sums on k - j."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    A, B, C = diagonal_arrays(gamma_array(model, n), n, np.array([float(x)]))
    return MomentTriple(float(x), n, float(A[0]), float(B[0]), float(C[0]), "diagonal")


def _spectral_factors(x: float, n: int, phi: np.ndarray):
    e = np.exp(1j * phi)
    q = x ** (n + 1) * np.exp(1j * (n + 1) * phi)
    # a(phi): sum_k x^k e^{-ik phi}; b = conj(a); db = d/dy of b at y = x.
    a = (1.0 - np.conj(q)) / (1.0 - x * np.conj(e))
    b = (1.0 - q) / (1.0 - x * e)
    lead = (n + 1) * x ** n * np.exp(1j * (n + 1) * phi)
    db = (-lead * (1.0 - x * e) + (1.0 - q) * e) / (1.0 - x * e) ** 2
    da = np.conj(db)
    return a, b, da, db


def moments_spectral(
    model: CovarianceModel, n: int, x: float, *, epsrel: float = 1e-11
) -> MomentTriple:
    """(A, B, C) as integrals of the generating kernel against f(phi).

    The integrands are complex; each result's imaginary residue must be below
    1e-9 (relative to the moment's natural scale when that exceeds 1) and is
    discarded.
    """
    x = float(x)
    if not abs(x) < 1:
        raise ValueError("spectral moments need |x| < 1")
    if n < 0:
        raise ValueError("degree must be non-negative")
    f = spectral_density(model)
    cuts = [-math.pi / 2, 0.0, math.pi / 2]

    def quad(kernel, scale_hint=0.0):
        res = integrate(lambda p: kernel(p) * f(p), -math.pi, math.pi, breakpoints=cuts,
                        epsabs=max(1e-300, 1e-13 * scale_hint), epsrel=epsrel, max_depth=50)
        if not res.converged:
            raise QuadratureFailure(f"spectral moment at x={x}, n={n}: error {res.error:.3g}")
        val = complex(res.value)
        if abs(val.imag) > 1e-9 * max(1.0, abs(val.real), scale_hint):
            raise QuadratureFailure(f"imaginary residue {val.imag:.3g} too large")
        return val.real

    def ka(p):
        a, b, _, _ = _spectral_factors(x, n, p)
        return a * b

    def kc(p):
        _, _, da, db = _spectral_factors(x, n, p)
        return da * db

    def kb(p):
        a, _, _, db = _spectral_factors(x, n, p)
        return a * db

    A = quad(ka)
    C = quad(kc) if n > 0 else 0.0
    B = quad(kb, math.sqrt(max(A * C, 0.0))) if n > 0 else 0.0
    return MomentTriple(x, n, A, B, C, "spectral")


def asymptotic_context(model: CovarianceModel, n: int, x: float) -> AsymptoticContext:
    """Context at x = +-(1 - y): f(0) on the positive axis, f(pi) on the negative."""
    y = 1.0 - abs(float(x))
    sd = spectral_density(model)
    f_end = sd.f0 if x > 0 else sd.fpi
    return AsymptoticContext(y, n, window_g(y, n), f_end)


def moments_asymptotic(
    ctx: AsymptoticContext, side: str = "positive", *, allow_extrapolation: bool = False
) -> MomentTriple:
    """Leading-order endpoint forms

        A ~ (2 f/y) arctan(g/y),  B ~ +-(f/y^2) arctan(g/y),  C ~ (f/y^3) arctan(g/y)

    with f = f(0) and B > 0 on the positive side, f = f(pi) and B < 0 on the
    negative side. Raises :class:`OutsideWindow` unless delta(n) < y < eps(n).
    """
    if side not in ("positive", "negative"):
        raise ValueError("side must be 'positive' or 'negative'")
    y, n, f_end = ctx.y, ctx.n, ctx.f_end
    if not allow_extrapolation:
        delta, eps = window(n)
        if not delta < y < eps:
            raise OutsideWindow(f"y={y:.4g} outside ({delta:.4g}, {eps:.4g}) for n={n}")
    if not (y > 0 and f_end > 0):
        raise ValueError("need y > 0 and f_end > 0")
    arc = math.atan(ctx.g_value / y)
    sgn = 1.0 if side == "positive" else -1.0
    x = sgn * (1.0 - y)
    return MomentTriple(
        x, n,
        2.0 * f_end / y * arc,
        sgn * f_end / y ** 2 * arc,
        f_end / y ** 3 * arc,
        "asymptotic_pos" if side == "positive" else "asymptotic_neg",
    )
