"""Stationary unit-variance Gaussian coefficient laws.

A :class:`CovarianceModel` fixes the lag covariance Gamma(k) = E[X_0 X_k] of
the coefficient sequence. Where Gamma is absolutely summable the model also
has a spectral density f on [-pi, pi] with

    Gamma(k) = int_{-pi}^{pi} exp(-i k phi) f(phi) dphi,
    f(phi)   = (1 / 2 pi) sum_k Gamma(k) exp(i k phi).

The constant-covariance law (Gamma(k) = rho for every k != 0) has a spectral
atom at 0 instead of a density; it is handled structurally by the sampler.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from .errors import NoDensity, NotPSDWarning
from .quadrature import integrate

KINDS = ("independent", "exponential", "constant", "moving_average", "tabulated", "spectral")

TWO_PI = 2.0 * math.pi
DENSITY_SCAN_POINTS = 4096
TOEPLITZ_ORDER = 32
DEFAULT_TRUNCATION = 200


def _compile_expr(expr: str) -> Callable[[np.ndarray], np.ndarray]:
    # sympy is only needed for user-supplied density expressions.
    import sympy

    phi = sympy.Symbol("phi", real=True)
    parsed = sympy.sympify(expr, locals={"phi": phi})
    extra = parsed.free_symbols - {phi}
    if extra:
        raise ValueError(f"density expression has unknown symbols: {sorted(map(str, extra))}")
    fn = sympy.lambdify(phi, parsed, modules="numpy")

    def evaluate(p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.asarray(fn(p), dtype=float), p.shape).copy()

    return evaluate


@dataclass(frozen=True)
class CovarianceModel:
    """An immutable stationary coefficient law with Gamma(0) = 1.

    Build instances with the classmethod constructors (``independent``,
    ``exponential``, ...); they normalise the user input so that the
    coefficients have unit variance.
    """

    kind: str
    rho: float = 0.0
    weights: tuple[float, ...] = ()
    table: tuple[float, ...] = ()
    expr: str | None = None
    density: Callable[[np.ndarray], np.ndarray] | None = None
    scale: float = 1.0
    name: str | None = field(default=None, compare=False)

    @classmethod
    def independent(cls) -> "CovarianceModel":
        return cls("independent")

    @classmethod
    def exponential(cls, rho: float) -> "CovarianceModel":
        if not -1.0 < rho < 1.0:
            raise ValueError(f"exponential covariance needs rho in (-1, 1), got {rho}")
        return cls("exponential", rho=float(rho))

    @classmethod
    def constant(cls, rho: float) -> "CovarianceModel":
        if not 0.0 <= rho < 1.0:
            raise ValueError(f"constant covariance needs rho in [0, 1), got {rho}")
        return cls("constant", rho=float(rho))

    @classmethod
    def moving_average(cls, weights) -> "CovarianceModel":
        w = tuple(float(v) for v in weights)
        if not w or not any(w):
            raise ValueError("moving average needs at least one non-zero weight")
        return cls("moving_average", weights=w)

    @classmethod
    def tabulated(cls, gamma) -> "CovarianceModel":
        g = [float(v) for v in gamma]
        if not g or g[0] <= 0:
            raise ValueError("tabulated covariance needs gamma[0] > 0")
        g0 = g[0]
        return cls("tabulated", table=tuple(v / g0 for v in g))

    @classmethod
    def spectral(cls, density: Callable | None = None, *, expr: str | None = None) -> "CovarianceModel":
        """Model defined by a spectral density, either a vectorised callable or
        a string in ``phi`` (parsed with sympy), e.g. ``"(1 + cos(phi)) / (2*pi)"``.
        The density is rescaled to integrate to 1."""
        if (density is None) == (expr is None):
            raise ValueError("give exactly one of density or expr")
        fn = density if density is not None else _compile_expr(expr)
        total = integrate(lambda p: np.asarray(fn(p), dtype=float), -math.pi, math.pi,
                          breakpoints=(-math.pi / 2, 0.0, math.pi / 2), epsabs=1e-14, epsrel=1e-13)
        if not total.value > 0:
            raise ValueError("spectral density must have positive total mass")
        return cls("spectral", expr=expr, density=fn, scale=1.0 / float(total.value))

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind in ("exponential", "constant"):
            return f"{self.kind}(rho={self.rho:g})"
        if self.kind == "moving_average":
            return "moving_average(" + ",".join(f"{w:g}" for w in self.weights) + ")"
        if self.kind == "tabulated":
            return "tabulated(" + ",".join(f"{g:g}" for g in self.table) + ")"
        if self.kind == "spectral":
            return f"spectral({self.expr})" if self.expr else "spectral(<callable>)"
        return self.kind

    @property
    def has_density(self) -> bool:
        return not (self.kind == "constant" and self.rho > 0)

    def shifted(self) -> "CovarianceModel":
        """The model whose density is f(phi + pi), i.e. Gamma(k) -> (-1)^k Gamma(k)."""
        if self.kind == "independent":
            return self
        if self.kind == "exponential":
            return CovarianceModel.exponential(-self.rho)
        if self.kind == "moving_average":
            return CovarianceModel.moving_average([w * (-1) ** i for i, w in enumerate(self.weights)])
        if self.kind == "tabulated":
            return CovarianceModel.tabulated([g * (-1) ** i for i, g in enumerate(self.table)])
        if self.kind == "spectral":
            fn = self.density

            def moved(p):
                p = np.asarray(p, dtype=float)
                return fn(np.remainder(p + 2 * math.pi, 2 * math.pi) - math.pi)

            return CovarianceModel.spectral(moved)
        raise NoDensity("constant covariance has no density to shift")

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind in ("exponential", "constant"):
            d["rho"] = self.rho
        elif self.kind == "moving_average":
            d["weights"] = list(self.weights)
        elif self.kind == "tabulated":
            d["gamma"] = list(self.table)
        elif self.kind == "spectral":
            if self.expr is None:
                raise ValueError("callable spectral densities cannot be serialised")
            d["expr"] = self.expr
        if self.name:
            d["id"] = self.name
        return d


def model_from_dict(desc: dict[str, Any]) -> CovarianceModel:
    """Parse a descriptor such as ``{"kind": "exponential", "rho": 0.3}``."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ValueError(f"model descriptor needs a 'kind': {desc!r}")
    kind = desc["kind"]
    if kind == "independent":
        model = CovarianceModel.independent()
    elif kind == "exponential":
        model = CovarianceModel.exponential(desc["rho"])
    elif kind == "constant":
        model = CovarianceModel.constant(desc["rho"])
    elif kind == "moving_average":
        model = CovarianceModel.moving_average(desc["weights"])
    elif kind == "tabulated":
        model = CovarianceModel.tabulated(desc["gamma"])
    elif kind == "spectral":
        model = CovarianceModel.spectral(expr=desc["expr"])
    else:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    if desc.get("id"):
        object.__setattr__(model, "name", str(desc["id"]))
    return model


def _ma_autocovariance(weights: tuple[float, ...]) -> np.ndarray:
    w = np.asarray(weights)
    acov = np.correlate(w, w, mode="full")[len(w) - 1:]
    return acov / acov[0]


def _spectral_gamma(model: CovarianceModel, k: int) -> float:
    fn, s = model.density, model.scale
    pieces = max(8, 4 * k)
    cuts = np.linspace(-math.pi, math.pi, pieces + 1)[1:-1]
    res = integrate(lambda p: np.cos(k * p) * fn(p) * s, -math.pi, math.pi,
                    breakpoints=cuts, epsabs=1e-14, epsrel=1e-12)
    return float(res.value)


def gamma(model: CovarianceModel, k: int) -> float:
    """Lag-``k`` covariance Gamma(|k|)."""
    k = abs(int(k))
    if k == 0:
        return 1.0
    kind = model.kind
    if kind == "independent":
        return 0.0
    if kind == "exponential":
        return model.rho ** k
    if kind == "constant":
        return model.rho
    if kind == "moving_average":
        acov = _ma_autocovariance(model.weights)
        return float(acov[k]) if k < len(acov) else 0.0
    if kind == "tabulated":
        return model.table[k] if k < len(model.table) else 0.0
    return _spectral_gamma(model, k)


@lru_cache(maxsize=64)
def gamma_array(model: CovarianceModel, kmax: int) -> np.ndarray:
    """Gamma(0..kmax) as a read-only array.

    Spectral-kind models use the periodic trapezoid rule (an FFT of the
    density on a fine grid), which is spectrally accurate for smooth f.
    """
    out = np.zeros(kmax + 1)
    kind = model.kind
    if kind == "independent":
        out[0] = 1.0
    elif kind == "exponential":
        out[:] = model.rho ** np.arange(kmax + 1)
    elif kind == "constant":
        out[:] = model.rho
        out[0] = 1.0
    elif kind in ("moving_average", "tabulated"):
        src = _ma_autocovariance(model.weights) if kind == "moving_average" else np.asarray(model.table)
        m = min(len(src), kmax + 1)
        out[:m] = src[:m]
    else:
        grid = max(1 << 16, 1 << int(math.ceil(math.log2(16 * (kmax + 1)))))
        phi = -math.pi + TWO_PI * np.arange(grid) / grid
        fvals = model.density(phi) * model.scale
        # sum_j f(phi_j) exp(-i k phi_j) * (2 pi / grid); phi_j starts at -pi.
        spec = np.fft.fft(fvals) * (TWO_PI / grid) * np.cos(math.pi * np.arange(grid))
        out[:] = spec.real[: kmax + 1]
        out[0] = 1.0
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpectralDensity:
    """A non-negative even density on [-pi, pi], callable on arrays."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    f0: float
    fpi: float
    min_value: float
    smoothness_class: str = "unknown"

    def __call__(self, phi):
        return self.evaluator(phi)


def _cosine_series(gam: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    gam = np.array(gam, dtype=float)
    ks = np.arange(1, len(gam))

    def evaluate(phi):
        phi = np.asarray(phi, dtype=float)
        flat = phi.reshape(-1)
        # cos(k phi) is even in phi, so f(-phi) == f(phi) bit for bit.
        vals = gam[0] + 2.0 * np.cos(np.abs(flat)[:, None] * ks[None, :]) @ gam[1:] if len(ks) else \
            np.full(flat.shape, gam[0])
        return (vals / TWO_PI).reshape(phi.shape)

    return evaluate


def _scan(evaluator) -> float:
    grid = np.linspace(-math.pi, math.pi, DENSITY_SCAN_POINTS + 1)
    return float(np.min(evaluator(grid)))


def _build(evaluator, smoothness: str) -> SpectralDensity:
    f0 = float(evaluator(np.array([0.0]))[0])
    fpi = float(evaluator(np.array([math.pi]))[0])
    return SpectralDensity(evaluator, f0, fpi, _scan(evaluator), smoothness)


def density_from_gamma(gamma_seq, K: int = DEFAULT_TRUNCATION, *, tol: float = 1e-12) -> SpectralDensity:
    """Truncated Fourier series (1/2pi) sum_{|k|<=K} Gamma(k) e^{ik phi}.

    ``gamma_seq`` lists Gamma(0), Gamma(1), ... (one side; evenness is
    assumed). Warns with :class:`NotPSDWarning` when the dense scan finds the
    series below ``-tol``.
    """
    g = np.asarray(gamma_seq, dtype=float)[: K + 1]
    if len(g) == 0:
        raise ValueError("empty covariance sequence")
    sd = _build(_cosine_series(g), "C1")
    if sd.min_value < -tol:
        warnings.warn(
            f"covariance sequence is not positive semi-definite: min density {sd.min_value:.3g}",
            NotPSDWarning,
            stacklevel=2,
        )
    return sd


def spectral_density(model: CovarianceModel) -> SpectralDensity:
    """The spectral density of ``model``; raises :class:`NoDensity` for the
    constant-covariance law with rho > 0."""
    kind = model.kind
    if kind == "constant" and model.rho > 0:
        raise NoDensity(f"{model.label} has a spectral atom at 0 and no density")
    if kind == "independent" or kind == "constant":
        return SpectralDensity(lambda p: np.full(np.shape(p), 1.0 / TWO_PI), 1 / TWO_PI, 1 / TWO_PI,
                               1 / TWO_PI, "C1")
    if kind == "exponential":
        rho = model.rho

        def evaluate(phi):
            phi = np.asarray(phi, dtype=float)
            return (1.0 - rho * rho) / (1.0 - 2.0 * rho * np.cos(phi) + rho * rho) / TWO_PI

        return _build(evaluate, "C1")
    if kind in ("moving_average", "tabulated"):
        g = gamma_array(model, max(len(model.weights), len(model.table)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NotPSDWarning)
            return density_from_gamma(g, K=len(g) - 1)
    fn, s = model.density, model.scale
    return _build(lambda p: np.asarray(fn(p), dtype=float) * s, "unknown")


@dataclass
class ValidationReport:
    model: str
    checks: dict[str, bool]
    min_density: float | None
    within_hypotheses: bool
    notes: list[str]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "ok": self.ok,
            "checks": self.checks,
            "min_density": self.min_density,
            "within_hypotheses": self.within_hypotheses,
            "notes": self.notes,
        }


def toeplitz_matrix(gam: np.ndarray) -> np.ndarray:
    idx = np.arange(len(gam))
    return np.asarray(gam)[np.abs(idx[:, None] - idx[None, :])]


def validate(model: CovarianceModel) -> ValidationReport:
    """Check unit variance, evenness, density positivity and Toeplitz PSD-ness."""
    checks: dict[str, bool] = {}
    notes: list[str] = []
    checks["unit_variance"] = abs(gamma(model, 0) - 1.0) <= 1e-12
    ks = range(1, TOEPLITZ_ORDER)
    checks["even"] = all(gamma(model, k) == gamma(model, -k) for k in ks)

    min_f: float | None = None
    within = True
    if model.has_density:
        sd = spectral_density(model)
        grid = np.linspace(0.0, math.pi, 513)
        checks["density_even"] = bool(np.array_equal(sd(grid), sd(-grid)))
        min_f = sd.min_value
        checks["density_nonnegative"] = min_f >= -1e-12
        if min_f <= 0:
            within = False
            notes.append(f"density touches or crosses zero (min {min_f:.3g}); "
                         "outside the non-vanishing-density hypothesis")
    else:
        within = False
        notes.append("no spectral density (atom at 0); the halved (1/pi) log n law applies instead")

    eig = np.linalg.eigvalsh(toeplitz_matrix(gamma_array(model, TOEPLITZ_ORDER - 1)))
    checks["toeplitz_psd"] = bool(eig.min() >= -1e-9)
    if not checks["toeplitz_psd"]:
        notes.append(f"NotPSD: order-{TOEPLITZ_ORDER} Toeplitz matrix has eigenvalue {eig.min():.3g}")
        within = False
    return ValidationReport(model.label, checks, min_f, within, notes)
