"""Monte Carlo verification: sample stationary coefficients, count real zeros.

Trial t gets the 64-bit seed ``trial_seeds(master_seed, ...)[t]`` and draws
from a Philox generator keyed by that seed, so the per-trial counts depend
on ``(master_seed, t)`` alone and not on how trials are spread over workers.
"""
from __future__ import annotations

import math
import os
import pickle
import warnings
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .asymptotics import MIN_WINDOW_DEGREE, window
from .covariance import CovarianceModel, gamma_array, model_from_dict, toeplitz_matrix
from .errors import BudgetExceeded, SamplingFailure

WORKERS_ENV = "REALZEROS_WORKERS"
CHOLESKY_JITTER = 1e-12
MAX_EMBEDDING_GROWTH = 16


@dataclass(frozen=True)
class CoefficientSample:
    values: np.ndarray
    seed: int
    model_id: str


@dataclass
class SimulationSummary:
    n: int
    trials: int
    mean_zeros: float
    std_error: float
    per_trial_counts: list[int]
    master_seed: int
    seeds: list[int] = field(default_factory=list)
    flagged: list[int] = field(default_factory=list)
    failures: dict[int, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "mean": self.mean_zeros,
            "std_error": self.std_error,
            "master_seed": self.master_seed,
            "flagged": self.flagged,
            "failures": {str(k): v for k, v in self.failures.items()},
        }


def trial_seeds(master_seed: int, trials: int) -> np.ndarray:
    """64-bit seeds for trials 0..trials-1.

    Word t of the master SeedSequence state; the state stream has the prefix
    property, so seed t is a pure function of (master_seed, t).
    """
    return np.random.SeedSequence(int(master_seed)).generate_state(int(trials), dtype=np.uint64)


def trial_seed(master_seed: int, trial: int) -> int:
    return int(trial_seeds(master_seed, trial + 1)[trial])


# ---------------------------------------------------------------- sampling


def _circulant_eigenvalues(model: CovarianceModel, n: int) -> tuple[np.ndarray, int]:
    size = 1 << int(math.ceil(math.log2(2 * n + 2)))
    for _ in range(int(math.log2(MAX_EMBEDDING_GROWTH)) + 1):
        half = size // 2
        gam = gamma_array(model, half)
        row = np.concatenate([gam, gam[half - 1:0:-1]])
        lam = np.fft.fft(row).real
        if lam.min() >= -1e-10 * max(lam.max(), 1.0):
            return np.clip(lam, 0.0, None), size
        size *= 2
    raise SamplingFailure("circulant embedding has negative eigenvalues")


def sample_matrix(model: CovarianceModel, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent coefficient vectors X_0..X_n, shape (size, n + 1)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    kind = model.kind
    if kind == "independent":
        return rng.standard_normal((size, n + 1))
    if kind == "exponential":
        rho = model.rho
        w = rng.standard_normal((size, n + 1))
        out = np.empty_like(w)
        out[:, 0] = w[:, 0]
        innov = math.sqrt(1.0 - rho * rho)
        for k in range(1, n + 1):
            out[:, k] = rho * out[:, k - 1] + innov * w[:, k]
        return out
    if kind == "constant":
        z = rng.standard_normal((size, 1))
        w = rng.standard_normal((size, n + 1))
        return math.sqrt(model.rho) * z + math.sqrt(1.0 - model.rho) * w
    try:
        lam, m = _circulant_eigenvalues(model, n)
    except SamplingFailure:
        cov = toeplitz_matrix(gamma_array(model, n)) + CHOLESKY_JITTER * np.eye(n + 1)
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise SamplingFailure(f"{model.label}: embedding and jittered Cholesky both failed") from exc
        return rng.standard_normal((size, n + 1)) @ chol.T
    z = rng.standard_normal((size, m)) + 1j * rng.standard_normal((size, m))
    y = np.fft.fft(np.sqrt(lam / m) * z, axis=1)
    return y.real[:, : n + 1].copy()


def trial_rng(seed: int) -> np.random.Generator:
    """The generator for one trial: counter-based Philox keyed by the 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


class _RekeyedPhilox:
    """One Philox generator re-keyed per trial; same streams as :func:`trial_rng`
    without paying for a fresh bit generator each time."""

    def __init__(self):
        self._bg = np.random.Philox(key=0)
        self.generator = np.random.Generator(self._bg)
        self._state = self._bg.state

    def reset(self, seed: int) -> np.random.Generator:
        st = self._state
        st["state"]["key"][:] = (int(seed), 0)
        st["state"]["counter"][:] = 0
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        return self.generator


def sample_coefficients(model: CovarianceModel, n: int, seed: int) -> CoefficientSample:
    rng = trial_rng(seed)
    return CoefficientSample(sample_matrix(model, n, 1, rng)[0], int(seed), model.label)


# ---------------------------------------------------------------- counting


@dataclass(frozen=True)
class CounterOptions:
    """Grid sizes for :func:`count_real_zeros`.

    ``edge_factor * n`` points go into each endpoint band (uniform in u with
    |x| = 1 - exp(-u)) and ``bulk_points`` into |x| <= 1 - eps(n). Grids are
    doubled until ``agreements`` successive doublings give the same count.
    """

    edge_factor: int = 8
    bulk_points: int = 1024
    max_doublings: int = 8
    agreements: int = 2
    bisection_steps: int = 12


@lru_cache(maxsize=128)
def _grid(n: int, scale: int, opts: CounterOptions) -> np.ndarray:
    eps = window(n)[1] if n >= MIN_WINDOW_DEGREE else 0.5
    u0 = -math.log(eps)
    u1 = math.log(max(n, 2)) + 12.0
    u = np.linspace(u0, u1, opts.edge_factor * max(n, 8) * scale + 1)
    edge = 1.0 - np.exp(-u)
    bulk = np.linspace(0.0, 1.0 - eps, opts.bulk_points * scale + 1)
    half = np.concatenate([bulk, edge[1:], [1.0]])
    grid = np.concatenate([-half[:0:-1], half])
    grid.setflags(write=False)
    return grid


def _signs(v: np.ndarray) -> np.ndarray:
    s = np.sign(v)
    s[s == 0] = 1.0
    return s


def _confirm(desc: np.ndarray, lo: np.ndarray, hi: np.ndarray, steps: int) -> int:
    """Bisect every sign-change bracket; count those that still bracket a root."""
    if lo.size == 0:
        return 0
    slo = _signs(np.polyval(desc, lo))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        smid = _signs(np.polyval(desc, mid))
        left = smid != slo
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        slo = np.where(left, slo, smid)
    return int(np.count_nonzero(_signs(np.polyval(desc, hi)) != slo))


def _brackets(coeffs: np.ndarray, grid: np.ndarray):
    """Sign-change brackets of P and of x^n P(1/x) on ``grid``."""
    desc = coeffs[::-1]  # P, highest power first
    rev = coeffs  # x^n P(1/x), highest power first
    n = len(coeffs) - 1
    pv = np.polyval(desc, grid)
    qv = np.polyval(rev, grid)
    # Share the endpoint values so a root near +-1 is never seen twice.
    qv[-1] = pv[-1]
    qv[0] = pv[0] * (-1.0) ** n
    out = []
    for poly, vals in ((desc, pv), (rev, qv)):
        s = _signs(vals)
        out.append((poly, np.flatnonzero(s[1:] != s[:-1])))
    return out


def count_real_zeros_status(coeffs, opts: CounterOptions | None = None) -> tuple[int, bool]:
    """(count, stable) where ``stable`` is False if the doubling budget ran out."""
    opts = opts or CounterOptions()
    c = np.asarray(coeffs, dtype=float)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("zero polynomial")
    c = c[: nz[-1] + 1]
    n = len(c) - 1
    if n < 1:
        raise ValueError("count_real_zeros needs degree >= 1")
    # Zero low-order coefficients are a root at 0 of that multiplicity.
    low = int(nz[0])
    roots_at_zero = 1 if low > 0 else 0
    c = c[low:]
    n = len(c) - 1
    if n == 0:
        return roots_at_zero, True
    if n == 1:
        return roots_at_zero + 1, True
    if n == 2:
        disc = c[1] * c[1] - 4.0 * c[0] * c[2]
        return roots_at_zero + (2 if disc > 0 else 1 if disc == 0 else 0), True
    history: list[int] = []
    stable = False
    for k in range(opts.max_doublings + 1):
        grid = _grid(n, 1 << k, opts)
        found = _brackets(c, grid)
        history.append(sum(len(idx) for _, idx in found))
        tail = history[-(opts.agreements + 1):]
        if len(tail) == opts.agreements + 1 and len(set(tail)) == 1:
            stable = True
            break
    count = sum(_confirm(poly, grid[idx], grid[idx + 1], opts.bisection_steps) for poly, idx in found)
    return count + roots_at_zero, stable


def count_real_zeros(coeffs, opts: CounterOptions | None = None) -> int:
    """Number of distinct real zeros of sum_k coeffs[k] x^k (ascending order).

    Sign changes are counted on graded grids in (-1, 1) for P and for the
    reversed polynomial x^n P(1/x), which carries the zeros with |x| > 1.
    Emits :class:`BudgetExceeded` and returns the last count if the grid
    never stabilises.
    """
    count, stable = count_real_zeros_status(coeffs, opts)
    if not stable:
        warnings.warn("grid doubling budget exhausted; count may miss close pairs",
                      BudgetExceeded, stacklevel=2)
    return count


# ---------------------------------------------------------------- driver


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _run_trials(payload, trials: list[tuple[int, int]], n: int, opts: CounterOptions):
    model = model_from_dict(payload) if isinstance(payload, dict) else payload
    out = []
    stream = _RekeyedPhilox()
    for t, seed in trials:
        try:
            coeffs = sample_matrix(model, n, 1, stream.reset(seed))[0]
            count, stable = count_real_zeros_status(coeffs, opts)
            out.append((t, seed, count, stable, None))
        except Exception as exc:  # recorded per trial, the sweep goes on
            out.append((t, seed, -1, False, f"{type(exc).__name__}: {exc}"))
    return out


def simulate(
    model: CovarianceModel,
    n: int,
    trials: int,
    master_seed: int = 0,
    workers: int | None = None,
    opts: CounterOptions | None = None,
) -> SimulationSummary:
    """Monte Carlo estimate of the expected number of real zeros of P_n."""
    if trials < 1:
        raise ValueError("need at least one trial")
    opts = opts or CounterOptions()
    workers = default_workers() if workers is None else max(1, int(workers))
    jobs = list(enumerate(trial_seeds(master_seed, trials).tolist()))
    if workers == 1:
        rows = _run_trials(model, jobs, n, opts)
    else:
        chunks = [jobs[i::workers] for i in range(workers)]
        try:
            payload = model.to_dict() if model.kind == "spectral" else model
            pickle.dumps(payload)
            pool = ProcessPoolExecutor(max_workers=workers)
        except (ValueError, pickle.PicklingError, AttributeError, TypeError):
            payload = model
            pool = ThreadPoolExecutor(max_workers=workers)
        with pool:
            futures = [pool.submit(_run_trials, payload, ch, n, opts) for ch in chunks if ch]
            rows = [r for f in futures for r in f.result()]
    rows.sort(key=lambda r: r[0])

    counts = [r[2] for r in rows if r[4] is None]
    failures = {r[0]: r[4] for r in rows if r[4] is not None}
    flagged = [r[0] for r in rows if not r[3]]
    arr = np.asarray(counts, dtype=float)
    mean = float(arr.mean()) if arr.size else math.nan
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return SimulationSummary(
        n=n,
        trials=trials,
        mean_zeros=mean,
        std_error=se,
        per_trial_counts=[r[2] for r in rows],
        master_seed=int(master_seed),
        seeds=[r[1] for r in rows],
        flagged=flagged,
        failures=failures,
    )
