"""Monte Carlo for the Slepian process and three comparison processes.

All processes are stationary, centred, with unit variance and
``rho'(0+) = -1``:

* ``slepian``:   ``S(t) = W(t) - W(t+1)``, ``rho(t) = max(0, 1 - |t|)``;
* ``ou``:        Ornstein-Uhlenbeck, ``rho(t) = exp(-|t|)``, simulated by its
  exact AR(1) transition;
* ``broken_a``:  ``((1+a) W(t+2 alpha) - a W(t+alpha) - W(t)) / sqrt(1+a+a^2)``
  with ``alpha = (1+a+a^2)/(2+2a+a^2)``;
* ``broken_c``:  ``(W(t+1) + c W(t+(c+1) beta) - c W(t+beta) - W(t)) / sqrt(1+c^2)``
  with ``beta = 1/(c+2)``.

Paths are sampled on a grid of spacing ``step``. With ``bridge=True`` the
chance of crossing between two grid points below ``h`` is accounted for by
the Brownian-bridge formula ``exp(-(h-a)(h-b)/step)`` (local variance rate 2)
instead of being ignored; without it, grid-maximum monitoring misses
crossings and over-estimates ``F_T(h)`` by O(sqrt(step)).

Replications are grouped in fixed blocks of :data:`BLOCK` paths and block
``b`` draws from a Philox stream keyed by ``(seed, b)``. Success counts are
integers, so results are identical for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "ProcessSpec",
    "McConfig",
    "McEstimate",
    "LambdaEstimate",
    "McDegenerateError",
    "rho",
    "simulate_paths",
    "simulate_max_indicator",
    "estimate_F",
    "estimate_Lambda",
    "empirical_correlation",
    "BLOCK",
]

BLOCK = 2048
KINDS = ("slepian", "ou", "broken_a", "broken_c")


@dataclass(frozen=True)
class ProcessSpec:
    kind: str
    a: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "broken_a" and not self.a > 0:
            raise ValueError("broken_a needs a > 0")
        if self.kind == "broken_c" and not self.c >= 1:
            raise ValueError("broken_c needs c >= 1")

    @classmethod
    def slepian(cls) -> "ProcessSpec":
        return cls("slepian")

    @classmethod
    def ornstein_uhlenbeck(cls) -> "ProcessSpec":
        return cls("ou")

    @classmethod
    def broken_a(cls, a: float = 1.0) -> "ProcessSpec":
        return cls("broken_a", a=a)

    @classmethod
    def broken_c(cls, c: float = 1.0) -> "ProcessSpec":
        return cls("broken_c", c=c)

    @property
    def alpha(self) -> float:
        a = self.a
        return (1 + a + a * a) / (2 + 2 * a + a * a)

    @property
    def beta(self) -> float:
        return 1.0 / (self.c + 2.0)

    @property
    def span(self) -> float:
        """Look-ahead of the Wiener representation beyond ``t``."""
        return {"slepian": 1.0, "ou": 0.0, "broken_a": 2 * self.alpha, "broken_c": 1.0}[
            self.kind
        ]

    @property
    def label(self) -> str:
        if self.kind == "broken_a":
            return f"broken_a(a={self.a:g})"
        if self.kind == "broken_c":
            return f"broken_c(c={self.c:g})"
        return self.kind

    def terms(self) -> list[tuple[float, float]]:
        """``(offset, coefficient)`` pairs with ``X(t) = sum coef * W(t + offset)``."""
        if self.kind == "slepian":
            return [(0.0, 1.0), (1.0, -1.0)]
        if self.kind == "broken_a":
            a, al = self.a, self.alpha
            s = math.sqrt(1 + a + a * a)
            return [(0.0, -1.0 / s), (al, -a / s), (2 * al, (1 + a) / s)]
        if self.kind == "broken_c":
            c, b = self.c, self.beta
            s = math.sqrt(1 + c * c)
            return [(0.0, -1.0 / s), (b, -c / s), ((c + 1) * b, c / s), (1.0, 1.0 / s)]
        return []


def rho(spec: ProcessSpec, t):
    """Correlation function of ``spec`` at lag ``t``."""
    t = np.abs(np.asarray(t, dtype=float))
    if spec.kind == "slepian":
        out = np.maximum(0.0, 1.0 - t)
    elif spec.kind == "ou":
        out = np.exp(-t)
    elif spec.kind == "broken_a":
        a, al = spec.a, spec.alpha
        out = np.select(
            [t <= al, t <= 2 * al],
            [1.0 - t, (1 + a) * (2 * al - t) / (1 + a + a * a)],
            0.0,
        )
    else:
        c, b = spec.c, spec.beta
        d = 1 + c * c
        out = np.select(
            [t <= b, t <= c * b, t <= (c + 1) * b, t <= 1.0],
            [
                1.0 - t,
                (1 + c) * (1 + c * c * b - t * (1 + c)) / d,
                (1 + c + c * c * b - t * (1 + 2 * c)) / d,
                (1.0 - t) / d,
            ],
            0.0,
        )
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class McConfig:
    T: float
    h: float
    step: float = 0.01
    reps: int = 100_000
    seed: int = 0
    bridge: bool = True
    workers: int = 1

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.T < self.step:
            raise ValueError("T must be >= step")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        _n_steps(self.T, self.step)


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    stderr: float
    reps: int

    @classmethod
    def from_count(cls, successes: int, reps: int) -> "McEstimate":
        p = successes / reps
        return cls(p, math.sqrt(p * (1 - p) / reps), reps)


@dataclass(frozen=True)
class LambdaEstimate:
    Lambda: float
    stderr: float
    survivors_prev: int
    survivors: int
    reps: int

    @property
    def lam(self) -> float:
        return math.exp(-self.Lambda)


class McDegenerateError(RuntimeError):
    pass


def _n_steps(T: float, step: float) -> int:
    n = round(T / step)
    if abs(n * step - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"horizon {T} is not a multiple of step {step}")
    return int(n)


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def simulate_paths(
    spec: ProcessSpec, horizon: float, step: float, m: int, rng: np.random.Generator
) -> np.ndarray:
    """``m`` paths on the grid ``0, step, ..., horizon``; shape ``(m, n+1)``."""
    n = _n_steps(horizon, step)
    if spec.kind == "ou":
        r = math.exp(-step)
        e = rng.standard_normal((m, n + 1))
        e[:, 1:] *= math.sqrt(-math.expm1(-2 * step))
        return lfilter([1.0], [1.0, -r], e, axis=1)
    terms = spec.terms()
    grid = np.arange(n + 1) * step
    pts = np.concatenate([grid + off for off, _ in terms])
    times, inv = np.unique(np.round(pts, 12), return_inverse=True)
    dt = np.diff(times)
    W = np.zeros((m, len(times)))
    np.cumsum(rng.standard_normal((m, len(dt))) * np.sqrt(dt), axis=1, out=W[:, 1:])
    X = np.zeros((m, n + 1))
    for k, (_, coef) in enumerate(terms):
        X += coef * W[:, inv[k * (n + 1) : (k + 1) * (n + 1)]]
    return X


def _log_survival(X: np.ndarray, h: float, step: float, bridge: bool) -> np.ndarray:
    """Cumulative log no-crossing probability over cells, shape ``(m, n)``.

    Entry ``k`` covers ``[0, (k+1) step]`` given the grid values; ``-inf``
    when a grid value reaches ``h``.
    """
    gap = h - X
    below = gap > 0
    ok = np.logical_and.accumulate(below, axis=1)
    cell = np.where(ok[:, 1:], 0.0, -np.inf)
    if bridge:
        g = np.where(below, gap, 1.0)
        prod = g[:, :-1] * g[:, 1:] / step
        with np.errstate(divide="ignore"):
            cell = cell + np.log(-np.expm1(-prod))
    out = np.cumsum(cell, axis=1)
    out[~below[:, 0]] = -np.inf
    return out


def _survivors(
    spec: ProcessSpec, h: float, step: float, horizons: list[int], bridge: bool,
    m: int, rng: np.random.Generator,
) -> list[int]:
    n = max(horizons)
    X = simulate_paths(spec, n * step, step, m, rng)
    logp = _log_survival(X, h, step, bridge)
    u = rng.random(m) if bridge else None
    out = []
    for k in horizons:
        lp = logp[:, k - 1]
        alive = np.exp(lp) > u if bridge else np.isfinite(lp)
        out.append(int(np.count_nonzero(alive)))
    return out


def _run_blocks(fn, reps: int, seed: int, workers: int) -> np.ndarray:
    sizes = [min(BLOCK, reps - b * BLOCK) for b in range(-(-reps // BLOCK))]
    jobs = [(b, size, _rng(seed, b)) for b, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda job: fn(job[1], job[2]), jobs))
    else:
        counts = [fn(size, rng) for _, size, rng in jobs]
    return np.sum(np.array(counts, dtype=np.int64), axis=0)


def simulate_max_indicator(spec: ProcessSpec, cfg: McConfig, rng: np.random.Generator) -> bool:
    """One replication: ``True`` if the path stays below ``cfg.h`` on ``[0, T]``."""
    n = _n_steps(cfg.T, cfg.step)
    return bool(_survivors(spec, cfg.h, cfg.step, [n], cfg.bridge, 1, rng)[0])


def estimate_F(spec: ProcessSpec, cfg: McConfig) -> McEstimate:
    """Fraction of ``cfg.reps`` independent paths staying below ``cfg.h``."""
    n = _n_steps(cfg.T, cfg.step)
    counts = _run_blocks(
        lambda m, rng: _survivors(spec, cfg.h, cfg.step, [n], cfg.bridge, m, rng),
        cfg.reps, cfg.seed, cfg.workers,
    )
    return McEstimate.from_count(int(counts[0]), cfg.reps)


def estimate_Lambda(spec: ProcessSpec, h: float, j: int, cfg: McConfig) -> LambdaEstimate:
    """``-log(F_j / F_{j-1})`` from paired paths of length ``j``.

    Step, replications, seed and the bridge flag come from ``cfg``; its
    ``T`` and ``h`` are ignored. The shorter horizon is the prefix of each
    path, so the ratio is a conditional survival fraction with standard
    error ``sqrt((1 - p) / survivors)`` on the log scale.
    """
    if int(j) != j or j < 2:
        raise ValueError(f"j must be an integer >= 2, got {j!r}")
    n = _n_steps(j, cfg.step)
    n_prev = _n_steps(j - 1, cfg.step)
    prev, cur = _run_blocks(
        lambda m, rng: _survivors(spec, h, cfg.step, [n_prev, n], cfg.bridge, m, rng),
        cfg.reps, cfg.seed, cfg.workers,
    )
    if prev == 0 or cur == 0:
        raise McDegenerateError(
            f"no surviving paths at h={h} (F_{j - 1}: {prev}, F_{j}: {cur}); increase reps"
        )
    p = cur / prev
    return LambdaEstimate(-math.log(p), math.sqrt((1 - p) / cur), int(prev), int(cur), cfg.reps)


def empirical_correlation(
    spec: ProcessSpec, lags, n_paths: int = 100_000, step: float = 0.01, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Sample correlation of ``(X(0), X(lag))`` over independent paths.

    Returns the estimates and their approximate standard errors
    ``(1 - rho^2) / sqrt(n)``, evaluated at the estimate.
    """
    lags = np.atleast_1d(np.asarray(lags, dtype=float))
    idx = np.array([_n_steps(l, step) if l > 0 else 0 for l in lags])
    horizon = max(int(idx.max()), 1) * step

    def block(m, rng):
        X = simulate_paths(spec, horizon, step, m, rng)
        x0 = X[:, :1]
        Y = X[:, idx]
        return np.concatenate(
            [[x0.sum(), (x0 * x0).sum()], Y.sum(0), (Y * Y).sum(0), (x0 * Y).sum(0)]
        )

    sizes = [min(BLOCK, n_paths - b * BLOCK) for b in range(-(-n_paths // BLOCK))]
    tot = np.zeros(2 + 3 * len(idx))
    for b, size in enumerate(sizes):
        tot += block(size, _rng(seed, b))
    k = len(idx)
    n = n_paths
    mx, sxx = tot[0] / n, tot[1] / n
    my, syy, sxy = tot[2 : 2 + k] / n, tot[2 + k : 2 + 2 * k] / n, tot[2 + 2 * k :] / n
    r = (sxy - mx * my) / np.sqrt((sxx - mx * mx) * (syy - my * my))
    return r, (1 - r * r) / math.sqrt(n)
