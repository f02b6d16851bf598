"""Direct simulation of the reset walk.

At each step the walker is sent back to the origin with probability ``r``
(a *dot*); otherwise it makes a ``+-1`` step, and landing on the origin is a
*cross*.  Random numbers come from a counter-based SplitMix64 stream: draw
``tau`` of a path with key ``k`` is ``mix(k + (tau+1) * GOLDEN)``, so every
path is a pure function of its key and paths can be simulated in any order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .params import as_params

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
#: Paths per scheduling chunk; chunk boundaries do not affect results.
CHUNK = 4096
STATIONARY_TOLERANCE = 1e-6


@numba.njit(inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


@numba.njit(nogil=True, cache=True)
def _run_paths(keys, t, threshold, cross, dot, pos, age_cross, age_dot):
    one = np.uint64(1)
    shift = np.uint64(11)
    for i in range(keys.shape[0]):
        key = keys[i]
        x = 0
        nc = 0
        nd = 0
        last_c = 0
        last_d = 0
        for tau in range(1, t + 1):
            z = _mix(key + np.uint64(tau) * GOLDEN)
            if (z >> shift) < threshold:
                x = 0
                nd += 1
                last_d = tau
            else:
                x += 1 if (z & one) else -1
                if x == 0:
                    nc += 1
                    last_c = tau
        cross[i] = nc
        dot[i] = nd
        pos[i] = x
        age_cross[i] = t - last_c
        age_dot[i] = t - last_d


@numba.njit(nogil=True, cache=True)
def _run_occupancy(key, t, threshold, visits):
    """Single path recording visit counts; ``visits[t + x]`` counts ``x_tau = x``, ``tau >= 1``."""
    one = np.uint64(1)
    shift = np.uint64(11)
    x = 0
    for tau in range(1, t + 1):
        z = _mix(key + np.uint64(tau) * GOLDEN)
        if (z >> shift) < threshold:
            x = 0
        else:
            x += 1 if (z & one) else -1
        visits[t + x] += 1


@numba.njit(cache=True)
def _path_keys(root, start, count):
    out = np.empty(count, dtype=np.uint64)
    for j in range(count):
        out[j] = _mix(root ^ _mix(np.uint64(start + j) * GOLDEN + GOLDEN))
    return out


def _threshold(r: float) -> np.uint64:
    """Reset iff the top 53 bits of a draw, read as an integer, fall below this value."""
    return np.uint64(min(int(math.ldexp(float(r), 53)), 1 << 53))


def _root_key(seed: int) -> np.uint64:
    return np.random.SeedSequence(int(seed)).generate_state(1, np.uint64)[0]


def path_key(master_seed: int, index: int) -> int:
    """Key of path ``index`` in a batch seeded with ``master_seed``."""
    return int(_path_keys(_root_key(master_seed), index, 1)[0])


@dataclass(frozen=True)
class TrajectorySummary:
    n_cross: int
    n_dot: int
    final_position: int
    backward_ages: tuple | None = None
    occupancy: dict | None = None


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float


@dataclass(frozen=True)
class BatchStats:
    """Per-path counts and their summaries for ``n_paths`` independent walks."""

    n_paths: int
    t: int
    cross: np.ndarray
    dot: np.ndarray
    position: np.ndarray
    age_cross: np.ndarray
    age_dot: np.ndarray

    def estimate(self, which: str) -> Estimate:
        data = {"cross": self.cross, "dot": self.dot, "total": self.cross + self.dot}[which].astype(float)
        sd = data.std(ddof=1) if self.n_paths > 1 else 0.0
        return Estimate(float(data.mean()), float(sd / math.sqrt(self.n_paths)))

    def joint_histogram(self) -> dict:
        """``{(k, m): count}`` for ``k`` crosses and ``m`` dots."""
        keys, counts = np.unique(self.cross.astype(np.int64) * (self.t + 1) + self.dot, return_counts=True)
        return {(int(k // (self.t + 1)), int(k % (self.t + 1))): int(c) for k, c in zip(keys, counts)}

    def position_histogram(self) -> dict:
        keys, counts = np.unique(self.position, return_counts=True)
        return {int(k): int(c) for k, c in zip(keys, counts)}


def simulate_path(params, t: int, seed: int, *, track_occupancy: bool = False) -> TrajectorySummary:
    """One walk of ``t`` steps driven by the 64-bit key ``seed``."""
    params = as_params(params)
    if t < 0:
        raise ValueError("t must be nonnegative")
    keys = np.array([int(seed) & (2**64 - 1)], dtype=np.uint64)
    thr = _threshold(params.r)
    out = [np.zeros(1, dtype=np.int64) for _ in range(5)]
    _run_paths(keys, t, thr, *out)
    occupancy = None
    if track_occupancy:
        visits = np.zeros(2 * t + 1, dtype=np.int64)
        _run_occupancy(keys[0], t, thr, visits)
        occupancy = {int(x) - t: int(visits[x]) for x in np.flatnonzero(visits)}
    return TrajectorySummary(
        n_cross=int(out[0][0]),
        n_dot=int(out[1][0]),
        final_position=int(out[2][0]),
        backward_ages=(int(out[3][0]), int(out[4][0])),
        occupancy=occupancy,
    )


def batch_stats(params, t: int, n_paths: int, master_seed: int, *, workers: int = 1) -> BatchStats:
    """Simulate ``n_paths`` walks; path ``i`` uses the key derived from ``(master_seed, i)``.

    Work is split into fixed chunks of path indices and each chunk writes its own
    slice, so the result is identical for any number of ``workers``.
    """
    params = as_params(params)
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if workers < 1:
        raise ValueError("workers must be positive")
    root = _root_key(master_seed)
    thr = _threshold(params.r)
    arrays = [np.zeros(n_paths, dtype=np.int64) for _ in range(5)]

    def run(start):
        stop = min(start + CHUNK, n_paths)
        keys = _path_keys(root, start, stop - start)
        _run_paths(keys, t, thr, *(a[start:stop] for a in arrays))

    starts = range(0, n_paths, CHUNK)
    if workers == 1:
        for s in starts:
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    return BatchStats(n_paths, t, *arrays)


def burn_in(params) -> int:
    """Smallest ``t`` with ``(1-r)^t < 1e-6``."""
    r = float(as_params(params).r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"requires 0 < r < 1, got r = {r}")
    return math.floor(math.log(STATIONARY_TOLERANCE) / math.log1p(-r)) + 1


def stationary_histogram(params, t_burn: int | None, n_samples: int, master_seed: int, *, workers: int = 1) -> dict:
    """Empirical frequencies of the position after ``t_burn`` steps, ``{x: frequency}``."""
    params = as_params(params)
    r = float(params.r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"requires 0 < r < 1, got r = {r}")
    if t_burn is None:
        t_burn = burn_in(params)
    if (1.0 - r) ** t_burn >= STATIONARY_TOLERANCE:
        raise ValueError(f"t_burn={t_burn} too short: (1-r)^t_burn must be below {STATIONARY_TOLERANCE}")
    counts = batch_stats(params, t_burn, n_samples, master_seed, workers=workers).position_histogram()
    return {x: c / n_samples for x, c in sorted(counts.items())}
