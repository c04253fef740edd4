"""Monte Carlo estimation over random games, class discovery, extremum
counting, and spline fits of quota curves.

Estimators are deterministic by construction: samples are processed in
fixed-size chunks, chunk c draws from the substream (seed, chunk c), and
partial results are reduced in chunk order.  The worker count changes
only wall-clock time, never a single bit of output, and sample i depends
only on (seed, stream, i), so shorter runs are prefixes of longer ones.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .errors import BudgetExceededError, InvalidArgumentsError
from .simplex import as_seed, sample_uniform_simplex_batch

MC_CHUNK = 4096
MC_KERNEL_BUDGET = 18          # vectorized per-sample enumeration cap
DISCOVERY_CHUNK = 1 << 17
_SUM_CELL_BUDGET = 1 << 22     # cap on 2^n * block_columns cells in memory


def default_quota_grid() -> np.ndarray:
    """99 equispaced quotas from 0.505 to 0.995, plus the unanimity point."""
    return np.append(np.linspace(0.505, 0.995, 99), 1.0)


@dataclass(frozen=True, eq=False)
class QuotaCurve:
    """Per-quota statistics of one scalar series."""

    quotas: np.ndarray
    name: str
    mean: np.ndarray
    stderr: np.ndarray
    samples: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        q = np.asarray(self.quotas, dtype=np.float64)
        if q.size == 0 or np.any(np.diff(q) <= 0):
            raise InvalidArgumentsError("quota grid must be strictly increasing")
        if q[0] <= 0.5 or q[-1] > 1.0:
            raise InvalidArgumentsError("quota grid must lie in (1/2, 1]")
        if np.any(np.asarray(self.stderr) < 0) or np.any(np.asarray(self.samples) <= 0):
            raise InvalidArgumentsError("standard errors must be >= 0, samples > 0")

    def to_rows(self):
        return [
            (float(q), self.name, float(m), float(s), int(c))
            for q, m, s, c in zip(self.quotas, self.mean, self.stderr, self.samples)
        ]


def _validate_grid(quotas) -> np.ndarray:
    grid = np.asarray(
        default_quota_grid() if quotas is None else quotas, dtype=np.float64
    ).reshape(-1)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise InvalidArgumentsError("quota grid must be strictly increasing")
    if grid[0] <= 0.5 or grid[-1] > 1.0:
        raise InvalidArgumentsError("quota grid must lie in (1/2, 1]")
    return grid


def _sorted_weight_chunk(n: int, seed, chunk_index: int, count: int) -> np.ndarray:
    """Rows [0, count) of chunk ``chunk_index``, each sorted descending."""
    draws = sample_uniform_simplex_batch(
        n, MC_CHUNK, as_seed(seed).substream(chunk_index)
    )[:count]
    draws.sort(axis=1)
    return draws[:, ::-1]


def _coalition_sum_table(weights_block: np.ndarray) -> np.ndarray:
    """(2^n, block) coalition weights; grand coalition pinned to 1.0.

    Mask bit i marks player i (column i of the block), matching the
    conventions of the exact kernels in the games module.
    """
    block, n = weights_block.shape
    table = np.zeros((1 << n, block))
    filled = 1
    for i in range(n):
        table[filled:2 * filled] = table[:filled] + weights_block[:, i]
        filled *= 2
    table[-1] = 1.0
    return table


class _Accumulator:
    """Sum, sum of squares, and range per series; the range lets constant
    series (for example every statistic at q = 1) finalize exactly."""

    def __init__(self, shape):
        self.total = np.zeros(shape)
        self.total_sq = np.zeros(shape)
        self.low = np.full(shape, np.inf)
        self.high = np.full(shape, -np.inf)

    def add(self, values, axis):
        self.total += values.sum(axis=axis)
        self.total_sq += (values * values).sum(axis=axis)
        self.low = np.minimum(self.low, values.min(axis=axis))
        self.high = np.maximum(self.high, values.max(axis=axis))

    def merge(self, other):
        self.total += other.total
        self.total_sq += other.total_sq
        self.low = np.minimum(self.low, other.low)
        self.high = np.maximum(self.high, other.high)

    def finalize(self, samples):
        mean = self.total / samples
        if samples > 1:
            variance = np.maximum(self.total_sq / samples - mean * mean, 0.0)
            stderr = np.sqrt(variance * (samples / (samples - 1.0)) / samples)
        else:
            stderr = np.zeros_like(mean)
        constant = self.low == self.high
        mean[constant] = self.low[constant]
        stderr[constant] = 0.0
        return mean, stderr


def _mc_chunk_stats(n, grid, seed, chunk_index, count, statistic):
    """Per-chunk accumulators over (grid, ranks)."""
    weights = _sorted_weight_chunk(n, seed, chunk_index, count)
    acc = _Accumulator((grid.size, n))
    member_rows = [
        (np.arange(1 << n, dtype=np.uint32) >> np.uint32(i) & np.uint32(1)).astype(bool)
        for i in range(n)
    ]
    block_cols = max(1, _SUM_CELL_BUDGET // (1 << n))
    for start in range(0, count, block_cols):
        chunk = weights[start:start + block_cols]
        table = _coalition_sum_table(chunk)
        member = np.empty((n, chunk.shape[0]), dtype=np.int64)
        block = np.empty((grid.size, n, chunk.shape[0]))
        for g, quota in enumerate(grid):
            win = table >= quota
            omega = win.sum(axis=0)
            for i in range(n):
                member[i] = win[member_rows[i]].sum(axis=0)
            swing = 2 * member - omega
            if statistic == "psi":
                values = swing / float(2 ** (n - 1))
            else:
                values = swing / swing.sum(axis=0)
            block[g] = np.sort(values, axis=0)[::-1]
        acc.add(block, axis=2)
    return acc


def _mc_chunk_coleman(n, grid, seed, chunk_index, count):
    weights = _sorted_weight_chunk(n, seed, chunk_index, count)
    acc = _Accumulator(grid.size)
    scale = 2.0 ** (-n)
    block_cols = max(1, _SUM_CELL_BUDGET // (1 << n))
    for start in range(0, count, block_cols):
        table = _coalition_sum_table(weights[start:start + block_cols])
        block = np.empty((grid.size, table.shape[1]))
        for g, quota in enumerate(grid):
            block[g] = (table >= quota).sum(axis=0) * scale
        acc.add(block, axis=1)
    return acc


def _mc_chunk_hoeffding(n, grid, seed, chunk_index, count):
    weights = _sorted_weight_chunk(n, seed, chunk_index, count)
    ssq = (weights * weights).sum(axis=1)
    acc = _Accumulator(grid.size)
    block = np.exp(
        -2.0 * (grid[:, None] - 0.5) ** 2 / ssq[None, :]
    )
    acc.add(block, axis=1)
    return acc


def _run_chunks(worker, samples: int, workers: int) -> _Accumulator:
    """Evaluate per-chunk accumulators and reduce them in chunk order."""
    plan = []
    start = 0
    index = 0
    while start < samples:
        count = min(MC_CHUNK, samples - start)
        plan.append((index, count))
        start += count
        index += 1
    if workers <= 1:
        partials = [worker(i, c) for i, c in plan]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(worker, i, c) for i, c in plan]
            partials = [f.result() for f in futures]
    combined = partials[0]
    for part in partials[1:]:
        combined.merge(part)
    return combined


def _check_mc_args(n, samples):
    if samples < 1:
        raise InvalidArgumentsError("sample count must be at least 1")
    if n < 1:
        raise InvalidArgumentsError("player count must be at least 1")
    if n > MC_KERNEL_BUDGET:
        raise BudgetExceededError(
            f"vectorized Monte Carlo supports n <= {MC_KERNEL_BUDGET}"
        )


def mc_power_curve(
    n: int,
    quotas=None,
    samples: int = 65536,
    seed=0,
    statistic: str = "beta",
    workers: int = 1,
) -> list[QuotaCurve]:
    """Monte Carlo estimate of the expected ordered index per rank.

    For each sampled weight vector the exact index profile is computed at
    every grid quota (common random numbers across the grid), sorted in
    descending order, and accumulated per rank.  Returns one curve per
    rank, largest player first.
    """
    _check_mc_args(n, samples)
    if statistic not in ("beta", "psi"):
        raise InvalidArgumentsError(f"unknown statistic {statistic!r}")
    grid = _validate_grid(quotas)
    base = as_seed(seed)

    def worker(index, count):
        return _mc_chunk_stats(n, grid, base, index, count, statistic)

    mean, stderr = _run_chunks(worker, samples, workers).finalize(samples)
    meta = {"n": n, "seed": base.seed, "stream": base.stream, "method": "mc"}
    counts = np.full(grid.size, samples, dtype=np.int64)
    return [
        QuotaCurve(
            grid,
            f"{statistic}_rank_{k + 1}",
            mean[:, k].copy(),
            stderr[:, k].copy(),
            counts,
            dict(meta),
        )
        for k in range(n)
    ]


def mc_coleman_curve(
    n: int, quotas=None, samples: int = 65536, seed=0, workers: int = 1
) -> QuotaCurve:
    """Monte Carlo mean of the exact per-game Coleman index per quota."""
    _check_mc_args(n, samples)
    grid = _validate_grid(quotas)
    base = as_seed(seed)

    def worker(index, count):
        return _mc_chunk_coleman(n, grid, base, index, count)

    mean, stderr = _run_chunks(worker, samples, workers).finalize(samples)
    return QuotaCurve(
        grid,
        "coleman",
        mean,
        stderr,
        np.full(grid.size, samples, dtype=np.int64),
        {"n": n, "seed": base.seed, "stream": base.stream, "method": "mc"},
    )


def mc_hoeffding_curve(
    n: int, quotas=None, samples: int = 65536, seed=0, workers: int = 1
) -> QuotaCurve:
    """Monte Carlo mean of the per-game Hoeffding bound on the Coleman index."""
    _check_mc_args(n, samples)
    grid = _validate_grid(quotas)
    base = as_seed(seed)

    def worker(index, count):
        return _mc_chunk_hoeffding(n, grid, base, index, count)

    mean, stderr = _run_chunks(worker, samples, workers).finalize(samples)
    return QuotaCurve(
        grid,
        "hoeffding_bound",
        mean,
        stderr,
        np.full(grid.size, samples, dtype=np.int64),
        {"n": n, "seed": base.seed, "stream": base.stream, "method": "hoeffding-bound"},
    )


# --------------------------------------------------------------------------
# class discovery

# Exactly known class counts for 2..7 players; discovered counts may fall
# short under a small budget but can never exceed these.
CLASS_COUNT_CEILINGS = {2: 2, 3: 5, 4: 14, 5: 62, 6: 566, 7: 11971}


@dataclass(frozen=True)
class GameClass:
    """A winning family over rank-ordered players, with representative data.

    ``winning_masks`` lists the winning coalitions as bit masks where bit
    k marks the (k+1)-th largest player.
    """

    winning_masks: tuple[int, ...]
    beta: tuple[float, ...]
    hits: int


@dataclass(frozen=True)
class GameClassCatalog:
    n: int
    budget: int
    classes: tuple[GameClass, ...]

    @property
    def count(self) -> int:
        return len(self.classes)

    def beta_vectors(self) -> set[tuple[float, ...]]:
        return {c.beta for c in self.classes}


def _beta_from_family(n: int, masks) -> tuple[float, ...]:
    omega = len(masks)
    swing = []
    for i in range(n):
        member = sum(1 for m in masks if m >> i & 1)
        swing.append(2 * member - omega)
    denom = sum(swing)
    return tuple(s / denom for s in swing)


def discover_classes(n: int, budget: int = 10 ** 6, seed=0) -> GameClassCatalog:
    """Sample random (weights, quota) games and catalog the distinct winning
    families over rank-ordered players.

    Weights are uniform on the simplex and sorted descending, so equal
    games up to the order isomorphism collapse to one family; the quota is
    uniform on (1/2, 1].  Discovery is best effort: a class whose region
    has small volume may need a large budget to appear, so the budget is
    recorded alongside the result.
    """
    if not (2 <= n <= 7):
        raise InvalidArgumentsError("class discovery supports 2 <= n <= 7")
    if budget < 1:
        raise InvalidArgumentsError("budget must be at least 1")
    base = as_seed(seed)
    families: dict[bytes, int] = {}
    remaining = budget
    chunk_index = 0
    while remaining > 0:
        count = min(DISCOVERY_CHUNK, remaining)
        rng = base.substream(chunk_index).generator()
        u = rng.random((count, n))
        weights = -np.log1p(-u)
        weights /= weights.sum(axis=1, keepdims=True)
        weights.sort(axis=1)
        weights = weights[:, ::-1]
        quotas = 1.0 - 0.5 * rng.random(count)  # uniform on (1/2, 1]
        table = _coalition_sum_table(weights)
        win = table >= quotas[None, :]
        packed = np.ascontiguousarray(np.packbits(win, axis=0).T)
        keys = packed.view(np.dtype((np.void, packed.shape[1]))).reshape(-1)
        uniques, counts = np.unique(keys, return_counts=True)
        for key, hits in zip(uniques, counts):
            raw = key.tobytes()
            families[raw] = families.get(raw, 0) + int(hits)
        remaining -= count
        chunk_index += 1
    classes = []
    for raw, hits in families.items():
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[: 1 << n]
        masks = tuple(int(m) for m in np.flatnonzero(bits))
        classes.append(GameClass(masks, _beta_from_family(n, masks), hits))
    classes.sort(key=lambda c: (-c.hits, c.winning_masks))
    return GameClassCatalog(n=n, budget=budget, classes=tuple(classes))


# --------------------------------------------------------------------------
# extremum counting

def count_extrema(curve, smoothing_window: int = 5):
    """Count local extrema of a quota curve; returns (count, locations).

    Exact piecewise-polynomial curves report their stationary points with
    a derivative sign change.  Sampled curves are smoothed with a moving
    average first (Monte Carlo noise would otherwise create spurious
    extrema), then strict sign changes of the first difference are
    counted; this path is exploratory, not exact.
    """
    if isinstance(curve, analytic.PiecewisePolynomialCurve):
        points = curve.stationary_points()
        return len(points), [float(p) for p, _ in points]
    if isinstance(curve, QuotaCurve):
        quotas = np.asarray(curve.quotas, dtype=np.float64)
        values = np.asarray(curve.mean, dtype=np.float64)
    else:
        quotas, values = (np.asarray(a, dtype=np.float64) for a in curve)
    if values.size < 10:
        raise InvalidArgumentsError("need at least 10 grid points")
    window = max(1, int(smoothing_window))
    if window > 1:
        kernel = np.full(window, 1.0 / window)
        smooth = np.convolve(values, kernel, mode="valid")
        centers = quotas[window // 2: window // 2 + smooth.size]
    else:
        smooth, centers = values, quotas
    diffs = np.diff(smooth)
    nonzero = np.flatnonzero(diffs)
    signs = np.sign(diffs[nonzero])
    turns = np.flatnonzero(np.diff(signs) != 0)
    locations = [float(centers[nonzero[p] + 1]) for p in turns]
    return len(locations), locations


# --------------------------------------------------------------------------
# spline fitting

def _hinge_design(q, center, degree, knots):
    columns = [(q - center) ** p for p in range(degree + 1)]
    for bp in knots:
        hinge = np.maximum(q - bp, 0.0)
        columns.extend(hinge ** d for d in range(1, degree + 1))
    return np.column_stack(columns)


def _spline_predict(q, center, degree, base, knots, hinges):
    q = np.asarray(q, dtype=np.float64)
    t = q - center
    out = np.zeros_like(t)
    for power, c in enumerate(base):
        out += c * t ** power
    for bp, coeffs in zip(knots, hinges):
        hinge = np.maximum(q - bp, 0.0)
        for d, c in enumerate(coeffs, start=1):
            out += c * hinge ** d
    return out


def _lstsq_fit(q, v, center, degree, knots):
    design = _hinge_design(q, center, degree, knots)
    coef, _, _, _ = np.linalg.lstsq(design, v, rcond=None)
    residual = design @ coef - v
    return coef, float(np.sqrt(np.mean(residual * residual)))


def _shifted_poly(coeffs, shift, degree):
    """Ascending-power coefficients of sum_d coeffs[d] (q - shift)^d."""
    out = [0.0] * (degree + 1)
    for d, c in enumerate(coeffs):
        for i in range(d + 1):
            out[i] += c * math.comb(d, i) * (-shift) ** (d - i)
    return out


@dataclass(frozen=True)
class SplineFit:
    """A continuous piecewise-polynomial least-squares fit.

    The fit basis is a truncated power basis, so adjacent pieces agree at
    breakpoints by construction.  ``piece_coefficients[i]`` are plain
    ascending-power coefficients on the i-th interval between breakpoints.
    """

    interior_breakpoints: tuple[float, ...]
    degree: int
    piece_coefficients: tuple[tuple[float, ...], ...]
    max_residual: float
    center: float
    base_coefficients: tuple[float, ...]
    hinge_coefficients: tuple[tuple[float, ...], ...]

    def predict(self, q) -> np.ndarray:
        return _spline_predict(
            q,
            self.center,
            self.degree,
            self.base_coefficients,
            self.interior_breakpoints,
            self.hinge_coefficients,
        )


def fit_spline(
    quotas,
    values,
    max_degree: int,
    breakpoints="auto",
    penalty: float = 1e-8,
    max_breakpoints: int = 3,
) -> SplineFit:
    """Least-squares continuous piecewise polynomial of degree <= max_degree.

    ``breakpoints`` is either an explicit list of interior knots or
    "auto", which scans knot candidates on the sample grid and keeps
    adding knots while the penalized RMS residual (rms + penalty per
    knot) improves.  Every candidate piece must contain at least
    max_degree + 2 sample points.
    """
    q = np.asarray(quotas, dtype=np.float64).reshape(-1)
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if q.size != v.size or q.size == 0:
        raise InvalidArgumentsError("quotas and values must be equal-length, non-empty")
    if np.any(np.diff(q) <= 0):
        raise InvalidArgumentsError("sample grid must be strictly increasing")
    if max_degree < 0:
        raise InvalidArgumentsError("max_degree must be >= 0")
    min_pts = max_degree + 2
    if q.size < min_pts:
        raise InvalidArgumentsError(
            f"need at least {min_pts} sample points for degree {max_degree}"
        )
    center = 0.5 * (q[0] + q[-1])

    def piece_sizes(knots):
        edges = [q[0] - 1.0] + list(knots) + [q[-1] + 1.0]
        return [
            int(np.count_nonzero((q > lo) & (q <= hi)))
            for lo, hi in zip(edges[:-1], edges[1:])
        ]

    if breakpoints == "auto":
        chosen: list[float] = []
        coef, rms = _lstsq_fit(q, v, center, max_degree, chosen)
        best = (rms, chosen, coef)
        candidates = [float(x) for x in q[min_pts - 1: q.size - min_pts]]
        for _ in range(max_breakpoints):
            trial = None
            for cand in candidates:
                if cand in best[1]:
                    continue
                knots = sorted(best[1] + [cand])
                if min(piece_sizes(knots)) < min_pts:
                    continue
                coef, rms = _lstsq_fit(q, v, center, max_degree, knots)
                if trial is None or rms < trial[0]:
                    trial = (rms, knots, coef)
            if trial is None:
                break
            # A new knot must pay for itself under the penalty.
            if trial[0] + penalty * len(trial[1]) < best[0] + penalty * len(best[1]):
                best = trial
            else:
                break
        _, knots, coef = best
    else:
        knots = sorted(float(b) for b in breakpoints)
        if any(b <= q[0] or b >= q[-1] for b in knots):
            raise InvalidArgumentsError("breakpoints must lie inside the sample range")
        if min(piece_sizes(knots)) < min_pts:
            raise InvalidArgumentsError(
                "each piece needs at least max_degree + 2 sample points"
            )
        coef, _ = _lstsq_fit(q, v, center, max_degree, knots)

    base = tuple(float(c) for c in coef[: max_degree + 1])
    hinges = tuple(
        tuple(
            float(c)
            for c in coef[
                max_degree + 1 + j * max_degree: max_degree + 1 + (j + 1) * max_degree
            ]
        )
        for j in range(len(knots))
    )
    pieces = []
    running = _shifted_poly(base, center, max_degree)
    pieces.append(tuple(running))
    for bp, hcoef in zip(knots, hinges):
        extra = _shifted_poly([0.0] + list(hcoef), bp, max_degree)
        running = [a + b for a, b in zip(running, extra)]
        pieces.append(tuple(running))
    residual = float(
        np.max(np.abs(_spline_predict(q, center, max_degree, base, knots, hinges) - v))
    )
    return SplineFit(
        interior_breakpoints=tuple(knots),
        degree=max_degree,
        piece_coefficients=tuple(pieces),
        max_residual=residual,
        center=center,
        base_coefficients=base,
        hinge_coefficients=hinges,
    )
