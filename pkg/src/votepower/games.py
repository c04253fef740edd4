"""Exact computations on a single weighted voting game.

A game is a weight vector on the simplex plus a quota q in (1/2, 1].  A
coalition wins when its weight reaches the quota; the comparison is a
plain non-strict >= on the computed sums, with no epsilon.

Coalition weights are computed with one fixed arithmetic: the players are
split into a low half A (the first ceil(n/2) indices) and a high half B,
each half's subset sums are accumulated in increasing index order, and a
coalition's weight is its A-part plus its B-part.  The grand coalition's
weight is pinned to exactly 1.0, which the weight-vector invariant
licenses (entries sum to 1 up to 1e-12) and which makes q = 1 behave like
the real game.  Both counting kernels share this arithmetic, so the
meet-in-the-middle counter reproduces full enumeration bit for bit, ties
included.

For inputs where float ties at the quota are a real concern, build the
game from integer weights and a rational quota (``VotingGame.from_integers``):
every comparison then happens in exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError, InvalidArgumentsError
from .simplex import as_weight_vector

NAIVE_BUDGET = 30      # full 2^n enumeration
MITM_BUDGET = 48       # meet in the middle, 2^(n/2) memory
DENSE_BUDGET = 24      # largest n whose 2^n sum array is materialized whole
CURVE_BUDGET = 20      # quota curves keep a 2^n x n rank table

# Float comparisons against the quota go through "count b >= q - a" searches;
# candidates within this absolute window of the boundary are re-checked with
# the defining predicate fl(a + b) >= q so the search is exact.
_TIE_WINDOW = 32 * np.finfo(np.float64).eps


@dataclass(frozen=True, eq=False)
class VotingGame:
    """Weight vector plus qualified-majority quota in (1/2, 1]."""

    weights: np.ndarray
    quota: float
    int_weights: tuple[int, ...] | None = field(default=None)
    quota_fraction: tuple[int, int] | None = field(default=None)

    def __post_init__(self):
        w = as_weight_vector(self.weights)
        object.__setattr__(self, "weights", w)
        q = float(self.quota)
        if not (0.5 < q <= 1.0):
            raise InvalidArgumentsError(f"quota must lie in (1/2, 1], got {q!r}")
        object.__setattr__(self, "quota", q)
        if (self.int_weights is None) != (self.quota_fraction is None):
            raise InvalidArgumentsError(
                "exact mode needs both integer weights and a quota fraction"
            )

    @classmethod
    def from_integers(cls, weights, quota_num: int, quota_den: int) -> "VotingGame":
        """Exact-mode game: integer weights, quota given as num/den of the total."""
        ints = tuple(int(v) for v in weights)
        if any(v < 0 for v in ints) or sum(ints) <= 0:
            raise InvalidArgumentsError("integer weights must be non-negative, not all zero")
        num, den = int(quota_num), int(quota_den)
        if den <= 0 or not (2 * num > den and num <= den):
            raise InvalidArgumentsError("quota fraction must lie in (1/2, 1]")
        total = sum(ints)
        if den * total >= (1 << 62):
            raise InvalidArgumentsError("integer weights too large for exact 64-bit kernels")
        floats = np.array(ints, dtype=np.float64) / total
        return cls(floats, num / den, int_weights=ints, quota_fraction=(num, den))

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def exact(self) -> bool:
        return self.int_weights is not None


@dataclass(frozen=True, eq=False)
class PowerProfile:
    """Per-player power data for one game.

    psi is the absolute Penrose-Banzhaf index (2 w_i - w) / 2^{n-1} built
    from the winning-coalition counts; beta is psi normalized to sum 1;
    coleman is the fraction of all coalitions that win.
    """

    psi: np.ndarray
    beta: np.ndarray
    coleman: float
    winning_count: int
    member_counts: np.ndarray


def _half_sizes(n: int) -> tuple[int, int]:
    h = (n + 1) // 2
    return h, n - h


def _accumulated_sums(values: np.ndarray) -> np.ndarray:
    """Subset sums of one half, index bit i <-> element i, added in index order."""
    size = len(values)
    out = np.zeros(1 << size, dtype=values.dtype)
    filled = 1
    for v in values:
        out[filled:2 * filled] = out[:filled] + v
        filled *= 2
    return out


def _split_sums(game: VotingGame):
    """(A sums, B sums) in the canonical split; integer dtype in exact mode."""
    if game.exact:
        w = np.array(game.int_weights, dtype=np.int64)
    else:
        w = game.weights
    h, _ = _half_sizes(game.n)
    return _accumulated_sums(w[:h]), _accumulated_sums(w[h:])


def _full_sums(game: VotingGame) -> np.ndarray:
    """All 2^n coalition weights; mask = (b_mask << h) | a_mask."""
    sa, sb = _split_sums(game)
    sums = (sb[:, None] + sa[None, :]).reshape(-1)
    if not game.exact:
        sums[-1] = 1.0
    return sums


def _winning_threshold(game: VotingGame):
    """Exact mode: coalition wins iff den * sum >= num * total."""
    num, den = game.quota_fraction
    return num * sum(game.int_weights), den


def is_winning(game: VotingGame, coalition: int) -> bool:
    """Does the coalition (an n-bit member mask) reach the quota?"""
    n = game.n
    if not (0 <= coalition < (1 << n)):
        raise InvalidArgumentsError("coalition mask has bits beyond the player count")
    members = [i for i in range(n) if coalition >> i & 1]
    if game.exact:
        target, den = _winning_threshold(game)
        return den * sum(game.int_weights[i] for i in members) >= target
    if coalition == (1 << n) - 1:
        return 1.0 >= game.quota
    h, _ = _half_sizes(n)
    part_a = 0.0
    part_b = 0.0
    for i in members:
        if i < h:
            part_a += game.weights[i]
        else:
            part_b += game.weights[i]
    return part_a + part_b >= game.quota


def _count_ge(sorted_vals: np.ndarray, bases: np.ndarray, quota: float) -> np.ndarray:
    """For each base, count sorted values v with fl(base + v) >= quota.

    Bulk counting uses a binary search against quota - base; values inside
    a small window around that boundary are re-tested with the defining
    float predicate, so the result matches elementwise evaluation exactly.
    """
    thresholds = quota - bases
    low = np.searchsorted(sorted_vals, thresholds - _TIE_WINDOW, side="left")
    high = np.searchsorted(sorted_vals, thresholds + _TIE_WINDOW, side="right")
    counts = sorted_vals.size - high
    suspect = np.flatnonzero(high > low)
    for idx in suspect:
        window = sorted_vals[low[idx]:high[idx]]
        counts[idx] += int(np.count_nonzero(bases[idx] + window >= quota))
    return counts


def _mask_has_bit(size_bits: int, bit: int) -> np.ndarray:
    return (np.arange(1 << size_bits, dtype=np.uint32) >> bit & 1).astype(bool)


def count_winning_naive(game: VotingGame) -> tuple[int, np.ndarray]:
    """Count winning coalitions, and per player those containing them,
    by enumerating all 2^n coalitions.  n <= 30."""
    n = game.n
    if n > NAIVE_BUDGET:
        raise BudgetExceededError(
            f"naive enumeration supports n <= {NAIVE_BUDGET}; "
            "use count_winning_mitm for larger games"
        )
    if game.exact:
        target, den = _winning_threshold(game)

        def wins(row):
            return den * row >= target
    else:
        quota = game.quota

        def wins(row):
            return row >= quota

    h, r = _half_sizes(n)
    sa, sb = _split_sums(game)
    if n <= DENSE_BUDGET:
        sums = (sb[:, None] + sa[None, :]).reshape(-1)
        if not game.exact:
            sums[-1] = 1.0
        win = wins(sums)
        omega = int(np.count_nonzero(win))
        winners = np.flatnonzero(win).astype(np.uint32)
        member = np.empty(n, dtype=np.int64)
        for i in range(n):
            member[i] = int(np.count_nonzero(winners >> np.uint32(i) & np.uint32(1)))
        return omega, member

    # Streaming variant for 24 < n <= 30: one B-mask row at a time.
    bits_a = [_mask_has_bit(h, i) for i in range(h)]
    omega = 0
    member = np.zeros(n, dtype=np.int64)
    for mb in range(1 << r):
        row = sa + sb[mb]
        if not game.exact and mb == (1 << r) - 1:
            row[-1] = 1.0
        win = wins(row)
        count = int(np.count_nonzero(win))
        if count == 0:
            continue
        omega += count
        for i in range(h):
            member[i] += int(np.count_nonzero(win & bits_a[i]))
        for j in range(r):
            if mb >> j & 1:
                member[h + j] += count
    return omega, member


def count_winning_mitm(game: VotingGame) -> tuple[int, np.ndarray]:
    """Meet-in-the-middle winning counts, O(2^(n/2) n) time.  n <= 48.

    Output is identical to count_winning_naive wherever both run: the
    kernels share the same coalition-weight arithmetic, and boundary
    candidates are double-checked against the defining predicate.
    """
    n = game.n
    if n > MITM_BUDGET:
        raise BudgetExceededError(f"meet-in-the-middle supports n <= {MITM_BUDGET}")
    h, r = _half_sizes(n)
    sa, sb = _split_sums(game)

    if game.exact:
        target, den = _winning_threshold(game)
        sb_scaled = np.sort(den * sb)
        sb_by_player = [np.sort(den * sb[_mask_has_bit(r, j)]) for j in range(r)]

        def count_against(sorted_vals, bases):
            return sorted_vals.size - np.searchsorted(
                sorted_vals, target - den * bases, side="left"
            )
    else:
        quota = game.quota
        sb_scaled = np.sort(sb)
        sb_by_player = [np.sort(sb[_mask_has_bit(r, j)]) for j in range(r)]

        def count_against(sorted_vals, bases):
            return _count_ge(sorted_vals, bases, quota)

    per_a = count_against(sb_scaled, sa)
    omega = int(per_a.sum())
    member = np.empty(n, dtype=np.int64)
    for i in range(h):
        member[i] = int(per_a[_mask_has_bit(h, i)].sum())
    for j in range(r):
        member[h + j] = int(count_against(sb_by_player[j], sa).sum())

    if not game.exact:
        # The grand coalition's weight is 1.0 by definition; adjust if the
        # raw pair comparison disagreed (q <= 1 means it always wins).
        raw_grand = sa[-1] + sb[-1] >= game.quota
        if not raw_grand:
            omega += 1
            member += 1
    return omega, member


def _profile_from_counts(n: int, omega: int, member: np.ndarray) -> PowerProfile:
    swing = 2 * member - omega  # integer swing counts, always >= 0
    denom = int(swing.sum())
    psi = swing / float(2 ** (n - 1))
    beta = swing / denom if denom > 0 else np.zeros(n)
    psi.setflags(write=False)
    beta.setflags(write=False)
    counts = member.copy()
    counts.setflags(write=False)
    return PowerProfile(
        psi=psi,
        beta=beta,
        coleman=omega / float(2 ** n),
        winning_count=omega,
        member_counts=counts,
    )


def banzhaf(game: VotingGame) -> PowerProfile:
    """Exact Penrose-Banzhaf profile; enumerates for n <= 20, meets in the
    middle beyond."""
    if game.n <= 20:
        omega, member = count_winning_naive(game)
    else:
        omega, member = count_winning_mitm(game)
    return _profile_from_counts(game.n, omega, member)


def dummies(game: VotingGame) -> frozenset[int]:
    """Players whose absolute index is exactly zero (0-based indices)."""
    omega, member = (
        count_winning_naive(game) if game.n <= 20 else count_winning_mitm(game)
    )
    return frozenset(int(i) for i in np.flatnonzero(2 * member == omega))


def hoeffding_bound(game: VotingGame) -> float:
    """Upper bound exp(-2 (q - 1/2)^2 / sum w^2) on the Coleman index."""
    q = game.quota
    ssq = float(np.dot(game.weights, game.weights))
    return math.exp(-2.0 * (q - 0.5) ** 2 / ssq)


def optimal_quota_diagnostic(weights, variant: str = "sqrt") -> float:
    """Quota heuristics built from the squared-weight sum s = sum w^2.

    variant="sqrt" returns (1 + sqrt(s)) / 2, which always lies in (1/2, 1].
    variant="printed" returns (1 + 1/s) / 2, reproduced as sometimes quoted;
    since s <= 1 this is >= 1 and cannot be a quota except for a dictator,
    so callers should treat it as a diagnostic, not a usable quota.
    """
    w = as_weight_vector(weights)
    ssq = float(np.dot(w, w))
    if variant == "sqrt":
        return 0.5 * (1.0 + math.sqrt(ssq))
    if variant == "printed":
        return 0.5 * (1.0 + 1.0 / ssq)
    raise InvalidArgumentsError(f"unknown variant {variant!r}")


@dataclass(frozen=True, eq=False)
class StepCurve:
    """A piecewise-constant function of the quota on (1/2, 1].

    Piece i covers (breakpoints[i-1], breakpoints[i]] (with implicit left
    edge 1/2); the value at a breakpoint belongs to the piece ending there,
    matching the >= winning convention.  The final breakpoint is always 1.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    statistic: str

    def value_at(self, q: float):
        q = float(q)
        if not (0.5 < q <= 1.0):
            raise InvalidArgumentsError("quota must lie in (1/2, 1]")
        piece = int(np.searchsorted(self.breakpoints, q, side="left"))
        return self.values[piece]

    def to_rows(self):
        """Rows (quota, series, value, stderr, samples) for persistence."""
        rows = []
        for i, bp in enumerate(self.breakpoints):
            value = self.values[i]
            if np.ndim(value) == 0:
                rows.append((float(bp), self.statistic, float(value), 0.0, 0))
            else:
                for p, v in enumerate(value):
                    name = f"{self.statistic}_player_{p + 1}"
                    rows.append((float(bp), name, float(v), 0.0, 0))
        return rows


def _counts_for_quotas(sums: np.ndarray, n: int, quotas: np.ndarray):
    """omega and per-player counts for many quotas from one sum array."""
    order = np.argsort(sums, kind="stable")
    sorted_sums = sums[order]
    bits = (order[:, None] >> np.arange(n, dtype=order.dtype) & 1).astype(np.int32)
    suffix = np.zeros((sums.size + 1, n), dtype=np.int64)
    suffix[:-1] = np.cumsum(bits[::-1], axis=0)[::-1]
    pos = np.searchsorted(sorted_sums, quotas, side="left")
    omega = sums.size - pos
    return omega, suffix[pos]


def fixed_weight_quota_curve(weights, statistic: str = "beta") -> StepCurve:
    """Exact step function of the quota for a fixed weight vector.

    Breakpoints are the distinct coalition weights inside (1/2, 1]; the
    requested functional (beta, psi, or coleman) is evaluated once per
    piece at its right endpoint.
    """
    if statistic not in ("beta", "psi", "coleman"):
        raise InvalidArgumentsError(f"unknown statistic {statistic!r}")
    w = as_weight_vector(weights)
    n = w.size
    if n > CURVE_BUDGET:
        raise BudgetExceededError(f"quota curves support n <= {CURVE_BUDGET}")
    game = VotingGame(w, 1.0)
    sums = _full_sums(game)
    breakpoints = np.unique(sums[(sums > 0.5) & (sums <= 1.0)])
    omega, member = _counts_for_quotas(sums, n, breakpoints)
    pieces = []
    for i in range(breakpoints.size):
        profile = _profile_from_counts(n, int(omega[i]), member[i])
        if statistic == "beta":
            pieces.append(profile.beta)
        elif statistic == "psi":
            pieces.append(profile.psi)
        else:
            pieces.append(profile.coleman)
    values = np.array(pieces)
    values.setflags(write=False)
    breakpoints.setflags(write=False)
    return StepCurve(breakpoints=breakpoints, values=values, statistic=statistic)
