"""Closed-form expected-power results for two and three players, and the
machinery for the expected Coleman index of a random game.

Three-player results are assembled at import time from the catalog of
game classes: each class carries its normalized index vector and the
probability (a quadratic in the quota q, split at q = 2/3) that a
uniformly drawn weight vector lands in it.  Expected ordered indices are
the class-probability-weighted combinations, kept as exact rationals; the
coefficients are derived, not transcribed, and satisfy sum-to-one and
continuity at 2/3 identically.  The second-rank curve has a single
interior maximum at q = 34/39; the third-rank curve has a local maximum
at q = 5/9 and a local minimum at q = 13/18 (natures read off the second
derivative of these exact quadratics).

The Coleman side works with Z = (weight of a uniformly random coalition)
- 1/2 under the product of the simplex and fair-coin measures.  Its
characteristic function is an even entire series (a 1F2 hypergeometric);
the expected Coleman index is 1 - F_Z(q - 1/2), recovered from the
characteristic function by a sine-transform inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtri

from .errors import ConvergenceFailureError, InvalidArgumentsError

# --------------------------------------------------------------------------
# small exact-polynomial helpers (coefficients ascending, Fraction-valued)

Poly = tuple[Fraction, ...]


def _poly(*coeffs) -> Poly:
    return tuple(Fraction(c) for c in coeffs)


def _poly_eval(p: Poly, q):
    acc = p[-1]
    for c in reversed(p[:-1]):
        acc = acc * q + c
    return acc


def _poly_add(a: Poly, b: Poly) -> Poly:
    size = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size)
    )


def _poly_scale(p: Poly, factor) -> Poly:
    return tuple(Fraction(factor) * c for c in p)


def _poly_derivative(p: Poly) -> Poly:
    if len(p) <= 1:
        return (Fraction(0),)
    return tuple(Fraction(i) * c for i, c in enumerate(p) if i > 0)


@dataclass(frozen=True)
class PiecewisePolynomialCurve:
    """Exact piecewise polynomial on consecutive intervals.

    ``edges`` are the piece boundaries (increasing Fractions); piece i is
    taken on [edges[i], edges[i+1]].  Adjacent pieces agree at shared
    edges for every curve built here.
    """

    edges: tuple[Fraction, ...]
    pieces: tuple[Poly, ...]

    def value(self, q: float) -> float:
        qf = Fraction(float(q))
        if not (self.edges[0] <= qf <= self.edges[-1]):
            raise InvalidArgumentsError("argument outside the curve domain")
        for i in range(len(self.pieces)):
            if qf <= self.edges[i + 1]:
                return float(_poly_eval(self.pieces[i], qf))
        raise AssertionError("unreachable")

    def stationary_points(self) -> list[tuple[Fraction, str]]:
        """Interior extrema with a derivative sign change, exactly.

        Covers polynomial pieces of degree at most 2 plus kinks at the
        interior edges (one-sided slope comparison).
        """
        points = []
        for i, piece in enumerate(self.pieces):
            deriv = _poly_derivative(piece)
            if len(deriv) > 2:
                raise InvalidArgumentsError(
                    "exact stationary points implemented for quadratic pieces"
                )
            if len(deriv) == 2 and deriv[1] != 0:
                root = -deriv[0] / deriv[1]
                if self.edges[i] < root < self.edges[i + 1]:
                    kind = "maximum" if deriv[1] < 0 else "minimum"
                    points.append((root, kind))
        for i in range(1, len(self.pieces)):
            edge = self.edges[i]
            left = _poly_eval(_poly_derivative(self.pieces[i - 1]), edge)
            right = _poly_eval(_poly_derivative(self.pieces[i]), edge)
            if left * right < 0:
                points.append((edge, "maximum" if left > 0 else "minimum"))
        return sorted(points)


# --------------------------------------------------------------------------
# two players

def expected_beta_n2(q: float) -> tuple[float, float]:
    """Expected ordered normalized indices for two players: (3/2 - q, q - 1/2)."""
    q = float(q)
    if not (0.5 < q <= 1.0):
        raise InvalidArgumentsError("quota must lie in (1/2, 1]")
    return 1.5 - q, q - 0.5


def expected_beta_n2_curve(rank: int) -> PiecewisePolynomialCurve:
    """The rank-1 or rank-2 two-player curve as an exact linear piece."""
    if rank == 1:
        poly = _poly(Fraction(3, 2), -1)
    elif rank == 2:
        poly = _poly(Fraction(-1, 2), 1)
    else:
        raise InvalidArgumentsError("rank must be 1 or 2")
    return PiecewisePolynomialCurve((Fraction(1, 2), Fraction(1)), (poly,))


# --------------------------------------------------------------------------
# three players: class catalog

@dataclass(frozen=True)
class GameClassInfo:
    """One equivalence class of games: ordered index vector plus the
    probability polynomial on each side of the branch point."""

    label: str
    beta: tuple[Fraction, ...]
    prob_low: Poly    # valid for q <= branch point
    prob_high: Poly   # valid for q >= branch point


@dataclass(frozen=True)
class ClassTable:
    n: int
    branch_point: Fraction
    classes: tuple[GameClassInfo, ...]

    def probabilities(self, q: float) -> dict[str, float]:
        q = float(q)
        if not (0.5 < q <= 1.0):
            raise InvalidArgumentsError("quota must lie in (1/2, 1]")
        low = q <= self.branch_point
        return {
            c.label: float(_poly_eval(c.prob_low if low else c.prob_high, Fraction(q)))
            for c in self.classes
        }


_TABLE_N3 = ClassTable(
    n=3,
    branch_point=Fraction(2, 3),
    classes=(
        GameClassInfo(
            "A",  # only the grand coalition wins
            (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
            _poly(0),
            _poly(4, -12, 9),
        ),
        GameClassInfo(
            "B",  # the two heaviest pairs win, the smallest player is a dummy
            (Fraction(1, 2), Fraction(1, 2), Fraction(0)),
            _poly(3, -12, 12),
            _poly(-9, 24, -15),
        ),
        GameClassInfo(
            "C",  # largest player belongs to every winning pair
            (Fraction(3, 5), Fraction(1, 5), Fraction(1, 5)),
            _poly(-9, 30, -24),
            _poly(3, -6, 3),
        ),
        GameClassInfo(
            "D",  # every pair wins
            (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
            _poly(4, -12, 9),
            _poly(0),
        ),
        GameClassInfo(
            "E",  # dictator
            (Fraction(1), Fraction(0), Fraction(0)),
            _poly(3, -6, 3),
            _poly(3, -6, 3),
        ),
    ),
)


def class_table_n3() -> ClassTable:
    """The five three-player game classes with their quota-dependent
    probabilities (quadratics, branch point 2/3)."""
    return _TABLE_N3


def _combine_branch(which: str) -> tuple[Poly, Poly, Poly]:
    out = []
    for rank in range(3):
        acc: Poly = (Fraction(0),)
        for cls in _TABLE_N3.classes:
            poly = cls.prob_low if which == "low" else cls.prob_high
            acc = _poly_add(acc, _poly_scale(poly, cls.beta[rank]))
        out.append(acc)
    return tuple(out)


_BETA_N3_LOW = _combine_branch("low")
_BETA_N3_HIGH = _combine_branch("high")


def expected_beta_n3_pieces():
    """Exact quadratic coefficients of the three expected ordered indices,
    for q <= 2/3 and q >= 2/3 respectively (ascending powers of q)."""
    return _BETA_N3_LOW, _BETA_N3_HIGH


def expected_beta_n3_curve(rank: int) -> PiecewisePolynomialCurve:
    """One rank's expected-index curve as two exact quadratic pieces."""
    if rank not in (1, 2, 3):
        raise InvalidArgumentsError("rank must be 1, 2, or 3")
    return PiecewisePolynomialCurve(
        (Fraction(1, 2), Fraction(2, 3), Fraction(1)),
        (_BETA_N3_LOW[rank - 1], _BETA_N3_HIGH[rank - 1]),
    )


def expected_beta_n3(q: float) -> tuple[float, float, float]:
    """Expected ordered normalized indices for three players."""
    q = float(q)
    if not (0.5 < q <= 1.0):
        raise InvalidArgumentsError("quota must lie in (1/2, 1]")
    branch = _BETA_N3_LOW if q <= float(_TABLE_N3.branch_point) else _BETA_N3_HIGH
    return tuple(float(_poly_eval(p, Fraction(q))) for p in branch)


@dataclass(frozen=True)
class Extremum:
    rank: int
    location: Fraction
    kind: str  # "maximum" or "minimum"


def extrema_n3() -> tuple[Extremum, ...]:
    """Interior extrema of the three expected ordered index curves on (1/2, 1).

    Rank 1 is monotone; rank 2 peaks once at 34/39; rank 3 has a maximum
    at 5/9 and a minimum at 13/18.  Natures come from the exact second
    derivatives of the derived quadratics.
    """
    found = []
    for rank in (1, 2, 3):
        for location, kind in expected_beta_n3_curve(rank).stationary_points():
            found.append(Extremum(rank, location, kind))
    return tuple(found)


# --------------------------------------------------------------------------
# characteristic function of the centered random-coalition weight

def _series_switch(n: int) -> float:
    # Below this |t| the alternating series loses at most ~1e-10 absolute;
    # above it the elementary closed form's recurrence is stable (it needs
    # |t| comfortably above n).  Cross-validated in the test suite.
    return max(30.0, n + 12.0)


def _cf_series(n: int, t: np.ndarray) -> np.ndarray:
    """Even power series sum_j (-1)^j (t/2)^{2j} C(j+n-1, n-1) / (n)_{2j},
    accumulated with Neumaier compensation."""
    term = np.ones_like(t)
    total = np.ones_like(t)
    comp = np.zeros_like(t)
    tsq = t * t
    j = 0
    while True:
        ratio = -(tsq * (j + n)) / (4.0 * (j + 1) * (n + 2 * j) * (n + 2 * j + 1))
        term = term * ratio
        fresh = total + term
        comp += np.where(
            np.abs(total) >= np.abs(term),
            (total - fresh) + term,
            (term - fresh) + total,
        )
        total = fresh
        j += 1
        if j >= 8 and np.all(np.abs(term) <= 1e-18 * (np.abs(total) + 1e-30)):
            break
        if j > 800:
            raise ConvergenceFailureError("characteristic-function series stalled")
    return total + comp


def _cf_continuous_large(n: int, t: np.ndarray) -> np.ndarray:
    """Continuous part of the CF for large |t|, via the closed form of the
    coalition-weight mixture.

    A coalition of m of n players (0 < m < n) has total weight Beta(m, n-m)
    under the uniform simplex law, whose CF is the Kummer function
    1F1(m; n; it); for integer parameters that reduces to the moments
    I_p = int_0^1 e^{itu} u^p du, computed by the upward recurrence
    I_p = (e^{it} - p I_{p-1}) / (it), stable once |t| exceeds p.
    """
    if n == 1:
        return np.zeros_like(t)
    s = 1j * t
    es = np.exp(s)
    moments = [(es - 1.0) / s]
    for p in range(1, n - 1):
        moments.append((es - p * moments[p - 1]) / s)
    phase = np.exp(-0.5j * t)
    acc = np.zeros_like(t)
    for m in range(1, n):
        prefactor = math.factorial(n - 1) // (
            math.factorial(m - 1) * math.factorial(n - m - 1)
        )
        series = np.zeros_like(s)
        for r in range(n - m):
            sign = -1 if r % 2 else 1
            series = series + (sign * math.comb(n - m - 1, r)) * moments[m - 1 + r]
        acc += (math.comb(n, m) * prefactor) * np.real(phase * series)
    return acc * 2.0 ** (-n)


def coalition_weight_cf(n: int, t) -> float | np.ndarray:
    """Characteristic function of the centered weight of a random coalition.

    Real and even in t, equal to 1 at t = 0, bounded by 1 in absolute
    value; for a single player it is exactly cos(t/2).  Small |t| uses
    the hypergeometric power series, large |t| an exact elementary
    representation, so the whole real line is covered.
    """
    if n < 1:
        raise InvalidArgumentsError("player count must be at least 1")
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty_like(arr)
    mag = np.abs(arr)
    if n == 1:
        out[:] = np.cos(0.5 * arr)
    else:
        small = mag <= _series_switch(n)
        if np.any(small):
            out[small] = _cf_series(n, mag[small])
        if np.any(~small):
            big = mag[~small]
            out[~small] = 2.0 ** (1 - n) * np.cos(0.5 * big) + _cf_continuous_large(
                n, big
            )
    if np.ndim(t) == 0:
        return float(out[0])
    return out


def _cf_continuous(n: int, t: np.ndarray) -> np.ndarray:
    """CF of the continuous part only (atoms at +-1/2 removed)."""
    out = np.empty_like(t)
    mag = np.abs(t)
    small = mag <= _series_switch(n)
    if np.any(small):
        sm = mag[small]
        out[small] = _cf_series(n, sm) - 2.0 ** (1 - n) * np.cos(0.5 * sm)
    if np.any(~small):
        out[~small] = _cf_continuous_large(n, mag[~small])
    return out


# --------------------------------------------------------------------------
# expected Coleman index by inversion

@dataclass(frozen=True)
class ColemanCurveSpec:
    """How to evaluate an expected-Coleman curve."""

    method: str = "inversion"  # inversion | normal | hoeffding-bound
    integration_tolerance: float = 1e-7
    max_frequency: float = 2.0 ** 22

    def __post_init__(self):
        if self.method not in ("inversion", "normal", "hoeffding-bound"):
            raise InvalidArgumentsError(f"unknown method {self.method!r}")
        if self.integration_tolerance <= 0:
            raise InvalidArgumentsError("integration tolerance must be positive")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_PANEL_WIDTH = 2.0
_NODE_BLOCK = 1 << 16


def _edge_jump(n: int) -> float:
    """Density of the continuous part of Z at its support edges +-1/2."""
    return 2.0 ** (-n) * n * (n - 1)


def _sine_integral(n: int, x: float, lo: float, hi: float) -> float:
    """int_lo^hi sin(t x) r(t) / t dt on fixed Gauss-Legendre panels, where
    r(t) = cf_cont(t) - 2 gamma sin(t/2) / t is the continuous CF with its
    leading edge-jump oscillation removed (gamma = density at the edges).

    r decays like t^-2, so the integrand is O(t^-3) even where sin(t x)
    resonates with the edge frequency; the subtracted term is restored in
    closed form by the caller.  Frequencies stay below 1, so 16-point
    panels of width 2 resolve the oscillation to machine accuracy and only
    the truncation point matters for the error.
    """
    gamma = _edge_jump(n)
    panels = max(1, int(math.ceil((hi - lo) / _PANEL_WIDTH)))
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).reshape(-1)
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).reshape(-1)
    total = 0.0
    for start in range(0, nodes.size, _NODE_BLOCK):
        ts = nodes[start:start + _NODE_BLOCK]
        ws = weights[start:start + _NODE_BLOCK]
        reduced = _cf_continuous(n, ts) - 2.0 * gamma * np.sin(0.5 * ts) / ts
        vals = np.sin(ts * x) * reduced / ts
        total += float(np.dot(ws, vals))
    return total


def expected_coleman(
    n: int,
    q: float,
    *,
    integration_tolerance: float = 1e-7,
    max_frequency: float = 2.0 ** 22,
) -> float:
    """Expected Coleman index of an n-player game with uniform random weights.

    Computed as 1 - F_Z(q - 1/2), where Z is the centered weight of a
    random coalition and F at a continuity point x in (0, 1/2) equals
    1/2 + (1/pi) int_0^inf sin(t x) cf(t) / t dt.  Two pieces of the CF
    integrate in closed form and are handled exactly rather than
    numerically: the atom part 2^{1-n} cos(t/2) contributes zero for
    x < 1/2, and the edge-jump part 2 gamma sin(t/2) / t contributes
    gamma x (via int_0^inf sin(ax) sin(bx) / x^2 = pi min(a, b) / 2).
    What remains decays fast enough that the quadrature horizon, doubled
    until two successive results agree within the tolerance, stays small
    even as q approaches 1.  q = 1 hits the atom itself and returns 2^-n
    directly.
    """
    if n < 1:
        raise InvalidArgumentsError("player count must be at least 1")
    q = float(q)
    if not (0.5 < q <= 1.0):
        raise InvalidArgumentsError("quota must lie in (1/2, 1]")
    if integration_tolerance <= 0:
        raise InvalidArgumentsError("integration tolerance must be positive")
    if q == 1.0:
        return 2.0 ** (-n)
    if n == 1:
        return 0.5
    x = q - 0.5
    base = 0.5 - _edge_jump(n) * x
    horizon = 256.0
    integral = _sine_integral(n, x, 0.0, horizon)
    while True:
        tail = _sine_integral(n, x, horizon, 2.0 * horizon)
        integral += tail
        horizon *= 2.0
        if horizon >= 1024.0 and abs(tail) < integration_tolerance:
            break
        if horizon > max_frequency:
            raise ConvergenceFailureError(
                f"inversion did not stabilize below frequency {max_frequency:g}",
                estimates=(
                    base - (integral - tail) / math.pi,
                    base - integral / math.pi,
                ),
            )
    return base - integral / math.pi


def expected_coleman_normal(n: int, q: float) -> float:
    """Central-limit approximation 1 - Phi(sqrt(2 (n+1)) (q - 1/2))."""
    if n < 1:
        raise InvalidArgumentsError("player count must be at least 1")
    q = float(q)
    if not (0.5 <= q <= 1.0):
        raise InvalidArgumentsError("quota must lie in [1/2, 1]")
    z = math.sqrt(2.0 * (n + 1)) * (q - 0.5)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def coleman_error_ratio(
    n: int,
    y: float,
    *,
    integration_tolerance: float = 1e-8,
    max_frequency: float = 2.0 ** 22,
) -> float:
    """Ratio of the normal-approximation quota to the exact-curve quota at
    a target expected Coleman value y.

    The numerator solves the normal approximation in closed form via the
    inverse normal CDF; the denominator inverts the inversion-based curve
    by bracketed root finding (the curve is strictly decreasing in q).
    """
    if n < 1:
        raise InvalidArgumentsError("player count must be at least 1")
    y = float(y)
    if not (2.0 ** (-2 * n) <= y <= 0.5):
        raise InvalidArgumentsError("target value outside [2^-2n, 1/2]")
    if y == 0.5:
        return 1.0
    q_normal = 0.5 + float(ndtri(1.0 - y)) / math.sqrt(2.0 * (n + 1))

    def objective(q: float) -> float:
        return (
            expected_coleman(
                n,
                q,
                integration_tolerance=integration_tolerance,
                max_frequency=max_frequency,
            )
            - y
        )

    lo, hi = 0.5 + 1e-9, 1.0 - 1e-9
    f_hi = objective(hi)
    if f_hi >= 0.0:
        raise ConvergenceFailureError(
            f"target {y!r} is below the exact curve's infimum near q = 1; "
            "no quota brackets it",
            estimates=(f_hi + y, y),
        )
    q_exact = brentq(objective, lo, hi, xtol=1e-13, rtol=8.9e-16)
    return q_normal / q_exact
