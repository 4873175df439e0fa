"""Delayed Cournot market with one public firm and n private firms.

The public firm adjusts its output along its marginal social surplus with
speed ``alpha``, reacting to private outputs observed ``tau1`` steps ago.
Each private firm best-responds to the public output observed ``tau0``
steps ago and to the other private outputs observed ``tau2`` steps ago.
The state of the delayed map is a rolling window of the last
``tau_max + 1`` output vectors.

All operations here are pure: they never mutate their inputs and contain
no randomness, so identical inputs produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, ValidationError

DEFAULT_BLOWUP = 1.0e6

# tolerance for cross-checking (a, c0, c) against explicitly given (a0, a1)
_GAP_CONSISTENCY_TOL = 1.0e-12


@dataclass(frozen=True)
class MarketParams:
    """Economic parameters of the market.

    Outputs are indexed 0..n with index 0 the public firm.  The demand
    intercept gaps ``a0 = a - c0`` and ``a1 = a - c`` are all the map
    itself needs; the primitives (a, c0, c) are optional and only
    required for prices, profits and social surplus.
    """

    b: float
    delta: float
    alpha: float
    n: int
    a0: Optional[float] = None
    a1: Optional[float] = None
    a: Optional[float] = None
    c0: Optional[float] = None
    c: Optional[float] = None

    def __post_init__(self):
        if not float(self.b) > 0.0:
            raise ValidationError(f"b must be positive, got {self.b}")
        if not 0.0 < float(self.delta) < 1.0:
            raise ValidationError(f"delta must lie in (0, 1), got {self.delta}")
        if float(self.alpha) < 0.0:
            raise ValidationError(f"alpha must be nonnegative, got {self.alpha}")
        if int(self.n) != self.n or int(self.n) < 1:
            raise ValidationError(f"n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

        primitives = (self.a, self.c0, self.c)
        given = [v is not None for v in primitives]
        if any(given) and not all(given):
            raise ValidationError("give all of (a, c0, c) or none of them")
        if all(given):
            if not (self.a > self.c0 >= self.c >= 0.0):
                raise ValidationError(
                    f"costs must satisfy a > c0 >= c >= 0, got a={self.a}, c0={self.c0}, c={self.c}"
                )
            a0 = self.a - self.c0
            a1 = self.a - self.c
            if self.a0 is not None and abs(self.a0 - a0) > _GAP_CONSISTENCY_TOL:
                raise ValidationError(
                    f"a0={self.a0} inconsistent with a - c0 = {a0}"
                )
            if self.a1 is not None and abs(self.a1 - a1) > _GAP_CONSISTENCY_TOL:
                raise ValidationError(
                    f"a1={self.a1} inconsistent with a - c = {a1}"
                )
            object.__setattr__(self, "a0", a0)
            object.__setattr__(self, "a1", a1)
        else:
            # gap-only form: accept any positive gaps so boundary cases of
            # the positivity assumptions stay constructible
            if self.a0 is None or self.a1 is None:
                raise ValidationError("market needs either (a, c0, c) or (a0, a1)")
            if not (self.a0 > 0.0 and self.a1 > 0.0):
                raise ValidationError(
                    f"intercept gaps must be positive, got a0={self.a0}, a1={self.a1}"
                )

    @property
    def dimension(self) -> int:
        """Number of coordinates of one output vector (n private + 1 public)."""
        return self.n + 1

    @property
    def has_primitives(self) -> bool:
        return self.a is not None

    @property
    def gamma(self) -> float:
        """The recurring denominator 2 + (n-1)*delta of the best responses."""
        return 2.0 + (self.n - 1) * self.delta


@dataclass(frozen=True)
class DelayConfig:
    """The three nonnegative integer information delays."""

    tau0: int = 0
    tau1: int = 0
    tau2: int = 0

    def __post_init__(self):
        for name in ("tau0", "tau1", "tau2"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValidationError(f"{name} must be a nonnegative integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def tau_max(self) -> int:
        return max(self.tau0, self.tau1, self.tau2)

    @property
    def tau_sum(self) -> int:
        """Combined public/private reaction delay tau0 + tau1."""
        return self.tau0 + self.tau1


@dataclass(frozen=True)
class HistoryState:
    """Rolling window of the last tau_max + 1 output vectors, newest last."""

    window: np.ndarray
    time: int = 0

    def __post_init__(self):
        w = np.array(self.window, dtype=float)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 2:
            raise DimensionError(
                f"history window must be 2-d with at least one row and two columns, got shape {w.shape}"
            )
        object.__setattr__(self, "window", w)

    @classmethod
    def constant(cls, q, depth: int, time: int = 0) -> "HistoryState":
        """History holding ``depth`` copies of one output vector."""
        q = np.asarray(q, dtype=float)
        return cls(np.tile(q, (depth, 1)), time=time)

    @property
    def depth(self) -> int:
        return self.window.shape[0]

    @property
    def current(self) -> np.ndarray:
        return self.window[-1]

    def lookback(self, k: int) -> np.ndarray:
        """Output vector k steps in the past (k = 0 is the current one)."""
        if not 0 <= k < self.depth:
            raise DimensionError(f"lookback {k} outside window of depth {self.depth}")
        return self.window[-1 - k]

    def advanced(self, q_next) -> "HistoryState":
        """New history after appending ``q_next`` and dropping the oldest row."""
        q_next = np.asarray(q_next, dtype=float)
        return HistoryState(np.vstack([self.window[1:], q_next]), time=self.time + 1)


@dataclass(frozen=True)
class Trajectory:
    """Recorded orbit of the map, starting from the initial current state.

    ``outputs[0]`` is the state at ``start_time``; row k is the state at
    ``start_time + k``.  ``diverged`` is set (and iteration stops) as soon
    as a recorded coordinate leaves the blow-up bound or stops being
    finite.  ``final_window`` holds the last tau_max + 1 states, ready to
    seed a continuation run.
    """

    outputs: np.ndarray
    start_time: int
    diverged: bool
    diverged_at: Optional[int]
    final_window: np.ndarray

    @property
    def q0(self) -> np.ndarray:
        return self.outputs[:, 0]

    def __len__(self) -> int:
        return self.outputs.shape[0]


def _check_window(history: HistoryState, p: MarketParams, d: DelayConfig) -> None:
    depth, width = history.window.shape
    if depth != d.tau_max + 1:
        raise DimensionError(
            f"history depth {depth} does not match tau_max + 1 = {d.tau_max + 1}"
        )
    if width != p.dimension:
        raise DimensionError(
            f"history width {width} does not match n + 1 = {p.dimension}"
        )


def step(history: HistoryState, p: MarketParams, d: DelayConfig) -> np.ndarray:
    """One iteration of the delayed map, returning the next output vector.

    The public output follows
    ``q0' = q0 + alpha*q0*(a0 - b*q0 - b*delta*sum_i q_i(t - tau1))``
    and each private output follows
    ``q_j' = a1/(2b) - (delta/2)*q0(t - tau0) - (delta/2)*sum_{i != j} q_i(t - tau2)``.
    Negative outputs are propagated as-is; the map does not clamp.
    """
    _check_window(history, p, d)
    q_now = history.current
    q0 = q_now[0]
    priv_tau1 = history.lookback(d.tau1)[1:]
    q0_tau0 = history.lookback(d.tau0)[0]
    priv_tau2 = history.lookback(d.tau2)[1:]

    q0_next = q0 + p.alpha * q0 * (p.a0 - p.b * q0 - p.b * p.delta * priv_tau1.sum())
    others = priv_tau2.sum() - priv_tau2
    priv_next = p.a1 / (2.0 * p.b) - 0.5 * p.delta * q0_tau0 - 0.5 * p.delta * others

    out = np.empty(p.dimension)
    out[0] = q0_next
    out[1:] = priv_next
    return out


def simulate(
    p: MarketParams,
    d: DelayConfig,
    init: HistoryState,
    steps: int,
    blowup: float = DEFAULT_BLOWUP,
) -> Trajectory:
    """Iterate the map ``steps`` times from ``init``.

    Stops early with the divergence flag once any coordinate of a newly
    produced state exceeds ``blowup`` in absolute value or is not finite;
    the offending state is still recorded.
    """
    if steps < 0:
        raise ValidationError(f"steps must be >= 0, got {steps}")
    _check_window(init, p, d)

    depth = d.tau_max + 1
    m = p.dimension
    buf = np.empty((depth + steps, m))
    buf[:depth] = init.window

    a0, a1, b, delta, alpha = p.a0, p.a1, p.b, p.delta, p.alpha
    half_delta = 0.5 * delta
    base = a1 / (2.0 * b)
    l1 = 1 + d.tau1
    l0 = 1 + d.tau0
    l2 = 1 + d.tau2

    diverged = False
    diverged_at = None
    filled = depth
    for t in range(depth, depth + steps):
        q0 = buf[t - 1, 0]
        s1 = buf[t - l1, 1:].sum()
        buf[t, 0] = q0 + alpha * q0 * (a0 - b * q0 - b * delta * s1)
        priv2 = buf[t - l2, 1:]
        buf[t, 1:] = base - half_delta * buf[t - l0, 0] - half_delta * (priv2.sum() - priv2)
        filled = t + 1
        row = buf[t]
        if not np.all(np.isfinite(row)) or np.abs(row).max() > blowup:
            diverged = True
            diverged_at = init.time + (t - depth + 1)
            break

    outputs = buf[depth - 1 : filled].copy()
    final_window = buf[filled - depth : filled].copy()
    return Trajectory(
        outputs=outputs,
        start_time=init.time,
        diverged=diverged,
        diverged_at=diverged_at,
        final_window=final_window,
    )


def jacobian_blocks(
    point: HistoryState, p: MarketParams, d: DelayConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Coefficient matrices (A, B0, B1, B2) of the linearized map at ``point``.

    The linearization reads
    ``y(t+1) = A y(t) - B0 y(t-tau0) - B1 y(t-tau1) - B2 y(t-tau2)``.
    Only A and B1 depend on the point: A through the public firm's own
    marginal term, B1 through the cross term scaled by the current public
    output.  B0 and B2 are constant structure matrices.
    """
    _check_window(point, p, d)
    m = p.dimension
    q0 = point.current[0]
    s1 = point.lookback(d.tau1)[1:].sum()

    A = np.zeros((m, m))
    A[0, 0] = 1.0 + p.alpha * (p.a0 - 2.0 * p.b * q0 - p.b * p.delta * s1)

    B0 = np.zeros((m, m))
    B0[1:, 0] = 0.5 * p.delta

    B1 = np.zeros((m, m))
    B1[0, 1:] = p.b * p.alpha * p.delta * q0

    B2 = np.zeros((m, m))
    B2[1:, 1:] = 0.5 * p.delta * (np.ones((m - 1, m - 1)) - np.eye(m - 1))

    return A, B0, B1, B2


def embedded_jacobian(point: HistoryState, p: MarketParams, d: DelayConfig) -> np.ndarray:
    """Block-companion Jacobian acting on the stacked window.

    The stacked vector is ``(y(t), y(t-1), ..., y(t-tau_max))``.  The top
    block row carries A at lag 0 and minus each B-matrix at its delay
    (coinciding delays accumulate); identity blocks sit on the
    subdiagonal.  Eigenvalue zero appears with the padding multiplicity
    of the embedding.
    """
    A, B0, B1, B2 = jacobian_blocks(point, p, d)
    m = p.dimension
    depth = d.tau_max + 1
    J = np.zeros((m * depth, m * depth))

    top = np.zeros((depth, m, m))
    top[0] += A
    top[d.tau0] -= B0
    top[d.tau1] -= B1
    top[d.tau2] -= B2
    for k in range(depth):
        J[0:m, k * m : (k + 1) * m] = top[k]
    for k in range(1, depth):
        J[k * m : (k + 1) * m, (k - 1) * m : k * m] = np.eye(m)
    return J


@dataclass(frozen=True)
class EconomicReport:
    """Prices, profits and social surplus for one output vector."""

    prices: np.ndarray
    profits: np.ndarray
    social_surplus: float


def economic_report(q, p: MarketParams) -> EconomicReport:
    """Prices, per-firm profits and social surplus at output vector ``q``.

    Requires the primitive parameters (a, c0, c); the intercept gaps alone
    do not determine price levels.  The surplus is evaluated literally as
    gross utility minus consumer expenditure plus total profits, which
    collapses to utility minus production costs.
    """
    if not p.has_primitives:
        raise ValidationError(
            "economic_report needs primitive parameters (a, c0, c), not only intercept gaps"
        )
    q = np.asarray(q, dtype=float)
    if q.shape != (p.dimension,):
        raise DimensionError(f"expected output vector of shape ({p.dimension},), got {q.shape}")

    total = q.sum()
    prices = p.a - p.b * q - p.b * p.delta * (total - q)
    costs = np.full(p.dimension, p.c)
    costs[0] = p.c0
    profits = (prices - costs) * q

    sum_sq = float(q @ q)
    cross = total * total - sum_sq  # ordered pairs i != j
    utility = p.a * total - 0.5 * p.b * (sum_sq + p.delta * cross)
    social_surplus = utility - float(prices @ q) + float(profits.sum())
    return EconomicReport(prices=prices, profits=profits, social_surplus=social_surplus)
