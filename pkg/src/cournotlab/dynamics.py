"""Nonlinear exploration: sweeps over the adjustment speed, largest
Lyapunov exponents via exact tangent propagation, attractor typing and
phase portraits.

Everything is deterministic by construction.  The default initial
condition is a constant history at the interior equilibrium with a
+1e-2 bump on the public output only; no random number generator is
used anywhere.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibria import positive_equilibrium
from .errors import DivergenceError, NumericalError, ValidationError
from .model import DEFAULT_BLOWUP, DelayConfig, HistoryState, MarketParams, simulate

DEFAULT_PERTURBATION = 1.0e-2
PERIOD_TOL = 1.0e-6
PERIOD_KMAX = 64


class InitPolicy(enum.Enum):
    FRESH_PERTURBED = "FreshPerturbed"
    CONTINUED = "Continued"


@dataclass(frozen=True)
class SweepSpec:
    """Grid and sampling plan for a sweep over the adjustment speed."""

    alpha_min: float
    alpha_max: float
    num_alpha: int
    transient: int = 2000
    samples: int = 200
    policy: InitPolicy = InitPolicy.FRESH_PERTURBED
    perturbation: float = DEFAULT_PERTURBATION
    blowup: float = DEFAULT_BLOWUP
    lyap_transient: int = 1000
    lyap_iters: int = 20000

    def __post_init__(self):
        if self.num_alpha < 2:
            raise ValidationError(f"need at least 2 grid points, got {self.num_alpha}")
        if self.transient < 1 or self.samples < 1:
            raise ValidationError("transient and samples must both be >= 1")
        if not self.alpha_min < self.alpha_max:
            raise ValidationError(f"empty alpha range [{self.alpha_min}, {self.alpha_max}]")

    @property
    def alphas(self) -> np.ndarray:
        return np.linspace(self.alpha_min, self.alpha_max, self.num_alpha)


@dataclass(frozen=True)
class LyapunovEstimate:
    lle: float
    iters: int
    transient: int
    renorm_interval: int


class AttractorType(enum.Enum):
    FIXED_POINT = "FixedPoint"
    PERIODIC = "PeriodK"
    APERIODIC = "AperiodicOrQuasiperiodic"
    DIVERGENT = "Divergent"


@dataclass(frozen=True)
class AttractorSummary:
    kind: AttractorType
    period: Optional[int]
    samples: np.ndarray

    @property
    def label(self) -> str:
        if self.kind is AttractorType.PERIODIC:
            return f"Period{self.period}"
        return self.kind.value


def default_initial_history(
    p: MarketParams, d: DelayConfig, perturbation: float = DEFAULT_PERTURBATION
) -> HistoryState:
    """Constant history at the interior equilibrium, public output bumped."""
    point = positive_equilibrium(p).point.copy()
    point[0] += perturbation
    return HistoryState.constant(point, d.tau_max + 1)


def classify_attractor(
    samples,
    tolerance: float = PERIOD_TOL,
    k_max: int = PERIOD_KMAX,
    diverged: bool = False,
) -> AttractorSummary:
    """Type a sampled scalar orbit by minimal-lag recurrence.

    A period k is accepted only if the samples recur within ``tolerance``
    at lag k and at no smaller lag; a lag-1 recurrence that is not an
    outright fixed point indicates unfinished transient drift and is
    reported as aperiodic.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise ValidationError("need at least 2 samples to classify")
    if diverged:
        return AttractorSummary(AttractorType.DIVERGENT, None, samples)
    if samples.max() - samples.min() <= tolerance:
        return AttractorSummary(AttractorType.FIXED_POINT, None, samples)
    top = min(k_max, samples.size - 1)
    for k in range(1, top + 1):
        if np.abs(samples[k:] - samples[:-k]).max() <= tolerance:
            if k == 1:
                break  # drifting, not yet settled
            return AttractorSummary(AttractorType.PERIODIC, k, samples)
    return AttractorSummary(AttractorType.APERIODIC, None, samples)


def _initial_tangent(depth: int, m: int) -> np.ndarray:
    # deterministic direction with unequal components so that every
    # eigendirection of the embedded Jacobian is excited
    flat = 1.0 + 0.5 * np.sin(np.arange(depth * m) + 1.0)
    flat /= np.linalg.norm(flat)
    return flat.reshape(depth, m)


def largest_lyapunov(
    p: MarketParams,
    d: DelayConfig,
    init: HistoryState,
    iters: int = 20000,
    transient: int = 1000,
    renorm_interval: int = 1,
    blowup: float = DEFAULT_BLOWUP,
) -> LyapunovEstimate:
    """Largest Lyapunov exponent in nats per iteration.

    Propagates one tangent window through the exact linearization along
    the orbit (only the public-firm row of the Jacobian depends on the
    state), renormalizing every ``renorm_interval`` steps and averaging
    the logged stretch factors over the ``iters - transient`` measured
    steps.

    Raises DivergenceError if the orbit leaves the blow-up bound.
    """
    if iters <= transient:
        raise ValidationError(f"iters ({iters}) must exceed transient ({transient})")
    if renorm_interval < 1:
        raise ValidationError("renorm_interval must be >= 1")
    from .model import _check_window

    _check_window(init, p, d)

    depth = d.tau_max + 1
    m = p.dimension
    sbuf = np.empty((depth + iters, m))
    sbuf[:depth] = init.window
    vbuf = np.empty((depth + iters, m))
    vbuf[:depth] = _initial_tangent(depth, m)

    a0, a1, b, delta, alpha = p.a0, p.a1, p.b, p.delta, p.alpha
    half_delta = 0.5 * delta
    base = a1 / (2.0 * b)
    l0, l1, l2 = 1 + d.tau0, 1 + d.tau1, 1 + d.tau2

    acc = 0.0
    measured = 0
    since_renorm = 0

    for i in range(1, iters + 1):
        t = depth + i - 1
        q0 = sbuf[t - 1, 0]
        s1 = sbuf[t - l1, 1:].sum()
        sbuf[t, 0] = q0 + alpha * q0 * (a0 - b * q0 - b * delta * s1)
        priv2 = sbuf[t - l2, 1:]
        sbuf[t, 1:] = base - half_delta * sbuf[t - l0, 0] - half_delta * (priv2.sum() - priv2)
        row = sbuf[t]
        if not np.all(np.isfinite(row)) or np.abs(row).max() > blowup:
            raise DivergenceError(
                f"orbit left the blow-up bound at step {i} (|q| > {blowup})"
            )

        u0 = vbuf[t - 1, 0]
        us1 = vbuf[t - l1, 1:].sum()
        vbuf[t, 0] = (1.0 + alpha * (a0 - 2.0 * b * q0 - b * delta * s1)) * u0 - (
            alpha * b * delta * q0
        ) * us1
        upriv2 = vbuf[t - l2, 1:]
        vbuf[t, 1:] = -half_delta * vbuf[t - l0, 0] - half_delta * (upriv2.sum() - upriv2)

        if i == transient:
            # measurement baseline: rescale once without logging
            window = vbuf[t - depth + 1 : t + 1]
            window /= np.linalg.norm(window)
            since_renorm = 0
            continue

        if i < transient:
            if i % 64 == 0:
                window = vbuf[t - depth + 1 : t + 1]
                norm = np.linalg.norm(window)
                if norm < 1.0e-300:
                    raise NumericalError("tangent vector collapsed to zero")
                window /= norm
            continue

        since_renorm += 1
        if since_renorm == renorm_interval or i == iters:
            window = vbuf[t - depth + 1 : t + 1]
            norm = np.linalg.norm(window)
            if norm < 1.0e-300:
                raise NumericalError("tangent vector collapsed to zero")
            acc += math.log(norm)
            measured += since_renorm
            window /= norm
            since_renorm = 0

    return LyapunovEstimate(
        lle=acc / measured,
        iters=iters,
        transient=transient,
        renorm_interval=renorm_interval,
    )


@dataclass(frozen=True)
class DiagramRow:
    """One adjustment-speed cell of a bifurcation diagram."""

    alpha: float
    samples: np.ndarray
    lle: float
    attractor: AttractorSummary
    diverged: bool


def diagram_cell(
    p: MarketParams, d: DelayConfig, spec: SweepSpec, alpha: float, init: HistoryState
) -> tuple[DiagramRow, Optional[HistoryState]]:
    """Compute one diagram row; returns the row and the continuation state."""
    pa = dataclasses.replace(p, alpha=alpha)
    traj = simulate(pa, d, init, spec.transient + spec.samples, blowup=spec.blowup)
    if traj.diverged:
        samples = traj.q0[1:][-spec.samples :]
        row = DiagramRow(
            alpha=alpha,
            samples=samples,
            lle=float("nan"),
            attractor=AttractorSummary(AttractorType.DIVERGENT, None, samples),
            diverged=True,
        )
        return row, None

    samples = traj.q0[-spec.samples :]
    attractor = classify_attractor(samples)
    try:
        lle = largest_lyapunov(
            pa, d, init, iters=spec.lyap_iters, transient=spec.lyap_transient, blowup=spec.blowup
        ).lle
    except DivergenceError:
        lle = float("nan")
    row = DiagramRow(alpha=alpha, samples=samples, lle=lle, attractor=attractor, diverged=False)
    return row, HistoryState(traj.final_window, time=traj.start_time + len(traj) - 1)


def fresh_cell(p: MarketParams, d: DelayConfig, spec: SweepSpec, alpha: float) -> DiagramRow:
    """Self-contained diagram cell under the fresh-perturbed policy."""
    init = default_initial_history(p, d, spec.perturbation)
    row, _ = diagram_cell(p, d, spec, alpha, init)
    return row


def bifurcation_diagram(p: MarketParams, d: DelayConfig, spec: SweepSpec) -> list[DiagramRow]:
    """Sweep the adjustment speed and record post-transient public outputs.

    Under the fresh-perturbed policy every cell restarts from the bumped
    equilibrium; under the continued policy each cell starts from the
    previous cell's final window (restarting fresh after a divergent
    cell).  Rows are always ordered by grid index.
    """
    rows = []
    carried: Optional[HistoryState] = None
    for alpha in spec.alphas:
        if spec.policy is InitPolicy.FRESH_PERTURBED or carried is None:
            init = default_initial_history(p, d, spec.perturbation)
        else:
            init = carried
        row, final = diagram_cell(p, d, spec, float(alpha), init)
        rows.append(row)
        carried = final if spec.policy is InitPolicy.CONTINUED else None
    return rows


@dataclass(frozen=True)
class PhasePortrait:
    """Post-transient (q0, q1) orbit projection."""

    points: np.ndarray
    alpha: float
    diverged: bool


def phase_portrait(
    p: MarketParams, d: DelayConfig, alpha: float, spec: SweepSpec
) -> PhasePortrait:
    """Post-transient (q0(t), q1(t)) pairs at one adjustment speed."""
    pa = dataclasses.replace(p, alpha=alpha)
    init = default_initial_history(pa, d, spec.perturbation)
    traj = simulate(pa, d, init, spec.transient + spec.samples, blowup=spec.blowup)
    if traj.diverged:
        pts = traj.outputs[1:, :2][-spec.samples :]
        return PhasePortrait(points=pts.copy(), alpha=alpha, diverged=True)
    pts = traj.outputs[-spec.samples :, :2]
    return PhasePortrait(points=pts.copy(), alpha=alpha, diverged=False)
