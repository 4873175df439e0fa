"""Stability-loss boundaries of the interior equilibrium.

Two routes are provided: closed forms (the flip condition with its four
delay-parity cases and the unit-circle crossing curve for Neimark-Sacker
points) and a purely numerical first-crossing detector that scans the
reduced polynomial's root moduli over the adjustment speed.  The
numerical route defines "stability loss" operationally; the closed forms
are candidates that need not be the first crossing.
"""

from __future__ import annotations

import cmath
import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .equilibria import check_assumptions, require_assumptions
from .errors import (
    DegenerateBoundaryError,
    NoCrossingError,
    NotStableAtStartError,
    NumericalError,
    ValidationError,
)
from .model import DelayConfig, MarketParams
from .spectral import EpsilonTriple, k_factor, reduced_char_poly

FLIP_ANGLE_TOL = 1.0e-3
THETA_MIN = 1.0e-3
NS_RESIDUAL_TOL = 1.0e-8


class BifurcationKind(enum.Enum):
    FLIP = "Flip"
    NEIMARK_SACKER = "NeimarkSacker"


@dataclass(frozen=True)
class ParityCase:
    """Parities of tau0 + tau1 and tau2, which set the flip-condition signs."""

    sum_parity: int
    tau2_parity: int

    @classmethod
    def from_delays(cls, d: DelayConfig) -> "ParityCase":
        return cls(sum_parity=d.tau_sum % 2, tau2_parity=d.tau2 % 2)

    @property
    def sign_sum(self) -> int:
        return -1 if self.sum_parity else 1

    @property
    def sign_tau2(self) -> int:
        return -1 if self.tau2_parity else 1


@dataclass(frozen=True)
class BifurcationPoint:
    alpha_crit: float
    kind: BifurcationKind
    theta: float
    eps1: float
    residual: float


def _residual_on_circle(eps: EpsilonTriple, d: DelayConfig, lam: complex) -> float:
    return float(abs(reduced_char_poly(eps, d)(lam)))


def flip_boundary(p: MarketParams, d: DelayConfig) -> BifurcationPoint:
    """Adjustment speed at which a root of the reduced polynomial sits at -1.

    The critical eps1 is
    ``(1 - eps2*s2 - eps0*s) / (1 - eps2*s2 + eps0*s)`` with
    ``s = (-1)^(tau0+tau1)`` and ``s2 = (-1)^tau2``, converted to alpha
    through the k factor.
    """
    require_assumptions(p, which=("A.1",))
    parity = ParityCase.from_delays(d)
    eps0 = 0.5 * p.n * p.delta**2
    eps2 = 0.5 * (p.n - 1) * p.delta
    s = parity.sign_sum
    s2 = parity.sign_tau2

    denom = 1.0 - eps2 * s2 + eps0 * s
    if abs(denom) < 1.0e-12:
        raise DegenerateBoundaryError(
            f"flip condition degenerate: 1 - eps2*{s2} + eps0*{s} = {denom}"
        )
    eps1 = (1.0 - eps2 * s2 - eps0 * s) / denom
    alpha = (eps1 + 1.0) / k_factor(p)
    if alpha <= 0.0:
        raise NumericalError(
            f"flip condition gives nonpositive adjustment speed alpha = {alpha}"
        )
    residual = _residual_on_circle(EpsilonTriple(eps0, eps1, eps2), d, -1.0 + 0.0j)
    return BifurcationPoint(
        alpha_crit=alpha,
        kind=BifurcationKind.FLIP,
        theta=math.pi,
        eps1=eps1,
        residual=residual,
    )


def _crossing_gain(theta: float, eps0: float, eps2: float, tau: int, tau2: int) -> complex:
    """eps1 that puts e^{i*theta} on the reduced polynomial's root set.

    Derived by solving the reduced characteristic equation for eps1 at
    lambda = e^{i*theta}; the result is real exactly on the crossing
    curve.
    """
    lam = cmath.exp(1j * theta)
    h = cmath.exp(1j * (tau + 1) * theta) + eps2 * cmath.exp(1j * (tau - tau2) * theta)
    denom = eps0 - h
    if abs(denom) < 1.0e-14:
        return complex(np.inf, np.inf)
    return (lam * h - eps0) / denom


def _crossing_angle_equation(
    theta: float, eps0: float, eps2: float, tau: int, tau2: int
) -> float:
    """Real equation whose interior roots are unit-circle crossing angles.

    This is the imaginary part of the eps1 ratio cleared of its positive
    denominator and divided by 2*sin(theta/2), which removes the forced
    zero at theta = 0.  The identity at theta = pi remains (the equation
    is real there), so flips are excluded by the scan window instead.
    """
    return (
        eps0 * math.cos((tau + 1.5) * theta)
        + eps0 * eps2 * math.cos((tau - tau2 + 0.5) * theta)
        - math.cos(0.5 * theta)
        * (1.0 + eps2**2 + 2.0 * eps2 * math.cos((tau2 + 1) * theta))
    )


def ns_boundary(
    p: MarketParams,
    d: DelayConfig,
    scan_points: int = 4096,
    theta_min: float = THETA_MIN,
) -> list[BifurcationPoint]:
    """All interior unit-circle crossings of the reduced polynomial.

    Scans the crossing-angle equation over (theta_min, pi - theta_min),
    bisects each sign change to 1e-10 in theta, recovers the real eps1
    from the crossing gain, converts it to alpha and keeps only points
    with positive alpha whose crossing root verifies against the reduced
    polynomial to 1e-8.  An empty list means no interior crossing exists.
    """
    require_assumptions(p, which=("A.1",))
    eps0 = 0.5 * p.n * p.delta**2
    eps2 = 0.5 * (p.n - 1) * p.delta
    tau = d.tau_sum
    tau2 = d.tau2
    kfac = k_factor(p)

    def f(theta: float) -> float:
        return _crossing_angle_equation(theta, eps0, eps2, tau, tau2)

    grid = np.linspace(theta_min, math.pi - theta_min, scan_points)
    values = np.array([f(t) for t in grid])

    angles = []
    for i in range(scan_points - 1):
        lo, hi = grid[i], grid[i + 1]
        flo, fhi = values[i], values[i + 1]
        if flo == 0.0:
            angles.append(lo)
            continue
        if flo * fhi >= 0.0:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo < 1.0e-10:
                break
            fmid = f(mid)
            if fmid == 0.0:
                lo = hi = mid
                break
            if flo * fmid < 0.0:
                hi, fhi = mid, fmid
            else:
                lo, flo = mid, fmid
        angles.append(0.5 * (lo + hi))
    if values[-1] == 0.0:
        angles.append(grid[-1])

    points = []
    for theta in angles:
        ratio = _crossing_gain(theta, eps0, eps2, tau, tau2)
        if not np.isfinite(ratio.real) or abs(ratio.imag) > NS_RESIDUAL_TOL:
            continue
        eps1 = ratio.real
        alpha = (eps1 + 1.0) / kfac
        if alpha <= 0.0:
            continue
        lam = cmath.exp(1j * theta)
        residual = _residual_on_circle(EpsilonTriple(eps0, eps1, eps2), d, lam)
        if residual > NS_RESIDUAL_TOL:
            continue
        points.append(
            BifurcationPoint(
                alpha_crit=alpha,
                kind=BifurcationKind.NEIMARK_SACKER,
                theta=theta,
                eps1=eps1,
                residual=residual,
            )
        )
    points.sort(key=lambda pt: pt.theta)
    return points


def _max_modulus(eps0: float, eps2: float, eps1: float, d: DelayConfig) -> tuple[float, complex]:
    eps = EpsilonTriple(eps0, eps1, eps2)
    cp = reduced_char_poly(eps, d)
    roots = np.roots(cp.coeffs[::-1])
    moduli = np.abs(roots)
    idx = int(np.argmax(moduli))
    return float(moduli[idx]), complex(roots[idx])


def critical_alpha(
    p: MarketParams,
    d: DelayConfig,
    alpha_range: tuple[float, float],
    coarse_points: int = 200,
    alpha_tol: float = 1.0e-4,
) -> BifurcationPoint:
    """First loss of stability of the interior equilibrium over an alpha bracket.

    Scans the maximal root modulus of the reduced polynomial on a coarse
    alpha grid, then bisects the first crossing of modulus one down to
    ``alpha_tol``.  The kind is read off the crossing root's angle: within
    1e-3 of pi it is a flip, otherwise a Neimark-Sacker crossing.
    """
    require_assumptions(p, which=("A.1",))
    alpha_lo, alpha_hi = alpha_range
    if not alpha_lo < alpha_hi:
        raise ValidationError(f"empty alpha bracket {alpha_range}")
    eps0 = 0.5 * p.n * p.delta**2
    eps2 = 0.5 * (p.n - 1) * p.delta
    kfac = k_factor(p)

    def modulus_at(alpha: float) -> tuple[float, complex]:
        return _max_modulus(eps0, eps2, alpha * kfac - 1.0, d)

    grid = np.linspace(alpha_lo, alpha_hi, coarse_points)
    m0, _ = modulus_at(grid[0])
    if m0 >= 1.0:
        raise NotStableAtStartError(
            f"max root modulus {m0:.6f} >= 1 at the bracket start alpha = {grid[0]}"
        )
    crossing_idx = None
    for i in range(1, coarse_points):
        m, _ = modulus_at(grid[i])
        if m >= 1.0:
            crossing_idx = i
            break
    if crossing_idx is None:
        raise NoCrossingError(
            f"no modulus-1 crossing of the reduced polynomial in alpha bracket {alpha_range}"
        )

    lo, hi = float(grid[crossing_idx - 1]), float(grid[crossing_idx])
    while hi - lo > alpha_tol:
        mid = 0.5 * (lo + hi)
        m, _ = modulus_at(mid)
        if m >= 1.0:
            hi = mid
        else:
            lo = mid
    alpha_c = 0.5 * (lo + hi)
    _, root = modulus_at(alpha_c)
    theta = abs(cmath.phase(root))
    kind = (
        BifurcationKind.FLIP
        if abs(theta - math.pi) < FLIP_ANGLE_TOL
        else BifurcationKind.NEIMARK_SACKER
    )
    eps1 = alpha_c * kfac - 1.0
    residual = _residual_on_circle(EpsilonTriple(eps0, eps1, eps2), d, root)
    return BifurcationPoint(
        alpha_crit=alpha_c, kind=kind, theta=theta, eps1=eps1, residual=residual
    )


@dataclass(frozen=True)
class StabilityRegionRow:
    """One product-differentiation sample of the delay-independent region."""

    delta: float
    alpha_max: float
    feasible: bool
    a1_holds: bool
    a2_holds: bool


def stability_region(p: MarketParams, delta_grid, n: int | None = None) -> list[StabilityRegionRow]:
    """Upper stability boundary alpha_max(delta) of the zero-delay region.

    For each delta the boundary is ``(1 + eps1_bound) / k_factor`` where
    eps1_bound is the zero-delay stability limit; rows where eps2 >= 1 or
    a positivity assumption fails carry alpha_max = nan and a false
    feasibility flag.
    """
    n = p.n if n is None else n
    rows = []
    for delta in np.asarray(delta_grid, dtype=float):
        if not 0.0 < delta < 1.0:
            raise ValidationError(f"delta grid value {delta} outside (0, 1)")
        q = dataclasses.replace(p, delta=float(delta), n=n)
        report = check_assumptions(q)
        eps0 = 0.5 * q.n * q.delta**2
        eps2 = 0.5 * (q.n - 1) * q.delta
        feasible = report.a1_holds and report.a2_holds and eps2 < 1.0
        if feasible:
            bound = (1.0 - eps2 - eps0) / (1.0 - eps2 + eps0)
            alpha_max = (1.0 + bound) / k_factor(q)
        else:
            alpha_max = float("nan")
        rows.append(
            StabilityRegionRow(
                delta=float(delta),
                alpha_max=alpha_max,
                feasible=feasible,
                a1_holds=report.a1_holds,
                a2_holds=report.a2_holds,
            )
        )
    return rows
