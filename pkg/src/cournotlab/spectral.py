"""Characteristic polynomials of the linearized map and closed-form stability tests.

Clearing the negative powers of the characteristic equation multiplies it
by a power of lambda, so every polynomial here may carry exact zero
low-order coefficients.  The corresponding roots at lambda = 0 are kept:
they are genuine eigenvalues of the delay-embedded system, and keeping
them preserves the multiset equivalence with the embedded Jacobian
spectrum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .equilibria import require_assumptions
from .errors import ValidationError
from .model import DelayConfig, MarketParams

ON_CIRCLE_TOL = 1.0e-7


def k_factor(p: MarketParams) -> float:
    """Gain linking the adjustment speed to the reduced polynomial.

    Equals ``b * q0_star``; the coefficient ``eps1`` of the reduced
    polynomial is ``alpha * k_factor - 1``.
    """
    return (p.gamma * p.a0 - p.n * p.delta * p.a1) / (p.gamma - p.n * p.delta**2)


@dataclass(frozen=True)
class EpsilonTriple:
    """Coefficients (eps0, eps1, eps2) of the reduced stability polynomial.

    eps0 = n*delta^2/2 couples the public firm to the symmetric private
    mode, eps2 = (n-1)*delta/2 couples the private firms to each other,
    and eps1 + 1 = alpha * k_factor carries the adjustment speed.
    """

    eps0: float
    eps1: float
    eps2: float


def epsilon_triple(p: MarketParams) -> EpsilonTriple:
    """Reduced-polynomial coefficients for the interior equilibrium.

    Requires A.1 so that eps1 + 1 = alpha * k_factor stays positive.
    """
    require_assumptions(p, which=("A.1",))
    return EpsilonTriple(
        eps0=0.5 * p.n * p.delta**2,
        eps1=p.alpha * k_factor(p) - 1.0,
        eps2=0.5 * (p.n - 1) * p.delta,
    )


class CharPolyKind(enum.Enum):
    REDUCED = "Reduced"
    FULL_POSITIVE = "FullPositive"
    BOUNDARY = "Boundary"
    NO_PUBLIC_FIRM = "NoPublicFirm"


@dataclass(frozen=True)
class CharPoly:
    """Real polynomial with ascending coefficients and its factored form.

    ``factors`` lists (ascending coefficients, multiplicity) pairs whose
    product equals ``coeffs``.  Roots are extracted factor by factor:
    repeated factors would otherwise turn into high-multiplicity roots of
    the expanded polynomial, which companion-matrix solvers can only
    locate to a fractional power of machine precision.
    """

    coeffs: np.ndarray
    kind: CharPolyKind
    delays: DelayConfig
    factors: tuple

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size < 1 or c[-1] == 0.0:
            raise ValidationError("coefficients must be 1-d with a nonzero leading entry")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, lam):
        """Evaluate by Horner's rule; accepts scalars or arrays, real or complex."""
        lam = np.asarray(lam)
        acc = np.zeros_like(lam, dtype=complex)
        for c in self.coeffs[::-1]:
            acc = acc * lam + c
        return acc


def _expand(factors) -> np.ndarray:
    out = np.array([1.0])
    for coeffs, mult in factors:
        for _ in range(mult):
            out = np.convolve(out, coeffs)
    return out


def _shifted_monomial_factor(tau2: int, constant: float) -> np.ndarray:
    # ascending coefficients of lambda^(tau2+1) + constant
    c = np.zeros(tau2 + 2)
    c[0] = constant
    c[-1] = 1.0
    return c


def reduced_char_poly(eps: EpsilonTriple, d: DelayConfig) -> CharPoly:
    """Polynomial governing the interior equilibrium after removing the
    always-stable private difference modes.

    Clearing negative powers of the reduced characteristic equation gives

        eps0*(eps1+1)*lambda^tau2
            - (lambda + eps1) * (lambda^(tau2+1) + eps2) * lambda^(tau0+tau1)

    of degree tau0 + tau1 + tau2 + 2 with leading coefficient -1.
    """
    tau = d.tau_sum
    tau2 = d.tau2
    deg = tau + tau2 + 2
    c = np.zeros(deg + 1)
    c[tau2] += eps.eps0 * (eps.eps1 + 1.0)
    # -(lambda + eps1)(lambda^(tau2+1) + eps2) * lambda^tau
    c[tau + tau2 + 2] -= 1.0
    c[tau + tau2 + 1] -= eps.eps1
    c[tau + 1] -= eps.eps2
    c[tau] -= eps.eps1 * eps.eps2
    return CharPoly(coeffs=c, kind=CharPolyKind.REDUCED, delays=d, factors=((c, 1),))


def full_char_poly(p: MarketParams, d: DelayConfig, which) -> CharPoly:
    """Full characteristic polynomial at the requested equilibrium.

    ``which`` is "positive" or "boundary" (EquilibriumKind values also
    work).  The positive case multiplies the reduced polynomial by the
    private difference-mode factor ``(lambda^(tau2+1) - delta/2)^(n-1)``.
    The boundary case factors completely; its unstable linear factor
    keeps the adjustment-speed term.
    """
    label = getattr(which, "value", which)
    label = str(label).lower()
    diff_factor = _shifted_monomial_factor(d.tau2, -0.5 * p.delta)

    if label == "positive":
        require_assumptions(p)
        reduced = reduced_char_poly(epsilon_triple(p), d)
        factors = ((diff_factor, p.n - 1), (reduced.coeffs, 1))
        kind = CharPolyKind.FULL_POSITIVE
    elif label == "boundary":
        m_gain = (p.gamma * p.a0 - p.n * p.delta * p.a1) / p.gamma
        linear = np.array([-(1.0 + p.alpha * m_gain), 1.0])
        sym_factor = _shifted_monomial_factor(d.tau2, 0.5 * (p.n - 1) * p.delta)
        factors = ((diff_factor, p.n - 1), (linear, 1), (sym_factor, 1))
        kind = CharPolyKind.BOUNDARY
    else:
        raise ValidationError(f"unknown equilibrium selector {which!r}")

    factors = tuple((f, m) for f, m in factors if m > 0)
    return CharPoly(coeffs=_expand(factors), kind=kind, delays=d, factors=factors)


def no_public_firm_char_poly(p: MarketParams, tau2: int) -> CharPoly:
    """Characteristic polynomial of the market without the public firm."""
    if p.n < 2:
        raise ValidationError(f"no-public-firm analysis needs n >= 2, got n={p.n}")
    d = DelayConfig(0, 0, tau2)
    factors = (
        (_shifted_monomial_factor(tau2, -0.5 * p.delta), p.n - 1),
        (_shifted_monomial_factor(tau2, 0.5 * (p.n - 1) * p.delta), 1),
    )
    return CharPoly(
        coeffs=_expand(factors), kind=CharPolyKind.NO_PUBLIC_FIRM, delays=d, factors=factors
    )


class StabilityClass(enum.Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    NON_HYPERBOLIC = "NonHyperbolic"
    UNSTABLE = "Unstable"
    SADDLE = "Saddle"


@dataclass(frozen=True)
class SpectrumReport:
    roots: np.ndarray
    max_modulus: float
    on_circle_count: int
    classification: StabilityClass

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.roots)


def _roots_ascending(coeffs: np.ndarray) -> np.ndarray:
    """All roots of an ascending-coefficient polynomial, zeros included.

    Exact zero low-order coefficients are stripped first and reported as
    roots at the origin; the rest goes through the balanced companion
    matrix (numpy's solver).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        raise ValidationError("zero polynomial has no spectrum")
    zeros_at_origin = nz[0]
    trimmed = coeffs[zeros_at_origin:]
    roots = np.zeros(zeros_at_origin, dtype=complex)
    if trimmed.size > 1:
        roots = np.concatenate([np.roots(trimmed[::-1]), roots])
    return roots


def classify_roots(roots: np.ndarray, tol: float = ON_CIRCLE_TOL) -> SpectrumReport:
    moduli = np.abs(roots)
    max_modulus = float(moduli.max()) if moduli.size else 0.0
    on_circle = int(np.count_nonzero(np.abs(moduli - 1.0) < tol))
    if max_modulus < 1.0 - tol:
        cls = StabilityClass.ASYMPTOTICALLY_STABLE
    elif on_circle > 0:
        cls = StabilityClass.NON_HYPERBOLIC
    elif np.any(moduli < 1.0 - tol):
        cls = StabilityClass.SADDLE
    else:
        cls = StabilityClass.UNSTABLE
    return SpectrumReport(
        roots=np.asarray(roots, dtype=complex),
        max_modulus=max_modulus,
        on_circle_count=on_circle,
        classification=cls,
    )


def poly_roots(cp: CharPoly, tol: float = ON_CIRCLE_TOL) -> SpectrumReport:
    """All roots of a characteristic polynomial with a stability verdict."""
    if cp.degree < 1:
        raise ValidationError("need degree >= 1 to compute a spectrum")
    parts = []
    for coeffs, mult in cp.factors:
        r = _roots_ascending(coeffs)
        for _ in range(mult):
            parts.append(r)
    roots = np.concatenate(parts)
    return classify_roots(roots, tol=tol)


def no_public_firm_spectrum(p: MarketParams, tau2: int) -> SpectrumReport:
    """Spectrum of the reduced market; stable iff (n-1)*delta/2 < 1."""
    return poly_roots(no_public_firm_char_poly(p, tau2))


@dataclass(frozen=True)
class DelayFreeReport:
    """Outcome of the zero-delay stability test with signed margins.

    Stability holds iff eps2 < 1 and
    eps1 < (1 - eps2 - eps0) / (1 - eps2 + eps0); both margins are
    positive exactly when their inequality holds.
    """

    stable: bool
    eps2_margin: float
    eps1_margin: float


def delay_free_stable(eps: EpsilonTriple) -> DelayFreeReport:
    eps2_margin = 1.0 - eps.eps2
    if eps2_margin > 0.0:
        bound = (1.0 - eps.eps2 - eps.eps0) / (1.0 - eps.eps2 + eps.eps0)
        eps1_margin = bound - eps.eps1
    else:
        eps1_margin = -np.inf
    return DelayFreeReport(
        stable=eps2_margin > 0.0 and eps1_margin > 0.0,
        eps2_margin=eps2_margin,
        eps1_margin=eps1_margin,
    )


class DelayIndependentVerdict(enum.Enum):
    APPLICABLE_STABLE = "Applicable+Stable"
    APPLICABLE_UNKNOWN = "Applicable+Unknown"
    NOT_APPLICABLE = "NotApplicable"


def delay_independent_verdict(eps: EpsilonTriple, d: DelayConfig) -> DelayIndependentVerdict:
    """Sufficient delay-independent stability test.

    Applies only when tau2 = 0 or tau0 + tau1 = tau2; in those delay
    patterns the zero-delay region is delay-independent.  The test is
    sufficient only, so a failing margin yields Unknown rather than
    Unstable.
    """
    if not (d.tau2 == 0 or d.tau_sum == d.tau2):
        return DelayIndependentVerdict.NOT_APPLICABLE
    if delay_free_stable(eps).stable:
        return DelayIndependentVerdict.APPLICABLE_STABLE
    return DelayIndependentVerdict.APPLICABLE_UNKNOWN
