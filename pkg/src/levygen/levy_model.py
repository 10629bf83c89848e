"""Levy triplets, built-in process families, and the characteristic exponent.

A process is described by its triplet (A, gamma, measure): diffusion
coefficient, drift, and jump measure. The characteristic exponent

    lambda(z) = A z^2 / 2 - i gamma z
                - integral (e^{i y z} - 1 - i y z 1_{|y| <= 1}) measure(dy)

determines the law of X_t through E exp(i z X_t) = exp(-t lambda(z)).

Conventions fixed here and relied on everywhere else:

* the compensation indicator is closed at the boundary: an atom exactly at
  |y| = 1 belongs to the compensated set;
* measures are densities on R minus {0} plus a finite atom list; purely
  singular-continuous measures are not representable;
* preset measures carry closed forms (tails, kernels, antiderivatives, total
  tail masses, the jump part of the exponent) so downstream discretizations
  never pay nested quadrature for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from ._quadrature import (
    QUAD_ABS_TOL,
    QUAD_REL_TOL,
    norm_cdf,
    norm_pdf,
    quad_strict,
    upper_gamma,
)
from .errors import InvalidMeasureError, NumericalFailureError, ParameterError

__all__ = [
    "ClosedForms",
    "LevyMeasure",
    "LevyTriplet",
    "ProcessPreset",
    "ValidationReport",
    "PRESET_SPECS",
    "make_preset",
    "preset",
    "char_exponent",
    "validate_triplet",
    "stable_sigma_eff",
]


@dataclass(frozen=True)
class ClosedForms:
    """Optional analytic bundle attached to a measure.

    All callables are vectorized over numpy arrays. ``k1_minus``/``k1_plus``
    are antiderivatives of the kernel branches (used for exact cell weights),
    ``tail_mass_left(R)`` is measure((-inf, -R]), ``tail_mass_right(R)`` is
    measure([R, inf)), and ``jump_exponent(z)`` is the density part of
    -integral(e^{iyz} - 1 - iyz 1_{|y|<=1}) measure(dy), so that
    lambda = A z^2/2 - i gamma z + jump_exponent(z) for atom-free measures.
    """

    mu_minus: Callable | None = None
    mu_plus: Callable | None = None
    k_minus: Callable | None = None
    k_plus: Callable | None = None
    k1_minus: Callable | None = None
    k1_plus: Callable | None = None
    tail_mass_left: Callable | None = None
    tail_mass_right: Callable | None = None
    jump_exponent: Callable | None = None
    singular_exponent: float = 0.0


def _default_second_moment(density, atoms):
    """Quadrature fallback for delta -> integral_{|y|<delta} y^2 measure(dy).

    The substitution y = u^2 flattens the admissible power singularity at 0
    (density O(|y|^{-1-rho}), rho < 2 gives an integrand O(u^{3-2 rho})).
    """

    def m2(delta: float) -> float:
        if delta <= 0:
            return 0.0
        total = 0.0
        if density is not None:
            for sgn in (1.0, -1.0):
                def g(u, s=sgn):
                    y = s * u * u
                    return u**4 * density(np.array([y]))[0] * 2 * u
                total += quad_strict(g, 0.0, math.sqrt(delta), epsabs=1e-12)
        total += sum(m * y * y for (y, m) in atoms if abs(y) < delta)
        return total

    return m2


@dataclass(frozen=True)
class LevyMeasure:
    """Jump measure: density on R minus {0} plus finitely many atoms.

    Parameters
    ----------
    density : callable or None
        Vectorized nonnegative jump intensity; None for a purely atomic or
        empty measure.
    atoms : tuple of (location, mass)
        Discrete jumps; locations nonzero, masses positive.
    near_zero_order : float
        rho with density = O(|y|^{-1-rho}) near 0; must satisfy rho < 2.
    second_moment_near_zero : callable, optional
        delta -> integral_{|y|<delta} y^2 measure(dy); a quadrature fallback
        is installed when omitted.
    symmetric : bool
        Marks an even measure (enables cheaper exponent evaluation and the
        sharper Taylor remainder in the jump integrals).
    closed : ClosedForms, optional
        Analytic tails/kernels; presets always provide one.
    """

    density: Callable | None = None
    atoms: tuple[tuple[float, float], ...] = ()
    near_zero_order: float = 0.0
    second_moment_near_zero: Callable | None = None
    symmetric: bool = False
    closed: ClosedForms | None = None
    label: str = "custom"

    def __post_init__(self):
        if not self.near_zero_order < 2.0:
            raise InvalidMeasureError(
                f"near-zero order must satisfy rho < 2, got rho={self.near_zero_order}"
            )
        if self.near_zero_order < 0.0:
            raise InvalidMeasureError("near-zero order must be >= 0")
        for loc, mass in self.atoms:
            if loc == 0.0:
                raise InvalidMeasureError("atom at 0 is not a jump")
            if not mass > 0.0:
                raise InvalidMeasureError(f"atom mass must be positive, got {mass} at {loc}")
        if self.second_moment_near_zero is None:
            object.__setattr__(
                self,
                "second_moment_near_zero",
                _default_second_moment(self.density, self.atoms),
            )

    @property
    def is_empty(self) -> bool:
        return self.density is None and not self.atoms

    def density_at(self, y: np.ndarray) -> np.ndarray:
        """Density evaluated at nonzero points, validated finite and >= 0."""
        y = np.asarray(y, dtype=float)
        if self.density is None:
            return np.zeros_like(y)
        vals = np.asarray(self.density(y), dtype=float)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            raise InvalidMeasureError(
                f"density not finite at x={float(y[bad].ravel()[0]):.6g}"
            )
        neg = vals < 0
        if np.any(neg):
            raise InvalidMeasureError(
                f"density negative at x={float(y[neg].ravel()[0]):.6g}"
            )
        return vals


@dataclass(frozen=True)
class LevyTriplet:
    """Triplet (A, gamma, measure); A >= 0 enforced at construction."""

    A: float
    gamma: float
    measure: LevyMeasure
    preset: "ProcessPreset | None" = None

    def __post_init__(self):
        if not self.A >= 0.0:
            raise ParameterError(f"A must be >= 0, got {self.A}")
        if not math.isfinite(self.gamma):
            raise ParameterError(f"gamma must be finite, got {self.gamma}")


@dataclass(frozen=True)
class ProcessPreset:
    """Name plus parameter assignment for a built-in family."""

    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_triplet."""

    moment_integral: float
    tail_estimate: float
    diffusion_ok: bool
    near_zero_ok: bool
    domain_radius: float
    passed: bool


def stable_sigma_eff(alpha: float, c: float) -> float:
    """Coefficient in lambda_jump(z) = sigma_eff |z|^alpha for the stable density.

    Equals 2c * integral_0^inf (1 - cos u) u^{-1-alpha} du.
    """
    if alpha == 1.0:
        return c * math.pi
    return -2.0 * c * special.gamma(-alpha) * math.cos(math.pi * alpha / 2.0)


# ----------------------------------------------------------------------------
# Preset builders
# ----------------------------------------------------------------------------

def _build_brownian(A: float, gamma: float) -> LevyTriplet:
    measure = LevyMeasure(
        density=None, near_zero_order=0.0, symmetric=True,
        second_moment_near_zero=lambda d: 0.0,
        closed=ClosedForms(
            mu_minus=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            mu_plus=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            k_minus=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            k_plus=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            k1_minus=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
            k1_plus=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
            tail_mass_left=lambda R: 0.0,
            tail_mass_right=lambda R: 0.0,
            jump_exponent=lambda z: np.zeros_like(np.asarray(z, dtype=complex)),
        ),
        label="empty",
    )
    return measure, A, gamma


def _build_cp_gaussian(rate: float, sigma: float):
    r, s = rate, sigma
    Lam = lambda t: t * norm_cdf(t) + norm_pdf(t)
    Lam2 = lambda t: ((t * t + 1.0) * norm_cdf(t) + t * norm_pdf(t)) / 2.0
    lam_m1 = Lam(-1.0 / s)
    closed = ClosedForms(
        mu_minus=lambda x: r * norm_cdf(np.asarray(x, dtype=float) / s),
        mu_plus=lambda x: -r * norm_cdf(-np.asarray(x, dtype=float) / s),
        k_minus=lambda x: r * s * (Lam(np.asarray(x, dtype=float) / s) - lam_m1),
        k_plus=lambda x: r * s * (Lam(-np.asarray(x, dtype=float) / s) - lam_m1),
        k1_minus=lambda u: r * s * s * Lam2(np.asarray(u, dtype=float) / s)
        - r * s * lam_m1 * np.asarray(u, dtype=float),
        k1_plus=lambda u: -r * s * s * Lam2(-np.asarray(u, dtype=float) / s)
        - r * s * lam_m1 * np.asarray(u, dtype=float),
        tail_mass_left=lambda R: float(r * norm_cdf(-R / s)),
        tail_mass_right=lambda R: float(r * norm_cdf(-R / s)),
        jump_exponent=lambda z: r * (1.0 - np.exp(-0.5 * (s * np.asarray(z, dtype=float)) ** 2))
        + 0.0j,
        singular_exponent=0.0,
    )

    def density(y):
        y = np.asarray(y, dtype=float)
        return r * np.exp(-0.5 * (y / s) ** 2) / (s * math.sqrt(2 * math.pi))

    def m2(delta):
        d = delta / s
        return float(r * s * s * (2 * norm_cdf(d) - 1.0 - 2 * d * norm_pdf(d)))

    return LevyMeasure(
        density=density, near_zero_order=0.0, second_moment_near_zero=m2,
        symmetric=True, closed=closed, label="compound_poisson_gaussian",
    )


def _build_cp_bilateral(rate: float, scale: float):
    r, b = rate, scale
    e_m1 = math.exp(-1.0 / b)
    closed = ClosedForms(
        mu_minus=lambda x: (r / 2.0) * np.exp(np.asarray(x, dtype=float) / b),
        mu_plus=lambda x: -(r / 2.0) * np.exp(-np.asarray(x, dtype=float) / b),
        k_minus=lambda x: (r * b / 2.0) * (np.exp(np.asarray(x, dtype=float) / b) - e_m1),
        k_plus=lambda x: (r * b / 2.0) * (np.exp(-np.asarray(x, dtype=float) / b) - e_m1),
        k1_minus=lambda u: (r * b / 2.0)
        * (b * np.exp(np.asarray(u, dtype=float) / b) - e_m1 * np.asarray(u, dtype=float)),
        k1_plus=lambda u: (r * b / 2.0)
        * (-b * np.exp(-np.asarray(u, dtype=float) / b) - e_m1 * np.asarray(u, dtype=float)),
        tail_mass_left=lambda R: float((r / 2.0) * math.exp(-R / b)),
        tail_mass_right=lambda R: float((r / 2.0) * math.exp(-R / b)),
        jump_exponent=lambda z: r
        * (b * np.asarray(z, dtype=float)) ** 2
        / (1.0 + (b * np.asarray(z, dtype=float)) ** 2)
        + 0.0j,
        singular_exponent=0.0,
    )

    def density(y):
        y = np.asarray(y, dtype=float)
        return (r / (2.0 * b)) * np.exp(-np.abs(y) / b)

    def m2(delta):
        d = delta / b
        return float(r * b * b * (2.0 - math.exp(-d) * (d * d + 2 * d + 2.0)))

    return LevyMeasure(
        density=density, near_zero_order=0.0, second_moment_near_zero=m2,
        symmetric=True, closed=closed, label="compound_poisson_bilateral_exponential",
    )


def _build_stable(alpha: float, c: float):
    a, q = alpha, c / alpha
    sig = stable_sigma_eff(alpha, c)

    if a == 1.0:
        k_m = lambda x: -c * np.log(np.abs(np.asarray(x, dtype=float)))
        k_p = lambda x: -c * np.log(np.asarray(x, dtype=float))
        # xlogy gives the continuous extension u log u -> 0 at u = 0
        k1_m = lambda u: -c * (
            special.xlogy(np.asarray(u, dtype=float), np.abs(np.asarray(u, dtype=float)))
            - np.asarray(u, dtype=float)
        )
        k1_p = lambda u: -c * (
            special.xlogy(np.asarray(u, dtype=float), np.asarray(u, dtype=float))
            - np.asarray(u, dtype=float)
        )
    else:
        k_m = lambda x: q * (1.0 - np.abs(np.asarray(x, dtype=float)) ** (1.0 - a)) / (1.0 - a)
        k_p = lambda x: q * (1.0 - np.asarray(x, dtype=float) ** (1.0 - a)) / (1.0 - a)
        k1_m = lambda u: q / (1.0 - a) * (
            np.asarray(u, dtype=float)
            + np.abs(np.asarray(u, dtype=float)) ** (2.0 - a) / (2.0 - a)
        )
        k1_p = lambda u: q / (1.0 - a) * (
            np.asarray(u, dtype=float)
            - np.asarray(u, dtype=float) ** (2.0 - a) / (2.0 - a)
        )

    closed = ClosedForms(
        mu_minus=lambda x: q * np.abs(np.asarray(x, dtype=float)) ** (-a),
        mu_plus=lambda x: -q * np.asarray(x, dtype=float) ** (-a),
        k_minus=k_m, k_plus=k_p, k1_minus=k1_m, k1_plus=k1_p,
        tail_mass_left=lambda R: float(q * R ** (-a)),
        tail_mass_right=lambda R: float(q * R ** (-a)),
        jump_exponent=lambda z: sig * np.abs(np.asarray(z, dtype=float)) ** a + 0.0j,
        singular_exponent=max(0.0, a - 1.0),
    )

    def density(y):
        y = np.asarray(y, dtype=float)
        return c * np.abs(y) ** (-1.0 - a)

    def m2(delta):
        return float(2.0 * c * delta ** (2.0 - a) / (2.0 - a))

    return LevyMeasure(
        density=density, near_zero_order=a, second_moment_near_zero=m2,
        symmetric=True, closed=closed, label="symmetric_alpha_stable",
    )


def _build_tempered(alpha: float, c: float, theta: float):
    a, th = alpha, theta
    Gu = upper_gamma
    G = lambda v: v * Gu(-a, v) - Gu(1.0 - a, v)
    _H0 = float(special.gamma(2.0 - a)) / 2.0

    def H(v):
        # antiderivative helper; continuous extension H(0) = Gamma(2-a)/2
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.full(v.shape, _H0)
        nz = v != 0.0
        vn = v[nz]
        out[nz] = (vn * vn * Gu(-a, vn) + Gu(2.0 - a, vn)) / 2.0 - vn * Gu(1.0 - a, vn)
        return out

    G_th = float(G(np.array(th)))

    def mu_m(x):
        return c * th**a * Gu(-a, th * np.abs(np.asarray(x, dtype=float)))

    def k_m(x):
        return c * th ** (a - 1.0) * (G_th - G(-th * np.asarray(x, dtype=float)))

    def k_p(x):
        return c * th ** (a - 1.0) * (G_th - G(th * np.asarray(x, dtype=float)))

    def k1_m(u):
        u = np.asarray(u, dtype=float)
        return c * th ** (a - 1.0) * (G_th * u + H(-th * u) / th)

    def k1_p(u):
        u = np.asarray(u, dtype=float)
        return c * th ** (a - 1.0) * (G_th * u - H(th * u) / th)

    if a == 1.0:
        jump = None  # Gamma(-1) pole; exponent falls back to quadrature
    else:

        def jump(z):
            z = np.asarray(z, dtype=float)
            val = -c * special.gamma(-a) * (
                (th - 1j * z) ** a + (th + 1j * z) ** a - 2.0 * th**a
            )
            return val

    closed = ClosedForms(
        mu_minus=mu_m,
        mu_plus=lambda x: -mu_m(x),
        k_minus=k_m, k_plus=k_p, k1_minus=k1_m, k1_plus=k1_p,
        tail_mass_left=lambda R: float(c * th**a * Gu(-a, np.array(th * R))),
        tail_mass_right=lambda R: float(c * th**a * Gu(-a, np.array(th * R))),
        jump_exponent=jump,
        singular_exponent=max(0.0, a - 1.0),
    )

    def density(y):
        y = np.asarray(y, dtype=float)
        ay = np.abs(y)
        return c * ay ** (-1.0 - a) * np.exp(-th * ay)

    def m2(delta):
        return float(
            2.0 * c * th ** (a - 2.0)
            * special.gamma(2.0 - a) * special.gammainc(2.0 - a, th * delta)
        )

    return LevyMeasure(
        density=density, near_zero_order=a, second_moment_near_zero=m2,
        symmetric=True, closed=closed, label="tempered_stable",
    )


@dataclass(frozen=True)
class _ParamSpec:
    default: float | None  # None means required
    lo: float
    hi: float
    lo_open: bool
    hi_open: bool

    def check(self, name: str, value: float) -> float:
        value = float(value)
        lo_bad = value <= self.lo if self.lo_open else value < self.lo
        hi_bad = value >= self.hi if self.hi_open else value > self.hi
        if lo_bad or hi_bad or not math.isfinite(value):
            lo_b = "(" if self.lo_open else "["
            hi_b = ")" if self.hi_open else "]"
            lo_s = "-inf" if self.lo == -math.inf else f"{self.lo:g}"
            hi_s = "inf" if self.hi == math.inf else f"{self.hi:g}"
            raise ParameterError(
                f"{name} must lie in {lo_b}{lo_s}, {hi_s}{hi_b}, got {value}"
            )
        return value


_INF = math.inf

PRESET_SPECS: dict[str, dict] = {
    "brownian": {
        "summary": "pure diffusion, optional drift: (A, gamma, empty measure)",
        "params": {
            "A": _ParamSpec(1.0, 0.0, _INF, False, True),
            "gamma": _ParamSpec(0.0, -_INF, _INF, True, True),
        },
        "simulable": True,
    },
    "drift": {
        "summary": "deterministic motion: (0, gamma, empty measure)",
        "params": {"gamma": _ParamSpec(1.0, -_INF, _INF, True, True)},
        "simulable": True,
    },
    "compound_poisson_gaussian": {
        "summary": "rate x standard-normal jumps (optional sigma)",
        "params": {
            "rate": _ParamSpec(1.0, 0.0, _INF, True, True),
            "sigma": _ParamSpec(1.0, 0.0, _INF, True, True),
        },
        "simulable": True,
    },
    "compound_poisson_bilateral_exponential": {
        "summary": "rate x two-sided exponential jumps with given scale",
        "params": {
            "rate": _ParamSpec(1.0, 0.0, _INF, True, True),
            "scale": _ParamSpec(1.0, 0.0, _INF, True, True),
        },
        "simulable": True,
    },
    "symmetric_alpha_stable": {
        "summary": "density c |y|^(-1-alpha), infinite activity",
        "params": {
            "alpha": _ParamSpec(None, 0.0, 2.0, True, True),
            "c": _ParamSpec(1.0, 0.0, _INF, True, True),
        },
        "simulable": True,
    },
    "tempered_stable": {
        "summary": "density c |y|^(-1-alpha) e^(-theta |y|)",
        "params": {
            "alpha": _ParamSpec(None, 0.0, 2.0, True, True),
            "c": _ParamSpec(1.0, 0.0, _INF, True, True),
            "theta": _ParamSpec(None, 0.0, _INF, True, True),
        },
        "simulable": False,
    },
}


def preset_parameters(p: ProcessPreset) -> dict:
    """Validated parameter assignment for a preset, defaults filled in."""
    if p.name not in PRESET_SPECS:
        raise ParameterError(
            f"unknown preset {p.name!r}; available: {', '.join(sorted(PRESET_SPECS))}"
        )
    spec = PRESET_SPECS[p.name]
    for key in p.params:
        if key not in spec["params"]:
            raise ParameterError(f"preset {p.name!r} has no parameter {key!r}")
    vals = {}
    for key, ps in spec["params"].items():
        if key in p.params:
            vals[key] = ps.check(key, p.params[key])
        elif ps.default is None:
            raise ParameterError(f"preset {p.name!r} requires parameter {key!r}")
        else:
            vals[key] = ps.default
    return vals


def make_preset(p: ProcessPreset) -> LevyTriplet:
    """Build the triplet for a preset, validating every parameter's range."""
    vals = preset_parameters(p)

    if p.name == "brownian":
        measure, A, gamma = _build_brownian(vals["A"], vals["gamma"])
        return LevyTriplet(A=A, gamma=gamma, measure=measure, preset=p)
    if p.name == "drift":
        measure, _, _ = _build_brownian(0.0, vals["gamma"])
        return LevyTriplet(A=0.0, gamma=vals["gamma"], measure=measure, preset=p)
    if p.name == "compound_poisson_gaussian":
        m = _build_cp_gaussian(vals["rate"], vals["sigma"])
        return LevyTriplet(A=0.0, gamma=0.0, measure=m, preset=p)
    if p.name == "compound_poisson_bilateral_exponential":
        m = _build_cp_bilateral(vals["rate"], vals["scale"])
        return LevyTriplet(A=0.0, gamma=0.0, measure=m, preset=p)
    if p.name == "symmetric_alpha_stable":
        m = _build_stable(vals["alpha"], vals["c"])
        return LevyTriplet(A=0.0, gamma=0.0, measure=m, preset=p)
    if p.name == "tempered_stable":
        m = _build_tempered(vals["alpha"], vals["c"], vals["theta"])
        return LevyTriplet(A=0.0, gamma=0.0, measure=m, preset=p)
    raise AssertionError("unreachable")


def preset(name: str, **params) -> LevyTriplet:
    """Convenience wrapper: preset('brownian', A=1.0)."""
    return make_preset(ProcessPreset(name, dict(params)))


# ----------------------------------------------------------------------------
# Characteristic exponent
# ----------------------------------------------------------------------------

def _cosm1(x: float) -> float:
    """cos(x) - 1 without cancellation (matters against singular densities)."""
    s = math.sin(0.5 * x)
    return -2.0 * s * s


def _sinmx(x: float) -> float:
    """sin(x) - x with full relative accuracy for small x."""
    if abs(x) < 1e-3:
        x2 = x * x
        return -(x * x2) / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    return math.sin(x) - x


def _jump_exponent_quadrature(m: LevyMeasure, z: float) -> complex:
    """Density part of the jump exponent at scalar z, by adaptive quadrature.

    Splits exactly at the |y| = 1 indicator boundary, uses the second-moment
    Taylor control below delta, and oscillatory-weight quadrature on the tails.
    """
    if z == 0.0:
        return 0.0 + 0.0j
    if m.density is None:
        return 0.0 + 0.0j
    zz = abs(z)
    m2 = m.second_moment_near_zero
    # choose delta so the third-order Taylor remainder is negligible
    delta = 0.5
    target = 1e-13 * max(1.0, zz * zz * m2(1.0))
    for _ in range(60):
        if zz**3 * delta * m2(delta) / 6.0 <= target or delta <= 1e-14:
            break
        delta /= 2.0
    re = -0.5 * zz * zz * m2(delta)  # e^{iyz}-1-iyz ~ -(yz)^2/2 below delta
    im = 0.0
    dens = m.density

    def d1(y):
        return dens(np.array([y]))[0]

    sd = math.sqrt(delta)
    for sgn in (1.0, -1.0):
        # y = u^2 flattens the power singularity at 0
        re += quad_strict(
            lambda u: _cosm1(zz * sgn * u * u) * d1(sgn * u * u) * 2 * u,
            sd, 1.0,
        )
        if not m.symmetric:
            im += quad_strict(
                lambda u: _sinmx(zz * sgn * u * u) * d1(sgn * u * u) * 2 * u,
                sd, 1.0,
            )
        # tails: integral (cos(zy)-1) nu and integral sin(zy) nu over |y|>1
        try:
            cos_part = integrate.quad(
                lambda y: d1(sgn * y), 1.0, np.inf,
                weight="cos", wvar=zz * sgn, epsabs=1e-11, limlst=200,
            )[0]
            mass = quad_strict(lambda y: d1(sgn * y), 1.0, np.inf)
        except Exception as exc:  # pragma: no cover - measure-specific
            raise NumericalFailureError(f"tail quadrature failed: {exc}") from exc
        re += cos_part - mass
        if not m.symmetric:
            im += integrate.quad(
                lambda y: d1(sgn * y), 1.0, np.inf,
                weight="sin", wvar=zz * sgn, epsabs=1e-11, limlst=200,
            )[0]
    val = -(re + 1j * im)  # jump exponent is minus the compensated integral
    if z < 0:
        val = val.conjugate()
    return val


def _atom_exponent(atoms, z):
    """Exact atom contribution; atoms at |y| = 1 are compensated."""
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape, dtype=complex)
    for y, mass in atoms:
        term = np.exp(1j * y * z) - 1.0
        if abs(y) <= 1.0:
            term = term - 1j * y * z
        out += mass * term
    return -out


def char_exponent(t: LevyTriplet, z):
    """lambda(z) for scalar or array z.

    Uses the preset's closed jump exponent when present, otherwise the
    delta-split adaptive quadrature; atoms always enter exactly.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    base = 0.5 * t.A * z_arr**2 - 1j * t.gamma * z_arr
    m = t.measure
    if m.closed is not None and m.closed.jump_exponent is not None:
        jump = np.asarray(m.closed.jump_exponent(z_arr), dtype=complex)
    elif m.density is None:
        jump = np.zeros(z_arr.shape, dtype=complex)
    else:
        jump = np.array([_jump_exponent_quadrature(m, float(zv)) for zv in z_arr])
    if m.atoms:
        jump = jump + _atom_exponent(m.atoms, z_arr)
    out = base + jump
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return complex(out[0])
    return out


def validate_triplet(t: LevyTriplet, domain_radius: float = 50.0) -> ValidationReport:
    """Check the triplet's admissibility numerically on [-R, R].

    Computes integral x^2/(1+x^2) measure(dx) over [-R, R] (atoms included),
    a bound on the mass beyond R, and the A >= 0 / rho < 2 flags.

    Raises
    ------
    InvalidMeasureError
        If a density sample is non-finite or negative (message names the x).
    """
    if not domain_radius > 0:
        raise ParameterError(f"domain_radius must be > 0, got {domain_radius}")
    R = float(domain_radius)
    m = t.measure

    integral = 0.0
    if m.density is not None:
        # probe the density where we will integrate it
        probe = np.concatenate([
            -np.geomspace(1e-9, R, 40), np.geomspace(1e-9, R, 40),
        ])
        m.density_at(probe)
        delta = min(1e-3, R / 2.0)
        integral += m.second_moment_near_zero(delta)  # x^2/(1+x^2) ~ x^2 below delta
        dens = m.density
        for sgn in (1.0, -1.0):
            integral += quad_strict(
                lambda y: y * y / (1.0 + y * y) * dens(np.array([sgn * y]))[0],
                delta, R,
            )
    for y, mass in m.atoms:
        if abs(y) <= R:
            integral += mass * y * y / (1.0 + y * y)

    if m.closed is not None and m.closed.tail_mass_left is not None:
        tail = m.closed.tail_mass_left(R) + m.closed.tail_mass_right(R)
    elif m.density is None:
        tail = 0.0
    else:
        dens = m.density
        tail = sum(
            quad_strict(lambda y: dens(np.array([sgn * y]))[0], R, np.inf)
            for sgn in (1.0, -1.0)
        )
    tail += sum(mass for y, mass in m.atoms if abs(y) > R)

    diffusion_ok = t.A >= 0.0
    near_zero_ok = m.near_zero_order < 2.0
    passed = bool(diffusion_ok and near_zero_ok and np.isfinite(integral))
    return ValidationReport(
        moment_integral=float(integral),
        tail_estimate=float(tail),
        diffusion_ok=diffusion_ok,
        near_zero_ok=near_zero_ok,
        domain_radius=R,
        passed=passed,
    )
