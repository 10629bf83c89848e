"""Tail integrals of the jump measure and the convolution kernel they induce.

The generator's convolution form rests on two integrated tails

    mu_minus(x) = measure((-inf, x))          for x < 0  (nonnegative),
    mu_plus(x)  = -measure((x, inf))          for x > 0  (nonpositive),

and their once-more-integrated kernels

    k_minus(x) = integral_{-1}^{x} mu_minus(t) dt,
    k_plus(x)  = -integral_{x}^{1} mu_plus(t) dt,

which vanish at -1 and +1 respectively. The assembled kernel adds the drift
part -(c/2) sign(u) with c = gamma - Gamma, Gamma = mu_minus(-1) + mu_plus(1).

Atom convention: the tails are open at their endpoint, so an atom sitting
exactly at x belongs to neither mu_minus(x) nor -mu_plus(x). Under this
convention the drift constant c = gamma - Gamma is exact even when atoms sit
on the compensation boundary |y| = 1. Closed-form bundles attached to preset
measures describe the density part only; atom contributions are added exactly
here (step functions in the tails, ramps in the kernels, piecewise quadratic
antiderivatives in the cell weights).

Numeric fallbacks never nest quadratures for the tails/kernels themselves:
the kernel integrals collapse to single integrals against the density by
switching the order of integration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._quadrature import quad_strict
from .errors import DomainError, KernelIntegrabilityError, NumericalFailureError
from .levy_model import LevyMeasure, LevyTriplet

__all__ = [
    "TailFunction",
    "KernelFunction",
    "AssembledKernel",
    "mu_minus",
    "mu_plus",
    "k_minus",
    "k_plus",
    "gamma_correction",
    "tail_function",
    "kernel_function",
    "assemble_kernel",
    "cell_averaged_weights",
]


@dataclass(frozen=True)
class TailFunction:
    """One integrated tail of a measure: side 'minus' (x<0) or 'plus' (x>0)."""

    side: str
    eval: Callable
    closed_form: bool


@dataclass(frozen=True)
class KernelFunction:
    """One kernel branch; singular_exponent s gives |k(x)| = O(|x|^-s) at 0.

    A measure of near-zero order rho carries s = max(0, rho - 1); the order-1
    case is logarithmic, which is weaker than any power and reported as s = 0.
    """

    side: str
    eval: Callable
    singular_exponent: float


@dataclass(frozen=True)
class AssembledKernel:
    """Kernel of the convolution form: branches plus the sign-kernel drift.

    The full kernel at offset u = y - x is

        k(u) = jump_minus(u) - (c/2) sign(u)   for u < 0,
        k(u) = jump_plus(u)  - (c/2) sign(u)   for u > 0,

    with c = drift_coefficient = gamma - gamma_correction. The source measure
    is retained so cell averaging can use its closed antiderivatives.
    """

    jump_minus: KernelFunction
    jump_plus: KernelFunction
    drift_coefficient: float
    gamma_correction: float
    measure: LevyMeasure

    def total(self, u):
        """Evaluate k(u) elementwise; u must be nonzero."""
        u = np.asarray(u, dtype=float)
        if np.any(u == 0.0):
            raise DomainError("kernel evaluation requires u != 0")
        out = np.empty(u.shape, dtype=float)
        neg = u < 0
        if np.any(neg):
            out[neg] = self.jump_minus.eval(u[neg])
        if np.any(~neg):
            out[~neg] = self.jump_plus.eval(u[~neg])
        return out - 0.5 * self.drift_coefficient * np.sign(u)


def _as_checked(x, side: str, what: str):
    """Coerce to array and enforce the half-line domain of `side`."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if side == "minus":
        if np.any(arr >= 0):
            bad = float(arr[arr >= 0][0])
            raise DomainError(f"{what} requires x < 0, got {bad:.6g}")
    else:
        if np.any(arr <= 0):
            bad = float(arr[arr <= 0][0])
            raise DomainError(f"{what} requires x > 0, got {bad:.6g}")
    return arr, scalar


def _ret(vals: np.ndarray, scalar: bool):
    return float(vals[0]) if scalar else vals


# ----------------------------------------------------------------------------
# Integrated tails
# ----------------------------------------------------------------------------

def _atom_tail_minus(atoms, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for a, m in atoms:
        out += m * (a < x)
    return out


def _atom_tail_plus(atoms, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for a, m in atoms:
        out -= m * (a > x)
    return out


def mu_minus(m: LevyMeasure, x):
    """Lower tail measure((-inf, x)) for x < 0; atoms at x itself excluded."""
    x_arr, scalar = _as_checked(x, "minus", "mu_minus")
    if m.closed is not None and m.closed.mu_minus is not None:
        dens = np.asarray(m.closed.mu_minus(x_arr), dtype=float)
    elif m.density is None:
        dens = np.zeros_like(x_arr)
    else:
        dens = np.array([
            quad_strict(lambda s: m.density_at(np.array([s]))[0], -np.inf, float(xv))
            for xv in x_arr
        ])
    return _ret(dens + _atom_tail_minus(m.atoms, x_arr), scalar)


def mu_plus(m: LevyMeasure, x):
    """Negated upper tail -measure((x, inf)) for x > 0 (nonpositive)."""
    x_arr, scalar = _as_checked(x, "plus", "mu_plus")
    if m.closed is not None and m.closed.mu_plus is not None:
        dens = np.asarray(m.closed.mu_plus(x_arr), dtype=float)
    elif m.density is None:
        dens = np.zeros_like(x_arr)
    else:
        dens = np.array([
            -quad_strict(lambda s: m.density_at(np.array([s]))[0], float(xv), np.inf)
            for xv in x_arr
        ])
    return _ret(dens + _atom_tail_plus(m.atoms, x_arr), scalar)


# ----------------------------------------------------------------------------
# Kernel branches
# ----------------------------------------------------------------------------

def _atom_ramp_minus(atoms, x: np.ndarray) -> np.ndarray:
    """Atom part of k_minus: integral of the tail steps from -1 to x."""
    out = np.zeros_like(x)
    for a, m in atoms:
        out += m * (np.maximum(x - a, 0.0) - max(-1.0 - a, 0.0))
    return out


def _atom_ramp_plus(atoms, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for a, m in atoms:
        out += m * (np.maximum(a - x, 0.0) - max(a - 1.0, 0.0))
    return out


def _k_minus_density(m: LevyMeasure, xv: float) -> float:
    """Density part of k_minus(xv) as a single integral (order switched)."""
    if m.density is None:
        return 0.0
    d1 = lambda s: m.density_at(np.array([s]))[0]
    if xv >= -1.0:
        far = quad_strict(d1, -np.inf, -1.0)
        near = quad_strict(lambda s: d1(s) * (xv - s), -1.0, xv) if xv > -1.0 else 0.0
        return (xv + 1.0) * far + near
    far = quad_strict(d1, -np.inf, xv)
    near = quad_strict(lambda s: d1(s) * (s + 1.0), xv, -1.0)
    return (xv + 1.0) * far + near


def _k_plus_density(m: LevyMeasure, xv: float) -> float:
    if m.density is None:
        return 0.0
    d1 = lambda s: m.density_at(np.array([s]))[0]
    if xv <= 1.0:
        far = quad_strict(d1, 1.0, np.inf)
        near = quad_strict(lambda s: d1(s) * (s - xv), xv, 1.0) if xv < 1.0 else 0.0
        return (1.0 - xv) * far + near
    far = quad_strict(d1, xv, np.inf)
    near = quad_strict(lambda s: d1(s) * (1.0 - s), 1.0, xv)
    return (1.0 - xv) * far + near


def k_minus(m: LevyMeasure, x):
    """Kernel branch integral_{-1}^{x} mu_minus(t) dt for x < 0.

    Nonnegative on [-1, 0), nonpositive for x < -1 (reversed orientation).
    """
    x_arr, scalar = _as_checked(x, "minus", "k_minus")
    if m.closed is not None and m.closed.k_minus is not None:
        dens = np.asarray(m.closed.k_minus(x_arr), dtype=float)
    else:
        dens = np.array([_k_minus_density(m, float(xv)) for xv in x_arr])
    return _ret(dens + _atom_ramp_minus(m.atoms, x_arr), scalar)


def k_plus(m: LevyMeasure, x):
    """Kernel branch -integral_{x}^{1} mu_plus(t) dt for x > 0."""
    x_arr, scalar = _as_checked(x, "plus", "k_plus")
    if m.closed is not None and m.closed.k_plus is not None:
        dens = np.asarray(m.closed.k_plus(x_arr), dtype=float)
    else:
        dens = np.array([_k_plus_density(m, float(xv)) for xv in x_arr])
    return _ret(dens + _atom_ramp_plus(m.atoms, x_arr), scalar)


def gamma_correction(m: LevyMeasure) -> float:
    """Gamma = mu_minus(-1) + mu_plus(1) (slopes of k_minus at -1, k_plus at 1)."""
    return float(mu_minus(m, -1.0) + mu_plus(m, 1.0))


def tail_function(m: LevyMeasure, side: str) -> TailFunction:
    if side not in ("minus", "plus"):
        raise DomainError(f"side must be 'minus' or 'plus', got {side!r}")
    has_closed = m.closed is not None and (
        m.closed.mu_minus if side == "minus" else m.closed.mu_plus
    ) is not None
    fn = (lambda x: mu_minus(m, x)) if side == "minus" else (lambda x: mu_plus(m, x))
    return TailFunction(side=side, eval=fn, closed_form=bool(has_closed or m.density is None))


def kernel_function(m: LevyMeasure, side: str) -> KernelFunction:
    if side not in ("minus", "plus"):
        raise DomainError(f"side must be 'minus' or 'plus', got {side!r}")
    if m.closed is not None:
        s = m.closed.singular_exponent
    else:
        s = max(0.0, m.near_zero_order - 1.0)
    fn = (lambda x: k_minus(m, x)) if side == "minus" else (lambda x: k_plus(m, x))
    return KernelFunction(side=side, eval=fn, singular_exponent=s)


def assemble_kernel(t: LevyTriplet) -> AssembledKernel:
    """Build the convolution kernel of the triplet's generator."""
    gam_corr = gamma_correction(t.measure)
    return AssembledKernel(
        jump_minus=kernel_function(t.measure, "minus"),
        jump_plus=kernel_function(t.measure, "plus"),
        drift_coefficient=t.gamma - gam_corr,
        gamma_correction=gam_corr,
        measure=t.measure,
    )


# ----------------------------------------------------------------------------
# Cell-averaged weights
# ----------------------------------------------------------------------------

def _atom_k1_minus(atoms, u: np.ndarray) -> np.ndarray:
    """Antiderivative of the atom ramps in k_minus (piecewise quadratic)."""
    out = np.zeros_like(u)
    for a, m in atoms:
        out += m * (0.5 * np.maximum(u - a, 0.0) ** 2 - max(-1.0 - a, 0.0) * u)
    return out


def _atom_k1_plus(atoms, u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    for a, m in atoms:
        out += m * (-0.5 * np.maximum(a - u, 0.0) ** 2 - max(a - 1.0, 0.0) * u)
    return out


def _cell_quad(branch_eval, lo: float, hi: float, kinks) -> float:
    """Adaptive integral of a kernel branch over one cell, splitting at kinks."""
    pts = sorted(p for p in kinks if lo < p < hi)
    return quad_strict(branch_eval, lo, hi, epsabs=1e-12, epsrel=1e-9,
                       points=pts or None)


def cell_averaged_weights(kernel: AssembledKernel, grid) -> np.ndarray:
    """Exact cell averages w_j = integral over [(j-1/2)h, (j+1/2)h] of k(u) du.

    Returns the vector for j = -n .. n (length 2n+1, n = grid.n). Closed
    antiderivatives of the measure are differenced when available; otherwise
    each cell is integrated adaptively (absolute tolerance 1e-12 per cell).
    The j = 0 cell integrates both branches across the integrable singularity.

    Raises
    ------
    KernelIntegrabilityError
        If any cell integral is non-finite (local integrability violated).
    """
    h = grid.h
    n = grid.n
    m = kernel.measure
    c = kernel.drift_coefficient
    w = np.zeros(2 * n + 1)

    # breakpoints: cell edges on each half-line, with 0 closing the center cell
    breaks_m = np.append((np.arange(-n, 1) - 0.5) * h, 0.0)
    breaks_p = np.concatenate([[0.0], (np.arange(1, n + 2) - 0.5) * h])

    closed = m.closed
    if closed is not None and closed.k1_minus is not None and closed.k1_plus is not None:
        vm = np.asarray(closed.k1_minus(breaks_m), dtype=float)
        vp = np.asarray(closed.k1_plus(breaks_p), dtype=float)
    else:
        kinks = [a for a, _ in m.atoms] + [-1.0, 1.0]
        # Integrate the density part of each branch: the closed branch when
        # provided (closed forms exclude atoms by convention), the Fubini
        # fallback otherwise.  Atom ramps are folded in analytically below.
        if closed is not None and closed.k_minus is not None:
            dens_m = lambda u: float(np.asarray(closed.k_minus(np.asarray([u])))[0])
        else:
            dens_m = lambda u: _k_minus_density(m, float(u))
        if closed is not None and closed.k_plus is not None:
            dens_p = lambda u: float(np.asarray(closed.k_plus(np.asarray([u])))[0])
        else:
            dens_p = lambda u: _k_plus_density(m, float(u))

        def _checked_cell(branch_eval, lo: float, hi: float) -> float:
            try:
                return _cell_quad(branch_eval, lo, hi, kinks)
            except NumericalFailureError as exc:
                raise KernelIntegrabilityError(
                    f"cell integral over [{lo:.6g}, {hi:.6g}] did not "
                    f"converge (kernel may not be locally integrable): {exc}"
                ) from exc

        vm = np.zeros(len(breaks_m))
        for i in range(1, len(breaks_m)):
            lo, hi = breaks_m[i - 1], breaks_m[i]
            hi_eff = min(hi, -1e-300)  # branch is defined on u < 0 only
            vm[i] = vm[i - 1] + _checked_cell(dens_m, lo, hi_eff)
        vp = np.zeros(len(breaks_p))
        for i in range(1, len(breaks_p)):
            lo, hi = breaks_p[i - 1], breaks_p[i]
            lo_eff = max(lo, 1e-300)
            vp[i] = vp[i - 1] + _checked_cell(dens_p, lo_eff, hi)
        # fold the atoms into the antiderivative arrays only once, below
    vm = vm + _atom_k1_minus(m.atoms, breaks_m)
    vp = vp + _atom_k1_plus(m.atoms, breaks_p)

    dm = np.diff(vm)
    dp = np.diff(vp)
    w[:n] = dm[:n]
    w[n] = dm[n] + dp[0]
    w[n + 1:] = dp[1:]

    # sign-kernel drift: exact cell integrals of -(c/2) sign(u)
    j = np.arange(-n, n + 1)
    w -= 0.5 * c * h * np.sign(j)

    if not np.all(np.isfinite(w)):
        bad = int(j[~np.isfinite(w)][0])
        lo, hi = (bad - 0.5) * h, (bad + 0.5) * h
        raise KernelIntegrabilityError(
            f"cell weight not finite for j={bad}, cell [{lo:.6g}, {hi:.6g}] "
            "(kernel not locally integrable)"
        )
    return w
