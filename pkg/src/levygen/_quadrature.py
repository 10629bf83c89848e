"""Quadrature helpers shared by the model, kernel and operator modules.

Two layers live here:

* a strict wrapper around scipy's adaptive Gauss-Kronrod integrator that turns
  silent convergence warnings into :class:`NumericalFailureError`;
* fixed Gauss-Legendre panel rules used where thousands of integrals share the
  same nodes (jump integrals evaluated at every grid node at once).

Also hosts the upper incomplete gamma for arbitrary real parameter, needed by
the tempered-stable closed forms (scipy only covers positive parameters).
"""

from __future__ import annotations

import warnings
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special

from .errors import NumericalFailureError

# Defaults of the adaptive scheme: absolute 1e-10, relative 1e-8.
QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-8


def quad_strict(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    epsabs: float = QUAD_ABS_TOL,
    epsrel: float = QUAD_REL_TOL,
    limit: int = 300,
    points=None,
) -> float:
    """Adaptive quadrature that raises instead of silently under-delivering.

    Raises
    ------
    NumericalFailureError
        If the reported error estimate exceeds 50x the requested tolerance;
        the message carries the achieved absolute error.
    """
    kw = {"epsabs": epsabs, "epsrel": epsrel, "limit": limit}
    if points is not None and np.isfinite(a) and np.isfinite(b):
        kw["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, abserr = integrate.quad(f, a, b, **kw)
    allowed = 50.0 * max(epsabs, epsrel * abs(val))
    if not np.isfinite(val) or abserr > allowed:
        raise NumericalFailureError(
            f"quadrature on [{a}, {b}] achieved abs error {abserr:.3e} "
            f"(requested epsabs={epsabs:.1e}, epsrel={epsrel:.1e})"
        )
    return val


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = leggauss(order)
    return _GL_CACHE[order]


def gl_panels(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on a sequence of panels.

    Parameters
    ----------
    edges : increasing array of panel boundaries, length m+1.
    order : nodes per panel.

    Returns
    -------
    nodes, weights : flat arrays of length m*order; sum(weights * g(nodes))
        approximates the integral of g over [edges[0], edges[-1]].
    """
    xs, ws = _gl_rule(order)
    a = np.asarray(edges[:-1], dtype=float)
    b = np.asarray(edges[1:], dtype=float)
    mid = 0.5 * (a + b)[:, None]
    rad = 0.5 * (b - a)[:, None]
    return (mid + rad * xs[None, :]).ravel(), (rad * ws[None, :]).ravel()


def dyadic_edges(lo: float, hi: float) -> np.ndarray:
    """Panel edges lo, 2lo, 4lo, ... capped at hi (geometric refinement at lo)."""
    edges = [lo]
    while edges[-1] < hi:
        edges.append(min(hi, edges[-1] * 2.0))
    return np.array(edges)


def uniform_edges(lo: float, hi: float, max_width: float) -> np.ndarray:
    m = max(1, int(np.ceil((hi - lo) / max_width)))
    return np.linspace(lo, hi, m + 1)


def upper_gamma(a: float, v: np.ndarray | float) -> np.ndarray | float:
    """Upper incomplete gamma integral_v^inf s^(a-1) e^(-s) ds for any real a, v > 0.

    scipy covers a > 0; nonpositive a is reached by the downward recurrence
    G(a, v) = (G(a+1, v) - v^a e^(-v)) / a, which is numerically benign here:
    for small v the subtrahend dominates (no cancellation) and for large v the
    absolute values are below any scale of interest.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        raise ValueError("upper_gamma requires v > 0")
    steps = 0
    aa = float(a)
    while aa <= 0.0:
        aa += 1.0
        steps += 1
    g = special.gamma(aa) * special.gammaincc(aa, v)
    for _ in range(steps):
        aa -= 1.0
        if aa == 0.0:
            g = special.exp1(v)
        else:
            g = (g - v**aa * np.exp(-v)) / aa
    return g


def norm_cdf(x):
    return special.ndtr(np.asarray(x, dtype=float))


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
