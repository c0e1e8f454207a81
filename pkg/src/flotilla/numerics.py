"""Shared numerical kernels: panel quadrature, spectral differentiation, root finding."""

from __future__ import annotations

import numpy as np

from .errors import AccuracyError, SolverError

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)

MAX_PANELS = 8192


def signed_cbrt(x):
    """Cube root with sign(x)|x|^(1/3) convention, elementwise."""
    return np.sign(x) * np.abs(x) ** (1.0 / 3.0)


def panel_quadrature(f, a, b, rel_tol=1e-12, abs_tol=0.0, initial_panels=4):
    """Integrate a (possibly vector-valued) function over [a, b].

    Composite Gauss-Legendre of order 8 on a uniform panel grid; the panel
    count is doubled until two successive estimates agree to ``rel_tol``
    relative (or ``abs_tol`` absolute, whichever is laxer).

    ``f`` must accept an array of abscissae and return an array whose leading
    axis matches it; trailing axes are integrated componentwise.
    """
    if a == b:
        probe = np.asarray(f(np.array([a])))
        return np.zeros(probe.shape[1:])
    n = initial_panels
    previous = _fixed_gauss(f, a, b, n)
    while n <= MAX_PANELS:
        n *= 2
        current = _fixed_gauss(f, a, b, n)
        err = np.max(np.abs(current - previous))
        scale = np.max(np.abs(current))
        if err <= max(rel_tol * scale, abs_tol):
            return current
        previous = current
    raise AccuracyError(
        f"quadrature on [{a}, {b}] did not converge below rel_tol={rel_tol} "
        f"within {MAX_PANELS} panels (last error {err:.3e})"
    )


def _fixed_gauss(f, a, b, n_panels):
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    # nodes: (n_panels, 8) flattened so f is called once
    nodes = (mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]).ravel()
    values = np.asarray(f(nodes), dtype=float)
    values = values.reshape(n_panels, len(_GAUSS_NODES), *values.shape[1:])
    weights = (half[:, None] * _GAUSS_WEIGHTS[None, :])
    weights = weights.reshape(n_panels, len(_GAUSS_NODES), *([1] * (values.ndim - 2)))
    return np.sum(values * weights, axis=(0, 1))


def periodic_trapezoid(samples, period):
    """Integrate uniform samples of a smooth periodic function over one period.

    Spectrally accurate for smooth periodic integrands.
    """
    samples = np.asarray(samples, dtype=float)
    return samples.mean(axis=0) * period


def spectral_derivative(samples, period, order=1):
    """Differentiate uniform periodic samples via FFT.

    ``samples`` has shape (N,) or (N, k); returns the order-th derivative
    sampled on the same grid.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=1.0 / n) / period
    mult = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[-1] = 0.0  # odd derivative of the Nyquist mode has no real representative
    coeffs = np.fft.rfft(samples, axis=0)
    coeffs = coeffs * mult.reshape(-1, *([1] * (samples.ndim - 1)))
    return np.fft.irfft(coeffs, n=n, axis=0)


class TrigInterpolant:
    """Trigonometric interpolant of uniform periodic samples.

    Evaluates the band-limited interpolant and its derivatives at arbitrary
    parameter values. Samples may be scalar (N,) or vector (N, k).
    """

    def __init__(self, samples, period):
        samples = np.asarray(samples, dtype=float)
        self.period = float(period)
        self.n = samples.shape[0]
        coeffs = np.fft.rfft(samples, axis=0) / self.n
        # real-series weights: DC and Nyquist once, interior modes twice
        weights = np.full(coeffs.shape[0], 2.0)
        weights[0] = 1.0
        if self.n % 2 == 0:
            weights[-1] = 1.0
        self.coeffs = coeffs * weights.reshape(-1, *([1] * (samples.ndim - 1)))
        self.modes = np.arange(coeffs.shape[0])

    def __call__(self, s, order=0):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        phi = np.atleast_1d(s) * (2.0 * np.pi / self.period)
        factor = (1j * self.modes * 2.0 * np.pi / self.period) ** order
        basis = np.exp(1j * np.outer(phi, self.modes)) * factor[None, :]
        out = np.real(np.tensordot(basis, self.coeffs, axes=(1, 0)))
        return out[0] if scalar else out


def bracketed_newton(f, dfdx, lo, hi, x0, f_tol, x_tol=1e-15, max_iter=100):
    """Safeguarded Newton iteration inside a sign-change bracket [lo, hi].

    Falls back to bisection whenever the Newton step leaves the bracket or
    fails to shrink the residual. ``f(lo)`` and ``f(hi)`` must have opposite
    signs; convergence is declared on |f| <= f_tol.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise SolverError(f"no sign change on bracket [{lo}, {hi}]")
    x = np.clip(x0, lo, hi)
    for _ in range(max_iter):
        fx = f(x)
        if abs(fx) <= f_tol:
            return x
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        d = dfdx(x)
        step_ok = d != 0.0 and np.isfinite(d)
        if step_ok:
            x_new = x - fx / d
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= x_tol * max(1.0, abs(x)):
            return x_new
        x = x_new
    raise SolverError(f"Newton iteration did not converge (residual {fx:.3e})")


def expand_bracket(g, center, width, lo_limit, hi_limit, max_expansions=64):
    """Grow [center-width, center+width] geometrically until g changes sign.

    The bracket is clipped to (lo_limit, hi_limit); raises SolverError if no
    sign change is found before the limits are exhausted.
    """
    for _ in range(max_expansions):
        lo = max(center - width, lo_limit)
        hi = min(center + width, hi_limit)
        if g(lo) * g(hi) <= 0.0:
            return lo, hi
        if lo == lo_limit and hi == hi_limit:
            break
        width *= 2.0
    raise SolverError(
        f"no sign change in ({lo_limit}, {hi_limit}) around {center}"
    )
