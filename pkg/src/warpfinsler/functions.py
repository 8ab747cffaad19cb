"""One-variable functions with analytic derivatives.

These are the building blocks for the warping functions ``h, f, g`` and the
profile ``G`` of a metric family.  Every :class:`ScalarFunction1D` can report
its raw derivatives up to :data:`MAX_ORDER` at a point, and can be applied to a
:class:`~warpfinsler.jets.Jet` by Faa di Bruno composition.
"""

from functools import lru_cache

import numpy as np

from . import jets
from .errors import DomainError, NumericError
from .jets import Jet, jet_compose_univariate

# z-depth 6 plus r-depth 2 of the deepest jets the curvature formulas need.
MAX_ORDER = 8


class ScalarFunction1D:
    """A real function of one variable that knows its own derivatives."""

    name = "f"

    def derivatives(self, t, order=MAX_ORDER):
        """Raw derivatives ``[f(t), f'(t), ..., f^(order)(t)]``."""
        raise NotImplementedError

    def __call__(self, t):
        if isinstance(t, Jet):
            return jet_compose_univariate(self.derivatives(t.value, sum(t.orders)), t)
        return float(self.derivatives(float(t), 0)[0])

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


class JetFunction(ScalarFunction1D):
    """Wraps a Python callable written with :mod:`warpfinsler.jets` functions.

    The callable must accept either a float or a jet, e.g.
    ``lambda t: jets.sqrt(t * t + 0.5) + 0.3 * t``.  Derivatives are exact
    (up to rounding) because they come from jet arithmetic, not differencing.
    """

    def __init__(self, fn, name=None):
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "f")

    def derivatives(self, t, order=MAX_ORDER):
        if order == 0:
            return np.array([float(self.fn(float(t)))])
        x = jets.jet_var_z(float(t), 0.0, (order, 0))
        out = self.fn(x)
        if not isinstance(out, Jet):
            return np.concatenate([[float(out)], np.zeros(order)])
        return out.coeff[:, 0].copy()

    def __call__(self, t):
        return self.fn(t) if isinstance(t, Jet) else float(self.fn(float(t)))


class Constant(ScalarFunction1D):
    def __init__(self, c):
        self.c = float(c)
        self.name = repr(self.c)

    def derivatives(self, t, order=MAX_ORDER):
        out = np.zeros(order + 1)
        out[0] = self.c
        return out

    def __call__(self, t):
        if isinstance(t, Jet):
            return jets.jet_const(self.c, t.z0, t.r0, t.orders)
        return self.c


def as_function(obj, name=None):
    """Coerce a number, callable or expression string to a ScalarFunction1D."""
    if isinstance(obj, ScalarFunction1D):
        return obj
    if isinstance(obj, (int, float, np.floating)):
        return Constant(obj)
    if isinstance(obj, str):
        from .expr import parse_function
        return parse_function(obj)
    if callable(obj):
        return JetFunction(obj, name)
    raise TypeError(f"cannot build a ScalarFunction1D from {obj!r}")


# -- iterated integrals ----------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gauss_legendre(fn, a, b, panels):
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(weights, fn(nodes)))


def adaptive_gauss_legendre(fn, a, b, tol=1e-12, max_panels=1 << 14):
    """Integrate a vectorised ``fn`` over [a, b] by panel doubling.

    Stops once two successive composite estimates agree to ``tol`` (absolute,
    or relative to the estimate when that is larger than one).
    """
    if a == b:
        return 0.0
    panels = 1
    prev = _gauss_legendre(fn, a, b, panels)
    while panels < max_panels:
        panels *= 2
        est = _gauss_legendre(fn, a, b, panels)
        if abs(est - prev) <= tol * max(1.0, abs(est)):
            return est
        prev = est
    raise NumericError(f"quadrature on [{a}, {b}] did not converge to {tol}")


class DoubleIntegral(ScalarFunction1D):
    """``G_c(t) = c + int_0^t int_0^tau k(nu) dnu dtau`` for a positive kernel ``k``.

    The value and first derivative come from quadrature of ``(t - tau) k(tau)``
    and ``k(tau)``; the second and higher derivatives are the kernel's own.
    """

    def __init__(self, kernel, c, bound=None):
        self.kernel = as_function(kernel)
        self.c = float(c)
        self.bound = bound
        if bound is not None and not self.c - bound > 0:
            raise DomainError(f"need c - L > 0, got c={self.c}, L={bound}")
        self.name = f"G_c[{self.kernel.name}, c={self.c}]"

    def _kernel_values(self, ts):
        return np.array([self.kernel(float(x)) for x in np.atleast_1d(ts)])

    @lru_cache(maxsize=4096)
    def _integrals(self, t):
        value = self.c + adaptive_gauss_legendre(
            lambda tau: (t - tau) * self._kernel_values(tau), 0.0, t)
        slope = adaptive_gauss_legendre(self._kernel_values, 0.0, t)
        return value, slope

    def derivatives(self, t, order=MAX_ORDER):
        t = float(t)
        value, slope = self._integrals(t)
        if not value > 0:
            raise DomainError(f"G_c({t}) = {value} is not positive")
        out = [value]
        if order >= 1:
            out.append(slope)
        if order >= 2:
            out.extend(self.kernel.derivatives(t, order - 2))
        return np.array(out[: order + 1])

