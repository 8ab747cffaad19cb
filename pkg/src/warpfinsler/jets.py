"""Truncated bivariate Taylor jets in the variables (z, r).

A :class:`Jet` stores the raw partial derivatives ``d^i/dz^i d^j/dr^j f`` of a
scalar ``f`` at an expansion point ``(z0, r0)`` for ``0 <= i <= nz`` and
``0 <= j <= nr``.  Coefficients are *not* divided by factorials, so
``jet.coeff[2, 1]`` is literally ``f_zzr``.  Products follow the Leibniz rule;
internally this is carried out as a convolution of factorial-normalised
coefficients, which is the same thing with the binomial weights folded in.

Jets of different truncation orders may be combined; the result is truncated
to the smaller order in each variable.  Jets expanded at different points may
not, and doing so raises :class:`ExpansionPointMismatch`.

The module-level functions (:func:`sqrt`, :func:`exp`, :func:`arctan`, ...)
accept either jets or plain floats, so the same Python function can be used to
evaluate a metric and to differentiate it.
"""

import math
from functools import lru_cache

import numpy as np

from .errors import ExpansionPointMismatch, JetDomainError, SingularJetError

Z_MAX = 6
R_MAX = 2
EPS_DIV = 1e-12

__all__ = [
    "Z_MAX", "R_MAX", "EPS_DIV", "Jet",
    "jet_const", "jet_var_z", "jet_var_r",
    "jet_add", "jet_sub", "jet_neg", "jet_mul", "jet_div",
    "jet_sqrt", "jet_powi", "jet_compose_univariate",
    "sqrt", "exp", "log", "arctan", "sin", "cos", "power",
]


@lru_cache(maxsize=None)
def _factorial_grid(nz, nr):
    fz = np.array([math.factorial(i) for i in range(nz + 1)], dtype=float)
    fr = np.array([math.factorial(j) for j in range(nr + 1)], dtype=float)
    grid = np.outer(fz, fr)
    grid.flags.writeable = False
    return grid


def _mul_normalized(a, b):
    nz, nr = a.shape[0] - 1, a.shape[1] - 1
    out = np.zeros_like(a)
    for j1 in range(nr + 1):
        for j2 in range(nr + 1 - j1):
            out[:, j1 + j2] += np.convolve(a[:, j1], b[:, j2])[: nz + 1]
    return out


class Jet:
    """Raw-derivative Taylor jet of a scalar function of (z, r)."""

    __slots__ = ("coeff", "z0", "r0")
    __array_priority__ = 1000

    def __init__(self, coeff, z0, r0):
        coeff = np.array(coeff, dtype=float, ndmin=2)
        if coeff.ndim != 2:
            raise ValueError("jet coefficients must form a 2-d array")
        self.coeff = coeff
        self.z0 = float(z0)
        self.r0 = float(r0)

    # -- inspection ---------------------------------------------------------
    @property
    def orders(self):
        return self.coeff.shape[0] - 1, self.coeff.shape[1] - 1

    @property
    def value(self):
        return float(self.coeff[0, 0])

    def d(self, i=0, j=0):
        """Raw partial derivative d^i/dz^i d^j/dr^j at the expansion point."""
        nz, nr = self.orders
        if i > nz or j > nr:
            raise IndexError(f"derivative ({i}, {j}) beyond truncation order {self.orders}")
        return float(self.coeff[i, j])

    def dz(self, k=1):
        """Jet of the k-th z-derivative (one order shallower per derivative)."""
        if k > self.orders[0]:
            raise IndexError("z-derivative beyond truncation order")
        return Jet(self.coeff[k:, :], self.z0, self.r0)

    def dr(self, k=1):
        """Jet of the k-th r-derivative."""
        if k > self.orders[1]:
            raise IndexError("r-derivative beyond truncation order")
        return Jet(self.coeff[:, k:], self.z0, self.r0)

    def truncate(self, nz, nr):
        return Jet(self.coeff[: nz + 1, : nr + 1], self.z0, self.r0)

    def normalized(self):
        """Taylor coefficients ``f_{ij} / (i! j!)``."""
        return self.coeff / _factorial_grid(*self.orders)

    @classmethod
    def from_normalized(cls, taylor, z0, r0):
        taylor = np.asarray(taylor, dtype=float)
        return cls(taylor * _factorial_grid(taylor.shape[0] - 1, taylor.shape[1] - 1), z0, r0)

    def __repr__(self):
        return f"Jet(value={self.value!r}, orders={self.orders}, at=({self.z0}, {self.r0}))"

    # -- binary helpers -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.z0 != self.z0 or other.r0 != self.r0:
                raise ExpansionPointMismatch(
                    f"jets expanded at ({self.z0}, {self.r0}) and ({other.z0}, {other.r0})")
            nz = min(self.orders[0], other.orders[0])
            nr = min(self.orders[1], other.orders[1])
            return self.coeff[: nz + 1, : nr + 1], other.coeff[: nz + 1, : nr + 1]
        c = np.zeros_like(self.coeff)
        c[0, 0] = float(other)
        return self.coeff, c

    def _new(self, coeff):
        return Jet(coeff, self.z0, self.r0)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b = self._coerce(other)
        return self._new(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return self._new(a - b)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return self._new(b - a)

    def __neg__(self):
        return self._new(-self.coeff)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._new(self.coeff * float(other))
        a, b = self._coerce(other)
        grid = _factorial_grid(a.shape[0] - 1, a.shape[1] - 1)
        return self._new(_mul_normalized(a / grid, b / grid) * grid)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = float(other)
            if abs(other) <= EPS_DIV:
                raise SingularJetError(other)
            return self._new(self.coeff / other)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * float(other)

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)):
            return jet_powi(self, int(k))
        return power(self, float(k))


# -- constructors -------------------------------------------------------------

def jet_const(c, z0, r0, orders=(Z_MAX, R_MAX)):
    coeff = np.zeros((orders[0] + 1, orders[1] + 1))
    coeff[0, 0] = c
    return Jet(coeff, z0, r0)


def jet_var_z(z0, r0, orders=(Z_MAX, R_MAX)):
    jet = jet_const(z0, z0, r0, orders)
    if orders[0] >= 1:
        jet.coeff[1, 0] = 1.0
    return jet


def jet_var_r(z0, r0, orders=(Z_MAX, R_MAX)):
    jet = jet_const(r0, z0, r0, orders)
    if orders[1] >= 1:
        jet.coeff[0, 1] = 1.0
    return jet


def jet_add(a, b):
    return a + b


def jet_sub(a, b):
    return a - b


def jet_neg(a):
    return -a


def jet_mul(a, b):
    return a * b


def jet_div(a, b):
    return a / b


# -- composition ----------------------------------------------------------------

def jet_compose_univariate(g, a):
    """Jet of ``g(a)`` given the raw derivatives ``g, g', g'', ...`` at ``a.value``.

    ``g`` must hold at least ``nz + nr + 1`` entries for a jet of orders
    ``(nz, nr)``; the inner increment has no constant term, so higher powers
    of it vanish under truncation.
    """
    nz, nr = a.orders
    order = nz + nr
    g = np.asarray(g, dtype=float)
    if g.shape[0] < order + 1:
        raise ValueError(f"need {order + 1} derivatives of the outer function, got {g.shape[0]}")
    taylor = g[: order + 1] / np.array([math.factorial(k) for k in range(order + 1)])
    grid = _factorial_grid(nz, nr)
    delta = a.coeff / grid
    delta[0, 0] = 0.0
    acc = np.zeros_like(delta)
    acc[0, 0] = taylor[order]
    for k in range(order - 1, -1, -1):
        acc = _mul_normalized(acc, delta)
        acc[0, 0] += taylor[k]
    return Jet(acc * grid, a.z0, a.r0)


def _falling(p, k):
    out = 1.0
    for m in range(k):
        out *= p - m
    return out


def _power_derivatives(x, p, order):
    return np.array([_falling(p, k) * x ** (p - k) for k in range(order + 1)])


def _order(a):
    return sum(a.orders)


def reciprocal(b):
    x = b.value
    if abs(x) <= EPS_DIV:
        raise SingularJetError(x)
    order = _order(b)
    derivs = np.array([(-1) ** k * math.factorial(k) / x ** (k + 1) for k in range(order + 1)])
    return jet_compose_univariate(derivs, b)


def jet_sqrt(a):
    x = a.value
    if not x > 0.0:
        raise JetDomainError(f"sqrt of jet with constant term {x!r}")
    return jet_compose_univariate(_power_derivatives(x, 0.5, _order(a)), a)


def jet_powi(a, k):
    k = int(k)
    if k < 0:
        return reciprocal(jet_powi(a, -k))
    result = jet_const(1.0, a.z0, a.r0, a.orders)
    base = a
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


# -- elementary functions on jets or floats --------------------------------------

def _univariate_series(fn, x, order):
    """Raw derivatives of ``fn`` at ``x`` obtained by evaluating it on a 1-d jet."""
    t = jet_var_z(x, 0.0, (order, 0))
    return fn(t).coeff[:, 0]


def sqrt(a):
    if isinstance(a, Jet):
        return jet_sqrt(a)
    if a < 0:
        raise JetDomainError(f"sqrt of {a!r}")
    return math.sqrt(a)


def power(a, p):
    if isinstance(a, Jet):
        if float(p).is_integer():
            return jet_powi(a, int(p))
        if not a.value > 0:
            raise JetDomainError(f"non-integer power of jet with constant term {a.value!r}")
        return jet_compose_univariate(_power_derivatives(a.value, p, _order(a)), a)
    if a < 0 and not float(p).is_integer():
        raise JetDomainError(f"non-integer power of {a!r}")
    return a ** p


def exp(a):
    if isinstance(a, Jet):
        return jet_compose_univariate(np.full(_order(a) + 1, math.exp(a.value)), a)
    return math.exp(a)


def log(a):
    if isinstance(a, Jet):
        x = a.value
        if not x > 0:
            raise JetDomainError(f"log of jet with constant term {x!r}")
        order = _order(a)
        derivs = [math.log(x)] + [(-1) ** (k - 1) * math.factorial(k - 1) / x ** k
                                  for k in range(1, order + 1)]
        return jet_compose_univariate(derivs, a)
    if a <= 0:
        raise JetDomainError(f"log of {a!r}")
    return math.log(a)


def arctan(a):
    if isinstance(a, Jet):
        x = a.value
        order = _order(a)
        derivs = np.empty(order + 1)
        derivs[0] = math.atan(x)
        if order:
            derivs[1:] = _univariate_series(lambda t: 1.0 / (1.0 + t * t), x, order - 1)
        return jet_compose_univariate(derivs, a)
    return math.atan(a)


def sin(a):
    if isinstance(a, Jet):
        s, c = math.sin(a.value), math.cos(a.value)
        cycle = (s, c, -s, -c)
        return jet_compose_univariate([cycle[k % 4] for k in range(_order(a) + 1)], a)
    return math.sin(a)


def cos(a):
    if isinstance(a, Jet):
        s, c = math.sin(a.value), math.cos(a.value)
        cycle = (c, -s, -c, s)
        return jet_compose_univariate([cycle[k % 4] for k in range(_order(a) + 1)], a)
    return math.cos(a)
