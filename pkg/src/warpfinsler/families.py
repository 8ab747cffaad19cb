"""Constructors for ``phi(z, r)`` and the named metric families.

A :class:`MetricFamily` wraps a *builder* ``builder(z, r, check) -> phi``
written with :mod:`warpfinsler.jets` operations, so the same code returns a
float when handed floats and a jet of all partial derivatives when handed jets.

The families:

``g-family``     phi = h(r)^-2 G(h(r) z)^2
``randers``      phi = (f(r) sqrt(g(r) z^2 + 1) + b z)^2
``gc-family``    the g-family with h = g and G = G_c, a double integral of a kernel
``flat``         phi = G(z)^2, independent of r
``custom``       any user builder
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import jets
from .engine import EvalPoint, metric_matrix
from .errors import ConvexityError, DomainError, WarpFinslerError
from .functions import Constant, DoubleIntegral, JetFunction, as_function
from .jets import R_MAX, Z_MAX, Jet, jet_var_r, jet_var_z

R_MIN_FRACTION = 0.05
KINDS = ("g-family", "randers", "gc-family", "flat", "custom")


@dataclass(frozen=True)
class MetricFamily:
    kind: str
    builder: Callable = field(repr=False)
    params: Mapping = field(default_factory=dict)
    rho: float = 1.0
    r_min: float = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if not self.rho > 0:
            raise DomainError("rho must be positive")
        if self.r_min is None:
            object.__setattr__(self, "r_min", R_MIN_FRACTION * self.rho)
        if not 0 < self.r_min < self.rho:
            raise DomainError(f"need 0 < r_min < rho, got r_min={self.r_min}, rho={self.rho}")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    def check_r(self, r):
        if not self.r_min <= r < self.rho:
            raise DomainError(f"r={r} outside [{self.r_min}, {self.rho})")

    def phi_jet(self, z, r, orders=(Z_MAX, R_MAX), check=True):
        """Jet of phi at ``(z, r)`` truncated at ``orders``."""
        if check:
            self.check_r(r)
        return self.builder(jet_var_z(z, r, orders), jet_var_r(z, r, orders), check)

    def phi(self, z, r, check=True):
        if check:
            self.check_r(r)
        return float(self.builder(float(z), float(r), check))

    def F(self, x, y, check=False):
        """Finsler norm of the tangent vector ``y`` at ``x`` (full (n+1)-vectors)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = float(np.linalg.norm(y[1:]))
        r = float(np.linalg.norm(x[1:]))
        if not 0 < r < self.rho:
            raise DomainError(f"r={r} outside (0, {self.rho})")
        p = self.phi(y[0] / u, r, check)
        if not p > 0:
            raise DomainError(f"phi={p} is not positive")
        return u * math.sqrt(p)

    def F_point(self, point):
        return self.F(point.x, point.y)

    def describe(self):
        out = {"kind": self.kind, "name": self.name, "rho": self.rho, "r_min": self.r_min}
        out.update({k: _describe(v) for k, v in self.params.items()})
        return out


def _describe(v):
    if isinstance(v, Constant):
        return v.c
    if hasattr(v, "name"):
        return v.name
    return v


def _value(x):
    return x.value if isinstance(x, Jet) else float(x)


# -- phi constructors ------------------------------------------------------------

def _g_builder(h, G):
    def build(z, r, check=True):
        hr = h(r)
        if not _value(hr) > 0:
            raise DomainError(f"h(r) = {_value(hr)} must be positive")
        Gt = G(hr * z)
        if check and not _value(Gt) > 0:
            raise DomainError(f"G = {_value(Gt)} must be positive")
        q = Gt / hr
        return q * q
    return build


def _randers_builder(f, g, b):
    def build(z, r, check=True):
        fr, gr, br = f(r), g(r), b(r)
        if check:
            fv, gv, bv = _value(fr), _value(gr), _value(br)
            if not (fv > 0 and gv > 0):
                raise DomainError(f"f={fv}, g={gv} must be positive")
            if not bv * bv < fv * fv * gv:
                raise ConvexityError(f"b^2={bv * bv} >= f^2 g={fv * fv * gv} at r={_value(r)}")
        q = fr * jets.sqrt(gr * z * z + 1.0) + br * z
        return q * q
    return build


def _flat_builder(G):
    def build(z, r, check=True):
        Gz = G(z)
        if check and not _value(Gz) > 0:
            raise DomainError(f"G = {_value(Gz)} must be positive")
        # keep the r-slots of the jet (identically zero) by adding 0 * r
        return Gz * Gz + 0.0 * r
    return build


def phi_g_family(h, G, z, r, orders=(Z_MAX, R_MAX)):
    """Jet of ``h(r)^-2 G(h(r) z)^2`` at (z, r)."""
    return _g_builder(as_function(h), as_function(G))(
        jet_var_z(z, r, orders), jet_var_r(z, r, orders))


def phi_randers(f, g, b, z, r, orders=(Z_MAX, R_MAX)):
    """Jet of ``(f(r) sqrt(g(r) z^2 + 1) + b z)^2``; ``b`` may be a constant or a function of r."""
    return _randers_builder(as_function(f), as_function(g), as_function(b))(
        jet_var_z(z, r, orders), jet_var_r(z, r, orders))


def phi_gc_family(kernel_h, c, g, z, r, orders=(Z_MAX, R_MAX), bound=None):
    """Jet of the g-family with ``h = g`` and ``G = G_c`` built from ``kernel_h``."""
    return phi_g_family(as_function(g), DoubleIntegral(kernel_h, c, bound), z, r, orders)


# -- family factories ------------------------------------------------------------

def g_family(h, G, rho=1.0, r_min=None, name=""):
    h, G = as_function(h), as_function(G)
    return MetricFamily("g-family", _g_builder(h, G), {"h": h, "G": G}, rho, r_min, name)


def randers_family(f, g, b, rho=1.0, r_min=None, name=""):
    f, g, b = as_function(f), as_function(g), as_function(b)
    return MetricFamily("randers", _randers_builder(f, g, b), {"f": f, "g": g, "b": b},
                        rho, r_min, name)


def gc_family(kernel_h, c, g, bound=None, rho=1.0, r_min=None, name=""):
    g = as_function(g)
    Gc = DoubleIntegral(kernel_h, c, bound)
    return MetricFamily("gc-family", _g_builder(g, Gc),
                        {"kernel": Gc.kernel, "c": Gc.c, "g": g, "L": bound}, rho, r_min, name)


def flat_family(G, rho=1.0, r_min=None, name=""):
    G = as_function(G)
    return MetricFamily("flat", _flat_builder(G), {"G": G}, rho, r_min, name)


def custom_family(phi_fn, rho=1.0, r_min=None, name="custom", params=None):
    """Family from ``phi_fn(z, r) -> phi`` written with jet-aware operations."""
    def build(z, r, check=True):
        return phi_fn(z, r)
    return MetricFamily("custom", build, dict(params or {}), rho, r_min, name)


# -- presets ---------------------------------------------------------------------

# g(r) is a free positive function in the example families; this default is a choice.
DEFAULT_G = JetFunction(lambda r: 1.0 + r * r / 4.0, "1+r^2/4")
EXAMPLE_EPSILON = 0.5
EXAMPLE_GAMMA = 0.3


def _perturbed_phi(z, r):
    # Randers-like core with r-dependent drift plus a quartic bump: convex on
    # the unit ball but in none of the Douglas classes.
    core = jets.sqrt((1.0 + r * r) * z * z + 1.0) + 0.25 * r * r * z
    return core * core + 0.1 * r * z * z * z * z / (1.0 + z * z)


def _presets():
    sq = jets.sqrt
    return {
        "euclidean": lambda **kw: flat_family(
            JetFunction(lambda t: sq(t * t + 1.0), "sqrt(t^2+1)"), name="euclidean", **kw),
        "flat": lambda **kw: flat_family(
            JetFunction(lambda t: sq(t * t + 1.0) + 0.3 * t, "sqrt(t^2+1)+0.3t"), name="flat", **kw),
        "g-family": lambda **kw: g_family(
            JetFunction(lambda r: 1.0 + r * r, "1+r^2"),
            JetFunction(lambda t: sq(t * t + 0.5) + 0.3 * t, "sqrt(t^2+0.5)+0.3t"),
            name="g-family", **kw),
        "randers": lambda **kw: randers_family(
            JetFunction(lambda r: 1.0 + r, "1+r"), 2.0, 0.3, name="randers", **kw),
        "example-1": lambda g=DEFAULT_G, **kw: g_family(
            g, JetFunction(lambda t: sq(t * t + EXAMPLE_EPSILON), "sqrt(t^2+eps)"),
            name="example-1", **kw),
        "example-2": lambda g=DEFAULT_G, **kw: g_family(
            g, JetFunction(lambda t: sq(t * t + EXAMPLE_EPSILON) + EXAMPLE_GAMMA * t,
                           "sqrt(t^2+eps)+gamma t"),
            name="example-2", **kw),
        "example-3": lambda g=DEFAULT_G, c=1.0, **kw: gc_family(
            JetFunction(lambda t: 3.0 / jets.power(t * t + 1.0, 2.5), "3/(t^2+1)^(5/2)"),
            c, g, name="example-3", **kw),
        "example-4": lambda g=DEFAULT_G, **kw: g_family(
            g, JetFunction(lambda t: (2.0 * t * t + 1.0) / sq(t * t + 1.0) + 2.0 * t,
                           "(2t^2+1)/sqrt(t^2+1)+2t"),
            name="example-4", **kw),
        "example-5": lambda g=DEFAULT_G, c=1.0, **kw: gc_family(
            JetFunction(lambda t: 1.0 / jets.power(t * t + 1.0, 3), "(t^2+1)^-3"),
            c, g, bound=0.25, name="example-5", **kw),
        "ricci-r2": lambda **kw: g_family(
            JetFunction(lambda r: r * r, "r^2"),
            JetFunction(lambda t: sq(t * t + 1.0), "sqrt(t^2+1)"), name="ricci-r2", **kw),
        "perturbed": lambda **kw: custom_family(_perturbed_phi, name="perturbed", **kw),
    }


PRESET_NAMES = tuple(_presets())
DOUGLAS_PRESETS = ("euclidean", "flat", "g-family", "randers",
                   "example-1", "example-2", "example-3", "example-4", "example-5", "ricci-r2")


def preset(name, **overrides):
    """Build a named preset; keyword overrides go to the family factory."""
    table = _presets()
    if name not in table:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(table)}")
    return table[name](**overrides)


# -- checks ----------------------------------------------------------------------

@dataclass
class ConvexityReport:
    min_omega: float
    min_lambda: float
    ok: bool
    points_checked: int
    failures: list
    first_failing_r: float
    hessian_checks: int
    hessian_agrees: bool

    def as_dict(self):
        return {
            "min_omega": self.min_omega, "min_lambda": self.min_lambda, "ok": self.ok,
            "points_checked": self.points_checked, "failures": len(self.failures),
            "first_failing_r": self.first_failing_r,
            "hessian_checks": self.hessian_checks, "hessian_agrees": self.hessian_agrees,
        }


def default_z_grid(count=61):
    """z = tan(theta) for evenly spaced angles, so steep directions are covered."""
    theta = np.linspace(-0.5 * np.pi, 0.5 * np.pi, count + 2)[1:-1]
    return np.tan(theta)


def default_r_grid(family, count=20):
    return np.linspace(family.r_min, family.rho, count, endpoint=False)


def convexity_check(family, zs=None, rs=None, n=3, hessian_samples=10, seed=0):
    """Scan Omega and Lambda over a (z, r) grid and cross-check a few Hessians."""
    zs = default_z_grid() if zs is None else np.asarray(zs, dtype=float)
    rs = default_r_grid(family) if rs is None else np.asarray(rs, dtype=float)
    min_omega = min_lambda = math.inf
    failures = []
    grid = []
    for r in sorted(rs):
        family.check_r(r)
        for z in zs:
            try:
                phi = family.phi_jet(z, r, (2, 0), check=False)
                p, pz, pzz = phi.value, phi.d(1), phi.d(2)
                omega, lam = 2 * p - z * pz, 2 * p * pzz - pz * pz
            except WarpFinslerError:
                phi, omega, lam = None, -math.inf, -math.inf
            min_omega = min(min_omega, omega)
            min_lambda = min(min_lambda, lam)
            if not (omega > 0 and lam > 0):
                failures.append((float(z), float(r), omega, lam))
            grid.append((z, r, phi, omega, lam))
    rng = np.random.default_rng(seed)
    usable = [g for g in grid if g[2] is not None]
    agree = True
    picks = rng.choice(len(usable), size=min(hessian_samples, len(usable)), replace=False)
    for k in picks:
        z, r, phi, omega, lam = usable[k]
        yhat = rng.normal(size=n)
        yhat /= np.linalg.norm(yhat)
        g = metric_matrix(phi, z, yhat)
        pd = bool(np.linalg.eigvalsh(g).min() > 0)
        agree &= pd == (omega > 0 and lam > 0)
    return ConvexityReport(
        min_omega=float(min_omega), min_lambda=float(min_lambda), ok=not failures,
        points_checked=len(grid), failures=failures,
        first_failing_r=failures[0][1] if failures else None,
        hessian_checks=len(picks), hessian_agrees=bool(agree))


def random_orthogonal(n, rng):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_point(family, n, rng, y0_range=(-2.0, 2.0), u_range=(0.5, 2.0), r_range=None):
    """Uniform sample: direction of xbar on the sphere, r and |ybar| uniform, y0 uniform."""
    lo, hi = r_range or (family.r_min, family.rho)
    xdir = rng.normal(size=n)
    xdir /= np.linalg.norm(xdir)
    ydir = rng.normal(size=n)
    ydir /= np.linalg.norm(ydir)
    r = rng.uniform(lo, hi)
    u = rng.uniform(*u_range)
    return EvalPoint(rng.uniform(-1.0, 1.0), r * xdir, rng.uniform(*y0_range), u * ydir)


def rotation_invariance_check(family, n=3, trials=100, seed=0, orthogonals=None):
    """Max |F(x0, O xbar; y0, O ybar) - F(x, y)| over random points and orthogonal O."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(trials):
        point = random_point(family, n, rng, r_range=(family.r_min, 0.95 * family.rho))
        O = orthogonals[k % len(orthogonals)] if orthogonals is not None else random_orthogonal(n, rng)
        moved = point.transformed(O)
        worst = max(worst, abs(family.F_point(moved) - family.F_point(point)))
    return worst
