"""Finite-difference reference values, independent of the closed forms.

Every oracle differentiates either ``F`` itself or, for third derivatives, the
closed-form spray (differencing ``F^2`` five times deep is hopeless in double
precision).  Central differences are Richardson-extrapolated over step halving.

Steps scale with the point: ``h_y * |ybar|`` in y, ``h_x * max(r, 1)`` in x.
Third derivatives use their own, larger relative step ``h_y3`` because the
rounding error of a third difference grows like ``eps / h^3``.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .engine import EvalPoint, derived_scalars, spray, spray_divergence
from .errors import NumericError


@dataclass(frozen=True)
class FDConfig:
    h_y: float = 1e-3
    h_x: float = 1e-3
    h_y3: float = 5e-3
    richardson_levels: int = 2

    def __post_init__(self):
        if min(self.h_y, self.h_x, self.h_y3) <= 0:
            raise ValueError("finite-difference steps must be positive")
        if self.richardson_levels < 1:
            raise ValueError("richardson_levels must be >= 1")


def richardson(estimate, h, levels):
    """Extrapolate ``estimate(h)`` whose error expands in even powers of h."""
    table = [np.asarray(estimate(h / 2 ** k), dtype=float) for k in range(levels)]
    for m in range(1, levels):
        factor = 4.0 ** m
        table = [(factor * table[k + 1] - table[k]) / (factor - 1) for k in range(len(table) - 1)]
    return table[0]


def _x_step(family, point, cfg, clearance=4):
    """x step, halved until ``clearance`` steps stay inside the punctured ball."""
    h = cfg.h_x * max(point.r, 1.0)
    for _ in range(8):
        if point.r - clearance * h > 0 and point.r + clearance * h < family.rho:
            return h
        h /= 2
    raise NumericError(f"point r={point.r} too close to the domain boundary for x-differences")


def _y_step(point, rel, clearance=4):
    h = rel * point.u
    if point.u <= clearance * h:
        raise NumericError("|ybar| too small for y-differences")
    return h


def _validate(family, point):
    family.check_r(point.r)


def hessian_fd(family, point, cfg=None):
    """``g_AB = 1/2 [F^2]_{y^A y^B}`` by central second differences."""
    cfg = cfg or FDConfig()
    _validate(family, point)
    x, y = point.x, point.y
    m = y.size
    E = np.eye(m)

    def half_sq(yy):
        return 0.5 * family.F(x, yy) ** 2

    def estimate(h):
        out = np.empty((m, m))
        f0 = half_sq(y)
        for a in range(m):
            out[a, a] = (half_sq(y + h * E[a]) - 2 * f0 + half_sq(y - h * E[a])) / h ** 2
            for b in range(a + 1, m):
                out[a, b] = out[b, a] = (
                    half_sq(y + h * E[a] + h * E[b]) - half_sq(y + h * E[a] - h * E[b])
                    - half_sq(y - h * E[a] + h * E[b]) + half_sq(y - h * E[a] - h * E[b])
                ) / (4 * h * h)
        return out

    return richardson(estimate, _y_step(point, cfg.h_y), cfg.richardson_levels)


def _sq(family, x, y):
    return family.F(x, y) ** 2


def spray_fd(family, point, cfg=None):
    """``G^C = 1/4 g^{CA} ([F^2]_{y^A x^B} y^B - [F^2]_{x^A})`` by differences of F.

    The inverse metric is the numerical inverse of :func:`hessian_fd`.
    """
    cfg = cfg or FDConfig()
    g = hessian_fd(family, point, cfg)
    x, y = point.x, point.y
    m = y.size
    E = np.eye(m)
    hx = _x_step(family, point, cfg)
    hy = _y_step(point, cfg.h_y)
    ydir = y / np.linalg.norm(y)
    ynorm = np.linalg.norm(y)

    def mixed(step):
        # derivative along x -> x + t y of [F^2]_{y^A}, and [F^2]_{x^A}
        kx, ky = step * hx, step * hy
        out = np.empty(m)
        for a in range(m):
            dyx = (_sq(family, x + kx * ydir, y + ky * E[a]) - _sq(family, x + kx * ydir, y - ky * E[a])
                   - _sq(family, x - kx * ydir, y + ky * E[a]) + _sq(family, x - kx * ydir, y - ky * E[a])
                   ) / (4 * kx * ky) * ynorm
            dx = (_sq(family, x + kx * E[a], y) - _sq(family, x - kx * E[a], y)) / (2 * kx)
            out[a] = dyx - dx
        return out

    rhs = richardson(mixed, 1.0, cfg.richardson_levels)
    return 0.25 * np.linalg.solve(g, rhs)


def spray_divergence_fd(family, point, cfg=None):
    """``sum_A dG^A/dy^A`` by central differences of the closed-form spray."""
    cfg = cfg or FDConfig()
    _validate(family, point)
    y = point.y
    E = np.eye(y.size)

    def estimate(h):
        return sum((spray(family, point.with_y(y + h * E[a]))[a]
                    - spray(family, point.with_y(y - h * E[a]))[a]) / (2 * h)
                   for a in range(y.size))

    return float(richardson(estimate, _y_step(point, cfg.h_y), cfg.richardson_levels))


def _adjusted_sprays(family, point):
    sc = derived_scalars(family, point.z, point.r, point.n, (3, 1), check=False)
    G = spray(family, point, sc)
    trace = spray_divergence(family, point, sc)
    return G, G - trace / (point.n + 2) * point.y


def curvature_fd(family, point, cfg=None):
    """``(B, D)``: third y-differences of the spray and of the trace-adjusted spray.

    Each mixed derivative uses the product of three central differences,
    ``sum sigma1 sigma2 sigma3 f(y + h(sigma1 e_B + sigma2 e_C + sigma3 e_D)) / (8 h^3)``,
    which is valid for repeated indices too.  The trace part uses the
    closed-form divergence, itself checked by :func:`spray_divergence_fd`.
    """
    cfg = cfg or FDConfig()
    _validate(family, point)
    y = point.y
    m = y.size
    E = np.eye(m)
    signs = list(itertools.product((1.0, -1.0), repeat=3))
    triples = list(itertools.combinations_with_replacement(range(m), 3))
    cache = {}

    def evaluate(yy):
        key = yy.tobytes()
        if key not in cache:
            cache[key] = _adjusted_sprays(family, point.with_y(yy))
        return cache[key]

    def estimate(h):
        B = np.zeros((len(triples), m))
        D = np.zeros((len(triples), m))
        for t, (b, c, d) in enumerate(triples):
            for s1, s2, s3 in signs:
                G, Gd = evaluate(y + h * (s1 * E[b] + s2 * E[c] + s3 * E[d]))
                w = s1 * s2 * s3
                B[t] += w * G
                D[t] += w * Gd
        return np.stack([B, D]) / (8 * h ** 3)

    est = richardson(estimate, _y_step(point, cfg.h_y3, clearance=6), cfg.richardson_levels)
    out = np.zeros((2,) + (m,) * 4)
    for t, triple in enumerate(triples):
        for p in set(itertools.permutations(triple)):
            out[(0, slice(None)) + p] = est[0, t]
            out[(1, slice(None)) + p] = est[1, t]
    return out[0], out[1]


def berwald_fd(family, point, cfg=None):
    return curvature_fd(family, point, cfg)[0]


def douglas_fd(family, point, cfg=None):
    return curvature_fd(family, point, cfg)[1]


def projective_flat_terms(family, point, cfg=None):
    """``F_{x^A y^B} y^A - F_{x^B}`` for B = 0..n, by differences of F."""
    cfg = cfg or FDConfig()
    _validate(family, point)
    x, y = point.x, point.y
    m = y.size
    E = np.eye(m)
    hx = _x_step(family, point, cfg)
    hy = _y_step(point, cfg.h_y)
    ynorm = np.linalg.norm(y)
    ydir = y / ynorm
    F = family.F

    def terms(step):
        kx, ky = step * hx, step * hy
        out = np.zeros(m)
        for b in range(m):
            dxy = (F(x + kx * ydir, y + ky * E[b]) - F(x + kx * ydir, y - ky * E[b])
                   - F(x - kx * ydir, y + ky * E[b]) + F(x - kx * ydir, y - ky * E[b])
                   ) / (4 * kx * ky) * ynorm
            dx = 0.0 if b == 0 else (F(x + kx * E[b], y) - F(x - kx * E[b], y)) / (2 * kx)
            out[b] = dxy - dx
        return out

    return richardson(terms, 1.0, cfg.richardson_levels)


def ricci_fd(family, point, cfg=None):
    """Ricci scalar ``Ric = R^A_A`` of the closed-form spray by central differences.

    ``R^A_B = 2 dG^A/dx^B - y^C d2G^A/dx^C dy^B + 2 G^C d2G^A/dy^C dy^B
    - dG^A/dy^C dG^C/dy^B``, traced.  Differencing depth is two.
    """
    cfg = cfg or FDConfig()
    _validate(family, point)
    x, y = point.x, point.y
    m = y.size
    E = np.eye(m)
    hx = _x_step(family, point, cfg)
    hy = _y_step(point, cfg.h_y)

    def G(xx, yy):
        return spray(family, EvalPoint.from_vectors(xx, yy))

    G0 = G(x, y)

    def parts(step):
        kx, ky = step * hx, step * hy
        dGx = np.empty((m, m))
        dGy = np.empty((m, m))
        for b in range(m):
            dGx[:, b] = (G(x + kx * E[b], y) - G(x - kx * E[b], y)) / (2 * kx)
            dGy[:, b] = (G(x, y + ky * E[b]) - G(x, y - ky * E[b])) / (2 * ky)
        # y^C d/dx^C d/dy^B G^A, as a derivative along x -> x + t y
        ydir = y / np.linalg.norm(y)
        kt = kx
        dxy = np.empty((m, m))
        for b in range(m):
            dxy[:, b] = (G(x + kt * ydir, y + ky * E[b]) - G(x + kt * ydir, y - ky * E[b])
                         - G(x - kt * ydir, y + ky * E[b]) + G(x - kt * ydir, y - ky * E[b])
                         ) / (4 * kt * ky) * np.linalg.norm(y)
        # G^C d2G^A/dy^C dy^A, traced: derivative of dG^A/dy^A along y -> y + t G
        gdir = G0 / max(np.linalg.norm(G0), 1e-300)
        gnorm = np.linalg.norm(G0)
        trace_dy = np.empty(3)
        for k, sign in enumerate((1.0, -1.0, 0.0)):
            yy = y + sign * ky * gdir
            trace_dy[k] = sum((G(x, yy + ky * E[a])[a] - G(x, yy - ky * E[a])[a]) / (2 * ky)
                              for a in range(m))
        second = (trace_dy[0] - trace_dy[1]) / (2 * ky) * gnorm
        return np.array([np.trace(dGx), np.trace(dxy), second, np.sum(dGy * dGy.T)])

    tx, txy, second, quad = richardson(parts, 1.0, cfg.richardson_levels)
    return float(2 * tx - txy + 2 * second - quad)


def relative_error(approx, reference, floor=1e-12):
    """Max componentwise difference, relative to the reference's sup norm."""
    approx = np.asarray(approx, dtype=float)
    reference = np.asarray(reference, dtype=float)
    scale = max(float(np.max(np.abs(reference))), floor)
    return float(np.max(np.abs(approx - reference))) / scale


__all__ = [
    "FDConfig", "richardson", "hessian_fd", "spray_fd", "spray_divergence_fd",
    "curvature_fd", "berwald_fd", "douglas_fd", "projective_flat_terms", "ricci_fd",
    "relative_error",
]
