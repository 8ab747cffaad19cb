"""Metric tensor, inverse, determinant and spray of ``F = |ybar| sqrt(phi(z, r))``.

Coordinates are ``x = (x0, xbar)``, ``y = (y0, ybar)`` with ``xbar, ybar`` in
R^n.  Capital indices run over 0..n, lower-case ones over 1..n, and arrays are
stored densely with index 0 for the ``x0``/``y0`` direction.

Everything here is assembled from the scalar pipeline in :class:`DerivedScalars`,
whose members are jets in (z, r) built from the jet of ``phi``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetricError, DomainError
from .jets import R_MAX, Z_MAX, jet_var_r, jet_var_z

EPS_DEGENERATE = 1e-12


def _degenerate(phi, omega, lam):
    # Omega scales like phi and Lambda like phi^2 under phi -> c phi
    scale = abs(phi)
    return abs(omega) <= EPS_DEGENERATE * scale or abs(lam) <= EPS_DEGENERATE * scale * scale


@dataclass(frozen=True)
class EvalPoint:
    """A base point ``x`` and tangent vector ``y`` on R x B^n(rho)."""

    x0: float
    xbar: np.ndarray = field(repr=False)
    y0: float
    ybar: np.ndarray = field(repr=False)

    def __post_init__(self):
        xbar = np.asarray(self.xbar, dtype=float).ravel()
        ybar = np.asarray(self.ybar, dtype=float).ravel()
        if xbar.shape != ybar.shape:
            raise ValueError("xbar and ybar must have the same dimension")
        if xbar.size < 2:
            raise ValueError("the ball factor must have dimension n >= 2")
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "y0", float(self.y0))
        object.__setattr__(self, "xbar", xbar)
        object.__setattr__(self, "ybar", ybar)
        if not self.u > 0:
            raise DomainError("|ybar| must be positive")

    @classmethod
    def from_vectors(cls, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return cls(x[0], x[1:], y[0], y[1:])

    @property
    def n(self):
        return self.xbar.size

    @property
    def x(self):
        return np.concatenate([[self.x0], self.xbar])

    @property
    def y(self):
        return np.concatenate([[self.y0], self.ybar])

    @property
    def u(self):
        return float(np.linalg.norm(self.ybar))

    @property
    def r(self):
        return float(np.linalg.norm(self.xbar))

    @property
    def z(self):
        return self.y0 / self.u

    @property
    def s(self):
        return float(np.dot(self.xbar, self.ybar)) / self.u

    def with_y(self, y):
        return EvalPoint(self.x0, self.xbar, y[0], y[1:])

    def transformed(self, O):
        """The point ``(x0, O xbar; y0, O ybar)``."""
        return EvalPoint(self.x0, O @ self.xbar, self.y0, O @ self.ybar)


@dataclass(frozen=True)
class DerivedScalars:
    """Jets in (z, r) of phi and every scalar the closed forms are built from.

    ``omega``/``lam`` are Omega = 2 phi - z phi_z and
    Lambda = 2 phi phi_zz - phi_z^2.  ``R, T`` enter the Douglas tensor,
    ``E = U + zV`` and ``H = V + W`` the Berwald and Landsberg tensors.
    """

    n: int
    z: float
    r: float
    phi: object
    omega: object
    lam: object
    U: object
    V: object
    W: object
    R: object = None
    T: object = None
    E: object = None
    H: object = None


def derived_scalars(family, z, r, n, orders=(Z_MAX, R_MAX), check=True):
    """Evaluate the scalar pipeline at ``(z, r)`` from the jet of ``phi``.

    ``orders`` is the truncation of the ``phi`` jet.  The default (6, 2) gives
    ``U`` to z-order 4, ``W`` to 5 and ``R, T, E, H`` to 3, which is what the
    curvature and Ricci formulas consume.  ``R, T, E, H`` are left as None when
    ``orders[0] < 3``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    phi = family.phi_jet(z, r, orders, check=check)
    zj = jet_var_z(z, r, orders)
    rj = jet_var_r(z, r, orders)
    phi_z = phi.dz()
    phi_zz = phi_z.dz()
    phi_r = phi.dr() if orders[1] >= 1 else None
    omega = 2.0 * phi - zj * phi_z
    lam = 2.0 * phi * phi_zz - phi_z * phi_z
    if _degenerate(phi.value, omega.value, lam.value):
        raise DegenerateMetricError(
            f"Omega={omega.value!r}, Lambda={lam.value!r} at z={z}, r={r}")
    if phi_r is None:
        raise ValueError("the spray needs phi to r-order at least 1")
    phi_zr = phi_z.dr()
    two_r = 2.0 * rj
    U = (2.0 * phi * phi_zr - phi_z * phi_r) / (two_r * lam)
    V = (phi_r * phi_zz - phi_z * phi_zr) / (two_r * lam)
    W = phi_r / (two_r * omega)
    extra = {}
    if orders[0] >= 3:
        U_z = U.dz()
        extra["R"] = U - zj * (U_z + (n - 1) * W) / (n + 2)
        extra["T"] = (3.0 * W - U_z) / (n + 2)
        extra["E"] = U + zj * V
        extra["H"] = V + W
    return DerivedScalars(n=n, z=float(z), r=float(r), phi=phi, omega=omega, lam=lam,
                          U=U, V=V, W=W, **extra)


def point_scalars(family, point, orders=(Z_MAX, R_MAX)):
    return derived_scalars(family, point.z, point.r, point.n, orders)


@dataclass(frozen=True)
class FundamentalTensor:
    g: np.ndarray
    ginv: np.ndarray
    det: float


def metric_matrix(phi, z, yhat):
    """``g_AB`` from the jet of phi (z-order >= 2) and the unit vector ``ybar/|ybar|``."""
    n = yhat.size
    phi_z, phi_zz = phi.d(1), phi.d(2)
    omega = 2.0 * phi.value - z * phi_z
    omega_z = phi_z - z * phi_zz
    g = np.empty((n + 1, n + 1))
    g[0, 0] = 0.5 * phi_zz
    g[0, 1:] = g[1:, 0] = 0.5 * omega_z * yhat
    g[1:, 1:] = 0.5 * omega * np.eye(n) - 0.5 * z * omega_z * np.outer(yhat, yhat)
    return g


def inverse_metric_matrix(phi, z, yhat):
    """``g^AB`` from its closed-form block expression."""
    n = yhat.size
    p, p_z, p_zz = phi.value, phi.d(1), phi.d(2)
    omega = 2.0 * p - z * p_z
    omega_z = p_z - z * p_zz
    lam = 2.0 * p * p_zz - p_z * p_z
    if _degenerate(p, omega, lam):
        raise DegenerateMetricError(f"Omega={omega!r}, Lambda={lam!r}")
    ginv = np.empty((n + 1, n + 1))
    ginv[0, 0] = 2.0 / lam * (omega - z * omega_z)
    ginv[0, 1:] = ginv[1:, 0] = -2.0 / lam * omega_z * yhat
    ginv[1:, 1:] = (2.0 / omega * np.eye(n)
                    + 2.0 * p_z * (p_z - z * p_zz) / (omega * lam) * np.outer(yhat, yhat))
    return ginv


def fundamental_tensor(family, point):
    phi = family.phi_jet(point.z, point.r, (2, 0))
    yhat = point.ybar / point.u
    g = metric_matrix(phi, point.z, yhat)
    ginv = inverse_metric_matrix(phi, point.z, yhat)
    det = float(np.linalg.det(g))
    # relative to the size of g, so uniformly small (but convex) metrics pass
    if not det > EPS_DEGENERATE * float(np.max(np.abs(g))) ** g.shape[0]:
        raise DegenerateMetricError(f"det(g) = {det!r}")
    return FundamentalTensor(g=g, ginv=ginv, det=det)


def determinant_formula(omega, lam, n):
    """Omega^(n-1) Lambda / 2^(n+1)."""
    return omega ** (n - 1) * lam / 2.0 ** (n + 1)


def _spray_scalars(family, point, scalars):
    if scalars is None:
        scalars = derived_scalars(family, point.z, point.r, point.n, (3, 1))
    return scalars


def spray(family, point, scalars=None):
    """Spray coefficients ``(G^0, G^1, ..., G^n)``."""
    sc = _spray_scalars(family, point, scalars)
    U, V, W = sc.U.value, sc.V.value, sc.W.value
    u = point.u
    xy = float(np.dot(point.xbar, point.ybar))
    G = np.empty(point.n + 1)
    G[0] = u * xy * (U + point.z * V)
    G[1:] = xy * (V + W) * point.ybar - u * u * W * point.xbar
    return G


def spray_divergence(family, point, scalars=None):
    """Trace ``dG^A/dy^A`` of the y-gradient of the spray."""
    sc = _spray_scalars(family, point, scalars)
    n = point.n
    U_z, V, W = sc.U.d(1), sc.V.value, sc.W.value
    return point.u * point.s * (U_z + (n + 1) * (V + W) + V - 2.0 * W)
