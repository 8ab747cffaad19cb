"""Closed-form Douglas, Berwald and Landsberg tensors and scalar residuals.

Rank-4 tensors are returned as arrays ``T[A, B, C, D]`` with the upper index
first; rank-3 tensors as ``L[A, B, C]``.  Index 0 is the ``y0`` direction.

Douglas and Berwald tensors share one assembly.  With ``u = |ybar|`` and
``s = <xbar, ybar>/u`` the trace-adjusted spray is ``(u^2 s R, u s T y^i -
u^2 W x^i)`` and the spray itself is ``(u^2 s E, u s H y^i - u^2 W x^i)``,
so :func:`_third_derivatives` takes ``(R, T)`` or ``(E, H)`` as its
``(P, Q)`` arguments.

Index conventions of the component lists, each confirmed against exact
symbolic third derivatives and the finite-difference oracle:

* ``D^0_{00l}``: the free index is ``l`` and the ``y^l`` term carries
  ``s/u^2``, which keeps the component homogeneous of degree -1.
* ``D^i_{0kl}``: the ``x`` term is ``x^k delta^{il}``.
* the Berwald components follow the same pattern.
"""

import numpy as np

from .engine import derived_scalars, point_scalars
from .jets import R_MAX, Z_MAX

CLOSED_FORM_TOL = 1e-9


def _outer(*vs):
    out = vs[0]
    for v in vs[1:]:
        out = np.multiply.outer(out, v)
    return out


def _cyc3(t):
    """Sum over the three cyclic rotations of a rank-3 array's indices."""
    return t + np.transpose(t, (1, 2, 0)) + np.transpose(t, (2, 0, 1))


def _cyc_last3(t):
    """Cyclic sum over the last three indices of a rank-4 array."""
    return t + np.transpose(t, (0, 2, 3, 1)) + np.transpose(t, (0, 3, 1, 2))


def _third_derivatives(P, Q, W, point):
    """Third y-derivatives of ``(u^2 s P(z), u s Q(z) y^i - u^2 W(z) x^i)``.

    ``P, Q, W`` are sequences of z-derivatives ``[f, f', f'', f''']``.
    """
    n = point.n
    u, z, s = point.u, point.z, point.s
    x, y = point.xbar, point.ybar
    d = np.eye(n)
    P0, P1, P2, P3 = P
    Q0, Q1, Q2, Q3 = Q
    W0, W1, W2, W3 = W

    out = np.zeros((n + 1,) * 4)

    # upper index 0
    top = out[0]
    top[0, 0, 0] = s / u * P3
    v = P2 * x / u - s / u ** 2 * (P2 + z * P3) * y
    top[0, 0, 1:] = top[0, 1:, 0] = top[1:, 0, 0] = v
    m = (s * z * (z * P3 + 3 * P2) / u ** 3 * _outer(y, y)
         - z * P2 / u ** 2 * (_outer(x, y) + _outer(y, x))
         - s * z * P2 / u * d)
    top[0, 1:, 1:] = top[1:, 0, 1:] = top[1:, 1:, 0] = m
    a = P0 - z * P1 - 2 * z * z * P2 - z ** 3 * P3 / 3
    b = -P0 + z * P1 + z * z * P2
    c = P0 - z * P1
    top[1:, 1:, 1:] = (s * a / u ** 4 * _cyc3(_outer(y, y, y))
                       + b / u ** 3 * _cyc3(_outer(y, y, x))
                       + c / u * _cyc3(_outer(d, x))
                       + s * b / u ** 2 * _cyc3(_outer(d, y)))

    # upper index i
    low = out[1:]
    low[:, 0, 0, 0] = s / u ** 2 * Q3 * y - W3 / u * x
    v = (-s / u ** 3 * (2 * Q2 + z * Q3) * _outer(y, y) + Q2 / u ** 2 * _outer(y, x)
         + z * W3 / u ** 2 * _outer(x, y) + s * Q2 / u * d)
    low[:, 0, 0, 1:] = low[:, 0, 1:, 0] = low[:, 1:, 0, 0] = v
    dx = _outer(d, x)
    m = (s / u ** 4 * (3 * Q1 + 5 * z * Q2 + z * z * Q3) * _outer(y, y, y)
         - s / u ** 2 * (Q1 + z * Q2) * _cyc3(_outer(y, d))
         - (Q1 + z * Q2) / u ** 3 * (_outer(y, y, x) + _outer(y, x, y))
         + Q1 / u * (dx + np.transpose(dx, (0, 2, 1)))
         + (W1 - z * W2 - z * z * W3) / u ** 3 * _outer(x, y, y)
         - (W1 - z * W2) / u * _outer(x, d))
    low[:, 0, 1:, 1:] = low[:, 1:, 0, 1:] = low[:, 1:, 1:, 0] = m
    dyy = _outer(d, y, y)
    xyd = _outer(x, y, d)
    xdy = _outer(x, d, y)
    low[:, 1:, 1:, 1:] = (
        s / u ** 5 * (-15 * z * Q1 - 9 * z * z * Q2 - z ** 3 * Q3) * _outer(y, y, y, y)
        + (3 * z * Q1 + z * z * Q2) * _cyc_last3(
            _outer(y, x, y, y) / u ** 4 + s / u ** 3 * dyy
            + s / u ** 3 * np.transpose(dyy, (2, 0, 3, 1)))
        - z * Q1 / u ** 2 * _cyc_last3(
            np.transpose(xyd, (1, 0, 2, 3)) + u * s * _outer(d, d)
            + np.transpose(xdy, (1, 0, 2, 3)) + np.transpose(xdy, (1, 2, 0, 3)))
        - (3 * z * W1 - 3 * z * z * W2 - z ** 3 * W3) / u ** 4 * _outer(x, y, y, y)
        + z * (W1 - z * W2) / u ** 2 * _cyc_last3(xyd))
    return out


def _derivs(jet, k=3):
    return [jet.d(i) for i in range(k + 1)]


def _scalars(family, point, scalars):
    return scalars if scalars is not None else point_scalars(family, point)


def douglas_tensor(family, point, scalars=None):
    """``D^A_{BCD}`` as an ``(n+1)^4`` array."""
    sc = _scalars(family, point, scalars)
    return _third_derivatives(_derivs(sc.R), _derivs(sc.T), _derivs(sc.W), point)


def berwald_tensor(family, point, scalars=None):
    """``B^A_{BCD} = d^3 G^A / dy^B dy^C dy^D`` as an ``(n+1)^4`` array."""
    sc = _scalars(family, point, scalars)
    return _third_derivatives(_derivs(sc.E), _derivs(sc.H), _derivs(sc.W), point)


def norm_gradient(family, point, scalars=None):
    """``[F^2]_{y^A} = (u phi_z, Omega y^i)``."""
    sc = _scalars(family, point, scalars)
    return np.concatenate([[point.u * sc.phi.d(1)], sc.omega.value * point.ybar])


def landsberg_from_berwald(family, point, scalars=None, berwald=None):
    """``L_{ABC} = -1/4 [F^2]_{y^D} B^D_{ABC}`` by explicit contraction."""
    sc = _scalars(family, point, scalars)
    B = berwald if berwald is not None else berwald_tensor(family, point, sc)
    return -0.25 * np.einsum("d,dabc->abc", norm_gradient(family, point, sc), B)


def landsberg_tensor(family, point, scalars=None):
    """``L_{ABC}`` from its closed-form component list."""
    sc = _scalars(family, point, scalars)
    n = point.n
    u, z, s = point.u, point.z, point.s
    x, y = point.xbar, point.ybar
    d = np.eye(n)
    pz, om = sc.phi.d(1), sc.omega.value
    E0, E1, E2, E3 = _derivs(sc.E)
    H0, H1, H2, H3 = _derivs(sc.H)
    W0, W1, W2, W3 = _derivs(sc.W)

    L = np.zeros((n + 1,) * 3)
    L[0, 0, 0] = -s / 4 * (pz * E3 + om * (H3 - W3))
    v = (-0.25 * (pz * E2 + om * H2) * x
         + s / (4 * u) * (pz * (E2 + z * E3) + om * (H2 + z * H3 - z * W3)) * y)
    L[0, 0, 1:] = L[0, 1:, 0] = L[1:, 0, 0] = v
    m = (-s / (4 * u * u) * (z * pz * (z * E3 + 3 * E2)
                             + om * (H1 + 3 * z * H2 + z * z * H3)
                             + om * (W1 - z * W2 - z * z * W3)) * _outer(y, y)
         + z / (4 * u) * (pz * E2 + om * H2) * (_outer(x, y) + _outer(y, x))
         + s / 4 * (z * pz * E2 + om * (H1 + z * H2 + W1 - z * W2)) * d)
    L[0, 1:, 1:] = L[1:, 0, 1:] = L[1:, 1:, 0] = m
    e = -E0 + z * E1 + z * z * E2
    L[1:, 1:, 1:] = (
        -s / (4 * u ** 3) * (pz * (3 * E0 - 3 * z * E1 - 6 * z * z * E2 - z ** 3 * E3)
                             - om * (6 * z * H1 + 6 * z * z * H2 + z ** 3 * H3)
                             - om * (3 * z * W1 - 3 * z * z * W2 - z ** 3 * W3)) * _outer(y, y, y)
        - (pz * e + om * (z * H1 + z * z * H2)) / (4 * u * u) * _cyc3(_outer(x, y, y))
        - s / (4 * u) * (pz * e + om * (2 * z * H1 + z * z * H2 + z * W1 - z * z * W2))
        * _cyc3(_outer(d, y))
        - 0.25 * (pz * (E0 - z * E1) - z * om * H1) * _cyc3(_outer(d, x)))
    return L


def scaled_norm(tensor, u, degree):
    """Sup norm of a tensor homogeneous of ``degree`` in y, rescaled to |ybar| = 1."""
    return float(np.max(np.abs(tensor))) * u ** (-degree)


# degree of homogeneity in y
DEGREE = {"douglas": -1, "berwald": -1, "landsberg": 0}


def douglas_ode_residuals(family, z, r, n, scalars=None):
    """``(R - z R_z, T_z, W_z - z W_zz)``; all three vanish for Douglas metrics."""
    sc = scalars if scalars is not None else derived_scalars(family, z, r, n)
    R, T, W = sc.R, sc.T, sc.W
    return (R.value - z * R.d(1), T.d(1), W.d(1) - z * W.d(2))


def ricci_flat_residuals(family, z, r, n, scalars=None):
    """Left-hand sides ``(P, Q)`` of the two Ricci-flatness equations.

    The characterisation holds for ``n >= 3``; for ``n = 2`` the values
    are still computed but carry no Ricci-flatness meaning.

    The bracket divided by r in Q is the r-derivative of the bracket
    ``U_z + nV + (n-3)W`` in P, i.e. it carries ``n V_r``.  Reading ``n U_r``
    there instead leaves a term linear in z that the finite-difference Ricci
    scalar (:func:`warpfinsler.oracle.ricci_fd`) shows is spurious.
    """
    sc = scalars if scalars is not None else derived_scalars(family, z, r, n, (Z_MAX, R_MAX))
    U, V, W = sc.U, sc.V, sc.W
    u, u_z, u_zz = U.value, U.d(1), U.d(2)
    u_rz = U.d(1, 1)
    v, v_z, v_r = V.value, V.d(1), V.d(0, 1)
    w, w_z, w_r = W.value, W.d(1), W.d(0, 1)
    P = ((2 * r * r * w + 1) * (u_z + n * v + (n - 3) * w)
         + 2 * (n * w + r * w_r + r * r * w_z * (z * w - u)))
    Q = (2 * u * (u_zz + n * v_z + (n - 2) * w_z)
         - (u_rz + n * v_r + (n - 3) * w_r) / r
         + n * v * (v + 2 * w) + w * ((n - 5) * w + 2 * z * w_z) + u_z * (2 * w - u_z))
    return P, Q


def phi_r(family, z, r):
    """``phi_r`` at (z, r): the fast projective-flatness indicator."""
    return family.phi_jet(z, r, (0, 1)).d(0, 1)


def projective_flat_residual(family, point, cfg=None):
    """``sup_B |F_{x^A y^B} y^A - F_{x^B}|`` by finite differences of F.

    The ``x0`` derivatives vanish identically and are skipped.
    """
    from .oracle import FDConfig, projective_flat_terms
    return float(np.max(np.abs(projective_flat_terms(family, point, cfg or FDConfig()))))


def contraction_residuals(D, y):
    """``D^A_{BCD} y^D`` for rank 4 or ``L_{ABC} y^C`` for rank 3."""
    return np.tensordot(D, y, axes=([D.ndim - 1], [0]))


def trace_residual(D):
    """``sum_A D^A_{BCA}``."""
    return np.einsum("abca->bc", D)


def is_symmetric_lower(T, tol=0.0):
    """Whether ``T[A, B, C, D]`` is invariant under permutations of (B, C, D)."""
    perms = [(0, 2, 1, 3), (0, 1, 3, 2), (0, 3, 2, 1), (0, 2, 3, 1), (0, 3, 1, 2)]
    return all(np.max(np.abs(T - np.transpose(T, p))) <= tol for p in perms)

