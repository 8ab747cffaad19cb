import numpy as np
import pytest

from _support import sample_points
from warpfinsler import families as fam
from warpfinsler import jets
from warpfinsler.curvature import (DEGREE, berwald_tensor, contraction_residuals, douglas_ode_residuals,
                                   douglas_tensor, is_symmetric_lower, landsberg_from_berwald,
                                   landsberg_tensor, phi_r, projective_flat_residual,
                                   ricci_flat_residuals, scaled_norm, trace_residual)
from warpfinsler.engine import EvalPoint, derived_scalars
from warpfinsler.oracle import berwald_fd, douglas_fd, relative_error, ricci_fd

def _sup(T):
    return float(np.max(np.abs(T)))


@pytest.mark.parametrize("name", ["randers", "example-4", "perturbed"])
def test_tensor_symmetries_and_contractions(name):
    family = fam.preset(name)
    for p in sample_points(family, 10, 3, seed=7):
        B, D, L = berwald_tensor(family, p), douglas_tensor(family, p), landsberg_tensor(family, p)
        scale = max(_sup(B), 1.0)
        assert is_symmetric_lower(B, 1e-12 * scale)
        assert is_symmetric_lower(D, 1e-12 * scale)
        for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
            assert _sup(L - np.transpose(L, perm)) <= 1e-12 * max(_sup(L), 1.0)
        # third y-derivatives of 2-homogeneous data are annihilated by y
        assert _sup(contraction_residuals(B, p.y)) <= 1e-11 * scale * p.u
        assert _sup(contraction_residuals(D, p.y)) <= 1e-11 * scale * p.u
        assert _sup(contraction_residuals(L, p.y)) <= 1e-11 * max(_sup(L), 1.0) * p.u
        assert _sup(trace_residual(D)) <= 1e-11 * scale


@pytest.mark.parametrize("name", ["randers", "perturbed", "example-2"])
def test_landsberg_closed_form_matches_contraction(name):
    family = fam.preset(name)
    for p in sample_points(family, 20, 3, seed=8):
        L = landsberg_tensor(family, p)
        assert relative_error(L, landsberg_from_berwald(family, p), floor=1.0) < 1e-12


@pytest.mark.parametrize("lam", [0.7, 3.0])
def test_homogeneity_degrees(lam):
    family = fam.preset("perturbed")
    p = sample_points(family, 1, 3, seed=9)[0]
    q = p.with_y(lam * p.y)
    for tensor, key in ((douglas_tensor, "douglas"), (berwald_tensor, "berwald"),
                        (landsberg_tensor, "landsberg")):
        a, b = tensor(family, p), tensor(family, q)
        assert relative_error(b, lam ** DEGREE[key] * a, floor=1.0) < 1e-12
        assert scaled_norm(b, q.u, DEGREE[key]) == pytest.approx(scaled_norm(a, p.u, DEGREE[key]),
                                                                 rel=1e-12)


def test_flat_presets_have_no_curvature():
    for name in ("euclidean", "flat"):
        family = fam.preset(name)
        for p in sample_points(family, 5, 3, seed=10):
            assert _sup(berwald_tensor(family, p)) == 0.0
            assert _sup(douglas_tensor(family, p)) == 0.0
            assert _sup(landsberg_tensor(family, p)) == 0.0


@pytest.mark.parametrize("name", fam.DOUGLAS_PRESETS)
def test_douglas_presets(name):
    family = fam.preset(name)
    for p in sample_points(family, 10, 3, seed=11):
        sc = derived_scalars(family, p.z, p.r, p.n)
        D = douglas_tensor(family, p, sc)
        assert scaled_norm(D, p.u, -1) < 1e-9 * max(1.0, scaled_norm(berwald_tensor(family, p, sc), p.u, -1))
        assert max(abs(v) for v in douglas_ode_residuals(family, p.z, p.r, p.n, sc)) < 1e-9


def test_perturbed_preset_is_not_douglas():
    family = fam.preset("perturbed")
    worst = max(scaled_norm(douglas_tensor(family, p), p.u, -1) for p in sample_points(family, 10, 3, 12))
    assert worst > 1e-3


def test_randers_drift_breaks_the_douglas_odes():
    # f, g constant and b = r: only W_z - z W_zz survives, equal to b' / (2 r f (g z^2 + 1)^(3/2))
    f, g = 1.5, 2.0
    family = fam.randers_family(f, g, "r")
    for z, r in [(0.3, 0.4), (-1.2, 0.7), (0.0, 0.2)]:
        res = douglas_ode_residuals(family, z, r, 3)
        expected = 1.0 / (2 * r * f * (g * z * z + 1) ** 1.5)
        assert abs(res[2] - expected) < 1e-12 * max(1.0, expected)


@pytest.mark.parametrize("name", ["randers", "perturbed", "example-4"])
def test_closed_forms_against_differences(name):
    family = fam.preset(name)
    for p in sample_points(family, 3, 2, seed=13):
        B, D = berwald_tensor(family, p), douglas_tensor(family, p)
        assert relative_error(berwald_fd(family, p), B, floor=1.0 / p.u) < 1e-5
        assert relative_error(douglas_fd(family, p), D, floor=1.0 / p.u) < 1e-5


# -- Ricci-flat residuals ------------------------------------------------------------

def _power_family(expr):
    return fam.g_family(expr, "sqrt(t^2+1)")


def _q_with_u_r_bracket(family, z, r, n):
    # the variant with n U_r in the bracket divided by r
    sc = derived_scalars(family, z, r, n)
    P, Q = ricci_flat_residuals(family, z, r, n, sc)
    return Q - n * (sc.U.d(0, 1) - sc.V.d(0, 1)) / r


def test_flat_is_ricci_flat():
    for n in (2, 3, 4):
        assert ricci_flat_residuals(fam.preset("euclidean"), 0.4, 0.5, n) == (0.0, 0.0)


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("expr", ["r^2", "3*r^2"])
def test_quadratic_warp_is_ricci_flat(n, expr):
    family = _power_family(expr)
    for z, r in [(0.3, 0.5), (-1.4, 0.2), (2.0, 0.9)]:
        P, Q = ricci_flat_residuals(family, z, r, n)
        assert abs(P) < 1e-9 and abs(Q) < 1e-9


@pytest.mark.parametrize("expr", ["r", "1+r^2", "r^(-2)"])
def test_other_warps_are_not_ricci_flat(expr):
    family = _power_family(expr)
    worst = max(max(abs(v) for v in ricci_flat_residuals(family, z, r, 3))
                for z, r in [(0.3, 0.5), (-1.4, 0.2), (2.0, 0.9)])
    assert worst > 1e-4


@pytest.mark.parametrize("expr", ["r", "2*r^1.5", "0.5*r^(-1)", "r^3"])
def test_power_warps_solve_the_equations_at_n_two(expr):
    # at n = 2 both warp ODEs are solved by every k r^C
    family = _power_family(expr)
    for z, r in [(0.3, 0.5), (-1.4, 0.2), (2.0, 0.9)]:
        P, Q = ricci_flat_residuals(family, z, r, 2)
        assert abs(P) < 1e-8 and abs(Q) < 1e-8


def test_warp_ode_factor():
    # h = 1 + r^2 solves r h'' - h' = 0, the factor in Q, but not the warp ODE behind P
    family = _power_family("1+r^2")
    for n in (2, 3):
        P, Q = ricci_flat_residuals(family, 0.3, 0.5, n)
        assert abs(P) > 1e-3
        assert abs(Q) < 1e-9


def test_ricci_oracle_adjudicates_the_bracket():
    family = fam.preset("ricci-r2")
    for p in sample_points(family, 4, 3, seed=14, r_range=(0.2, 0.9)):
        assert abs(ricci_fd(family, p)) < 1e-6
        assert abs(_q_with_u_r_bracket(family, p.z, p.r, 3)) > 1.0


def test_ricci_oracle_sees_curvature():
    family = _power_family("1+r^2")
    p = EvalPoint(0.0, [0.3, 0.2, 0.1], 0.8, [0.5, -1.0, 0.3])
    assert abs(ricci_fd(family, p)) > 1e-3
    assert abs(ricci_fd(fam.preset("flat"), p)) == 0.0


# -- projective flatness --------------------------------------------------------------

def test_projective_flatness():
    for name in ("euclidean", "flat"):
        family = fam.preset(name)
        assert phi_r(family, 0.4, 0.5) == 0.0
        for p in sample_points(family, 5, 3, seed=15):
            assert projective_flat_residual(family, p) < 1e-8
    family = fam.preset("g-family")
    assert abs(phi_r(family, 0.4, 0.5)) > 1e-2
    p = sample_points(family, 1, 3, seed=16)[0]
    assert projective_flat_residual(family, p) > 1e-3


# -- profiles composed without the 1/g factor ------------------------------------------

def _unwarped(profile):
    # F = |ybar| G(g z) with g = 1 + r^2/4, i.e. the g-family form missing its 1/g
    def phi(z, r):
        G = profile(fam.DEFAULT_G(r) * z)
        return G * G
    return fam.custom_family(phi, name="unwarped")


@pytest.mark.parametrize("profile", [
    lambda t: (2 * t * t + 1) / jets.sqrt(t * t + 1) + 2 * t,
    lambda t: 1 + (2 * t * t + 1) / jets.sqrt(t * t + 1),
])
def test_profiles_need_the_warp_factor(profile):
    family = _unwarped(profile)
    worst = max(scaled_norm(douglas_tensor(family, p), p.u, -1) for p in sample_points(family, 10, 3, 17))
    assert worst > 1.0
