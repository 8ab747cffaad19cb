import math

import numpy as np
import pytest

from _support import JETS, MP, mp_partial
from warpfinsler import families as fam
from warpfinsler import jets
from warpfinsler.engine import derived_scalars, fundamental_tensor, metric_matrix
from warpfinsler.errors import ConvexityError, DomainError
from warpfinsler.functions import DoubleIntegral, JetFunction
from warpfinsler.jets import R_MAX, Z_MAX


def _sq(G):
    return JetFunction(G, "G")


def test_g_family_euclidean_case():
    phi = fam.phi_g_family(1.0, _sq(lambda t: jets.sqrt(t * t + 1.0)), 0.7, 0.4)
    assert phi.value == pytest.approx(0.7 ** 2 + 1)
    assert phi.d(0, 1) == 0.0
    assert phi.d(2) == pytest.approx(2.0)
    assert np.allclose(phi.coeff[3:, :], 0.0, atol=1e-12)


def _check_partials(jet, explicit, z, r, tol=1e-7):
    for i in range(Z_MAX + 1):
        for j in range(R_MAX + 1):
            ref = mp_partial(explicit, z, r, i, j)
            assert abs(jet.d(i, j) - ref) <= tol * max(1.0, abs(ref)), (i, j)


def test_g_family_partials_vs_differences():
    phi = fam.phi_g_family("1+r^2", "sqrt(t^2+0.5)", 0.7, 0.4)

    def explicit(z, r):
        h = 1 + r * r
        return (h * z) ** 2 / h ** 2 + 0.5 / h ** 2
    _check_partials(phi, explicit, 0.7, 0.4)


def test_g_family_exponential_warp_scalars():
    family = fam.g_family(JetFunction(lambda r: jets.exp(r * r / 2), "exp(r^2/2)"),
                          _sq(lambda t: jets.sqrt(t * t + 1.0)), rho=2.0)
    sc = derived_scalars(family, 0.5, 1.0, 3)
    assert sc.U.value == pytest.approx(0.25, abs=1e-12)
    assert sc.V.value == pytest.approx(-0.5, abs=1e-12)
    assert sc.W.value == pytest.approx(-0.5, abs=1e-12)


def test_g_family_rejects_nonpositive_warp():
    family = fam.g_family("r - 0.5", "sqrt(t^2+1)")
    with pytest.raises(DomainError):
        family.phi(0.3, 0.2)


def test_randers_reduces_to_euclidean():
    phi = fam.phi_randers(1.0, 1.0, 0.0, 0.3, 0.5)
    assert phi.value == pytest.approx(1.09)
    assert phi.d(2) == pytest.approx(2.0)
    assert phi.d(0, 1) == 0.0


def test_randers_partials_vs_differences():
    phi = fam.phi_randers("1+r", 2.0, 0.5, 0.3, 0.5)

    def explicit(z, r):
        q = (1 + r) * MP.sqrt(2 * z * z + 1) + 0.5 * z
        return q * q
    _check_partials(phi, explicit, 0.3, 0.5)


def test_randers_without_drift_is_a_g_family_with_root_warp():
    # f = k^2 / sqrt(g) and b = 0 give phi = k^4 (z^2 + 1/g), the g-family with h = sqrt(g)
    k = 1.3
    g = JetFunction(lambda r: 1.0 + r * r / 4.0, "g")
    f = JetFunction(lambda r: k * k / jets.sqrt(1.0 + r * r / 4.0), "f")
    G = _sq(lambda t: k * k * jets.sqrt(t * t + 1.0))
    root = JetFunction(lambda r: jets.sqrt(1.0 + r * r / 4.0), "sqrt g")
    for z, r in [(0.3, 0.5), (-1.7, 0.9), (2.2, 0.1)]:
        randers = fam.phi_randers(f, g, 0.0, z, r)
        assert np.allclose(randers.coeff, fam.phi_g_family(root, G, z, r).coeff, rtol=1e-12, atol=1e-12)
        # with h = g instead the two constructors disagree
        assert abs(randers.value - fam.phi_g_family(g, G, z, r).value) > 1e-3


def test_randers_convexity_violation():
    with pytest.raises(ConvexityError):
        fam.phi_randers(1.0, 1.0, 1.5, 0.3, 0.5)


def test_randers_with_r_dependent_drift():
    phi = fam.phi_randers("1+r", 1.0, "r", 0.4, 0.5)
    assert phi.value == pytest.approx((1.5 * math.sqrt(1.16) + 0.5 * 0.4) ** 2)


def test_gc_family_with_constant_kernel_is_the_analytic_g_family():
    for z, r in [(0.3, 0.5), (0.8, 0.2)]:
        gc = fam.phi_gc_family(2.0, 1.0, "1+r^2/4", z, r)
        ga = fam.phi_g_family("1+r^2/4", "t^2+1", z, r)
        assert np.allclose(gc.coeff, ga.coeff, rtol=1e-12, atol=1e-12)


def _closed_example_3(z, g):
    return 1.0 + (2 * g * g * z * z + 1.0) / math.sqrt(g * g * z * z + 1.0)


def _closed_example_5(z, g):
    q = g * g * z * z + 1.0
    return 3 * z / 8 * math.atan(g * z) + (8 * g * g * z * z + 7) / (8 * g * q)


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="the Example 3 closed form is not (1/g) G_c(g z) with c = 1")
def test_example_3_closed_form_with_c_one():
    family = fam.preset("example-3")
    for z, r in [(0.3, 0.5), (-1.1, 0.8)]:
        g = fam.DEFAULT_G(r)
        assert abs(math.sqrt(family.phi(z, r)) - _closed_example_3(z, g)) < 1e-9


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="the Example 5 closed form is the c = 7/8 member, not c = 1")
def test_example_5_closed_form_with_c_one():
    family = fam.preset("example-5")
    for z, r in [(0.3, 0.5), (-1.1, 0.8)]:
        g = fam.DEFAULT_G(r)
        assert abs(math.sqrt(family.phi(z, r)) - _closed_example_5(z, g)) < 1e-9


def test_example_3_closed_form_is_g_c_with_c_two_without_the_warp_factor():
    Gc = DoubleIntegral("3/(t^2+1)^(5/2)", c=2.0)
    for z, r in [(0.3, 0.5), (-1.1, 0.8), (2.5, 0.05)]:
        g = fam.DEFAULT_G(r)
        assert abs(Gc(g * z) - _closed_example_3(z, g)) < 1e-12


def test_example_5_closed_form_is_g_c_with_c_seven_eighths():
    family = fam.preset("example-5", c=7.0 / 8.0)
    for z, r in [(0.3, 0.5), (-1.1, 0.8), (2.5, 0.05)]:
        g = fam.DEFAULT_G(r)
        assert abs(math.sqrt(family.phi(z, r)) - _closed_example_5(z, g)) < 1e-12


def test_example_1_and_2_closed_forms():
    e, gam = fam.EXAMPLE_EPSILON, fam.EXAMPLE_GAMMA
    one, two = fam.preset("example-1"), fam.preset("example-2")
    for z, r in [(0.3, 0.5), (-1.1, 0.8)]:
        g = fam.DEFAULT_G(r)
        assert math.sqrt(one.phi(z, r)) == pytest.approx(math.sqrt(g * g * z * z + e) / g, rel=1e-14)
        assert math.sqrt(two.phi(z, r)) == pytest.approx(
            math.sqrt(g * g * z * z + e) / g + gam * z, rel=1e-14)


def test_example_4_closed_form_has_warp_factor():
    family = fam.preset("example-4")
    for z, r in [(0.3, 0.5), (-1.1, 0.8)]:
        g = fam.DEFAULT_G(r)
        q = math.sqrt(g * g * z * z + 1)
        unwarped = (q + g * z) ** 2 / q
        assert math.sqrt(family.phi(z, r)) == pytest.approx(unwarped / g, rel=1e-13)


# -- constructors against differences at many random points --------------------

@pytest.mark.parametrize("name", ["g-family", "randers", "example-2", "example-4", "perturbed"])
def test_preset_partials_vs_differences(name):
    family = fam.preset(name)
    explicit = {
        "g-family": lambda m, z, r: (m.sqrt(((1 + r * r) * z) ** 2 + 0.5) + 0.3 * (1 + r * r) * z) ** 2
        / (1 + r * r) ** 2,
        "randers": lambda m, z, r: ((1 + r) * m.sqrt(2 * z * z + 1) + 0.3 * z) ** 2,
        "example-2": lambda m, z, r: (m.sqrt((1 + r * r / 4) ** 2 * z * z + 0.5) / (1 + r * r / 4)
                                      + 0.3 * z) ** 2,
        "example-4": lambda m, z, r: ((2 * ((1 + r * r / 4) * z) ** 2 + 1)
                                      / m.sqrt(((1 + r * r / 4) * z) ** 2 + 1)
                                      + 2 * (1 + r * r / 4) * z) ** 2 / (1 + r * r / 4) ** 2,
        "perturbed": lambda m, z, r: (m.sqrt((1 + r * r) * z * z + 1) + 0.25 * r * r * z) ** 2
        + 0.1 * r * z ** 4 / (1 + z * z),
    }[name]
    rng = np.random.default_rng(5)
    for _ in range(8):
        z, r = rng.uniform(-2, 2), rng.uniform(0.1, 0.9)
        jet = family.phi_jet(z, r)
        for i in range(4):
            for j in range(R_MAX + 1):
                ref = mp_partial(lambda a, b: explicit(MP, a, b), z, r, i, j)
                assert abs(jet.d(i, j) - ref) <= max(1e-6 * abs(ref), 1e-8), (name, i, j)


def test_custom_family_is_jet_transparent():
    family = fam.custom_family(lambda z, r: z * z + 1.0 + r * r * z, name="c")
    jet = family.phi_jet(0.4, 0.5)
    assert jet.d(1, 2) == pytest.approx(2.0)
    assert family.phi(0.4, 0.5) == pytest.approx(0.16 + 1.0 + 0.1)


def test_domain_guards():
    family = fam.preset("g-family")
    with pytest.raises(DomainError):
        family.phi(0.1, 0.01)
    with pytest.raises(DomainError):
        family.phi(0.1, 1.0)
    with pytest.raises(DomainError):
        fam.g_family("1", "sqrt(t^2+1)", rho=1.0, r_min=2.0)
    with pytest.raises(KeyError):
        fam.preset("no-such")
    assert family.r_min == pytest.approx(0.05)


def test_describe_echoes_parameters():
    d = fam.preset("randers").describe()
    assert d["kind"] == "randers" and d["b"] == 0.3 and d["g"] == 2.0


# -- convexity ---------------------------------------------------------------------

def test_convexity_euclidean():
    rep = fam.convexity_check(fam.preset("euclidean"))
    assert rep.ok and rep.hessian_agrees
    assert rep.min_omega == pytest.approx(2.0)
    assert rep.min_lambda == pytest.approx(4.0)


def test_convexity_violation_is_reported():
    family = fam.randers_family(1.0, 1.0, "2*r")
    rep = fam.convexity_check(family, hessian_samples=40)
    assert not rep.ok and rep.hessian_agrees
    # b(r)^2 = f^2 g first fails at r = 1/2
    assert 0.5 <= rep.first_failing_r < 0.55
    z, r, omega, lam = rep.failures[0]
    phi = family.phi_jet(z, r, (2, 0), check=False)
    g = metric_matrix(phi, z, np.array([1.0, 0.0, 0.0]))
    assert np.linalg.eigvalsh(g).min() <= 0


@pytest.mark.parametrize("name", fam.PRESET_NAMES)
def test_presets_are_strongly_convex(name):
    rep = fam.convexity_check(fam.preset(name), hessian_samples=20)
    assert rep.ok and rep.hessian_agrees


def test_convexity_flags_agree_with_eigenvalues_both_ways():
    rng = np.random.default_rng(3)
    family = fam.randers_family(1.0, 1.0, "1.6*r")
    agree = seen_bad = 0
    for _ in range(200):
        z, r = rng.uniform(-3, 3), rng.uniform(0.05, 0.99)
        phi = family.phi_jet(z, r, (2, 0), check=False)
        p, pz, pzz = phi.value, phi.d(1), phi.d(2)
        flag = 2 * p - z * pz > 0 and 2 * p * pzz - pz * pz > 0
        pd = np.linalg.eigvalsh(metric_matrix(phi, z, np.array([0.6, 0.8]))).min() > 0
        agree += flag == pd
        seen_bad += not flag
    assert agree == 200 and seen_bad > 0


def test_determinant_formula_at_random_points():
    from warpfinsler.engine import determinant_formula, point_scalars
    family = fam.preset("example-2")
    rng = np.random.default_rng(4)
    for _ in range(100):
        p = fam.random_point(family, 3, rng)
        sc = point_scalars(family, p)
        det = fundamental_tensor(family, p).det
        assert abs(det - determinant_formula(sc.omega.value, sc.lam.value, 3)) / det < 1e-10


# -- rotation invariance -----------------------------------------------------------

def test_rotation_identity():
    assert fam.rotation_invariance_check(fam.preset("g-family"), 3, 10,
                                         orthogonals=[np.eye(3)]) == 0.0


def test_rotation_g_family():
    assert fam.rotation_invariance_check(fam.preset("g-family"), 3, 100) < 1e-12


def test_reflection_randers():
    reflection = np.diag([1.0, -1.0])
    assert fam.rotation_invariance_check(fam.preset("randers"), 2, 50,
                                         orthogonals=[reflection]) < 1e-12


def test_random_orthogonal_is_orthogonal():
    O = fam.random_orthogonal(4, np.random.default_rng(0))
    assert np.allclose(O @ O.T, np.eye(4), atol=1e-14)
