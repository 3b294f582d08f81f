import math
from fractions import Fraction as F

import pytest

from lelong.demailly import ApproxBasis, basis_norms, lelong_bounds_check, sandwich_check, um_eval
from lelong.numeric_oracle import RadialSchedule, classical_lelong_numeric, directional_lelong_numeric
from lelong.poly_geom import ExponentSet, sublevel_vertices
from lelong.weights import CoordLog, MaxOf, PolyLog, Scale, indicator_support

SCHED = RadialSchedule(levels=(-10.0, -20.0, -40.0), angular_nodes=64)


def half_log():
    return Scale(F(1, 2), CoordLog(1))


def log_z():
    return CoordLog(1)


def max_log():
    return MaxOf.of(CoordLog(1), CoordLog(2))


def admissible_alphas(basis):
    return sorted(a for a, _ in basis.entries)


# ---------------------------------------------------------------------------
# admissibility, one variable: closed-form radial integrals


def test_basis_half_log_m2():
    # integrand r^(2a+1-m): converges iff 2a + 2 - m > 0
    B = basis_norms(half_log(), 2, degree_cap=4, dim=1)
    assert admissible_alphas(B) == [(1,), (2,), (3,), (4,)]


def test_basis_log_m1_norms():
    # c_alpha = 2 pi / (2 alpha) for u = log|z|, m = 1
    B = basis_norms(log_z(), 1, degree_cap=3, dim=1)
    assert admissible_alphas(B) == [(1,), (2,), (3,)]
    for (a,), c in B.entries:
        assert c == pytest.approx(2 * math.pi / (2 * a), rel=1e-10)


def test_basis_minimal_degree_formula():
    # smallest admissible degree is the smallest integer with
    # 2a + 2 - 2 m p/q > 0
    for p, q in [(1, 2), (1, 1), (2, 3)]:
        u = Scale(F(p, q), CoordLog(1))
        for m in range(1, 9):
            B = basis_norms(u, m, degree_cap=14, dim=1)
            alphas = admissible_alphas(B)
            want = next(a for a in range(30) if 2 * a + 2 - 2 * m * p / q > 1e-12)
            assert alphas[0] == (want,), (p, q, m)
            # admissibility is upward closed in the degree
            assert alphas == [(a,) for a in range(want, 15)]


# ---------------------------------------------------------------------------
# admissibility, two variables


def test_basis_max_log_includes_constant_at_m1():
    # the norm integral of the constant against max(log|z1|, log|z2|) at
    # m = 1 is (2 pi)^2 * 1/2: finite, so (0,0) is admissible
    B = basis_norms(max_log(), 1, degree_cap=2, dim=2)
    alphas = admissible_alphas(B)
    assert (0, 0) in alphas
    c00 = dict(B.entries)[(0, 0)]
    assert c00 == pytest.approx((2 * math.pi) ** 2 * 0.5, rel=1e-2)
    assert alphas == [(i, j) for i in range(3) for j in range(3)]


def test_basis_max_log_excludes_constant_at_m2():
    B = basis_norms(max_log(), 2, degree_cap=2, dim=2)
    alphas = admissible_alphas(B)
    assert (0, 0) not in alphas
    assert all(sum(a) >= 1 for a in alphas)


def _exact_admissible(u_expr, m, alpha, n=2):
    """Interior-membership oracle: alpha+1 strictly inside m times the
    Newton polyhedron, checked on the sublevel vertices of the support."""
    S = indicator_support(u_expr, n)
    shifted = tuple(F(a + 1) for a in alpha)
    for t0 in sublevel_vertices(S).extreme_points:
        if sum(s * t for s, t in zip(shifted, t0)) >= -m:
            return False
    return True


def test_basis_matches_polyhedral_oracle_n2():
    u = MaxOf.of(Scale(F(2), CoordLog(1)), Scale(F(3), CoordLog(2)))
    for m in (1, 2, 3):
        B = basis_norms(u, m, degree_cap=6, dim=2)
        got = set(admissible_alphas(B))
        want = {
            (i, j)
            for i in range(7)
            for j in range(7)
            if _exact_admissible(u, m, (i, j))
        }
        assert got == want, f"m={m}"


def test_basis_admissibility_monotone_in_alpha():
    B = basis_norms(max_log(), 2, degree_cap=4, dim=2)
    admitted = set(admissible_alphas(B))
    for (i, j) in admitted:
        for step in ((1, 0), (0, 1)):
            up = (i + step[0], j + step[1])
            if up[0] <= 4 and up[1] <= 4:
                assert up in admitted


def test_basis_rejects_theta_dependent_weight():
    with pytest.raises(ValueError, match="torus-invariant"):
        basis_norms(PolyLog.of([(1, (1, 0)), (1, (0, 1))]), 1, dim=2)


# ---------------------------------------------------------------------------
# evaluation of the approximants


def test_um_slope_log_z():
    B = basis_norms(log_z(), 1, degree_cap=3, dim=1)
    est = classical_lelong_numeric(B, SCHED, dim=1)
    assert est.value == pytest.approx(1.0, abs=1e-9)


def test_um_slope_half_log():
    for m, want in [(1, 0.0), (2, 0.5), (3, 1 / 3), (8, 0.5)]:
        B = basis_norms(half_log(), m, degree_cap=12, dim=1)
        est = classical_lelong_numeric(B, SCHED, dim=1)
        assert est.value == pytest.approx(want, abs=1e-9), m


def test_um_eval_against_direct_sum():
    B = basis_norms(log_z(), 1, degree_cap=3, dim=1)
    z = (0.3,)
    direct = 0.5 * math.log(
        sum(abs(z[0]) ** (2 * a) / c for (a,), c in B.entries)
    )
    assert um_eval(B, z) == pytest.approx(direct, abs=1e-12)


def test_um_empty_basis_is_bottom():
    B = ApproxBasis(m=1, degree_cap=0, entries=(), u_ref=None, dimension=1)
    assert um_eval(B, (0.5,)) == -math.inf


# ---------------------------------------------------------------------------
# sandwich report


def test_sandwich_log_z():
    rep = sandwich_check(log_z(), [1, 2, 4], degree_cap=12, dim=1)
    assert rep.passed
    assert all(math.isfinite(v) for v in rep.c1_by_m.values())


def test_sandwich_bounded_weight():
    rep = sandwich_check(PolyLog.of([(1, (0,))]), [1, 2, 4], degree_cap=12, dim=1)
    assert rep.passed


def test_sandwich_half_log_small_lower_constant():
    rep = sandwich_check(half_log(), [1], degree_cap=12, dim=1)
    assert rep.passed
    assert rep.c1_by_m[1] <= 1.0


# ---------------------------------------------------------------------------
# two-sided density bounds


def test_bounds_chain_one_variable():
    phi = ExponentSet.of([(1,)])
    for p, q in [(1, 2), (1, 1), (2, 3)]:
        u = Scale(F(p, q), CoordLog(1))
        rep = lelong_bounds_check(u, phi, [1, 2, 4, 8], degree_cap=14,
                                  sched=SCHED, tolerance=1e-6, dim=1)
        assert rep.passed, (p, q, rep.estimates_by_m)
        assert rep.exact == F(p, q)
        assert rep.tau_sum == 1


def test_bounds_chain_two_variables():
    u = MaxOf.of(Scale(F(2), CoordLog(1)), Scale(F(3), CoordLog(2)))
    phi = ExponentSet.of([(1, 0), (0, 1)])
    # probe radii deep enough that the degree cap is invisible even for
    # m = 4, whose minimal admissible degree sits one step below the cap
    deep = RadialSchedule(levels=(-15.0, -30.0, -60.0), angular_nodes=64)
    rep = lelong_bounds_check(u, phi, [1, 2, 4], degree_cap=8,
                              sched=deep, tolerance=1e-2, dim=2)
    assert rep.passed
    assert rep.exact == 2
    assert rep.tau_sum == 2
    assert rep.details["tau_caveat_wall_touching_weight"] is False
    for m, rec in rep.estimates_by_m.items():
        assert rec["estimate"] == pytest.approx(2 - 1 / m, abs=1e-2)
        # degree-cap truncation must be invisible at the probe radii
        assert rec["cap_contribution"] < 1e-10


def test_bounds_flags_wall_touching_weight():
    u = Scale(F(1, 2), CoordLog(1))
    # sublevel set of this weight has extreme points on the t2 = 0 wall
    phi = ExponentSet.of([(1, 1), (2, 0), (0, 2)])
    rep = lelong_bounds_check(u, phi, [2], degree_cap=8, sched=SCHED,
                              tolerance=1e-2, dim=2)
    assert rep.details["tau_caveat_wall_touching_weight"] is False
    phi_wall = ExponentSet.of([(1, 1), (2, 0)])
    rep = lelong_bounds_check(u, phi_wall, [2], degree_cap=8, sched=SCHED,
                              tolerance=1e-2, dim=2)
    assert rep.details["tau_caveat_wall_touching_weight"] is True


def test_approximant_profile_dominated_by_weight_profile():
    # directional densities: nu(u_m, a) <= nu(u, a) <= nu(u_m, a) + |a|/m
    u = MaxOf.of(Scale(F(2), CoordLog(1)), Scale(F(3), CoordLog(2)))
    S = indicator_support(u, 2)
    for m in (1, 2, 4):
        B = basis_norms(u, m, degree_cap=8, dim=2)
        for a in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)]:
            est = directional_lelong_numeric(B, a, SCHED).value
            exact = float(S.min_support((F(a[0]), F(a[1]))))
            assert est <= exact + 1e-6
            assert exact <= est + sum(a) / m + 1e-6
