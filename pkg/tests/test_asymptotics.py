import math
import random
from fractions import Fraction

import pytest

from orbitforge import asymptotics as asy
from orbitforge.cnf import Composition
from orbitforge.core import OrbitKey
from orbitforge.spectrum import coeff_fast


def test_entropy_values():
    assert asy.entropy(0.5) == 1.0
    assert asy.entropy(0.0) == 0.0
    assert asy.entropy(1.0) == 0.0
    assert abs(asy.entropy(0.25) - 0.811278) < 1e-6
    with pytest.raises(ValueError):
        asy.entropy(1.5)


def test_binomial_bounds_examples():
    lo, hi = asy.binomial_bounds(4, 2)
    assert lo <= 6 <= hi
    lo, hi = asy.binomial_bounds(7, 7)
    assert lo <= 1 <= hi
    lo, hi = asy.binomial_bounds(100, 37)
    assert lo <= math.comb(100, 37) <= hi


def test_binomial_bounds_sandwich_all_m_le_500():
    for m in range(0, 501):
        for k in range(0, m + 1):
            lo, hi = asy.binomial_bounds(m, k)
            exact = math.comb(m, k)
            assert lo <= exact <= hi, (m, k)


def test_region2_binomial_inequality():
    for m in range(0, 401, 2):
        for k in range(0, m + 1, 2):
            assert math.comb(m, k) <= (m // 2 + 1) ** 2 * math.comb(m // 2, k // 2) ** 2


def test_log2_int_accuracy():
    for x in (1, 7, 2**60, 10**100, math.comb(2000, 777)):
        approx = asy.log2_int(x)
        # bracketing: 2^approx within one part in 1e12 of x
        assert abs(approx - math.log2(float(x))) < 1e-9 if x < 10**300 else True
        assert 2.0 ** (approx - asy.log2_int(x + x)) == pytest.approx(0.5, rel=1e-9)


def _r1_params(n):
    p, q, r = n // 2, 3 * n // 8, n // 8
    return (5 * n // 64, 5 * n // 16, 7 * n // 64, p, q, r)


def test_critical_point_r1_is_16_2():
    rng = random.Random(100)
    checked = 0
    while checked < 20:
        # random orbit on the region-1 parameter slice
        n = 64 * rng.randint(2, 30)
        p = 32 * rng.randint(1, (16 * n // 25) // 32)
        lo4 = -(-max(0, -(-(40 * n - 50 * p) // 200)) // 4)
        hi4 = ((40 * n - 25 * p) // 200) // 4
        if lo4 > hi4:
            continue
        r = 4 * rng.randint(lo4, hi4)
        q = n - p - r
        A = (40 * n - 25 * p - 200 * r) // 32
        B = (-40 * n + 50 * p + 200 * r) // 32
        C2 = (16 * n - 25 * p) // 16
        if min(A, B, C2, q) < 0:
            continue
        sp = asy.critical_point("matching_twoimp_nand", A, B, C2, p, q, r)
        assert (sp.u0, sp.v0) == (16.0, 2.0)
        assert sp.gradient_residual < 1e-9
        assert sp.hessian_det > 0
        checked += 1


def test_critical_point_r3_example():
    sp = asy.critical_point("twoimp_nand", 0, 680, 640, 600, 1000, 400)
    assert abs(sp.v0 - 1.8689) < 1e-3
    assert sp.gradient_residual < 1e-9
    # beta for these parameters is -960
    beta = 2 * 640 + (2 * 680 - 600) - 3 * 1000
    assert beta == -960


def test_critical_point_r4_cubic_example():
    v = asy._unique_nonneg_cubic_root(0.24, -0.52, -0.44, -0.54)
    assert abs(v - 3.02) < 5e-3


def test_critical_point_gradient_residuals_random():
    rng = random.Random(200)
    count = 0
    while count < 100:
        n = 200 * rng.randint(1, 10)
        p = 2 * rng.randint(n // 8, 8 * n // 25)
        r = rng.randint(1, n - p - 1) if n - p - 1 >= 1 else 0
        q = n - p - r
        if q < 1 or r < 1:
            continue
        if count % 2 == 0:
            b, c2 = (17 * n // 50, 2 * (4 * n // 25))
            if 2 * b <= p:
                continue
            sp = asy.critical_point("twoimp_nand", 0, b, c2, p, q, r)
        else:
            a, c2 = (71 * n // 200, 2 * (29 * n // 200))
            if 2 * a <= p:
                continue
            sp = asy.critical_point("matching_nand", a, 0, c2, p, q, r)
        assert sp.gradient_residual < 1e-9, sp
        assert sp.hessian_det > 0
        count += 1


def test_cubic_unique_sign_change():
    rng = random.Random(300)
    for _ in range(100):
        n = 200
        p = 2 * rng.randint(n // 8, 8 * n // 25)
        r = rng.randint(n // 20, n // 5)
        q = n - p - r
        if q <= 0:
            continue
        for a_hat, c_hat in asy.R4_CONSTANTS:
            a, c = a_hat * n, c_hat * n
            if 2 * a <= p:
                continue
            c3, c2, c1, c0 = 4 * r, 4 * a - 2 * p - 2 * q, 4 * c - 2 * q, -q
            f = lambda x: ((c3 * x + c2) * x + c1) * x + c0
            xs = [i * 0.01 for i in range(1, 1000)]
            signs = [f(x) > 0 for x in xs]
            changes = sum(1 for s1, s2 in zip(signs, signs[1:]) if s1 != s2)
            assert changes == 1


def test_hessian_matches_finite_differences():
    sp = asy.critical_point("twoimp_nand", 0, 680, 640, 600, 1000, 400)
    A, B, C2, p, q = sp.matching, sp.two_imp, sp.nand, sp.p, sp.q

    def h(u, v):
        val = -p / 2 * math.log(u) - q * math.log(v)
        val += B * math.log(u + (v + 1) ** 2) + C2 * math.log(2 * v + 1)
        return val

    # step balances truncation against float64 rounding on h ~ 1e3
    eps = 1e-4
    u0, v0 = sp.u0, sp.v0
    fd_uu = (h(u0 + eps, v0) - 2 * h(u0, v0) + h(u0 - eps, v0)) / eps**2
    fd_vv = (h(u0, v0 + eps) - 2 * h(u0, v0) + h(u0, v0 - eps)) / eps**2
    fd_uv = (
        h(u0 + eps, v0 + eps) - h(u0 + eps, v0 - eps) - h(u0 - eps, v0 + eps) + h(u0 - eps, v0 - eps)
    ) / (4 * eps**2)
    (huu, huv), (_, hvv) = sp.hessian
    assert huu == pytest.approx(fd_uu, rel=1e-4)
    assert hvv == pytest.approx(fd_vv, rel=1e-4)
    assert huv == pytest.approx(fd_uv, rel=1e-4, abs=1e-6)


def test_hessian_scaling_linearity():
    # entries of the Hessian of h scale linearly with the counts and exponents
    sp1 = asy.critical_point("twoimp_nand", 0, 680, 640, 600, 1000, 400)
    sp2 = asy.critical_point("twoimp_nand", 0, 1360, 1280, 1200, 2000, 800)
    for i in range(2):
        for j in range(2):
            assert sp2.hessian[i][j] == pytest.approx(2 * sp1.hessian[i][j], rel=1e-9)


def test_saddle_estimate_r1_accuracy_and_improvement():
    errors = []
    for n in (512, 1024, 2048):
        A, B, C2_half, p, q, r = _r1_params(n)
        C2 = 2 * C2_half
        sp = asy.critical_point("matching_twoimp_nand", A, B, C2, p, q, r)
        est = asy.saddle_estimate(sp)
        exact = coeff_fast(
            Composition(matching=A, two_imp=B, nand=C2), OrbitKey(p, q, r, n)
        )
        rel = abs(2.0 ** (est - asy.log2_int(exact)) - 1.0)
        errors.append(rel)
    assert all(e < 0.25 for e in errors)
    assert errors[0] > errors[1] > errors[2]


def test_saddle_estimate_leading_order():
    # log2(estimate) tracks n*log2(5) - 2p - q within a slowly growing term
    for n in (512, 2048):
        A, B, C2_half, p, q, r = _r1_params(n)
        sp = asy.critical_point("matching_twoimp_nand", A, B, 2 * C2_half, p, q, r)
        est = asy.saddle_estimate(sp)
        assert abs(est - (n * math.log2(5) - 2 * p - q)) < 4 * math.log2(n)


def test_objective_r3_spec_point():
    t1, t2 = asy.objective_T(3, asy.ObjectiveParams(0.32, 0.16))
    assert min(t1, t2) <= 0.841


def test_objective_r3_degenerate_q():
    p_hat = 0.3
    r_hat = 1.0 - p_hat - 1e-9
    t1, t2 = asy.objective_T(3, asy.ObjectiveParams(p_hat, r_hat))
    assert math.isfinite(t1) and math.isfinite(t2)


def test_objective_r4_feasible_sample():
    rng = random.Random(400)
    for _ in range(50):
        p_hat = rng.uniform(0.25, 0.6)
        r_lo, r_hi = 0.05, 0.2 - p_hat / 4
        if r_lo > r_hi:
            continue
        r_hat = rng.uniform(r_lo, r_hi)
        t1, t2 = asy.objective_T(4, asy.ObjectiveParams(p_hat, r_hat))
        assert min(t1, t2) <= 0.845


def test_objective_rejects_infeasible():
    with pytest.raises(ValueError):
        asy.objective_T(3, asy.ObjectiveParams(0.1, 0.3))


def test_region5_helper():
    assert asy.region5_g(0.64) <= 0.828
    assert abs(asy.region5_g(0.64) - 0.8271) < 1e-3
    report = asy.region5_check(grid_points=10_000)
    assert report["derivative_positive"]
    assert report["discriminant"] == Fraction(171, 50) ** 2 - 12
    assert report["discriminant_negative"]
    assert asy.region5_g_prime(0.01) > 0 and asy.region5_g_prime(0.64) > 0


def test_region6_bound():
    rep = asy.region6_bound(32, 8)
    # log2 C(32,8) / 32 exactly
    assert rep["exponent"] == pytest.approx(math.log2(math.comb(32, 8)) / 32, rel=1e-12)
    assert abs(rep["exponent"] - 0.729) < 1e-3
    assert rep["exponent"] <= asy.ENTROPY_QUARTER
    assert asy.region6_bound(10, 0)["exponent"] == 0.0
    rep = asy.region6_bound(2000, 500)
    assert rep["exponent"] <= 0.8113
