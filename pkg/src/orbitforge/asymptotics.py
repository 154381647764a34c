"""Entropy and binomial estimates, saddle-point coefficient estimates, and the
bounded optimization objectives used to analyze the product-family spectra.

High-precision evaluation goes through mpmath (120-bit working precision);
exact counting always stays in big integers elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

MP_PREC = 120

ENTROPY_QUARTER = 0.8112781244591328  # H(1/4)

# Observed-maximum targets for the two bounded optimization problems and the
# helper bound for the thin-r band; used by reports and the acceptance suite.
OBJECTIVE_BOUNDS = {3: 0.841, 4: 0.845}
THIN_R_BOUND = 0.828

LOG2_9_5 = math.log2(9 / 5)


def log2_int(x: int) -> float:
    """log2 of a positive big integer, accurate to ~1e-15 relative."""
    if x <= 0:
        raise ValueError("argument must be positive")
    bl = x.bit_length()
    if bl <= 53:
        return math.log2(x)
    return (bl - 53) + math.log2(x >> (bl - 53))


def log2_fraction(f: Fraction) -> float:
    return log2_int(f.numerator) - log2_int(f.denominator)


def entropy(x: float) -> float:
    """Binary entropy with the convention 0*log(0) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument {x} outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def binomial_bounds(m: int, k: int) -> tuple[float, float]:
    """Entropy sandwich: 2^(m H(k/m)) / (m+1) <= C(m,k) <= 2^(m H(k/m))."""
    if not 0 <= k <= m:
        raise ValueError("need 0 <= k <= m")
    upper = 2.0 ** (m * entropy(k / m)) if m else 1.0
    return upper / (m + 1), upper


def region6_bound(n: int, p: int) -> dict:
    """Exponent of C(n,p) against the H(1/4) cap for the small-p band."""
    if p > n // 4:
        raise ValueError("requires p <= n/4")
    expo = log2_int(math.comb(n, p)) / n if p else 0.0
    return {"n": n, "p": p, "exponent": expo, "cap": ENTROPY_QUARTER}


# --- saddle-point machinery -------------------------------------------------
#
# A composition with a Matching count, a TwoImp count and a Nand count has
# spectrum (x^2+2y^2+z^2)^A (x^2+(y+z)^2)^B (2y+z)^C2.  Substituting u = x^2,
# z = 1 gives f(u, v) whose coefficient at u^(p/2) v^q is the orbit capture.
# Critical points of h = ln f - (p/2) ln u - q ln v drive the estimate
#
#   capture ~ f(u0,v0) / (2 pi u0^(p/2+1) v0^(q+1) sqrt(det Hess_h(u0,v0)))

FAMILIES = ("matching_twoimp_nand", "twoimp_nand", "matching_nand")


@dataclass
class SaddlePoint:
    family: str
    matching: int
    two_imp: int
    nand: int
    p: int
    q: int
    r: int
    n: int
    u0: float
    v0: float
    gradient_residual: float
    hessian: tuple[tuple[float, float], tuple[float, float]]
    hessian_det: float
    log2_f: float  # log2 f(u0, v0)


def _factors(A: int, B: int, C2: int):
    """(exponent, f, f_u, f_v, f_vv) for each factor of f(u, v)."""
    out = []
    if A:
        out.append((A, lambda u, v: u + 2 * v * v + 1, 1.0, lambda v: 4 * v, 4.0))
    if B:
        out.append((B, lambda u, v: u + (v + 1) ** 2, 1.0, lambda v: 2 * (v + 1), 2.0))
    if C2:
        out.append((C2, lambda u, v: 2 * v + 1, 0.0, lambda v: 2.0, 0.0))
    return out


def _gradient(A, B, C2, p, q, u, v):
    hu = -p / (2 * u)
    hv = -q / v
    for e, f, fu, fv, _ in _factors(A, B, C2):
        val = f(u, v)
        hu += e * fu / val
        hv += e * fv(v) / val
    return hu, hv


def _hessian(A, B, C2, p, q, u, v):
    huu = p / (2 * u * u)
    hvv = q / (v * v)
    huv = 0.0
    for e, f, fu, fv, fvv in _factors(A, B, C2):
        val = f(u, v)
        dv = fv(v)
        huu -= e * (fu / val) ** 2
        huv -= e * fu * dv / val**2
        hvv += e * (fvv * val - dv * dv) / val**2
    return ((huu, huv), (huv, hvv))


def _unique_nonneg_cubic_root(c3: float, c2: float, c1: float, c0: float) -> float:
    """Root of a cubic known to cross zero exactly once on [0, inf).

    Sign-change bracketing followed by bisection to 1e-12 and two Newton
    polish steps.
    """

    def f(x):
        return ((c3 * x + c2) * x + c1) * x + c0

    hi = 1.0
    while f(hi) <= 0:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("cubic bracketing failed")
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    x = 0.5 * (lo + hi)
    for _ in range(2):
        d = (3 * c3 * x + 2 * c2) * x + c1
        if d:
            x -= f(x) / d
    return x


def critical_point(
    family: str, matching: int, two_imp: int, nand: int, p: int, q: int, r: int
) -> SaddlePoint:
    """Locate the positive critical point of h for a product family.

    matching/two_imp/nand are the block counts (nand counts single-coordinate
    blocks, so the spectrum factor is (2y+z)^nand).
    """
    A, B, C2 = matching, two_imp, nand
    n = p + q + r
    if 2 * A + 2 * B + C2 != n:
        raise ValueError("counts do not span the key")
    if family == "matching_twoimp_nand":
        # valid only on the parameter slice where A+B = 25p/32 and the v-slope
        # balances; there the critical point is exactly (16, 2)
        u0, v0 = 16.0, 2.0
    elif family == "twoimp_nand":
        if A or r <= 0 or 2 * B <= p:
            raise ValueError("twoimp_nand needs matching=0, r > 0 and 2B > p")
        beta = 2 * C2 + (2 * B - p) - 3 * q
        disc = math.sqrt(beta * beta + 8 * r * q)
        v0 = 2 * q / (beta + disc) if beta > 0 else (-beta + disc) / (4 * r)
        u0 = p * (v0 + 1) ** 2 / (2 * B - p)
    elif family == "matching_nand":
        if B or 2 * A <= p:
            raise ValueError("matching_nand needs two_imp=0 and 2A > p")
        v0 = _unique_nonneg_cubic_root(4 * r, 4 * A - 2 * p - 2 * q, 2 * C2 - 2 * q, -q)
        u0 = p * (2 * v0 * v0 + 1) / (2 * A - p)
    else:
        raise ValueError(f"unsupported family {family!r}")

    if u0 <= 0 or v0 <= 0:
        raise ArithmeticError(f"critical point ({u0}, {v0}) not strictly positive")
    gu, gv = _gradient(A, B, C2, p, q, u0, v0)
    scale = max(p / (2 * u0), q / v0, 1.0)
    residual = max(abs(gu), abs(gv)) / scale
    if family == "matching_twoimp_nand" and residual > 1e-6:
        raise ValueError(
            "counts are off the slice where (16, 2) is critical "
            f"(gradient residual {residual:.2e})"
        )
    hess = _hessian(A, B, C2, p, q, u0, v0)
    det = hess[0][0] * hess[1][1] - hess[0][1] ** 2
    with mpmath.workprec(MP_PREC):
        lf = mpmath.mpf(0)
        for e, f, _, _, _ in _factors(A, B, C2):
            lf += e * mpmath.log(f(mpmath.mpf(u0), mpmath.mpf(v0)))
        log2_f = float(lf / mpmath.log(2))
    return SaddlePoint(
        family, A, B, C2, p, q, r, n, u0, v0, residual, hess, det, log2_f
    )


def hessian_h(sp: SaddlePoint) -> tuple[tuple[float, float], tuple[float, float]]:
    return _hessian(sp.matching, sp.two_imp, sp.nand, sp.p, sp.q, sp.u0, sp.v0)


def saddle_estimate(sp: SaddlePoint) -> float:
    """log2 of the estimated capture coefficient at the saddle point."""
    if sp.hessian_det <= 0:
        raise ArithmeticError("Hessian is not positive definite at the saddle")
    log2_h = sp.log2_f - (sp.p / 2) * math.log2(sp.u0) - sp.q * math.log2(sp.v0)
    return (
        log2_h
        - math.log2(sp.u0)
        - math.log2(sp.v0)
        - math.log2(2 * math.pi)
        - 0.5 * math.log2(sp.hessian_det)
    )


# --- bounded optimization objectives ----------------------------------------

# (B-hat, C-hat) pairs for the TwoImp+Nand family and (A-hat, C-hat) pairs for
# the Matching+Nand family; hatted values are fractions of n.
R3_CONSTANTS = ((0.34, 0.16), (0.465, 0.035))
R4_CONSTANTS = ((0.34, 0.16), (0.355, 0.145))


@dataclass(frozen=True)
class ObjectiveParams:
    p_hat: float
    r_hat: float

    @property
    def q_hat(self) -> float:
        return 1.0 - self.p_hat - self.r_hat

    def __post_init__(self):
        if min(self.p_hat, self.r_hat, self.q_hat) < -1e-12:
            raise ValueError("hatted fractions must be nonnegative and sum to 1")


def _xlog2(x):
    """x * log2(x) with the limit value 0 at x = 0 (arrays or scalars)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mask = x > 0
    out[mask] = x[mask] * np.log2(x[mask])
    return out


def _r3_T(p, r, b_hat, c_hat):
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    q = 1.0 - p - r
    beta = 4 * c_hat + (2 * b_hat - p) - 3 * q
    disc = np.sqrt(beta * beta + 8 * r * q)
    # stable quadratic root: avoids cancellation when beta > 0
    v = np.where(beta > 0, 2 * q / (beta + disc), (disc - beta) / (4 * r))
    t = -_xlog2(p) - _xlog2(q) - _xlog2(r) + q
    with np.errstate(divide="ignore", invalid="ignore"):
        qlogv = np.where(q > 0, q * np.log2(np.maximum(v, 1e-300)), 0.0)
    t += qlogv - 2 * c_hat * np.log2(2 * v + 1) - (2 * b_hat - p) * np.log2(v + 1)
    t += 0.5 * _xlog2(2 * b_hat - p) + 0.5 * _xlog2(p) - b_hat * np.log2(2 * b_hat)
    return t


def _r4_v(p, r, a_hat, c_hat, iters: int = 80):
    """Vectorized unique nonnegative root of the capture cubic."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    q = 1.0 - p - r
    c3 = 4 * r
    c2 = 4 * a_hat - 2 * p - 2 * q
    c1 = 4 * c_hat - 2 * q
    c0 = -q

    def f(x):
        return ((c3 * x + c2) * x + c1) * x + c0

    lo = np.zeros_like(p)
    hi = np.full_like(p, 8.0)
    bad = f(hi) <= 0
    while np.any(bad):
        hi[bad] *= 2.0
        bad = f(hi) <= 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = f(mid) <= 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _r4_T(p, r, a_hat, c_hat):
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    q = 1.0 - p - r
    v = _r4_v(p, r, a_hat, c_hat)
    u = p * (2 * v * v + 1) / (2 * a_hat - p)
    t = -_xlog2(p) - _xlog2(q) - _xlog2(r) + q
    t -= 2 * c_hat * np.log2(2 * v + 1) + a_hat * np.log2(u + 2 * v * v + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t += np.where(p > 0, (p / 2) * np.log2(np.maximum(u, 1e-300)), 0.0)
        t += np.where(q > 0, q * np.log2(np.maximum(v, 1e-300)), 0.0)
    return t


def objective_T(region: int, params: ObjectiveParams) -> tuple[float, float]:
    """The two candidate exponent objectives T1, T2 at a hatted triple."""
    if not feasible(region, params.p_hat, params.r_hat):
        raise ValueError(f"point {params} violates the region-{region} constraints")
    if region == 3:
        return tuple(
            float(_r3_T(params.p_hat, params.r_hat, b, c)) for b, c in R3_CONSTANTS
        )
    if region == 4:
        return tuple(
            float(_r4_T(params.p_hat, params.r_hat, a, c)) for a, c in R4_CONSTANTS
        )
    raise ValueError("objective defined for regions 3 and 4 only")


def feasible(region: int, p_hat: float, r_hat: float, tol: float = 1e-12) -> bool:
    q_hat = 1.0 - p_hat - r_hat
    if min(p_hat, q_hat, r_hat) < -tol:
        return False
    if region == 3:
        return (
            0.5 - (25 / 32) * p_hat >= -tol
            and 1.25 - (25 / 32) * p_hat - 6.25 * r_hat <= tol
            and 0.25 - p_hat <= tol
        )
    if region == 4:
        return (
            0.5 - (25 / 32) * p_hat >= -tol
            and -1.25 + (25 / 16) * p_hat + 6.25 * r_hat <= tol
            and r_hat - 0.05 >= -tol
            and 0.25 - p_hat <= tol
        )
    raise ValueError("feasibility defined for regions 3 and 4 only")


def _min_T_grid(region: int, P, R):
    if region == 3:
        t = np.minimum(
            _r3_T(P, R, *R3_CONSTANTS[0]), _r3_T(P, R, *R3_CONSTANTS[1])
        )
    else:
        t = np.minimum(
            _r4_T(P, R, *R4_CONSTANTS[0]), _r4_T(P, R, *R4_CONSTANTS[1])
        )
    return t


@dataclass
class ObservedMax:
    region: int
    grid_step: float
    observed_max: float
    argmax: tuple[float, float]  # (p_hat, r_hat)
    reference_bound: float

    def to_dict(self) -> dict:
        return {
            "region": self.region,
            "grid_step": self.grid_step,
            "observed_max": self.observed_max,
            "argmax": {"p_hat": self.argmax[0], "r_hat": self.argmax[1]},
            "paper_bound": self.reference_bound,
        }


def maximize_min_T(
    region: int, grid_step: float = 1e-3, refine_iters: int = 40
) -> ObservedMax:
    """Observed maximum of min(T1, T2) over the feasible polygon.

    Dense grid scan plus local coordinate refinement.  The result is an
    observed maximum, not a certified global bound.
    """
    if region not in (3, 4):
        raise ValueError("regions 3 and 4 only")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    ps = np.arange(0.25, 0.64 + grid_step, grid_step)
    if region == 3:
        r_lo, r_hi = 0.0, 0.75
    else:
        r_lo, r_hi = 0.05, 0.2
    rs = np.arange(r_lo, r_hi + grid_step, grid_step)
    P, R = np.meshgrid(ps, rs, indexing="ij")
    mask = np.zeros_like(P, dtype=bool)
    Q = 1.0 - P - R
    if region == 3:
        mask = (
            (0.5 - (25 / 32) * P >= 0)
            & (1.25 - (25 / 32) * P - 6.25 * R <= 0)
            & (P >= 0.25)
            & (Q >= 0)
            & (R >= 0)
        )
    else:
        mask = (
            (0.5 - (25 / 32) * P >= 0)
            & (-1.25 + (25 / 16) * P + 6.25 * R <= 0)
            & (R >= 0.05)
            & (P >= 0.25)
            & (Q >= 0)
        )
    vals = np.full_like(P, -np.inf)
    vals[mask] = _min_T_grid(region, P[mask], R[mask])
    flat = int(np.argmax(vals))
    best_p, best_r = float(P.flat[flat]), float(R.flat[flat])
    best_v = float(vals.flat[flat])

    step = grid_step
    for _ in range(refine_iters):
        improved = False
        for dp, dr in ((step, 0), (-step, 0), (0, step), (0, -step)):
            cp, cr = best_p + dp, best_r + dr
            if not feasible(region, cp, cr):
                continue
            v = float(_min_T_grid(region, np.array([cp]), np.array([cr]))[0])
            if v > best_v:
                best_p, best_r, best_v = cp, cr, v
                improved = True
        if not improved:
            step *= 0.5
            if step < 1e-10:
                break
    return ObservedMax(region, grid_step, best_v, (best_p, best_r), OBJECTIVE_BOUNDS[region])


# --- thin-r band helper function ---------------------------------------------

THIN_R_EPS = Fraction(1, 20)
THIN_R_A = Fraction(71, 200)  # 0.355


def region5_g(y: float) -> float:
    """H(y) + eps*H(eps) + a - y/2 - a*H(y/(2a)) with eps=1/20, a=0.355."""
    if not 0 < y <= 0.64:
        raise ValueError("domain is (0, 0.64]")
    eps = float(THIN_R_EPS)
    a = float(THIN_R_A)
    return entropy(y) + eps * entropy(eps) + a - y / 2 - a * entropy(y / (2 * a))


def region5_g_prime(y: float) -> float:
    a = float(THIN_R_A)
    return math.log2((1 - y) / math.sqrt(2 * y * (2 * a - y)))


def region5_check(grid_points: int = 10_000) -> dict:
    """Monotonicity and endpoint report for the thin-r helper function.

    The quadratic 3y^2 - (4a+2)y + 1 has negative discriminant (checked in
    exact rationals), so g' keeps one sign; positivity is sampled on a grid.
    """
    a = THIN_R_A
    disc = (4 * a + 2) ** 2 - 12
    ys = [0.64 * (i + 1) / grid_points for i in range(grid_points)]
    derivs = [region5_g_prime(y) for y in ys]
    return {
        "g_at_064": region5_g(0.64),
        "bound": THIN_R_BOUND,
        "derivative_min": min(derivs),
        "derivative_positive": all(d > 0 for d in derivs),
        "discriminant": disc,
        "discriminant_negative": disc < 0,
        "grid_points": grid_points,
    }
