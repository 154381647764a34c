"""Six-region orbit classification, per-region construction recipes, padding,
exact ratio reports, and the certification driver.

Region membership is decided in exact integer arithmetic (all constraints are
linear with denominators dividing 160).  Each region carries a recipe that
turns an orbit key into one or two block compositions; orbits off the recipe's
divisibility lattice are first reduced by Id-block padding.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .asymptotics import LOG2_9_5, log2_fraction
from .cnf import Composition
from .core import OrbitKey, orbit_size
from .spectrum import coeff_fast

REGION_IDS = (1, 2, 3, 4, 5, 6)

# Denominators of the recipe constants (0.34, 0.16, 0.465, 0.035, 0.355,
# 0.145) share the lcm 200: those recipes need 200 | n after padding.
_N_MODULUS_345 = 200


def _in_region(rid: int, n: int, p: int, r: int) -> bool:
    if rid == 1:
        return 16 * n - 25 * p >= 0 and 40 * n - 25 * p - 200 * r >= 0 and -40 * n + 50 * p + 200 * r >= 0
    if rid == 2:
        return 16 * n - 25 * p <= 0
    if rid == 3:
        return 16 * n - 25 * p >= 0 and 40 * n - 25 * p - 200 * r <= 0 and n - 4 * p <= 0
    if rid == 4:
        return (
            16 * n - 25 * p >= 0
            and -40 * n + 50 * p + 200 * r <= 0
            and 20 * r - n >= 0
            and n - 4 * p <= 0
        )
    if rid == 5:
        return 16 * n - 25 * p >= 0 and 20 * r - n <= 0
    if rid == 6:
        return n - 4 * p >= 0
    raise ValueError(f"unknown region {rid}")


def classify(key: OrbitKey) -> frozenset[int]:
    """Regions containing the key; never empty (the six regions cover)."""
    got = frozenset(r for r in REGION_IDS if _in_region(r, key.n, key.p, key.r))
    assert got, f"coverage violated at {key}"
    return got


def verify_coverage(n_max: int) -> bool:
    """Exhaustive integer check that every triple up to n_max is covered."""
    import numpy as np

    for n in range(1, n_max + 1):
        p, r = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        valid = p + r <= n
        p = p[valid].astype(np.int64)
        r = r[valid].astype(np.int64)
        covered = (
            ((16 * n - 25 * p >= 0) & (40 * n - 25 * p - 200 * r >= 0) & (-40 * n + 50 * p + 200 * r >= 0))
            | (16 * n - 25 * p <= 0)
            | ((16 * n - 25 * p >= 0) & (40 * n - 25 * p - 200 * r <= 0) & (n - 4 * p <= 0))
            | (
                (16 * n - 25 * p >= 0)
                & (-40 * n + 50 * p + 200 * r <= 0)
                & (20 * r - n >= 0)
                & (n - 4 * p <= 0)
            )
            | ((16 * n - 25 * p >= 0) & (20 * r - n <= 0))
            | (n - 4 * p >= 0)
        )
        if not bool(covered.all()):
            return False
    return True


@dataclass(frozen=True)
class RegionConfig:
    """Moduli and recipe fractions.

    `moduli` are the blanket per-region divisibility requirements under which
    the exponent bound is proved; certification pads with the weaker
    `pad placement` rules below, which are the minimal conditions for the
    recipes to produce integral block counts.
    """

    moduli: dict[int, int] = field(
        default_factory=lambda: {1: 32, 2: 4, 3: 2000, 4: 2000, 5: 2000, 6: 2000}
    )
    slack: float = 0.01

    @property
    def exponent_budget(self) -> float:
        return LOG2_9_5 + self.slack


DEFAULT_CONFIG = RegionConfig()


def _frac_count(num: int, den: int, what: str) -> int:
    if num % den:
        raise ValueError(f"{what}: {num}/{den} is not an integer; pad the orbit first")
    return num // den


def region_composition(rid: int, key: OrbitKey) -> list[Composition]:
    """Recipe compositions for an orbit on the region's divisibility lattice.

    Regions 3 and 4 return two candidates; the caller keeps whichever captures
    more of the orbit.  Raises ValueError on divisibility violations (route
    through padding first).
    """
    n, p, r = key.n, key.p, key.r
    if rid == 1:
        a = _frac_count(40 * n - 25 * p - 200 * r, 32, "region 1 Matching count")
        b = _frac_count(-40 * n + 50 * p + 200 * r, 32, "region 1 TwoImp count")
        c = _frac_count(16 * n - 25 * p, 16, "region 1 Nand count")
        if min(a, b, c) < 0:
            raise ValueError(f"region 1 recipe undefined at {key}")
        return [Composition(matching=a, two_imp=b, nand=c)]
    if rid == 2:
        return [Composition(matching=_frac_count(n, 2, "region 2"))]
    if rid == 3:
        if r == n:
            return [Composition(id0=n)]
        out = []
        for bf, cf in ((Fraction(17, 50), Fraction(4, 25)), (Fraction(93, 200), Fraction(7, 200))):
            b = _frac_count(bf.numerator * n, bf.denominator, "region 3 TwoImp count")
            c = _frac_count(cf.numerator * n, cf.denominator, "region 3 Nand pairs")
            out.append(Composition(two_imp=b, nand=2 * c))
        return out
    if rid == 4:
        out = []
        for af, cf in ((Fraction(17, 50), Fraction(4, 25)), (Fraction(71, 200), Fraction(29, 200))):
            a = _frac_count(af.numerator * n, af.denominator, "region 4 Matching count")
            c = _frac_count(cf.numerator * n, cf.denominator, "region 4 Nand pairs")
            out.append(Composition(matching=a, nand=2 * c))
        return out
    if rid == 5:
        a = _frac_count(71 * n, 200, "region 5 Matching count")
        c = _frac_count(29 * n, 200, "region 5 Nand pairs")
        return [Composition(matching=a, nand=2 * c)]
    if rid == 6:
        if p % 2:
            raise ValueError("region 6 recipe needs even p; pad the orbit first")
        return [Composition(matching=p // 2, nand=n - p)]
    raise ValueError(f"unknown region {rid}")


@dataclass(frozen=True)
class Padding:
    id2: int
    id1: int
    id0: int

    @property
    def total(self) -> int:
        return self.id2 + self.id1 + self.id0


def pad_construction(key: OrbitKey, m: int) -> tuple[OrbitKey, Padding]:
    """Floor p, q, r to multiples of m; the residues become Id-block padding.

    A padded composition's capture at the original key is 2^(q-q') times the
    core capture at the floored key.
    """
    if m < 1:
        raise ValueError("modulus must be >= 1")
    p2, q2, r2 = (key.p // m) * m, (key.q // m) * m, (key.r // m) * m
    core = OrbitKey(p2, q2, r2, p2 + q2 + r2)
    return core, Padding(key.p - p2, key.q - q2, key.r - r2)


def _pad_for_region(key: OrbitKey, rid: int) -> tuple[OrbitKey, Padding] | None:
    """Minimal padding that puts the key on the region's recipe lattice."""
    if rid == 1:
        # integral counts need 32 | p and 4 | q, r (then 4 | n follows)
        dp, dq, dr = key.p % 32, key.q % 4, key.r % 4
        core = OrbitKey(key.p - dp, key.q - dq, key.r - dr, key.n - dp - dq - dr)
        return (core, Padding(dp, dq, dr)) if core.n > 0 else None
    if rid in (2, 6):
        dp = key.p % 2
        dq = key.q % 2 if rid == 2 else 0
        dr = key.r % 2 if rid == 2 else 0
        core = OrbitKey(key.p - dp, key.q - dq, key.r - dr, key.n - dp - dq - dr)
        return (core, Padding(dp, dq, dr)) if core.n > 0 else None
    if rid in (3, 4, 5):
        dp = key.p % 2
        t = (key.n - dp) % _N_MODULUS_345
        dq = min(t, key.q)
        dr = t - dq
        if dr > key.r:
            core, pad = pad_construction(key, _N_MODULUS_345)
            return (core, pad) if core.n > 0 else None
        core = OrbitKey(key.p - dp, key.q - dq, key.r - dr, key.n - dp - dq - dr)
        return (core, Padding(dp, dq, dr)) if core.n > 0 else None
    raise ValueError(f"unknown region {rid}")


def _with_padding(core_comp: Composition, pad: Padding) -> Composition:
    return Composition(
        matching=core_comp.matching,
        two_imp=core_comp.two_imp,
        nand=core_comp.nand,
        id2=core_comp.id2 + pad.id2,
        id1=core_comp.id1 + pad.id1,
        id0=core_comp.id0 + pad.id0,
    )


@dataclass
class RatioReport:
    """Exact certificate: how much of one orbit a composition captures."""

    key: OrbitKey
    region: int | None
    composition: Composition
    captured: int
    orbit_size: int
    ratio: Fraction | None  # None marks zero capture (infinite ratio)
    exponent: float

    def row(self) -> list:
        return [
            self.key.n,
            self.key.p,
            self.key.q,
            self.key.r,
            self.region if self.region is not None else "",
            str(self.composition),
            str(self.captured),
            str(self.orbit_size),
            f"{self.exponent:.6f}" if self.captured else "inf",
        ]

    def to_dict(self) -> dict:
        return {
            "n": self.key.n,
            "p": self.key.p,
            "q": self.key.q,
            "r": self.key.r,
            "region": self.region,
            "composition": str(self.composition),
            "captured": str(self.captured),
            "orbit_size": str(self.orbit_size),
            "exponent": self.exponent if self.captured else None,
        }


CSV_HEADER = ["n", "p", "q", "r", "region", "composition", "captured", "orbit_size", "exponent"]


def ratio(candidates, key: OrbitKey, region: int | None = None) -> RatioReport:
    """Best exact capture ratio among candidate compositions at a key."""
    if isinstance(candidates, Composition):
        candidates = [candidates]
    if not candidates:
        raise ValueError("no candidate compositions")
    size = orbit_size(key)
    best_comp, best_cap = None, -1
    for comp in candidates:
        cap = coeff_fast(comp, key)
        if cap > best_cap:
            best_comp, best_cap = comp, cap
    if best_cap > 0:
        rat = Fraction(size, best_cap)
        expo = log2_fraction(rat) / key.n
    else:
        rat, expo = None, math.inf
    return RatioReport(key, region, best_comp, best_cap, size, rat, expo)


def construct_candidates(key: OrbitKey) -> list[RatioReport]:
    """One ratio report per applicable region, plus two universal fallbacks."""
    reports = []
    for rid in sorted(classify(key)):
        padded = _pad_for_region(key, rid)
        if padded is None:
            continue
        core, pad = padded
        try:
            comps = region_composition(rid, core)
        except ValueError:
            continue
        full = [_with_padding(c, pad) for c in comps]
        reports.append(ratio(full, key, region=rid))
    # always-valid fallbacks: Matching^(p/2) Nand^(n-p) (with one Id2 when p
    # is odd), and the plain monomial construction
    dp = key.p % 2
    fb = Composition(matching=(key.p - dp) // 2, nand=key.n - key.p, id2=dp)
    reports.append(ratio(fb, key, region=None))
    reports.append(ratio(Composition(id2=key.p, id1=key.q, id0=key.r), key, region=None))
    return reports


def construct_best(key: OrbitKey) -> RatioReport:
    """Minimum-ratio construction across regions; ties break by region index."""
    reports = construct_candidates(key)

    def rank(rep: RatioReport):
        infinite = rep.ratio is None
        return (infinite, rep.ratio or 0, rep.region if rep.region is not None else 99)

    return min(reports, key=rank)


# --- certification -----------------------------------------------------------


@dataclass
class CertifyResult:
    n: int
    reports: list[RatioReport]
    max_exponent: float
    budget: float

    @property
    def ok(self) -> bool:
        return self.max_exponent <= self.budget

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(CSV_HEADER)
        for rep in self.reports:
            w.writerow(rep.row())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "max_exponent": self.max_exponent,
                "budget": self.budget,
                "ok": self.ok,
                "orbits": [rep.to_dict() for rep in self.reports],
            },
            indent=2,
        )


def _rand_even(rng: random.Random, lo: int, hi: int) -> int | None:
    lo = lo + (lo % 2)
    if lo > hi:
        return None
    return lo + 2 * rng.randint(0, (hi - lo) // 2)


def stratified_sample(
    n: int, per_region: int, seed: int = 0
) -> list[tuple[int, OrbitKey]]:
    """Sample orbits per region, preferring keys that need little padding.

    Regions 3-5 need 200 | n for padding-free recipes; sampling favours even p
    (odd p costs one Id2 pad and is exercised through region 6).
    """
    rng = random.Random(seed)
    out: list[tuple[int, OrbitKey]] = []
    for rid in REGION_IDS:
        picked: set[OrbitKey] = set()
        attempts = 0
        while len(picked) < per_region and attempts < 10_000:
            attempts += 1
            key = _sample_region_key(rid, n, rng, want_odd=(rid == 6 and len(picked) % 3 == 2))
            if key is None or key in picked:
                continue
            picked.add(key)
            out.append((rid, key))
    return out


def _sample_region_key(rid: int, n: int, rng: random.Random, want_odd: bool = False):
    if rid == 1:
        pmax = (16 * n // 25) // 32
        if pmax < 1:
            return None
        p = 32 * rng.randint(0, pmax)
        r_lo = max(0, -(-(40 * n - 50 * p) // 200))  # ceil
        r_hi = (40 * n - 25 * p) // 200
        r_lo4, r_hi4 = -(-r_lo // 4), r_hi // 4
        if r_lo4 > r_hi4:
            return None
        r = 4 * rng.randint(r_lo4, r_hi4)
        if n - p - r < 0 or not _in_region(1, n, p, r):
            return None
        return OrbitKey(p, n - p - r, r, n)
    if rid == 2:
        p = _rand_even(rng, -(-16 * n // 25), n)
        if p is None:
            return None
        q = _rand_even(rng, 0, n - p)
        if q is None:
            return None
        return OrbitKey(p, q, n - p - q, n)
    if rid == 3:
        p = _rand_even(rng, -(-n // 4), 16 * n // 25)
        if p is None:
            return None
        r_lo = max(0, -(-(40 * n - 25 * p) // 200))
        if r_lo > n - p:
            return None
        r = rng.randint(r_lo, n - p)
        return OrbitKey(p, n - p - r, r, n) if _in_region(3, n, p, r) else None
    if rid == 4:
        p = _rand_even(rng, -(-n // 4), 3 * n // 5)
        if p is None:
            return None
        r_lo = -(-n // 20)
        r_hi = (40 * n - 50 * p) // 200
        if r_lo > r_hi:
            return None
        r = rng.randint(r_lo, r_hi)
        return OrbitKey(p, n - p - r, r, n) if _in_region(4, n, p, r) else None
    if rid == 5:
        p = _rand_even(rng, 0, 16 * n // 25)
        if p is None:
            return None
        r = rng.randint(0, n // 20)
        if n - p - r < 0:
            return None
        return OrbitKey(p, n - p - r, r, n)
    if rid == 6:
        p = rng.randint(0, n // 4)
        if want_odd and p % 2 == 0:
            p = min(p + 1, n // 4)
        r = rng.randint(0, n - p)
        return OrbitKey(p, n - p - r, r, n)
    raise ValueError(f"unknown region {rid}")


def certify(
    n: int,
    policy: str = "auto",
    per_region: int = 10,
    seed: int = 0,
    config: RegionConfig = DEFAULT_CONFIG,
    progress=None,
) -> CertifyResult:
    """Certify exact capture ratios for orbits of size-n inputs.

    policy "all" visits every orbit (intended for n <= 200); "stratified"
    samples per region; "auto" picks between them at n = 200.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if policy == "auto":
        policy = "all" if n <= 200 else "stratified"
    if policy == "all":
        from .core import enumerate_orbits

        keys = [(None, k) for k in enumerate_orbits(n)]
    elif policy == "stratified":
        keys = stratified_sample(n, per_region, seed)
    else:
        raise ValueError(f"unknown policy {policy!r}")

    reports = []
    for i, (_, key) in enumerate(keys):
        reports.append(construct_best(key))
        if progress and (i + 1) % 25 == 0:
            progress(i + 1, len(keys))
    max_expo = max((rep.exponent for rep in reports), default=0.0)
    return CertifyResult(n, reports, max_expo, config.exponent_budget)
