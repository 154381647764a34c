"""Building-block discovery and composition search.

Solution sets of 2-CNFs are exactly the sets closed under coordinate-wise
ternary majority, so "all 2-CNFs" searches enumerate median-closed subsets of
the accepting assignments instead of clause sets.  The composition search
scans every way to tile n coordinates with blocks and records, per orbit, the
best capture achievable.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .asymptotics import log2_fraction
from .cnf import Composition, TwoCnf
from .core import OrbitKey, enumerate_orbits, orbit_key_of_code, orbit_size
from .spectrum import Spectrum, composition_spectrum


def _maj(a: int, b: int, c: int) -> int:
    return (a & b) | (a & c) | (b & c)


def median_closure(codes) -> frozenset[int]:
    """Smallest superset closed under coordinate-wise ternary majority."""
    cur = set(int(c) for c in codes)
    while True:
        added = set()
        items = list(cur)
        for i, a in enumerate(items):
            for j in range(i + 1, len(items)):
                b = items[j]
                for c in items[j + 1 :]:
                    m = _maj(a, b, c)
                    if m not in cur:
                        added.add(m)
        if not added:
            return frozenset(cur)
        cur |= added


def is_median_closed(codes) -> bool:
    s = set(int(c) for c in codes)
    items = list(s)
    for i, a in enumerate(items):
        for j in range(i + 1, len(items)):
            b = items[j]
            for c in items[j + 1 :]:
                if _maj(a, b, c) not in s:
                    return False
    return True


def two_cnf_for_solution_set(codes, n_coords: int) -> TwoCnf:
    """Witness 2-CNF whose solutions are exactly a median-closed set.

    Collects every width-<=2 clause satisfied by all member assignments; for
    median-closed sets this pins the set exactly (verified by enumeration).
    """
    codes = sorted(set(int(c) for c in codes))
    if not codes:
        raise ValueError("empty solution set has no witness here")
    nv = 2 * n_coords
    clauses = []
    forced = set()
    for v in range(nv):
        if all((c >> v) & 1 for c in codes):
            clauses.append((v + 1,))
            forced.add(v)
        elif all(not ((c >> v) & 1) for c in codes):
            clauses.append((-(v + 1),))
            forced.add(v)
    for v1, v2 in itertools.combinations(range(nv), 2):
        if v1 in forced or v2 in forced:
            continue
        for s1, s2 in itertools.product((1, -1), repeat=2):
            if all(
                ((c >> v1) & 1) == (s1 > 0) or ((c >> v2) & 1) == (s2 > 0)
                for c in codes
            ):
                clauses.append((s1 * (v1 + 1), s2 * (v2 + 1)))
    f = TwoCnf(n_coords, tuple(clauses))
    if sorted(f.solutions()) != codes:
        raise ValueError("set is not the solution set of any 2-CNF (not median-closed?)")
    return f


@dataclass
class ParetoEntry:
    spectrum: Spectrum
    witness: TwoCnf
    parity: int


def _parity_class(n_coords: int, parity: int) -> list[int]:
    return [
        code
        for code in range(1 << (2 * n_coords))
        if orbit_key_of_code(code, n_coords).parity == parity
    ]


def _dominates(a: Spectrum, b: Spectrum) -> bool:
    """Every coefficient of a at least matches b's."""
    return all(a.coeff_pq(p, q) >= c for (p, q), c in b.terms.items())


def _census_spectrum(codes, n_coords: int) -> Spectrum:
    census: dict[tuple[int, int], int] = {}
    for code in codes:
        k = orbit_key_of_code(code, n_coords)
        census[(k.p, k.q)] = census.get((k.p, k.q), 0) + 1
    return Spectrum(n_coords, census)


def pareto_blocks(n_coords: int, parity: int) -> list[ParetoEntry]:
    """Non-dominated 2-CNF solution-set spectra inside one parity class.

    Enumerates all median-closed subsets of the class (every 2-CNF consistent
    with the target arises this way), dedupes by spectrum, and removes
    dominated entries.
    """
    if n_coords > 2:
        raise ValueError("exhaustive block search supports 1 or 2 coordinates only")
    cls = _parity_class(n_coords, parity)
    by_spectrum: dict[tuple, frozenset[int]] = {}
    for mask in range(1, 1 << len(cls)):
        subset = [cls[i] for i in range(len(cls)) if (mask >> i) & 1]
        if not is_median_closed(subset):
            continue
        spec = _census_spectrum(subset, n_coords)
        sig = tuple(sorted(spec.terms.items()))
        prev = by_spectrum.get(sig)
        if prev is None or sorted(subset) < sorted(prev):
            by_spectrum[sig] = frozenset(subset)
    specs = [Spectrum(n_coords, dict(sig)) for sig in by_spectrum]
    entries = []
    for sig, subset in by_spectrum.items():
        spec = Spectrum(n_coords, dict(sig))
        if any(o.terms != spec.terms and _dominates(o, spec) for o in specs):
            continue
        entries.append(ParetoEntry(spec, two_cnf_for_solution_set(subset, n_coords), parity))
    entries.sort(key=lambda e: sorted(e.spectrum.terms.items()), reverse=True)
    return entries


def exact_mu(n: int, key: OrbitKey, parity: int) -> int:
    """Exact maximum orbit capture over all consistent 2-CNFs (tiny n only).

    Enumerates median-closed subsets of the parity class and maximizes the
    intersection with the orbit.
    """
    if n > 2:
        raise ValueError("exact oracle supports n <= 2 only")
    if key.n != n:
        raise ValueError("key size mismatch")
    cls = _parity_class(n, parity)
    in_orbit = [orbit_key_of_code(c, n) == key for c in cls]
    best = 0
    for mask in range(1, 1 << len(cls)):
        subset = [cls[i] for i in range(len(cls)) if (mask >> i) & 1]
        hits = sum(1 for i in range(len(cls)) if (mask >> i) & 1 and in_orbit[i])
        if hits > best and is_median_closed(subset):
            best = hits
    return best


def rho_star(n: int, parity: int) -> Fraction:
    """max over parity-matching orbits of |orbit| / mu (tiny n only)."""
    best = Fraction(0)
    for key in enumerate_orbits(n):
        if key.parity != parity:
            continue
        mu = exact_mu(n, key, parity)
        if mu == 0:
            raise ArithmeticError(f"orbit {key} has parity {parity} but mu = 0")
        best = max(best, Fraction(orbit_size(key), mu))
    return best


# --- composition search -------------------------------------------------------

ALL_BLOCKS = frozenset({"matching", "two_imp", "nand", "id2", "id1", "id0"})


@dataclass
class OrbitBest:
    key: OrbitKey
    composition: Composition
    captured: int
    exponent: float


@dataclass
class SearchResult:
    n: int
    c: float
    hardest: OrbitKey | None
    per_orbit: list[OrbitBest]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "p", "q", "r", "composition", "captured", "exponent"])
        for ob in self.per_orbit:
            w.writerow(
                [
                    self.n,
                    ob.key.p,
                    ob.key.q,
                    ob.key.r,
                    str(ob.composition),
                    str(ob.captured),
                    f"{ob.exponent:.7f}",
                ]
            )
        return buf.getvalue()

    def summary(self) -> str:
        triple = self.hardest.triple() if self.hardest else None
        return f"n={self.n}  c={self.c:.7f}  hardest orbit (p,q,r)={triple}"


def _row_for(slices: dict[int, list[int]], p: int, degree: int) -> list[int]:
    row = slices.get(p)
    if row is None:
        row = [0] * (degree - p + 1)
        slices[p] = row
    return row


def _family_scan(m: int):
    """Yield ((a, b, c), slices) for every Matching^a TwoImp^b Nand^c tiling
    of m coordinates; slices maps x-exponent p to y-coefficient lists.

    Neighbouring families differ by one block, so each is derived from the
    previous with one quadratic multiply and one exact division by (2y+z)^2,
    costing O(#terms) big-integer operations per family.
    """

    def mul_quadratic(sl: dict[int, list[int]], degree: int, twoimp: bool):
        # multiply by x^2 + 2y^2 + z^2 (Matching) or x^2 + y^2 + 2yz + z^2
        out: dict[int, list[int]] = {}
        for p, row in sl.items():
            tgt = _row_for(out, p, degree + 2)
            tgt2 = _row_for(out, p + 2, degree + 2)
            for w, v in enumerate(row):
                if not v:
                    continue
                tgt2[w] += v  # x^2
                tgt[w] += v  # z^2
                if twoimp:
                    tgt[w + 1] += 2 * v  # 2yz
                    tgt[w + 2] += v  # y^2
                else:
                    tgt[w + 2] += 2 * v  # 2y^2
        return out

    def div_nand_pair(sl: dict[int, list[int]]) -> dict[int, list[int]]:
        out = {}
        for p, row in sl.items():
            cur = row
            for _ in range(2):  # exact division by (2y+z)
                nxt = [0] * (len(cur) - 1)
                prev = 0
                for w in range(len(nxt)):
                    prev = cur[w] - 2 * prev
                    nxt[w] = prev
                cur = nxt
            if any(cur):
                out[p] = cur
        return out

    head = {0: [math.comb(m, w) << w for w in range(m + 1)]}  # Nand^m
    b = 0
    while True:
        sl = head
        a = 0
        c = m - 2 * b
        while True:
            yield (a, b, c), sl
            if c < 2:
                break
            sl = div_nand_pair(mul_quadratic(sl, m, twoimp=False))
            a += 1
            c -= 2
        if m - 2 * b < 2:
            break
        head = div_nand_pair(mul_quadratic(head, m, twoimp=True))
        b += 1


def _scan_update(m: int, id2: int, best: dict, allowed=None):
    """Run the family scan over m coordinates, shifting keys by id2 blocks."""
    for (a, b, c), slices in _family_scan(m):
        if allowed is not None:
            if (a and "matching" not in allowed) or (b and "two_imp" not in allowed):
                continue
            if c and "nand" not in allowed:
                continue
        comp = Composition(matching=a, two_imp=b, nand=c, id2=id2)
        for p, row in slices.items():
            for w, v in enumerate(row):
                if not v:
                    continue
                cur = best.get((p + id2, w))
                if cur is None or v > cur[0]:
                    best[(p + id2, w)] = (v, comp)


def compose_search(
    n: int,
    blocks: frozenset[str] | set[str] | None = None,
    parity: int | None = None,
    prune_dominated: bool = True,
    cap: int = 200,
) -> SearchResult:
    """Best capture per orbit over all block compositions, and the exponent
    c = max over orbits of log2(orbit size / captured) / n.

    parity restricts the orbit set (a composition can only capture orbits of
    its own parity, so this selects which side of the function is served);
    None covers both classes.

    With the default block set, Id0/Id1 and repeated Id2 blocks are
    coefficient-wise dominated (Nand majorizes both Id1 and Id0; Matching
    majorizes a pair of Id2), so the scan visits Matching/TwoImp/Nand cores
    with at most one Id2 for odd-parity orbits.  prune_dominated=False forces
    the explicit enumeration over all count vectors.
    """
    if not 1 <= n <= cap:
        raise ValueError(f"n={n} outside 1..{cap}")
    blocks = ALL_BLOCKS if blocks is None else frozenset(blocks)

    best: dict[tuple[int, int], tuple[int, Composition]] = {}
    if prune_dominated and blocks == ALL_BLOCKS:
        if parity != 1:
            _scan_update(n, 0, best)
        if parity != 0:
            _scan_update(n - 1, 1, best)
    else:
        _brute_scan(n, blocks, best)

    per_orbit = []
    worst = Fraction(0)
    hardest = None
    keys = enumerate_orbits(n)
    if parity is not None:
        keys = [k for k in keys if k.parity == parity]
    for key in keys:
        entry = best.get((key.p, key.q))
        size = orbit_size(key)
        if entry is None:
            per_orbit.append(OrbitBest(key, Composition(), 0, math.inf))
            continue
        cap_val, comp = entry
        rat = Fraction(size, cap_val)
        expo = log2_fraction(rat) / n
        per_orbit.append(OrbitBest(key, comp, cap_val, expo))
        if rat > worst:
            worst, hardest = rat, key
    c = log2_fraction(worst) / n if worst > 0 else 0.0
    return SearchResult(n, c, hardest, per_orbit)


def _brute_scan(n: int, blocks: frozenset[str], best: dict):
    unknown = blocks - ALL_BLOCKS
    if unknown:
        raise ValueError(f"unknown blocks {sorted(unknown)}")
    a_max = n // 2 if "matching" in blocks else 0
    b_max = n // 2 if "two_imp" in blocks else 0
    count = 0
    for a in range(a_max + 1):
        for b in range(b_max + 1):
            if 2 * a + 2 * b > n:
                break
            c_max = n - 2 * a - 2 * b if "nand" in blocks else 0
            for c in range(c_max + 1):
                rem_c = n - 2 * a - 2 * b - c
                i2_max = rem_c if "id2" in blocks else 0
                for i2 in range(i2_max + 1):
                    rem = rem_c - i2
                    i1_max = rem if "id1" in blocks else 0
                    for i1 in range(i1_max + 1):
                        i0 = rem - i1
                        if i0 and "id0" not in blocks:
                            continue
                        count += 1
                        if count > 2_000_000:
                            raise ValueError(
                                "explicit enumeration too large; use the default block set"
                            )
                        comp = Composition(
                            matching=a, two_imp=b, nand=c, id2=i2, id1=i1, id0=i0
                        )
                        for (p, q), v in composition_spectrum(comp).terms.items():
                            cur = best.get((p, q))
                            if cur is None or v > cur[0]:
                                best[(p, q)] = (v, comp)
