"""Exact spectra: sparse homogeneous trivariate polynomials over big integers.

The spectrum of a 2-CNF counts its satisfying assignments per orbit; the
coefficient of x^p y^q z^r is the number of solutions in orbit (p, q, r).
Spectra of disjoint conjunctions multiply, so compositions of blocks reduce to
polynomial products of the six block spectra:

    Id2 -> x        Id1 -> 2y         Id0 -> z
    Nand -> 2y+z    Matching -> x^2 + 2y^2 + z^2    TwoImp -> x^2 + (y+z)^2

Terms are keyed by (p, q) with r implied by homogeneity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .cnf import BlockKind, Composition
from .core import OrbitKey


@dataclass
class Spectrum:
    degree: int
    terms: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (p, q), c in self.terms.items():
            if c == 0:
                continue
            if c < 0 or p < 0 or q < 0 or p + q > self.degree:
                raise ValueError(f"bad term ({p},{q}) -> {c} for degree {self.degree}")
            clean[(p, q)] = c
        self.terms = clean

    def coeff(self, key: OrbitKey) -> int:
        if key.n != self.degree:
            raise ValueError(f"key degree {key.n} != spectrum degree {self.degree}")
        return self.terms.get((key.p, key.q), 0)

    def coeff_pq(self, p: int, q: int) -> int:
        return self.terms.get((p, q), 0)

    def total(self) -> int:
        """Total number of counted assignments (sum of all coefficients)."""
        return sum(self.terms.values())

    def keys(self) -> list[OrbitKey]:
        return sorted(OrbitKey(p, q, self.degree - p - q, self.degree) for p, q in self.terms)

    def mul(self, other: "Spectrum") -> "Spectrum":
        out: dict[tuple[int, int], int] = {}
        for (p1, q1), c1 in self.terms.items():
            for (p2, q2), c2 in other.terms.items():
                k = (p1 + p2, q1 + q2)
                out[k] = out.get(k, 0) + c1 * c2
        return Spectrum(self.degree + other.degree, out)

    def __mul__(self, other: "Spectrum") -> "Spectrum":
        return self.mul(other)

    def pow(self, e: int) -> "Spectrum":
        if e < 0:
            raise ValueError("exponent must be nonnegative")
        result = unit_spectrum()
        base = self
        while e:
            if e & 1:
                result = result.mul(base)
            base = base.mul(base) if e > 1 else base
            e >>= 1
        return result

    def to_json(self) -> str:
        items = [
            {"p": p, "q": q, "r": self.degree - p - q, "c": str(c)}
            for (p, q), c in sorted(self.terms.items())
        ]
        return json.dumps({"degree": self.degree, "terms": items})

    @classmethod
    def from_json(cls, text: str) -> "Spectrum":
        data = json.loads(text)
        deg = data["degree"]
        terms = {}
        for t in data["terms"]:
            if t["p"] + t["q"] + t["r"] != deg:
                raise ValueError("non-homogeneous term in JSON spectrum")
            terms[(t["p"], t["q"])] = int(t["c"])
        return cls(deg, terms)

    @classmethod
    def from_census(cls, census: dict[OrbitKey, int], degree: int) -> "Spectrum":
        return cls(degree, {(k.p, k.q): c for k, c in census.items()})


def unit_spectrum() -> Spectrum:
    return Spectrum(0, {(0, 0): 1})


_BLOCK_TERMS: dict[BlockKind, tuple[int, dict[tuple[int, int], int]]] = {
    BlockKind.ID2: (1, {(1, 0): 1}),
    BlockKind.ID1: (1, {(0, 1): 2}),
    BlockKind.ID0: (1, {(0, 0): 1}),
    BlockKind.NAND: (1, {(0, 1): 2, (0, 0): 1}),
    BlockKind.MATCHING: (2, {(2, 0): 1, (0, 2): 2, (0, 0): 1}),
    BlockKind.TWO_IMP: (2, {(2, 0): 1, (0, 2): 1, (0, 1): 2, (0, 0): 1}),
}


def block_spectrum(kind: BlockKind) -> Spectrum:
    deg, terms = _BLOCK_TERMS[kind]
    return Spectrum(deg, dict(terms))


def composition_spectrum(c: Composition) -> Spectrum:
    """Product of block spectra raised to their counts (binary exponentiation)."""
    out = unit_spectrum()
    for kind, count in c.counts().items():
        if count:
            out = out.mul(block_spectrum(kind).pow(count))
    return out


def coeff(s: Spectrum, key: OrbitKey) -> int:
    return s.coeff(key)


def _nand_row(c2: int, q_cap: int) -> list[int]:
    """y-coefficients of (2y+z)^c2, truncated at y-exponent q_cap."""
    row = [0] * (q_cap + 1)
    b = 1
    for w in range(min(c2, q_cap) + 1):
        row[w] = b << w
        b = b * (c2 - w) // (w + 1)
    return row


def _coeff_mtn(A: int, B: int, C2: int, p: int, q: int, r: int) -> int:
    """Coefficient of x^p y^q z^r in (x^2+2y^2+z^2)^A (x^2+(y+z)^2)^B (2y+z)^C2.

    Runs in O(n^2) big-integer operations without materializing the product:
    expand both squared factors over their x^2 choices, then track a single
    row of y-coefficients of (y+z)^l (2y+z)^C2, updated incrementally in l.
    """
    if min(A, B, C2, p, q, r) < 0 or (p & 1) or 2 * A + 2 * B + C2 != p + q + r:
        return 0
    p2 = p >> 1
    lo = max(0, p2 - A)
    hi = min(p2, B)
    if lo > hi:
        return 0

    # row[w] = [y^w] (y+z)^l (2y+z)^C2, built upward from l = 2*(B - hi)
    row = _nand_row(C2, q)
    for _ in range(2 * (B - hi)):
        for w in range(q, 0, -1):
            row[w] += row[w - 1]

    total = 0
    cb = math.comb(B, hi)
    ca = math.comb(A, p2 - hi)
    for j in range(hi, lo - 1, -1):
        m = A - (p2 - j)
        # inner sum over Matching's (2y^2)^u choices
        s = 0
        cm = 1
        for u in range(min(m, q >> 1) + 1):
            s += (cm << u) * row[q - 2 * u]
            cm = cm * (m - u) // (u + 1)
        total += cb * ca * s
        if j > lo:
            for _ in range(2):
                for w in range(q, 0, -1):
                    row[w] += row[w - 1]
            cb = cb * j // (B - j + 1)
            ca = ca * (A - (p2 - j)) // (p2 - j + 1)
    return total


def coeff_fast(c: Composition, key: OrbitKey) -> int:
    """Single coefficient of composition_spectrum(c) without the full product.

    Id blocks contribute a fixed monomial shift; the Matching/TwoImp/Nand core
    goes through the closed-form convolution.
    """
    if c.n_coords != key.n:
        raise ValueError(f"composition spans {c.n_coords} coordinates, key has {key.n}")
    p = key.p - c.id2
    q = key.q - c.id1
    r = key.r - c.id0
    if min(p, q, r) < 0:
        return 0
    return (1 << c.id1) * _coeff_mtn(c.matching, c.two_imp, c.nand, p, q, r)
