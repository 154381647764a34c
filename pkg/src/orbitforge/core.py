"""Inner-product assignments, orbits, and the coordinate/swap symmetry group.

An input is a pair (x, y) of n-bit vectors.  The value of the function is the
parity of the coordinates where x_i = y_i = 1.  The symmetry group permutes the
n coordinates and may exchange x_i with y_i inside each coordinate; its orbits
on inputs are exactly the triples (p, q, r) counting coordinates of type
(1,1), "differing", and (0,0).

Variable layout is fixed package-wide: x_i lives at bit/variable index 2i and
y_i at 2i+1, so assignments pack into integers ("codes") of 2n bits.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_ENUM_CAP = 6


def _as_rng(seed: int | random.Random | None) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


@dataclass(frozen=True)
class Assignment:
    """A pair of bit vectors of equal length n >= 1."""

    x: tuple[int, ...]
    y: tuple[int, ...]

    def __post_init__(self):
        if len(self.x) != len(self.y) or len(self.x) < 1:
            raise ValueError("x and y must have the same positive length")
        if any(b not in (0, 1) for b in self.x + self.y):
            raise ValueError("entries must be bits")

    @property
    def n(self) -> int:
        return len(self.x)

    def to_code(self) -> int:
        code = 0
        for i in range(self.n):
            code |= self.x[i] << (2 * i)
            code |= self.y[i] << (2 * i + 1)
        return code

    @classmethod
    def from_code(cls, code: int, n: int) -> "Assignment":
        x = tuple((code >> (2 * i)) & 1 for i in range(n))
        y = tuple((code >> (2 * i + 1)) & 1 for i in range(n))
        return cls(x, y)

    @classmethod
    def from_bits(cls, x: str, y: str) -> "Assignment":
        return cls(tuple(int(b) for b in x), tuple(int(b) for b in y))


def ip(a: Assignment) -> int:
    """Parity of the coordinates where both sides are 1."""
    return sum(xi & yi for xi, yi in zip(a.x, a.y)) & 1


def ip_eval(a: Assignment, complement: int = 0) -> int:
    """Function value; with complement=1 returns the complemented value."""
    return ip(a) ^ (complement & 1)


def ip_of_code(code: int, n: int) -> int:
    acc = 0
    for i in range(n):
        acc ^= (code >> (2 * i)) & (code >> (2 * i + 1)) & 1
    return acc


@dataclass(frozen=True, order=True)
class OrbitKey:
    """Orbit identifier: p coords of (1,1), q differing, r of (0,0)."""

    p: int
    q: int
    r: int
    n: int

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0 or self.p + self.q + self.r != self.n:
            raise ValueError(f"invalid orbit key {(self.p, self.q, self.r, self.n)}")

    @property
    def parity(self) -> int:
        """Function value shared by every assignment in the orbit."""
        return self.p & 1

    def triple(self) -> tuple[int, int, int]:
        return (self.p, self.q, self.r)


def orbit_key(a: Assignment) -> OrbitKey:
    p = sum(1 for xi, yi in zip(a.x, a.y) if xi == yi == 1)
    r = sum(1 for xi, yi in zip(a.x, a.y) if xi == yi == 0)
    return OrbitKey(p, a.n - p - r, r, a.n)


def orbit_key_of_code(code: int, n: int) -> OrbitKey:
    p = r = 0
    for i in range(n):
        xb = (code >> (2 * i)) & 1
        yb = (code >> (2 * i + 1)) & 1
        if xb & yb:
            p += 1
        elif not (xb | yb):
            r += 1
    return OrbitKey(p, n - p - r, r, n)


def orbit_size(key: OrbitKey) -> int:
    """Exact orbit cardinality: C(n,p) * C(n-p,r) * 2^q."""
    return math.comb(key.n, key.p) * math.comb(key.n - key.p, key.r) * (1 << key.q)


def enumerate_orbits(n: int) -> list[OrbitKey]:
    """All C(n+2, 2) orbit keys, ordered lexicographically by (p, q)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [OrbitKey(p, q, n - p - q, n) for p in range(n + 1) for q in range(n - p + 1)]


def orbit_assignments(key: OrbitKey):
    """Yield the codes of every assignment in the orbit."""
    n = key.n
    idx = tuple(range(n))
    for ones in itertools.combinations(idx, key.p):
        ones_mask = 0
        for i in ones:
            ones_mask |= 3 << (2 * i)
        rest = [i for i in idx if i not in ones]
        for zeros in itertools.combinations(rest, key.r):
            zset = set(zeros)
            diff = [i for i in rest if i not in zset]
            for pattern in itertools.product((0, 1), repeat=key.q):
                code = ones_mask
                for i, b in zip(diff, pattern):
                    code |= 1 << (2 * i + b)
                yield code


def canonical_representative(key: OrbitKey) -> Assignment:
    """The assignment in the orbit with the smallest packed code.

    Coordinates sorted by descending per-coordinate value: (1,1) first, then
    (1,0), then (0,0).
    """
    x = (1,) * key.p + (1,) * key.q + (0,) * key.r
    y = (1,) * key.p + (0,) * key.q + (0,) * key.r
    return Assignment(x, y)


@dataclass(frozen=True)
class Automorphism:
    """A coordinate permutation combined with per-coordinate x/y swaps.

    Source coordinate i lands at perm[i]; if swap[i] is set, x_i and y_i are
    exchanged on the way.
    """

    perm: tuple[int, ...]
    swap: tuple[int, ...]

    def __post_init__(self):
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)) or len(self.swap) != n:
            raise ValueError("perm must be a permutation and swap must match its length")

    @property
    def n(self) -> int:
        return len(self.perm)

    def apply(self, a: Assignment) -> Assignment:
        n = self.n
        x = [0] * n
        y = [0] * n
        for i in range(n):
            j = self.perm[i]
            if self.swap[i]:
                x[j], y[j] = a.y[i], a.x[i]
            else:
                x[j], y[j] = a.x[i], a.y[i]
        return Assignment(tuple(x), tuple(y))

    def apply_code(self, code: int, n: int) -> int:
        out = 0
        for i in range(n):
            xb = (code >> (2 * i)) & 1
            yb = (code >> (2 * i + 1)) & 1
            if self.swap[i]:
                xb, yb = yb, xb
            j = self.perm[i]
            out |= xb << (2 * j)
            out |= yb << (2 * j + 1)
        return out

    def var_map(self) -> list[int]:
        """Destination variable index for each of the 2n source variables."""
        m = [0] * (2 * self.n)
        for i in range(self.n):
            for role in (0, 1):
                m[2 * i + role] = 2 * self.perm[i] + (role ^ self.swap[i])
        return m

    def inverse(self) -> "Automorphism":
        n = self.n
        perm_inv = [0] * n
        for i, j in enumerate(self.perm):
            perm_inv[j] = i
        swap_inv = tuple(self.swap[perm_inv[j]] for j in range(n))
        return Automorphism(tuple(perm_inv), swap_inv)


def identity_automorphism(n: int) -> Automorphism:
    return Automorphism(tuple(range(n)), (0,) * n)


def sample_automorphism(n: int, seed: int | random.Random | None = 0) -> Automorphism:
    """Uniform group element: Fisher-Yates permutation plus n fair swap bits."""
    rng = _as_rng(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    swap = tuple(rng.getrandbits(1) for _ in range(n))
    return Automorphism(tuple(perm), swap)


def connecting_automorphism(a: Assignment, b: Assignment) -> Automorphism:
    """An explicit group element mapping a to b; requires equal orbit keys."""
    ka, kb = orbit_key(a), orbit_key(b)
    if ka != kb:
        raise ValueError(f"assignments lie in different orbits: {ka} vs {kb}")

    def groups(v: Assignment):
        ones, diff, zeros = [], [], []
        for i in range(v.n):
            if v.x[i] == v.y[i] == 1:
                ones.append(i)
            elif v.x[i] == v.y[i] == 0:
                zeros.append(i)
            else:
                diff.append(i)
        return ones, diff, zeros

    ga, gb = groups(a), groups(b)
    perm = [0] * a.n
    swap = [0] * a.n
    for src_list, dst_list in zip(ga, gb):
        for i, j in zip(src_list, dst_list):
            perm[i] = j
            swap[i] = 1 if a.x[i] != b.x[j] else 0
    g = Automorphism(tuple(perm), tuple(swap))
    assert g.apply(a) == b
    return g


@dataclass(frozen=True)
class MembershipProbability:
    empirical: float
    exact: Fraction
    trials: int


def membership_prob(
    a: Assignment,
    targets,
    trials: int = 10_000,
    seed: int | random.Random | None = 0,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> MembershipProbability:
    """Estimate Pr_g[a in g.T] for uniform g, alongside the exact value.

    The exact value |orbit(a) & T| / |orbit(a)| is computed by enumerating the
    orbit, so n must not exceed enum_cap.
    """
    n = a.n
    if n > enum_cap:
        raise ValueError(f"exact branch requires n <= {enum_cap}, got {n}")
    tcodes = {t.to_code() if isinstance(t, Assignment) else int(t) for t in targets}
    rng = _as_rng(seed)
    acode = a.to_code()
    hits = 0
    for _ in range(trials):
        g = sample_automorphism(n, rng)
        # a in g.T  <=>  g^{-1}.a in T
        if g.inverse().apply_code(acode, n) in tcodes:
            hits += 1
    orbit = list(orbit_assignments(orbit_key(a)))
    inter = sum(1 for c in orbit if c in tcodes)
    return MembershipProbability(hits / trials, Fraction(inter, len(orbit)), trials)
