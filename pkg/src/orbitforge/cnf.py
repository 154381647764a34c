"""2-CNF machinery: building blocks, disjoint conjunction, census, DIMACS I/O.

Literals follow the DIMACS convention: +v / -v for 1-based variable index v,
with variables laid out as in :mod:`orbitforge.core` (x_i -> 2i+1, y_i -> 2i+2
in 1-based terms).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import DEFAULT_ENUM_CAP, Automorphism, OrbitKey, orbit_key_of_code

Clause = tuple[int, ...]


def _normalize_clause(clause) -> Clause:
    lits = tuple(sorted(set(int(l) for l in clause), key=lambda l: (abs(l), l < 0)))
    if not 1 <= len(lits) <= 2:
        raise ValueError(f"clause width must be 1 or 2: {clause}")
    if any(l == 0 for l in lits):
        raise ValueError("literal 0 is reserved")
    return lits


@dataclass(frozen=True)
class TwoCnf:
    """A width-<=2 CNF over 2*n_coords variables, canonically ordered."""

    n_coords: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        norm = tuple(sorted(set(_normalize_clause(c) for c in self.clauses)))
        object.__setattr__(self, "clauses", norm)
        nv = 2 * self.n_coords
        for c in norm:
            if any(abs(l) > nv for l in c):
                raise ValueError(f"clause {c} exceeds {nv} variables")

    @property
    def n_vars(self) -> int:
        return 2 * self.n_coords

    def accepts(self, code: int) -> bool:
        for c in self.clauses:
            for l in c:
                v = abs(l) - 1
                if ((code >> v) & 1) == (l > 0):
                    break
            else:
                return False
        return True

    def solutions(self, cap: int = 12) -> list[int]:
        """Satisfying assignment codes, by coordinate-wise search with pruning."""
        n = self.n_coords
        if n > cap:
            raise ValueError(f"n_coords={n} exceeds enumeration cap {cap}")
        # clauses bucketed by the largest coordinate they touch
        by_last: list[list[Clause]] = [[] for _ in range(n)]
        for c in self.clauses:
            by_last[max((abs(l) - 1) // 2 for l in c)].append(c)

        out: list[int] = []

        def ok(code: int, clauses: list[Clause]) -> bool:
            for c in clauses:
                for l in c:
                    v = abs(l) - 1
                    if ((code >> v) & 1) == (l > 0):
                        break
                else:
                    return False
            return True

        def rec(i: int, code: int):
            if i == n:
                out.append(code)
                return
            for val in range(4):
                cand = code | (val << (2 * i))
                if ok(cand, by_last[i]):
                    rec(i + 1, cand)

        rec(0, 0)
        return out

    def shift(self, offset_coords: int) -> "TwoCnf":
        d = 2 * offset_coords
        cl = tuple(tuple(l + d if l > 0 else l - d for l in c) for c in self.clauses)
        return TwoCnf(self.n_coords + offset_coords, cl)

    def permute(self, g: Automorphism) -> "TwoCnf":
        """Relabel variables so that sol(result) = g . sol(self)."""
        if g.n != self.n_coords:
            raise ValueError("automorphism size mismatch")
        m = g.var_map()
        cl = []
        for c in self.clauses:
            cl.append(tuple((m[abs(l) - 1] + 1) * (1 if l > 0 else -1) for l in c))
        return TwoCnf(self.n_coords, tuple(cl))


class BlockKind(enum.Enum):
    ID2 = "Id2"
    ID1 = "Id1"
    ID0 = "Id0"
    NAND = "Nand"
    MATCHING = "Matching"
    TWO_IMP = "TwoImp"

    @property
    def coords(self) -> int:
        return 2 if self in (BlockKind.MATCHING, BlockKind.TWO_IMP) else 1

    @property
    def parity(self) -> int:
        return 1 if self is BlockKind.ID2 else 0


# Clause encodings over the interleaved layout (x1=1, y1=2, x2=3, y2=4).
_BLOCK_CLAUSES: dict[BlockKind, tuple[Clause, ...]] = {
    BlockKind.ID2: ((1,), (2,)),
    BlockKind.ID1: ((1, 2), (-1, -2)),
    BlockKind.ID0: ((-1,), (-2,)),
    BlockKind.NAND: ((-1, -2),),
    # x1 = x2 and y1 = y2
    BlockKind.MATCHING: ((-1, 3), (1, -3), (-2, 4), (2, -4)),
    # x1 = x2, x1 -> y1, x2 -> y2
    BlockKind.TWO_IMP: ((-1, 3), (1, -3), (-1, 2), (-3, 4)),
}


def block_cnf(kind: BlockKind) -> TwoCnf:
    return TwoCnf(kind.coords, _BLOCK_CLAUSES[kind])


def disjoint_and(f1: TwoCnf, f2: TwoCnf) -> TwoCnf:
    """Conjunction on disjoint coordinates; f2's variables are offset past f1's."""
    shifted = f2.shift(f1.n_coords)
    return TwoCnf(f1.n_coords + f2.n_coords, f1.clauses + shifted.clauses)


_CANONICAL_ORDER = (
    BlockKind.MATCHING,
    BlockKind.TWO_IMP,
    BlockKind.NAND,
    BlockKind.ID2,
    BlockKind.ID1,
    BlockKind.ID0,
)

_FIELD_OF_KIND = {
    BlockKind.MATCHING: "matching",
    BlockKind.TWO_IMP: "two_imp",
    BlockKind.NAND: "nand",
    BlockKind.ID2: "id2",
    BlockKind.ID1: "id1",
    BlockKind.ID0: "id0",
}


@dataclass(frozen=True)
class Composition:
    """Block multiplicities for a disjoint conjunction."""

    matching: int = 0
    two_imp: int = 0
    nand: int = 0
    id2: int = 0
    id1: int = 0
    id0: int = 0

    def __post_init__(self):
        if min(self.counts().values()) < 0:
            raise ValueError("block counts must be nonnegative")

    def counts(self) -> dict[BlockKind, int]:
        return {k: getattr(self, _FIELD_OF_KIND[k]) for k in _CANONICAL_ORDER}

    @property
    def n_coords(self) -> int:
        return sum(k.coords * c for k, c in self.counts().items())

    @property
    def parity(self) -> int:
        return self.id2 & 1

    def __str__(self) -> str:
        parts = [f"{k.value}:{c}" for k, c in self.counts().items() if c]
        return "+".join(parts) if parts else "(empty)"

    @classmethod
    def parse(cls, text: str) -> "Composition":
        fields = {}
        by_name = {k.value.lower(): _FIELD_OF_KIND[k] for k in _CANONICAL_ORDER}
        for part in text.split("+"):
            name, _, count = part.partition(":")
            fields[by_name[name.strip().lower()]] = int(count)
        return cls(**fields)


def compose(c: Composition, n: int | None = None) -> TwoCnf:
    """Disjoint conjunction of the blocks in canonical order.

    Canonical ordering (Matching, TwoImp, Nand, Id2, Id1, Id0) fixes variable
    numbering, so exports and permuted covers are reproducible.
    """
    if n is not None and c.n_coords != n:
        raise ValueError(f"composition spans {c.n_coords} coordinates, expected {n}")
    clauses: list[Clause] = []
    offset = 0
    for kind, count in c.counts().items():
        base = block_cnf(kind)
        for _ in range(count):
            clauses.extend(base.shift(offset).clauses)
            offset += kind.coords
    return TwoCnf(offset, tuple(clauses))


def count_solutions_by_orbit(
    f: TwoCnf, cap: int = DEFAULT_ENUM_CAP
) -> dict[OrbitKey, int]:
    """Brute-force census of satisfying assignments per orbit."""
    n = f.n_coords
    if n > cap:
        raise ValueError(f"n_coords={n} exceeds enumeration cap {cap}")
    census: dict[OrbitKey, int] = {}
    for code in f.solutions(cap=cap):
        k = orbit_key_of_code(code, n)
        census[k] = census.get(k, 0) + 1
    return census


def is_consistent(f: TwoCnf, parity: int, cap: int = DEFAULT_ENUM_CAP) -> bool:
    """True iff every satisfying assignment has function value `parity`."""
    census = count_solutions_by_orbit(f, cap=cap)
    return all(k.parity == (parity & 1) for k in census)


def to_dimacs(f: TwoCnf) -> str:
    lines = [f"p cnf {f.n_vars} {len(f.clauses)}"]
    for c in f.clauses:
        lines.append(" ".join(str(l) for l in c) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> TwoCnf:
    n_vars = None
    clauses: list[Clause] = []
    for raw in text.splitlines():
        s = raw.strip()
        if not s or s.startswith("c"):
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {s}")
            n_vars = int(parts[2])
            continue
        lits = [int(t) for t in s.split()]
        if lits[-1] != 0:
            raise ValueError(f"clause line must end with 0: {s}")
        clauses.append(tuple(lits[:-1]))
    if n_vars is None:
        raise ValueError("missing DIMACS header")
    if n_vars % 2:
        raise ValueError("variable count must be even (two per coordinate)")
    return TwoCnf(n_vars // 2, tuple(clauses))
