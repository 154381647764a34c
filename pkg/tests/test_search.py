import random
from fractions import Fraction

import pytest

from orbitforge.cnf import BlockKind, block_cnf, is_consistent
from orbitforge.core import OrbitKey
from orbitforge.search import (
    compose_search,
    exact_mu,
    is_median_closed,
    median_closure,
    pareto_blocks,
    rho_star,
    two_cnf_for_solution_set,
)

MATCHING_SPECTRUM = {(2, 0): 1, (0, 2): 2, (0, 0): 1}
TWO_IMP_SPECTRUM = {(2, 0): 1, (0, 2): 1, (0, 1): 2, (0, 0): 1}
NAND_PAIR_SPECTRUM = {(0, 2): 4, (0, 1): 4, (0, 0): 1}


def test_median_closure_examples():
    # block solution sets are already closed
    for kind in BlockKind:
        sols = block_cnf(kind).solutions()
        assert median_closure(sols) == frozenset(sols)
    # toy 3-bit examples
    assert median_closure({0b000, 0b111}) == frozenset({0b000, 0b111})
    assert 0b111 in median_closure({0b110, 0b101, 0b011})


def test_median_closure_idempotent():
    rng = random.Random(55)
    for _ in range(500):
        width = rng.randint(2, 6)
        size = rng.randint(1, 8)
        codes = {rng.getrandbits(width) for _ in range(size)}
        once = median_closure(codes)
        assert median_closure(once) == once
        assert is_median_closed(once)


def test_witness_cnf_round_trip():
    for kind in BlockKind:
        base = block_cnf(kind)
        witness = two_cnf_for_solution_set(base.solutions(), kind.coords)
        assert sorted(witness.solutions()) == sorted(base.solutions())


def test_witness_cnf_rejects_non_closed():
    # majority of these three escapes the set, so no 2-CNF has exactly them
    bad = {0b0001, 0b0010, 0b1111}
    assert not is_median_closed(bad)
    with pytest.raises(ValueError):
        two_cnf_for_solution_set(bad, 2)


def test_pareto_blocks_two_coords_parity0():
    entries = pareto_blocks(2, 0)
    spectra = sorted(tuple(sorted(e.spectrum.terms.items())) for e in entries)
    assert spectra == sorted(
        tuple(sorted(s.items()))
        for s in (MATCHING_SPECTRUM, TWO_IMP_SPECTRUM, NAND_PAIR_SPECTRUM)
    )


def test_pareto_blocks_one_coord():
    entries = pareto_blocks(1, 0)
    assert [e.spectrum.terms for e in entries] == [{(0, 1): 2, (0, 0): 1}]
    entries = pareto_blocks(1, 1)
    assert [e.spectrum.terms for e in entries] == [{(1, 0): 1}]


def test_pareto_entries_mutually_nondominating():
    from orbitforge.search import _dominates

    for coords, parity in ((1, 0), (1, 1), (2, 0), (2, 1)):
        entries = pareto_blocks(coords, parity)
        for i, a in enumerate(entries):
            for j, b in enumerate(entries):
                if i != j:
                    assert not _dominates(a.spectrum, b.spectrum), (i, j)


def test_pareto_witnesses_consistent():
    for coords, parity in ((1, 0), (1, 1), (2, 0), (2, 1)):
        for e in pareto_blocks(coords, parity):
            assert is_consistent(e.witness, parity)


def test_exact_mu_values():
    assert exact_mu(1, OrbitKey(0, 1, 0, 1), 0) == 2
    assert exact_mu(2, OrbitKey(2, 0, 0, 2), 0) == 1
    # wrong-parity orbits are untouchable
    assert exact_mu(2, OrbitKey(1, 1, 0, 2), 0) == 0


def test_exact_mu_dominates_compositions():
    for parity in (0, 1):
        result = compose_search(2, prune_dominated=False)
        for ob in result.per_orbit:
            if ob.key.parity != parity:
                continue
            mu = exact_mu(2, ob.key, parity)
            assert ob.captured <= mu, (ob.key, ob.captured, mu)


def test_rho_star_n2():
    # odd side: orbit (1,1,0) of size 4 with mu=2 is the hardest
    assert rho_star(2, 1) == Fraction(2)
    # even side: every orbit is fully captured by some consistent 2-CNF
    assert rho_star(2, 0) == Fraction(1)


def test_compose_search_prune_equals_full():
    for n in (2, 4, 7, 8):
        fast = compose_search(n)
        slow = compose_search(n, prune_dominated=False)
        assert fast.c == pytest.approx(slow.c, abs=1e-12)
        for a, b in zip(fast.per_orbit, slow.per_orbit):
            assert a.key == b.key and a.captured == b.captured


def test_compose_search_small_values():
    r1 = compose_search(1)
    assert r1.c == 0.0  # every orbit of one coordinate is captured exactly
    r2 = compose_search(2)
    assert r2.c == pytest.approx(0.5)  # orbit (1,1,0): size 4, best capture 1


def test_compose_search_parity_filter():
    r = compose_search(50, parity=0)
    assert all(ob.key.parity == 0 for ob in r.per_orbit)
    r_all = compose_search(50)
    assert r.c <= r_all.c


def test_compose_search_trivial_reference():
    # the classic exponential cover: one Id2^p Nand^(n-p) per orbit; its
    # exponent max_p log2 C(n,p)/n climbs to 1
    import math

    from orbitforge.asymptotics import log2_int

    values = []
    for n in (16, 32, 64):
        r = compose_search(n, blocks={"id2", "nand"})
        expect = max(log2_int(math.comb(n, p)) / n for p in range(n + 1))
        assert r.c == pytest.approx(expect, abs=1e-9)
        values.append(r.c)
    assert values[0] < values[1] < values[2] < 1.0
    assert values[2] > 0.9


def test_compose_search_monotone_toward_limit():
    assert compose_search(50).c < compose_search(100).c


def test_compose_search_cap():
    with pytest.raises(ValueError):
        compose_search(300)


def test_compose_search_csv():
    r = compose_search(6)
    lines = r.to_csv().strip().splitlines()
    assert lines[0] == "n,p,q,r,composition,captured,exponent"
    assert len(lines) == len(r.per_orbit) + 1
