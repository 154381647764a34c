import math
import random
from fractions import Fraction

import pytest

from orbitforge.cnf import Composition, compose, count_solutions_by_orbit
from orbitforge.core import OrbitKey, enumerate_orbits, orbit_size
from orbitforge.regions import (
    certify,
    classify,
    construct_best,
    pad_construction,
    ratio,
    region_composition,
    stratified_sample,
    verify_coverage,
)
from orbitforge.spectrum import coeff_fast


def test_classify_examples():
    assert 2 in classify(OrbitKey(34, 8, 8, 50))
    assert 1 in classify(OrbitKey(16, 12, 4, 32))
    for q in range(25):
        assert 6 in classify(OrbitKey(8, q, 24 - q, 32))


def test_classify_never_empty_small():
    for n in range(1, 60):
        for k in enumerate_orbits(n):
            assert classify(k)


def test_coverage_up_to_400():
    assert verify_coverage(400)


def test_region1_recipe_example():
    comps = region_composition(1, OrbitKey(160, 128, 32, 320))
    assert comps == [Composition(matching=75, two_imp=50, nand=70)]


def test_region2_recipe_example():
    assert region_composition(2, OrbitKey(4, 0, 0, 4)) == [Composition(matching=2)]


def test_region6_recipe_example():
    comps = region_composition(6, OrbitKey(8, 20, 4, 32))
    assert comps == [Composition(matching=4, nand=24)]


def test_region3_trivial_all_zero_orbit():
    assert region_composition(3, OrbitKey(0, 0, 200, 200)) == [Composition(id0=200)]


def test_region_recipes_span_n():
    n = 2000
    for rid, key in [
        (1, OrbitKey(800, 920, 280, n)),
        (2, OrbitKey(1300, 400, 300, n)),
        (3, OrbitKey(600, 1000, 400, n)),
        (4, OrbitKey(600, 1200, 200, n)),
        (5, OrbitKey(500, 1450, 50, n)),
        (6, OrbitKey(400, 1000, 600, n)),
    ]:
        assert rid in classify(key)
        for comp in region_composition(rid, key):
            assert comp.n_coords == n
            assert comp.parity == 0


def test_region_divisibility_errors():
    with pytest.raises(ValueError):
        region_composition(1, OrbitKey(10, 10, 12, 32))
    with pytest.raises(ValueError):
        region_composition(6, OrbitKey(3, 10, 3, 16))
    with pytest.raises(ValueError):
        region_composition(5, OrbitKey(2, 7, 1, 10))


def test_pad_construction_examples():
    core, pad = pad_construction(OrbitKey(17, 20, 13, 50), 4)
    assert core.triple() == (16, 20, 12)
    assert (pad.id2, pad.id1, pad.id0) == (1, 0, 1)

    core, pad = pad_construction(OrbitKey(0, 0, 12, 12), 4)
    assert core.triple() == (0, 0, 12) and pad.total == 0


def test_padding_law_brute_force():
    rng = random.Random(12)
    checked = 0
    while checked < 100:
        n = rng.randint(2, 6)
        key = rng.choice(enumerate_orbits(n))
        m = rng.choice((1, 2, 3, 4))
        core, pad = pad_construction(key, m)
        if core.n == 0:
            continue
        # core recipe: a concrete composition capturing something at the core
        dp = core.p % 2
        comp_core = Composition(
            matching=(core.p - dp) // 2, nand=core.n - core.p, id2=dp
        )
        full = Composition(
            matching=comp_core.matching,
            nand=comp_core.nand,
            id2=comp_core.id2 + pad.id2,
            id1=pad.id1,
            id0=pad.id0,
        )
        census_full = count_solutions_by_orbit(compose(full, n), cap=6)
        census_core = count_solutions_by_orbit(compose(comp_core, core.n), cap=6)
        got = census_full.get(key, 0)
        want = (2**pad.id1) * census_core.get(core, 0)
        assert got == want, (key, m, full)
        checked += 1


def test_padding_parity_flip():
    # an odd-p orbit is served by a parity-1 composition via one Id2 pad
    key = OrbitKey(17, 20, 13, 50)
    rep = construct_best(key)
    assert rep.composition.parity == 1
    assert rep.captured > 0


def test_ratio_region6_identity():
    # exact ratio C(n, p) whenever the Matching^(p/2) Nand^(n-p) recipe applies
    for n in range(2, 25):
        for p in range(0, n // 4 + 1, 2):
            for q in range(0, n - p + 1):
                key = OrbitKey(p, q, n - p - q, n)
                rep = ratio(region_composition(6, key), key, region=6)
                assert rep.ratio == Fraction(math.comb(n, p)), key


def test_ratio_region6_brute_force_small():
    for n in range(2, 7):
        for p in range(0, n // 4 + 1, 2):
            for q in range(0, n - p + 1):
                key = OrbitKey(p, q, n - p - q, n)
                comp = region_composition(6, key)[0]
                census = count_solutions_by_orbit(compose(comp, n))
                assert census.get(key, 0) == coeff_fast(comp, key)


def test_ratio_region2_identity():
    for n in range(2, 25, 2):
        comp = Composition(matching=n // 2)
        for p in range(0, n + 1, 2):
            for q in range(0, n - p + 1, 2):
                key = OrbitKey(p, q, n - p - q, n)
                cap = coeff_fast(comp, key)
                want = (
                    math.comb(n // 2, p // 2)
                    * math.comb((n - p) // 2, q // 2)
                    * 2 ** (q // 2)
                )
                assert cap == want


def test_ratio_examples():
    rep = ratio(Composition(matching=1, nand=6), OrbitKey(2, 4, 2, 8), region=6)
    assert rep.ratio == Fraction(math.comb(8, 2))

    rep = ratio(Composition(matching=2), OrbitKey(2, 2, 0, 4))
    assert rep.captured == 4 and rep.orbit_size == 24
    assert rep.ratio == Fraction(6)

    key = OrbitKey(3, 2, 1, 6)
    rep = ratio(Composition(id2=3, id1=2, id0=1), key)
    assert rep.ratio == Fraction(orbit_size(key), 2**2)


def test_ratio_zero_capture_marker():
    rep = ratio(Composition(matching=2), OrbitKey(1, 2, 1, 4))
    assert rep.captured == 0 and rep.ratio is None and rep.exponent == math.inf


def test_monomial_construction_ratio_one_orbit():
    # the all-ones orbit is captured completely by Matching^(n/2)
    for n in (2, 4, 8):
        rep = ratio(Composition(matching=n // 2), OrbitKey(n, 0, 0, n))
        assert rep.ratio == 1


def test_construct_best_spec_example():
    rep = construct_best(OrbitKey(160, 128, 32, 320))
    assert rep.region == 1
    assert rep.composition == Composition(matching=75, two_imp=50, nand=70)
    assert rep.captured > 0


def test_construct_best_always_finite():
    rng = random.Random(77)
    for _ in range(40):
        n = rng.randint(2, 40)
        key = rng.choice(enumerate_orbits(n))
        rep = construct_best(key)
        assert rep.captured > 0
        assert rep.ratio is not None


def test_certify_small_exhaustive():
    res = certify(4, policy="all")
    assert len(res.reports) == len(enumerate_orbits(4))
    assert all(rep.captured > 0 for rep in res.reports)


def test_certify_stratified_sampler():
    sample = stratified_sample(2000, 10, seed=3)
    assert len(sample) == 60
    by_region = {}
    for rid, key in sample:
        by_region.setdefault(rid, []).append(key)
        assert rid in classify(key)
    assert set(by_region) == {1, 2, 3, 4, 5, 6}
    assert all(len(v) == 10 for v in by_region.values())


def test_certify_csv_json():
    res = certify(6, policy="all")
    csv_text = res.to_csv()
    assert csv_text.splitlines()[0] == "n,p,q,r,region,composition,captured,orbit_size,exponent"
    assert len(csv_text.splitlines()) == len(res.reports) + 1
    import json

    payload = json.loads(res.to_json())
    assert payload["n"] == 6 and len(payload["orbits"]) == len(res.reports)


def test_certify_monotone_sanity_n4000():
    res = certify(4000, policy="stratified", per_region=4, seed=5)
    assert res.max_exponent < 0.858
