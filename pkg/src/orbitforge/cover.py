"""Randomized orbit covers and full circuit assembly with exhaustive checks.

A consistent 2-CNF capturing part of an orbit covers the whole orbit once
enough random symmetry-permuted copies are OR-ed together; the copy count
t = ceil(2 |S| ln|S| / captured) makes a failed batch strictly less likely
than 1/|S| per assignment, so whole-batch resampling terminates fast.  The
assembled disjunction over all odd-parity orbits computes the inner product
function exactly, which is verified on every input at small n.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

import numpy as np

from .cnf import Composition, TwoCnf, compose, to_dimacs
from .core import (
    Assignment,
    Automorphism,
    OrbitKey,
    enumerate_orbits,
    orbit_assignments,
    orbit_size,
    sample_automorphism,
)

ASSEMBLE_CAP = 10


def _permute_codes(codes: np.ndarray, g: Automorphism, n: int) -> np.ndarray:
    out = np.zeros_like(codes)
    vmap = g.var_map()
    for v in range(2 * n):
        out |= ((codes >> v) & 1) << vmap[v]
    return out


@dataclass
class CoverReport:
    key: OrbitKey
    base: Composition | None
    captured: int
    orbit_size: int
    t_target: int
    rounds: int
    covered: bool
    seed: int
    automorphisms: list[Automorphism]

    def to_dict(self) -> dict:
        return {
            "orbit": self.key.triple(),
            "n": self.key.n,
            "base": str(self.base) if self.base else None,
            "captured": str(self.captured),
            "orbit_size": str(self.orbit_size),
            "t_target": self.t_target,
            "rounds": self.rounds,
            "covered": self.covered,
            "seed": self.seed,
        }


def cover_orbit(
    f: TwoCnf,
    key: OrbitKey,
    seed: int = 0,
    base: Composition | None = None,
    max_rounds: int = 10,
) -> CoverReport:
    """Cover an orbit with randomly permuted copies of a capturing 2-CNF.

    Samples t = ceil(2 |S| ln|S| / captured) group elements and checks that
    the permuted capture sets exhaust the orbit; on failure the whole batch is
    resampled with a fresh stream, up to max_rounds times.
    """
    n = key.n
    if f.n_coords != n:
        raise ValueError("CNF and orbit size mismatch")
    orbit = list(orbit_assignments(key))
    hits = np.array([c for c in orbit if f.accepts(c)], dtype=np.int64)
    captured = len(hits)
    if captured == 0:
        raise ValueError(f"base CNF captures nothing in orbit {key.triple()}")
    size = orbit_size(key)
    assert size == len(orbit)
    t_target = math.ceil(2 * size * math.log(size) / captured) if size > 1 else 0
    t_used = max(t_target, 1)  # a lone assignment still needs one copy

    orbit_set = set(orbit)
    rng = random.Random(seed)
    for round_no in range(1, max_rounds + 1):
        autos = [sample_automorphism(n, rng) for _ in range(t_used)]
        covered: set[int] = set()
        for g in autos:
            covered.update(_permute_codes(hits, g, n).tolist())
            if len(covered) >= size:
                break
        if orbit_set <= covered:
            return CoverReport(
                key, base, captured, size, t_target, round_no, True, seed, autos
            )
    return CoverReport(key, base, captured, size, t_target, max_rounds, False, seed, [])


@dataclass
class Sigma3Circuit:
    """A disjunction of 2-CNFs; evaluates to the OR of its members."""

    n: int
    members: list[TwoCnf]
    meta: list[dict]

    @property
    def size(self) -> int:
        return len(self.members)

    def eval_code(self, code: int) -> int:
        return 1 if any(m.accepts(code) for m in self.members) else 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "members": [
                    {"dimacs": to_dimacs(m), **meta}
                    for m, meta in zip(self.members, self.meta)
                ],
            },
            indent=2,
        )


def circuit_eval(circuit: Sigma3Circuit, a: Assignment) -> int:
    if a.n != circuit.n:
        raise ValueError("assignment size mismatch")
    return circuit.eval_code(a.to_code())


@dataclass
class AssembleReport:
    circuit: Sigma3Circuit
    covers: list[CoverReport]
    verified: bool | None
    inputs_checked: int
    max_ratio: float
    size_bound_form: float  # n * (#orbits) * max observed ratio

    def to_dict(self) -> dict:
        return {
            "n": self.circuit.n,
            "members": self.circuit.size,
            "verified": self.verified,
            "inputs_checked": self.inputs_checked,
            "max_ratio": self.max_ratio,
            "size_bound_form": self.size_bound_form,
            "covers": [c.to_dict() for c in self.covers],
        }


def _ip_vector(n: int, codes: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(codes)
    for i in range(n):
        acc ^= (codes >> (2 * i)) & (codes >> (2 * i + 1)) & 1
    return acc.astype(bool)


def _solution_codes(f: TwoCnf) -> np.ndarray:
    return np.array(f.solutions(cap=ASSEMBLE_CAP), dtype=np.int64)


def assemble_circuit(
    n: int,
    strategy: str = "search",
    seed: int = 0,
    verify: bool = True,
    spot_checks: int = 16,
) -> AssembleReport:
    """Build a circuit for the inner product on n coordinates and verify it.

    strategy "search" takes each orbit's best composition from the
    composition search; "regions" uses the region recipes (with padding).
    Verification evaluates the circuit on all 4^n inputs.
    """
    if not 1 <= n <= ASSEMBLE_CAP:
        raise ValueError(f"n must be within 1..{ASSEMBLE_CAP}")
    odd_keys = [k for k in enumerate_orbits(n) if k.parity == 1]

    if strategy == "search":
        from .search import compose_search

        result = compose_search(n)
        comp_by_key = {ob.key: ob.composition for ob in result.per_orbit}
    elif strategy == "regions":
        from .regions import construct_best

        comp_by_key = {k: construct_best(k).composition for k in odd_keys}
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    members: list[TwoCnf] = []
    meta: list[dict] = []
    covers: list[CoverReport] = []
    max_ratio = 0.0
    for idx, key in enumerate(odd_keys):
        comp = comp_by_key[key]
        base = compose(comp, n)
        report = cover_orbit(base, key, seed=seed + 7919 * idx, base=comp)
        if not report.covered:
            raise RuntimeError(f"cover failed for orbit {key.triple()} after retries")
        covers.append(report)
        max_ratio = max(max_ratio, report.orbit_size / report.captured)
        for g in report.automorphisms:
            members.append(base.permute(g))
            meta.append(
                {
                    "orbit": key.triple(),
                    "composition": str(comp),
                    "perm": list(g.perm),
                    "swap": list(g.swap),
                }
            )
    circuit = Sigma3Circuit(n, members, meta)

    verified = None
    checked = 0
    if verify:
        codes = np.arange(1 << (2 * n), dtype=np.int64)
        want = _ip_vector(n, codes)
        got = np.zeros_like(want)
        sols_cache: dict[Composition, np.ndarray] = {}
        for rep in covers:
            base_sols = sols_cache.get(rep.base)
            if base_sols is None:
                base_sols = _solution_codes(compose(rep.base, n))
                sols_cache[rep.base] = base_sols
            for g in rep.automorphisms:
                got[_permute_codes(base_sols, g, n)] = True
        # cross-check a sample of members by direct clause evaluation
        rng = random.Random(seed)
        for m in rng.sample(members, min(spot_checks, len(members))):
            direct = np.ones(len(codes), dtype=bool)
            for clause in m.clauses:
                cs = np.zeros(len(codes), dtype=bool)
                for lit in clause:
                    v = abs(lit) - 1
                    cs |= ((codes >> v) & 1).astype(bool) == (lit > 0)
                direct &= cs
            expected = np.zeros(len(codes), dtype=bool)
            expected[np.array(m.solutions(cap=ASSEMBLE_CAP), dtype=np.int64)] = True
            if not np.array_equal(direct, expected):
                raise RuntimeError("solution enumeration disagrees with clause evaluation")
        verified = bool(np.array_equal(want, got))
        checked = len(codes)
        if not verified:
            bad = int(np.flatnonzero(want != got)[0])
            raise RuntimeError(f"circuit disagrees with the function at code {bad}")

    bound_form = n * len(odd_keys) * max_ratio
    return AssembleReport(circuit, covers, verified, checked, max_ratio, bound_form)
