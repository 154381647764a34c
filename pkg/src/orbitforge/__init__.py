"""orbitforge: exact constructions and analysis of depth-3 bottom-fan-in-2
circuits for the inner product function.

The toolkit covers orbit combinatorics of the coordinate/swap symmetry group,
2-CNF building blocks and their counting spectra, six region-specific
construction recipes with exact capture-ratio certificates, saddle-point
coefficient estimates, exhaustive block/composition searches, and randomized
orbit covers assembled into fully verified circuits.
"""

from .cnf import (
    BlockKind,
    Composition,
    TwoCnf,
    block_cnf,
    compose,
    count_solutions_by_orbit,
    disjoint_and,
    is_consistent,
    parse_dimacs,
    to_dimacs,
)
from .core import (
    Assignment,
    Automorphism,
    OrbitKey,
    canonical_representative,
    connecting_automorphism,
    enumerate_orbits,
    ip,
    ip_eval,
    membership_prob,
    orbit_assignments,
    orbit_key,
    orbit_size,
    sample_automorphism,
)
from .cover import Sigma3Circuit, assemble_circuit, circuit_eval, cover_orbit
from .regions import (
    RatioReport,
    RegionConfig,
    certify,
    classify,
    construct_best,
    pad_construction,
    ratio,
    region_composition,
)
from .search import compose_search, exact_mu, median_closure, pareto_blocks
from .spectrum import (
    Spectrum,
    block_spectrum,
    coeff,
    coeff_fast,
    composition_spectrum,
)

__version__ = "0.1.0"
