"""One-stop bundle of everything a law's asymptotic formulas need.

build_kernels precomputes the potential table, harmonic pair, entrance
laws, and constants for a law, and caches exact free distributions
p^n(0, .) per step count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import engine, ladder, potential
from .errors import InconsistentEstimates
from .laws import LatticeStructure, Moments, StepLaw, lattice_structure, moments


@dataclass
class WalkKernels:
    law: StepLaw
    moments: Moments
    structure: LatticeStructure
    table: potential.PotentialTable
    pair: ladder.HarmonicPair
    h_inf_plus: ladder.EntranceLaw
    h_minus_inf: ladder.EntranceLaw
    constants: potential.WalkConstants
    c_plus_entrance: float
    c_minus_entrance: float
    _free_cache: dict[int, engine.LatticeDistribution] = field(
        default_factory=dict, repr=False)

    def p_n(self, n: int) -> engine.LatticeDistribution:
        """Exact free n-step distribution from 0 (cached)."""
        if n not in self._free_cache:
            self._free_cache[n] = engine.evolve_free(
                self.law, 0, n).distribution
        return self._free_cache[n]

    def p_n_at(self, n: int, displacement: int) -> float:
        return self.p_n(n).prob(displacement)

    def sigma2(self) -> float:
        return float(self.moments.sigma2)


def build_kernels(law: StepLaw, table_X: int = 80, pair_X: int = 400,
                  cross_check_tol: float = 0.02) -> WalkKernels:
    m = moments(law)
    table = potential.build_potential_table(law, X=table_X)
    consts = potential.constants(law, table)
    pair = ladder.build_harmonic_pair(law, X=pair_X)
    h_inf = ladder.entrance_law_inf(law, pair)
    h_minf = ladder.entrance_law_minus_inf(law, pair)
    cpe = ladder.c_plus_entrance_route(law, pair, table)
    cme = ladder.c_minus_entrance_route(law, pair, table)
    scale = max(abs(consts.c_plus), abs(cpe), 0.05)
    if abs(consts.c_plus - cpe) > cross_check_tol * scale:
        raise InconsistentEstimates(
            f"C^+ routes disagree: edge fit {consts.c_plus!r}, "
            f"entrance sum {cpe!r}")
    scale = max(abs(consts.c_minus), abs(cme), 0.05)
    if abs(consts.c_minus - cme) > cross_check_tol * scale:
        raise InconsistentEstimates(
            f"C^- routes disagree: edge fit {consts.c_minus!r}, "
            f"entrance sum {cme!r}")
    return WalkKernels(
        law=law, moments=m, structure=lattice_structure(law), table=table,
        pair=pair, h_inf_plus=h_inf, h_minus_inf=h_minf, constants=consts,
        c_plus_entrance=cpe, c_minus_entrance=cme,
    )
