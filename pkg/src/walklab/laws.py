"""Step laws: exact rational increment distributions on Z and their moments.

A step law is a finitely supported probability distribution p on the
integers with sum(z * p(z)) == 0, checked exactly over the rationals.
Everything downstream (kernels, potential tables, ladder laws) is built
from a validated ``StepLaw``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import (
    DegenerateLaw,
    NonUnitMass,
    NonzeroMean,
    Reducible,
    SupportTooWide,
)

DEFAULT_MAX_SPAN = 64


@dataclass(frozen=True)
class StepLaw:
    """An exact, validated increment law.

    increments and weights are parallel tuples, increments strictly
    increasing, weights positive Fractions summing to 1.
    """

    name: str
    increments: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def prob(self, z: int) -> Fraction:
        try:
            i = self.increments.index(z)
        except ValueError:
            return Fraction(0)
        return self.weights[i]

    @property
    def zmin(self) -> int:
        return self.increments[0]

    @property
    def zmax(self) -> int:
        return self.increments[-1]

    def pmf_array(self) -> tuple[int, np.ndarray]:
        """Return (zmin, dense float64 pmf over [zmin, zmax])."""
        arr = np.zeros(self.zmax - self.zmin + 1)
        for z, w in zip(self.increments, self.weights):
            arr[z - self.zmin] = float(w)
        return self.zmin, arr

    def reflected(self) -> "StepLaw":
        """The law of -Y."""
        incs = tuple(-z for z in reversed(self.increments))
        wts = tuple(reversed(self.weights))
        return StepLaw(self.name + "~reflected", incs, wts)

    def items(self):
        return zip(self.increments, self.weights)


@dataclass(frozen=True)
class Moments:
    sigma2: Fraction
    m3: Fraction            # E[Y^3]
    m3_pos: Fraction        # E[Y^3; Y > 0]
    m3_neg: Fraction        # E[Y^3; Y < 0]
    lambda3: Fraction       # E[Y^3] / (3 sigma^2)
    left_continuous: bool   # no downward jump below -1
    right_continuous: bool  # no upward jump above +1


@dataclass(frozen=True)
class LatticeStructure:
    """Arithmetic structure of the n-step supports.

    period d is the gcd of all pairwise support differences; the n-step
    distribution lives on n*shift + d*Z.  An aperiodic irreducible law
    has d == 1, shift == 0.
    """

    period: int
    shift: int

    def reachable(self, n: int, displacement: int) -> bool:
        return (displacement - n * self.shift) % self.period == 0


def build_law(pairs, name: str = "law", max_span: int = DEFAULT_MAX_SPAN) -> StepLaw:
    """Validate raw (increment, weight) pairs into a StepLaw.

    Weights may be Fractions, ints, or "num/den" strings.  Raises a
    LawError subclass on any violation; never silently repairs input.
    """
    table: dict[int, Fraction] = {}
    for z, w in pairs:
        z = int(z)
        w = Fraction(w)
        if w < 0:
            raise NonUnitMass(f"negative weight {w} at increment {z}")
        if w == 0:
            continue
        table[z] = table.get(z, Fraction(0)) + w
    if not table:
        raise NonUnitMass("empty law")
    total = sum(table.values())
    if total != 1:
        raise NonUnitMass(f"weights sum to {total}, expected 1")
    mean = sum(z * w for z, w in table.items())
    if mean != 0:
        raise NonzeroMean(f"mean is {mean}, expected 0")
    incs = sorted(table)
    if incs[-1] - incs[0] > max_span:
        raise SupportTooWide(
            f"support span {incs[-1] - incs[0]} exceeds budget {max_span}"
        )
    if len(incs) == 1:
        raise DegenerateLaw("law is a point mass at 0")
    g = reduce(math.gcd, (abs(z) for z in incs if z != 0))
    if g != 1:
        raise Reducible(f"gcd of support is {g}; walk does not generate Z")
    return StepLaw(name, tuple(incs), tuple(table[z] for z in incs))


def load_law(path: str, max_span: int = DEFAULT_MAX_SPAN) -> StepLaw:
    """Load a law from a JSON file {"name": ..., "pairs": [[z, "p/q"], ...]}."""
    with open(path) as f:
        doc = json.load(f)
    return build_law(doc["pairs"], name=doc.get("name", "law"), max_span=max_span)


def moments(law: StepLaw) -> Moments:
    sigma2 = sum(w * z * z for z, w in law.items())
    if sigma2 == 0:
        raise DegenerateLaw("zero variance")
    m3 = sum(w * z ** 3 for z, w in law.items())
    m3_pos = sum(w * z ** 3 for z, w in law.items() if z > 0)
    m3_neg = sum(w * z ** 3 for z, w in law.items() if z < 0)
    return Moments(
        sigma2=sigma2,
        m3=m3,
        m3_pos=m3_pos,
        m3_neg=m3_neg,
        lambda3=m3 / (3 * sigma2),
        left_continuous=law.zmin >= -1,
        right_continuous=law.zmax <= 1,
    )


def lattice_structure(law: StepLaw) -> LatticeStructure:
    zs = law.increments
    d = 0
    for z in zs[1:]:
        d = math.gcd(d, z - zs[0])
    if d == 0:
        d = 1
    return LatticeStructure(period=d, shift=zs[0] % d)


def char_fn(law: StepLaw, l: float) -> complex:
    """phi(l) = E exp(i l Y)."""
    return sum(float(w) * complex(math.cos(z * l), math.sin(z * l))
               for z, w in law.items())


def one_minus_phi_cos(law: StepLaw, l: float) -> float:
    """1 - Re phi(l), written as a sum of squares for stability near l=0."""
    return sum(float(w) * 2.0 * math.sin(0.5 * z * l) ** 2 for z, w in law.items())


def phi_sin(law: StepLaw, l: float) -> float:
    """Im phi(l), using mean zero for cancellation-free evaluation near l=0."""
    return sum(float(w) * (math.sin(z * l) - z * l) for z, w in law.items())
