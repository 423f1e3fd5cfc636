"""Catalog of potential spin structures and radial profiles.

Each structure is a fixed finite sum of Dirac-operator words: a block
operator acting on the 2x2 Dirac-block layout of the wave function
(identity, beta1, beta2, beta1*beta2, or the double block swap produced by
alpha1.alpha2-type terms), a spin-angular operator word from the harmonics
engine, a rational coefficient and a radial factor (the profile u(r) or
the retardation combination r*u'(r)).

The built-in catalog (selectable by code on the CLI):

    2.3   vector static            u(r)
    2.4   vector Gaunt             {1 - a1.a2} u(r)
    2.5   vector Breit retarded    {1 - a1.a2/2} u(r) + (n.a1)(n.a2) r u'(r)/2
    2.6   scalar Yukawa            b1 b2 u(r)
    2.7   scalar minimal           (b1 + b2)/2 u(r)
    2.10  scalar symmetric         (1 + b1 b2)/2 u(r)
    2.11  scalar projector         (1 + b1)(1 + b2)/4 u(r)
    id    radial identity          u(r)

New structures can be added by building a SpinStructure from words; new
spin-angular words must first be registered in harmonics.OPERATOR_WORDS.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

from .errors import ConfigError

__all__ = [
    "RadialProfile",
    "BlockOp",
    "PotentialWord",
    "SpinStructure",
    "StructureKind",
    "structure_from_code",
    "STRUCTURE_CODES",
]


@dataclass(frozen=True)
class RadialProfile:
    """A scalar radial factor with analytic derivatives.

    derivs holds callables for u, u', u'', u''', u''''; the higher entries
    are needed when the profile feeds a retardation word (which
    differentiates once) inside the channel reduction (which
    differentiates up to three more times).
    """

    name: str
    derivs: Tuple[Callable[[float], float], ...]

    def jet(self, r: float, order: int = 3) -> list[float]:
        return [self.derivs[k](r) for k in range(order + 1)]

    @staticmethod
    def linear(a: float) -> "RadialProfile":
        return RadialProfile(
            name=f"linear(a={a!r})",
            derivs=(
                lambda r: a * r,
                lambda r: a,
                lambda r: 0.0,
                lambda r: 0.0,
                lambda r: 0.0,
            ),
        )

    @staticmethod
    def coulomb(alpha: float) -> "RadialProfile":
        return RadialProfile(
            name=f"coulomb(alpha={alpha!r})",
            derivs=(
                lambda r: -alpha / r,
                lambda r: alpha / r**2,
                lambda r: -2.0 * alpha / r**3,
                lambda r: 6.0 * alpha / r**4,
                lambda r: -24.0 * alpha / r**5,
            ),
        )

    @staticmethod
    def funnel(a: float, alpha: float) -> "RadialProfile":
        lin, cou = RadialProfile.linear(a), RadialProfile.coulomb(alpha)
        return RadialProfile(
            name=f"funnel(a={a!r}, alpha={alpha!r})",
            derivs=tuple(
                (lambda f, g: (lambda r: f(r) + g(r)))(f, g)
                for f, g in zip(lin.derivs, cou.derivs)
            ),
        )

    @staticmethod
    def from_callable(name: str, f: Callable[[float], float]) -> "RadialProfile":
        """Wrap a bare callable; derivatives by nested central differences.

        Fourth-order five-point stencils with step max(1, |r|) * eps**(1/5);
        accurate enough for exploratory profiles, not for production fits.
        """

        def d(g):
            def g1(r, _g=g):
                h = max(1.0, abs(r)) * 2.2e-16 ** 0.2
                return (
                    -_g(r + 2 * h) + 8 * _g(r + h) - 8 * _g(r - h) + _g(r - 2 * h)
                ) / (12 * h)

            return g1

        f1 = d(f)
        f2 = d(f1)
        f3 = d(f2)
        f4 = d(f3)
        return RadialProfile(name=name, derivs=(f, f1, f2, f3, f4))


class BlockOp(enum.Enum):
    """Action on the 2x2 Dirac-block layout (block = (row, col))."""

    IDENT = "1"
    BETA1 = "beta1"
    BETA2 = "beta2"
    BETA1_BETA2 = "beta1*beta2"
    DOUBLE_SWAP = "alpha-type"  # swaps both Dirac indices, e.g. alpha1.alpha2

    def map_block(self, block: Tuple[int, int]) -> Tuple[Tuple[int, int], float]:
        """Return (source block feeding this target block, sign)."""
        r, c = block
        if self is BlockOp.IDENT:
            return (r, c), 1.0
        if self is BlockOp.BETA1:
            return (r, c), 1.0 if r == 0 else -1.0
        if self is BlockOp.BETA2:
            return (r, c), 1.0 if c == 0 else -1.0
        if self is BlockOp.BETA1_BETA2:
            return (r, c), (1.0 if r == 0 else -1.0) * (1.0 if c == 0 else -1.0)
        return (1 - r, 1 - c), 1.0


class ProfilePart(enum.Enum):
    U = "u"        # the profile itself
    R_DU = "r*u'"  # retardation factor r * u'(r)


@dataclass(frozen=True)
class PotentialWord:
    block: BlockOp
    spin: str  # word name from harmonics.OPERATOR_WORDS
    coeff: float
    part: ProfilePart = ProfilePart.U


class StructureKind(enum.Enum):
    VECTOR_STATIC = "2.3"
    VECTOR_GAUNT = "2.4"
    VECTOR_BREIT = "2.5"
    SCALAR_YUKAWA = "2.6"
    SCALAR_MINIMAL = "2.7"
    SCALAR_SYMMETRIC = "2.10"
    SCALAR_PROJECTOR = "2.11"
    RADIAL_IDENTITY = "id"


_WORDS = {
    StructureKind.VECTOR_STATIC: (
        PotentialWord(BlockOp.IDENT, "identity", 1.0),
    ),
    StructureKind.VECTOR_GAUNT: (
        PotentialWord(BlockOp.IDENT, "identity", 1.0),
        PotentialWord(BlockOp.DOUBLE_SWAP, "sigma1_sigma2", -1.0),
    ),
    StructureKind.VECTOR_BREIT: (
        PotentialWord(BlockOp.IDENT, "identity", 1.0),
        PotentialWord(BlockOp.DOUBLE_SWAP, "sigma1_sigma2", -0.5),
        PotentialWord(BlockOp.DOUBLE_SWAP, "sigma1_n_sigma2_n", 0.5, ProfilePart.R_DU),
    ),
    StructureKind.SCALAR_YUKAWA: (
        PotentialWord(BlockOp.BETA1_BETA2, "identity", 1.0),
    ),
    StructureKind.SCALAR_MINIMAL: (
        PotentialWord(BlockOp.BETA1, "identity", 0.5),
        PotentialWord(BlockOp.BETA2, "identity", 0.5),
    ),
    StructureKind.SCALAR_SYMMETRIC: (
        PotentialWord(BlockOp.IDENT, "identity", 0.5),
        PotentialWord(BlockOp.BETA1_BETA2, "identity", 0.5),
    ),
    StructureKind.SCALAR_PROJECTOR: (
        PotentialWord(BlockOp.IDENT, "identity", 0.25),
        PotentialWord(BlockOp.BETA1, "identity", 0.25),
        PotentialWord(BlockOp.BETA2, "identity", 0.25),
        PotentialWord(BlockOp.BETA1_BETA2, "identity", 0.25),
    ),
    StructureKind.RADIAL_IDENTITY: (
        PotentialWord(BlockOp.IDENT, "identity", 1.0),
    ),
}


@dataclass(frozen=True)
class SpinStructure:
    """One potential term: a structure kind with its radial profile."""

    kind: StructureKind
    profile: RadialProfile
    words: Tuple[PotentialWord, ...] = field(default=())

    def __post_init__(self):
        if not self.words:
            object.__setattr__(self, "words", _WORDS[self.kind])

    @property
    def code(self) -> str:
        return self.kind.value


STRUCTURE_CODES = {k.value: k for k in StructureKind}

SCALAR_CODES = ("2.6", "2.7", "2.10", "2.11")
VECTOR_CODES = ("2.3", "2.4", "2.5")


def structure_from_code(code: str, profile: RadialProfile) -> SpinStructure:
    kind = STRUCTURE_CODES.get(code)
    if kind is None:
        raise ConfigError(
            f"unknown structure code {code!r}; known: {sorted(STRUCTURE_CODES)}"
        )
    return SpinStructure(kind=kind, profile=profile)
