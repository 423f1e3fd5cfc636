"""Bispinor harmonics and exact angular matrix elements.

A harmonic of total angular momentum j is stored as a sparse map from
product-basis kets (ell, ml, s1, s2) to real amplitudes, where s1, s2 in
{+1, -1} are the doubled spin projections of the two fermions.  The four
labels are

    A : total spin 0, orbital ell = j      (spin singlet)
    0 : total spin 1, orbital ell = j
    - : total spin 1, orbital ell = j + 1
    + : total spin 1, orbital ell = j - 1

A full parity sector carries eight radial sections in the fixed order
(s1, s2, t1, t2, u1, u2, v1, v2); the diagonal Dirac blocks hold one label
pair and the off-diagonal blocks the other, swapped between the two parity
sectors.  For j = 0 the second member of each pair does not exist and the
sector has four sections.

Operator words act on the sparse representation through exact
angular-momentum algebra: the direction operator n couples ell -> ell +- 1
with Gaunt factors built from Clebsch-Gordan products, and L acts through
the standard ladder matrix elements.  No quadrature is used here; the
sphere-quadrature evaluation lives in the test suite as an independent
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

from .cg import clebsch_gordan
from .errors import InvalidQuantumNumberError, UnsupportedOperatorError

__all__ = [
    "AngularState",
    "build_harmonics",
    "matrix_element",
    "label_spin_orbital",
    "OPERATOR_WORDS",
    "SECTION_NAMES",
]

Key = Tuple[int, int, int, int]  # (ell, ml, s1, s2)
Coeffs = Dict[Key, complex]

SECTION_NAMES = ("s1", "s2", "t1", "t2", "u1", "u2", "v1", "v2")

_SQRT2 = math.sqrt(2.0)

# Spin-coupling amplitudes |s, ms> over (s1, s2); all Condon-Shortley.
_SPIN_STATES = {
    (0, 0): {(1, -1): 1.0 / _SQRT2, (-1, 1): -1.0 / _SQRT2},
    (1, 1): {(1, 1): 1.0},
    (1, 0): {(1, -1): 1.0 / _SQRT2, (-1, 1): 1.0 / _SQRT2},
    (1, -1): {(-1, -1): 1.0},
}


def label_spin_orbital(label: str, j: int) -> Tuple[int, int]:
    """Map a harmonic label to (total spin s, orbital momentum ell)."""
    if label == "A":
        return 0, j
    if label == "0":
        return 1, j
    if label == "-":
        return 1, j + 1
    if label == "+":
        return 1, j - 1
    raise InvalidQuantumNumberError(f"unknown harmonic label {label!r}")


def _label_exists(label: str, j: int) -> bool:
    s, ell = label_spin_orbital(label, j)
    return ell >= 0 and abs(ell - s) <= j <= ell + s


@dataclass(frozen=True)
class AngularState:
    """One bispinor harmonic placed in its Dirac block.

    block is (row, col) with 0 = upper / 1 = lower bispinor index;
    i_prefactor records whether the radial amplitude multiplying this
    harmonic carries an explicit factor i, and every amplitude is divided
    by r (both are bookkeeping of the wave-function ansatz, not part of
    the coefficients).
    """

    j: int
    parity: int
    label: str
    block: Tuple[int, int]
    section: str
    coefficients: Dict[Key, float] = field(repr=False)
    i_prefactor: bool = False

    @property
    def spin(self) -> int:
        return label_spin_orbital(self.label, self.j)[0]

    @property
    def ell(self) -> int:
        return label_spin_orbital(self.label, self.j)[1]

    def norm_sq(self) -> float:
        return sum(c * c for c in self.coefficients.values())


def harmonic_coefficients(label: str, j: int, mj: int) -> Dict[Key, float]:
    """Exact amplitudes of the harmonic over the product basis at fixed mj."""
    if j < 0:
        raise InvalidQuantumNumberError("j must be non-negative")
    if abs(mj) > j:
        raise InvalidQuantumNumberError("|mj| must not exceed j")
    s, ell = label_spin_orbital(label, j)
    if not _label_exists(label, j):
        raise InvalidQuantumNumberError(f"label {label!r} does not exist at j={j}")
    out: Dict[Key, float] = {}
    for ms in range(-s, s + 1):
        ml = mj - ms
        if abs(ml) > ell:
            continue
        cg = clebsch_gordan(ell, ml, s, ms, j, mj)
        if cg == 0.0:
            continue
        for (s1, s2), amp in _SPIN_STATES[(s, ms)].items():
            out[(ell, ml, s1, s2)] = out.get((ell, ml, s1, s2), 0.0) + cg * amp
    return {k: v for k, v in out.items() if v != 0.0}


def parity_sector_labels(j: int, parity: int) -> Tuple[Tuple[str, str], Tuple[str, str]]:
    """Return (diagonal-block labels, off-diagonal-block labels) for a sector.

    parity must be +-1.  The sector with parity (-1)**j carries the
    (-, +) pair on the diagonal blocks; the opposite sector carries (A, 0)
    there, with the pairs swapped between diagonal and off-diagonal blocks.
    """
    if parity not in (1, -1):
        raise InvalidQuantumNumberError("parity must be +1 or -1")
    natural = parity == (1 if j % 2 == 0 else -1)
    if natural:
        return ("-", "+"), ("A", "0")
    return ("A", "0"), ("-", "+")


def build_harmonics(j: int, parity: int, mj: int | None = None) -> list[AngularState]:
    """Angular sections of a (j, parity) sector in the fixed radial order.

    Returns 8 states for j > 0 and 4 for j = 0 (the second member of each
    label pair does not exist there).  mj defaults to j; matrix elements
    between same-(j, parity) states are mj-independent.
    """
    if mj is None:
        mj = j
    diag, off = parity_sector_labels(j, parity)
    layout = (
        ("s1", diag[0], (0, 0), True),
        ("s2", diag[1], (0, 0), True),
        ("t1", off[0], (0, 1), False),
        ("t2", off[1], (0, 1), False),
        ("u1", off[0], (1, 0), False),
        ("u2", off[1], (1, 0), False),
        ("v1", diag[0], (1, 1), True),
        ("v2", diag[1], (1, 1), True),
    )
    states = []
    for section, label, block, ipf in layout:
        if not _label_exists(label, j):
            continue
        states.append(
            AngularState(
                j=j,
                parity=parity,
                label=label,
                block=block,
                section=section,
                coefficients=harmonic_coefficients(label, j, mj),
                i_prefactor=ipf,
            )
        )
    return states


# --------------------------------------------------------------------------
# Operator engine on the sparse product-basis representation.
# --------------------------------------------------------------------------


def _n_element(ellp: int, ell: int, ml: int, q: int) -> float:
    """<ellp, ml+q | n_q | ell, ml> for the unit direction operator.

    n_q are the spherical components; only ellp = ell +- 1 contribute.
    """
    if ellp not in (ell - 1, ell + 1) or ellp < 0:
        return 0.0
    if abs(ml + q) > ellp:
        return 0.0
    return (
        math.sqrt((2 * ell + 1) / (2 * ellp + 1))
        * clebsch_gordan(ell, 0, 1, 0, ellp, 0)
        * clebsch_gordan(ell, ml, 1, q, ellp, ml + q)
    )


def _add(out: Coeffs, key: Key, val: complex) -> None:
    if val != 0.0:
        out[key] = out.get(key, 0.0) + val


def apply_sigma_n(coeffs: Coeffs, particle: int) -> Coeffs:
    """Apply sigma_a . n; couples ell -> ell +- 1 and may flip one spin."""
    out: Coeffs = {}
    for (ell, ml, s1, s2), c in coeffs.items():
        spins = (s1, s2)
        s = spins[particle - 1]
        for ellp in (ell - 1, ell + 1):
            # sigma_z n_0 term
            a0 = _n_element(ellp, ell, ml, 0)
            if a0:
                _add(out, (ellp, ml, s1, s2), c * s * a0)
            # (sigma_+ n_{-1}) / sqrt(2): lowers ml, raises the spin
            if s < 0:
                am = _n_element(ellp, ell, ml, -1)
                if am:
                    flipped = (1, s2) if particle == 1 else (s1, 1)
                    _add(out, (ellp, ml - 1) + flipped, c * _SQRT2 * am)
            # -(sigma_- n_{+1}) / sqrt(2): raises ml, lowers the spin
            if s > 0:
                ap = _n_element(ellp, ell, ml, 1)
                if ap:
                    flipped = (-1, s2) if particle == 1 else (s1, -1)
                    _add(out, (ellp, ml + 1) + flipped, -c * _SQRT2 * ap)
    return out


def apply_sigma_L(coeffs: Coeffs, particle: int) -> Coeffs:
    """Apply sigma_a . L = sigma_z L_z + (sigma_+ L_- + sigma_- L_+)/2."""
    out: Coeffs = {}
    for (ell, ml, s1, s2), c in coeffs.items():
        spins = (s1, s2)
        s = spins[particle - 1]
        _add(out, (ell, ml, s1, s2), c * s * ml)
        if s < 0 and ml > -ell:
            # sigma_+ L_- : ml -> ml - 1, spin raised
            amp = math.sqrt((ell + ml) * (ell - ml + 1))
            flipped = (1, s2) if particle == 1 else (s1, 1)
            _add(out, (ell, ml - 1) + flipped, c * amp)
        if s > 0 and ml < ell:
            # sigma_- L_+ : ml -> ml + 1, spin lowered
            amp = math.sqrt((ell - ml) * (ell + ml + 1))
            flipped = (-1, s2) if particle == 1 else (s1, -1)
            _add(out, (ell, ml + 1) + flipped, c * amp)
    return out


def apply_sigma_dot_sigma(coeffs: Coeffs) -> Coeffs:
    """Apply sigma_1 . sigma_2 (pure spin operator)."""
    out: Coeffs = {}
    for (ell, ml, s1, s2), c in coeffs.items():
        _add(out, (ell, ml, s1, s2), c * s1 * s2)
        if s1 != s2:
            _add(out, (ell, ml, -s1, -s2), 2.0 * c)
    return out


def _apply_word(word: str, coeffs: Coeffs) -> Coeffs:
    if word == "identity":
        return dict(coeffs)
    if word == "sigma1_n":
        return apply_sigma_n(coeffs, 1)
    if word == "sigma2_n":
        return apply_sigma_n(coeffs, 2)
    if word == "sigma1_L":
        return apply_sigma_L(coeffs, 1)
    if word == "sigma2_L":
        return apply_sigma_L(coeffs, 2)
    if word == "sigma1_sigma2":
        return apply_sigma_dot_sigma(coeffs)
    if word == "sigma1_n_sigma2_n":
        return apply_sigma_n(apply_sigma_n(coeffs, 2), 1)
    raise UnsupportedOperatorError(f"unsupported operator word {word!r}")


#: Supported operator words; extend by registering an applier taking and
#: returning a sparse coefficient map.  beta words act on the Dirac block
#: labels, not on the coefficients, and are resolved in matrix_element.
OPERATOR_WORDS: Dict[str, Callable[[Coeffs], Coeffs]] = {
    "identity": lambda c: _apply_word("identity", c),
    "sigma1_n": lambda c: _apply_word("sigma1_n", c),
    "sigma2_n": lambda c: _apply_word("sigma2_n", c),
    "sigma1_L": lambda c: _apply_word("sigma1_L", c),
    "sigma2_L": lambda c: _apply_word("sigma2_L", c),
    "sigma1_sigma2": lambda c: _apply_word("sigma1_sigma2", c),
    "sigma1_n_sigma2_n": lambda c: _apply_word("sigma1_n_sigma2_n", c),
}

_BETA_WORDS = ("beta1", "beta2")


def overlap(bra: Coeffs, ket: Coeffs) -> complex:
    """Inner product sum(conj(bra) * ket) over shared product-basis kets."""
    if len(bra) <= len(ket):
        return sum(complex(v).conjugate() * ket[k] for k, v in bra.items() if k in ket)
    return sum(complex(bra[k]).conjugate() * v for k, v in ket.items() if k in bra)


def apply_word_chain(words: tuple[str, ...], coeffs: Coeffs) -> Coeffs:
    """Apply a product of operator words, rightmost first."""
    cur = dict(coeffs)
    for word in reversed(words):
        if word in _BETA_WORDS:
            raise UnsupportedOperatorError(
                f"{word} acts on Dirac blocks; it cannot appear inside a chain"
            )
        applier = OPERATOR_WORDS.get(word)
        if applier is None:
            raise UnsupportedOperatorError(f"unsupported operator word {word!r}")
        cur = applier(cur)
    return cur


def matrix_element(word, bra: AngularState, ket: AngularState) -> float:
    """Exact real matrix element <bra| word |ket>.

    word is a single operator name or a tuple of names applied as a
    product (rightmost first).  bra and ket must belong to the same
    (j, parity) sector; different-parity combinations vanish by
    superselection and are reported as exactly zero.
    """
    if isinstance(word, str):
        words: tuple[str, ...] = (word,)
    else:
        words = tuple(word)
    if bra.j != ket.j:
        return 0.0
    if bra.parity != ket.parity:
        return 0.0

    if len(words) == 1 and words[0] in _BETA_WORDS:
        if bra.block != ket.block:
            return 0.0
        idx = 0 if words[0] == "beta1" else 1
        sign = 1.0 if ket.block[idx] == 0 else -1.0
        return sign * _real(overlap(bra.coefficients, ket.coefficients))

    applied = apply_word_chain(words, dict(ket.coefficients))
    return _real(overlap(bra.coefficients, applied))


def _real(z: complex) -> float:
    z = complex(z)
    if abs(z.imag) > 1e-12 * max(1.0, abs(z.real)):
        raise InvalidQuantumNumberError(
            f"matrix element came out complex ({z!r}); phase conventions broken"
        )
    return z.real
