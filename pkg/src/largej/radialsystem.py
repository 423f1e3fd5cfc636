"""Assembly of the first-order radial system for a (j, parity) sector.

The stationary equation for the 16-component wave function is projected
onto the bispinor-harmonic sections of the block ansatz

    F = (1/r) [[ i s1 phiD1 + i s2 phiD2 ,    t1 phiO1 + t2 phiO2 ],
               [   u1 phiO1 + u2 phiO2  ,  i v1 phiD1 + i v2 phiD2 ]]

(phiD*/phiO* the diagonal/off-diagonal label pairs of the sector), which
yields the real system

    H(j) X'(r) + [ G(j)/r + m + U(r) - E ] X(r) = 0,
    X = (s1, s2, t1, t2, u1, u2, v1, v2).

The kinetic decomposition used throughout is exact:

    sigma.p [f(r)/r phi] = -i f'/r (sigma.n) phi
                           + i f/r^2 (sigma.n)(1 + sigma.L) phi,

so H collects matrix elements of sigma_a.n and G those of
sigma_a.n (1 + sigma_a.L); all angular action is algebraic.  Potential
words land in U(r) = sum_k g_k(r) M_k with constant matrices M_k.

Properties guaranteed (and re-checked on every build): H real with
H^T = -H and rank 4 (2 for j = 0); G, m and every M_k symmetric, hence
V = G/r + m + U - E symmetric; the projection closes on the sections
(residual below 1e-10), otherwise InternalConsistencyError names the
offending operator word.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from .errors import InternalConsistencyError, InvalidQuantumNumberError, StructureError
from .harmonics import (
    AngularState,
    apply_sigma_L,
    apply_sigma_n,
    apply_word_chain,
    build_harmonics,
    overlap,
)
from .jets import Jet, jet_const, jet_of_inverse_r
from .structures import BlockOp, ProfilePart, RadialProfile, SpinStructure

__all__ = ["RadialSystem", "build_radial_system"]

_CLOSURE_TOL = 1e-10


@dataclass(frozen=True)
class RadialSystem:
    """Constant matrices and potential terms of one (j, parity) sector."""

    j: int
    parity: int
    m1: float
    m2: float
    dim: int
    sections: Tuple[AngularState, ...]
    H: np.ndarray
    G: np.ndarray
    mass_matrix: np.ndarray
    # (profile, part, constant matrix) triples: U(r) = sum g_k(r) M_k
    potential_terms: Tuple[Tuple[RadialProfile, ProfilePart, np.ndarray], ...]

    def U(self, r: float) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        for profile, part, mat in self.potential_terms:
            out += _profile_value(profile, part, r) * mat
        return out

    def U_jet(self, r: float, order: int = 3) -> Jet:
        out = jet_const(np.zeros((self.dim, self.dim)), order)
        for profile, part, mat in self.potential_terms:
            g = _profile_jet(profile, part, r, order)
            out = out + Jet([gk * mat for gk in g.c])
        return out

    def V(self, r: float, e: float) -> np.ndarray:
        return self.G / r + self.mass_matrix + self.U(r) - e * np.eye(self.dim)

    def V_jet(self, r: float, e: float, order: int = 3) -> Jet:
        rinv = jet_of_inverse_r(r, order)
        out = Jet([rk * self.G for rk in rinv.c])
        out = out + jet_const(self.mass_matrix - e * np.eye(self.dim), order)
        return out + self.U_jet(r, order)

    def potential_scale(self, r: float) -> float:
        """Magnitude estimate of the potential entries at r, for tolerances."""
        tot = 0.0
        for profile, part, mat in self.potential_terms:
            tot += abs(_profile_value(profile, part, r)) * np.max(np.abs(mat))
        return tot


def _profile_value(profile: RadialProfile, part: ProfilePart, r: float) -> float:
    if part is ProfilePart.U:
        return profile.derivs[0](r)
    return r * profile.derivs[1](r)


def _profile_jet(profile: RadialProfile, part: ProfilePart, r: float, order: int) -> Jet:
    u = profile.jet(r, order + (1 if part is ProfilePart.R_DU else 0))
    if part is ProfilePart.U:
        return Jet(u[: order + 1])
    # g = r u': g^(k) = k u^(k) + r u^(k+1)
    return Jet([k * u[k] + r * u[k + 1] for k in range(order + 1)])


def _phase(block: Tuple[int, int]) -> complex:
    return 1j if block[0] == block[1] else 1.0


def _swap_row(block):
    return (1 - block[0], block[1])


def _swap_col(block):
    return (block[0], 1 - block[1])


def _check_closure(applied: dict, targets: Sequence[AngularState], word: str) -> None:
    residual = dict(applied)
    for t in targets:
        amp = overlap(t.coefficients, applied)
        for k, v in t.coefficients.items():
            residual[k] = residual.get(k, 0.0) - amp * v
    res = np.sqrt(sum(abs(v) ** 2 for v in residual.values()))
    norm = np.sqrt(sum(abs(v) ** 2 for v in applied.values()))
    if res > _CLOSURE_TOL * max(1.0, norm):
        raise InternalConsistencyError(
            f"projection does not close for operator {word!r} "
            f"(residual {res:.3e})",
            word=word,
        )


def build_radial_system(
    structures: Sequence[SpinStructure],
    m1: float,
    m2: float,
    j: int,
    parity: int,
    mj: int | None = None,
) -> RadialSystem:
    """Project the two-fermion stationary operator onto a (j, parity) sector.

    structures may be empty (free case, U = 0).  Masses must be
    non-negative.  Returns the system with all invariants checked.
    """
    if j < 0:
        raise InvalidQuantumNumberError("j must be non-negative")
    if m1 < 0 or m2 < 0:
        raise InvalidQuantumNumberError("masses must be non-negative")

    sections = tuple(build_harmonics(j, parity, mj))
    dim = len(sections)
    by_block: dict[Tuple[int, int], list[Tuple[int, AngularState]]] = {}
    for idx, st in enumerate(sections):
        by_block.setdefault(st.block, []).append((idx, st))

    H = np.zeros((dim, dim))
    G = np.zeros((dim, dim))

    # Kinetic terms.  For target block b the equation row, divided by the
    # block phase and multiplied by r, receives from sigma_a.p acting on the
    # source block the coefficients derived from the phase ratio:
    #   diagonal target:      f' -> -<sigma_a n>,  f/r -> +<sigma_a n (1+sigma_a L)>
    #   off-diagonal target:  f' -> +<sigma_a n>,  f/r -> -<...>
    # with an extra overall -1 for particle 2 (it enters through h2(-p)).
    for tgt_block, tgt_list in by_block.items():
        for particle, src_block, extra in (
            (1, _swap_row(tgt_block), 1.0),
            (2, _swap_col(tgt_block), -1.0),
        ):
            ratio = _phase(src_block) / _phase(tgt_block)
            c_h = ratio * (-1j) * extra
            c_g = ratio * (1j) * extra
            for src_idx, src in by_block.get(src_block, []):
                applied_n = apply_sigma_n(dict(src.coefficients), particle)
                applied_g = dict(applied_n)
                extra_g = apply_sigma_n(
                    apply_sigma_L(dict(src.coefficients), particle), particle
                )
                for k, v in extra_g.items():
                    applied_g[k] = applied_g.get(k, 0.0) + v
                _check_closure(applied_n, [s for _, s in tgt_list], f"sigma{particle}_n")
                _check_closure(
                    applied_g,
                    [s for _, s in tgt_list],
                    f"sigma{particle}_n(1+sigma{particle}_L)",
                )
                for tgt_idx, tgt in tgt_list:
                    H[tgt_idx, src_idx] += _to_real(
                        c_h * overlap(tgt.coefficients, applied_n), "kinetic H"
                    )
                    G[tgt_idx, src_idx] += _to_real(
                        c_g * overlap(tgt.coefficients, applied_g), "kinetic G"
                    )

    # Mass matrix: diag(m+ I, m- I, -m- I, -m+ I) over (s, t, u, v).
    mass = np.zeros((dim, dim))
    for idx, st in enumerate(sections):
        r, c = st.block
        mass[idx, idx] = (m1 if r == 0 else -m1) + (m2 if c == 0 else -m2)

    # Potential words.
    terms = []
    for structure in structures:
        mats: dict[ProfilePart, np.ndarray] = {}
        for word in structure.words:
            mat = np.zeros((dim, dim))
            for tgt_block, tgt_list in by_block.items():
                src_block, sign = word.block.map_block(tgt_block)
                ratio = _phase(src_block) / _phase(tgt_block)
                for src_idx, src in by_block.get(src_block, []):
                    applied = apply_word_chain((word.spin,), dict(src.coefficients))
                    _check_closure(applied, [s for _, s in tgt_list], word.spin)
                    for tgt_idx, tgt in tgt_list:
                        mat[tgt_idx, src_idx] += _to_real(
                            ratio
                            * sign
                            * word.coeff
                            * overlap(tgt.coefficients, applied),
                            word.spin,
                        )
            prev = mats.get(word.part)
            mats[word.part] = mat if prev is None else prev + mat
        for part, mat in mats.items():
            terms.append((structure.profile, part, mat))

    system = RadialSystem(
        j=j,
        parity=parity,
        m1=m1,
        m2=m2,
        dim=dim,
        sections=sections,
        H=H,
        G=G,
        mass_matrix=mass,
        potential_terms=tuple(terms),
    )
    _check_invariants(system)
    return system


def _to_real(z: complex, what: str) -> float:
    z = complex(z)
    if abs(z.imag) > 1e-12 * max(1.0, abs(z.real)):
        raise InternalConsistencyError(
            f"non-real projection coefficient in {what}: {z!r}", word=what
        )
    return z.real


def _check_invariants(system: RadialSystem) -> None:
    H, G = system.H, system.G
    if np.max(np.abs(H + H.T)) > 1e-12 * max(1.0, np.max(np.abs(H))):
        raise StructureError("H is not antisymmetric")
    if np.max(np.abs(G - G.T)) > 1e-10 * max(1.0, np.max(np.abs(G))):
        raise StructureError("G is not symmetric")
    for _, _, mat in system.potential_terms:
        if np.max(np.abs(mat - mat.T)) > 1e-10 * max(1.0, np.max(np.abs(mat))):
            raise StructureError("potential word matrix is not symmetric")
    sv = np.linalg.svd(H, compute_uv=False)
    want = 2 if system.j == 0 else 4
    if not (np.sum(sv > 1e-8) == want and np.sum(sv < 1e-8) == system.dim - want):
        raise StructureError(
            f"rank(H) != {want} at j={system.j} (singular values {sv})"
        )


@lru_cache(maxsize=512)
def _cached_free_system(j: int, parity: int) -> RadialSystem:
    return build_radial_system((), 0.0, 0.0, j, parity)


def free_system(j: int, parity: int) -> RadialSystem:
    """Potential-free system (kinetic structure only); cached."""
    return _cached_free_system(j, parity)
