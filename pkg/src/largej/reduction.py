"""Reduction of the first-order radial system to 2x2 channel form.

Steps, each with its own invariants:

1.  split_system: an orthogonal change of basis O sorts the eight radial
    amplitudes into four differential components X1 and four algebraic
    ones X2, with O H O^T = 2 diag(J2, 0), J2 the 4x4 symplectic unit.
    H is potential-independent and bipartite between the (s, v) and
    (t, u) sections, so the transform is built deterministically from the
    exact range/null projectors of the coupling block (KK^T/4 has
    eigenvalues exactly 1 and 0); the X1 pair corresponding to the
    diagonal Dirac blocks stays pure in the section basis, which is what
    ties channel 1/2 to the harmonic content of the upper-left block.

2.  first_order_reduced: V_perp = (V11 - V12 V22^-1 V21)/2 on X1.
    Zeros of det V22 are the energy-dependent non-physical poles;
    evaluation there raises PoleError rather than extrapolating.

3.  channel_functions: with X1 = (Phi1, Phi2) and the 2x2 blocks of
    V_perp, eliminating Phi2 gives a second-order operator for Phi1 which
    after the scaling by the square root of the (diagonal) Phi2 block
    takes the form

        d^2/dr^2 - W(r, E) - {Z(r, E), d/dr} J1,

    with W symmetric (entries W1, W2, Y) and J1 the 2x2 symplectic unit.
    All r-derivatives propagate through order-3 jets from the profiles,
    so W and Z come with exact first derivatives.

Pole scanning uses sign-change bisection of det V22 and of the reduced
diagonal block determinant on a log-spaced grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .errors import (
    BranchError,
    PoleError,
    StructureError,
    UnsupportedStructureError,
)
from .jets import Jet
from .radialsystem import RadialSystem

__all__ = [
    "SplitSystem",
    "ChannelFunctions",
    "ChannelPoint",
    "PolePoint",
    "split_system",
    "first_order_reduced",
    "channel_functions",
    "scan_poles",
]

_DET_REL_TOL = 1e-12


def _symplectic(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


@dataclass(frozen=True)
class SplitSystem:
    """Orthogonal split of a radial system into differential/algebraic parts."""

    system: RadialSystem
    O: np.ndarray
    n_diff: int  # size of X1 (4, or 2 at j = 0)
    g1_indices: Tuple[int, ...]
    g2_indices: Tuple[int, ...]

    @property
    def J(self) -> np.ndarray:
        return _symplectic(self.n_diff // 2)

    def v_tilde_jet(self, r: float, e: float, order: int = 3) -> Jet:
        v = self.system.V_jet(r, e, order)
        return Jet([self.O @ c @ self.O.T for c in v.c])

    def v_blocks(self, r: float, e: float, order: int = 3):
        """Jets of (V11, V12, V21, V22) in the split basis."""
        vt = self.v_tilde_jet(r, e, order)
        n = self.n_diff
        return vt[:n, :n], vt[:n, n:], vt[n:, :n], vt[n:, n:]

    def det_v22(self, r: float, e: float) -> float:
        v22 = self.v_blocks(r, e, order=0)[3].value
        return float(np.linalg.det(v22))


def split_system(system: RadialSystem) -> SplitSystem:
    """Build the deterministic orthogonal split transform for one sector."""
    H = system.H
    dim = system.dim
    # Section grouping: (s, v) rows/columns vs (t, u).
    g1 = tuple(i for i, st in enumerate(system.sections) if st.section[0] in "sv")
    g2 = tuple(i for i, st in enumerate(system.sections) if st.section[0] in "tu")
    K = H[np.ix_(g1, g2)]
    if np.max(np.abs(H[np.ix_(g1, g1)])) > 1e-13 or np.max(np.abs(H[np.ix_(g2, g2)])) > 1e-13:
        raise StructureError("H is not bipartite between (s,v) and (t,u) sections")

    n_pairs = 1 if system.j == 0 else 2
    sv = np.linalg.svd(K, compute_uv=False)
    if not (np.sum(sv > 1e-8) == n_pairs and np.all(np.abs(sv[sv > 1e-8] - 2.0) < 1e-10)):
        raise StructureError(f"coupling block has wrong rank/values: {sv}")

    proj_range = K @ K.T / 4.0
    # X1 upper half: deterministic orthonormal basis of range(K) seeded by the
    # s-section directions, so channel i keeps the harmonic of slot s_i.
    seeds = []
    for i, st in enumerate(system.sections):
        if st.section in ("s1", "s2"):
            seeds.append(g1.index(i))
    basis1: List[np.ndarray] = []
    for sd in seeds[:n_pairs]:
        e = np.zeros(len(g1))
        e[sd] = 1.0
        w = proj_range @ e
        for b in basis1:
            w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm < 1e-10:
            raise StructureError("seed fell outside range(K); split is degenerate")
        w /= nrm
        if w[sd] < 0:
            w = -w
        basis1.append(w)

    # Partner half: Phi2_i = -H Phi1_i / 2 lies in the (t,u) sector; since
    # H^2 = -4P on its range this pairing gives exactly the symplectic form.
    x1_rows = []
    for w in basis1:
        full = np.zeros(dim)
        full[list(g1)] = w
        x1_rows.append(full)
    for w in basis1:
        full = np.zeros(dim)
        full[list(g1)] = w
        x1_rows.append(-(H @ full) / 2.0)

    # Kernel rows: null projectors applied to canonical seeds, Gram-Schmidt.
    x2_rows = []
    for grp, block in ((g1, proj_range), (g2, K.T @ K / 4.0)):
        nullproj = np.eye(len(grp)) - block
        got = 0
        for sd in range(len(grp)):
            e = np.zeros(len(grp))
            e[sd] = 1.0
            w = nullproj @ e
            for prev in x2_rows:
                w -= (prev[list(grp)] @ w) * prev[list(grp)]
            nrm = np.linalg.norm(w)
            if nrm < 1e-8:
                continue
            w /= nrm
            k = int(np.argmax(np.abs(w)))
            if w[k] < 0:
                w = -w
            full = np.zeros(dim)
            full[list(grp)] = w
            x2_rows.append(full)
            got += 1
            if got == len(grp) - n_pairs:
                break

    O = np.vstack(x1_rows + x2_rows)
    if np.max(np.abs(O @ O.T - np.eye(dim))) > 1e-12:
        raise StructureError("split transform is not orthogonal")
    target = np.zeros((dim, dim))
    target[: 2 * n_pairs, : 2 * n_pairs] = 2.0 * _symplectic(n_pairs)
    if np.max(np.abs(O @ H @ O.T - target)) > 1e-10:
        raise StructureError("split transform does not canonicalize H")
    return SplitSystem(
        system=system, O=O, n_diff=2 * n_pairs, g1_indices=g1, g2_indices=g2
    )


def _det_scale(m: np.ndarray) -> float:
    """Hadamard bound on |det|, used to make the pole test relative."""
    rows = np.sqrt(np.sum(m * m, axis=1))
    return float(np.prod(np.maximum(rows, 1e-300)))


def _v_perp_jet(split: SplitSystem, r: float, e: float, order: int = 3) -> Jet:
    """Jet of V_perp = (V11 - V12 V22^-1 V21)/2; PoleError on singular V22."""
    v11, v12, v21, v22 = split.v_blocks(r, e, order)
    det = float(np.linalg.det(v22.value))
    if abs(det) <= _DET_REL_TOL * _det_scale(v22.value):
        raise PoleError(r, e, which="V22")
    vperp = (v11 - v12 @ v22.matinv() @ v21) * 0.5
    asym = np.max(np.abs(vperp.value - vperp.value.T))
    if asym > 1e-10 * max(1.0, np.max(np.abs(vperp.value))):
        raise StructureError(f"V_perp not symmetric (deviation {asym:.2e})")
    return vperp


def first_order_reduced(split: SplitSystem, r: float, e: float) -> np.ndarray:
    """The reduced potential matrix on the differential components."""
    return _v_perp_jet(split, r, e, order=0).value


@dataclass(frozen=True)
class ChannelPoint:
    """Channel functions and their exact first r-derivatives at one (r, E)."""

    w1: float
    w2: float
    y: float
    z: float
    d_w1: float
    d_w2: float
    d_y: float
    d_z: float
    det_v22: float
    v22_diag: Tuple[float, float]


@dataclass(frozen=True)
class PolePoint:
    r: float
    e: float
    which: str  # "V22" or "V22_reduced"


@dataclass
class ChannelFunctions:
    """Evaluable 2x2 channel form of one (j, parity) sector.

    The evaluators are pure functions of (r, E); pole_report accumulates
    the singular points found by explicit scans.

    orientation selects which member of each symplectic pair is
    eliminated algebraically: "eliminate-partner" removes the partner
    half (the usual choice), "eliminate-primary" removes the primary half
    and solves for the partners instead.  Both describe the same physics;
    the choice matters only because the eliminated block must be
    invertible on the evaluation domain, and which block is safely
    invertible near the circular orbit depends on the parity sector.
    Channel indices keep their meaning (pair i stays pair i).
    """

    split: SplitSystem
    orientation: str = "eliminate-partner"
    pole_report: List[PolePoint] = field(default_factory=list)

    @property
    def j(self) -> int:
        return self.split.system.j

    @property
    def parity(self) -> int:
        return self.split.system.parity

    def point(self, r: float, e: float) -> ChannelPoint:
        return _channel_point(self.split, r, e, self.orientation)

    def w_matrix(self, r: float, e: float) -> np.ndarray:
        p = self.point(r, e)
        return np.array([[p.w1, p.y], [p.y, p.w2]])

    def W1(self, r: float, e: float) -> float:
        return self.point(r, e).w1

    def W2(self, r: float, e: float) -> float:
        return self.point(r, e).w2

    def Y(self, r: float, e: float) -> float:
        return self.point(r, e).y

    def Z(self, r: float, e: float) -> float:
        return self.point(r, e).z

    def scan_poles(self, e: float, r_min: float = 1e-4, r_max: float = 50.0,
                   n: int = 2048) -> List[PolePoint]:
        found = scan_poles(self.split, e, r_min=r_min, r_max=r_max, n=n,
                           orientation=self.orientation)
        self.pole_report.extend(found)
        return found


def channel_functions(split: SplitSystem,
                      orientation: str = "eliminate-partner") -> ChannelFunctions:
    """Channel-function evaluators for a split system (j > 0 only)."""
    if split.n_diff != 4:
        raise UnsupportedStructureError(
            "channel reduction needs the four-component differential part (j > 0)"
        )
    if orientation not in ("eliminate-partner", "eliminate-primary"):
        raise UnsupportedStructureError(f"unknown orientation {orientation!r}")
    return ChannelFunctions(split=split, orientation=orientation)


def _channel_point(split: SplitSystem, r: float, e: float,
                   orientation: str = "eliminate-partner") -> ChannelPoint:
    vperp = _v_perp_jet(split, r, e, order=3)
    if orientation == "eliminate-partner":
        a = vperp[:2, 2:]   # primary-partner coupling block
        b = vperp[2:, :2]
        c = vperp[:2, :2]
        d = vperp[2:, 2:]
    else:
        # eliminate the primary half: same operator shape with the blocks
        # relabeled as (V11 <-> V22, V12 -> -V21, V21 -> -V12)
        a = (-1.0) * vperp[2:, :2]
        b = (-1.0) * vperp[:2, 2:]
        c = vperp[2:, 2:]
        d = vperp[:2, :2]

    dv = d.value
    scale = max(np.max(np.abs(vperp.value)), 1e-300)
    if max(abs(dv[0, 1]), abs(dv[1, 0])) > 1e-9 * scale:
        raise UnsupportedStructureError(
            f"eliminated-pair block is not diagonal at r={r!r}, E={e!r} "
            f"(off-diagonal {dv[0,1]:.3e}, {dv[1,0]:.3e} vs scale {scale:.3e})"
        )
    ddiag = Jet([np.array([m[0, 0], m[1, 1]]) for m in d.c])
    det_d = float(dv[0, 0] * dv[1, 1])
    if abs(det_d) <= _DET_REL_TOL * max(scale * scale, 1e-300):
        raise PoleError(r, e, which="V22_reduced")
    # The scaling needs a positive-definite eliminated block.  When both
    # entries are negative we reduce -L instead (same solutions), which
    # negates the eliminated block and the remaining potential block; a
    # mixed-sign block has no 2-term form and is a genuine branch error.
    if dv[0, 0] < 0 and dv[1, 1] < 0:
        ddiag = -ddiag
        c = -c
    elif dv[0, 0] <= 0 or dv[1, 1] <= 0:
        raise BranchError(r, e, float(min(dv[0, 0], dv[1, 1])))

    s = ddiag.sqrt_elementwise()           # order 3
    sinv = s.reciprocal_elementwise()
    dinv = ddiag.reciprocal_elementwise()

    def diag_mat(jet: Jet) -> Jet:
        return Jet([np.diag(v) for v in jet.c])

    s_m, sinv_m, dinv_m = diag_mat(s), diag_mat(sinv), diag_mat(dinv)

    # L = d^2 + M1 d + M0 after the square-root scaling.
    p_j = dinv_m.d() + (a @ dinv_m - dinv_m @ b).truncate(2)  # order 2
    m1 = (2.0 * (sinv_m @ s_m.d()) + s_m @ p_j @ s_m).truncate(2)
    q_j = ((-1.0) * (dinv_m @ b).d() - a @ dinv_m @ b + c).truncate(1)
    m0 = (sinv_m @ s_m.d(2) + s_m @ p_j @ s_m.d() + s_m @ q_j @ s_m).truncate(1)

    m1v, m1d = m1.c[0], m1.c[1]
    mscale = max(np.max(np.abs(m1v)), 1.0)
    if max(abs(m1v[0, 0]), abs(m1v[1, 1])) > 1e-8 * mscale:
        raise StructureError("first-derivative coefficient has diagonal entries")
    if abs(m1v[0, 1] + m1v[1, 0]) > 1e-8 * mscale:
        raise StructureError("first-derivative coefficient is not antisymmetric")

    z = -0.5 * m1v[0, 1]
    zp = -0.5 * m1d[0, 1]
    zpp = -0.5 * m1.c[2][0, 1]
    j1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    wmat = -(m0.c[0]) - zp * j1
    wmat_d = -(m0.c[1]) - zpp * j1

    wscale = max(np.max(np.abs(wmat)), 1.0)
    if abs(wmat[0, 1] - wmat[1, 0]) > 1e-7 * wscale:
        raise StructureError(
            f"channel matrix not symmetric (residual {wmat[0,1]-wmat[1,0]:.3e})"
        )
    y = 0.5 * (wmat[0, 1] + wmat[1, 0])
    yd = 0.5 * (wmat_d[0, 1] + wmat_d[1, 0])
    return ChannelPoint(
        w1=wmat[0, 0],
        w2=wmat[1, 1],
        y=y,
        z=z,
        d_w1=wmat_d[0, 0],
        d_w2=wmat_d[1, 1],
        d_y=yd,
        d_z=zp,
        det_v22=float(np.linalg.det(split.v_blocks(r, e, order=0)[3].value)),
        v22_diag=(float(dv[0, 0]), float(dv[1, 1])),
    )


def scan_poles(
    split: SplitSystem,
    e: float,
    r_min: float = 1e-4,
    r_max: float = 50.0,
    n: int = 2048,
    orientation: str = "eliminate-partner",
) -> List[PolePoint]:
    """Locate zeros of det V22 and of the reduced eliminated block.

    Both determinants factor into real symmetric eigenvalue branches which
    frequently vanish in pairs (the blocks carry doubly degenerate
    entries), so the scan bisects each sorted eigenvalue branch separately
    rather than the determinant itself.
    """

    def outer_branches(r: float) -> np.ndarray:
        v22 = split.v_blocks(r, e, order=0)[3].value
        return np.linalg.eigvalsh(v22)

    def inner_branches(r: float) -> np.ndarray:
        vperp = _v_perp_jet(split, r, e, order=0)
        if orientation == "eliminate-partner":
            dv = vperp.value[2:, 2:]
        else:
            dv = vperp.value[:2, :2]
        return np.sort(np.array([dv[0, 0], dv[1, 1]]))

    grid = np.geomspace(r_min, r_max, n)
    out: List[PolePoint] = []
    for fn, tag, nb in ((outer_branches, "V22", split.system.dim - split.n_diff),
                        (inner_branches, "V22_reduced", 2)):
        vals = np.full((n, nb), np.nan)
        for i, r in enumerate(grid):
            try:
                vals[i] = fn(r)
            except (PoleError, BranchError, UnsupportedStructureError):
                continue
        for k in range(nb):
            col = vals[:, k]
            for i in range(n - 1):
                a, b = col[i], col[i + 1]
                if not (np.isfinite(a) and np.isfinite(b)) or a == 0.0 or a * b > 0:
                    continue
                lo, hi, flo = grid[i], grid[i + 1], a
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    try:
                        fm = fn(mid)[k]
                    except (PoleError, BranchError, UnsupportedStructureError):
                        break
                    if fm == 0.0:
                        lo = hi = mid
                        break
                    if flo * fm < 0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                    if hi - lo <= 1e-12 * max(1.0, hi):
                        break
                root = 0.5 * (lo + hi)
                try:
                    f_root = abs(fn(root)[k])
                except (PoleError, BranchError, UnsupportedStructureError):
                    continue
                # a sign change through +-infinity (an upstream pole) never
                # drives the branch value down; only genuine zeros qualify
                if f_root > 1e-3 * max(abs(a), abs(b), 1e-300):
                    continue
                if not any(
                    p.which == tag and abs(p.r - root) <= 1e-8 * max(1.0, root)
                    for p in out
                ):
                    out.append(PolePoint(r=root, e=e, which=tag))
    out.sort(key=lambda p: (p.which, p.r))
    return out
