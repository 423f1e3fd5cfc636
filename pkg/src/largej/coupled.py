"""Two-channel treatment of the reduced pair of radial equations.

The diagonal channels W1, W2 are classified by the behaviour of their
circular-orbit asymptotics in lam = 1/sqrt(j):

* case 1: the power-law scalings differ (different exponents or
  coefficients) - the channels generate independent spectral branches and
  the coupling does not contribute at zero order;
* case 2: equal scalings, orbits differing at relative O(lam) - still
  decoupled at zero order;
* case 3: equal scalings with orbits coinciding to O(lam^2) - the
  channels must be diagonalized together.  At zero order the pair reduces
  to two oscillators with

      nu_tilde_{1,2} = [nu1 + nu2 +- sqrt((nu1 - nu2)^2 + 4 chi^2)] / 2,

  chi the lam -> 0 limit of the rescaled coupling
  y = lam^2 r_inf^2 Y evaluated along the circular orbit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    AmbiguityError,
    LargejError,
    NoOrbitError,
    NotCoupledDegenerateError,
)
from .quasipotential import (
    AsymptoticScaling,
    EffectivePotential,
    Level,
    OSC_LAMBDAS,
    OscillatorParams,
    _OrbitLadder,
    _polyfit_extrapolate,
    fit_asymptotics,
    oscillator_params,
    zero_order_levels,
)

__all__ = [
    "CouplingCase",
    "CouplingClass",
    "TwoChannelModel",
    "classify_coupling",
    "solve_decoupled",
    "solve_coupled",
    "CoupledOscillator",
    "coupled_oscillator",
]

CLASSIFY_LADDER = (64, 256, 1024)


class CouplingCase(enum.Enum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3


class TwoChannelModel:
    """A pair of diagonal channel potentials plus their coupling.

    channel(i) returns an EffectivePotential for i in (0, 1);
    y_value(r, e, ell) evaluates the raw off-diagonal coupling Y.
    """

    def channel(self, i: int) -> EffectivePotential:
        raise NotImplementedError

    def y_value(self, r: float, e: float, ell: float) -> float:
        raise NotImplementedError


@dataclass
class CouplingClass:
    case: CouplingCase
    scalings: Tuple[AsymptoticScaling, AsymptoticScaling]
    rho_diff_order: Optional[float]
    mu_diff_order: Optional[float]
    evidence: Dict[str, float] = field(default_factory=dict)


def _same_scaling(s1: AsymptoticScaling, s2: AsymptoticScaling, tol=1e-6) -> bool:
    return (
        s1.p == s2.p
        and s1.q == s2.q
        and abs(s1.c_r - s2.c_r) <= tol * max(abs(s1.c_r), abs(s2.c_r))
        and abs(s1.c_b - s2.c_b) <= tol * max(abs(s1.c_b), abs(s2.c_b))
    )


def _diff_order(lams, diffs, floor=1e-12):
    """Log-log slope of a difference sequence; None when it is zero."""
    lams = np.asarray(lams)
    diffs = np.asarray(diffs)
    if np.max(np.abs(diffs)) < floor:
        return None, 0.0
    mask = np.abs(diffs) > floor
    if mask.sum() < 2:
        return None, 0.0
    y = np.log(np.abs(diffs[mask]))
    x = np.log(lams[mask])
    A = np.column_stack([np.ones_like(x), x])
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.max(np.abs(A @ sol - y)))
    return float(sol[1]), resid


def classify_coupling(
    model: TwoChannelModel,
    j_ladder: Sequence[int] = CLASSIFY_LADDER,
    orbit_ladders: Optional[Tuple[_OrbitLadder, _OrbitLadder]] = None,
    scalings: Optional[Tuple[AsymptoticScaling, AsymptoticScaling]] = None,
) -> CouplingClass:
    """Classify the pair by orbit asymptotics evidence."""
    pots = (model.channel(0), model.channel(1))
    ladders = orbit_ladders or (_OrbitLadder(pots[0]), _OrbitLadder(pots[1]))
    if scalings is None:
        scalings = (
            fit_asymptotics(pots[0], orbits=ladders[0]),
            fit_asymptotics(pots[1], orbits=ladders[1]),
        )
    s1, s2 = scalings
    if not _same_scaling(s1, s2):
        return CouplingClass(
            case=CouplingCase.CASE1,
            scalings=scalings,
            rho_diff_order=None,
            mu_diff_order=None,
            evidence={
                "c_r_rel_diff": abs(s1.c_r - s2.c_r) / max(abs(s1.c_r), 1e-300),
                "c_b_rel_diff": abs(s1.c_b - s2.c_b) / max(abs(s1.c_b), 1e-300),
            },
        )

    lams, rho_d, mu_d = [], [], []
    for j in j_ladder:
        o1 = ladders[0].orbit(j)
        o2 = ladders[1].orbit(j)
        lams.append(1.0 / math.sqrt(j))
        rho_d.append((o2.r_c - o1.r_c) / o1.r_c)
        mu_d.append((o2.b_c - o1.b_c) / abs(o1.b_c))
    rho_order, rho_res = _diff_order(lams, rho_d)
    mu_order, mu_res = _diff_order(lams, mu_d)
    evidence = {
        "rho_order": float("nan") if rho_order is None else rho_order,
        "mu_order": float("nan") if mu_order is None else mu_order,
        "rho_fit_resid": rho_res,
        "mu_fit_resid": mu_res,
        "max_rho_diff": float(np.max(np.abs(rho_d))),
        "max_mu_diff": float(np.max(np.abs(mu_d))),
    }
    orders = [o for o in (rho_order, mu_order) if o is not None]
    if not orders:
        return CouplingClass(CouplingCase.CASE3, scalings, None, None, evidence)
    order = min(orders)
    if order >= 1.65:
        case = CouplingCase.CASE3
    elif order <= 1.35:
        case = CouplingCase.CASE2
    else:
        raise AmbiguityError(
            f"channel-difference order {order:.2f} sits between case 2 and case 3",
            candidates=(CouplingCase.CASE2, CouplingCase.CASE3),
        )
    return CouplingClass(case, scalings, rho_order, mu_order, evidence)


def solve_decoupled(
    model: TwoChannelModel,
    cls: CouplingClass,
    channel_index: int,
    ell: float,
    n_r_max: int,
    params: Optional[OscillatorParams] = None,
    orbits: Optional[_OrbitLadder] = None,
) -> List[Level]:
    """Zero-order branch of one diagonal channel (cases 1 and 2).

    The right-hand coupling is dropped: its perturbative elimination
    contributes only beyond the orders kept here, so the branch is
    insensitive to it at zero order.
    """
    if cls.case is CouplingCase.CASE3:
        raise NotCoupledDegenerateError(
            "use solve_coupled for degenerate-coupled channels"
        )
    pot = model.channel(channel_index)
    scaling = cls.scalings[channel_index]
    if params is None:
        params = oscillator_params(pot, scaling)
    return zero_order_levels(params, scaling, n_r_max, ell, pot.m1, pot.m2)


@dataclass(frozen=True)
class CoupledOscillator:
    kappa: float
    omega_sq: float
    nu1: float
    nu2: float
    chi: float
    mu1: float = 0.0  # shared first-order orbit shift of the common variables

    @property
    def nu_tilde(self) -> Tuple[float, float]:
        s = math.sqrt((self.nu1 - self.nu2) ** 2 + 4.0 * self.chi * self.chi)
        return (0.5 * (self.nu1 + self.nu2 + s), 0.5 * (self.nu1 + self.nu2 - s))

    @property
    def mixing_vectors(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvectors of [[nu1, chi], [chi, nu2]] matching nu_tilde."""
        m = np.array([[self.nu1, self.chi], [self.chi, self.nu2]])
        vals, vecs = np.linalg.eigh(m)  # ascending
        hi, lo = vecs[:, 1], vecs[:, 0]
        out = []
        for v in (hi, lo):
            k = int(np.argmax(np.abs(v)))
            out.append(v if v[k] > 0 else -v)
        return out[0], out[1]


def coupled_oscillator(
    model: TwoChannelModel,
    cls: CouplingClass,
    params: Optional[Tuple[OscillatorParams, OscillatorParams]] = None,
    orbit_ladders: Optional[Tuple[_OrbitLadder, _OrbitLadder]] = None,
    lambdas: Sequence[float] = OSC_LAMBDAS,
    kappa_tol: float = 1e-4,
) -> Tuple[CoupledOscillator, Tuple[OscillatorParams, OscillatorParams], AsymptoticScaling]:
    """Shared-oscillator data for a case-3 pair (common scaling assumed)."""
    if cls.case is not CouplingCase.CASE3:
        raise NotCoupledDegenerateError("coupled solve needs a case-3 pair")
    scaling = cls.scalings[0]
    pots = (model.channel(0), model.channel(1))
    if params is None:
        params = (
            oscillator_params(pots[0], scaling, lambdas),
            oscillator_params(pots[1], scaling, lambdas),
        )
    p1, p2 = params
    kscale = max(abs(p1.kappa), abs(p2.kappa))
    if abs(p1.kappa - p2.kappa) > kappa_tol * kscale:
        raise NotCoupledDegenerateError(
            f"kappa mismatch {p1.kappa!r} vs {p2.kappa!r} beyond {kappa_tol}"
        )
    wscale = max(abs(p1.omega_sq), abs(p2.omega_sq))
    if abs(p1.omega_sq - p2.omega_sq) > kappa_tol * wscale:
        raise NotCoupledDegenerateError(
            f"omega^2 mismatch {p1.omega_sq!r} vs {p2.omega_sq!r} beyond {kappa_tol}"
        )

    ladder = orbit_ladders[0] if orbit_ladders else _OrbitLadder(pots[0])
    ys = []
    for lam in lambdas:
        ell = int(round(1.0 / (lam * lam)))
        orb = ladder.orbit(ell)
        y = model.y_value(orb.r_c, orb.e_c, ell)
        ys.append(lam * lam * scaling.r_inf(lam) ** 2 * y)
    chi, _, _ = _polyfit_extrapolate(list(lambdas), ys)

    osc = CoupledOscillator(
        kappa=0.5 * (p1.kappa + p2.kappa),
        omega_sq=0.5 * (p1.omega_sq + p2.omega_sq),
        nu1=p1.nu,
        nu2=p2.nu,
        chi=chi,
        mu1=0.5 * (p1.mu1 + p2.mu1),
    )
    return osc, params, scaling


def solve_coupled(
    model: TwoChannelModel,
    cls: CouplingClass,
    ell: float,
    n_r_max: int,
    osc: Optional[CoupledOscillator] = None,
    scaling: Optional[AsymptoticScaling] = None,
) -> Tuple[List[Level], List[Level], Tuple[np.ndarray, np.ndarray]]:
    """Zero-order level families of a case-3 pair with mixing vectors.

    Family i is the branch whose mixing vector is dominated by channel i;
    for an exactly symmetric pair the (1, +-1)/sqrt(2) vectors are
    assigned in channel order.
    """
    if osc is None or scaling is None:
        osc, _, scaling = coupled_oscillator(model, cls)
    nt_hi, nt_lo = osc.nu_tilde
    v_hi, v_lo = osc.mixing_vectors
    pot = model.channel(0)

    def levels(nu_t):
        params = OscillatorParams(
            kappa=osc.kappa,
            omega_sq=osc.omega_sq,
            nu=nu_t,
            rho1=0.0,
            mu1=osc.mu1,
            second_partials={},
            residuals={},
        )
        return zero_order_levels(params, scaling, n_r_max, ell, pot.m1, pot.m2)

    # branch assignment: family 1 takes the eigenvector leaning on channel 1
    if abs(v_hi[0]) > abs(v_lo[0]) or (
        abs(abs(v_hi[0]) - abs(v_lo[0])) < 1e-12 and nt_hi >= nt_lo
    ):
        fam1, fam2 = (nt_hi, v_hi), (nt_lo, v_lo)
    else:
        fam1, fam2 = (nt_lo, v_lo), (nt_hi, v_hi)
    return levels(fam1[0]), levels(fam2[0]), (fam1[1], fam2[1])