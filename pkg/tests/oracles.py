"""Independent numerical oracles for the angular algebra.

Everything here deliberately avoids the package's Clebsch-Gordan and
ladder-coefficient machinery: harmonics are evaluated through scipy's
associated Legendre functions, angular momentum acts through its
differential definition on the sphere, and inner products are taken by
Gauss-Legendre x uniform-azimuth quadrature (exact for band-limited
integrands).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import lpmv


def sphere_grid(lmax: int):
    """Quadrature nodes exact for products of harmonics up to degree lmax."""
    n_theta = lmax + 2
    x, w = leggauss(n_theta)          # nodes in cos(theta)
    n_phi = 2 * lmax + 3
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    theta = np.arccos(x)
    W = np.outer(w, np.full(n_phi, 2.0 * np.pi / n_phi))
    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    return TH, PH, W


@lru_cache(maxsize=None)
def _norm(l: int, m: int) -> float:
    return math.sqrt(
        (2 * l + 1) / (4.0 * math.pi) * math.factorial(l - m) / math.factorial(l + m)
    )


def eval_y(l: int, m: int, theta, phi):
    """Spherical harmonic Y_lm and its theta derivative on the grid."""
    x = np.cos(theta)
    am = abs(m)
    p = lpmv(am, l, x)
    # dP/dtheta from the mixed-order recurrence of the Legendre functions
    if am < l:
        p_up = lpmv(am + 1, l, x)
    else:
        p_up = np.zeros_like(x)
    sin_t = np.sin(theta)
    # d/dtheta P_l^m(cos t) = (m cos t / sin t) P_l^m - P_l^{m+1} * ... use
    # the standard relation dP/dt = m cot(t) P_l^m + P_l^{m+1}
    dp = am * (x / sin_t) * p + p_up
    y = _norm(l, am) * p * np.exp(1j * am * phi)
    dy = _norm(l, am) * dp * np.exp(1j * am * phi)
    if m < 0:
        sign = (-1) ** am
        y = sign * np.conj(y)
        dy = sign * np.conj(dy)
    return y, dy


class GridState:
    """A two-spinor-valued function on the sphere with derivative arrays."""

    def __init__(self, theta, phi, weights):
        self.theta = theta
        self.phi = phi
        self.weights = weights
        shape = (2, 2) + theta.shape
        self.f = np.zeros(shape, dtype=complex)
        self.f_theta = np.zeros(shape, dtype=complex)
        self.f_phi = np.zeros(shape, dtype=complex)

    @staticmethod
    def from_coefficients(coeffs, theta, phi, weights) -> "GridState":
        st = GridState(theta, phi, weights)
        for (l, ml, s1, s2), c in coeffs.items():
            i = 0 if s1 > 0 else 1
            k = 0 if s2 > 0 else 1
            y, dy = eval_y(l, ml, theta, phi)
            st.f[i, k] += c * y
            st.f_theta[i, k] += c * dy
            st.f_phi[i, k] += c * (1j * ml) * y
        return st

    def inner(self, other: "GridState") -> complex:
        return complex(np.sum(self.weights * np.sum(np.conj(self.f) * other.f, axis=(0, 1))))

    def _apply_spin(self, mats, particle: int) -> "GridState":
        out = GridState(self.theta, self.phi, self.weights)
        arrs = (self.f, self.f_theta, self.f_phi)
        outs = (out.f, out.f_theta, out.f_phi)
        for src, dst in zip(arrs, outs):
            if particle == 1:
                dst += np.einsum("ab,bk...->ak...", mats, src)
            else:
                dst += np.einsum("ab,ib...->ia...", mats, src)
        return out

    def scale_pointwise(self, g) -> "GridState":
        """Multiply by a scalar function given on the grid (derivatives of
        the product are not tracked; use only as the outermost operation)."""
        out = GridState(self.theta, self.phi, self.weights)
        out.f = self.f * g
        return out


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def apply_sigma_n_grid(state: GridState, particle: int) -> GridState:
    th, ph = state.theta, state.phi
    n = (np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th))
    out = GridState(th, ph, state.weights)
    for mat, comp in zip((_SX, _SY, _SZ), n):
        tmp = state._apply_spin(mat, particle)
        out.f += tmp.f * comp
    return out


def apply_sigma_L_grid(state: GridState, particle: int) -> GridState:
    """sigma.L via the differential definition of L on the sphere."""
    th, ph = state.theta, state.phi
    cot = np.cos(th) / np.sin(th)
    lz = -1j * state.f_phi
    lp = np.exp(1j * ph) * (state.f_theta + 1j * cot * state.f_phi)
    lm = np.exp(-1j * ph) * (-state.f_theta + 1j * cot * state.f_phi)
    out = GridState(th, ph, state.weights)
    for mat, arr in ((_SZ, lz), ((_SX + 1j * _SY), 0.5 * lm), ((_SX - 1j * _SY), 0.5 * lp)):
        carrier = GridState(th, ph, state.weights)
        carrier.f = arr
        out.f += carrier._apply_spin(mat, particle).f
    return out


def apply_sigma_sigma_grid(state: GridState) -> GridState:
    out = GridState(state.theta, state.phi, state.weights)
    for m1, m2 in ((_SX, _SX), (_SY, _SY), (_SZ, _SZ)):
        out.f += state._apply_spin(m1, 1)._apply_spin(m2, 2).f
    return out


def grid_matrix_element(word: str, bra_coeffs, ket_coeffs, lmax: int) -> complex:
    th, ph, w = sphere_grid(lmax)
    bra = GridState.from_coefficients(bra_coeffs, th, ph, w)
    ket = GridState.from_coefficients(ket_coeffs, th, ph, w)
    if word == "identity":
        applied = ket
    elif word == "sigma1_n":
        applied = apply_sigma_n_grid(ket, 1)
    elif word == "sigma2_n":
        applied = apply_sigma_n_grid(ket, 2)
    elif word == "sigma1_L":
        applied = apply_sigma_L_grid(ket, 1)
    elif word == "sigma2_L":
        applied = apply_sigma_L_grid(ket, 2)
    elif word == "sigma1_sigma2":
        applied = apply_sigma_sigma_grid(ket)
    elif word == "sigma1_n_sigma2_n":
        applied = apply_sigma_n_grid(apply_sigma_n_grid(ket, 2), 1)
    else:
        raise ValueError(word)
    return bra.inner(applied)


# ---------------------------------------------------------------------------
# Independent Clebsch-Gordan oracle: highest weight + lowering.
# ---------------------------------------------------------------------------


def cg_oracle_table(j1: float, j2: float, J: float):
    """All <j1 m1 j2 m2 | J M> via null space of the raising operator at
    M = J and repeated lowering; Condon-Shortley sign at the top."""
    t1, t2, tJ = int(round(2 * j1)), int(round(2 * j2)), int(round(2 * J))
    m1s = [(-t1 + 2 * k) / 2.0 for k in range(t1 + 1)]
    m2s = [(-t2 + 2 * k) / 2.0 for k in range(t2 + 1)]

    def basis_at(tM):
        return [(m1, m2) for m1 in m1s for m2 in m2s
                if int(round(2 * (m1 + m2))) == tM]

    def raise_amp(j, m):
        return math.sqrt(j * (j + 1) - m * (m + 1))

    top = basis_at(tJ)
    upper = basis_at(tJ + 2)
    R = np.zeros((len(upper), len(top)))
    for col, (m1, m2) in enumerate(top):
        if (m1 + 1, m2) in upper:
            R[upper.index((m1 + 1, m2)), col] += raise_amp(j1, m1)
        if (m1, m2 + 1) in upper:
            R[upper.index((m1, m2 + 1)), col] += raise_amp(j2, m2)
    if upper:
        _, s, vt = np.linalg.svd(R)
        null = vt[np.sum(s > 1e-10):]
        assert null.shape[0] == 1, "degenerate multiplicity"
        vec = null[0]
    else:
        vec = np.ones(len(top))
    vec = vec / np.linalg.norm(vec)
    top_m1 = max(range(len(top)), key=lambda i: top[i][0])
    if vec[top_m1] < 0:
        vec = -vec

    tables = {}
    cur_basis, cur = top, vec
    tM = tJ
    while True:
        tables[tM / 2.0] = dict(zip(cur_basis, cur))
        if tM - 2 < -tJ:
            break
        lower_basis = basis_at(tM - 2)
        nxt = np.zeros(len(lower_basis))
        for col, (m1, m2) in enumerate(cur_basis):
            amp = math.sqrt(J * (J + 1) - (tM / 2.0) * (tM / 2.0 - 1))
            if (m1 - 1, m2) in lower_basis:
                nxt[lower_basis.index((m1 - 1, m2))] += (
                    math.sqrt(j1 * (j1 + 1) - m1 * (m1 - 1)) / amp * cur[col]
                )
            if (m1, m2 - 1) in lower_basis:
                nxt[lower_basis.index((m1, m2 - 1))] += (
                    math.sqrt(j2 * (j2 + 1) - m2 * (m2 - 1)) / amp * cur[col]
                )
        cur_basis, cur = lower_basis, nxt
        tM -= 2
    return tables
