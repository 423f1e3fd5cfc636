import math

import numpy as np
import pytest

from largej.errors import InvalidQuantumNumberError, UnsupportedOperatorError
from largej.harmonics import (
    OPERATOR_WORDS,
    build_harmonics,
    harmonic_coefficients,
    label_spin_orbital,
    matrix_element,
)

from oracles import grid_matrix_element

WORDS = ("identity", "sigma1_n", "sigma2_n", "sigma1_L", "sigma2_L",
         "sigma1_sigma2", "sigma1_n_sigma2_n")


def test_section_layout_and_count():
    for j, parity, expected in ((0, 1, 4), (0, -1, 4), (1, 1, 8), (3, -1, 8)):
        sts = build_harmonics(j, parity)
        assert len(sts) == expected
        names = [s.section for s in sts]
        if expected == 8:
            assert names == ["s1", "s2", "t1", "t2", "u1", "u2", "v1", "v2"]
        else:
            assert names == ["s1", "t1", "u1", "v1"]


def test_diagonal_blocks_carry_spin_singlet_for_pseudo_sector():
    # the sector with parity -(-1)^j puts the (A, 0) pair on the diagonal
    for j in (1, 2, 5):
        parity = -(1 if j % 2 == 0 else -1)
        sts = build_harmonics(j, parity)
        s1 = sts[0]
        assert s1.label == "A" and s1.spin == 0 and s1.ell == j
        assert sts[1].label == "0" and sts[1].ell == j
        assert sts[2].label == "-" and sts[2].ell == j + 1
        assert sts[3].label == "+" and sts[3].ell == j - 1


def test_normalization():
    for j in (0, 1, 2, 7):
        for parity in (1, -1):
            for st in build_harmonics(j, parity):
                assert st.norm_sq() == pytest.approx(1.0, abs=1e-14)


def test_orthonormality_within_sector():
    sts = build_harmonics(2, 1)
    for i, a in enumerate(sts[:4]):
        for k, b in enumerate(sts[:4]):
            got = matrix_element("identity", a, b)
            assert got == pytest.approx(1.0 if i == k else 0.0, abs=1e-14)


def test_parity_superselection():
    a = build_harmonics(2, 1)[0]
    b = build_harmonics(2, -1)[0]
    for word in WORDS:
        assert matrix_element(word, a, b) == 0.0


def test_unsupported_word():
    sts = build_harmonics(1, 1)
    with pytest.raises(UnsupportedOperatorError):
        matrix_element("sigma1_p", sts[0], sts[0])


def test_sigma_dot_sigma_eigenvalues():
    sts = build_harmonics(2, -1)
    lab = {s.label: s for s in sts[:4]}
    assert matrix_element("sigma1_sigma2", lab["A"], lab["A"]) == pytest.approx(-3.0, abs=1e-13)
    for trip in ("0", "-", "+"):
        assert matrix_element("sigma1_sigma2", lab[trip], lab[trip]) == pytest.approx(1.0, abs=1e-13)


def test_beta_words_block_signs():
    sts = build_harmonics(1, 1)
    by = {s.section: s for s in sts}
    assert matrix_element("beta1", by["s1"], by["s1"]) == pytest.approx(1.0)
    assert matrix_element("beta1", by["u1"], by["u1"]) == pytest.approx(-1.0)
    assert matrix_element("beta2", by["t1"], by["t1"]) == pytest.approx(-1.0)
    assert matrix_element("beta2", by["v1"], by["v1"]) == pytest.approx(-1.0)
    assert matrix_element("beta1", by["s1"], by["v1"]) == 0.0  # different blocks


@pytest.mark.parametrize("j,parity", [(1, 1), (1, -1), (2, 1), (2, -1), (3, 1)])
@pytest.mark.parametrize("word", WORDS)
def test_matrix_elements_match_quadrature(j, parity, word):
    sts = build_harmonics(j, parity)
    lmax = 2 * (j + 2)
    for a in sts[:4]:
        for b in sts[:4]:
            got = matrix_element(word, a, b)
            ref = grid_matrix_element(word, a.coefficients, b.coefficients, lmax)
            assert abs(ref.imag) < 1e-10
            assert got == pytest.approx(ref.real, abs=1e-10), (word, a.label, b.label)


def test_mixed_parity_example_value():
    # <phi^- | (s1.n)(s2.n) | phi^+> at j=1 against quadrature
    sts = build_harmonics(1, 1)
    minus = [s for s in sts if s.label == "-"][0]
    plus = [s for s in sts if s.label == "+"][0]
    got = matrix_element("sigma1_n_sigma2_n", minus, plus)
    ref = grid_matrix_element(
        "sigma1_n_sigma2_n", minus.coefficients, plus.coefficients, 8
    )
    assert got == pytest.approx(ref.real, abs=1e-10)
    assert abs(got) > 0.1  # genuinely non-trivial element


def test_matrix_elements_mj_independent():
    for mj in (2, 1, 0):
        a = harmonic_coefficients("A", 2, mj)
        b = harmonic_coefficients("0", 2, mj)
        sts = build_harmonics(2, -1, mj=mj)
        val = matrix_element("sigma1_L", sts[0], sts[1])
        ref = matrix_element("sigma1_L", build_harmonics(2, -1)[0], build_harmonics(2, -1)[1])
        assert val == pytest.approx(ref, abs=1e-12)


def test_label_validity():
    assert label_spin_orbital("A", 3) == (0, 3)
    assert label_spin_orbital("+", 3) == (1, 2)
    with pytest.raises(InvalidQuantumNumberError):
        harmonic_coefficients("+", 0, 0)


def test_sigma_n_is_involutive_on_harmonics():
    # (sigma_a . n)^2 = 1 realized through the engine
    from largej.harmonics import apply_sigma_n, overlap

    for j, parity in ((1, 1), (2, -1)):
        for st in build_harmonics(j, parity)[:4]:
            twice = apply_sigma_n(apply_sigma_n(dict(st.coefficients), 1), 1)
            diff = dict(twice)
            for k, v in st.coefficients.items():
                diff[k] = diff.get(k, 0.0) - v
            assert max(abs(v) for v in diff.values()) < 1e-12
