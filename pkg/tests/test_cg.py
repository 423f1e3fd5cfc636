import math

import pytest

from largej.cg import clebsch_gordan, _racah_exact
from largej.errors import InvalidQuantumNumberError

from oracles import cg_oracle_table


def test_coupling_with_zero_is_identity():
    assert clebsch_gordan(3, 2, 0, 0, 3, 2) == 1.0
    assert clebsch_gordan(0.5, -0.5, 0, 0, 0.5, -0.5) == 1.0


def test_singlet_component():
    # spin singlet from two spin-1/2: <1/2 1/2 1/2 -1/2 | 0 0> = +1/(sqrt 2)
    assert clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0, 0) == pytest.approx(
        1 / math.sqrt(2), abs=1e-15
    )


def test_stretched_one_one():
    assert clebsch_gordan(1, 1, 1, 0, 2, 1) == pytest.approx(
        1 / math.sqrt(2), abs=1e-15
    )


def test_selection_rules_zero():
    assert clebsch_gordan(1, 1, 1, -1, 2, 1) == 0.0  # M mismatch
    assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0   # triangle violated


@pytest.mark.parametrize("bad", [
    (-1, 0, 0, 0, 1, 0),
    (1, 2, 1, 0, 2, 2),
    (1, 0.5, 1, 0, 2, 0.5),
])
def test_malformed_arguments_raise(bad):
    with pytest.raises(InvalidQuantumNumberError):
        clebsch_gordan(*bad)


@pytest.mark.parametrize("j1,j2", [(0.5, 0.5), (1, 0.5), (1, 1), (1.5, 1),
                                   (2, 1), (2, 2), (2.5, 1.5), (3, 2)])
def test_against_ladder_oracle(j1, j2):
    tJ_min = int(round(2 * abs(j1 - j2)))
    tJ_max = int(round(2 * (j1 + j2)))
    for tJ in range(tJ_min, tJ_max + 1, 2):
        J = tJ / 2.0
        table = cg_oracle_table(j1, j2, J)
        for M, row in table.items():
            for (m1, m2), val in row.items():
                got = clebsch_gordan(j1, m1, j2, m2, J, M)
                assert got == pytest.approx(val, abs=5e-13), (j1, m1, j2, m2, J, M)


@pytest.mark.parametrize("args", [
    (3, 1, 1, 0, 3, 1), (3, 1, 1, 1, 4, 2), (5, -2, 1, -1, 4, -3),
    (4, 2, 0.5, 0.5, 4.5, 2.5), (6, 0, 1, 0, 5, 0),
])
def test_table_paths_match_exact_racah(args):
    j1, m1, j2, m2, J, M = args
    got = clebsch_gordan(*args)
    exact = _racah_exact(int(2 * j1), int(2 * m1), int(2 * j2), int(2 * m2),
                         int(2 * J), int(2 * M))
    assert got == pytest.approx(exact, abs=1e-14)


def test_large_j_stability():
    # closed-form path at large j must stay numerically clean
    j = 4096
    val = clebsch_gordan(j, j - 2, 1, 1, j + 1, j - 1)
    # completeness over J for a fixed (m1, m2)
    tot = sum(
        clebsch_gordan(j, j - 2, 1, 1, J, j - 1) ** 2 for J in (j - 1, j, j + 1)
    )
    assert tot == pytest.approx(1.0, abs=1e-12)
    assert 0 < val < 1


def test_orthogonality_rows():
    # sum_m1m2 C(J) C(J') = delta_JJ'
    j1, j2 = 1.5, 1
    for J in (0.5, 1.5, 2.5):
        for Jp in (0.5, 1.5, 2.5):
            tot = 0.0
            for tm1 in range(-3, 4, 2):
                for m2 in (-1, 0, 1):
                    m1 = tm1 / 2.0
                    M = m1 + m2
                    if abs(M) > J or abs(M) > Jp:
                        continue
                    tot += clebsch_gordan(j1, m1, j2, m2, J, M) * clebsch_gordan(
                        j1, m1, j2, m2, Jp, M
                    )
            expect = (2 * J + 1) / 1.0 if J == Jp else 0.0
            # each M contributes 1 to the diagonal: (2J+1) values of M
            assert tot == pytest.approx(expect, abs=1e-12)
