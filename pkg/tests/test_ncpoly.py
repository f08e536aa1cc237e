import numpy as np
import pytest
from hypothesis import given, strategies as st

from freechaos.ncpoly import (
    FamilyLaw,
    NcBiPolynomial,
    NcPolynomial,
    cyclic_derivative,
    difference_quotient,
    expectation,
    format_polynomial,
    jacobian,
    pairing_moment,
    parse_polynomial,
    random_polynomial,
    schwinger_dyson_residual,
    semicircular_potential,
)
from freechaos.combinatorics import enumerate_pair_partitions

t1, t2 = NcPolynomial.var(1, 2), NcPolynomial.var(2, 2)


def test_cyclic_derivative_examples():
    assert cyclic_derivative(t1 * t2 * t1, 1) == t2 * t1 + t1 * t2
    assert cyclic_derivative(NcPolynomial.constant(3.0, 2), 1) == NcPolynomial({}, 2)
    with pytest.raises(IndexError):
        cyclic_derivative(t1, 3)


def test_cyclic_derivative_of_potential():
    C = np.array([[2.0, 0.5], [0.5, 1.0]])
    Ci = np.linalg.inv(C)
    V = semicircular_potential(C)
    for i in (1, 2):
        expected = NcPolynomial({(l,): Ci[i - 1, l - 1] for l in (1, 2)}, 2)
        assert cyclic_derivative(V, i).almost_equal(expected, 1e-12)


def test_difference_quotient_examples():
    x = NcPolynomial.var(1, 1)
    dq = difference_quotient(x ** 3, 1)
    assert dq == NcBiPolynomial({((), (1, 1)): 1, ((1,), (1,)): 1, ((1, 1), ()): 1}, 1)
    assert difference_quotient(t2, 1) == NcBiPolynomial({}, 2)
    assert difference_quotient(t1 * t2, 2) == NcBiPolynomial({((1,), ()): 1}, 2)


def test_jacobian():
    J = jacobian([t1, t2])
    for i in range(2):
        for j in range(2):
            expected = NcBiPolynomial({((), ()): 1} if i == j else {}, 2)
            assert J[i][j] == expected
    B = np.array([[1.0, 2.0], [-0.5, 3.0]])
    P = [B[i, 0] * t1 + B[i, 1] * t2 for i in range(2)]
    J = jacobian(P)
    for i in range(2):
        for j in range(2):
            assert J[i][j] == NcBiPolynomial({((), ()): B[i, j]}, 2)
    with pytest.raises(ValueError):
        jacobian([t1, NcPolynomial.var(1, 3)])


@given(st.lists(st.integers(1, 3), min_size=0, max_size=7), st.integers(1, 3))
def test_flip_multiply_recovers_cyclic_derivative(word, j):
    m = NcPolynomial({tuple(word): 1.0}, 3)
    assert difference_quotient(m, j).flip_multiply() == cyclic_derivative(m, j)


def test_expectation_examples():
    C = np.array([[2.0, 0.3, 0.1], [0.3, 1.0, 0.2], [0.1, 0.2, 1.5]])
    i, j, k, l = 1, 2, 3, 2
    p = NcPolynomial({(i, j, k, l): 1.0}, 3)
    want = C[i - 1, j - 1] * C[k - 1, l - 1] + C[i - 1, l - 1] * C[j - 1, k - 1]
    assert expectation(p, FamilyLaw(C)) == pytest.approx(want)
    x = NcPolynomial.var(1, 1)
    for q in (-0.5, 0.0, 0.7):
        law = FamilyLaw(np.eye(1), q)
        assert expectation(x ** 4, law) == pytest.approx(2 + q, abs=1e-12)
        assert expectation(x ** 6, law) == pytest.approx(5 + 6 * q + 3 * q**2 + q**3, abs=1e-12)


def test_distinct_free_centered_variables():
    C = np.diag([1.0, 2.0, 0.5])
    assert expectation(NcPolynomial({(1, 2, 3): 1.0}, 3), FamilyLaw(C)) == 0
    assert expectation(NcPolynomial({(1, 2): 1.0}, 3), FamilyLaw(C)) == 0


@given(st.lists(st.integers(1, 2), min_size=0, max_size=8))
def test_q_extremes_against_enumeration(word):
    C = np.array([[1.5, 0.4], [0.4, 0.8]])
    if len(word) % 2:
        assert pairing_moment(word, C, 1.0) == 0.0
        return
    ps = enumerate_pair_partitions(len(word) // 2)
    term = lambda p: np.prod([C[word[a - 1] - 1, word[b - 1] - 1] for a, b in p])
    wick = sum(term(p) for p in ps)
    nc = sum(term(p) for p in ps if all(not (a < c < b < d) for a, b in p for c, d in p))
    assert pairing_moment(word, C, 1.0) == pytest.approx(wick, abs=1e-12)
    assert pairing_moment(word, C, 0.0) == pytest.approx(nc, abs=1e-12)
    assert pairing_moment(word, C, None) == pytest.approx(nc, abs=1e-12)


def test_schwinger_dyson_examples():
    x = NcPolynomial.var(1, 1)
    assert schwinger_dyson_residual([x ** 3], np.eye(1)) <= 1e-12
    assert schwinger_dyson_residual([x ** 2], np.eye(1)) <= 1e-12
    assert schwinger_dyson_residual([t2, t1], np.eye(2)) <= 1e-12


def test_schwinger_dyson_detects_wrong_law():
    x = NcPolynomial.var(1, 1)
    # the residual uses the conjugate variable of C; evaluating it under a different law must fail
    from freechaos.ncpoly import bi_expectation, conjugate_variables
    law = FamilyLaw(np.eye(1) * 2.0)
    xi = conjugate_variables(np.eye(1))[0]
    gap = expectation(xi * x ** 3, law) - bi_expectation(difference_quotient(x ** 3, 1), law)
    assert abs(gap) > 1.0


def test_random_sd_residual(rng):
    for _ in range(10):
        n = int(rng.integers(1, 4))
        a = rng.normal(size=(n, n))
        C = a @ a.T + np.eye(n)
        P = [random_polynomial(rng, n, 5, 4) for _ in range(n)]
        assert schwinger_dyson_residual(P, C) <= 1e-10


def test_format_parse_round_trip(rng):
    p = parse_polynomial("0.5*t1*t2 + t2*t1")
    assert p == NcPolynomial({(1, 2): 0.5, (2, 1): 1.0}, 2)
    for _ in range(20):
        q = random_polynomial(rng, 3, 4, 5) * (1 - 0.5j)
        assert parse_polynomial(format_polynomial(q), 3) == q


def test_polynomial_algebra():
    assert (t1 + t2) * (t1 - t2) == t1 * t1 - t1 * t2 + t2 * t1 - t2 * t2
    assert ((1j * t1 * t2).adjoint()) == -1j * t2 * t1
    assert (t1 - t1) == NcPolynomial({}, 2)
