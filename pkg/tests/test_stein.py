import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from freechaos.kernels import Kernel, contract, inner, random_kernel, rank_one, unit_vector
from freechaos.stein import (
    bound_report,
    cumulant_inputs,
    dw_bounds,
    fisher_decay_bound,
    gamma_discrepancy_sq,
    gamma_discrepancy_terms,
    hsi_rhs,
    lemma8_rhs,
    lsi_rhs,
    m_of_f,
    psi,
    semicircular_entropy,
    stein_upper,
    xi_q_discrepancy,
    xi_q_hs_norm_sq,
)
from freechaos.wigner import PreconditionError, WignerVector


def ee(N=1, h=1.0):
    e = unit_vector(N, h)
    return rank_one([e, e], h)


def mirror(rng, order, N=3, h=0.5):
    return random_kernel(rng, order, N, h, mirror=True)


def test_gamma_first_chaos(rng):
    f, g = mirror(rng, 1), mirror(rng, 1)
    for a in (0.0, 0.7):
        assert gamma_discrepancy_sq(f, g, a) == pytest.approx(abs(a - inner(g, f)) ** 2)


def test_gamma_ee_example():
    terms = gamma_discrepancy_terms(ee(), ee(), 1.0)
    assert gamma_discrepancy_sq(ee(), ee(), 1.0) == pytest.approx(2.0)
    assert sorted(v for v in terms.values() if v > 1e-15) == pytest.approx([1.0, 1.0])
    assert lemma8_rhs(ee(), ee(), 1.0) >= 2.0 - 1e-12


def test_gamma_zero_and_precondition(rng):
    f = mirror(rng, 2)
    assert gamma_discrepancy_sq(f, Kernel(np.zeros((3, 3)), 0.5), 0.0) == 0.0
    with pytest.raises(PreconditionError):
        gamma_discrepancy_sq(random_kernel(rng, 2, 3, 0.5), f, 0.0)


def test_gamma_first_chaos_with_grid_kernel(rng):
    # a grid refinement of the same order-1 function gives the same discrepancy
    f = Kernel(np.array([1.0, 2.0]), 1.0)
    g = Kernel(np.array([1.0, 1.0, 2.0, 2.0]), 0.5)
    assert gamma_discrepancy_sq(f, f, 1.0) == pytest.approx(gamma_discrepancy_sq(g, g, 1.0))


def test_contraction_bound_examples(rng):
    f = mirror(rng, 1)
    assert lemma8_rhs(f, f, inner(f, f).real) == pytest.approx(0.0, abs=1e-12)
    assert gamma_discrepancy_sq(f, f, inner(f, f).real) == pytest.approx(0.0, abs=1e-12)
    g = mirror(rng, 3)
    # p=1, q=3: a^2 + ||f||^2 ||g ⌢_2 g|| + sum over m in {2,3}, l=0 of min(A_fg, A_gf)
    nf2, ng2 = inner(f, f).real, inner(g, g).real
    A_f = contract(f, f, 0).norm() * ng2
    expect = nf2 * contract(g, g, 2).norm()
    for m in (2, 3):
        expect += min(A_f, contract(g, g, 4 - m - 1).norm() * nf2)
    assert lemma8_rhs(f, g, 0.0) == pytest.approx(expect)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10**6), st.floats(-2, 2))
def test_contraction_bound_dominates(p, q, seed, a):
    rng = np.random.default_rng(seed)
    f, g = mirror(rng, p, 2), mirror(rng, q, 2)
    assert gamma_discrepancy_sq(f, g, a) <= lemma8_rhs(f, g, a) * (1 + 1e-10) + 1e-12


def test_psi_examples():
    assert psi([0, 0], [1, 2], [2, 3]) == 0
    assert psi([0.3], [2.0], [3]) == pytest.approx(3**0.75 * 0.3**0.25 * 2**0.5)
    assert psi([1.0], [1.0], [2]) == pytest.approx(2**0.75)
    with pytest.raises(ValueError):
        psi([1.0], [1.0, 2.0], [2])
    with pytest.raises(ValueError):
        psi([1.0], [-1.0], [2])


def test_psi_mixed_orders_weight():
    xs, ys = [1.0, 16.0], [4.0, 1.0]
    # diagonal terms plus two cross terms weighted by max order
    diag = 2**0.75 * 1 * 2 + 3**0.75 * 2 * 1
    cross = 2 * 3**0.75 * min(16**0.25 * 2, 1 * 1)
    assert psi(xs, ys, [2, 3]) == pytest.approx(diag + cross)


def test_m_of_f_examples():
    F = WignerVector.of([ee()])
    assert m_of_f(F) == pytest.approx(2**0.75, abs=1e-12)
    dw_m, dw_stein = dw_bounds(F)
    assert dw_m == pytest.approx(2**0.75)
    assert dw_stein == pytest.approx(math.sqrt(2))
    G = WignerVector.of([rank_one([unit_vector(3, 0.5, i)], 0.5) for i in range(3)])
    assert m_of_f(G) == 0 and dw_bounds(G) == (0.0, 0.0)


def test_m_of_f_routes_agree(rng):
    F = WignerVector.of([mirror(rng, 2, 2), mirror(rng, 3, 2)])
    a, _ = cumulant_inputs(F, "contractions")
    b, _ = cumulant_inputs(F, "moments")
    assert a == pytest.approx(b, abs=1e-10)


def test_m_of_f_scaling(rng):
    f, g = mirror(rng, 2, 2), mirror(rng, 2, 2)
    base = m_of_f(WignerVector.of([f, g]))
    for lam in (0.5, 2.0, 3.0):
        assert m_of_f(WignerVector.of([f * lam, g * lam])) == pytest.approx(lam**2 * base)


def test_dw_monotone_in_x():
    C_y = [1.0, 2.0]
    prev = -1.0
    for x in (0.0, 0.1, 0.5, 1.0, 4.0):
        v = psi([x, 2 * x], C_y, [2, 2])
        assert v >= prev
        prev = v


def test_stein_upper_vanishes_only_for_semicircular(rng):
    G = WignerVector.of([rank_one([unit_vector(3, 0.5, i)], 0.5) for i in range(2)])
    assert stein_upper(G)[0] == pytest.approx(0.0, abs=1e-12)
    F = WignerVector.of([mirror(rng, 2), mirror(rng, 2)])
    su, sq = stein_upper(F)
    assert su > 0 and np.all(sq >= 0)
    assert su <= np.linalg.norm(np.linalg.inv(F.real_gram()), 2) * math.sqrt(sq.sum()) * (1 + 1e-12)


def test_fisher_decay():
    C = np.diag([2.0, 0.5])
    assert fisher_decay_bound(1.0, 0.0, C) == 0.0
    vals = [fisher_decay_bound(t, 1.0, C) for t in np.linspace(0.05, 5, 40)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    for c in (1.0, 2.0, 5.0):
        val, _ = quad(lambda t: math.exp(-2 * t / c) / math.sqrt(-math.expm1(-2 * t / c)), 0, math.inf)
        assert val == pytest.approx(c, abs=1e-6)
    with pytest.raises(ValueError):
        fisher_decay_bound(0.0, 1.0, C)


def test_hsi_lsi(rng):
    C = np.array([[2.0, 0.4], [0.4, 1.0]])
    assert hsi_rhs(0.0, 3.0, C) == 0.0
    rho = 2.0
    Ch = np.eye(3) / rho
    s, phi = 0.7, 1.3
    assert hsi_rhs(s, phi, Ch) == pytest.approx(0.5 * s**2 * math.log(1 + phi / (rho * s**2)))
    for _ in range(100):
        a = rng.normal(size=(2, 2))
        M = a @ a.T + 0.2 * np.eye(2)
        s, phi = rng.uniform(0, 3), rng.uniform(0, 5)
        assert hsi_rhs(s, phi, M) <= lsi_rhs(phi, M) * (1 + 1e-12)
    with pytest.raises(ValueError):
        lsi_rhs(-1.0, C)


def test_xi_q():
    assert xi_q_discrepancy(0.0, 5) == 0
    assert xi_q_discrepancy(0.1, 4) == pytest.approx(0.4 / math.sqrt(0.96))
    assert xi_q_discrepancy(0.2, 3) == pytest.approx(math.sqrt(3 * xi_q_hs_norm_sq(0.2, 3)))
    series = sum(0.2 ** (2 * N) * 3**N for N in range(1, 51))
    assert xi_q_hs_norm_sq(0.2, 3) == pytest.approx(series, abs=1e-10)
    with pytest.raises(ValueError):
        xi_q_discrepancy(0.5, 4)


def test_entropy():
    assert semicircular_entropy(2, 1.0) == pytest.approx(math.log(2 * math.pi * math.e))
    assert semicircular_entropy(3, 2.5) - semicircular_entropy(3, 1.0) == pytest.approx(-1.5 * math.log(2.5))
    assert semicircular_entropy(4, 0.7) == pytest.approx(2 * semicircular_entropy(2, 0.7))
    with pytest.raises(ValueError):
        semicircular_entropy(1, 0.0)


def test_bound_report_json(rng):
    F = WignerVector.of([ee(2, 0.5), mirror(rng, 2, 2)])
    rep = bound_report(F, fisher=2.0)
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["m_of_f"] == pytest.approx(m_of_f(F))
    assert all(v >= 0 for row in d["gamma_discrepancy_sq"] for v in row)
    assert sum(d["gamma_terms"].values()) == pytest.approx(sum(map(sum, d["gamma_discrepancy_sq"])))
    assert d["hsi_rhs"] <= d["lsi_rhs"]
    assert bound_report(F).hsi_rhs is None
