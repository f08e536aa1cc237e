import numpy as np
import pytest
from hypothesis import given, strategies as st

from freechaos.combinatorics import PairPartition, enumerate_pair_partitions
from freechaos.kernels import (
    Kernel,
    adjoint,
    all_slices,
    all_tilde_slices,
    contract,
    dumps_kernel,
    from_spec,
    inner,
    is_mirror_symmetric,
    loads_kernel,
    pairing_integral,
    random_kernel,
    rank_one,
    scalar_kernel,
    slice_kernel,
    symmetrize_mirror,
    tilde_slice,
    unit_vector,
)

kernel_shapes = st.tuples(st.integers(0, 3), st.integers(1, 3), st.sampled_from([0.25, 0.5, 1.0]), st.integers(0, 10**6))


def _k(order, N, h, seed, **kw):
    return random_kernel(np.random.default_rng(seed), order, N, h, **kw)


def test_adjoint_examples():
    e = unit_vector(3, 0.5)
    ee = rank_one([e, e], 0.5)
    assert np.array_equal(adjoint(ee).entries, ee.entries)
    u, v = np.array([1.0, 2.0]), np.array([-1.0, 0.5])
    assert np.array_equal(adjoint(rank_one([u, v], 1.0)).entries, rank_one([v, u], 1.0).entries)
    f = Kernel(np.array([1 + 2j, 3 - 1j]), 1.0)
    assert np.array_equal(adjoint(f).entries, np.conj(f.entries))


@given(kernel_shapes)
def test_adjoint_involution(shape):
    f = _k(*shape)
    assert np.array_equal(adjoint(adjoint(f)).entries, f.entries)


def test_mirror_symmetry():
    u, v = np.array([1.0, 2.0]), np.array([-1.0, 0.5])
    assert not is_mirror_symmetric(rank_one([u, v], 1.0), 1e-12)
    assert is_mirror_symmetric(symmetrize_mirror(rank_one([u, v], 1.0)), 1e-12)
    with pytest.raises(ValueError):
        is_mirror_symmetric(rank_one([u], 1.0), -1.0)


def test_inner_examples():
    e = Kernel(np.array([np.sqrt(2), 0.0]), 0.5)
    assert inner(e, e) == pytest.approx(1.0)
    assert inner(scalar_kernel(2j, 1.0), scalar_kernel(3.0, 1.0)) == pytest.approx(-6j)
    with pytest.raises(ValueError):
        inner(e, Kernel(np.zeros((2, 2)), 0.5))


@given(kernel_shapes, st.integers(0, 10**6))
def test_cauchy_schwarz_and_positivity(shape, seed2):
    f = _k(*shape)
    g = _k(shape[0], shape[1], shape[2], seed2)
    assert abs(inner(f, g)) ** 2 <= inner(f, f).real * inner(g, g).real * (1 + 1e-12) + 1e-12
    assert inner(f, f).real >= 0 and abs(inner(f, f).imag) < 1e-12


def test_contract_examples():
    h = 0.5
    f, g = _k(1, 3, h, 1), _k(1, 3, h, 2)
    assert contract(f, g, 1).scalar() == pytest.approx(h * np.sum(f.entries * g.entries))
    e = unit_vector(3, h, 1)
    ee = rank_one([e, e], h)
    assert np.allclose(contract(ee, ee, 1).entries, ee.entries)
    f2, g2 = _k(2, 2, h, 3), _k(1, 2, h, 4)
    assert np.allclose(contract(f2, g2, 0).entries, np.multiply.outer(f2.entries, g2.entries))
    with pytest.raises(ValueError):
        contract(f2, g2, 2)


def test_contract_reversal_convention():
    h = 0.7
    f, g = _k(3, 2, h, 5), _k(2, 2, h, 6)
    want = h**2 * np.einsum("abc,cb->a", f.entries, g.entries)
    assert np.allclose(contract(f, g, 2).entries, want)


@pytest.mark.parametrize("n,m,p", [(1, 1, 1), (2, 2, 1), (2, 3, 2), (3, 3, 2), (3, 2, 1), (2, 2, 0)])
def test_contract_adjoint_identity(n, m, p):
    f, g = _k(n, 3, 0.4, 10 + n), _k(m, 3, 0.4, 20 + m)
    lhs = adjoint(contract(f, g, p))
    rhs = contract(adjoint(g), adjoint(f), p)
    assert np.allclose(lhs.entries, rhs.entries, atol=1e-12)


def test_pairing_integral_examples():
    h = 0.5
    f, g = _k(1, 3, h, 1), _k(1, 3, h, 2)
    assert pairing_integral([f, g], PairPartition(((1, 2),))) == pytest.approx(contract(f, g, 1).scalar())
    z = Kernel(np.zeros((3, 3)), h)
    assert pairing_integral([z, _k(2, 3, h, 3)], PairPartition(((1, 4), (2, 3)))) == 0
    with pytest.raises(ValueError):
        pairing_integral([f, g], PairPartition(((1, 2), (3, 4))))


def test_pairing_integral_ladder_is_inner():
    f, g = _k(3, 2, 0.6, 7), _k(3, 2, 0.6, 8)
    ladder = PairPartition(((1, 6), (2, 5), (3, 4)))
    assert pairing_integral([adjoint(f), g], ladder) == pytest.approx(inner(f, g))


def test_pairing_integral_bounded_by_norms():
    rng = np.random.default_rng(3)
    for _ in range(30):
        fs = [random_kernel(rng, 2, 2, 0.5) for _ in range(3)]
        bound = np.prod([f.norm() for f in fs])
        for p in enumerate_pair_partitions(3):
            assert abs(pairing_integral(fs, p)) <= bound * (1 + 1e-12)


def test_slices():
    f = _k(1, 3, 0.5, 1)
    assert slice_kernel(f, 1, 2).scalar() == f.entries[2]
    g = _k(2, 3, 0.5, 2)
    assert np.allclose(tilde_slice(g, 1, 1).entries, np.conj(g.entries[1, :]))
    with pytest.raises(IndexError):
        slice_kernel(g, 3, 0)
    with pytest.raises(IndexError):
        slice_kernel(g, 1, 3)


def test_tilde_slice_permutation():
    f = _k(4, 2, 1.0, 3)
    for k in range(1, 5):
        for t in range(2):
            got = tilde_slice(f, k, t).entries
            for idx in np.ndindex(*(2,) * 3):
                # idx = (t_{k-1},..,t_1, t_n,..,t_{k+1})
                left = list(reversed(idx[: k - 1]))
                right = list(reversed(idx[k - 1:]))
                assert got[idx] == np.conj(f.entries[tuple(left + [t] + right)])


def test_tilde_slice_of_mirror_kernel():
    # for f = f*, the tilde slice at k is the slice at n+1-k read with its
    # arguments rotated: tilde(s_1..s_{n-1}) = slice(s_k..s_{n-1}, s_1..s_{k-1})
    n = 4
    f = symmetrize_mirror(_k(n, 2, 0.5, 4))
    for k in range(1, n + 1):
        for t in range(2):
            tilde = tilde_slice(f, k, t).entries
            plain = slice_kernel(f, n + 1 - k, t).entries
            for s in np.ndindex(*tilde.shape):
                assert np.isclose(tilde[s], plain[s[k - 1:] + s[:k - 1]])


def test_slice_stacks_agree():
    f = _k(3, 2, 0.5, 9)
    for k in range(1, 4):
        S, T = all_slices(f, k), all_tilde_slices(f, k)
        for t in range(2):
            assert np.array_equal(S[t], slice_kernel(f, k, t).entries)
            assert np.array_equal(T[t], tilde_slice(f, k, t).entries)


def test_text_round_trip(tmp_path):
    f = _k(3, 2, 0.3, 11)
    g = loads_kernel(dumps_kernel(f))
    assert g.h == f.h and np.array_equal(g.entries, f.entries)
    s = loads_kernel(dumps_kernel(scalar_kernel(1 - 2j, 2.0)))
    assert s.scalar() == 1 - 2j
    with pytest.raises(ValueError):
        loads_kernel("2 2 1.0\n1 0\n")
    path = tmp_path / "k.txt"
    path.write_text(dumps_kernel(f))
    assert np.array_equal(from_spec({"kind": "file", "path": str(path)}).entries, f.entries)


def test_generator_specs():
    f = from_spec({"kind": "unit_power", "order": 2, "grid_n": 3, "h": 0.5})
    assert inner(f, f) == pytest.approx(1.0)
    g = from_spec({"kind": "random", "order": 2, "grid_n": 3, "seed": 4, "mirror": True})
    assert is_mirror_symmetric(g)
    assert np.array_equal(g.entries, from_spec({"kind": "random", "order": 2, "grid_n": 3, "seed": 4, "mirror": True}).entries)
    s = from_spec({"kind": "symmetrized", "vectors": [[1, 0], [0, 1]], "scale": 2.0})
    assert is_mirror_symmetric(s) and s.entries[0, 1] == 1.0
    with pytest.raises(ValueError):
        from_spec({"kind": "nope"})


def test_kernel_validation():
    with pytest.raises(ValueError):
        Kernel(np.zeros((2, 3)), 1.0)
    with pytest.raises(ValueError):
        Kernel(np.array([np.nan]), 1.0)
    with pytest.raises(ValueError):
        Kernel(np.zeros(2), 0.0)
    f = Kernel(np.zeros(2), 1.0)
    with pytest.raises(ValueError):
        f.entries[0] = 1.0
