import pytest
from hypothesis import given, settings, strategies as st

from contrakit.fpmod import (
    FPModule, IntMatrix, Morphism, OrderBoundExceeded, cokernel, count_homs, decompose, enumerate_module,
    ext1, hom, kernel, random_module, smith, tensor, tor1,
)


def inv(m):
    return m.invariants


# frozen values, checked by hand or by enumeration before the implementation existed
@pytest.mark.parametrize("rows, factors, free", [
    ([[2, 4], [6, 8]], (2, 4), 0),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], (), 0),
    ([[0, 0, 0], [0, 0, 0]], (), 3),
])
def test_smith_examples(rows, factors, free):
    m = FPModule(rows)
    assert m.torsion == factors
    assert m.rank == free


@pytest.mark.parametrize("rows, expected", [
    ([[12]], (0, (12,))),
    ([[2, 0], [0, 0]], (1, (2,))),
    ([[4, 2], [2, 4]], (0, (2, 6))),
])
def test_decompose_examples(rows, expected):
    assert decompose(FPModule(rows)) == (expected[0], list(expected[1]))


def test_functor_examples():
    c = FPModule.cyclic
    assert inv(hom(c(6), c(4))) == (0, (2,))
    m = FPModule.from_invariants(1, [6])
    assert inv(hom(FPModule.free(1), m)) == inv(m)
    assert hom(c(5), FPModule.free(1)).is_zero()
    assert inv(ext1(c(4), c(6))) == (0, (2,))
    assert ext1(FPModule.free(2), m).is_zero()
    assert inv(ext1(c(9), FPModule.free(1))) == (0, (9,))
    assert inv(tor1(c(4), c(6))) == (0, (2,))
    assert inv(tensor(c(4), c(6))) == (0, (2,))
    assert tor1(FPModule.free(1), m).is_zero()


def test_kernel_cokernel_examples():
    z4 = FPModule.cyclic(4)
    assert inv(kernel(Morphism.multiplication(z4, 2))[0]) == (0, (2,))
    z = FPModule.free(1)
    assert inv(cokernel(Morphism.multiplication(z, 6))[0]) == (0, (6,))
    z2 = FPModule.free(2)
    assert inv(cokernel(Morphism(z2, z2, IntMatrix.diagonal([2, 3])))[0]) == (0, (6,))


def test_enumeration_examples():
    assert enumerate_module(FPModule.cyclic(6)).size == 6
    e = enumerate_module(FPModule.from_invariants(0, [2, 2]))
    assert (e.size, e.exponent()) == (4, 2)
    e = enumerate_module(FPModule([[4, 2], [2, 4]]))
    assert (e.size, e.exponent()) == (12, 6)
    assert count_homs(FPModule.cyclic(6), FPModule.cyclic(4)) == 2


def test_enumeration_bound():
    with pytest.raises(OrderBoundExceeded):
        enumerate_module(FPModule.cyclic(10**7), bound=1000)


def test_ill_defined_morphism_rejected():
    with pytest.raises(Exception):
        Morphism(FPModule.cyclic(4), FPModule.cyclic(3), IntMatrix.identity(1))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3), min_size=1, max_size=4))
def test_smith_transforms(rows):
    a = IntMatrix.from_rows(rows, 3)
    f = smith(a)
    assert f.left @ a @ f.right == f.diagonal_matrix()
    assert (f.right @ f.right_inverse) == IntMatrix.identity(3)
    d = f.diagonal
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


def test_random_modules_round_trip(rng):
    for _ in range(50):
        m = random_module(rng)
        canon = FPModule.from_invariants(*m.invariants)
        assert m.is_isomorphic(canon)
        for x in m.canonical_generators():
            assert m.equal(m.element(m.coords(x)), x)


def test_enumeration_matches_invariants(rng):
    for _ in range(30):
        m = random_module(rng, max_rank=0)
        e = enumerate_module(m)
        assert e.size == m.order
        arr = e.element_array()
        assert not e.reduce_array(m.exponent * arr).any() if len(arr) else True
