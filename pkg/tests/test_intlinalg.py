import random

import pytest
from hypothesis import given, settings, strategies as st

from obstruct.intlinalg import (
    ColumnLattice,
    IntMatrix,
    charpoly,
    is_unimodular,
    kernel_basis,
    lattice_basis,
    lattices_equal,
    matrix_rank,
    poly_eval_matrix,
    smith_normal_form,
    solve,
)


def check_snf(a):
    s = smith_normal_form(a)
    assert s.U @ a @ s.V == s.D
    assert is_unimodular(s.U)
    assert is_unimodular(s.V)
    assert s.U @ s.Uinv == IntMatrix.identity(a.rows)
    assert s.V @ s.Vinv == IntMatrix.identity(a.cols)
    # diagonal, nonnegative, divisibility chain
    for i in range(s.D.rows):
        for j in range(s.D.cols):
            if i != j:
                assert s.D.data[i][j] == 0
    diag = s.diag
    assert all(d >= 0 for d in diag)
    for x, y in zip(diag, diag[1:]):
        if x == 0:
            assert y == 0
        else:
            assert y % x == 0
    return s


def test_snf_2_3_example():
    a = IntMatrix.from_rows([[2, 0], [0, 3]])
    s = check_snf(a)
    assert s.D == IntMatrix.from_rows([[1, 0], [0, 6]])


def test_snf_identity():
    a = IntMatrix.identity(3)
    s = check_snf(a)
    assert s.D == IntMatrix.identity(3)


def test_snf_zero():
    a = IntMatrix.zeros(2, 2)
    s = check_snf(a)
    assert s.D == IntMatrix.zeros(2, 2)


def test_snf_empty_shapes():
    for r, c in [(0, 0), (0, 3), (3, 0)]:
        a = IntMatrix.zeros(r, c)
        s = check_snf(a)
        assert s.D.rows == r and s.D.cols == c


def test_snf_deterministic():
    a = IntMatrix.from_rows([[6, 4, 2], [4, 8, 0], [2, 0, 10]])
    s1 = smith_normal_form(a)
    s2 = smith_normal_form(a)
    assert s1.U == s2.U and s1.V == s2.V and s1.D == s2.D


@settings(max_examples=150, deadline=None)
@given(
    st.integers(0, 4),
    st.integers(0, 4),
    st.integers(0, 10**6),
)
def test_snf_random(m, n, seed):
    rng = random.Random(seed)
    a = IntMatrix(m, n, [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)])
    check_snf(a)


def test_kernel_basis():
    a = IntMatrix.from_rows([[1, 2, 3]])
    k = kernel_basis(a)
    assert k.cols == 2
    for j in range(k.cols):
        assert a.apply(k.column(j)) == [0]
    # spanning: [2,-1,0] and [3,0,-1] must lie in the kernel lattice
    lat = ColumnLattice(k)
    assert lat.contains([2, -1, 0])
    assert lat.contains([3, 0, -1])


def test_solve():
    a = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert solve(a, [4, 9]) == [2, 3]
    assert solve(a, [1, 0]) is None
    assert solve(IntMatrix.zeros(2, 2), [0, 0]) == [0, 0]
    assert solve(IntMatrix.zeros(2, 2), [1, 0]) is None


def test_lattice_membership_and_basis():
    g = IntMatrix.from_rows([[2, 4], [0, 6]])
    lat = ColumnLattice(g)
    assert lat.contains([2, 0])
    assert lat.contains([0, 6])
    assert not lat.contains([1, 0])
    assert not lat.contains([0, 3])
    b = lat.basis()
    assert lattices_equal(b, g)
    assert b.cols == matrix_rank(g)


def test_saturation():
    g = IntMatrix.from_rows([[2], [4]])
    sat = ColumnLattice(g).saturation_basis()
    assert lattices_equal(sat, IntMatrix.from_rows([[1], [2]]))


def test_lattice_basis_of_redundant_generators():
    g = IntMatrix.from_rows([[2, 2, 4], [0, 0, 0]])
    b = lattice_basis(g)
    assert b.cols == 1
    assert lattices_equal(b, IntMatrix.from_rows([[2], [0]]))


def test_charpoly():
    a = IntMatrix.from_rows([[2, 1], [0, 3]])
    # det(xI - A) = (x-2)(x-3) = x^2 - 5x + 6
    assert charpoly(a) == [6, -5, 1]
    assert poly_eval_matrix(charpoly(a), a).is_zero()  # Cayley-Hamilton


def test_charpoly_random_cayley_hamilton():
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(1, 4)
        a = IntMatrix(n, n, [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)])
        assert poly_eval_matrix(charpoly(a), a).is_zero()


def test_matrix_text_roundtrip():
    a = IntMatrix.from_rows([[1, -2], [30, 4]])
    text = a.to_text()
    assert IntMatrix.from_text(text) == a
    assert IntMatrix.from_text(text).to_text() == text


def test_matrix_text_errors():
    with pytest.raises(ValueError):
        IntMatrix.from_text("")
    with pytest.raises(ValueError):
        IntMatrix.from_text("2 2\n1 2\n3")
    with pytest.raises(ValueError):
        IntMatrix.from_text("junk\n1")


def test_kron():
    a = IntMatrix.from_rows([[1, 2]])
    b = IntMatrix.from_rows([[3], [4]])
    assert a.kron(b) == IntMatrix.from_rows([[3, 6], [4, 8]])
