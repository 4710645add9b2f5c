import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from colexlab import z2
from colexlab.lattice import build_hypercube_colex, build_torus, cellular_complex


def matrices(max_rows=8, max_cols=10):
    shape = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return shape.flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


def colex_complex(D):
    cx = build_hypercube_colex(D)
    # vertices <- edges <- faces, incidence by containment
    e = cx.cell_matrix(1).data.T
    f = np.zeros((cx.count(1), cx.count(2)), np.uint8)
    for face in cx.cells[2]:
        for edge in cx.cells[1]:
            if set(edge.vertices) <= set(face.vertices):
                f[edge.id, face.id] = 1
    return z2.ChainComplex((cx.count(0), cx.count(1), cx.count(2)), (e, f))


def test_bitchain_from_support():
    assert z2.bitchain([0, 3], 5).tolist() == [1, 0, 0, 1, 0]
    assert z2.weight(z2.bitchain([1, 1, 0, 1])) == 3
    assert z2.support(z2.bitchain([0, 1, 0, 1])) == [1, 3]


def test_nullspace_examples():
    assert z2.nullspace_basis(np.eye(4, dtype=np.uint8)) == []
    assert len(z2.nullspace_basis(np.zeros((2, 4), np.uint8))) == 4
    d1 = build_torus(2, 2).boundary_matrix(1)
    assert d1.shape == (4, 8)
    assert z2.rank(d1) == 3
    assert len(z2.nullspace_basis(d1)) == 5


def test_homology_examples():
    for D, betti in ((2, 2), (3, 3)):
        cx = cellular_complex(build_torus(D, 3))
        assert z2.homology(cx, 1).betti == betti
    assert z2.homology(colex_complex(2), 1).betti == 0
    with pytest.raises(IndexError):
        z2.homology(cellular_complex(build_torus(2, 2)), 5)


def test_dualize_examples():
    cx = cellular_complex(build_torus(2, 2))
    dual = z2.dualize(cx)
    assert z2.dualize(dual) == cx
    assert z2.homology(dual, 1).betti == z2.homology(cx, 1).betti == 2


def test_dual_parity_exhaustive():
    d1 = build_torus(2, 2).boundary_matrix(1).data
    for a in range(1 << d1.shape[1]):
        chain = np.array([(a >> i) & 1 for i in range(d1.shape[1])], np.uint8)
        bd = z2.matmul(d1, chain)
        for s0 in range(d1.shape[0]):
            assert bd[s0] == int(d1[s0] @ chain) % 2


def test_nonzero_composition_rejected():
    with pytest.raises(ValueError):
        z2.ChainComplex((1, 1, 1), (np.ones((1, 1)), np.ones((1, 1))))


def test_inverse_and_independent_rows():
    M = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]], np.uint8)
    inv = z2.inverse(M)
    assert np.array_equal(z2.matmul(M, inv), np.eye(3, dtype=np.uint8))
    R = np.array([[1, 1, 0], [1, 1, 0], [0, 1, 1]], np.uint8)
    assert z2.independent_rows(R) == [0, 2]


@given(matrices())
def test_rank_nullity(M):
    null = z2.nullspace_basis(M)
    assert z2.rank(M) + len(null) == M.shape[1]
    for v in null:
        assert not z2.matmul(M, v).any()


@given(matrices(), st.data())
def test_solve_round_trip(M, data):
    x = data.draw(arrays(np.uint8, M.shape[1], elements=st.integers(0, 1)))
    b = z2.matmul(M, x)
    sol = z2.solve(M, b)
    assert sol is not None
    assert np.array_equal(z2.matmul(M, sol), b)


@given(matrices())
def test_solve_is_deterministic(M):
    b = M[:, 0].copy()
    assert np.array_equal(z2.solve(M, b), z2.solve(M.copy(), b.copy()))


@given(st.integers(1, 4), st.integers(2, 3))
def test_boundary_squares_to_zero(D, L):
    lat = build_torus(D, L)
    for n in range(2, D + 1):
        assert (lat.boundary_matrix(n - 1) @ lat.boundary_matrix(n)).is_zero()


@given(st.integers(1, 3), st.integers(2, 3))
def test_dual_betti_matches(D, L):
    cx = cellular_complex(build_torus(D, L))
    dual = z2.dualize(cx)
    for i in range(D + 1):
        assert z2.homology(dual, D - i).betti == z2.homology(cx, i).betti
