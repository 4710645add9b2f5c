import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from colexlab import z2
from colexlab.code import (
    CssCode,
    Pauli,
    Syndrome,
    check_transversal_clifford,
    color_code,
    commutes,
    conjugate,
    distance,
    from_descriptor,
    in_normalizer,
    in_stabilizer,
    is_critical,
    s_sign,
    simplicial_code,
    simplicial_logicals,
    steane_code,
    syndrome_of,
    to_descriptor,
    toric_code,
)
from colexlab.lattice import build_hypercube_colex

STEANE = steane_code()
RM15 = simplicial_code(3, 2)
TORIC3 = toric_code(2, 1, 3)
TORIC4 = toric_code(2, 1, 4)


def bits(n):
    return arrays(np.uint8, n, elements=st.integers(0, 1))


def paulis(n):
    return st.builds(Pauli, bits(n), bits(n), st.integers(0, 3))


def assert_code_invariants(code):
    gens = code.x_gens + code.z_gens
    for a in gens:
        for b in gens:
            assert commutes(a, b)
    for L in code.logical_x + code.logical_z:
        assert all(commutes(L, s) for s in gens)
    for i, X in enumerate(code.logical_x):
        for j, Z in enumerate(code.logical_z):
            assert commutes(X, Z) == (i != j)
    assert code.k == code.n - code.g


def test_commutes_examples():
    X1, Z1, Z2 = Pauli.single(3, 0, "X"), Pauli.single(3, 0, "Z"), Pauli.single(3, 1, "Z")
    assert not commutes(X1, Z1)
    assert commutes(X1, Z2)
    with pytest.raises(ValueError):
        commutes(X1, Pauli.identity(4))


@given(bits(10), bits(10))
def test_commutes_is_overlap_parity(a, b):
    assert commutes(Pauli.from_x(a), Pauli.from_z(b)) == (int(a @ b) % 2 == 0)


@given(paulis(6), paulis(6), paulis(6))
def test_pauli_product_associative(P, Q, R):
    assert (P * Q) * R == P * (Q * R)


@given(paulis(5), paulis(5))
def test_pauli_commutation_phase(P, Q):
    PQ, QP = P * Q, Q * P
    assert np.array_equal(PQ.x, QP.x) and np.array_equal(PQ.z, QP.z)
    assert (PQ.phase - QP.phase) % 4 == (0 if commutes(P, Q) else 2)


def test_pauli_single_y_squares_to_identity():
    Y = Pauli.single(1, 0, "Y")
    assert Y * Y == Pauli.identity(1)
    assert Y.weight == 1
    assert repr(Pauli.single(3, 1, "Y")) == "Pauli(+IYI)"


def test_steane_parameters():
    assert (STEANE.n, STEANE.k) == (7, 1)
    assert len(STEANE.x_gens) == len(STEANE.z_gens) == 3
    assert all(g.weight == 4 for g in STEANE.x_gens + STEANE.z_gens)
    assert distance(STEANE, 3) == 3
    assert_code_invariants(STEANE)


def test_fifteen_qubit_parameters():
    assert (RM15.n, RM15.k) == (15, 1)
    assert len(RM15.x_gens) == 4 and all(g.weight == 8 for g in RM15.x_gens)
    assert len(RM15.z_gens) == 18 and all(g.weight == 4 for g in RM15.z_gens)
    assert z2.rank(RM15.hz) == 10
    assert distance(RM15, 3) == 3
    assert_code_invariants(RM15)


def test_closed_color_code_is_trivial():
    assert color_code(build_hypercube_colex(2), 1).k == 0
    assert color_code(build_hypercube_colex(3), 1).k == 0


@pytest.mark.parametrize("D", [2, 3, 4])
def test_simplicial_sizes(D):
    code = simplicial_code(D)
    assert code.n == 2 ** (D + 1) - 1 and code.k == 1
    assert_code_invariants(code)


def test_simplicial_logicals():
    X, Z = simplicial_logicals(STEANE)
    assert X.weight == Z.weight == 7 and not commutes(X, Z)
    X15, _ = simplicial_logicals(RM15)
    assert all(commutes(X15, s) for s in RM15.z_gens)
    assert in_normalizer(RM15, X15) and not in_stabilizer(RM15, X15)


def test_toric_parameters():
    assert (TORIC3.n, TORIC3.k) == (18, 2)
    assert distance(TORIC3, 3) == 3
    assert_code_invariants(TORIC3)
    ising = toric_code(2, 2, 3)
    assert ising.k == 1
    assert_code_invariants(ising)


@pytest.mark.parametrize("L", [2, 3])
def test_toric_distance_equals_L(L):
    assert distance(toric_code(2, 1, L), L) == L
    assert distance(toric_code(2, 1, L), L - 1) is None


def test_syndrome_examples():
    zs, xs = syndrome_of(STEANE, Pauli.identity(7))
    assert zs.is_zero() and xs.is_zero()
    seen = {syndrome_of(STEANE, Pauli.single(7, j, "X"))[0].bits.tobytes() for j in range(7)}
    assert len(seen) == 7 and bytes(3) not in seen
    for s in STEANE.x_gens + STEANE.z_gens:
        assert all(part.is_zero() for part in syndrome_of(STEANE, s))


@given(paulis(18), paulis(18))
def test_syndrome_homomorphism(E, F):
    a, b, c = syndrome_of(TORIC3, E), syndrome_of(TORIC3, F), syndrome_of(TORIC3, E * F)
    assert c[0] == a[0] + b[0] and c[1] == a[1] + b[1]


def test_descriptor_round_trip():
    for code in (STEANE, RM15, TORIC3):
        desc = to_descriptor(code)
        assert set(desc) == {"version", "n", "k", "x_gens", "z_gens", "logical_x", "logical_z", "meta"}
        back = from_descriptor(json.dumps(desc))
        assert back.n == code.n and back.k == code.k
        assert back.hx == code.hx and back.hz == code.hz


def test_noncommuting_generators_rejected():
    with pytest.raises(ValueError):
        CssCode(np.array([[1, 0]], np.uint8), np.array([[1, 1]], np.uint8))


def test_is_critical_examples():
    N = STEANE.logical_z[0]
    assert not is_critical(STEANE, N, Syndrome("Z", np.zeros(3, np.uint8)))
    pair = Pauli.from_x([0, 1], 7)
    assert is_critical(STEANE, N, syndrome_of(STEANE, pair)[0])
    crit = sum(is_critical(STEANE, N, Syndrome("Z", [(b >> i) & 1 for i in range(3)])) for b in range(8))
    assert crit == 7


def test_single_errors_do_not_flip():
    N = STEANE.logical_z[0]
    b0 = Syndrome("Z", np.zeros(3, np.uint8))
    for j in range(7):
        for kind in "XYZ":
            assert s_sign(STEANE, N, Pauli.single(7, j, kind), b0) == 1


def _syndrome(code, kind, e):
    return code.restrict(kind, code.full_syndrome(kind, e))


@given(bits(7), bits(7), bits(7))
def test_s_sign_multiplicative_steane(e1, e2, e0):
    N = STEANE.logical_z[0]
    E1, E2 = Pauli.from_x(e1), Pauli.from_x(e2)
    b = _syndrome(STEANE, "Z", e0)
    b2 = b + syndrome_of(STEANE, E2)[0]
    assert s_sign(STEANE, N, E1 * E2, b) == s_sign(STEANE, N, E1, b2) * s_sign(STEANE, N, E2, b)


@given(st.lists(st.integers(0, 31), max_size=2), st.lists(st.integers(0, 31), max_size=2), st.lists(st.integers(0, 31), max_size=2))
def test_s_sign_multiplicative_toric(s1, s2, s0):
    N = TORIC4.logical_z[0]
    E1, E2 = Pauli.from_x(s1, 32), Pauli.from_x(s2, 32)
    b = _syndrome(TORIC4, "Z", z2.bitchain(s0, 32))
    b2 = b + syndrome_of(TORIC4, E2)[0]
    assert s_sign(TORIC4, N, E1 * E2, b) == s_sign(TORIC4, N, E1, b2) * s_sign(TORIC4, N, E2, b)


def test_s_sign_kind_mismatch():
    with pytest.raises(ValueError):
        s_sign(STEANE, STEANE.logical_z[0], Pauli.identity(7), Syndrome("X", np.zeros(3, np.uint8)))


def test_transversal_clifford_checks():
    assert all(check_transversal_clifford(STEANE, g) for g in ("X", "Z", "H", "R1", "CNOT"))
    assert not check_transversal_clifford(RM15, "H")
    assert check_transversal_clifford(RM15, "CNOT")
    with pytest.raises(ValueError):
        check_transversal_clifford(STEANE, "T")


@given(st.integers(0, 6), st.sampled_from("XYZ"), st.sampled_from(["X", "Z", "H", "R1"]))
def test_single_qubit_errors_do_not_spread(q, kind, gate):
    image = conjugate(Pauli.single(7, q, kind), gate)
    assert z2.support(image.x | image.z) == [q]
