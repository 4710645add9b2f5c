"""Pauli operators and CSS codes built from homology and colexes."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import comb
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from . import z2
from .lattice import CellLattice, Colex, build_hypercube_colex, build_torus, puncture, toric_complex
from .z2 import ChainComplex, Z2Matrix

DESCRIPTOR_VERSION = 1


@dataclass(frozen=True, eq=False)
class Pauli:
    """The operator ``i**phase * X^x Z^z`` (all X factors written first).

    CSS generators and logicals always have ``phase`` 0 or 2; the odd
    phases only appear after conjugating by a phase gate.
    """

    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    def __post_init__(self):
        x = z2.bitchain(self.x)
        zz = z2.bitchain(self.z)
        if x.shape != zz.shape:
            raise ValueError("X and Z parts have different lengths")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", zz)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def identity(cls, n: int) -> "Pauli":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_x(cls, bits, n: Optional[int] = None) -> "Pauli":
        """X-type operator; ``bits`` is a 0/1 vector, or a support list if ``n`` is given."""
        x = z2.bitchain(bits, n) if n is not None else z2.bitchain(bits)
        return cls(x, np.zeros_like(x))

    @classmethod
    def from_z(cls, bits, n: Optional[int] = None) -> "Pauli":
        zz = z2.bitchain(bits, n) if n is not None else z2.bitchain(bits)
        return cls(np.zeros_like(zz), zz)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "Pauli":
        """``X``, ``Y`` or ``Z`` on one qubit.  ``Y = i X Z``."""
        x = np.zeros(n, np.uint8)
        zz = np.zeros(n, np.uint8)
        if kind in "XY":
            x[qubit] = 1
        if kind in "ZY":
            zz[qubit] = 1
        if kind not in ("X", "Y", "Z"):
            raise ValueError(f"unknown Pauli {kind!r}")
        return cls(x, zz, 1 if kind == "Y" else 0)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def sign(self) -> int:
        if self.phase % 2:
            raise ValueError("operator carries an imaginary phase")
        return 1 if self.phase == 0 else -1

    def is_x_type(self) -> bool:
        return not self.z.any()

    def is_z_type(self) -> bool:
        return not self.x.any()

    def __mul__(self, other: "Pauli") -> "Pauli":
        if self.n != other.n:
            raise ValueError("Pauli lengths differ")
        # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        swap = int(np.count_nonzero(self.z & other.x)) % 2
        return Pauli(self.x ^ other.x, self.z ^ other.z, self.phase + other.phase + 2 * swap)

    def __eq__(self, other):
        if not isinstance(other, Pauli):
            return NotImplemented
        return self.phase == other.phase and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self):
        return hash((self.phase, self.x.tobytes(), self.z.tobytes()))

    def __repr__(self):
        letters = "".join("IXZY"[a + 2 * b] for a, b in zip(self.x, self.z))
        phase = (self.phase + 3 * letters.count("Y")) % 4  # XZ = -iY
        return f"Pauli({['+', '+i', '-', '-i'][phase]}{letters})"


def commutes(P: Pauli, Q: Pauli) -> bool:
    if P.n != Q.n:
        raise ValueError(f"Pauli lengths differ ({P.n} vs {Q.n})")
    return (int(np.count_nonzero(P.x & Q.z)) + int(np.count_nonzero(P.z & Q.x))) % 2 == 0


# ---------------------------------------------------------------------------
# CSS codes


@dataclass(frozen=True)
class Syndrome:
    """Syndrome bits over the independent generators of one type.

    ``kind`` names the generators that were measured: a ``"Z"`` syndrome comes
    from the Z-type generators and flags X errors.
    """

    kind: str
    bits: np.ndarray

    def __post_init__(self):
        if self.kind not in ("X", "Z"):
            raise ValueError(f"syndrome kind must be 'X' or 'Z', not {self.kind!r}")
        object.__setattr__(self, "bits", z2.bitchain(self.bits))

    def __add__(self, other: "Syndrome") -> "Syndrome":
        if other.kind != self.kind:
            raise ValueError("cannot add syndromes of different kinds")
        return Syndrome(self.kind, self.bits ^ other.bits)

    def __eq__(self, other):
        if not isinstance(other, Syndrome):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.kind, self.bits.tobytes()))

    def is_zero(self) -> bool:
        return not self.bits.any()


def _basis_and_deps(H: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Independent rows of ``H`` and the matrix ``C`` with ``H = C @ H[basis]``."""
    basis = z2.independent_rows(H)
    B = H[basis]
    C = z2.solve_many(B.T, H.T)
    assert C is not None
    return basis, np.ascontiguousarray(C.T)


def _logical_pairs(hx: np.ndarray, hz: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    lx = z2.quotient_representatives(z2.nullspace_basis(hz), hx, n)
    lz = z2.quotient_representatives(z2.nullspace_basis(hx), hz, n)
    lx = np.array(lx, dtype=np.uint8).reshape(len(lx), n)
    lz = np.array(lz, dtype=np.uint8).reshape(len(lz), n)
    if lx.shape[0] != lz.shape[0]:
        raise ValueError("X and Z homology have different ranks")
    if lx.shape[0]:
        # make the pairing matrix the identity: lz <- (M^-1)^T lz
        M = z2.matmul(lx, lz.T)
        lz = z2.matmul(z2.inverse(M).T, lz)
    return lx, lz


class CssCode:
    """A CSS code with possibly overcomplete generator sets.

    ``hx`` and ``hz`` hold one row per Hamiltonian term.  ``x_basis`` and
    ``z_basis`` index an independent subset and ``deps_x`` / ``deps_z`` write
    every term as a product of basis generators (one row per term).
    ``geometry`` is whatever the decoders need to know about the lattice.
    """

    def __init__(
        self,
        hx,
        hz,
        logical_x=None,
        logical_z=None,
        meta: Optional[dict] = None,
        geometry: Any = None,
    ):
        self.hx = Z2Matrix(hx)
        self.hz = Z2Matrix(hz)
        if self.hx.cols != self.hz.cols:
            raise ValueError("X and Z check matrices act on different qubit counts")
        self.n = self.hx.cols
        if not (self.hx @ self.hz.T).is_zero():
            raise ValueError("X and Z generators do not commute")
        self.x_basis, self.deps_x = _basis_and_deps(self.hx.data)
        self.z_basis, self.deps_z = _basis_and_deps(self.hz.data)
        if logical_x is None or logical_z is None:
            lx, lz = _logical_pairs(self.hx.data, self.hz.data, self.n)
        else:
            lx = np.array(logical_x, dtype=np.uint8).reshape(-1, self.n)
            lz = np.array(logical_z, dtype=np.uint8).reshape(-1, self.n)
        self.lx = Z2Matrix(lx)
        self.lz = Z2Matrix(lz)
        self.meta = dict(meta or {})
        self.geometry = geometry
        self._decoders: dict[str, Any] = {}
        self._check_logicals()

    def _check_logicals(self):
        lx, lz = self.lx.data, self.lz.data
        if lx.shape[0] != self.k or lz.shape[0] != self.k:
            raise ValueError(f"expected {self.k} logical pairs, got {lx.shape[0]}/{lz.shape[0]}")
        if z2.matmul(self.hz.data, lx.T).any() or z2.matmul(self.hx.data, lz.T).any():
            raise ValueError("logical operators do not commute with the stabilizer")
        if self.k and not np.array_equal(z2.matmul(lx, lz.T), np.eye(self.k, dtype=np.uint8)):
            raise ValueError("logical operators do not pair up")

    # -- sizes ---------------------------------------------------------------

    @property
    def g(self) -> int:
        return len(self.x_basis) + len(self.z_basis)

    @property
    def k(self) -> int:
        return self.n - self.g

    def checks(self, kind: str) -> np.ndarray:
        """Check matrix of the generators of the given type."""
        return {"X": self.hx, "Z": self.hz}[kind].data

    def basis_of(self, kind: str) -> list[int]:
        return {"X": self.x_basis, "Z": self.z_basis}[kind]

    def deps(self, kind: str) -> np.ndarray:
        return {"X": self.deps_x, "Z": self.deps_z}[kind]

    def logicals(self, kind: str) -> np.ndarray:
        """Supports of the X-type (``"X"``) or Z-type (``"Z"``) logicals."""
        return {"X": self.lx, "Z": self.lz}[kind].data

    # -- Pauli views ---------------------------------------------------------

    @property
    def x_gens(self) -> list[Pauli]:
        return [Pauli.from_x(r) for r in self.hx.data]

    @property
    def z_gens(self) -> list[Pauli]:
        return [Pauli.from_z(r) for r in self.hz.data]

    @property
    def logical_x(self) -> list[Pauli]:
        return [Pauli.from_x(r) for r in self.lx.data]

    @property
    def logical_z(self) -> list[Pauli]:
        return [Pauli.from_z(r) for r in self.lz.data]

    # -- syndromes -----------------------------------------------------------

    def full_syndrome(self, kind: str, chain: np.ndarray) -> np.ndarray:
        """Excitation of every generator of ``kind`` caused by an error chain of the other type."""
        return z2.matmul(self.checks(kind), np.asarray(chain, dtype=np.uint8))

    def expand(self, s: Syndrome) -> np.ndarray:
        """Overcomplete excitation pattern of a basis syndrome (``c_i(b)``)."""
        return z2.matmul(self.deps(s.kind), s.bits)

    def restrict(self, kind: str, nodes: np.ndarray) -> Syndrome:
        return Syndrome(kind, np.asarray(nodes, dtype=np.uint8)[self.basis_of(kind)])

    def decoder(self, kind: str):
        """Correction map for syndromes of ``kind`` (built on first use)."""
        if kind not in self._decoders:
            from .decode import default_decoder

            self._decoders[kind] = default_decoder(self, kind)
        return self._decoders[kind]

    def set_decoder(self, kind: str, decoder) -> None:
        self._decoders[kind] = decoder

    def __repr__(self):
        return f"CssCode([[{self.n},{self.k}]], {self.meta})"


def syndrome_of(code: CssCode, E: Pauli) -> tuple[Syndrome, Syndrome]:
    """``(Z syndrome, X syndrome)`` of a Pauli error."""
    if E.n != code.n:
        raise ValueError(f"error acts on {E.n} qubits, code has {code.n}")
    sz = code.full_syndrome("Z", E.x)[code.z_basis]
    sx = code.full_syndrome("X", E.z)[code.x_basis]
    return Syndrome("Z", sz), Syndrome("X", sx)


def in_stabilizer(code: CssCode, P: Pauli) -> bool:
    """Membership in the stabilizer group, sign included."""
    if P.n != code.n:
        return False
    if not (z2.in_rowspan(P.x, code.hx) and z2.in_rowspan(P.z, code.hz)):
        return False
    # every element of S is +X^x Z^z in this ordering
    return P.phase == 0


def in_normalizer(code: CssCode, P: Pauli) -> bool:
    return not code.full_syndrome("Z", P.x).any() and not code.full_syndrome("X", P.z).any()


def to_descriptor(code: CssCode) -> dict:
    sup = lambda M: [np.flatnonzero(r).tolist() for r in M.data]  # noqa: E731
    return {
        "version": DESCRIPTOR_VERSION,
        "n": code.n,
        "k": code.k,
        "x_gens": sup(code.hx),
        "z_gens": sup(code.hz),
        "logical_x": sup(code.lx),
        "logical_z": sup(code.lz),
        "meta": code.meta,
    }


def from_descriptor(desc: dict | str) -> CssCode:
    if isinstance(desc, str):
        desc = json.loads(desc)
    n = desc["n"]
    hx = Z2Matrix.from_supports(desc["x_gens"], n).data
    hz = Z2Matrix.from_supports(desc["z_gens"], n).data
    lx = Z2Matrix.from_supports(desc["logical_x"], n).data
    lz = Z2Matrix.from_supports(desc["logical_z"], n).data
    meta = desc.get("meta", {})
    code = CssCode(hx, hz, lx, lz, meta=meta)
    # geometry is not serialized; rebuild it from the construction parameters
    rebuilt = _rebuild(meta)
    if rebuilt is not None and rebuilt.n == n:
        code.geometry = rebuilt.geometry
    return code


def _rebuild(meta: dict) -> Optional[CssCode]:
    fam = meta.get("family")
    if fam == "toric":
        return toric_code(meta["D"], meta["d"], meta["L"])
    if fam == "color":
        return color_code(build_hypercube_colex(meta["D"]), meta["d"])
    if fam == "simplicial":
        return simplicial_code(meta["D"], meta["d"])
    return None


# ---------------------------------------------------------------------------
# constructors


def code_from_complex(cx: ChainComplex, meta: Optional[dict] = None, geometry: Any = None) -> CssCode:
    """Qubits on the middle group, X checks from the top map, Z checks from the bottom map."""
    if len(cx.dims) != 3:
        raise ValueError("code_from_complex needs a three-term complex")
    d1, d2 = cx.boundaries
    if not (d1 @ d2).is_zero():
        raise ValueError("boundary maps do not compose to zero")
    return CssCode(d2.T.data, d1.data, meta=meta, geometry=geometry)


@dataclass(frozen=True)
class ToricGeometry:
    lattice: CellLattice
    d: int


def toric_code(D: int, d: int, L: int) -> CssCode:
    """The ``d``-th generalized toric code on the ``D``-torus of side ``L``."""
    lat = build_torus(D, L)
    cx = toric_complex(lat, d)
    return code_from_complex(cx, meta={"family": "toric", "D": D, "d": d, "L": L}, geometry=ToricGeometry(lat, d))


@dataclass(frozen=True)
class ColorGeometry:
    colex: Colex
    d: int


def color_code(cx: Colex, d: int) -> CssCode:
    """X checks on ``(d+1)``-cells, Z checks on ``(D-d+1)``-cells."""
    D = cx.D
    if not 0 <= d <= D:
        raise ValueError(f"color code index {d} outside 0..{D}")
    hx = cx.cell_matrix(d + 1).data
    hz = cx.cell_matrix(D - d + 1).data
    fam = "simplicial" if cx.punctured else "color"
    meta = {"family": fam, "D": D, "d": d}
    if cx.punctured:
        n = cx.n_vertices
        ones = np.ones((1, n), dtype=np.uint8)
        code = CssCode(hx, hz, ones, ones, meta=meta, geometry=ColorGeometry(cx, d))
    else:
        code = CssCode(hx, hz, meta=meta, geometry=ColorGeometry(cx, d))
    return code


def simplicial_code(D: int, d: Optional[int] = None) -> CssCode:
    """Color code of the punctured ``(D+1)``-cube colex.  ``d`` defaults to ``D-1``."""
    return color_code(puncture(build_hypercube_colex(D)), max(D - 1, 1) if d is None else d)


def steane_code() -> CssCode:
    return simplicial_code(2, 1)


def expected_color_k(D: int, d: int, betti_d: int) -> int:
    return comb(D, d) * betti_d


def simplicial_logicals(code: CssCode) -> tuple[Pauli, Pauli]:
    """``(X^n, Z^n)`` after checking that they are a valid logical pair."""
    n = code.n
    X = Pauli.from_x(np.ones(n, np.uint8))
    Z = Pauli.from_z(np.ones(n, np.uint8))
    if not (in_normalizer(code, X) and in_normalizer(code, Z)):
        raise ValueError("all-X / all-Z do not commute with the stabilizer")
    if commutes(X, Z) or in_stabilizer(code, X) or in_stabilizer(code, Z):
        raise ValueError("all-X / all-Z are not a nontrivial logical pair")
    return X, Z


def distance(code: CssCode, w_max: int) -> Optional[int]:
    """Minimum weight of a nontrivial logical, or ``None`` if it exceeds ``w_max``.

    For CSS codes the minimum is attained by a pure X- or pure Z-type operator,
    so both types are searched separately by enumerating supports.
    """
    n = code.n
    tests = [
        (code.hz.data, code.lz.data),  # X-type candidates
        (code.hx.data, code.lx.data),  # Z-type candidates
    ]
    if code.k == 0:
        return None
    for w in range(1, w_max + 1):
        combos = itertools.combinations(range(n), w)
        while True:
            chunk = list(itertools.islice(combos, 50_000))
            if not chunk:
                break
            C = np.zeros((len(chunk), n), dtype=np.uint8)
            rows = np.repeat(np.arange(len(chunk)), w)
            C[rows, np.array(chunk).ravel()] = 1
            for checks, logicals in tests:
                ok = ~z2.matmul(checks, C.T).any(axis=0)
                hit = z2.matmul(logicals, C.T).any(axis=0)
                if np.any(ok & hit):
                    return w
    return None


# ---------------------------------------------------------------------------
# dressed observables


def _relevant_kind(N: Pauli) -> str:
    """Syndrome kind whose errors can flip ``N``."""
    if N.is_z_type():
        return "Z"
    if N.is_x_type():
        return "X"
    raise ValueError("criticality is defined for pure X- or Z-type logicals")


def _error_part(E: Pauli, kind: str) -> np.ndarray:
    return E.x if kind == "Z" else E.z


def _logical_support(N: Pauli, kind: str) -> np.ndarray:
    return N.z if kind == "Z" else N.x


def sign_full(code: CssCode, kind: str, n_support: np.ndarray, err: np.ndarray, nodes: np.ndarray) -> int:
    """Sign of ``corr(b) E corr(b + synd E)`` against a logical, on overcomplete syndromes."""
    dec = code.decoder(kind)
    c0 = dec.correct(nodes)
    c1 = dec.correct(nodes ^ code.full_syndrome(kind, err))
    loop = c0 ^ err ^ c1
    return -1 if int(np.count_nonzero(loop & n_support)) % 2 else 1


def s_sign(code: CssCode, N: Pauli, E: Pauli, b: Syndrome) -> int:
    """``S(N, E, b)``: -1 iff correcting before and after ``E`` differs by a flip of ``N``."""
    kind = _relevant_kind(N)
    if b.kind != kind:
        raise ValueError(f"a {'Z' if kind == 'Z' else 'X'}-type logical needs a {kind} syndrome")
    return sign_full(code, kind, _logical_support(N, kind), _error_part(E, kind), code.expand(b))


def critical_full(code: CssCode, kind: str, n_support: np.ndarray, nodes: np.ndarray) -> bool:
    """Criticality of an overcomplete syndrome; raises if the decoder cannot handle it."""
    dec = code.decoder(kind)
    c0 = dec.correct(nodes)
    H = code.checks(kind)
    for j in range(code.n):
        c1 = dec.correct(nodes ^ H[:, j])
        loop = c0 ^ c1
        loop[j] ^= 1
        if int(np.count_nonzero(loop & n_support)) % 2:
            return True
    return False


def is_critical(code: CssCode, N: Pauli, b: Syndrome, undefined_as_critical: bool = True) -> bool:
    """Whether some single-qubit Pauli flips the dressed value of ``N``.

    Only the part of a single-qubit Pauli that anticommutes with ``N`` matters,
    so one flip per qubit is tried.  Syndromes the decoder leaves undefined
    count as critical unless ``undefined_as_critical`` is false.
    """
    from .decode import DecodingError

    kind = _relevant_kind(N)
    if b.kind != kind:
        raise ValueError(f"expected a {kind} syndrome")
    try:
        return critical_full(code, kind, _logical_support(N, kind), code.expand(b))
    except DecodingError:
        if undefined_as_critical:
            return True
        raise


# ---------------------------------------------------------------------------
# transversal Clifford gates

GATES = ("X", "Z", "H", "R1", "CNOT")


def conjugate(P: Pauli, gate: str) -> Pauli:
    """``U^dagger P U`` for ``U`` the gate applied to every qubit.

    For ``CNOT`` the operator acts on ``2m`` qubits: qubit ``i`` of the first
    half controls qubit ``i`` of the second half.
    """
    x, zz, r = P.x.copy(), P.z.copy(), P.phase
    if gate == "X":
        r += 2 * int(zz.sum())
    elif gate == "Z":
        r += 2 * int(x.sum())
    elif gate == "H":
        r += 2 * int(np.count_nonzero(x & zz))
        x, zz = zz, x
    elif gate == "R1":
        # R1^dagger X R1 = -Y = i^3 X Z, and Z is fixed
        r += 3 * int(x.sum())
        zz = zz ^ x
    elif gate == "CNOT":
        if P.n % 2:
            raise ValueError("pairwise CNOT needs an even number of qubits")
        m = P.n // 2
        x = x.copy()
        zz = zz.copy()
        x[m:] ^= P.x[:m]
        zz[:m] ^= P.z[m:]
    else:
        raise ValueError(f"unsupported transversal gate {gate!r}; choose from {GATES}")
    return Pauli(x, zz, r)


def doubled(code: CssCode) -> CssCode:
    """Two side-by-side copies of a code (for pairwise two-qubit gates)."""
    def block(A, B):
        return np.block([[A, np.zeros((A.shape[0], B.shape[1]), np.uint8)], [np.zeros((B.shape[0], A.shape[1]), np.uint8), B]])

    return CssCode(
        block(code.hx.data, code.hx.data),
        block(code.hz.data, code.hz.data),
        block(code.lx.data, code.lx.data),
        block(code.lz.data, code.lz.data),
        meta={**code.meta, "copies": 2},
    )


def check_transversal_clifford(code: CssCode, gate: str) -> bool:
    """Whether the gate on every qubit maps each stabilizer generator into the stabilizer."""
    if gate not in GATES:
        raise ValueError(f"unsupported transversal gate {gate!r}")
    target = doubled(code) if gate == "CNOT" else code
    gens = target.x_gens + target.z_gens
    return all(in_stabilizer(target, conjugate(s, gate)) for s in gens)
