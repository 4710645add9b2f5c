"""Goodness of colexes and transversal gates on color codes."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import z2
from .code import CssCode, Pauli, conjugate, doubled, in_stabilizer
from .lattice import Colex, ColexCell, subcolex

SPAN_CAP = 1 << 24
SAMPLE_DRAWS = 10**6


# ---------------------------------------------------------------------------
# (j, k)-goodness


@dataclass(frozen=True)
class GoodnessCertificate:
    """Verdict on whether every boundary chain has weight divisible by ``2^(k+1)``.

    ``witness`` lists the vertex labels of a chain of bad weight when the
    verdict is false.
    """

    colex: str
    j: int
    k: int
    verdict: bool
    method: str  # enumeration | sampled | theorem
    witness: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if not self.verdict:
            if self.witness is None:
                raise ValueError("a false verdict needs a witness chain")
            if len(self.witness) % (1 << (self.k + 1)) == 0:
                raise ValueError("witness weight is divisible by 2^(k+1)")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = None if self.witness is None else list(self.witness)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_closed(cx: Colex) -> None:
    if cx.punctured:
        raise ValueError("goodness is defined on closed colexes")


def boundary_group_generators(cx: Colex, j: int) -> list[np.ndarray]:
    """Vertex chains of the ``(j+1)``-cells, which span the boundary group.

    ``j = D`` is accepted: its single generator is the whole colex.
    """
    _check_closed(cx)
    if not 0 <= j <= cx.D:
        raise ValueError(f"j must lie in 0..{cx.D}")
    return [cx.chain(c) for c in cx.cells[j + 1]]


def _to_words(rows: np.ndarray) -> np.ndarray:
    """Pack 0/1 rows over at most 64 vertices into ``uint64`` words."""
    n = rows.shape[1]
    if n > 64:
        raise ValueError("brute-force goodness supports at most 64 vertices")
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    return (rows.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def _popcount(words: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(words)
    return np.unpackbits(words.view(np.uint8)).reshape(-1, 64).sum(axis=1)


@lru_cache(maxsize=64)
def _span(cx: Colex, j: int, cap: int, draws: int, seed: int) -> tuple[np.ndarray, str]:
    """Span elements of the boundary group (all of them, or a uniform sample)."""
    basis = z2.row_basis(np.array(boundary_group_generators(cx, j), dtype=np.uint8))
    words = _to_words(basis)
    r = len(words)
    if (1 << r) <= cap:
        span = np.zeros(1, dtype=np.uint64)
        for w in words:
            span = np.concatenate([span, span ^ w])
        return span, "enumeration"
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(0, 2, size=(draws, r), dtype=np.uint8).astype(bool)
    span = np.zeros(draws, dtype=np.uint64)
    for i, w in enumerate(words):
        span[coeffs[:, i]] ^= w
    return span, "sampled"


def _labels(cx: Colex, word: int) -> tuple[int, ...]:
    return tuple(v for i, v in enumerate(cx.vertices) if word >> i & 1)


def is_good_bruteforce(cx: Colex, j: int, k: int, cap: int = SPAN_CAP, draws: int = SAMPLE_DRAWS, seed: int = 0) -> GoodnessCertificate:
    """Check every element of the boundary group (or a random sample above ``cap``)."""
    _check_closed(cx)
    if k < 0:
        raise ValueError("k must be non-negative")
    span, method = _span(cx, j, cap, draws, seed)
    bad = np.flatnonzero(_popcount(span) % (1 << (k + 1)))
    if bad.size:
        return GoodnessCertificate(cx.name, j, k, False, method, _labels(cx, int(span[bad[0]])))
    return GoodnessCertificate(cx.name, j, k, True, method)


def restrict_to_cell(cx: Colex, lam: ColexCell, chain: np.ndarray) -> np.ndarray:
    """``h_lambda``: keep the part of a chain on the cell's vertices (subcolex indexing)."""
    idx = cx.vertex_index
    return np.array([chain[idx[v]] for v in lam.vertices], dtype=np.uint8)


def lift_cells(cx: Colex, lam: ColexCell, cells: Sequence[ColexCell]) -> list[ColexCell]:
    """``h^lambda`` on generators: a cell ``nu`` of color ``s`` inside ``lam`` (color ``r``)
    goes to the cell ``nu^(Q - (r - s))`` of the whole colex."""
    Q = frozenset(cx.colors)
    out = []
    for nu in cells:
        q = Q - (lam.colors - nu.colors)
        big = cx.cell_at(nu.vertices[0], q)
        assert big is not None
        out.append(big)
    return out


def _xor_cells(cx: Colex, cells: Sequence[ColexCell]) -> np.ndarray:
    c = np.zeros(cx.n_vertices, dtype=np.uint8)
    for cell in cells:
        c ^= cx.chain(cell)
    return c


def _theorem(cx: Colex, j: int, k: int) -> Optional[list[ColexCell]]:
    """``None`` when good, otherwise generator cells summing to a bad chain."""
    if k == 0:
        return None
    mod = 1 << (k + 1)
    cells = cx.cells[j + 1]
    for c in cells:
        if len(c.vertices) % mod:
            return [c]
    jp = 2 * j - cx.D
    if jp < 0:
        # two cells through one vertex with disjoint colors: weight = -2 mod 2^(k+1)
        v = cx.vertices[0]
        q = cx.colors[: j + 1]
        r = cx.colors[j + 1 : 2 * j + 2]
        return [cx.cell_at(v, q), cx.cell_at(v, r)]
    for lam in cells:
        sub = subcolex(cx, j + 1, lam.id)
        bad = _theorem(sub, jp, k - 1)
        if bad is None:
            continue
        lifted = lift_cells(cx, lam, bad)
        for cand in (lifted, lifted + [lam]):
            if z2.weight(_xor_cells(cx, cand)) % mod:
                return cand
        raise AssertionError("lifted witness has good weight; is the colex nice?")
    return None


def is_good_theorem(cx: Colex, j: int, k: int) -> GoodnessCertificate:
    """Recursive characterization: cell sizes, ``j' = 2j - D >= 0`` and good subcolexes."""
    _check_closed(cx)
    if not 0 <= j <= cx.D:
        raise ValueError(f"j must lie in 0..{cx.D}")
    if k < 0:
        raise ValueError("k must be non-negative")
    bad = _theorem(cx, j, k)
    if bad is None:
        return GoodnessCertificate(cx.name, j, k, True, "theorem")
    chain = _xor_cells(cx, bad)
    return GoodnessCertificate(cx.name, j, k, False, "theorem", tuple(cx.vertices[i] for i in np.flatnonzero(chain)))


def min_dimension(d_bar: int, k: int) -> int:
    """Least colex dimension that can be ``(D - d_bar, k)``-good."""
    if d_bar < 1 or k < 0:
        raise ValueError("need d_bar >= 1 and k >= 0")
    return (k + 1) * d_bar


# ---------------------------------------------------------------------------
# transversal Clifford gates


class StabilizerNotPreserved(ValueError):
    pass


@dataclass(frozen=True)
class LogicalImage:
    """Image of one logical generator: ``i**phase * X^x Z^z`` on the logical qubits."""

    x: tuple[int, ...]
    z: tuple[int, ...]
    phase: int

    def label(self) -> str:
        """Signed Pauli string; ``XZ = -iY`` is folded into the phase."""
        letters = "".join("IXZY"[a + 2 * b] for a, b in zip(self.x, self.z))
        phase = (self.phase + 3 * letters.count("Y")) % 4
        return ["+", "+i", "-", "-i"][phase] + letters


@dataclass(frozen=True)
class FrameUpdate:
    gate: str
    stabilizers: tuple[Pauli, ...]
    logical_x: tuple[Pauli, ...]
    logical_z: tuple[Pauli, ...]
    images_x: tuple[LogicalImage, ...]  # where each logical X goes
    images_z: tuple[LogicalImage, ...]

    def logical_action(self) -> dict:
        return {
            **{f"X{i}": im.label() for i, im in enumerate(self.images_x)},
            **{f"Z{i}": im.label() for i, im in enumerate(self.images_z)},
        }


def _logical_image(code: CssCode, P: Pauli) -> LogicalImage:
    lx, lz = code.logicals("X"), code.logicals("Z")
    # coefficient of logical X_i is detected by logical Z_i, and vice versa
    a = z2.matmul(lz, P.x)
    b = z2.matmul(lx, P.z)
    base = Pauli(z2.matmul(a, lx) if len(a) else np.zeros(code.n, np.uint8), z2.matmul(b, lz) if len(b) else np.zeros(code.n, np.uint8))
    # R = P * base^-1 must be a stabilizer up to a phase
    inv = Pauli(base.x, base.z, 2 * int(np.count_nonzero(base.x & base.z)))
    R = P * inv
    for t in range(4):
        if in_stabilizer(code, Pauli(R.x, R.z, R.phase - t)):
            return LogicalImage(tuple(int(v) for v in a), tuple(int(v) for v in b), t)
    raise StabilizerNotPreserved("logical image is not a logical operator")


def apply_transversal_clifford(code: CssCode, gate: str, frame: Optional[tuple] = None) -> FrameUpdate:
    """Conjugate a stabilizer frame by a transversal gate and read off the logical map.

    ``frame`` is ``(stabilizers, logical_x, logical_z)``; by default it is
    taken from ``code`` (two copies of it for ``CNOT``).
    """
    target = doubled(code) if gate == "CNOT" else code
    if frame is None:
        frame = (tuple(target.x_gens + target.z_gens), tuple(target.logical_x), tuple(target.logical_z))
    stabs, lxs, lzs = frame
    new_stabs = tuple(conjugate(s, gate) for s in stabs)
    for s in new_stabs:
        if not in_stabilizer(target, s):
            raise StabilizerNotPreserved(f"transversal {gate} does not preserve the stabilizer")
    new_lx = tuple(conjugate(p, gate) for p in lxs)
    new_lz = tuple(conjugate(p, gate) for p in lzs)
    return FrameUpdate(
        gate,
        new_stabs,
        new_lx,
        new_lz,
        tuple(_logical_image(target, p) for p in new_lx),
        tuple(_logical_image(target, p) for p in new_lz),
    )


# expected logical maps, in the same (X-part, Z-part, phase) form
LOGICAL_H = {"X0": "+Z", "Z0": "+X"}
LOGICAL_CNOT = {"X0": "+XX", "X1": "+IX", "Z0": "+ZI", "Z1": "+ZZ"}


# ---------------------------------------------------------------------------
# non-Clifford R_k by state vectors


class CodespaceError(ValueError):
    """The transversal gate moves code states out of the code space."""


@dataclass
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm {norm})")

    @property
    def n(self) -> int:
        return int(self.amplitudes.shape[0]).bit_length() - 1

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


MAX_STATE_QUBITS = 20


def _span_ints(M: np.ndarray) -> np.ndarray:
    basis = z2.row_basis(M)
    words = _to_words(basis) if len(basis) else np.zeros(0, np.uint64)
    span = np.zeros(1, dtype=np.uint64)
    for w in words:
        span = np.concatenate([span, span ^ w])
    return span.astype(np.int64)


def encoded_state(code: CssCode, value: int) -> StateVector:
    """``|value>`` of a one-qubit CSS code: uniform sum over the X-stabilizer coset."""
    if code.k != 1:
        raise ValueError("encoded basis states are built for one logical qubit")
    if code.n > MAX_STATE_QUBITS:
        raise ValueError(f"state vectors are limited to {MAX_STATE_QUBITS} qubits")
    span = _span_ints(code.hx.data)
    if value:
        span = span ^ int(_to_words(code.logicals("X")[:1])[0])
    amp = np.zeros(1 << code.n, dtype=np.complex128)
    amp[span] = 1.0 / np.sqrt(len(span))
    return StateVector(amp)


def rk_phases(n: int, k: int) -> np.ndarray:
    """Diagonal of ``R_k`` applied to every qubit, ``R_k = diag(1, exp(i pi / 2^k))``."""
    idx = np.arange(1 << n, dtype=np.uint64)
    return np.exp(1j * np.pi * _popcount(idx).astype(float) / (1 << k))


@dataclass(frozen=True)
class RkResult:
    k: int
    preserved: bool
    leakage: float
    s: Optional[int]  # logical power, modulo 2^(k+1)


def apply_transversal_rk(code: CssCode, k: int, strict: bool = True) -> RkResult:
    """Apply ``R_k`` to every qubit and identify the induced logical ``R_k^s``.

    ``s`` is defined modulo ``2^(k+1)``, the order of ``R_k``.  With
    ``strict`` a gate that leaks out of the code space raises
    :class:`CodespaceError`.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    zero, one = encoded_state(code, 0), encoded_state(code, 1)
    diag = rk_phases(code.n, k)
    m = np.zeros((2, 2), dtype=np.complex128)
    leak = 0.0
    for b, ket in enumerate((zero, one)):
        out = StateVector(diag * ket.amplitudes)
        for a, bra in enumerate((zero, one)):
            m[a, b] = bra.inner(out)
        leak = max(leak, 1.0 - float(np.sum(np.abs(m[:, b]) ** 2)))
    diagonal = abs(m[0, 1]) < 1e-8 and abs(m[1, 0]) < 1e-8
    preserved = leak < 1e-8 and diagonal
    if not preserved:
        if strict:
            raise CodespaceError(f"transversal R_{k} leaves the code space (leakage {leak:.3g})")
        return RkResult(k, False, leak, None)
    ratio = m[1, 1] / m[0, 0]
    order = 1 << (k + 1)
    s = int(round(np.angle(ratio) * (1 << k) / np.pi)) % order
    if abs(ratio - np.exp(1j * np.pi * s / (1 << k))) > 1e-8:
        raise CodespaceError("logical action is not a power of R_k")
    return RkResult(k, True, leak, s)


# ---------------------------------------------------------------------------
# transversal measurement


def transversal_measure(code: CssCode, basis: str, error: Optional[Pauli] = None, logical_value: int = 0, seed: int = 0, logical: int = 0) -> int:
    """Measure every qubit, decode the outcomes classically and return the logical sign.

    The encoded state has the chosen logical (``Z`` for a ``"Z"`` basis
    measurement) equal to ``(-1)^logical_value``.  Outcomes are a random
    codeword of the matching coset with the error's relevant part added.
    """
    if basis not in ("X", "Z"):
        raise ValueError("basis must be 'X' or 'Z'")
    rng = np.random.default_rng(seed)
    n = code.n
    if basis == "Z":
        gens, flip, readout, kind = code.hx.data, code.logicals("X"), code.logicals("Z"), "Z"
        part = np.zeros(n, np.uint8) if error is None else error.x
    else:
        gens, flip, readout, kind = code.hz.data, code.logicals("Z"), code.logicals("X"), "X"
        part = np.zeros(n, np.uint8) if error is None else error.z
    coeffs = rng.integers(0, 2, size=gens.shape[0]).astype(np.uint8)
    outcome = z2.matmul(coeffs, gens) if gens.shape[0] else np.zeros(n, np.uint8)
    if logical_value:
        outcome ^= flip[logical]
    outcome ^= part
    fix = code.decoder(kind).correct(code.full_syndrome(kind, outcome))
    parity = int(z2.matmul(readout[logical], outcome ^ fix))
    return -1 if parity else 1
