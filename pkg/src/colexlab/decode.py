"""Excitation graphs, clustering decoders and the connectedness bookkeeping.

Syndromes are handled internally as *node indicators*: one bit per
Hamiltonian term (overcomplete generator).  A decoder maps such an indicator
to an error chain on the qubits (X-type for ``"Z"`` syndromes, Z-type for
``"X"`` syndromes) that reproduces it.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import z2
from .code import ColorGeometry, CssCode, Pauli, Syndrome, ToricGeometry, toric_code


class DecodingError(RuntimeError):
    """Correction left undefined (oversize or wrapping excitation cluster)."""


# ---------------------------------------------------------------------------
# excitation graphs


@dataclass
class ExcitationGraph:
    """Nodes are Hamiltonian terms of one type; links may repeat.

    ``links`` keeps one entry per geometric reason for a link (a shared
    lower cell, say), so ``mu`` counts links with multiplicity while
    ``neighbors`` is the plain adjacency used for clustering.
    """

    n_nodes: int
    links: list[tuple[int, int]]
    touch: list[np.ndarray] = field(default_factory=list)
    kind: str = ""

    def __post_init__(self):
        nb: list[set[int]] = [set() for _ in range(self.n_nodes)]
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for a, b in self.links:
            if a == b:
                continue
            nb[a].add(b)
            nb[b].add(a)
            deg[a] += 1
            deg[b] += 1
        self.neighbors = [sorted(s) for s in nb]
        self.degree = deg

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Sequence[tuple[int, int]]) -> "ExcitationGraph":
        return cls(n_nodes, [tuple(e) for e in edges])

    @property
    def lam(self) -> int:
        """Most nodes touched by one site."""
        return max((len(t) for t in self.touch), default=0)

    @property
    def mu(self) -> int:
        """Most links meeting at one node."""
        return int(self.degree.max()) if self.n_nodes else 0

    def linked(self, a: int, b: int) -> bool:
        return b in self.neighbors[a]


def _pairs_within(groups: list[list[int]]) -> list[tuple[int, int]]:
    links = []
    for g in groups:
        links.extend(itertools.combinations(sorted(g), 2))
    return links


def _toric_groups(geo: ToricGeometry, kind: str) -> list[list[int]]:
    lat, d, D = geo.lattice, geo.d, geo.lattice.D
    if kind == "Z":
        m = d - 1  # node dimension
        if m < 0:
            return []
        if m >= 1:
            # nodes meeting at an (m-1)-cell
            B = lat.boundary_matrix(m).data
            return [list(np.flatnonzero(row)) for row in B]
        # vertices: linked through a common edge
        B = lat.boundary_matrix(1).data
        return [list(np.flatnonzero(col)) for col in B.T]
    m = d + 1
    if m > D:
        return []
    if m + 1 <= D:
        # nodes in the boundary of a common (m+1)-cell
        B = lat.boundary_matrix(m + 1).data
        return [list(np.flatnonzero(col)) for col in B.T]
    # top cells: linked through a shared face
    B = lat.boundary_matrix(D).data
    return [list(np.flatnonzero(row)) for row in B]


def _color_groups(geo: ColorGeometry, kind: str) -> Optional[list[list[int]]]:
    cx = geo.colex
    D, d = cx.D, geo.d
    m = (D - d + 1) if kind == "Z" else (d + 1)
    if m + 1 > D + 1:
        return None
    closed = cx.parent if cx.punctured else cx
    node_sets = [frozenset(c.vertices) for c in cx.cells[m]]
    groups = []
    for big in closed.cells[m + 1]:
        inside = set(big.vertices)
        groups.append([i for i, s in enumerate(node_sets) if s <= inside])
    return groups


def excitation_graph(code: CssCode, kind: str) -> ExcitationGraph:
    """Excitation graph of the ``kind`` generators of a lattice code."""
    if kind not in ("X", "Z"):
        raise ValueError("kind must be 'X' or 'Z'")
    H = code.checks(kind)
    touch = [np.flatnonzero(H[:, j]) for j in range(code.n)]
    geo = code.geometry
    if isinstance(geo, ToricGeometry):
        groups = _toric_groups(geo, kind)
    elif isinstance(geo, ColorGeometry):
        groups = _color_groups(geo, kind)
        if groups is None:
            groups = [list(t) for t in touch]
    else:
        raise ValueError("code has no lattice geometry; build it with a lattice constructor")
    return ExcitationGraph(H.shape[0], _pairs_within(groups), touch, kind)


def qubit_adjacency_graph(code: CssCode, kind: str) -> ExcitationGraph:
    """Fallback graph: terms linked whenever they share a qubit."""
    H = code.checks(kind)
    touch = [np.flatnonzero(H[:, j]) for j in range(code.n)]
    return ExcitationGraph(H.shape[0], _pairs_within([list(t) for t in touch]), touch, kind)


# ---------------------------------------------------------------------------
# cluster decomposition


@dataclass(frozen=True)
class Cluster:
    nodes: tuple[int, ...]
    extent: Optional[tuple[int, ...]] = None  # per-axis box side, when geometric


@dataclass(frozen=True)
class ClusterDecomposition:
    kind: str
    n_nodes: int
    components: tuple[Cluster, ...]

    def indicators(self) -> list[np.ndarray]:
        out = []
        for c in self.components:
            v = np.zeros(self.n_nodes, dtype=np.uint8)
            v[list(c.nodes)] = 1
            out.append(v)
        return out

    def __len__(self):
        return len(self.components)


def components(g: ExcitationGraph, nodes: np.ndarray) -> list[list[int]]:
    """Connected components of the excited nodes, ordered by least node."""
    active = set(np.flatnonzero(nodes).tolist())
    seen: set[int] = set()
    out = []
    for s in sorted(active):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors[u]:
                if w in active and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def cluster_decompose(g: ExcitationGraph, b, code: Optional[CssCode] = None) -> ClusterDecomposition:
    """Split a syndrome into mutually unlinked connected pieces.

    ``b`` is a basis :class:`Syndrome` (expanded through ``code``) or an
    overcomplete node indicator.
    """
    if isinstance(b, Syndrome):
        if code is None:
            raise ValueError("a basis syndrome needs the code to expand it")
        nodes = code.expand(b)
    else:
        nodes = np.asarray(b, dtype=np.uint8)
    ext = None
    geo = code.geometry if code is not None else None
    comps = components(g, nodes)
    clusters = []
    for c in comps:
        if isinstance(geo, ToricGeometry):
            box = _box(geo.lattice, _node_dim(geo, g.kind), c)
            ext = None if box is None else tuple(hi - lo for _, lo, hi in box)
        clusters.append(Cluster(tuple(c), ext))
    return ClusterDecomposition(g.kind, g.n_nodes, tuple(clusters))


# ---------------------------------------------------------------------------
# decoders


class Decoder:
    """Deterministic map from node indicators to correcting chains."""

    kind: str
    code: CssCode

    def correct(self, nodes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, b: Syndrome) -> Pauli:
        chain = self.correct(self.code.expand(b))
        return Pauli.from_x(chain) if self.kind == "Z" else Pauli.from_z(chain)


class SolveDecoder(Decoder):
    """Least-index GF(2) solution over the whole lattice."""

    def __init__(self, code: CssCode, kind: str):
        self.code, self.kind = code, kind
        self.H = code.checks(kind)
        self._cache: dict[bytes, np.ndarray] = {}

    def correct(self, nodes):
        nodes = np.asarray(nodes, dtype=np.uint8)
        key = nodes.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            x = z2.solve(self.H, nodes)
            if x is None:
                raise DecodingError("syndrome is not produced by any error")
            self._cache[key] = hit = x
        return hit.copy()


class LookupDecoder(Decoder):
    """Minimum-weight table decoder for small codes (ties: least support)."""

    MAX_QUBITS = 20

    def __init__(self, code: CssCode, kind: str):
        n = code.n
        if n > self.MAX_QUBITS:
            raise ValueError(f"lookup table needs n <= {self.MAX_QUBITS}")
        self.code, self.kind = code, kind
        H = code.checks(kind)
        ints = np.arange(1 << n, dtype=np.int64)
        bits = ((ints[:, None] >> np.arange(n)) & 1).astype(np.uint8)
        w = bits.sum(axis=1)
        # weight first, then the lexicographically smallest support
        rev = ((ints[:, None] >> np.arange(n)) & 1)[:, ::-1] @ (1 << np.arange(n, dtype=np.int64))
        order = np.lexsort((-rev, w))
        synd = z2.matmul(bits, H.T)
        keys = np.packbits(synd, axis=1)
        self.table: dict[bytes, int] = {}
        for i in order:
            k = keys[i].tobytes()
            if k not in self.table:
                self.table[k] = int(i)
        self.n = n

    def correct(self, nodes):
        nodes = np.asarray(nodes, dtype=np.uint8)
        key = np.packbits(nodes).tobytes()
        idx = self.table.get(key)
        if idx is None:
            raise DecodingError("syndrome is not produced by any error")
        return ((idx >> np.arange(self.n)) & 1).astype(np.uint8)


def _node_dim(geo: ToricGeometry, kind: str) -> int:
    return geo.d - 1 if kind == "Z" else geo.d + 1


def _box(lat, ndim: int, comp: Sequence[int]):
    """Smallest non-wrapping box around some cells, as ``(cut, lo, hi)`` per axis.

    ``cut`` is an unused unit arc ``[u, u+1]``; coordinates are unwrapped to
    ``(x - u - 1) mod L`` so the box is the interval ``[lo, hi]``.  Returns
    ``None`` if the cells wrap around some axis.
    """
    L, D = lat.L, lat.D
    pos = [0] * D
    arcs = [0] * D
    for c in comp:
        p, a = lat.footprint(ndim, c)
        for i in range(D):
            pos[i] |= p[i]
            arcs[i] |= a[i]
    out = []
    for i in range(D):
        occupied = [x for x in range(L) if pos[i] >> x & 1]
        best = None
        for u in range(L):
            if arcs[i] >> u & 1:
                continue
            un = [(x - u - 1) % L for x in occupied]
            lo, hi = min(un), max(un)
            corner = (lo + u + 1) % L
            key = (hi - lo, corner)
            if best is None or key < best[0]:
                best = (key, (u, lo, hi))
        if best is None:
            return None
        out.append(best[1])
    return out


class ToricBoxDecoder(Decoder):
    """Per-cluster correction inside the cluster's bounding box.

    Clusters are solved independently with least-index elimination restricted
    to the qubits inside their box.  A cluster that is not a boundary by
    itself (an odd set of point-like excitations) grows one lattice step at a
    time and absorbs every cluster it reaches, until all clusters are
    boundaries.  ``max_side`` caps the box side length in lattice spacings.
    The default ``L - 1`` admits any box that does not wrap around the torus;
    ``L/2 - 1`` is the tighter range used in the stability argument.
    """

    def __init__(self, code: CssCode, kind: str, max_side: Optional[float] = None):
        geo = code.geometry
        if not isinstance(geo, ToricGeometry):
            raise ValueError("box decoding needs a toric code")
        self.code, self.kind = code, kind
        self.lat = geo.lattice
        self.ndim = _node_dim(geo, kind)
        self.max_side = self.lat.L - 1 if max_side is None else max_side
        self.H = code.checks(kind)
        self.graph = excitation_graph(code, kind)
        lat, d = self.lat, geo.d
        cells = lat.cells[d]
        self.col_pos = np.array([c.pos for c in cells], dtype=np.int64).reshape(len(cells), lat.D)
        ext = np.zeros((len(cells), lat.D), dtype=np.int64)
        for c in cells:
            ext[c.id, list(c.dirs)] = 1
        self.col_ext = ext
        self._node_dist = None
        self._cache: dict[tuple, Optional[np.ndarray]] = {}

    def box_of(self, comp: Sequence[int]):
        box = _box(self.lat, self.ndim, comp)
        if box is None:
            raise DecodingError("excitation cluster wraps around the torus")
        for _, lo, hi in box:
            if hi - lo > self.max_side:
                raise DecodingError("oversize component")
        return box

    def in_box_columns(self, box) -> np.ndarray:
        L = self.lat.L
        ok = np.ones(self.col_pos.shape[0], dtype=bool)
        for i, (u, lo, hi) in enumerate(box):
            x = (self.col_pos[:, i] - u - 1) % L
            ok &= (x >= lo) & (x + self.col_ext[:, i] <= hi)
        return np.flatnonzero(ok)

    def solve_component(self, comp: Sequence[int]) -> Optional[np.ndarray]:
        """Chain inside the box with the component as syndrome, or ``None``."""
        key = tuple(comp)
        if key in self._cache:
            hit = self._cache[key]
            return None if hit is None else hit.copy()
        box = self.box_of(comp)
        cols = self.in_box_columns(box)
        sub = self.H[:, cols]
        rows = np.union1d(np.flatnonzero(sub.any(axis=1)), np.asarray(comp))
        target = np.zeros(rows.shape[0], dtype=np.uint8)
        target[np.searchsorted(rows, comp)] = 1
        x = z2.solve(sub[rows], target) if cols.size else None
        out = None
        if x is not None:
            out = np.zeros(self.code.n, dtype=np.uint8)
            out[cols] = x
        self._cache[key] = out
        return None if out is None else out.copy()

    def _distance(self, a: Sequence[int], b: Sequence[int]) -> int:
        """Least torus L1 distance between base points of two node sets."""
        if self._node_dist is None:
            L = self.lat.L
            pos = np.array([c.pos for c in self.lat.cells[self.ndim]], dtype=np.int64)
            diff = np.abs(pos[:, None, :] - pos[None, :, :]) % L
            self._node_dist = np.minimum(diff, L - diff).sum(axis=2)
        return int(self._node_dist[np.ix_(list(a), list(b))].min())

    def correct(self, nodes):
        nodes = np.asarray(nodes, dtype=np.uint8)
        clusters = components(self.graph, nodes)
        sols = [self.solve_component(c) for c in clusters]
        radius = 1
        while any(x is None for x in sols):
            # grow the clusters that are not boundaries yet and merge what they reach
            radius += 1
            if radius > self.lat.L * self.lat.D:
                raise DecodingError("excitations cannot be paired inside any box")
            parent = list(range(len(clusters)))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for i, x in enumerate(sols):
                if x is not None:
                    continue
                for j in range(len(clusters)):
                    if j != i and self._distance(clusters[i], clusters[j]) <= radius:
                        parent[find(j)] = find(i)
            groups: dict[int, list[int]] = {}
            for i in range(len(clusters)):
                groups.setdefault(find(i), []).append(i)
            merged_clusters, merged_sols = [], []
            for members in groups.values():
                if len(members) == 1:
                    merged_clusters.append(clusters[members[0]])
                    merged_sols.append(sols[members[0]])
                else:
                    comp = sorted(v for k in members for v in clusters[k])
                    merged_clusters.append(comp)
                    merged_sols.append(self.solve_component(comp))
            order = sorted(range(len(merged_clusters)), key=lambda i: merged_clusters[i][0])
            clusters = [merged_clusters[i] for i in order]
            sols = [merged_sols[i] for i in order]
        out = np.zeros(self.code.n, dtype=np.uint8)
        for x in sols:
            out ^= x
        return out


def toric_box_corr(code: CssCode, component, kind: str = "Z") -> Pauli:
    """Correction of one excitation cluster from inside its bounding box."""
    if isinstance(component, Syndrome):
        kind = component.kind
        comp = np.flatnonzero(code.expand(component)).tolist()
    elif isinstance(component, Cluster):
        comp = list(component.nodes)
    else:
        arr = np.asarray(component)
        comp = np.flatnonzero(arr).tolist() if arr.dtype == np.uint8 and arr.size == code.checks(kind).shape[0] else sorted(int(c) for c in arr)
    dec = code.decoder(kind)
    if not isinstance(dec, ToricBoxDecoder):
        dec = ToricBoxDecoder(code, kind)
    x = dec.solve_component(comp)
    if x is None:
        raise DecodingError("component is not a boundary inside its box")
    return Pauli.from_x(x) if kind == "Z" else Pauli.from_z(x)


# ---------------------------------------------------------------------------
# color codes


@dataclass(frozen=True)
class ColorReduction:
    remaining: np.ndarray  # node indicator after the reduction
    chain: np.ndarray  # applied error chain on the qubits
    by_color: dict  # color set -> excited node ids left over


def color_reduce(code: CssCode, nodes, kind: str = "Z", q0=None) -> ColorReduction:
    """Clear every excitation whose color set avoids ``q0``.

    A solution ``c`` of the full syndrome is restricted to the
    ``(Q - q0)``-cells that hold such excitations; those cells partition the
    vertices, so the restriction reproduces exactly the unwanted part of the
    syndrome inside them and nothing at the other cells avoiding ``q0``.
    """
    geo = code.geometry
    if not isinstance(geo, ColorGeometry):
        raise ValueError("color reduction needs a color code")
    if isinstance(nodes, Syndrome):
        kind = nodes.kind
        nodes = code.expand(nodes)
    nodes = np.asarray(nodes, dtype=np.uint8)
    cx = geo.colex
    closed = cx.parent if cx.punctured else cx
    q0 = cx.colors[0] if q0 is None else q0
    rest = frozenset(cx.colors) - {q0}
    m = (cx.D - geo.d + 1) if kind == "Z" else (geo.d + 1)
    H = code.checks(kind)
    c = z2.solve(H, nodes)
    if c is None:
        raise ValueError("inconsistent excitation set")
    mask = np.zeros(code.n, dtype=np.uint8)
    vidx = cx.vertex_index
    for i in np.flatnonzero(nodes):
        cell = cx.cells[m][i]
        if q0 in cell.colors:
            continue
        mu = closed.cell_at(cell.vertices[0], rest)
        for v in mu.vertices:
            if v in vidx:
                mask[vidx[v]] = 1
    chain = c & mask
    remaining = nodes ^ z2.matmul(H, chain)
    by_color: dict = {}
    for i in np.flatnonzero(remaining):
        cell = cx.cells[m][i]
        assert q0 in cell.colors
        by_color.setdefault(cell.colors, []).append(int(i))
    return ColorReduction(remaining, chain, by_color)


class ColorDecoder(Decoder):
    """Color reduction followed by a least-index solve of what is left."""

    def __init__(self, code: CssCode, kind: str):
        self.code, self.kind = code, kind
        self.rest = SolveDecoder(code, kind)

    def correct(self, nodes):
        try:
            red = color_reduce(self.code, nodes, self.kind)
        except ValueError as exc:
            raise DecodingError(str(exc)) from None
        return red.chain ^ self.rest.correct(red.remaining)


def default_decoder(code: CssCode, kind: str) -> Decoder:
    if isinstance(code.geometry, ToricGeometry):
        return ToricBoxDecoder(code, kind)
    if code.n <= LookupDecoder.MAX_QUBITS:
        return LookupDecoder(code, kind)
    if isinstance(code.geometry, ColorGeometry):
        return ColorDecoder(code, kind)
    return SolveDecoder(code, kind)


def corr(code: CssCode, b: Syndrome) -> Pauli:
    """The code's correction for a basis syndrome."""
    return code.decoder(b.kind)(b)


# ---------------------------------------------------------------------------
# connectedness conditions and Peierls counting


@dataclass
class ConditionReport:
    family: str
    kind: str
    L: list[int]
    lam: list[int]
    mu: list[int]
    nu: list[int]
    lam_constant: bool
    mu_constant: bool
    decomposition_ok: bool
    factorization_checked: int
    factorization_ok: bool

    @property
    def passed(self) -> bool:
        return self.lam_constant and self.mu_constant and self.decomposition_ok and self.factorization_ok


def _random_local_error(code: CssCode, kind: str, rng, max_weight: int) -> np.ndarray:
    """A few flips on qubits that share a node with a random seed qubit."""
    H = code.checks(kind)
    e = np.zeros(code.n, dtype=np.uint8)
    q = int(rng.integers(code.n))
    e[q] = 1
    for _ in range(int(rng.integers(0, max_weight))):
        node = rng.choice(np.flatnonzero(H[:, q])) if H[:, q].any() else None
        if node is None:
            break
        q = int(rng.choice(np.flatnonzero(H[node])))
        e[q] ^= 1
    return e


def check_factorization(code: CssCode, kind: str, pairs: int, seed: int = 0, max_weight: int = 3) -> tuple[int, int]:
    """Spot-check ``corr(b + b') = corr(b) corr(b')`` for unlinked ``b, b'``.

    Returns ``(checked, failures)``.
    """
    rng = np.random.default_rng(seed)
    dec = code.decoder(kind)
    g = excitation_graph(code, kind)
    checked = failures = 0
    tries = 0
    while checked < pairs and tries < 50 * pairs:
        tries += 1
        b1 = code.full_syndrome(kind, _random_local_error(code, kind, rng, max_weight))
        b2 = code.full_syndrome(kind, _random_local_error(code, kind, rng, max_weight))
        n1, n2 = set(np.flatnonzero(b1)), set(np.flatnonzero(b2))
        if not n1 or not n2 or n1 & n2 or any(g.linked(a, b) for a in n1 for b in n2):
            continue
        try:
            c1, c2, c12 = dec.correct(b1), dec.correct(b2), dec.correct(b1 ^ b2)
        except DecodingError:
            continue
        checked += 1
        failures += int(not np.array_equal(c12, c1 ^ c2))
    return checked, failures


def verify_conditions(
    family: str | Callable[[int], CssCode],
    Ls: Sequence[int],
    D: int = 2,
    d: int = 1,
    kind: str = "Z",
    pairs: int = 200,
    seed: int = 0,
) -> ConditionReport:
    """Measure the connectedness constants over a family of lattice sizes."""
    if callable(family):
        build, name = family, getattr(family, "__name__", "custom")
    elif family == "toric":
        build, name = (lambda L: toric_code(D, d, L)), f"toric D={D} d={d}"
    else:
        raise ValueError(f"unknown family {family!r}")
    lam, mu, nu = [], [], []
    decomposition_ok = True
    checked = failures = 0
    rng = np.random.default_rng(seed)
    for L in Ls:
        code = build(L)
        g = excitation_graph(code, kind)
        lam.append(g.lam)
        mu.append(g.mu)
        nu.append(2 ** code.k)
        for _ in range(20):
            e = (rng.random(code.n) < 0.1).astype(np.uint8)
            b = code.full_syndrome(kind, e)
            dec = cluster_decompose(g, b, code)
            total = np.zeros_like(b)
            for v in dec.indicators():
                total ^= v
            comps = [set(c.nodes) for c in dec.components]
            apart = all(
                not any(g.linked(a, x) for a in A for x in B)
                for A, B in itertools.combinations(comps, 2)
            )
            decomposition_ok &= bool(np.array_equal(total, b)) and apart
        c, f = check_factorization(code, kind, pairs, seed=seed + L)
        checked += c
        failures += f
    return ConditionReport(
        family=name,
        kind=kind,
        L=list(Ls),
        lam=lam,
        mu=mu,
        nu=nu,
        lam_constant=len(set(lam)) == 1,
        mu_constant=len(set(mu)) == 1,
        decomposition_ok=decomposition_ok,
        factorization_checked=checked,
        factorization_ok=failures == 0 and checked > 0,
    )


def path_graph(n: int) -> ExcitationGraph:
    return ExcitationGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid_graph(dim: int, size: int) -> ExcitationGraph:
    """Open ``size^dim`` grid with nearest-neighbor links."""
    idx = {p: i for i, p in enumerate(itertools.product(range(size), repeat=dim))}
    edges = []
    for p, i in idx.items():
        for a in range(dim):
            q = list(p)
            q[a] += 1
            if tuple(q) in idx:
                edges.append((i, idx[tuple(q)]))
    return ExcitationGraph.from_edges(len(idx), edges)


def grid_center(dim: int, size: int) -> int:
    c = (size // 2,) * dim
    return sum(x * size ** (dim - 1 - a) for a, x in enumerate(c))


def count_connected(g: ExcitationGraph, node: int, l: int, check: bool = True) -> int:
    """Number of connected node sets of size ``l`` that contain ``node``."""
    if l < 1:
        return 0
    level = {frozenset([node])}
    for _ in range(l - 1):
        nxt = set()
        for s in level:
            border = {w for u in s for w in g.neighbors[u]} - s
            for w in border:
                nxt.add(s | {w})
        level = nxt
    count = len(level)
    if check and count > math.exp(g.mu * math.log(2) * l) * (1 + 1e-12):
        raise AssertionError(f"{count} connected sets exceed the exp(mu ln2 l) bound")
    return count


def peierls_bound(gamma: float, nu: float, xi: float, L: float, lam: float, mu: float, beta: float, t_min: float) -> float:
    """``|Gamma|^(2 nu) exp(-delta xi L / (lam mu)) / (1 - exp(-delta))``.

    ``delta = beta t_min - mu ln 2`` must be positive.
    """
    delta = beta * t_min - mu * math.log(2)
    if delta <= 0:
        raise ValueError("above critical temperature: beta * t_min <= mu ln 2")
    l0 = xi * L / (lam * mu)
    return gamma ** (2 * nu) * math.exp(-delta * l0) / -math.expm1(-delta)


def peierls_series(gamma: float, nu: float, xi: float, L: float, lam: float, mu: float, beta: float, t_min: float, tol: float = 1e-300) -> float:
    """The same bound summed term by term from ``l0 = xi L / (lam mu)``."""
    delta = beta * t_min - mu * math.log(2)
    if delta <= 0:
        raise ValueError("above critical temperature: beta * t_min <= mu ln 2")
    l0 = xi * L / (lam * mu)
    terms = []
    k = 0
    while True:
        t = math.exp(-delta * (l0 + k))
        terms.append(t)
        if t < tol or k > 10**6:
            break
        k += 1
    return gamma ** (2 * nu) * math.fsum(terms)
