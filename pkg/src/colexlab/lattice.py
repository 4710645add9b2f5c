"""Hypercubic torus lattices and hypercube-derived colexes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Optional

import numpy as np

from .z2 import ChainComplex, Z2Matrix


# ---------------------------------------------------------------------------
# torus lattices


@dataclass(frozen=True)
class TorusCell:
    id: int
    dim: int
    pos: tuple[int, ...]
    dirs: tuple[int, ...]


class CellLattice:
    """Periodic hypercubic lattice of side ``L`` in ``D`` dimensions.

    An ``n``-cell is a base position together with the ``n`` axis directions
    it extends along.  Ids are dense per dimension, ordered by
    ``(position, directions)``.
    """

    def __init__(self, D: int, L: int):
        if D < 1:
            raise ValueError("dimension must be at least 1")
        if L < 2:
            raise ValueError("side length must be at least 2 (L=1 wraps a cell onto itself)")
        self.D = D
        self.L = L
        positions = list(itertools.product(range(L), repeat=D))
        self.cells: list[list[TorusCell]] = []
        self._index: list[dict[tuple, int]] = []
        for n in range(D + 1):
            dir_sets = list(itertools.combinations(range(D), n))
            cells = [
                TorusCell(i, n, pos, dirs)
                for i, (pos, dirs) in enumerate((p, s) for p in positions for s in dir_sets)
            ]
            self.cells.append(cells)
            self._index.append({(c.pos, c.dirs): c.id for c in cells})

    def count(self, n: int) -> int:
        return len(self.cells[n]) if 0 <= n <= self.D else 0

    def index(self, pos: Iterable[int], dirs: Iterable[int]) -> int:
        pos = tuple(p % self.L for p in pos)
        return self._index[len(tuple(dirs))][(pos, tuple(sorted(dirs)))]

    def shift(self, pos: tuple[int, ...], axis: int, step: int = 1) -> tuple[int, ...]:
        p = list(pos)
        p[axis] = (p[axis] + step) % self.L
        return tuple(p)

    def faces(self, n: int, cid: int) -> list[int]:
        """Ids of the ``(n-1)``-cells in the boundary of ``n``-cell ``cid``."""
        c = self.cells[n][cid]
        out = []
        for i in c.dirs:
            rest = tuple(a for a in c.dirs if a != i)
            out.append(self._index[n - 1][(c.pos, rest)])
            out.append(self._index[n - 1][(self.shift(c.pos, i), rest)])
        return out

    def boundary_matrix(self, n: int) -> Z2Matrix:
        """Map from ``n``-chains to ``(n-1)``-chains; empty at the ends."""
        if n <= 0:
            return Z2Matrix.zeros(0, self.count(0))
        if n > self.D:
            return Z2Matrix.zeros(self.count(self.D), 0)
        M = np.zeros((self.count(n - 1), self.count(n)), dtype=np.uint8)
        for c in self.cells[n]:
            for f in self.faces(n, c.id):
                M[f, c.id] ^= 1
        return Z2Matrix(M)

    def vertices_of(self, n: int, cid: int) -> list[int]:
        c = self.cells[n][cid]
        out = []
        for sub in itertools.product((0, 1), repeat=len(c.dirs)):
            p = list(c.pos)
            for a, s in zip(c.dirs, sub):
                p[a] = (p[a] + s) % self.L
            out.append(self._index[0][(tuple(p), ())])
        return sorted(set(out))

    def footprint(self, n: int, cid: int) -> tuple[list[int], list[int]]:
        """Per-axis occupied positions and used unit arcs ``[x, x+1]`` of a cell.

        Returned as two lists of ``D`` bitmasks over ``Z_L``.
        """
        c = self.cells[n][cid]
        pos_mask, arc_mask = [], []
        for a in range(self.D):
            x = c.pos[a]
            if a in c.dirs:
                pos_mask.append((1 << x) | (1 << ((x + 1) % self.L)))
                arc_mask.append(1 << x)
            else:
                pos_mask.append(1 << x)
                arc_mask.append(0)
        return pos_mask, arc_mask

    def __repr__(self):
        return f"CellLattice(D={self.D}, L={self.L})"


def build_torus(D: int, L: int) -> CellLattice:
    return CellLattice(D, L)


def cellular_complex(lat: CellLattice) -> ChainComplex:
    """The full complex ``C_D -> ... -> C_0`` of the lattice."""
    return ChainComplex(
        dims=tuple(lat.count(n) for n in range(lat.D + 1)),
        boundaries=tuple(lat.boundary_matrix(n) for n in range(1, lat.D + 1)),
    )


def toric_complex(lat: CellLattice, d: int) -> ChainComplex:
    """Three-term complex ``C_{d+1} -> C_d -> C_{d-1}`` behind the ``d``-th toric code."""
    if not 0 <= d <= lat.D:
        raise ValueError(f"brane dimension {d} outside 0..{lat.D}")
    return ChainComplex(
        dims=(lat.count(d - 1), lat.count(d), lat.count(d + 1)),
        boundaries=(lat.boundary_matrix(d), lat.boundary_matrix(d + 1)),
    )


# ---------------------------------------------------------------------------
# colexes


@dataclass(frozen=True)
class ColexCell:
    id: int  # dense within its dimension
    colors: frozenset
    vertices: tuple[int, ...]  # vertex labels, sorted

    @property
    def dim(self) -> int:
        return len(self.colors)


@dataclass(frozen=True, eq=False)
class Colex:
    """A colored cell lattice given by its vertex sets.

    ``cells[n]`` holds the ``n``-cells for ``n = 1 .. D+1`` (``cells[0]`` is
    empty; vertices live in ``vertices``).  A cell's color set has exactly
    ``n`` elements; the single ``(D+1)``-cell of a connected colex is the whole
    vertex set.  ``parent`` is the closed colex a punctured one came from.
    """

    D: int
    colors: tuple
    vertices: tuple[int, ...]
    cells: tuple[tuple[ColexCell, ...], ...]
    punctured: bool = False
    parent: Optional["Colex"] = field(default=None, repr=False)
    name: str = ""

    @cached_property
    def vertex_index(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def count(self, n: int) -> int:
        if n == 0:
            return len(self.vertices)
        return len(self.cells[n]) if 0 < n < len(self.cells) else 0

    def cell(self, n: int, cid: int) -> ColexCell:
        return self.cells[n][cid]

    def all_cells(self) -> Iterable[ColexCell]:
        for n in range(1, len(self.cells)):
            yield from self.cells[n]

    def chain(self, cell: ColexCell) -> np.ndarray:
        """Vertex-indicator chain of a cell."""
        c = np.zeros(len(self.vertices), dtype=np.uint8)
        idx = self.vertex_index
        for v in cell.vertices:
            if v in idx:
                c[idx[v]] = 1
        return c

    def cell_matrix(self, n: int) -> Z2Matrix:
        """One row per ``n``-cell, the cell's vertex chain."""
        rows = [self.chain(c) for c in self.cells[n]] if 0 < n < len(self.cells) else []
        return Z2Matrix(np.array(rows, dtype=np.uint8).reshape(len(rows), len(self.vertices)))

    @cached_property
    def _by_colors(self) -> dict[frozenset, list[int]]:
        out: dict[frozenset, list[int]] = {}
        for n in range(1, len(self.cells)):
            for c in self.cells[n]:
                out.setdefault(c.colors, []).append(c.id)
        return out

    @cached_property
    def _vertex_cell(self) -> dict[frozenset, dict[int, int]]:
        out: dict[frozenset, dict[int, int]] = {}
        for q, ids in self._by_colors.items():
            m = out.setdefault(q, {})
            for cid in ids:
                for v in self.cells[len(q)][cid].vertices:
                    m[v] = cid
        return out

    def cell_at(self, v: int, q: Iterable) -> Optional[ColexCell]:
        """The ``q``-cell containing vertex ``v``."""
        q = frozenset(q)
        if not q:
            return None
        cid = self._vertex_cell.get(q, {}).get(v)
        return None if cid is None else self.cells[len(q)][cid]

    def edges_at(self, v: int) -> list[ColexCell]:
        return [c for c in self.cells[1] if v in c.vertices]

    def dual_simplex(self, cell: ColexCell) -> list[ColexCell]:
        """Vertices of the dual simplex: the ``D``-cells containing ``cell``."""
        s = set(cell.vertices)
        return [c for c in self.cells[self.D] if s <= set(c.vertices)]

    def is_nice(self) -> bool:
        """Pairwise cell intersections hold at most one cell of the shared color."""
        everything = [(frozenset(), (v,)) for v in self.vertices]
        everything += [(c.colors, c.vertices) for c in self.all_cells()]
        sets = [(q, frozenset(vs)) for q, vs in everything]
        for (q, a), (r, b) in itertools.combinations(sets, 2):
            common = a & b
            if len(common) <= 1:
                continue
            s = q & r
            if not s:
                return False
            owners = {self.cell_at(v, s) for v in common}
            inside = [c for c in owners if c is not None and set(c.vertices) <= common]
            if len(inside) > 1:
                return False
        return True

    def __repr__(self):
        tag = ", punctured" if self.punctured else ""
        return f"Colex(D={self.D}, vertices={len(self.vertices)}{tag})"


def _sorted_cells(raw: list[tuple[frozenset, tuple[int, ...]]]) -> tuple[ColexCell, ...]:
    raw = sorted(raw, key=lambda t: (t[1], sorted(t[0])))
    return tuple(ColexCell(i, q, vs) for i, (q, vs) in enumerate(raw))


def build_hypercube_colex(D: int) -> Colex:
    """The ``D``-colex on the surface of the ``(D+1)``-cube.

    Vertices are the binary coordinates ``0 .. 2^(D+1)-1``; color ``i`` is the
    axis ``i`` and a ``q``-cell is a coset of the coordinate subcube spanned by
    ``q``.
    """
    if D < 1:
        raise ValueError("colex dimension must be at least 1")
    colors = tuple(range(D + 1))
    nv = 1 << (D + 1)
    cells: list[tuple[ColexCell, ...]] = [()]
    for n in range(1, D + 2):
        raw = []
        for q in itertools.combinations(colors, n):
            mask = sum(1 << i for i in q)
            subs = [s for s in range(nv) if s & ~mask == 0]
            for base in range(nv):
                if base & mask:
                    continue
                raw.append((frozenset(q), tuple(sorted(base | s for s in subs))))
        cells.append(_sorted_cells(raw))
    return Colex(D=D, colors=colors, vertices=tuple(range(nv)), cells=tuple(cells), name=f"hypercube{D}")


def puncture(cx: Colex, vertex: int = 0) -> Colex:
    """Remove a vertex and every cell containing it."""
    if cx.punctured:
        raise ValueError("colex is already punctured")
    if vertex not in cx.vertex_index:
        raise ValueError(f"no vertex {vertex}")
    cells: list[tuple[ColexCell, ...]] = [()]
    for n in range(1, len(cx.cells)):
        kept = [(c.colors, c.vertices) for c in cx.cells[n] if vertex not in c.vertices]
        cells.append(_sorted_cells(kept))
    return Colex(
        D=cx.D,
        colors=cx.colors,
        vertices=tuple(v for v in cx.vertices if v != vertex),
        cells=tuple(cells),
        punctured=True,
        parent=cx,
        name=f"{cx.name}-punctured",
    )


def subcolex(cx: Colex, n: int, cid: int) -> Colex:
    """The ``(n-1)``-colex formed by ``n``-cell ``cid`` and the cells inside it."""
    if n < 1:
        raise ValueError("vertices have no subcolex")
    if cx.punctured:
        raise ValueError("subcolexes are taken on closed colexes")
    lam = cx.cells[n][cid]
    inside = set(lam.vertices)
    cells: list[tuple[ColexCell, ...]] = [()]
    for m in range(1, n + 1):
        kept = [(c.colors, c.vertices) for c in cx.cells[m] if c.colors <= lam.colors and inside.issuperset(c.vertices)]
        cells.append(_sorted_cells(kept))
    return Colex(
        D=n - 1,
        colors=tuple(sorted(lam.colors)),
        vertices=lam.vertices,
        cells=tuple(cells),
        name=f"{cx.name}/{n}:{cid}",
    )


def color_cells(cx: Colex, q: Iterable) -> list[int]:
    """Ids of the cells whose color set is exactly ``q``."""
    q = frozenset(q)
    if not q <= set(cx.colors):
        raise ValueError(f"colors {sorted(q)} not in {cx.colors}")
    return list(cx._by_colors.get(q, []))


def expected_torus_count(D: int, L: int, n: int) -> int:
    return comb(D, n) * L**D


def cells_inside(cx: Colex, lam: ColexCell, r: Iterable) -> list[ColexCell]:
    """The ``r``-cells contained in ``lam`` (``r`` must be a subset of its colors)."""
    r = frozenset(r)
    if not r <= lam.colors:
        raise ValueError("sub-coloring must be contained in the cell's colors")
    inside = set(lam.vertices)
    return [c for c in cx.cells[len(r)] if c.colors == r and inside.issuperset(c.vertices)]


def check_conservation(cx: Colex, m: int) -> int:
    """Assert that the ``r``-cells inside each ``m``-cell multiply to the same operator
    for every ``(m-1)``-coloring ``r``; returns the number of cells checked.
    """
    checked = 0
    for lam in cx.cells[m]:
        ref = None
        for r in itertools.combinations(sorted(lam.colors), m - 1):
            prod = np.zeros(len(cx.vertices), dtype=np.uint8)
            for c in cells_inside(cx, lam, r):
                prod ^= cx.chain(c)
            if ref is None:
                ref = prod
            elif not np.array_equal(ref, prod):
                raise AssertionError(f"conservation fails at {m}-cell {lam.id} for colors {r}")
        checked += 1
    return checked
