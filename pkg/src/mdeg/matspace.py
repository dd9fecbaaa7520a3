"""Linear spaces of square matrices and the constructions that produce them.

A MatrixSpace is a span of rational basis matrices of a declared kind
(diagonal, symmetric, or general).  Bases are canonicalized by exact row
reduction, so equality of spaces is decidable by comparing bases.  Floats
never appear here; they enter only inside the path tracker.

Constructions:

  * the span of signed vertex incidence vectors of an oriented graph,
    embedded as diagonal matrices (one coordinate per edge);
  * the symmetric space of a graphical model (free diagonal, off-diagonal
    entries supported on edges);
  * seeded random spaces of any kind and dimension;
  * spaces of quadrics through prescribed points;
  * orthogonal complements under the trace pairing <A, B> = tr(AB).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import numpy as np

from . import exactla
from .polyring import EXACT, SparsePoly, SymbolicMatrix
from .seeding import TAG_SPACE, rng_from

KINDS = ("diagonal", "symmetric", "general")


class DegenerateInputError(ValueError):
    """Raised when an input fails a genericity or independence requirement."""


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Graph:
    """A loopless multigraph with recorded edge orientations.

    Edges are ordered pairs; the pair order is the orientation used by the
    incidence construction.  Parallel edges are allowed, loops are not.
    """

    nvertices: int
    edges: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if self.nvertices < 1:
            raise ValueError("graph needs at least one vertex")
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"loop at vertex {a}")
            if not (0 <= a < self.nvertices and 0 <= b < self.nvertices):
                raise ValueError(f"edge ({a},{b}) out of range")

    def simple_edges(self) -> frozenset:
        """Distinct undirected edges."""
        return frozenset((min(a, b), max(a, b)) for a, b in self.edges)

    def is_connected(self) -> bool:
        if self.nvertices == 1:
            return True
        adj = {v: set() for v in range(self.nvertices)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.nvertices

    def degrees(self) -> list:
        deg = [0] * self.nvertices
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    # -- constructors

    @staticmethod
    def path(n: int) -> "Graph":
        return Graph(n, tuple((i, i + 1) for i in range(n - 1)), name=f"P{n}")

    @staticmethod
    def cycle(n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycle needs at least 3 vertices")
        return Graph(n, tuple((i, (i + 1) % n) for i in range(n)), name=f"C{n}")

    @staticmethod
    def complete(n: int) -> "Graph":
        return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)),
                     name=f"K{n}")

    @staticmethod
    def empty(n: int) -> "Graph":
        return Graph(n, (), name=f"E{n}")

    @staticmethod
    def from_json_dict(data: dict, name: str = "") -> "Graph":
        return Graph(int(data["vertices"]), tuple(tuple(e) for e in data["edges"]), name=name)

    @staticmethod
    def from_edge_list_text(text: str, name: str = "") -> "Graph":
        """Plain text format: one `a b` pair per line, 0-indexed vertices."""
        edges = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            edges.append((int(a), int(b)))
        nv = max((max(a, b) for a, b in edges), default=-1) + 1
        return Graph(max(nv, 1), tuple(edges), name=name)

    @staticmethod
    def load(path: str) -> "Graph":
        """Load a graph file, sniffing JSON versus edge-list text."""
        with open(path) as fh:
            text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            return Graph.from_edge_list_text(text, name=path)
        return Graph.from_json_dict(data, name=path)


# ---------------------------------------------------------------------------
# flattening conventions per kind

def ambient_dimension(kind: str, n: int) -> int:
    if kind == "diagonal":
        return n
    if kind == "symmetric":
        return n * (n + 1) // 2
    if kind == "general":
        return n * n
    raise ValueError(f"unknown kind {kind!r}")


def _flat_coords(kind: str, n: int) -> list:
    """Matrix positions backing each flat coordinate, in canonical order."""
    if kind == "diagonal":
        return [(i, i) for i in range(n)]
    if kind == "symmetric":
        return [(i, j) for i in range(n) for j in range(i, n)]
    if kind == "general":
        return [(i, j) for i in range(n) for j in range(n)]
    raise ValueError(f"unknown kind {kind!r}")


def _flatten(kind: str, n: int, mat) -> list:
    return [mat[i][j] for i, j in _flat_coords(kind, n)]


def _unflatten(kind: str, n: int, vec) -> list:
    mat = [[Fraction(0)] * n for _ in range(n)]
    for x, (i, j) in zip(vec, _flat_coords(kind, n)):
        mat[i][j] = Fraction(x)
        if kind == "symmetric" and i != j:
            mat[j][i] = Fraction(x)
    return mat


def _check_kind_shape(kind: str, n: int, mat) -> None:
    for i in range(n):
        for j in range(n):
            if kind == "diagonal" and i != j and mat[i][j] != 0:
                raise ValueError("diagonal-kind basis matrix has an off-diagonal entry")
            if kind == "symmetric" and mat[i][j] != mat[j][i]:
                raise ValueError("symmetric-kind basis matrix is not symmetric")


# ---------------------------------------------------------------------------
# the space itself


class MatrixSpace:
    """Span of rational n x n matrices of a fixed kind.

    The stored basis is the canonical RREF of the input span, so two spaces
    are equal iff their stored bases are equal.  A zero-dimensional space
    (empty basis) is allowed; it arises as the orthogonal complement of a
    full ambient space.
    """

    def __init__(self, kind: str, n: int, basis: Sequence, label: str = ""):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        if n < 1:
            raise ValueError("matrix side must be >= 1")
        mats = []
        for m in basis:
            rows = [[Fraction(x) for x in row] for row in m]
            if len(rows) != n or any(len(r) != n for r in rows):
                raise ValueError("basis matrix has wrong shape")
            _check_kind_shape(kind, n, rows)
            mats.append(rows)
        flat = [_flatten(kind, n, m) for m in mats]
        reduced, pivots = exactla.rref(flat)
        if len(pivots) != len(mats):
            raise ValueError("basis matrices are linearly dependent")
        self.kind = kind
        self.n = n
        self.basis = [_unflatten(kind, n, row) for row in reduced]
        self.label = label or f"{kind}-space(n={n},dim={len(self.basis)})"

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return ambient_dimension(self.kind, self.n)

    def flat_basis(self) -> list:
        return [_flatten(self.kind, self.n, m) for m in self.basis]

    def basis_arrays(self) -> np.ndarray:
        """Basis as a float array of shape (dim, n, n)."""
        out = np.zeros((self.dim, self.n, self.n))
        for k, m in enumerate(self.basis):
            for i in range(self.n):
                for j in range(self.n):
                    out[k, i, j] = float(m[i][j])
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixSpace):
            return NotImplemented
        return (self.kind, self.n, self.basis) == (other.kind, other.n, other.basis)

    def __repr__(self) -> str:
        return f"MatrixSpace({self.label}, kind={self.kind}, n={self.n}, dim={self.dim})"

    def to_json_obj(self) -> list:
        """Row-major rational dump, one matrix per basis element."""
        return [[[str(x) for x in row] for row in m] for m in self.basis]


# ---------------------------------------------------------------------------
# constructions


def space_from_graph_incidence(g: Graph) -> MatrixSpace:
    """Span of the signed vertex incidence vectors, as diagonal matrices.

    Coordinates are indexed by edges; the vector of a vertex v has +1 on
    edges leaving v, -1 on edges entering v.  For a connected graph the span
    has dimension |V| - 1 (the vertex vectors sum to zero).
    """
    if not g.is_connected():
        raise ValueError("graph must be connected")
    nedges = len(g.edges)
    if nedges == 0:
        raise ValueError("graph must have at least one edge")
    vectors = []
    for v in range(g.nvertices):
        vec = [Fraction(0)] * nedges
        for idx, (a, b) in enumerate(g.edges):
            if a == v:
                vec[idx] += 1
            if b == v:
                vec[idx] -= 1
        vectors.append(vec)
    reduced, _ = exactla.rref(vectors)
    basis = []
    for row in reduced:
        mat = [[Fraction(0)] * nedges for _ in range(nedges)]
        for e, x in enumerate(row):
            mat[e][e] = x
        basis.append(mat)
    return MatrixSpace("diagonal", nedges, basis,
                       label=f"incidence({g.name or f'{g.nvertices}v{nedges}e'})")


def space_from_graphical_model(g: Graph) -> MatrixSpace:
    """Symmetric matrices with free diagonal and off-diagonal support on edges."""
    n = g.nvertices
    basis = []
    for i in range(n):
        m = [[Fraction(0)] * n for _ in range(n)]
        m[i][i] = Fraction(1)
        basis.append(m)
    for a, b in sorted(g.simple_edges()):
        m = [[Fraction(0)] * n for _ in range(n)]
        m[a][b] = Fraction(1)
        m[b][a] = Fraction(1)
        basis.append(m)
    return MatrixSpace("symmetric", n, basis,
                       label=f"graphical({g.name or f'{n}v{len(g.simple_edges())}e'})")


def random_space(kind: str, n: int, dim: int, seed: int) -> MatrixSpace:
    """Seeded random space with small integer basis entries.

    Independence is enforced by redrawing (up to 5 attempts); a fixed seed
    reproduces the basis bit for bit.
    """
    ambient = ambient_dimension(kind, n)
    if not 1 <= dim <= ambient:
        raise ValueError(f"dim must be in [1, {ambient}] for kind={kind}, n={n}")
    rng = rng_from(seed, TAG_SPACE)
    for _ in range(5):
        flat = rng.integers(-9, 10, size=(dim, ambient))
        if exactla.rank(flat.tolist()) == dim:
            basis = [_unflatten(kind, n, row.tolist()) for row in flat]
            return MatrixSpace(kind, n, basis,
                               label=f"random-{kind}(n={n},dim={dim},seed={seed})")
    raise DegenerateInputError("failed to draw an independent basis in 5 attempts")


def space_of_quadrics_through_points(n: int, points: Sequence[Sequence]) -> MatrixSpace:
    """Symmetric matrices M with P^t M P = 0 for every given point.

    Each point imposes one linear condition on the flat coordinates; the
    points must be in general position (every condition drops the dimension
    by exactly one), otherwise DegenerateInputError is raised.
    """
    coords = _flat_coords("symmetric", n)
    rows: List[list] = []
    for p in points:
        p = [Fraction(x) for x in p]
        if len(p) != n:
            raise ValueError(f"point {p} has length != n={n}")
        row = []
        for i, j in coords:
            row.append(p[i] * p[j] if i == j else 2 * p[i] * p[j])
        rows.append(row)
        if exactla.rank(rows) != len(rows):
            raise DegenerateInputError(
                f"point conditions are dependent after {len(rows)} points")
    kernel = exactla.nullspace(rows, ncols=len(coords))
    if not kernel:
        raise DegenerateInputError("no quadric passes through all given points")
    basis = [_unflatten("symmetric", n, vec) for vec in kernel]
    return MatrixSpace("symmetric", n, basis,
                       label=f"quadrics-through-{len(rows)}-points(n={n})")


def orthogonal_complement(s: MatrixSpace) -> MatrixSpace:
    """Complement within the ambient space of the same kind under tr(AB).

    In flat coordinates the pairing carries a factor 2 on symmetric
    off-diagonal slots and couples (i,j) with (j,i) in the general kind.
    """
    coords = _flat_coords(s.kind, s.n)
    rows = []
    for m in s.basis:
        row = []
        for i, j in coords:
            if s.kind == "general":
                row.append(m[j][i])
            elif s.kind == "symmetric" and i != j:
                row.append(2 * m[i][j])
            else:
                row.append(m[i][j])
        rows.append(row)
    kernel = exactla.nullspace(rows, ncols=len(coords))
    basis = [_unflatten(s.kind, s.n, vec) for vec in kernel]
    return MatrixSpace(s.kind, s.n, basis, label=f"complement({s.label})")


def generic_element(s: MatrixSpace) -> SymbolicMatrix:
    """The matrix sum_j x_j B_j over the exact domain, nvars = dim(s)."""
    dim = s.dim
    if dim == 0:
        raise ValueError("zero-dimensional space has no generic element")
    n = s.n
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            terms = {}
            for k, b in enumerate(s.basis):
                if b[i][j] != 0:
                    e = [0] * dim
                    e[k] = 1
                    terms[tuple(e)] = b[i][j]
            row.append(SparsePoly(terms, dim, EXACT))
        entries.append(row)
    return SymbolicMatrix(entries)
