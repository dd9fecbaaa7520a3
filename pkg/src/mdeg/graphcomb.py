"""Chromatic polynomials, matroid characteristic polynomials, and the
combinatorial fast path for multidegrees of graph incidence spaces.

For the span of signed vertex incidence vectors of a connected graph, the
multidegree of the coordinate-inversion graph can be read off with no
numerics at all: it is the list of absolute coefficients of the reduced
chromatic polynomial divided by its root at zero.  This module provides that
fast path, the deletion-contraction engine behind it, and a Whitney-sum
characteristic polynomial for matroids represented by diagonal spaces, which
serves as an independent oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

from . import exactla
from .matspace import Graph, MatrixSpace
from .multidegree import RESTRICTED_GRADIENT, MultidegreeSequence

Edge = Tuple[int, int]


@dataclass(frozen=True)
class IntPolynomial:
    """Univariate polynomial with exact integer coefficients, index = degree.

    The zero polynomial is the empty tuple; otherwise the leading
    coefficient is nonzero.
    """

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, k: int) -> int:
        total = 0
        for c in reversed(self.coeffs):
            total = total * k + c
        return total

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPolynomial(tuple((a[i] if i < len(a) else 0)
                                   + (b[i] if i < len(b) else 0) for i in range(n)))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPolynomial(tuple((a[i] if i < len(a) else 0)
                                   - (b[i] if i < len(b) else 0) for i in range(n)))

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def deflate_root_one(self) -> "IntPolynomial":
        """Exact division by (k - 1); raises if 1 is not a root."""
        if self(1) != 0:
            raise ArithmeticError("1 is not a root")
        out = [0] * (len(self.coeffs) - 1)
        carry = 0
        for i in range(len(self.coeffs) - 1, 0, -1):
            carry += self.coeffs[i]
            out[i - 1] = carry
        return IntPolynomial(tuple(out))

    def shift_down(self) -> "IntPolynomial":
        """Exact division by k; raises if the constant term is nonzero."""
        if self.coeffs and self.coeffs[0] != 0:
            raise ArithmeticError("constant term is nonzero")
        return IntPolynomial(self.coeffs[1:])

    @staticmethod
    def monomial(degree: int, coeff: int = 1) -> "IntPolynomial":
        return IntPolynomial((0,) * degree + (coeff,))

    def __repr__(self) -> str:
        if self.is_zero():
            return "IntPolynomial(0)"
        bits = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c:
                bits.append(f"{c}*k^{i}" if i else str(c))
        return "IntPolynomial(" + " + ".join(bits) + ")"


# ---------------------------------------------------------------------------
# deletion-contraction


def _simplify(edges) -> FrozenSet[Edge]:
    """Collapse parallel edges; a simple graph is chromatically equivalent."""
    return frozenset((min(a, b), max(a, b)) for a, b in edges)


def _canonical_key(nv: int, edges: FrozenSet[Edge]):
    # degree-refined relabeling; two graphs getting the same key are
    # isomorphic (the key is a relabeled copy), so memo hits are always safe
    color = {v: 0 for v in range(nv)}
    adj: Dict[int, List[int]] = {v: [] for v in range(nv)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for v in range(nv):
        color[v] = len(adj[v])
    for _ in range(2):
        pattern = {v: (color[v], tuple(sorted(color[u] for u in adj[v])))
                   for v in range(nv)}
        ranking = {p: r for r, p in enumerate(sorted(set(pattern.values())))}
        color = {v: ranking[pattern[v]] for v in range(nv)}
    order = sorted(range(nv), key=lambda v: (color[v], v))
    relabel = {v: i for i, v in enumerate(order)}
    mapped = frozenset((min(relabel[a], relabel[b]), max(relabel[a], relabel[b]))
                       for a, b in edges)
    return (nv, mapped)


def _pick_edge(nv: int, edges: FrozenSet[Edge]) -> Edge:
    deg: Dict[int, int] = {}
    for a, b in edges:
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
    return max(edges, key=lambda e: (max(deg[e[0]], deg[e[1]]),
                                     deg[e[0]] + deg[e[1]], e))


def _contract(nv: int, edges: FrozenSet[Edge], e: Edge):
    """Merge the higher endpoint into the lower; returns (nv-1, edges) or
    None when the contraction creates a loop."""
    u, v = e
    out = set()
    for a, b in edges:
        if (a, b) == e:
            continue
        a2 = u if a == v else a
        b2 = u if b == v else b
        if a2 == b2:
            return None
        a2 = a2 if a2 < v else a2 - 1
        b2 = b2 if b2 < v else b2 - 1
        out.add((min(a2, b2), max(a2, b2)))
    return nv - 1, frozenset(out)


def _chromatic_rec(nv: int, edges: FrozenSet[Edge], memo: dict) -> IntPolynomial:
    if not edges:
        return IntPolynomial.monomial(nv)
    key = _canonical_key(nv, edges)
    cached = memo.get(key)
    if cached is not None:
        return cached
    e = _pick_edge(nv, edges)
    deleted = _chromatic_rec(nv, edges - {e}, memo)
    contraction = _contract(nv, edges, e)
    if contraction is None:
        contracted = IntPolynomial(())
    else:
        contracted = _chromatic_rec(contraction[0], contraction[1], memo)
    result = deleted - contracted
    memo[key] = result
    return result


def chromatic(g: Graph) -> IntPolynomial:
    """Number of proper vertex colorings with k colors, as a polynomial.

    Deletion-contraction with memoization on degree-refined canonical forms;
    parallel edges collapse up front.
    """
    return _chromatic_rec(g.nvertices, _simplify(g.edges), {})


def reduced_chromatic(g: Graph) -> IntPolynomial:
    """chromatic(g) / (k - 1), exact; requires at least one edge."""
    if not g.edges:
        raise ValueError("reduced chromatic polynomial needs at least one edge")
    return chromatic(g).deflate_root_one()


def multidegree_via_huh(g: Graph) -> MultidegreeSequence:
    """Multidegree of the incidence-space inversion graph, read off from the
    reduced chromatic polynomial with no numerics.

    The entries are the absolute coefficients of reduced_chromatic(g) / k,
    top degree first (so the leading entry is 1); the sign pattern is
    checked before taking absolute values, so nothing is lost.
    """
    if not g.is_connected():
        raise ValueError("graph must be connected")
    base = reduced_chromatic(g).shift_down()
    coeffs = base.coeffs
    D = len(coeffs) - 1
    entries = []
    for i in range(D + 1):
        c = coeffs[D - i]
        if c != 0 and (c > 0) != (i % 2 == 0):
            raise AssertionError("chromatic coefficients lost the alternating sign pattern")
        entries.append(abs(c))
    return MultidegreeSequence(
        entries=tuple(entries),
        map_tag=RESTRICTED_GRADIENT,
        label=f"incidence({g.name or f'{g.nvertices}v{len(g.edges)}e'})",
        engine="chromatic",
    )


# ---------------------------------------------------------------------------
# represented matroids


def matroid_characteristic(s: MatrixSpace) -> IntPolynomial:
    """Characteristic polynomial of the matroid represented by the coordinate
    functionals on a diagonal space, by the Whitney subset sum.

    Exponential in the ambient dimension by design (it is the oracle, not
    the fast path); guarded at 20 ground-set elements.
    """
    if s.kind != "diagonal":
        raise ValueError("matroid characteristic needs a diagonal space")
    n = s.n
    if n > 20:
        raise ValueError("ground set too large (limit 20)")
    vectors = [[b[e][e] for b in s.basis] for e in range(n)]
    full_rank = exactla.rank(vectors)
    coeffs = [0] * (full_rank + 1)
    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            r = exactla.rank([vectors[e] for e in subset]) if subset else 0
            coeffs[full_rank - r] += (-1) ** size
    return IntPolynomial(tuple(coeffs))


# ---------------------------------------------------------------------------
# small-graph corpus


def connected_graph_corpus(max_vertices: int, max_edges: int) -> List[Graph]:
    """All connected simple graphs with >= 1 edge, up to isomorphism.

    Brute-force canonicalization (minimum over vertex permutations), fine
    for max_vertices <= 6.  Deterministic order: by vertex count, edge
    count, then canonical edge set.
    """
    if max_vertices > 6:
        raise ValueError("corpus enumeration is brute force; keep max_vertices <= 6")
    found = {}
    for nv in range(2, max_vertices + 1):
        all_edges = [(i, j) for i in range(nv) for j in range(i + 1, nv)]
        perms = list(itertools.permutations(range(nv)))
        for size in range(nv - 1, min(len(all_edges), max_edges) + 1):
            for subset in itertools.combinations(all_edges, size):
                g = Graph(nv, subset)
                if not g.is_connected():
                    continue
                canon = min(
                    tuple(sorted((min(p[a], p[b]), max(p[a], p[b])) for a, b in subset))
                    for p in perms
                )
                key = (nv, canon)
                if key not in found:
                    found[key] = Graph(nv, canon, name=f"G{nv}v{size}e#{len(found)}")
    return [found[k] for k in sorted(found, key=lambda k: (k[0], len(k[1]), k[1]))]
