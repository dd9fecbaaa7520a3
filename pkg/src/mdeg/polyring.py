"""Sparse multivariate polynomial arithmetic over two coefficient domains.

A polynomial is a mapping from dense exponent tuples (one slot per variable)
to coefficients.  Two domains are supported:

  * ``"exact"``  - Fraction coefficients; all symbolic construction happens
    here and every identity is checked exactly.
  * ``"float"``  - complex double coefficients; only the path tracker
    consumes these.

Values are immutable after construction and safe to share between threads.
Term order is graded lexicographic with the fixed global variable order
x0, x1, ..., so printing and hashing are deterministic.

The module also provides the symbolic matrix layer: determinants of matrices
with linear entries (fraction-free Bareiss elimination, with a plain Laplace
expansion kept as an independent oracle), adjugates, and gradients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

EXACT = "exact"
FLOAT = "float"

ExactCoeff = Union[int, Fraction]
Coeff = Union[int, float, complex, Fraction]


def _grlex_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


class SparsePoly:
    """Immutable sparse polynomial with a fixed variable count and domain."""

    __slots__ = ("terms", "nvars", "domain")

    def __init__(self, terms: Mapping[tuple, Coeff], nvars: int, domain: str = EXACT):
        if domain not in (EXACT, FLOAT):
            raise ValueError(f"unknown domain {domain!r}")
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent tuple {exps} has length != nvars={nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = Fraction(coeff) if domain == EXACT else complex(coeff)
            if c == 0:
                continue
            clean[exps] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, *args):
        raise AttributeError("SparsePoly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, domain: str = EXACT) -> "SparsePoly":
        return cls({}, nvars, domain)

    @classmethod
    def constant(cls, value: Coeff, nvars: int, domain: str = EXACT) -> "SparsePoly":
        return cls({(0,) * nvars: value}, nvars, domain)

    @classmethod
    def variable(cls, index: int, nvars: int, domain: str = EXACT) -> "SparsePoly":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for nvars={nvars}")
        exps = [0] * nvars
        exps[index] = 1
        return cls({tuple(exps): 1}, nvars, domain)

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Maximum term degree; 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return (self.nvars, self.domain, self.terms) == (other.nvars, other.domain, other.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic ----------------------------------------------------

    def _check_compatible(self, other: "SparsePoly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        if self.domain != other.domain:
            raise ValueError(f"domain mismatch: {self.domain} vs {other.domain}")

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._check_compatible(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return SparsePoly(out, self.nvars, self.domain)

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return NotImplemented
        self._check_compatible(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) - c
        return SparsePoly(out, self.nvars, self.domain)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly({e: -c for e, c in self.terms.items()}, self.nvars, self.domain)

    def __mul__(self, other) -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check_compatible(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return SparsePoly(out, self.nvars, self.domain)

    def __rmul__(self, other) -> "SparsePoly":
        return self.scale(other)

    def scale(self, c: Coeff) -> "SparsePoly":
        c = Fraction(c) if self.domain == EXACT else complex(c)
        return SparsePoly({e: c * v for e, v in self.terms.items()}, self.nvars, self.domain)

    def __pow__(self, k: int) -> "SparsePoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = SparsePoly.constant(1, self.nvars, self.domain)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus and evaluation ----------------------------------------

    def derivative(self, var: int) -> "SparsePoly":
        if not 0 <= var < self.nvars:
            raise ValueError(f"variable index {var} out of range")
        out = {}
        for e, c in self.terms.items():
            if e[var] == 0:
                continue
            ee = list(e)
            ee[var] -= 1
            out[tuple(ee)] = c * e[var]
        return SparsePoly(out, self.nvars, self.domain)

    def evaluate(self, point: Sequence[complex]) -> complex:
        """Evaluate at a complex point, iterating terms in canonical order.

        Per-variable powers are cached so repeated exponents cost one multiply.
        """
        if len(point) != self.nvars:
            raise ValueError(f"point length {len(point)} != nvars {self.nvars}")
        cache: dict = {}

        def power(v: int, k: int) -> complex:
            key = (v, k)
            if key not in cache:
                if k == 1:
                    cache[key] = complex(point[v])
                else:
                    cache[key] = power(v, k - 1) * complex(point[v])
            return cache[key]

        total = 0j
        for e in sorted(self.terms, key=_grlex_key, reverse=True):
            val = complex(self.terms[e])
            for v, ev in enumerate(e):
                if ev:
                    val *= power(v, ev)
            total += val
        return total

    # -- domain conversion ----------------------------------------------

    def to_float(self) -> "SparsePoly":
        """Convert exact coefficients to complex doubles.

        Raises OverflowError when a coefficient does not fit in a double.
        """
        if self.domain != EXACT:
            raise ValueError("to_float expects an exact-domain polynomial")
        out = {}
        for e, c in self.terms.items():
            out[e] = complex(float(c))  # float() raises OverflowError on huge Fractions
        return SparsePoly(out, self.nvars, FLOAT)

    def normalize(self, eps: float) -> "SparsePoly":
        """Drop float-domain terms with |coefficient| < eps.

        Pruning never happens implicitly; this is the only place float
        coefficients are discarded.
        """
        if self.domain != FLOAT:
            raise ValueError("normalize applies to the float domain")
        return SparsePoly({e: c for e, c in self.terms.items() if abs(c) >= eps},
                          self.nvars, FLOAT)

    def pad_vars(self, new_nvars: int) -> "SparsePoly":
        """Reinterpret in a larger ring; new variables are appended at the end."""
        if new_nvars < self.nvars:
            raise ValueError("cannot shrink the variable count")
        extra = (0,) * (new_nvars - self.nvars)
        return SparsePoly({e + extra: c for e, c in self.terms.items()}, new_nvars, self.domain)

    # -- canonical text form ----------------------------------------------

    def canonical_str(self) -> str:
        """Deterministic text form: terms in descending graded-lex order,
        each printed ``coef*x0^e0*...`` with rationals as ``p/q``."""
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[e]
            coef = str(c) if self.domain == EXACT else format(c, "")
            factors = [coef] + [f"x{v}^{k}" for v, k in enumerate(e) if k]
            bits.append("*".join(factors))
        return " + ".join(bits)

    def __repr__(self) -> str:
        return f"SparsePoly({self.canonical_str()})"


def variables(nvars: int, domain: str = EXACT) -> list:
    """The list [x0, ..., x_{nvars-1}] as polynomials."""
    return [SparsePoly.variable(i, nvars, domain) for i in range(nvars)]


def exact_div(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """Exact polynomial division f / g over the exact domain.

    Cancels leading terms in graded-lex order; raises ArithmeticError if the
    division is not exact.  Used by the Bareiss determinant, where exactness
    is guaranteed by Sylvester's identity.
    """
    if f.domain != EXACT or g.domain != EXACT:
        raise ValueError("exact_div requires exact-domain polynomials")
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return SparsePoly.zero(f.nvars, EXACT)
    f._check_compatible(g)
    glead = max(g.terms, key=_grlex_key)
    gc = g.terms[glead]
    quotient: dict = {}
    rem = dict(f.terms)
    while rem:
        rlead = max(rem, key=_grlex_key)
        diff = tuple(a - b for a, b in zip(rlead, glead))
        if any(d < 0 for d in diff):
            raise ArithmeticError("polynomial division is not exact")
        c = rem[rlead] / gc
        quotient[diff] = quotient.get(diff, 0) + c
        for e, ge in g.terms.items():
            ee = tuple(a + b for a, b in zip(diff, e))
            nc = rem.get(ee, Fraction(0)) - c * ge
            if nc == 0:
                rem.pop(ee, None)
            else:
                rem[ee] = nc
    return SparsePoly(quotient, f.nvars, EXACT)


class SymbolicMatrix:
    """Square matrix whose entries are polynomials of total degree <= 1.

    This is the shape produced by taking a generic element of a linear
    matrix space: every entry is a homogeneous linear form in the space
    coordinates (or zero).
    """

    __slots__ = ("n", "entries", "nvars", "domain")

    def __init__(self, entries: Sequence[Sequence[SparsePoly]]):
        n = len(entries)
        if n < 1:
            raise ValueError("matrix must be at least 1x1")
        rows = [list(row) for row in entries]
        for row in rows:
            if len(row) != n:
                raise ValueError("matrix must be square")
        first = rows[0][0]
        for row in rows:
            for p in row:
                if not isinstance(p, SparsePoly):
                    raise TypeError("entries must be SparsePoly")
                if p.nvars != first.nvars or p.domain != first.domain:
                    raise ValueError("entries must share nvars and domain")
                if p.total_degree() > 1:
                    raise ValueError("entries must have total degree <= 1")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "nvars", first.nvars)
        object.__setattr__(self, "domain", first.domain)

    def __setattr__(self, *args):
        raise AttributeError("SymbolicMatrix is immutable")

    def entry(self, i: int, j: int) -> SparsePoly:
        return self.entries[i][j]

    def __repr__(self) -> str:
        rows = "; ".join("[" + ", ".join(p.canonical_str() for p in row) + "]"
                         for row in self.entries)
        return f"SymbolicMatrix({rows})"


def _det_rows(rows: list) -> SparsePoly:
    """Fraction-free Bareiss elimination on a list-of-lists of SparsePoly."""
    n = len(rows)
    a = [list(r) for r in rows]
    nvars = a[0][0].nvars
    if n == 1:
        return a[0][0]
    sign = 1
    prev = SparsePoly.constant(1, nvars, EXACT)
    for k in range(n - 1):
        pivot_row = next((r for r in range(k, n) if not a[r][k].is_zero()), None)
        if pivot_row is None:
            return SparsePoly.zero(nvars, EXACT)
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = exact_div(num, prev)
        prev = a[k][k]
    result = a[n - 1][n - 1]
    return -result if sign < 0 else result


def det(m: SymbolicMatrix) -> SparsePoly:
    """Determinant of a matrix of linear forms, exact domain.

    Bareiss elimination keeps every intermediate entry a true polynomial, so
    coefficient swell stays controlled for the sizes used here (n <= 6 in
    practice; larger inputs work but slow down).
    """
    if m.domain != EXACT:
        raise ValueError("det is implemented for the exact domain")
    return _det_rows(m.entries)


def laplace_det(rows: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    """Cofactor expansion along the first row.

    Exponential-time oracle, deliberately independent of the Bareiss route;
    tests compare the two on random instances.
    """
    rows = [list(r) for r in rows]
    n = len(rows)
    nvars = rows[0][0].nvars
    if n == 1:
        return rows[0][0]
    total = SparsePoly.zero(nvars, EXACT)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[rows[i][jj] for jj in range(n) if jj != j] for i in range(1, n)]
        term = rows[0][j] * laplace_det(minor)
        total = total - term if j % 2 else total + term
    return total


def adjugate(m: SymbolicMatrix) -> list:
    """Adjugate as a list-of-lists of polynomials.

    Entry (i, j) is the signed (j, i) cofactor, so m . adj(m) = det(m) . Id
    holds as an exact polynomial identity.  Entries have total degree n - 1.
    """
    n = m.n
    if n < 2:
        raise ValueError("adjugate requires n >= 2")
    if m.domain != EXACT:
        raise ValueError("adjugate is implemented for the exact domain")
    rows = m.entries
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[rows[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            d = _det_rows(minor)
            adj[i][j] = -d if (i + j) % 2 else d
    return adj


def gradient(f: SparsePoly) -> list:
    """All partial derivatives of f, in variable order."""
    return [f.derivative(v) for v in range(f.nvars)]
