"""Exact polynomial arithmetic, determinants, adjugates, gradients."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdeg.polyring import (
    EXACT,
    FLOAT,
    SparsePoly,
    SymbolicMatrix,
    adjugate,
    det,
    exact_div,
    gradient,
    laplace_det,
    variables,
)


def poly_from_str_terms(terms, nvars):
    return SparsePoly(terms, nvars, EXACT)


def random_linear_form(rng, nvars):
    terms = {}
    for v in range(nvars):
        c = int(rng.integers(-5, 6))
        if c:
            e = [0] * nvars
            e[v] = 1
            terms[tuple(e)] = Fraction(c)
    return SparsePoly(terms, nvars, EXACT)


def random_symbolic(rng, n, nvars, symmetric=False):
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i if symmetric else 0, n):
            p = random_linear_form(rng, nvars)
            rows[i][j] = p
            if symmetric:
                rows[j][i] = p
    if symmetric:
        for i in range(n):
            rows[i][i] = random_linear_form(rng, nvars)
            for j in range(i + 1, n):
                rows[j][i] = rows[i][j]
    return SymbolicMatrix(rows)


# ---------------------------------------------------------------------------
# determinant


def test_det_1x1_identity_case():
    x = SparsePoly.variable(0, 1)
    assert det(SymbolicMatrix([[x]])) == x


def test_det_4x4_diagonal_is_product_of_linear_forms():
    x, y, z, t = variables(4)
    zero = SparsePoly.zero(4)
    m = SymbolicMatrix([
        [x, zero, zero, zero],
        [zero, y, zero, zero],
        [zero, zero, z, zero],
        [zero, zero, zero, t],
    ])
    assert det(m) == x * y * z * t


def test_det_matches_laplace_oracle_on_random_instances():
    rng = np.random.default_rng(20240501)
    checked = 0
    for n in (2, 3, 4, 5):
        for _ in range(13):
            m = random_symbolic(rng, n, nvars=n, symmetric=(checked % 2 == 0))
            assert det(m) == laplace_det(m.entries)
            checked += 1
    assert checked >= 50


def test_det_singular_symbolic_matrix_is_zero():
    x, y = variables(2)
    m = SymbolicMatrix([[x, x], [y, y]])
    assert det(m).is_zero()


# ---------------------------------------------------------------------------
# adjugate


def test_adjugate_2x2_textbook():
    a, b, c, d = variables(4)
    m = SymbolicMatrix([[a, b], [c, d]])
    adj = adjugate(m)
    assert adj[0][0] == d
    assert adj[0][1] == -b
    assert adj[1][0] == -c
    assert adj[1][1] == a


def test_adjugate_4x4_diagonal_gives_complementary_products():
    x, y, z, t = variables(4)
    zero = SparsePoly.zero(4)
    m = SymbolicMatrix([
        [x, zero, zero, zero],
        [zero, y, zero, zero],
        [zero, zero, z, zero],
        [zero, zero, zero, t],
    ])
    adj = adjugate(m)
    assert adj[0][0] == y * z * t
    assert adj[1][1] == x * z * t
    assert adj[2][2] == x * y * t
    assert adj[3][3] == x * y * z
    for i in range(4):
        for j in range(4):
            if i != j:
                assert adj[i][j].is_zero()


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cramer_identity_exact(n):
    rng = np.random.default_rng(900 + n)
    m = random_symbolic(rng, n, nvars=3)
    adj = adjugate(m)
    d = det(m)
    for i in range(n):
        for j in range(n):
            entry = SparsePoly.zero(3)
            for k in range(n):
                entry = entry + m.entries[i][k] * adj[k][j]
            expected = d if i == j else SparsePoly.zero(3)
            assert entry == expected


def test_adjugate_requires_n_at_least_2():
    x = SparsePoly.variable(0, 1)
    with pytest.raises(ValueError):
        adjugate(SymbolicMatrix([[x]]))


# ---------------------------------------------------------------------------
# gradient


def test_gradient_of_quadric_by_hand():
    x, y, z, t = variables(4)
    f = x * y - z * t
    g = gradient(f)
    assert g == [y, x, -t, -z]


def test_gradient_of_product_of_variables():
    x, y, z, t = variables(4)
    f = x * y * z * t
    g = gradient(f)
    assert g == [y * z * t, x * z * t, x * y * t, x * y * z]


def test_gradient_matches_central_finite_differences():
    rng = np.random.default_rng(77)
    m = random_symbolic(rng, 3, nvars=4)
    f = det(m).to_float()
    grads = [g.to_float() for g in gradient(det(m))]
    point = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    step = 1e-5
    for v in range(4):
        shifted = point.copy()
        shifted[v] += step
        shifted_m = point.copy()
        shifted_m[v] -= step
        fd = (f.evaluate(shifted) - f.evaluate(shifted_m)) / (2 * step)
        exact = grads[v].evaluate(point)
        assert abs(fd - exact) / max(1.0, abs(exact)) < 1e-6


def test_gradient_of_det_equals_adjugate_trace_form():
    # d det / d c  =  sum_ij adj[j][i] * d m[i][j] / d c, exactly
    rng = np.random.default_rng(4242)
    for symmetric in (False, True):
        m = random_symbolic(rng, 3, nvars=4, symmetric=symmetric)
        d = det(m)
        adj = adjugate(m)
        for c in range(4):
            total = SparsePoly.zero(4)
            for i in range(3):
                for j in range(3):
                    total = total + adj[j][i] * m.entries[i][j].derivative(c)
            assert d.derivative(c) == total


# ---------------------------------------------------------------------------
# evaluation


def test_evaluate_symmetric_point_kills_quadric():
    x, y, z, t = variables(4)
    f = x * y - z * t
    assert f.evaluate([1, 1, 1, 1]) == 0


def test_evaluate_product():
    x, y, z, t = variables(4)
    f = x * y * z * t
    assert f.evaluate([1, 2, 3, 4]) == 24


def naive_sum_evaluate(poly, point):
    total = 0j
    for e, c in poly.terms.items():
        term = complex(c)
        for v, k in enumerate(e):
            term *= complex(point[v]) ** k
        total += term
    return total


def test_evaluate_matches_naive_summation():
    rng = np.random.default_rng(31)
    for _ in range(25):
        nvars = int(rng.integers(1, 5))
        terms = {}
        for _ in range(rng.integers(1, 12)):
            e = tuple(int(v) for v in rng.integers(0, 4, nvars))
            terms[e] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))
        f = SparsePoly(terms, nvars, EXACT).to_float()
        point = rng.standard_normal(nvars) + 1j * rng.standard_normal(nvars)
        a = f.evaluate(point)
        b = naive_sum_evaluate(f, point)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(b))


def test_evaluation_commutes_with_multiplication():
    rng = np.random.default_rng(55)
    for _ in range(20):
        nvars = 3
        def draw():
            terms = {}
            for _ in range(rng.integers(1, 8)):
                e = tuple(int(v) for v in rng.integers(0, 3, nvars))
                terms[e] = complex(rng.standard_normal(), rng.standard_normal())
            return SparsePoly(terms, nvars, FLOAT)
        f, g = draw(), draw()
        point = rng.standard_normal(nvars) + 1j * rng.standard_normal(nvars)
        lhs = (f * g).evaluate(point)
        rhs = f.evaluate(point) * g.evaluate(point)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_evaluate_rejects_wrong_point_length():
    f = SparsePoly.variable(0, 2)
    with pytest.raises(ValueError):
        f.evaluate([1.0])


# ---------------------------------------------------------------------------
# domain conversion


def test_to_float_simple_coefficient():
    f = SparsePoly({(2,): Fraction(3, 2)}, 1)
    g = f.to_float()
    assert g.domain == FLOAT
    assert g.terms[(2,)] == 1.5


def test_to_float_zero_polynomial():
    assert SparsePoly.zero(3).to_float().is_zero()


def test_to_float_overflow_signals():
    f = SparsePoly({(1,): Fraction(10) ** 400}, 1)
    with pytest.raises(OverflowError):
        f.to_float()


def test_normalize_prunes_only_on_request():
    f = SparsePoly({(1,): 1e-30, (2,): 1.0}, 1, FLOAT)
    assert (1,) in f.terms  # tiny coefficients survive construction
    g = f.normalize(1e-12)
    assert (1,) not in g.terms
    assert g.terms[(2,)] == 1.0


# ---------------------------------------------------------------------------
# ring axioms (random triples, exact domain)


coeffs = st.integers(min_value=-20, max_value=20)


@st.composite
def exact_polys(draw, nvars=3):
    nterms = draw(st.integers(min_value=0, max_value=6))
    terms = {}
    for _ in range(nterms):
        e = tuple(draw(st.integers(min_value=0, max_value=3)) for _ in range(nvars))
        terms[e] = Fraction(draw(coeffs), draw(st.integers(min_value=1, max_value=9)))
    return SparsePoly(terms, nvars, EXACT)


@given(exact_polys(), exact_polys())
@settings(max_examples=60, deadline=None)
def test_addition_and_multiplication_commute(f, g):
    assert f + g == g + f
    assert f * g == g * f


@given(exact_polys(), exact_polys(), exact_polys())
@settings(max_examples=60, deadline=None)
def test_associativity_and_distributivity(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@given(exact_polys(), exact_polys())
@settings(max_examples=40, deadline=None)
def test_exact_division_inverts_multiplication(f, g):
    if g.is_zero():
        return
    assert exact_div(f * g, g) == f


# ---------------------------------------------------------------------------
# canonical text form


def test_canonical_str_golden():
    x, y = variables(2)
    f = x * x + y.scale(Fraction(-3, 2)) + SparsePoly.constant(2, 2)
    assert f.canonical_str() == "1*x0^2 + -3/2*x1^1 + 2"


def test_canonical_str_zero():
    assert SparsePoly.zero(2).canonical_str() == "0"


def test_canonical_str_is_deterministic_under_construction_order():
    a = SparsePoly({(1, 0): 1, (0, 1): 2}, 2)
    b = SparsePoly({(0, 1): 2, (1, 0): 1}, 2)
    assert a.canonical_str() == b.canonical_str()
