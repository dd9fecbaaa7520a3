"""Headline invariants derived from multidegrees.

Euler characteristics of determinantal hypersurface complements (alternating
sums of the gradient-graph multidegree), degrees of generic linear
concentration models and their identification with quadric tangency counts,
closed-form cycle-model formulas, and a maximum likelihood fitter that
solves the score equations of a Gaussian concentration model by homotopy
continuation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import polyring
from .matspace import (
    DegenerateInputError,
    MatrixSpace,
    ambient_dimension,
    generic_element,
    random_space,
    space_of_quadrics_through_points,
)
from .multidegree import (
    GRADIENT_OF_RESTRICTION,
    RESTRICTED_GRADIENT,
    DegenerateSpaceError,
    build_map,
    ml_degree,
    model_degree,
    mu,
    multidegree,
)
from .polyring import FLOAT, SparsePoly
from .seeding import DEFAULT_SEED, TAG_DATA, TAG_MU, TAG_SLICE, TAG_SPACE, TAG_TRACKER, child_seed, rng_from
from .tracker import PolySystem, TrackerConfig, solve

PHI_PATH_BUDGET = 20_000
PHI_PATH_BUDGET_SLOW = 120_000


# ---------------------------------------------------------------------------
# Euler characteristics


def euler_complement(space: MatrixSpace, seed: int = DEFAULT_SEED,
                     cfg: Optional[TrackerConfig] = None) -> int:
    """Euler characteristic of P(L) minus its determinantal hypersurface.

    The alternating sum of the multidegree of the graph of the gradient of
    the restricted determinant.
    """
    spec = build_map(space, GRADIENT_OF_RESTRICTION)
    seq = multidegree(spec, seed=seed, cfg=cfg)
    return seq.alternating_sum()


def euler_hypersurface(space: MatrixSpace, seed: int = DEFAULT_SEED,
                       cfg: Optional[TrackerConfig] = None) -> int:
    """Euler characteristic of the determinantal hypersurface inside P(L),
    by additivity: chi(P^D) = D + 1 splits into hypersurface plus
    complement."""
    D = space.dim - 1
    return (D + 1) - euler_complement(space, seed=seed, cfg=cfg)


def smooth_complement_closed_form(proj_dim: int, hypersurface_degree: int) -> int:
    """chi of the complement of a smooth degree-d hypersurface in P^n,
    (1 - (1 - d)^(n + 1)) / d.  Used as a cross-check on generic slices."""
    n, d = proj_dim, hypersurface_degree
    value = Fraction(1 - (1 - d) ** (n + 1), d)
    if value.denominator != 1:
        raise ArithmeticError("closed form did not evaluate to an integer")
    return int(value)


# ---------------------------------------------------------------------------
# generic concentration models and quadric counts


def phi(n: int, a: int, seed: int = DEFAULT_SEED,
        cfg: Optional[TrackerConfig] = None, slow: bool = False) -> int:
    """Degree (equals ML-degree) of a generic codimension-a linear
    concentration model on symmetric n x n matrices.

    Numerics are guarded to n <= 4; entries whose Bezout path count exceeds
    the budget need slow=True (raises otherwise).  The random space is
    redrawn up to 5 times if a degenerate draw slips through.
    """
    ambient = n * (n + 1) // 2
    if not 0 <= a <= ambient - 1:
        raise ValueError(f"codimension must lie in [0, {ambient - 1}]")
    if n > 4:
        raise ValueError("phi numerics are limited to n <= 4")
    dim = ambient - a
    D = dim - 1
    paths = 3 * (n - 1) ** D * n
    budget = PHI_PATH_BUDGET_SLOW if slow else PHI_PATH_BUDGET
    if paths > budget:
        raise ValueError(
            f"phi({n},{a}) needs {paths} paths, over the budget {budget}"
            + ("" if slow else "; pass slow=True"))
    last_error: Exception | None = None
    for attempt in range(5):
        space = random_space("symmetric", n, dim, seed=child_seed(seed, TAG_SPACE, a, attempt))
        try:
            return model_degree(space, seed=child_seed(seed, TAG_MU, a, attempt), cfg=cfg)
        except DegenerateSpaceError as exc:
            last_error = exc
    raise DegenerateInputError(
        f"failed to draw a usable generic space for phi({n},{a})") from last_error


def quadric_tangency_count(n: int, npoints: int, seed: int = DEFAULT_SEED,
                           cfg: Optional[TrackerConfig] = None) -> int:
    """Number of quadrics through npoints general points tangent to the
    complementary number of general hyperplanes.

    Builds the space of quadrics through random rational points and takes
    its model degree; the result must agree with phi(n, npoints), and the
    agreement is asserted.
    """
    ambient = n * (n + 1) // 2
    ntangencies = ambient - 1 - npoints
    if ntangencies < 0:
        raise ValueError("too many point conditions")
    if n > 3:
        raise ValueError("quadric counts are guarded to n <= 3")
    count = None
    last_error: Exception | None = None
    for attempt in range(5):
        rng = rng_from(seed, TAG_DATA, attempt)
        pts = [[Fraction(int(x)) for x in rng.integers(-9, 10, size=n)]
               for _ in range(npoints)]
        try:
            space = space_of_quadrics_through_points(n, pts)
            count = model_degree(space, seed=child_seed(seed, TAG_MU, attempt), cfg=cfg)
            break
        except (DegenerateInputError, DegenerateSpaceError) as exc:
            last_error = exc
    if count is None:
        raise DegenerateInputError(
            "failed to draw points in general position") from last_error
    expected = phi(n, npoints, seed=seed, cfg=cfg)
    if count != expected:
        raise ArithmeticError(
            f"quadric count {count} disagrees with phi({n},{npoints}) = {expected}")
    return count


# ---------------------------------------------------------------------------
# closed-form cycle model values


def cycle_model_degree_formula(n: int) -> int:
    """Degree of the cycle concentration model: (n+2)/4 * C(2n, n) - 3 * 2^(2n-3).

    Exact rational evaluation; integrality is asserted, a failure would mean
    the formula was transcribed wrong.
    """
    if n < 3:
        raise ValueError("cycle models need n >= 3")
    value = Fraction(n + 2, 4) * math.comb(2 * n, n) - 3 * 2 ** (2 * n - 3)
    if value.denominator != 1:
        raise ArithmeticError(f"cycle model degree formula gave non-integer {value}")
    return int(value)


def cycle_ml_degree_conjecture(n: int) -> int:
    """Conjectured ML-degree of the n-cycle model: (n-3) * 2^(n-2) + 1.

    The value is conjectural, not proven; callers that surface it must label
    it as such (the CLI tags it "conjecture").
    """
    if n < 3:
        raise ValueError("cycle models need n >= 3")
    return (n - 3) * 2 ** (n - 2) + 1


# ---------------------------------------------------------------------------
# maximum likelihood


@dataclass(frozen=True)
class SampleData:
    """Centered observations and their sample covariance (1/k) sum d d^t."""

    n: int
    samples: np.ndarray
    covariance: np.ndarray

    @staticmethod
    def from_samples(samples: Sequence[Sequence[float]]) -> "SampleData":
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2:
            raise ValueError("samples must be a 2d array, one row per observation")
        k, n = arr.shape
        cov = arr.T @ arr / k
        return SampleData(n=n, samples=arr, covariance=cov)

    @staticmethod
    def from_covariance(matrix: Sequence[Sequence[float]]) -> "SampleData":
        cov = np.asarray(matrix, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError("covariance must be square")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        return SampleData(n=cov.shape[0], samples=np.zeros((0, cov.shape[0])),
                          covariance=cov)


@dataclass
class MLEResult:
    """Critical points of the Gaussian log-likelihood over a concentration
    model, with the positive definite maximizer singled out."""

    critical_covariances: List[np.ndarray]
    orthogonality_residuals: List[float]
    maximizer: Optional[np.ndarray]
    maximizer_loglik: Optional[float]
    maximizer_orthogonality: Optional[float]
    maximizer_membership: Optional[float]
    count: int
    expected_count: Optional[int]
    warnings: List[str] = field(default_factory=list)


def _contains_positive_definite(space: MatrixSpace, seed: int) -> bool:
    basis = space.basis_arrays()
    rng = rng_from(seed, TAG_DATA, 99)
    diagish = np.array([float(np.abs(np.diag(b)).sum() > 0) for b in basis])
    for attempt in range(5):
        coeffs = rng.uniform(0.5, 1.5, size=space.dim)
        damp = 4.0 ** (-attempt)
        weights = np.where(diagish > 0, coeffs, coeffs * damp)
        candidate = np.tensordot(weights, basis, axes=1)
        if np.linalg.eigvalsh(candidate).min() > 1e-9:
            return True
    return False


def mle_fit(space: MatrixSpace, data: SampleData,
            cfg: Optional[TrackerConfig] = None, seed: int = DEFAULT_SEED,
            expected_count: Optional[int] = None) -> MLEResult:
    """Solve the score equations of the concentration model over ``space``.

    The fiber system lives in the space coordinates of the concentration
    matrix K: the gradient components u_j = tr(B_j adj K) must be projectively
    proportional to s_j = tr(B_j Shat), giving dim - 1 cross-ratio equations
    of degree n - 1, one random affine patch, and a base-locus exclusion
    equation.  Each projective solution is rescaled so the trace pairing
    matches the sample covariance exactly, recovering the affine critical
    covariance adj(K)/det(K) up to that scaling.
    """
    if space.kind != "symmetric":
        raise ValueError("maximum likelihood fitting needs a symmetric space")
    if data.n != space.n:
        raise ValueError(f"data dimension {data.n} != matrix side {space.n}")
    if not _contains_positive_definite(space, seed):
        raise DegenerateSpaceError(
            "no positive definite matrix found in the space; the model is empty")
    n = space.n
    dim = space.dim
    basis = space.basis_arrays()
    sigma_hat = data.covariance
    s = np.array([float(np.trace(b @ sigma_hat)) for b in basis])
    if np.abs(s).max() < 1e-12:
        raise DegenerateInputError("sample covariance pairs to zero with the space")

    m = generic_element(space)
    detp = polyring.det(m)
    if detp.is_zero():
        raise DegenerateSpaceError("determinant vanishes identically on the space")
    grads = polyring.gradient(detp)
    if any(g.is_zero() for g in grads):
        raise DegenerateSpaceError(
            "a gradient component vanishes identically; the model is degenerate")
    grads_float = [g.to_float() for g in grads]

    j0 = int(np.argmax(np.abs(s)))
    nvars = dim + 1  # K coordinates plus the exclusion variable
    rng = rng_from(seed, TAG_SLICE)
    equations = []
    for j in range(dim):
        if j == j0:
            continue
        eq = (grads_float[j].pad_vars(nvars).scale(complex(s[j0]))
              - grads_float[j0].pad_vars(nvars).scale(complex(s[j])))
        equations.append(eq)
    patch_coeffs = np.sqrt(rng.uniform(0, 1, dim)) * np.exp(1j * rng.uniform(0, 2 * np.pi, dim))
    patch_terms = {}
    for k, c in enumerate(patch_coeffs):
        e = [0] * nvars
        e[k] = 1
        patch_terms[tuple(e)] = c
    patch_terms[(0,) * nvars] = -1.0
    equations.append(SparsePoly(patch_terms, nvars, FLOAT))
    r = np.sqrt(rng.uniform(0, 1, dim)) * np.exp(1j * rng.uniform(0, 2 * np.pi, dim))
    h = SparsePoly.zero(nvars, FLOAT)
    for c, g in zip(r, grads_float):
        h = h + g.pad_vars(nvars).scale(complex(c))
    z = SparsePoly.variable(nvars - 1, nvars, FLOAT)
    equations.append(SparsePoly.constant(1.0, nvars, FLOAT) - z * h)
    system = PolySystem(equations, nvars)

    base = cfg if cfg is not None else TrackerConfig()
    sol = solve(system, replace(base, seed=child_seed(seed, TAG_TRACKER)))

    notes: List[str] = []
    suspects = sum(1 for f in sol.flags if f == "suspect")
    if suspects:
        notes.append(f"{suspects} critical point(s) failed certification and were dropped")

    criticals: List[np.ndarray] = []
    residuals: List[float] = []
    for pt, flag in zip(sol.points, sol.flags):
        if flag != "regular":
            continue
        x = pt[:dim]
        K = np.tensordot(x, basis.astype(complex), axes=1)
        try:
            detK = np.linalg.det(K)
            adjK = np.linalg.inv(K) * detK
        except np.linalg.LinAlgError:
            notes.append("a critical point had a singular concentration matrix; skipped")
            continue
        u = np.array([np.trace(b @ adjK) for b in basis])
        if abs(u[j0]) < 1e-13 * (1 + np.abs(u).max()):
            notes.append("a fiber point had vanishing pairing; skipped")
            continue
        lam = s[j0] / u[j0]
        sigma = lam * adjK
        resid = float(np.abs(np.array([np.trace(b @ sigma) for b in basis]) - s).max())
        criticals.append(sigma)
        residuals.append(resid)

    count = len(criticals)
    if expected_count is not None:
        if count > expected_count:
            notes.append(
                f"found {count} critical points, more than the expected {expected_count}")
        elif count < expected_count:
            notes.append(
                f"found {count} critical points, fewer than the expected "
                f"{expected_count}; the data may be non-generic")

    # select the real positive definite point by log-likelihood
    best = None
    best_ll = -np.inf
    best_orth = None
    for sigma, resid in zip(criticals, residuals):
        if np.abs(sigma.imag).max() > 1e-8:
            continue
        real = np.ascontiguousarray(sigma.real)
        real = (real + real.T) / 2
        eig = np.linalg.eigvalsh(real)
        if eig.min() <= 1e-9:
            continue
        K = np.linalg.inv(real)
        sign, logdet = np.linalg.slogdet(K)
        ll = float(logdet - np.trace(K @ sigma_hat))
        if ll > best_ll:
            best = real
            best_ll = ll
            best_orth = resid
    membership = None
    if best is None:
        notes.append("no real positive definite critical point was found")
        best_ll = None
    else:
        K = np.linalg.inv(best)
        flat_basis = basis.reshape(dim, -1).T
        coeffs, *_ = np.linalg.lstsq(flat_basis, K.reshape(-1), rcond=None)
        proj = (flat_basis @ coeffs).reshape(n, n)
        membership = float(np.abs(K - proj).max() / (1 + np.abs(K).max()))

    return MLEResult(
        critical_covariances=criticals,
        orthogonality_residuals=residuals,
        maximizer=best,
        maximizer_loglik=best_ll,
        maximizer_orthogonality=best_orth,
        maximizer_membership=membership,
        count=count,
        expected_count=expected_count,
        warnings=notes,
    )
