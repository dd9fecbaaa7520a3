"""Intersection systems for the graph of a determinant-gradient map.

Given a linear space L of n x n matrices, two rational maps out of P(L) are
of interest:

  * "restricted-gradient": the gradient of the determinant on the ambient
    matrix space, restricted to P(L).  Its components are the adjugate
    entries of the generic element (diagonal cofactors for diagonal spaces,
    upper-triangle entries for symmetric ones, all entries for general
    ones), each homogeneous of degree n - 1.
  * "gradient-of-restriction": the partial derivatives of det restricted to
    P(L), taken with respect to the space coordinates; again degree n - 1.

The entry mu_i of the multidegree of the graph of such a map counts points
that satisfy (D - i) generic hyperplane conditions on the domain, i generic
hyperplane conditions pulled back from the codomain, one random affine patch
(dehomogenization), and a Rabinowitsch equation 1 - z * h(x) = 0 with h a
generic combination of the components; the last equation excludes the base
locus, whose points would otherwise satisfy every codomain condition
vacuously.  Counting is delegated to the homotopy tracker with three
independently seeded runs per entry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from . import polyring
from .matspace import MatrixSpace, generic_element
from .polyring import FLOAT, SparsePoly
from .seeding import DEFAULT_SEED, TAG_MU, TAG_SLICE, TAG_TRACKER, child_seed, rng_from
from .tracker import PolySystem, TrackerConfig, count_isolated

RESTRICTED_GRADIENT = "restricted-gradient"
GRADIENT_OF_RESTRICTION = "gradient-of-restriction"
MAP_TAGS = (RESTRICTED_GRADIENT, GRADIENT_OF_RESTRICTION)


class DegenerateSpaceError(ValueError):
    """The determinant vanishes identically on the space; every downstream
    quantity presumes an invertible element, so we refuse to continue."""


class ExclusionDivergenceNotice(UserWarning):
    """More than 10 percent of paths diverged along the exclusion variable.

    Routine for spaces whose map has a sizable base locus; recorded so a
    reader can double-check runs on special spaces where the graph closure
    might meet the base locus in codimension one."""


@dataclass(frozen=True)
class MultidegreeSequence:
    """The vector (mu_0, ..., mu_D) with provenance metadata.

    mu_0 corresponds to slicing with domain hyperplanes only and always
    equals 1; mu_D (all codomain conditions) is the entry identified with
    model degree and ML-degree.
    """

    entries: tuple
    map_tag: str
    label: str
    engine: str
    seeds: tuple = ()
    paths_tracked: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if self.entries and self.entries[0] != 1:
            raise DegenerateSpaceError(
                f"mu_0 = {self.entries[0]} != 1; the slice hit a degenerate locus")

    @property
    def dimension(self) -> int:
        return len(self.entries) - 1

    def alternating_sum(self) -> int:
        return sum((-1) ** i * e for i, e in enumerate(self.entries))


@dataclass
class GraphMapSpec:
    """A map out of P(L), ready for slicing: exact and float components."""

    space: MatrixSpace
    map_tag: str
    components: List[SparsePoly]
    components_float: List[SparsePoly]
    degree: int
    domain_dimension: int
    det: SparsePoly


def build_map(space: MatrixSpace, map_tag: str) -> GraphMapSpec:
    """Symbolic components of the chosen map on P(L).

    Identically-zero components are dropped (they contribute no codomain
    coordinate).  Raises DegenerateSpaceError when det vanishes on all of L,
    checked exactly on the symbolic determinant.
    """
    if map_tag not in MAP_TAGS:
        raise ValueError(f"unknown map tag {map_tag!r}")
    if space.dim == 0:
        raise DegenerateSpaceError("zero-dimensional space")
    n = space.n
    m = generic_element(space)
    detp = polyring.det(m)
    if detp.is_zero():
        raise DegenerateSpaceError(
            f"determinant vanishes identically on {space.label}")

    if map_tag == RESTRICTED_GRADIENT:
        if n == 1:
            comps = [SparsePoly.constant(1, space.dim)]
        else:
            adj = polyring.adjugate(m)
            if space.kind == "diagonal":
                comps = [adj[i][i] for i in range(n)]
            elif space.kind == "symmetric":
                comps = [adj[i][j] for i in range(n) for j in range(i, n)]
            else:
                comps = [adj[j][i] for i in range(n) for j in range(n)]
    else:
        comps = polyring.gradient(detp)

    comps = [c for c in comps if not c.is_zero()]
    if not comps:
        raise DegenerateSpaceError("every map component vanishes identically")
    d = n - 1
    for c in comps:
        if c.total_degree() != d:
            raise AssertionError("component degree is not n - 1")
    return GraphMapSpec(
        space=space,
        map_tag=map_tag,
        components=comps,
        components_float=[c.to_float() for c in comps],
        degree=d,
        domain_dimension=space.dim - 1,
        det=detp,
    )


def _unit_disk(rng: np.random.Generator, size: int) -> np.ndarray:
    """Complex numbers uniform on the unit disk."""
    radius = np.sqrt(rng.uniform(0.0, 1.0, size))
    angle = rng.uniform(0.0, 2.0 * np.pi, size)
    return radius * np.exp(1j * angle)


def _linear_form(coeffs: np.ndarray, nvars: int, constant: complex = 0.0) -> SparsePoly:
    terms = {}
    if constant:
        terms[(0,) * nvars] = constant
    for k, c in enumerate(coeffs):
        e = [0] * nvars
        e[k] = 1
        terms[tuple(e)] = c
    return SparsePoly(terms, nvars, FLOAT)


def _combine(components: List[SparsePoly], coeffs: np.ndarray, nvars: int) -> SparsePoly:
    out = SparsePoly.zero(nvars, FLOAT)
    for c, g in zip(coeffs, components):
        out = out + g.pad_vars(nvars).scale(complex(c))
    return out


def mu_system(spec: GraphMapSpec, i: int, seed: int) -> PolySystem:
    """The square system whose isolated solution count is mu_i.

    Variables are the D + 1 space coordinates plus the Rabinowitsch
    auxiliary z (last slot).  Equations: one random affine patch, D - i
    random domain hyperplanes, i random codomain hyperplanes pulled back
    through the components, and 1 - z * h(x) with h a random combination of
    the components.
    """
    D = spec.domain_dimension
    if not 0 <= i <= D:
        raise ValueError(f"mu index {i} outside [0, {D}]")
    nx = D + 1
    nvars = nx + 1
    rng = rng_from(seed, TAG_SLICE, i)
    comps = spec.components_float

    equations = []
    patch = _linear_form(_unit_disk(rng, nx), nvars, constant=-1.0)
    equations.append(patch)
    for _ in range(D - i):
        equations.append(_linear_form(_unit_disk(rng, nx), nvars))
    for _ in range(i):
        equations.append(_combine(comps, _unit_disk(rng, len(comps)), nvars))
    h = _combine(comps, _unit_disk(rng, len(comps)), nvars)
    z = SparsePoly.variable(nvars - 1, nvars, FLOAT)
    exclusion = SparsePoly.constant(1.0, nvars, FLOAT) - z * h
    equations.append(exclusion)
    return PolySystem(equations, nvars)


def mu(spec: GraphMapSpec, i: int, seed: int = DEFAULT_SEED,
       cfg: Optional[TrackerConfig] = None, collect: Optional[list] = None) -> int:
    """The multidegree entry with i codomain hyperplane conditions.

    Three independently seeded tracker runs must agree on the count.  A
    warning is emitted when more than 10 percent of tracked paths diverge in
    the auxiliary variable alone: those paths die on the base-locus
    exclusion equation, which deserves a manual look for special spaces.
    """
    system = mu_system(spec, i, seed)
    base = cfg if cfg is not None else TrackerConfig()
    run_cfg = replace(base, seed=child_seed(seed, TAG_TRACKER, i))
    sets: list = []
    count = count_isolated(system, run_cfg, repeats=3, collect=sets)
    if collect is not None:
        collect.extend(sets)
    zslot = system.nvars - 1
    worst = 0
    tracked = 0
    for s in sets:
        if s.paths_tracked == 0 or s.diverged_masks.size == 0:
            continue
        zonly = int((s.diverged_masks[:, zslot]
                     & ~s.diverged_masks[:, :zslot].any(axis=1)).sum())
        if zonly > worst:
            worst, tracked = zonly, s.paths_tracked
    if worst > 0.1 * tracked and tracked:
        warnings.warn(
            f"up to {worst} of {tracked} paths for {spec.space.label} (mu_{i}) "
            "left through the base-locus exclusion; heavy excess intersection "
            "there is expected for special spaces, and the reported count "
            "stays certified by seed agreement",
            ExclusionDivergenceNotice,
        )
    return count


def multidegree(spec: GraphMapSpec, seed: int = DEFAULT_SEED,
                cfg: Optional[TrackerConfig] = None) -> MultidegreeSequence:
    """The full sequence (mu_0, ..., mu_D), one tracked family per entry."""
    D = spec.domain_dimension
    entries = []
    seeds = []
    paths = 0
    for i in range(D + 1):
        entry_seed = child_seed(seed, TAG_MU, i)
        system = mu_system(spec, i, entry_seed)
        entries.append(mu(spec, i, seed=entry_seed, cfg=cfg))
        seeds.append(entry_seed)
        paths += 3 * system.bezout_number()
    return MultidegreeSequence(
        entries=tuple(entries),
        map_tag=spec.map_tag,
        label=spec.space.label,
        engine="tracker",
        seeds=tuple(seeds),
        paths_tracked=paths,
    )


def model_degree(space: MatrixSpace, seed: int = DEFAULT_SEED,
                 cfg: Optional[TrackerConfig] = None) -> int:
    """Degree of the linear concentration model: the last multidegree entry
    of the restricted-gradient graph."""
    if space.kind != "symmetric":
        raise ValueError("model degree is defined for symmetric spaces")
    spec = build_map(space, RESTRICTED_GRADIENT)
    return mu(spec, spec.domain_dimension, seed=child_seed(seed, TAG_MU, spec.domain_dimension),
              cfg=cfg)


def ml_degree(space: MatrixSpace, seed: int = DEFAULT_SEED,
              cfg: Optional[TrackerConfig] = None) -> int:
    """Maximum likelihood degree: the last multidegree entry of the
    gradient-of-restriction graph."""
    if space.kind != "symmetric":
        raise ValueError("ML-degree is defined for symmetric spaces")
    spec = build_map(space, GRADIENT_OF_RESTRICTION)
    return mu(spec, spec.domain_dimension, seed=child_seed(seed, TAG_MU, spec.domain_dimension),
              cfg=cfg)
