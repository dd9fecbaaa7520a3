"""Multidegrees of determinant-gradient graphs and the invariants they carry.

Start from a linear space L of square matrices.  The graph of the gradient
of the determinant restricted to P(L) has a multidegree sequence; its
entries specialize to chromatic-polynomial coefficients (incidence spaces of
graphs), degrees and ML-degrees of Gaussian linear concentration models
(symmetric spaces), Euler characteristics of determinantal hypersurface
complements, and counts of quadrics through points and tangent to
hyperplanes.  This package computes the sequence numerically by homotopy
continuation and cross-checks it against exact combinatorics wherever a
combinatorial route exists.
"""

from .graphcomb import (
    IntPolynomial,
    chromatic,
    connected_graph_corpus,
    matroid_characteristic,
    multidegree_via_huh,
    reduced_chromatic,
)
from .matspace import (
    DegenerateInputError,
    Graph,
    MatrixSpace,
    generic_element,
    orthogonal_complement,
    random_space,
    space_from_graph_incidence,
    space_from_graphical_model,
    space_of_quadrics_through_points,
)
from .multidegree import (
    GRADIENT_OF_RESTRICTION,
    RESTRICTED_GRADIENT,
    DegenerateSpaceError,
    GraphMapSpec,
    MultidegreeSequence,
    build_map,
    ml_degree,
    model_degree,
    mu,
    multidegree,
)
from .polyring import SparsePoly, SymbolicMatrix, adjugate, det, gradient, laplace_det
from .seeding import DEFAULT_SEED
from .tracker import (
    CountDisagreement,
    PolySystem,
    SolutionSet,
    TrackerConfig,
    TrackingFailure,
    count_isolated,
    newton_refine,
    solve,
)

__version__ = "0.1.0"
