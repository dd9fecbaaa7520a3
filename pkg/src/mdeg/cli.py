"""Command line interface and the reproducibility harness.

Subcommands: chromatic, multidegree, euler, model-degree, ml-degree, phi,
quadric-count, mle-fit, verify.  Results go to stdout as JSON; diagnostics
and timings go to stderr.  Exit codes: 0 success, 1 computational failure
(seed disagreement, degeneracy, golden mismatch), 2 usage error.

The verify subcommand replays the golden values and cross-engine
equivalences as one deterministic suite: identical master seeds produce
bit-identical stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import replace
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import graphcomb, invariants, matspace
from .matspace import DegenerateInputError, Graph
from .multidegree import (
    GRADIENT_OF_RESTRICTION,
    RESTRICTED_GRADIENT,
    DegenerateSpaceError,
    ExclusionDivergenceNotice,
    build_map,
    ml_degree,
    model_degree,
    mu,
    multidegree as compute_multidegree,
)
from .seeding import DEFAULT_SEED, child_seed
from .tracker import CountDisagreement, TrackerConfig, TrackingFailure


class UsageError(ValueError):
    """Bad inputs at the CLI boundary; maps to exit code 2."""


def _load_graph(path: str) -> Graph:
    try:
        return Graph.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read graph file {path}: {exc}") from exc


def _space_from_args(args) -> matspace.MatrixSpace:
    """Space selection shared by the numeric subcommands.

    A graph file plus --kind diagonal gives the incidence span; a graph file
    plus --kind symmetric gives the graphical model; --kind/--n/--codim
    without a graph gives a seeded random space.
    """
    if args.graph:
        g = _load_graph(args.graph)
        kind = args.kind or "diagonal"
        if kind == "diagonal":
            return matspace.space_from_graph_incidence(g)
        if kind == "symmetric":
            return matspace.space_from_graphical_model(g)
        raise UsageError("graph inputs support --kind diagonal or symmetric")
    if args.n is None:
        raise UsageError("either --graph or --n is required")
    kind = args.kind or "symmetric"
    ambient = matspace.ambient_dimension(kind, args.n)
    codim = args.codim or 0
    dim = ambient - codim
    if dim < 1:
        raise UsageError(f"codimension {codim} leaves no dimensions")
    return matspace.random_space(kind, args.n, dim, seed=child_seed(args.seed, 71))


def _tracker_config(args) -> TrackerConfig:
    cfg = TrackerConfig()
    if getattr(args, "newton_tol", None):
        cfg = replace(cfg, newton_tol=float(args.newton_tol))
    return cfg


def _emit(report: dict, warn_list: List[str], timings: Optional[dict] = None,
          include_timings: bool = True) -> None:
    out = dict(report)
    out["warnings"] = warn_list
    if timings is not None and include_timings:
        out["timings"] = timings
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if timings is not None and not include_timings:
        print(f"timings: {json.dumps(timings)}", file=sys.stderr)


def _rational_matrix_dump(space: matspace.MatrixSpace) -> list:
    return space.to_json_obj()


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_chromatic(args) -> int:
    g = _load_graph(args.graph)
    chrom = graphcomb.chromatic(g)
    reduced = graphcomb.reduced_chromatic(g)
    seq = graphcomb.multidegree_via_huh(g)
    _emit({
        "command": "chromatic",
        "graph": {"vertices": g.nvertices, "edges": [list(e) for e in g.edges]},
        "chromatic": list(chrom.coeffs),
        "reduced": list(reduced.coeffs),
        "multidegree": list(seq.entries),
        "engine": "combinatorial",
    }, [])
    return 0


def _cmd_multidegree(args) -> int:
    space = _space_from_args(args)
    tag = RESTRICTED_GRADIENT if args.map == "restricted" else GRADIENT_OF_RESTRICTION
    spec = build_map(space, tag)
    t0 = time.time()
    caught: List[str] = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        seq = compute_multidegree(spec, seed=args.seed, cfg=_tracker_config(args))
        caught = [str(w.message) for w in wlist]
    report = {
        "command": "multidegree",
        "entries": list(seq.entries),
        "map": seq.map_tag,
        "space": space.label,
        "seeds": list(seq.seeds),
        "paths_tracked": seq.paths_tracked,
        "engine": "numeric",
    }
    if args.dump_space:
        report["basis"] = _rational_matrix_dump(space)
    if args.dump_poly:
        report["components"] = [c.canonical_str() for c in spec.components]
    _emit(report, caught, {"seconds": round(time.time() - t0, 3)})
    return 0


def _cmd_degree(args, which: str) -> int:
    space = _space_from_args(args)
    if space.kind != "symmetric":
        raise UsageError(f"{which} needs a symmetric space")
    t0 = time.time()
    caught: List[str] = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        if which == "model-degree":
            value = model_degree(space, seed=args.seed, cfg=_tracker_config(args))
        else:
            value = ml_degree(space, seed=args.seed, cfg=_tracker_config(args))
        caught = [str(w.message) for w in wlist]
    report = {
        "command": which,
        "value": value,
        "space": space.label,
        "seeds": [args.seed],
        "engine": "numeric",
    }
    _emit(report, caught, {"seconds": round(time.time() - t0, 3)})
    return 0


def _cmd_euler(args) -> int:
    space = _space_from_args(args)
    t0 = time.time()
    caught: List[str] = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        spec = build_map(space, GRADIENT_OF_RESTRICTION)
        seq = compute_multidegree(spec, seed=args.seed, cfg=_tracker_config(args))
        caught = [str(w.message) for w in wlist]
    complement = seq.alternating_sum()
    D = space.dim - 1
    report = {
        "command": "euler",
        "complement": complement,
        "hypersurface": (D + 1) - complement,
        "entries": list(seq.entries),
        "space": space.label,
        "seeds": [args.seed],
        "engine": "numeric",
    }
    _emit(report, caught, {"seconds": round(time.time() - t0, 3)})
    return 0


def _cmd_phi(args) -> int:
    t0 = time.time()
    value = invariants.phi(args.n, args.codim, seed=args.seed,
                           cfg=_tracker_config(args), slow=args.slow)
    report = {
        "command": "phi",
        "n": args.n,
        "codim": args.codim,
        "value": value,
        "seeds": [args.seed],
        "engine": "numeric",
    }
    _emit(report, [], {"seconds": round(time.time() - t0, 3)})
    return 0


def _cmd_quadric_count(args) -> int:
    t0 = time.time()
    value = invariants.quadric_tangency_count(args.n, args.points, seed=args.seed,
                                              cfg=_tracker_config(args))
    ambient = args.n * (args.n + 1) // 2
    report = {
        "command": "quadric-count",
        "n": args.n,
        "points": args.points,
        "tangencies": ambient - 1 - args.points,
        "value": value,
        "seeds": [args.seed],
        "engine": "numeric",
    }
    _emit(report, [], {"seconds": round(time.time() - t0, 3)})
    return 0


def _is_cycle(g: Graph) -> bool:
    return (g.nvertices >= 3 and len(g.simple_edges()) == g.nvertices
            and all(d == 2 for d in g.degrees()) and g.is_connected())


def _complex_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _cmd_mle_fit(args) -> int:
    if not args.graph:
        raise UsageError("mle-fit needs --graph (a graphical model)")
    g = _load_graph(args.graph)
    space = matspace.space_from_graphical_model(g)
    if args.data:
        try:
            samples = np.loadtxt(args.data, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read samples from {args.data}: {exc}") from exc
        data = invariants.SampleData.from_samples(samples)
    elif args.cov:
        try:
            with open(args.cov) as fh:
                data = invariants.SampleData.from_covariance(json.load(fh))
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read covariance from {args.cov}: {exc}") from exc
    else:
        raise UsageError("mle-fit needs --data CSV or --cov JSON")

    conjecture_refs = []
    expected = None
    t0 = time.time()
    caught: List[str] = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        if _is_cycle(g):
            expected = invariants.cycle_ml_degree_conjecture(g.nvertices)
            conjecture_refs.append({
                "id": "cycle-ml-degree",
                "status": "conjecture",
                "n": g.nvertices,
                "value": expected,
            })
        else:
            expected = ml_degree(space, seed=args.seed, cfg=_tracker_config(args))
        result = invariants.mle_fit(space, data, cfg=_tracker_config(args),
                                    seed=args.seed, expected_count=expected)
        caught = [str(w.message) for w in wlist]
    report = {
        "command": "mle-fit",
        "count": result.count,
        "expected_count": result.expected_count,
        "critical_covariances": [_complex_matrix(s) for s in result.critical_covariances],
        "orthogonality_residuals": result.orthogonality_residuals,
        "maximizer": (None if result.maximizer is None
                      else [[float(x) for x in row] for row in result.maximizer]),
        "maximizer_loglik": result.maximizer_loglik,
        "maximizer_orthogonality": result.maximizer_orthogonality,
        "maximizer_membership": result.maximizer_membership,
        "space": space.label,
        "seeds": [args.seed],
        "engine": "numeric",
    }
    if conjecture_refs:
        report["conjecture_refs"] = conjecture_refs
    _emit(report, caught + result.warnings, {"seconds": round(time.time() - t0, 3)})
    return 0


# ---------------------------------------------------------------------------
# the verify suite


def _verify_checks(seed: int, skip_slow: bool, cfg: TrackerConfig):
    """Yield (name, callable) pairs in the fixed suite order.  Each callable
    returns a dict with expected/got payloads and raises on mismatch."""

    def expect(name, got, expected):
        if got != expected:
            raise AssertionError(f"{name}: got {got!r}, expected {expected!r}")
        return {"got": got, "expected": expected}

    def chromatic_goldens():
        out = {}
        for nv in range(2, 9):
            p = Graph.path(nv)
            want = graphcomb.IntPolynomial((0, 1)) * (
                _binomial_power(nv - 1))
            expect(f"P{nv}", list(graphcomb.chromatic(p).coeffs), list(want.coeffs))
        c3 = graphcomb.chromatic(Graph.cycle(3))
        expect("C3", list(c3.coeffs), [0, 2, -3, 1])
        c4 = graphcomb.chromatic(Graph.cycle(4))
        expect("C4", list(c4.coeffs), [0, -3, 6, -4, 1])
        expect("C3 reduced", list(graphcomb.reduced_chromatic(Graph.cycle(3)).coeffs),
               [0, -2, 1])
        expect("C4 reduced", list(graphcomb.reduced_chromatic(Graph.cycle(4)).coeffs),
               [0, 3, -3, 1])
        return {"got": "closed forms match", "expected": "closed forms match"}

    def _binomial_power(k):
        # (x - 1)^k with integer coefficients
        out = graphcomb.IntPolynomial((1,))
        step = graphcomb.IntPolynomial((-1, 1))
        for _ in range(k):
            out = out * step
        return out

    def huh_small_corpus():
        corpus = graphcomb.connected_graph_corpus(4, 6)
        for g in corpus:
            space = matspace.space_from_graph_incidence(g)
            spec = build_map(space, RESTRICTED_GRADIENT)
            numeric = compute_multidegree(spec, seed=child_seed(seed, 501, g.nvertices,
                                                            len(g.edges), hashless(g)),
                                      cfg=cfg)
            comb = graphcomb.multidegree_via_huh(g)
            expect(f"{g.name}", list(numeric.entries), list(comb.entries))
        return {"got": f"{len(corpus)} graphs agree", "expected": "all agree"}

    def hashless(g: Graph) -> int:
        # deterministic small int from the edge set (builtin hash is salted)
        acc = 0
        for a, b in sorted(g.simple_edges()):
            acc = (acc * 131 + a * 31 + b + 7) % 1_000_003
        return acc

    def multidegree_c4():
        space = matspace.space_from_graph_incidence(Graph.cycle(4))
        spec = build_map(space, RESTRICTED_GRADIENT)
        collected: list = []
        entries = []
        for i in range(3):
            entries.append(mu(spec, i, seed=child_seed(seed, 502, i), cfg=cfg,
                                  collect=collected))
        expect("C4 entries", entries, [1, 3, 3])
        worst = max((max(s.residuals) for s in collected if s.residuals), default=0.0)
        if worst >= 1e-10:
            raise AssertionError(
                f"C4 solutions violate the residual contract: {worst:.3e} >= 1e-10")
        return {"got": entries, "expected": [1, 3, 3],
                "max_residual": float(worst)}

    def euler_identities():
        inc = matspace.space_from_graph_incidence(Graph.cycle(4))
        chi_c = invariants.euler_complement(inc, seed=child_seed(seed, 503), cfg=cfg)
        expect("C4 complement", chi_c, 1)
        full2 = matspace.random_space("general", 2, 4, seed=child_seed(seed, 504))
        chi_h = invariants.euler_hypersurface(full2, seed=child_seed(seed, 505), cfg=cfg)
        expect("2x2 hypersurface", chi_h, 4)
        return {"got": [chi_c, chi_h], "expected": [1, 4]}

    def phi_anchors():
        got = [invariants.phi(3, 5, seed=child_seed(seed, 506), cfg=cfg),
               invariants.phi(3, 4, seed=child_seed(seed, 507), cfg=cfg),
               invariants.phi(3, 0, seed=child_seed(seed, 508), cfg=cfg)]
        expect("phi(3, 5/4/0)", got, [1, 2, 1])
        return {"got": got, "expected": [1, 2, 1]}

    def cycle_formula_n3():
        formula = invariants.cycle_model_degree_formula(3)
        full3 = matspace.space_from_graphical_model(Graph.complete(3))
        numeric = model_degree(full3, seed=child_seed(seed, 509), cfg=cfg)
        expect("n=3 degree", [formula, numeric], [1, 1])
        return {"got": numeric, "expected": formula}

    def cycle_formula_n4():
        formula = invariants.cycle_model_degree_formula(4)
        space = matspace.space_from_graphical_model(Graph.cycle(4))
        numeric = model_degree(space, seed=child_seed(seed, 510), cfg=cfg)
        expect("n=4 degree", numeric, formula)
        return {"got": numeric, "expected": formula}

    def cycle_ml_n4():
        conj = invariants.cycle_ml_degree_conjecture(4)
        space = matspace.space_from_graphical_model(Graph.cycle(4))
        numeric = ml_degree(space, seed=child_seed(seed, 511), cfg=cfg)
        expect("n=4 ml", numeric, conj)
        return {"got": numeric, "expected": conj, "expectation_label": "conjecture"}

    def diagonal_coincidence():
        space = matspace.space_from_graph_incidence(Graph.cycle(4))
        upper = compute_multidegree(build_map(space, RESTRICTED_GRADIENT),
                                seed=child_seed(seed, 512), cfg=cfg)
        lower = compute_multidegree(build_map(space, GRADIENT_OF_RESTRICTION),
                                seed=child_seed(seed, 513), cfg=cfg)
        expect("diagonal maps", list(upper.entries), list(lower.entries))
        return {"got": list(lower.entries), "expected": list(upper.entries)}

    def ml_bound():
        full3 = matspace.space_from_graphical_model(Graph.complete(3))
        md3 = model_degree(full3, seed=child_seed(seed, 514), cfg=cfg)
        ml3 = ml_degree(full3, seed=child_seed(seed, 515), cfg=cfg)
        if ml3 > md3:
            raise AssertionError(f"ml {ml3} > model degree {md3}")
        return {"got": [ml3, md3], "expected": "ml <= model"}

    checks = [
        ("chromatic-goldens", chromatic_goldens, False),
        ("huh-small-corpus", huh_small_corpus, False),
        ("multidegree-C4", multidegree_c4, False),
        ("euler-identities", euler_identities, False),
        ("phi3-anchors", phi_anchors, False),
        ("cycle-formula-n3", cycle_formula_n3, False),
        ("cycle-formula-n4", cycle_formula_n4, True),
        ("cycle-ml-n4", cycle_ml_n4, True),
        ("diagonal-coincidence", diagonal_coincidence, False),
        ("ml-bound", ml_bound, False),
    ]
    for name, fn, slow in checks:
        yield name, fn, slow


def verify_paper_suite(seed: int = DEFAULT_SEED, skip_slow: bool = False,
                       cfg: Optional[TrackerConfig] = None) -> dict:
    """Run the golden suite in order, failing fast at the first discrepancy.

    Returns the report dict; report["status"] is "pass" or "fail".  Output
    is deterministic for a fixed seed (timings are reported separately by
    the CLI, never inside this dict).
    """
    cfg = cfg if cfg is not None else TrackerConfig()
    results = []
    status = "pass"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExclusionDivergenceNotice)
        for name, fn, slow in _verify_checks(seed, skip_slow, cfg):
            if skip_slow and slow:
                results.append({"check": name, "status": "skipped"})
                continue
            try:
                payload = fn()
                results.append({"check": name, "status": "pass", **payload})
            except (AssertionError, TrackingFailure, CountDisagreement,
                    DegenerateSpaceError, DegenerateInputError) as exc:
                results.append({"check": name, "status": "fail", "error": str(exc)})
                status = "fail"
                break
    return {
        "command": "verify",
        "suite": "paper",
        "seed": seed,
        "checks": results,
        "status": status,
    }


def _cmd_verify(args) -> int:
    if args.suite != "paper":
        raise UsageError(f"unknown suite {args.suite!r}")
    t0 = time.time()
    report = verify_paper_suite(seed=args.seed, skip_slow=args.skip_slow,
                                cfg=_tracker_config(args))
    _emit(report, [], {"seconds": round(time.time() - t0, 3)}, include_timings=False)
    return 0 if report["status"] == "pass" else 1


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdeg",
        description="multidegrees of determinant-gradient graphs and derived invariants")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, graph=True, space=True):
        if graph:
            p.add_argument("--graph", help="graph file (JSON or edge list)")
        if space:
            p.add_argument("--kind", choices=["diagonal", "symmetric", "general"])
            p.add_argument("--n", type=int, help="matrix side for random spaces")
            p.add_argument("--codim", type=int, help="codimension for random spaces")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--slow", action="store_true",
                       help="allow long runs over the default path budget")
        p.add_argument("--json", action="store_true",
                       help="accepted for compatibility; output is always JSON")
        p.add_argument("--newton-tol", type=float, default=None,
                       help="override the tracker Newton tolerance (debugging)")

    p = sub.add_parser("chromatic", help="chromatic polynomial and its multidegree")
    p.add_argument("--graph", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("multidegree", help="numeric multidegree of a space")
    add_common(p)
    p.add_argument("--map", choices=["restricted", "lower"], default="restricted")
    p.add_argument("--dump-space", action="store_true",
                   help="include the rational basis in the report")
    p.add_argument("--dump-poly", action="store_true",
                   help="include canonical map components in the report")

    for name in ("model-degree", "ml-degree"):
        p = sub.add_parser(name, help=f"{name.replace('-', ' ')} of a symmetric space")
        add_common(p)

    p = sub.add_parser("euler", help="Euler characteristics from the gradient graph")
    add_common(p)

    p = sub.add_parser("phi", help="degree of the generic concentration model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--codim", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--slow", action="store_true")
    p.add_argument("--newton-tol", type=float, default=None)

    p = sub.add_parser("quadric-count", help="quadrics through points, tangent to hyperplanes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--newton-tol", type=float, default=None)

    p = sub.add_parser("mle-fit", help="maximum likelihood fit of a graphical model")
    p.add_argument("--graph", required=True)
    p.add_argument("--data", help="CSV of centered samples, one row per observation")
    p.add_argument("--cov", help="JSON covariance matrix")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--newton-tol", type=float, default=None)

    p = sub.add_parser("verify", help="replay the golden suite")
    p.add_argument("--suite", default="paper")
    p.add_argument("--skip-slow", action="store_true")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--newton-tol", type=float, default=None)

    return parser


_HANDLERS = {
    "chromatic": _cmd_chromatic,
    "multidegree": _cmd_multidegree,
    "model-degree": lambda a: _cmd_degree(a, "model-degree"),
    "ml-degree": lambda a: _cmd_degree(a, "ml-degree"),
    "euler": _cmd_euler,
    "phi": _cmd_phi,
    "quadric-count": _cmd_quadric_count,
    "mle-fit": _cmd_mle_fit,
    "verify": _cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.subcommand](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (TrackingFailure, CountDisagreement, DegenerateSpaceError,
            DegenerateInputError, ArithmeticError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
