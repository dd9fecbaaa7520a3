"""Homotopy continuation for square polynomial systems over complex doubles.

Total-degree start system G with the gamma trick, straight-line homotopy

    H(x, t) = (1 - t) * gamma * G(x) + t * F(x),      t : 0 -> 1,

Euler prediction on the Davidenko ODE and at most a few Newton corrections
per step.  All paths are advanced together as numpy batches: per-path state
(t, step size, status) lives in arrays and the polynomial system is compiled
once into a monomial evaluation plan shared by values and Jacobians.

Endpoints are Newton-polished against F itself, certified by quadratic decay
of the correction over two extra iterations, deduplicated at a relative
distance, and sorted by rounded coordinates so results are bit-reproducible
for a fixed (system, config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .polyring import FLOAT, SparsePoly
from .seeding import child_seed

_TRACKING, _REACHED, _DIVERGED, _FAILED = 0, 1, 2, 3

BEZOUT_GUARD = 10**6
FAILURE_FRACTION = 0.02


class TrackingFailure(RuntimeError):
    """Raised when a run cannot be trusted: too many failed paths, or
    endpoints that do not certify as regular."""

    def __init__(self, message, solution_set=None):
        super().__init__(message)
        self.solution_set = solution_set


class CountDisagreement(RuntimeError):
    """Raised when independently seeded runs return different counts."""

    def __init__(self, counts, seeds):
        super().__init__(f"solution counts disagree across seeds: {counts}")
        self.counts = counts
        self.seeds = seeds


@dataclass(frozen=True)
class TrackerConfig:
    """Knobs of the path tracker.  All tolerances are positive."""

    initial_step: float = 0.1
    min_step: float = 1e-7
    newton_tol: float = 1e-10
    max_newton_iter: int = 3
    divergence_bound: float = 1e8
    dedup_tol: float = 1e-6
    seed: int = 0
    max_steps_per_path: int = 10_000

    def __post_init__(self):
        if not (0 < self.min_step < self.initial_step):
            raise ValueError("need 0 < min_step < initial_step")
        for name in ("newton_tol", "divergence_bound", "dedup_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class PolySystem:
    """Square system of float-domain polynomials."""

    def __init__(self, equations: Sequence[SparsePoly], nvars: int):
        eqs = list(equations)
        if len(eqs) != nvars:
            raise ValueError(f"system is not square: {len(eqs)} equations, {nvars} variables")
        for k, eq in enumerate(eqs):
            if eq.domain != FLOAT:
                raise ValueError("tracker equations must be float-domain")
            if eq.nvars != nvars:
                raise ValueError(f"equation {k} has nvars {eq.nvars} != {nvars}")
            if eq.is_zero():
                raise ValueError(f"equation {k} is identically zero")
        self.equations = eqs
        self.nvars = nvars
        self.degrees = [eq.total_degree() for eq in eqs]

    def bezout_number(self) -> int:
        return math.prod(self.degrees)


@dataclass
class SolutionSet:
    """Isolated solutions with residuals and per-run tracking diagnostics.

    ``flags[i]`` is "regular" when the endpoint passed the quadratic-decay
    certificate, "suspect" otherwise.  ``diverged_masks`` records, for each
    diverged path, which coordinates exceeded the divergence bound.
    """

    points: List[np.ndarray]
    residuals: List[float]
    flags: List[str]
    paths_tracked: int
    n_converged: int
    n_diverged: int
    n_failed: int
    seed: int
    diverged_masks: np.ndarray
    diverged_heads: np.ndarray

    def regular_points(self) -> List[np.ndarray]:
        return [p for p, f in zip(self.points, self.flags) if f == "regular"]

    def has_suspect(self) -> bool:
        return any(f == "suspect" for f in self.flags)

    def counts(self) -> dict:
        return {
            "paths_tracked": self.paths_tracked,
            "converged": self.n_converged,
            "diverged": self.n_diverged,
            "failed": self.n_failed,
        }


# ---------------------------------------------------------------------------
# compiled evaluation


class CompiledSystem:
    """Monomial evaluation plan for a system and its Jacobian.

    Every distinct monomial appearing in any equation or any partial
    derivative gets one slot; slots are ordered by total degree so each
    monomial is one parent monomial times one variable.  Evaluation fills the
    monomial vector level by level, then a single sparse matrix product
    yields all equation values and all Jacobian entries at once for a whole
    batch of points.
    """

    def __init__(self, system: PolySystem):
        nvars = system.nvars
        neq = len(system.equations)
        monos = {(0,) * nvars}
        for eq in system.equations:
            for e in eq.terms:
                monos.add(e)
                for v in range(nvars):
                    if e[v] > 0:
                        ee = list(e)
                        ee[v] -= 1
                        monos.add(tuple(ee))
        # close under "subtract one from the first nonzero slot"
        pending = list(monos)
        while pending:
            e = pending.pop()
            if sum(e) == 0:
                continue
            v = next(i for i, x in enumerate(e) if x > 0)
            parent = list(e)
            parent[v] -= 1
            parent = tuple(parent)
            if parent not in monos:
                monos.add(parent)
                pending.append(parent)
        ordered = sorted(monos, key=lambda e: (sum(e), e))
        index = {e: i for i, e in enumerate(ordered)}
        maxdeg = sum(ordered[-1]) if ordered else 0

        # per-level build plan: each monomial = parent monomial * one variable
        levels = []
        pos = 1
        for g in range(1, maxdeg + 1):
            block = [e for e in ordered if sum(e) == g]
            parents = np.empty(len(block), dtype=np.int64)
            varix = np.empty(len(block), dtype=np.int64)
            for k, e in enumerate(block):
                v = next(i for i, x in enumerate(e) if x > 0)
                p = list(e)
                p[v] -= 1
                parents[k] = index[tuple(p)]
                varix[k] = v
            levels.append((pos, pos + len(block), parents, varix))
            pos += len(block)

        rows, cols, vals = [], [], []
        for i, eq in enumerate(system.equations):
            for e, c in eq.terms.items():
                rows.append(i)
                cols.append(index[e])
                vals.append(c)
                for v in range(nvars):
                    if e[v] > 0:
                        ee = list(e)
                        ee[v] -= 1
                        rows.append(neq + i * nvars + v)
                        cols.append(index[tuple(ee)])
                        vals.append(c * e[v])
        self.matrix = sp.csr_matrix(
            (np.asarray(vals, dtype=np.complex128), (rows, cols)),
            shape=(neq * (1 + nvars), len(ordered)),
        )
        # absolute-coefficient copy of the value rows estimates the
        # evaluation noise floor sum |c| |x^e| per equation
        vrows = self.matrix[:neq]
        self.abs_matrix = sp.csr_matrix(
            (np.abs(vrows.data), vrows.indices, vrows.indptr), shape=vrows.shape)
        self.levels = levels
        self.n_monomials = len(ordered)
        self.nvars = nvars
        self.neq = neq

    def evaluate(self, X: np.ndarray):
        """Values, Jacobians, and magnitude scales at points X of shape
        (B, nvars).

        Returns (vals (B, neq), jac (B, neq, nvars), scale (B, neq)) where
        scale_i = sum_terms |c| * |x|^e bounds the roundoff in vals_i.
        """
        B = X.shape[0]
        m = np.empty((B, self.n_monomials), dtype=np.complex128)
        m[:, 0] = 1.0
        for lo, hi, parents, varix in self.levels:
            m[:, lo:hi] = m[:, parents] * X[:, varix]
        flat = (self.matrix @ m.T).T  # (B, neq*(1+nvars))
        vals = flat[:, : self.neq]
        jac = flat[:, self.neq:].reshape(B, self.neq, self.nvars)
        scale = (self.abs_matrix @ np.abs(m).T).T
        return vals, jac, scale


def _start_system_eval(X: np.ndarray, degrees: np.ndarray, roots: np.ndarray):
    """Values, Jacobians, and scales of the start system x_i^d_i - r_i."""
    powed = np.power(X, (degrees - 1)[None, :])
    vals = powed * X - roots[None, :]
    B, n = X.shape
    jac = np.zeros((B, n, n), dtype=np.complex128)
    jac[:, np.arange(n), np.arange(n)] = degrees[None, :] * powed
    scale = np.abs(powed * X) + 1.0
    return vals, jac, scale


def _batched_solve(A: np.ndarray, b: np.ndarray):
    """Solve A x = b per batch item; singular items come back as NaN."""
    try:
        return np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.full(b.shape, np.nan, dtype=np.complex128)
        for k in range(A.shape[0]):
            try:
                out[k] = np.linalg.solve(A[k], b[k])
            except np.linalg.LinAlgError:
                pass
        return out


def _start_solutions(degrees: np.ndarray, roots: np.ndarray, total: int) -> np.ndarray:
    """All Bezout start points, mixed-radix ordered (variable 0 slowest)."""
    nvars = len(degrees)
    per_var = [roots[v] ** (1.0 / degrees[v])
               * np.exp(2j * np.pi * np.arange(degrees[v]) / degrees[v])
               for v in range(nvars)]
    X0 = np.empty((total, nvars), dtype=np.complex128)
    idx = np.arange(total)
    block = total
    for v in range(nvars):
        block //= degrees[v]
        X0[:, v] = per_var[v][(idx // block) % degrees[v]]
    return X0


# ---------------------------------------------------------------------------
# the solver


def solve(system: PolySystem, cfg: TrackerConfig,
          path_log: Optional[str] = None) -> SolutionSet:
    """Track one path per Bezout start solution and return the isolated
    endpoints.

    Raises TrackingFailure when more than 2 percent of paths end in tracking
    failure (neither converged nor cleanly diverged), which signals an
    ill-conditioned or non-generic system.
    """
    total = system.bezout_number()
    if total > BEZOUT_GUARD:
        raise ValueError(f"Bezout number {total} exceeds the guard {BEZOUT_GUARD}")
    nvars = system.nvars
    rng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed) & (2**63 - 1)))
    roots = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=nvars))
    gamma = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    degrees = np.asarray(system.degrees, dtype=np.int64)

    if total == 0:
        return SolutionSet([], [], [], 0, 0, 0, 0, cfg.seed,
                           np.zeros((0, nvars), dtype=bool),
                           np.zeros((0, nvars), dtype=np.complex128))

    compiled = CompiledSystem(system)
    X = _start_solutions(degrees, roots, total)
    t = np.zeros(total)
    h = np.full(total, cfg.initial_step)
    status = np.full(total, _TRACKING, dtype=np.int64)
    streak = np.zeros(total, dtype=np.int64)
    steps = np.zeros(total, dtype=np.int64)
    tangent = np.zeros((total, nvars), dtype=np.complex128)
    need_tangent = np.ones(total, dtype=bool)
    div_mask = np.zeros((total, nvars), dtype=bool)
    div_head = np.zeros((total, nvars), dtype=np.complex128)

    def homotopy_parts(Xa):
        Fv, FJ, Fs = compiled.evaluate(Xa)
        Gv, GJ, Gs = _start_system_eval(Xa, degrees, roots)
        return Fv, FJ, Fs, Gv, GJ, Gs

    def mark_diverged(indices, points):
        status[indices] = _DIVERGED
        finite = np.isfinite(points)
        big = np.abs(np.where(finite, points, 0.0)) > cfg.divergence_bound
        div_mask[indices] = big | ~finite
        div_head[indices] = np.where(finite, points, 0.0)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        while True:
            active = np.flatnonzero(status == _TRACKING)
            if active.size == 0:
                break

            # tangents at path heads that moved since the last solve
            stale = active[need_tangent[active]]
            if stale.size:
                Fv, FJ, _, Gv, GJ, _ = homotopy_parts(X[stale])
                ts = t[stale][:, None, None]
                HJ = (1 - ts) * gamma * GJ + ts * FJ
                tangent[stale] = _batched_solve(HJ, -(Fv - gamma * Gv))
                need_tangent[stale] = False
                bad = ~np.isfinite(tangent[stale]).all(axis=1)
                if bad.any():
                    status[stale[bad]] = _FAILED
                    active = np.flatnonzero(status == _TRACKING)
                    if active.size == 0:
                        break

            t_new = np.minimum(t[active] + h[active], 1.0)
            dt = t_new - t[active]
            Xc = X[active] + dt[:, None] * tangent[active]

            # Newton correction toward H(., t_new) = 0; the residual test is
            # relative to the evaluation scale, otherwise large-coordinate
            # paths stall on double-precision roundoff
            conv = np.zeros(active.size, dtype=bool)
            live = np.arange(active.size)
            for it in range(cfg.max_newton_iter + 1):
                if live.size == 0:
                    break
                Fv, FJ, Fs, Gv, GJ, Gs = homotopy_parts(Xc[live])
                w = t_new[live]
                Hv = (1 - w)[:, None] * gamma * Gv + w[:, None] * Fv
                Hs = (1 - w)[:, None] * Gs + w[:, None] * Fs
                res = (np.abs(Hv) / (1.0 + Hs)).max(axis=1)
                fin = np.isfinite(res)
                done = (res < cfg.newton_tol) & fin
                conv[live[done]] = True
                live = live[~done & fin]
                if live.size == 0 or it == cfg.max_newton_iter:
                    break
                keep = ~done & fin
                HJ = ((1 - w[keep])[:, None, None] * gamma * GJ[keep]
                      + w[keep][:, None, None] * FJ[keep])
                delta = _batched_solve(HJ, -Hv[keep])
                ok = np.isfinite(delta).all(axis=1)
                Xc[live[ok]] += delta[ok]
                live = live[ok]

            steps[active] += 1

            accepted = active[conv]
            rejected = active[~conv]

            if accepted.size:
                Xacc = Xc[conv]
                X[accepted] = Xacc
                t[accepted] = t_new[conv]
                streak[accepted] += 1
                need_tangent[accepted] = True
                grow = streak[accepted] >= 4
                h[accepted[grow]] = np.minimum(h[accepted[grow]] * 2, cfg.initial_step)
                streak[accepted[grow]] = 0
                norms = np.abs(Xacc).max(axis=1)
                div = ~np.isfinite(norms) | (norms > cfg.divergence_bound)
                if div.any():
                    mark_diverged(accepted[div], Xacc[div])
                done = (t[accepted] >= 1.0) & ~div
                status[accepted[done]] = _REACHED

            if rejected.size:
                # candidates that blew past the bound are at-infinity paths
                cand = Xc[~conv]
                norms = np.abs(np.where(np.isfinite(cand), cand, np.inf)).max(axis=1)
                div = norms > cfg.divergence_bound
                if div.any():
                    mark_diverged(rejected[div], cand[div])
                rest = rejected[~div]
                streak[rest] = 0
                h[rest] = h[rest] / 2
                under = h[rest] < cfg.min_step
                # step underflow just short of t = 1 goes to the endgame:
                # Newton against F either certifies a finite endpoint or
                # diverges, classifying the path as at-infinity (slow escapes
                # along the exclusion variable never reach the norm bound)
                late = t[rest] >= 1.0 - 1e-3
                status[rest[under & late]] = _REACHED
                status[rest[under & ~late]] = _FAILED

            over = (status == _TRACKING) & (steps > cfg.max_steps_per_path)
            status[over] = _FAILED

        # ---- endpoint refinement and certification ---------------------
        reached = np.flatnonzero(status == _REACHED)
        endpoint_entries = []
        n_end_failed = 0
        endpoint_rows = {}
        if reached.size:
            m = reached.size
            Xr = X[reached].copy()
            dead = np.zeros(m, dtype=bool)

            def cull_blown():
                live = np.flatnonzero(~dead)
                if live.size == 0:
                    return live
                vals = Xr[live]
                norms = np.abs(np.where(np.isfinite(vals), vals, np.inf)).max(axis=1)
                blown = norms > cfg.divergence_bound
                if blown.any():
                    rows = live[blown]
                    dead[rows] = True
                    mark_diverged(reached[rows], Xr[rows])
                return live[~blown]

            # the polish budget must outlast multiple points of the slice
            # system sitting on the base locus: Newton contracts them only
            # linearly while the exclusion variable doubles per step on its
            # way past the divergence bound
            converged_rows = np.zeros(m, dtype=bool)
            for _ in range(80):
                live = cull_blown()
                live = live[~converged_rows[live]]
                if live.size == 0:
                    break
                Fv, FJ, _ = compiled.evaluate(Xr[live])
                res = np.abs(Fv).max(axis=1)
                settled = res < 1e-14
                converged_rows[live[settled]] = True
                need = ~settled
                if not need.any():
                    continue
                delta = _batched_solve(FJ[need], -Fv[need])
                ok = np.isfinite(delta).all(axis=1)
                rows = live[need][ok]
                Xr[rows] += delta[ok]
            # two certification iterations, recording correction sizes
            d = [np.zeros(m), np.zeros(m)]
            for s in range(2):
                live = cull_blown()
                if live.size == 0:
                    break
                Fv, FJ, _ = compiled.evaluate(Xr[live])
                delta = _batched_solve(FJ, -Fv)
                bad = ~np.isfinite(delta).all(axis=1)
                delta[bad] = 0
                d[s][live] = np.abs(delta).max(axis=1)
                Xr[live] += delta
            live = cull_blown()
            res = np.full(m, np.inf)
            condition = np.full(m, np.inf)
            noise = np.zeros(m)
            if live.size:
                Fv, FJ, Fs = compiled.evaluate(Xr[live])
                res[live] = np.abs(Fv).max(axis=1)
                # a correction cannot be expected to shrink below the image
                # of the evaluation roundoff under the inverse Jacobian
                floor_vec = _batched_solve(FJ, (Fs * 1e-15).astype(np.complex128))
                floor_norm = np.abs(floor_vec).max(axis=1)
                noise[live] = np.nan_to_num(floor_norm, nan=0.0, posinf=0.0)
                for k, row in enumerate(live):
                    condition[row] = float(abs(np.linalg.cond(FJ[k], 1)))
            scale = 1.0 + np.abs(np.where(np.isfinite(Xr), Xr, 0.0)).max(axis=1)
            plateau = np.maximum(4.0 * noise, 1e-13 * scale)
            quadratic = d[1] <= np.maximum(plateau, 0.01 * d[0])
            for k, idx in enumerate(reached):
                if dead[k]:
                    continue
                if not np.isfinite(res[k]) or res[k] >= cfg.newton_tol:
                    n_end_failed += 1
                    endpoint_rows[int(idx)] = "failed"
                    continue
                flag = "regular"
                if not quadratic[k] or not np.isfinite(condition[k]) or condition[k] > 1e12:
                    flag = "suspect"
                endpoint_entries.append((Xr[k].copy(), float(res[k]), flag))
                endpoint_rows[int(idx)] = endpoint_entries[-1]

    # ---- collect, sort, dedup -------------------------------------------
    def sort_key(entry):
        key = []
        for z in entry[0]:
            key.append(round(z.real / 1e-8))
            key.append(round(z.imag / 1e-8))
        return tuple(key)

    endpoint_entries.sort(key=sort_key)
    kept: List[tuple] = []
    for pt, r, flag in endpoint_entries:
        dup = False
        for kp, _, _ in kept:
            tol = cfg.dedup_tol * max(1.0, np.abs(pt).max(), np.abs(kp).max())
            if np.abs(pt - kp).max() <= tol:
                dup = True
                break
        if not dup:
            kept.append((pt, r, flag))

    n_converged = len(endpoint_entries)
    n_diverged = int((status == _DIVERGED).sum())
    n_failed = int((status == _FAILED).sum()) + n_end_failed

    out = SolutionSet(
        points=[p for p, _, _ in kept],
        residuals=[r for _, r, _ in kept],
        flags=[f for _, _, f in kept],
        paths_tracked=total,
        n_converged=n_converged,
        n_diverged=n_diverged,
        n_failed=n_failed,
        seed=cfg.seed,
        diverged_masks=div_mask[status == _DIVERGED],
        diverged_heads=div_head[status == _DIVERGED],
    )

    if path_log:
        _write_path_log(path_log, status, steps, endpoint_rows, total)

    if total > 0 and n_failed / total > FAILURE_FRACTION:
        raise TrackingFailure(
            f"{n_failed} of {total} paths failed to track "
            f"(> {FAILURE_FRACTION:.0%}); the system looks ill-conditioned",
            solution_set=out,
        )
    return out


def _write_path_log(path: str, status, steps, endpoint_rows, total):
    names = {_TRACKING: "tracking", _REACHED: "converged",
             _DIVERGED: "diverged", _FAILED: "failed"}
    with open(path, "w") as fh:
        fh.write("path,status,steps,final_residual\n")
        for k in range(total):
            st = names[int(status[k])]
            res = ""
            entry = endpoint_rows.get(k)
            if isinstance(entry, tuple):
                res = f"{entry[1]:.3e}"
            elif entry == "failed":
                st = "failed"
            fh.write(f"{k},{st},{int(steps[k])},{res}\n")


def solve_repeated(system: PolySystem, cfg: TrackerConfig,
                   repeats: int = 3) -> List[SolutionSet]:
    """Run solve with ``repeats`` seeds derived from cfg.seed."""
    return [solve(system, replace(cfg, seed=child_seed(cfg.seed, k)))
            for k in range(repeats)]


def count_isolated(system: PolySystem, cfg: TrackerConfig, repeats: int = 3,
                   collect: Optional[list] = None) -> int:
    """The common isolated-solution count across independently seeded runs.

    Counts only endpoints that certify as regular; any suspect endpoint
    raises TrackingFailure (the generic-slice assumption is broken), and
    disagreeing counts raise CountDisagreement rather than voting.
    """
    sets = solve_repeated(system, cfg, repeats)
    if collect is not None:
        collect.extend(sets)
    for s in sets:
        if s.has_suspect():
            raise TrackingFailure(
                "endpoint failed the quadratic-convergence certificate "
                f"(seed {s.seed}); counts cannot be trusted",
                solution_set=s,
            )
    counts = [len(s.points) for s in sets]
    if len(set(counts)) != 1:
        raise CountDisagreement(counts, [s.seed for s in sets])
    return counts[0]


def newton_refine(system: PolySystem, point: Sequence[complex], iters: int = 8):
    """Newton-refine a single point against the system.

    Returns (point, residual, flag) where flag is "regular" when the
    correction sizes decay quadratically and "suspect" otherwise.  Raises
    TrackingFailure when the Jacobian at the input point is singular
    (one-norm condition estimate above 1e12).
    """
    compiled = CompiledSystem(system)
    x = np.asarray(point, dtype=np.complex128)[None, :]
    _, J, _ = compiled.evaluate(x)
    condition = float(abs(np.linalg.cond(J[0], 1)))
    if not np.isfinite(condition) or condition > 1e12:
        raise TrackingFailure("singular Jacobian at the input point")
    deltas = []
    for _ in range(iters):
        Fv, J, _ = compiled.evaluate(x)
        delta = _batched_solve(J, -Fv)
        if not np.isfinite(delta).all():
            break
        deltas.append(float(np.abs(delta).max()))
        x = x + delta
        if deltas[-1] < 1e-15 * (1 + np.abs(x).max()):
            break
    Fv, J, Fs = compiled.evaluate(x)
    res = float(np.abs(Fv).max())
    floor_vec = _batched_solve(J, (Fs * 1e-15).astype(np.complex128))
    plateau = float(np.nan_to_num(np.abs(floor_vec).max(), nan=0.0, posinf=0.0))
    plateau = max(4.0 * plateau, 1e-13 * (1.0 + float(np.abs(x).max())))
    flag = "regular"
    sig = [v for v in deltas if v > plateau]
    for a, b in zip(sig, sig[1:]):
        if b > max(0.01 * a, plateau):
            flag = "suspect"
            break
    return x[0], res, flag
