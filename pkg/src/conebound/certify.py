"""Numerical certification of error bounds on concrete instances.

Projects onto the solution set S = {x : A x + b in K} by operator
splitting, samples distance ratios d(x, S) / d(Ax + b, K) over growing
balls, runs tangency and outward divergence probes, and estimates the
uniformity constant of the normal-cone preimage inclusion.  All verdicts
here are sampling heuristics and are reported as evidence, never as
proof.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from . import rng as streams
from .cones import (
    ConeSpec,
    Kind,
    PointClass,
    classify_point,
    distance,
    margin,
    normal_ray,
    polar,
    polar_project,
    project,
)
from .subspaces import AffineInclusion

RATIO_FLOOR = 1e-8
PROBE_FLOOR = 1e-12  # tangency sweeps need residuals well below the
                     # sampling floor; they stay far above float noise


class InfeasibleProblem(RuntimeError):
    """The splitting residual stalled; the instance looks infeasible."""


class AllSamplesFeasible(RuntimeError):
    """Every sample landed inside S; no ratio statistics exist."""


class ZeroGradient(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveOpts:
    tol: float = 1e-9
    max_iter: int = 50000
    relaxation: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if not (0.5 <= self.relaxation <= 1.9):
            raise ValueError("relaxation must lie in [0.5, 1.9]")


@dataclass
class ProjectionResult:
    x: np.ndarray
    dist: float
    iters: int
    converged: bool
    primal_residual: float


class VerdictHint(str, Enum):
    BOUNDED = "BoundedEvidence"
    DIVERGENCE = "DivergenceEvidence"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class RadiusStat:
    radius: float
    max_ratio: float  # nan when no sample cleared the residual floor
    n_samples: int
    n_included: int
    n_unconverged: int


@dataclass
class SampleRecord:
    radius: float
    sample_id: int
    dist: float
    residual: float
    ratio: float
    included: bool


@dataclass
class TauEstimate:
    value: float
    unbounded: bool
    n_boundary: int = 0
    n_apex: int = 0
    n_interior: int = 0
    n_degenerate: int = 0
    sweep: list = field(default_factory=list)  # (radius, tau)


@dataclass
class CertifyReport:
    radius_stats: list
    sup_ratio: float
    verdict: VerdictHint
    inward_trace: list  # (epsilon, max ratio), parameters increasing
    outward_trace: list  # (radius, max ratio), parameters increasing
    inward_slope: float
    inward_span_decades: float
    tau: TauEstimate | None
    seed: int
    tolerances: dict
    samples: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# batched cone projection and the splitting solver
# ---------------------------------------------------------------------------


def _project_batch(cone: ConeSpec, Z: np.ndarray) -> np.ndarray:
    """Rowwise cone projection of a (B, m) array."""
    if cone.kind == Kind.ORTHANT:
        return np.maximum(Z, 0.0)
    if cone.kind == Kind.P_CONE:
        return np.stack([project(cone, Z[i]) for i in range(Z.shape[0])])
    beta = 1.0 if cone.kind == Kind.SECOND_ORDER else np.tan(cone.theta)
    t = Z[:, 0]
    U = Z[:, 1:]
    r = np.linalg.norm(U, axis=1)
    inside = beta * t >= r
    apex = t + beta * r <= 0.0
    coef = (t + beta * r) / (1.0 + beta * beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        Uhat = np.where(r[:, None] > 0.0, U / np.where(r[:, None] > 0, r[:, None], 1.0), 0.0)
    out = np.empty_like(Z)
    out[:, 0] = coef
    out[:, 1:] = coef[:, None] * beta * Uhat
    out[inside] = Z[inside]
    out[apex] = 0.0
    return out


def operator_norm(A: np.ndarray) -> float:
    """Spectral norm by 50 steps of deterministic power iteration."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    v = np.ones(n) / np.sqrt(n)
    G = A.T @ A
    for _ in range(50):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # ones happened to be (numerically) in the kernel; restart
            # from the heaviest column of G
            j = int(np.argmax(np.diag(G)))
            v = np.zeros(n)
            v[j] = 1.0
            w = G @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0
        v = w / nw
    return float(np.sqrt(max(0.0, v @ G @ v)))


class _SplittingCore:
    """Cached factorizations for repeated projections onto one solution set.

    Instances whose constraint qualification fails carry no dual solution:
    the dual iterate diverges and the primal tail decays only polynomially.
    Such rows are detected by their stalling iterate change and moved to
    escalated-penalty sweeps (each penalty level keeps its own cached
    factorization), which shrink the tail error to ~1/penalty without
    disturbing regular rows.
    """

    ESCALATION = 1e4
    STALL_CHECK = 2500

    def __init__(self, problem: AffineInclusion, opts: SolveOpts):
        self.problem = problem
        self.opts = opts
        self.rho = max(operator_norm(problem.A), 1e-8)
        self._factors = {}

    def _factor(self, rho: float):
        if rho not in self._factors:
            M = np.eye(self.problem.n) + rho * (self.problem.A.T @ self.problem.A)
            self._factors[rho] = scipy.linalg.cho_factor(M)
        return self._factors[rho]

    def _sweep(self, rho, X0, X, Z, W, live, converged, iters, resid, budget,
               detect_infeasible=False, stall_exit=True):
        """One penalty level; clears rows from ``live`` as they finish.

        Rows leave either by passing the stopping test (marked in
        ``converged``) or by stalling (iterate change decaying too slowly,
        candidates for penalty escalation).
        """
        A, b = self.problem.A, self.problem.b
        opts = self.opts
        alpha = opts.relaxation
        factor = self._factor(rho)
        B = X0.shape[0]
        best_resid = np.full(B, np.inf)
        feas_check = np.full(B, np.inf)
        dx_check = np.full(B, np.inf)
        dx_cur = np.full(B, np.inf)
        it = 0
        while it < budget and live.any():
            it += 1
            Xl = X[live]
            rhs = X0[live] + rho * ((Z[live] - W[live] - b) @ A)
            Xn = scipy.linalg.cho_solve(factor, rhs.T).T
            AX = Xn @ A.T + b
            AXr = alpha * AX + (1.0 - alpha) * Z[live]
            Zn = _project_batch(self.problem.cone, AXr + W[live])
            Wn = W[live] + AXr - Zn
            r = np.linalg.norm(AX - Zn, axis=1)
            dx = np.linalg.norm(Xn - Xl, axis=1)
            sz = np.maximum(1.0, np.linalg.norm(Zn, axis=1))
            sx = np.maximum(1.0, np.linalg.norm(Xn, axis=1))
            done = (r <= opts.tol * sz) & (dx <= opts.tol * sx)
            idx = np.flatnonzero(live)
            X[idx], Z[idx], W[idx] = Xn, Zn, Wn
            resid[idx] = r
            dx_cur[idx] = dx
            iters[idx] += 1
            best_resid[idx] = np.minimum(best_resid[idx], r)
            if it % 1000 == 0 and detect_infeasible:
                flat = (best_resid[idx] > 1e-4 * sz) & \
                       (best_resid[idx] > 0.99 * feas_check[idx])
                if it >= 2000 and bool(np.all(flat)):
                    raise InfeasibleProblem(
                        f"splitting residual stalled at {best_resid[idx].max():.3e}")
                feas_check[idx] = best_resid[idx]
            converged[idx[done]] = True
            live[idx[done]] = False
            if stall_exit and it % self.STALL_CHECK == 0:
                if it > self.STALL_CHECK:
                    live &= ~(live & (dx_cur > 0.2 * dx_check))
                dx_check = dx_cur.copy()

    def run(self, X0: np.ndarray, detect_infeasible: bool = False):
        """Project each row of X0 onto S.

        Returns (X, dist, iters, converged, resid).  Rows freeze once
        their own stopping test passes, so per-sample trajectories do
        not depend on what else is in the batch.
        """
        opts = self.opts
        B = X0.shape[0]
        X = X0.copy()
        Z = _project_batch(self.problem.cone, X0 @ self.problem.A.T + self.problem.b)
        W = np.zeros_like(Z)
        converged = np.zeros(B, dtype=bool)
        iters = np.zeros(B, dtype=int)
        resid = np.full(B, np.inf)
        budgets = [(self.rho, int(0.6 * opts.max_iter)),
                   (self.rho * self.ESCALATION, int(0.2 * opts.max_iter)),
                   (self.rho * self.ESCALATION ** 2, int(0.2 * opts.max_iter))]
        prev_rho = self.rho
        for level, (rho, budget) in enumerate(budgets):
            live = ~converged
            if not live.any():
                break
            if level > 0:
                W[live] *= prev_rho / rho  # scaled dual tracks the penalty
            self._sweep(rho, X0, X, Z, W, live, converged, iters, resid, budget,
                        detect_infeasible=detect_infeasible and level == 0,
                        stall_exit=level < len(budgets) - 1)
            prev_rho = rho
        dist = np.linalg.norm(X - X0, axis=1)
        return X, dist, iters, converged, resid


def project_onto_solution_set(problem: AffineInclusion, x0, opts: SolveOpts | None = None) -> ProjectionResult:
    """Nearest point of S = {x : A x + b in K} to x0.

    Operator splitting on (x, z) with z = A x + b: a cached regularized
    least-squares x-update alternates with a cone projection z-update and
    a dual step.  Raises InfeasibleProblem when the residual stalls above
    1e-4 (heuristic).  A hit of the iteration cap returns the best
    iterate flagged as non-converged.
    """
    opts = opts or SolveOpts()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (problem.n,):
        raise ValueError(f"x0 must have length {problem.n}")
    core = _SplittingCore(problem, opts)
    X, dist, iters, conv, resid = core.run(x0[None, :], detect_infeasible=True)
    return ProjectionResult(X[0], float(dist[0]), int(iters[0]), bool(conv[0]), float(resid[0]))


def residual(problem: AffineInclusion, x) -> float:
    """d(A x + b, K), the constraint violation at x."""
    return distance(problem.cone, problem.map(x))


def _batched_dists(core: _SplittingCore, X0: np.ndarray, n_jobs: int):
    """Distances to S for each row, with optional thread-parallel chunks.

    Chunks are contiguous and results are reassembled in order, so the
    statistics do not depend on the number of workers.
    """
    if X0.shape[0] == 0:
        return np.zeros((0, core.problem.n)), np.zeros(0), np.zeros(0, dtype=bool)
    if n_jobs <= 1:
        X, dist, _, conv, _ = core.run(X0)
        return X, dist, conv
    chunks = np.array_split(np.arange(X0.shape[0]), n_jobs)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        outs = list(pool.map(lambda ix: core.run(X0[ix]), chunks))
    X = np.concatenate([o[0] for o in outs])
    dist = np.concatenate([o[1] for o in outs])
    conv = np.concatenate([o[3] for o in outs])
    return X, dist, conv


# ---------------------------------------------------------------------------
# modulus sampling and divergence probes
# ---------------------------------------------------------------------------


def _loglog_fit(params, values) -> float:
    lx = np.log10(np.asarray(params, dtype=float))
    ly = np.log10(np.asarray(values, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def _probe_ratios(core: _SplittingCore, points: np.ndarray, floor_scale: float,
                  n_jobs: int):
    """dist/residual for probe points.

    A point only counts when its residual clears the probe floor and its
    distance is resolvable by the splitting solver (points within the
    feasibility tolerance of S report distance ~0 and would poison the
    trace).
    """
    problem = core.problem
    _, dists, conv = _batched_dists(core, points, n_jobs)
    dist_floor = 1e3 * core.opts.tol
    out = []
    for i in range(points.shape[0]):
        z = problem.map(points[i])
        res = distance(problem.cone, z)
        ok = res > floor_scale * max(1.0, float(np.linalg.norm(z))) and \
            dists[i] > dist_floor * max(1.0, float(np.linalg.norm(points[i])))
        out.append((float(dists[i]), res, bool(conv[i])) if ok else None)
    return out


def _transverse_directions(x_dir: np.ndarray, seed: int, count: int) -> list[np.ndarray]:
    """Unit directions orthogonal to x_dir (axial fallback in dimension 1)."""
    n = x_dir.shape[0]
    if n == 1:
        return [np.array([1.0]), np.array([-1.0])]
    dirs = []
    gen = streams.substream(seed, streams.PROBE, 77)
    basis = scipy.linalg.null_space(x_dir[None, :])
    for j in range(basis.shape[1]):
        dirs.append(basis[:, j])
        dirs.append(-basis[:, j])
    for _ in range(max(0, count - len(dirs))):
        v = streams.sphere_point(gen, n)
        v = v - np.dot(v, x_dir) * x_dir
        nv = np.linalg.norm(v)
        if nv > 1e-9:
            dirs.append(v / nv)
    return dirs[:count]


def _inward_probe(core: _SplittingCore, anchor: np.ndarray, seed: int, n_jobs: int):
    """Tangency sweep: ratios at anchor + eps * v for shrinking eps.

    Divergent instances show ratio ~ c / eps; the trace is fitted on a
    log-log scale.
    """
    problem = core.problem
    n = problem.n
    eps_schedule = [3e-1] + [10.0 ** (-k) for k in range(1, 7)]
    if n == 1:
        dirs = [np.array([1.0]), np.array([-1.0])]
    else:
        gen = streams.substream(seed, streams.PROBE, 1)
        dirs = [streams.sphere_point(gen, n) for _ in range(8)]
        eye = np.eye(n)
        dirs += [eye[i] for i in range(min(n, 4))]
    trace = []
    for eps in eps_schedule:
        pts = np.stack([anchor + eps * v for v in dirs])
        ratios = []
        for entry in _probe_ratios(core, pts, PROBE_FLOOR, n_jobs):
            if entry is None:
                continue
            dist, res, _ = entry
            ratios.append(dist / res)
        if ratios:
            trace.append((eps, max(ratios)))
    trace.sort(key=lambda t: t[0])
    slope, span = np.nan, 0.0
    if len(trace) >= 3:
        ps = [t[0] for t in trace]
        rs = [t[1] for t in trace]
        if min(rs) > 0.0:
            slope = _loglog_fit(ps, rs)
            span = float(np.log10(max(rs) / min(rs)))
    fired = bool(slope <= -0.9 and span >= 3.0) if np.isfinite(slope) else False
    return trace, slope, span, fired


def _outward_probe(core: _SplittingCore, ray_direction: np.ndarray, seed: int,
                   n_jobs: int):
    """Outward sweep along the tangency ray with transverse offsets.

    Instances that lose the bound at infinity show per-radius max ratios
    growing with the sweep radius.
    """
    problem = core.problem
    d = np.asarray(ray_direction, dtype=float)
    x_d, *_ = np.linalg.lstsq(problem.A, d, rcond=None)
    nAx = np.linalg.norm(problem.A @ x_d)
    if nAx < 1e-12:
        return [], False
    x_d = x_d / nAx
    x_dir = x_d / np.linalg.norm(x_d)
    dirs = _transverse_directions(x_dir, seed, 6)
    schedule = [10.0, 1e2, 1e3, 1e4, 1e5]
    trace = []
    for R in schedule:
        deltas = [np.sqrt(R), 2.0 * np.sqrt(R), 0.5 * R]
        pts = np.stack([R * x_d + dl * v for dl in deltas for v in dirs])
        ratios = []
        for entry in _probe_ratios(core, pts, RATIO_FLOOR, n_jobs):
            if entry is None:
                continue
            dist, res, _ = entry
            ratios.append(dist / res)
        if ratios:
            trace.append((R, max(ratios)))
    trace.sort(key=lambda t: t[0])
    fired = False
    if len(trace) >= 2:
        rs = [t[1] for t in trace]
        growing = all(rs[i + 1] >= 0.8 * rs[i] for i in range(len(rs) - 1))
        fired = bool(growing and rs[-1] >= 10.0 * rs[0])
    return trace, fired


def modulus_estimate(problem: AffineInclusion, center, radii, samples_per_radius: int,
                     seed: int, *, ray_direction=None, opts: SolveOpts | None = None,
                     n_jobs: int = 1) -> CertifyReport:
    """Sampled error-bound modulus statistics over balls B(center, r).

    For each radius, draws ``samples_per_radius`` points uniformly from
    the ball, records d(x, S) / d(Ax + b, K) at samples whose residual
    clears the floor, and reports per-radius maxima plus the global sup.
    Two divergence probes sharpen the verdict: a tangency sweep around
    the projection of the center and, when a boundary-ray direction is
    supplied, an outward sweep along it.
    """
    opts = opts or SolveOpts(seed=seed)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (problem.n,):
        raise ValueError(f"center must have length {problem.n}")
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii) or any(
            radii[i] >= radii[i + 1] for i in range(len(radii) - 1)):
        raise ValueError("radii must be positive and strictly increasing")
    if samples_per_radius < 1:
        raise ValueError("need at least one sample per radius")

    core = _SplittingCore(problem, opts)
    stats: list[RadiusStat] = []
    records: list[SampleRecord] = []
    sup_ratio = 0.0
    n_unconverged_total = 0
    for i, r in enumerate(radii):
        X0 = np.stack([
            center + streams.ball_point(streams.substream(seed, streams.MODULUS, i, j),
                                        problem.n, r)
            for j in range(samples_per_radius)
        ])
        _, dists, conv = _batched_dists(core, X0, n_jobs)
        ratios = []
        n_inc = 0
        for j in range(samples_per_radius):
            z = problem.map(X0[j])
            res = distance(problem.cone, z)
            included = res > RATIO_FLOOR * max(1.0, float(np.linalg.norm(z)))
            ratio = dists[j] / res if included else np.nan
            if included:
                ratios.append(ratio)
                n_inc += 1
            records.append(SampleRecord(r, j, float(dists[j]), res,
                                        float(ratio), included))
        n_unconv = int(np.sum(~conv))
        n_unconverged_total += n_unconv
        mx = max(ratios) if ratios else np.nan
        if ratios:
            sup_ratio = max(sup_ratio, mx)
        stats.append(RadiusStat(r, float(mx), samples_per_radius, n_inc, n_unconv))

    if all(s.n_included == 0 for s in stats):
        raise AllSamplesFeasible("no sample had a residual above the floor")

    anchor = project_onto_solution_set(problem, center, opts).x
    inward_trace, slope, span, inward_fired = _inward_probe(core, anchor, seed, n_jobs)
    outward_trace: list = []
    outward_fired = False
    if ray_direction is not None:
        outward_trace, outward_fired = _outward_probe(core, ray_direction, seed, n_jobs)

    valid = [s for s in stats if np.isfinite(s.max_ratio)]
    radius_fired = len(valid) >= 2 and valid[-1].max_ratio >= 10.0 * valid[0].max_ratio
    if radius_fired or inward_fired or outward_fired:
        verdict = VerdictHint.DIVERGENCE
    elif len(valid) >= 2 and abs(valid[-1].max_ratio - valid[-2].max_ratio) <= \
            0.2 * max(valid[-1].max_ratio, valid[-2].max_ratio):
        verdict = VerdictHint.BOUNDED
    else:
        verdict = VerdictHint.INCONCLUSIVE

    return CertifyReport(
        radius_stats=stats,
        sup_ratio=float(sup_ratio),
        verdict=verdict,
        inward_trace=inward_trace,
        outward_trace=outward_trace,
        inward_slope=float(slope) if np.isfinite(slope) else float("nan"),
        inward_span_decades=float(span),
        tau=None,
        seed=seed,
        tolerances={"solver_tol": opts.tol, "ratio_floor": RATIO_FLOOR,
                    "probe_floor": PROBE_FLOOR},
        samples=records,
        diagnostics={
            "n_unconverged": n_unconverged_total,
            "radius_growth_fired": bool(radius_fired),
            "inward_fired": bool(inward_fired),
            "outward_fired": bool(outward_fired),
        },
    )


# ---------------------------------------------------------------------------
# uniformity constant of the normal-cone preimage inclusion
# ---------------------------------------------------------------------------


def _min_norm_preimage(problem: AffineInclusion, w_hat: np.ndarray,
                       max_iter: int = 4000, tol: float = 1e-11) -> float:
    """min { ||u|| : A^T u = w_hat, u in polar(K) } via Dykstra's scheme."""
    A = problem.A
    pc = polar(problem.cone)
    B = A.T  # the affine constraint matrix
    Bp = np.linalg.pinv(B)

    def proj_affine(u):
        return u - Bp @ (B @ u - w_hat)

    x = np.zeros(problem.m)
    p = np.zeros(problem.m)
    q = np.zeros(problem.m)
    for _ in range(max_iter):
        y = polar_project(pc, x + p)
        p = x + p - y
        x_new = proj_affine(y + q)
        q = y + q - x_new
        if np.linalg.norm(x_new - x) <= tol * (1.0 + np.linalg.norm(x_new)):
            x = x_new
            break
        x = x_new
    return float(np.linalg.norm(x))


def _polar_boundary_mesh(problem: AffineInclusion, seed: int, size: int = 48) -> list[np.ndarray]:
    """Unit sample of the polar cone: boundary normals plus interior points."""
    cone = problem.cone
    pc = polar(cone)
    mesh: list[np.ndarray] = []
    gen = streams.substream(seed, streams.TAU_MESH)
    # boundary of the polar = normal directions at boundary points of K
    while len(mesh) < (2 * size) // 3:
        g = gen.standard_normal(cone.m) * 2.0
        if margin(cone, g) >= 0.0:
            continue
        zb = project(cone, g)
        nz = np.linalg.norm(zb)
        if nz < 1e-9:
            continue
        mesh.append(normal_ray(cone, zb / nz, tol=1e-7).direction)
    while len(mesh) < size:
        g = gen.standard_normal(cone.m) * 2.0
        u = polar_project(pc, g)
        nu = np.linalg.norm(u)
        if nu < 1e-9:
            continue
        mesh.append(u / nu)
    return mesh


def _apex_tau(problem: AffineInclusion, seed: int) -> tuple[float, int]:
    """Uniformity constant at solution points mapping to the cone apex.

    The normal cone there is the whole polar cone; it is sampled on a
    boundary mesh plus interior points, and each sampled image direction
    is re-covered by its minimal-norm preimage inside the polar.
    """
    worst = 0.0
    degenerate = 0
    a_scale = max(1.0, operator_norm(problem.A))
    for u in _polar_boundary_mesh(problem, seed):
        w = problem.A.T @ u
        nw = np.linalg.norm(w)
        if nw <= 1e-12 * a_scale:
            degenerate += 1
            continue
        sigma = _min_norm_preimage(problem, w / nw)
        worst = max(worst, sigma)
    return worst, degenerate


def _tau_at_point(problem: AffineInclusion, x: np.ndarray, a_scale: float):
    """Classify the feasible point and return ('kind', tau or None)."""
    z = problem.map(x)
    member = classify_point(problem.cone, z, tol=1e-7)
    if member.point_class == PointClass.INTERIOR:
        return "interior", None
    scale = max(1.0, float(np.linalg.norm(problem.b)))
    if np.linalg.norm(z) <= 1e-7 * scale:
        return "apex", None
    if member.point_class == PointClass.OUTSIDE:
        return "interior", None  # projection noise; no normal direction
    d = normal_ray(problem.cone, z, tol=1e-7).direction
    v = problem.A.T @ d
    nv = np.linalg.norm(v)
    if nv <= 1e-12 * a_scale:
        return "degenerate", None
    return "boundary", 1.0 / nv


def tau_estimate(problem: AffineInclusion, n_points: int, seed: int, *,
                 ray_direction=None, opts: SolveOpts | None = None) -> TauEstimate:
    """Sampled uniformity constant for recovering unit normal-cone images
    from bounded preimages.

    At boundary solution points the normal cone is a ray with unit
    generator d, and the minimal constant is 1 / ||A^T d||; at apex
    points the polar cone is meshed and minimal-norm preimages are
    computed.  An outward sweep along a supplied boundary-ray direction
    detects constants that grow without bound at infinity.
    """
    opts = opts or SolveOpts(seed=seed)
    core = _SplittingCore(problem, opts)
    a_scale = max(1.0, operator_norm(problem.A))
    radii_cycle = [1.0, 10.0, 100.0]
    X0 = np.stack([
        streams.ball_point(streams.substream(seed, streams.TAU, j), problem.n,
                           radii_cycle[j % len(radii_cycle)])
        for j in range(n_points)
    ])
    X, _, _ = _batched_dists(core, X0, 1)
    est = TauEstimate(value=0.0, unbounded=False)
    apex_needed = False
    for j in range(n_points):
        kind, tau = _tau_at_point(problem, X[j], a_scale)
        if kind == "interior":
            est.n_interior += 1
        elif kind == "degenerate":
            est.n_degenerate += 1
        elif kind == "apex":
            est.n_apex += 1
            apex_needed = True
        else:
            est.n_boundary += 1
            est.value = max(est.value, tau)
    if apex_needed:
        apex_val, apex_degen = _apex_tau(problem, seed)
        est.value = max(est.value, apex_val)
        est.n_degenerate += apex_degen

    if ray_direction is not None:
        d = np.asarray(ray_direction, dtype=float)
        x_d, *_ = np.linalg.lstsq(problem.A, d, rcond=None)
        nAx = np.linalg.norm(problem.A @ x_d)
        if nAx >= 1e-12:
            x_d = x_d / nAx
            x_dir = x_d / np.linalg.norm(x_d)
            dirs = _transverse_directions(x_dir, seed, 4)
            for R in (10.0, 1e2, 1e3, 1e4, 1e5):
                pts = np.stack([R * x_d + np.sqrt(R) * v for v in dirs])
                Xs, _, _ = _batched_dists(core, pts, 1)
                taus = []
                for i in range(Xs.shape[0]):
                    kind, tau = _tau_at_point(problem, Xs[i], a_scale)
                    if kind == "boundary":
                        taus.append(tau)
                if taus:
                    est.sweep.append((R, max(taus)))
            if len(est.sweep) >= 3:
                vals = [t for _, t in est.sweep]
                growing = all(vals[i + 1] > vals[i] for i in range(len(vals) - 1))
                if growing and vals[-1] >= 10.0 * vals[0]:
                    est.unbounded = True
                est.value = max(est.value, max(vals))
    if est.value > 1e8:
        est.unbounded = True
    return est


def convex_lower_bound_distance(f_value: float, grad_norm: float) -> float:
    """Distance lower bound max(f, 0) / ||g|| for sublevel sets of convex f.

    A subgradient inequality bound: any point of {f <= 0} is at least
    this far away.  ZeroGradient with positive f is itself divergence
    evidence (a flat positive slice).
    """
    if grad_norm <= 1e-14:
        if f_value > 0.0:
            raise ZeroGradient("positive value with vanishing subgradient")
        return 0.0
    if grad_norm < 0.0:
        raise ValueError("gradient norm must be nonnegative")
    return max(f_value, 0.0) / grad_norm
