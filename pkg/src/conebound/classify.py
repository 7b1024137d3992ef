"""Global error-bound classification for affine conic inclusions.

Decides where Im A sits relative to the cone (meets the interior, meets
only a boundary ray, or meets only at the origin) by a pair of convex
interior tests, then maps the instance to one of the decision cases

    T51           Im A meets int K              -> bound holds
    T52i/ii/iii   Im A meets K only at 0        -> holds/holds/fails
    T53i/ii/iii   Im A touches K along a ray    -> fails/fails/holds

together with the matching constraint-qualification verdict.  Every
case label comes with numerical witnesses; when the interior tests are
too close to call, the classifier refuses with Indeterminate rather
than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import rng as streams
from .cones import (
    ConeSpec,
    interior_axis,
    margin,
    margin_gradient,
    polar,
    polar_margin,
    polar_margin_gradient,
    project,
)
from .subspaces import (
    AffineInclusion,
    SubspaceBasis,
    contains_vector,
    image_basis,
    kernel_adjoint_basis,
    projection_residual,
)

EPS_CLASS = 1e-7


@dataclass(frozen=True)
class ClassifyOpts:
    eps: float = EPS_CLASS
    seed: int = 42
    restarts: int = 5
    max_iter: int = 20000
    patience: int = 500
    tol: float = 1e-9

    def __post_init__(self):
        if self.eps <= 0 or self.tol <= 0:
            raise ValueError("tolerances must be positive")


class TrichotomyClass(str, Enum):
    MEETS_INTERIOR = "MeetsInterior"
    BOUNDARY_RAY_ONLY = "BoundaryRayOnly"
    ZERO_ONLY = "ZeroOnly"
    INDETERMINATE = "Indeterminate"


@dataclass
class BallMaxResult:
    value: float
    argmax: np.ndarray
    iters: int
    converged: bool


@dataclass
class Trichotomy:
    kind: TrichotomyClass
    witness: np.ndarray | None
    primal_value: float
    dual_value: float
    solver_iters: int
    reason: str = ""


class Case(str, Enum):
    T51 = "T51"
    T52I = "T52i"
    T52II = "T52ii"
    T52III = "T52iii"
    T53I = "T53i"
    T53II = "T53ii"
    T53III = "T53iii"
    DEGENERATE_A_ZERO = "DegenerateAZero"
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"


class Geb(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    TRIVIALLY_HOLDS = "TriviallyHolds"
    UNKNOWN = "Unknown"


class Acq(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNKNOWN = "Unknown"


# case -> (global error bound, constraint qualification)
CASE_VERDICTS: dict[Case, tuple[Geb, Acq]] = {
    Case.T51: (Geb.HOLDS, Acq.HOLDS),
    Case.T52I: (Geb.HOLDS, Acq.HOLDS),
    Case.T52II: (Geb.HOLDS, Acq.HOLDS),
    Case.T52III: (Geb.FAILS, Acq.FAILS),
    Case.T53I: (Geb.FAILS, Acq.FAILS),
    Case.T53II: (Geb.FAILS, Acq.HOLDS),
    Case.T53III: (Geb.HOLDS, Acq.HOLDS),
    Case.DEGENERATE_A_ZERO: (Geb.TRIVIALLY_HOLDS, Acq.HOLDS),
    Case.INFEASIBLE: (Geb.UNKNOWN, Acq.UNKNOWN),
    Case.INDETERMINATE: (Geb.UNKNOWN, Acq.UNKNOWN),
}


@dataclass
class Witnesses:
    slater: np.ndarray | None = None
    ray: np.ndarray | None = None
    b_residual: float = 0.0
    rank_im_a: int = 0


@dataclass
class Classification:
    case: Case
    geb: Geb
    acq: Acq
    witnesses: Witnesses
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# concave maximization over the unit ball of a subspace
# ---------------------------------------------------------------------------


def _ascend_ball(f, g, Q: np.ndarray, y0: np.ndarray, opts: ClassifyOpts) -> tuple[float, np.ndarray, int]:
    """Projected supergradient ascent of y -> f(Q y) over ||y|| <= 1.

    Diminishing 1/sqrt(k) steps with best-iterate tracking and running
    averages; stops when the best value stalls for ``opts.patience``
    iterations or clearly exceeds the decision threshold.
    """
    y = y0.copy()
    best_v, best_y = f(Q @ y), y.copy()
    avg = y.copy()
    stall = 0
    certify_at = max(1e-4, 100.0 * opts.eps)
    it = 0
    for it in range(1, opts.max_iter + 1):
        grad = Q.T @ g(Q @ y)
        ng = np.linalg.norm(grad)
        if ng == 0.0:
            break
        y = y + (1.0 / np.sqrt(it)) * grad / ng
        ny = np.linalg.norm(y)
        if ny > 1.0:
            y = y / ny
        avg = avg + (y - avg) / (it + 1.0)
        improved = False
        for cand in (y,) if it % 25 else (y, avg):
            v = f(Q @ cand)
            if v > best_v + opts.tol * 1e-3:
                best_v, best_y = v, cand.copy()
                improved = True
        stall = 0 if improved else stall + 1
        if best_v > certify_at or stall >= opts.patience:
            break
    return best_v, best_y, it


def _polish_ball(f, g, Q: np.ndarray, y: np.ndarray, opts: ClassifyOpts) -> tuple[float, np.ndarray]:
    """Adaptive-step projected gradient refinement from a good iterate."""
    v = f(Q @ y)
    step = 0.5
    for _ in range(400):
        grad = Q.T @ g(Q @ y)
        ng = np.linalg.norm(grad)
        if ng == 0.0 or step < 1e-16:
            break
        cand = y + step * grad / ng
        ncand = np.linalg.norm(cand)
        if ncand > 1.0:
            cand = cand / ncand
        vc = f(Q @ cand)
        if vc > v:
            v, y = vc, cand
            step *= 1.3
        else:
            step *= 0.4
    return v, y


def ball_concave_max(f, g, basis: SubspaceBasis, opts: ClassifyOpts,
                     stream_tag: int, warm_start: np.ndarray | None = None) -> BallMaxResult:
    """Maximize a concave positively homogeneous functional over the unit
    ball of the given subspace.

    ``f``/``g`` evaluate the functional and a supergradient at ambient
    points.  The origin is always a candidate, so the returned value is
    exactly 0.0 whenever the subspace never enters {f > 0}; a strictly
    positive value is a certificate (it is attained at the returned
    point).  Restarts stop early once the value is decisively positive.
    """
    if basis.rank == 0:
        return BallMaxResult(0.0, np.zeros(basis.ambient_dim), 0, True)
    Q = basis.Q
    best = BallMaxResult(0.0, np.zeros(basis.ambient_dim), 0, True)
    starts = [] if warm_start is None else [warm_start]
    for r in range(opts.restarts):
        gen = streams.substream(opts.seed, streams.BALLMAX, stream_tag, r)
        starts.append(streams.sphere_point(gen, basis.rank))
    total = 0
    for y0 in starts:
        v, y, it = _ascend_ball(f, g, Q, y0, opts)
        v, y = _polish_ball(f, g, Q, y, opts)
        total += it
        if v > best.value:
            best = BallMaxResult(v, Q @ y, total, True)
        if best.value > max(1e-4, 100.0 * opts.eps):
            break
    best.iters = total
    return best


def _axis_start(cone: ConeSpec, basis: SubspaceBasis) -> np.ndarray | None:
    """Pull the cone axis back into subspace coordinates as a warm start."""
    y = basis.Q.T @ interior_axis(cone)
    ny = np.linalg.norm(y)
    if ny < 1e-12:
        return None
    return y / ny


# ---------------------------------------------------------------------------
# trichotomy
# ---------------------------------------------------------------------------


def _recover_boundary_ray(cone: ConeSpec, basis: SubspaceBasis,
                          opts: ClassifyOpts) -> np.ndarray:
    """Unit direction of the single ray where the subspace touches the cone.

    Maximizes the margin over the unit sphere of the subspace (adaptive
    spherical ascent from several restarts), then purifies with 20
    alternating steps of cone projection, subspace projection and
    renormalization.
    """
    Q = basis.Q
    r = basis.rank

    def sphere_value(y):
        return margin(cone, Q @ y)

    best_y, best_v = None, -np.inf
    starts = []
    ax = _axis_start(cone, basis)
    if ax is not None:
        starts.append(ax)
    for k in range(max(3, opts.restarts)):
        gen = streams.substream(opts.seed, streams.RAY, k)
        starts.append(streams.sphere_point(gen, r))
    for y in starts:
        v = sphere_value(y)
        step = 0.5
        for _ in range(4000):
            grad = Q.T @ margin_gradient(cone, Q @ y)
            tang = grad - np.dot(grad, y) * y
            if np.linalg.norm(tang) < 1e-16 or step < 1e-16:
                break
            cand = y + step * tang
            cand = cand / np.linalg.norm(cand)
            vc = sphere_value(cand)
            if vc > v:
                v, y = vc, cand
                step *= 1.3
            else:
                step *= 0.4
        if v > best_v:
            best_v, best_y = v, y
    d = Q @ best_y
    for _ in range(20):
        d = project(cone, d)
        d = basis.project(d)
        nd = np.linalg.norm(d)
        if nd < 1e-14:
            break
        d = d / nd
    return d


def trichotomy(im_basis: SubspaceBasis, ker_basis: SubspaceBasis,
               cone: ConeSpec, opts: ClassifyOpts | None = None) -> Trichotomy:
    """Classify the position of span(im_basis) relative to the cone.

    Primal test: can the subspace reach the cone interior?  Dual test on
    the orthogonal complement against the polar cone settles the
    zero-intersection case; if neither test is conclusively positive the
    intersection is the boundary ray, which is then recovered explicitly.
    """
    opts = opts or ClassifyOpts()
    if im_basis.ambient_dim != cone.m:
        raise ValueError("basis ambient dimension does not match the cone")
    pc = polar(cone)

    def f_primal(z):
        return margin(cone, z)

    def g_primal(z):
        return margin_gradient(cone, z)

    def f_dual(z):
        return polar_margin(pc, z)

    def g_dual(z):
        return polar_margin_gradient(pc, z)

    axis_margin = margin(cone, interior_axis(cone))
    if 10.0 * opts.eps >= axis_margin:
        return Trichotomy(TrichotomyClass.INDETERMINATE, None, np.nan, np.nan, 0,
                          reason="ambiguity band covers the achievable margin range")

    primal = ball_concave_max(f_primal, g_primal, im_basis, opts, stream_tag=1,
                              warm_start=_axis_start(cone, im_basis))
    polar_axis = -interior_axis(pc.base)
    y_dual = None
    if ker_basis.rank:
        y0 = ker_basis.Q.T @ polar_axis
        ny0 = np.linalg.norm(y0)
        y_dual = y0 / ny0 if ny0 > 1e-12 else None
    dual = ball_concave_max(f_dual, g_dual, ker_basis, opts, stream_tag=2,
                            warm_start=y_dual)
    iters = primal.iters + dual.iters

    band_lo, band_hi = opts.eps / 10.0, opts.eps * 10.0
    if (band_lo <= primal.value <= band_hi) and (band_lo <= dual.value <= band_hi):
        return Trichotomy(TrichotomyClass.INDETERMINATE, None, primal.value,
                          dual.value, iters, reason="both interior tests inside the ambiguity band")
    if primal.value > opts.eps:
        return Trichotomy(TrichotomyClass.MEETS_INTERIOR, primal.argmax,
                          primal.value, dual.value, iters)
    if dual.value > opts.eps:
        return Trichotomy(TrichotomyClass.ZERO_ONLY, None, primal.value,
                          dual.value, iters)
    ray = _recover_boundary_ray(cone, im_basis, opts)
    return Trichotomy(TrichotomyClass.BOUNDARY_RAY_ONLY, ray, primal.value,
                      dual.value, iters)


# ---------------------------------------------------------------------------
# affine slice interior test
# ---------------------------------------------------------------------------


@dataclass
class AffineTestResult:
    witness: np.ndarray | None
    value: float
    unbounded: bool
    iters: int


def affine_interior_test(im_basis: SubspaceBasis, b: np.ndarray, cone: ConeSpec,
                         opts: ClassifyOpts | None = None) -> AffineTestResult:
    """Maximize margin(b + Q y) over the subspace coordinates.

    Unconstrained concave maximization; bounded above whenever the
    subspace misses the cone interior.  Returns a witness point when the
    optimum exceeds the decision threshold.  A negative optimum bounds
    the whole affine slice away from the cone (infeasibility evidence).
    """
    opts = opts or ClassifyOpts()
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.linalg.norm(b)))

    if im_basis.rank == 0:
        v = margin(cone, b)
        return AffineTestResult(b.copy() if v > opts.eps else None, v, False, 0)

    Q = im_basis.Q

    def value(y):
        return margin(cone, b + Q @ y)

    y = np.zeros(im_basis.rank)
    v = value(y)
    step = 1.0 * scale
    unbounded = False
    it = 0
    stall = 0
    for it in range(opts.max_iter):
        if v > max(1e-3 * scale, 100.0 * opts.eps):
            break  # already a definitive interior witness
        grad = Q.T @ margin_gradient(cone, b + Q @ y)
        ng = np.linalg.norm(grad)
        if ng == 0.0 or step < 1e-16 * scale:
            break
        cand = y + step * grad / ng
        vc = value(cand)
        if vc > v:
            v, y = vc, cand
            step *= 1.4
            stall = 0
        else:
            step *= 0.5
            stall += 1
        if np.linalg.norm(y) > 1e7 * scale:
            unbounded = True
            break
        if stall > 200:
            break
    witness = b + Q @ y if (v > opts.eps or unbounded) else None
    return AffineTestResult(witness, v, unbounded, it)


# ---------------------------------------------------------------------------
# the decision tree
# ---------------------------------------------------------------------------


def classify_geb(problem: AffineInclusion, opts: ClassifyOpts | None = None) -> Classification:
    """Classify an affine inclusion instance and its error-bound verdict.

    Decision order: degenerate A = 0 first, then the subspace trichotomy,
    then the per-branch sub-splits on b.  Feasibility of tangent cases is
    confirmed by projecting the origin onto the solution set; the solver
    import is deferred to keep module dependencies one-way.
    """
    opts = opts or ClassifyOpts()
    cone = problem.cone
    im = image_basis(problem.A)
    ker = kernel_adjoint_basis(problem.A)
    b_res = projection_residual(im, problem.b)
    wit = Witnesses(b_residual=b_res, rank_im_a=im.rank)
    diag: dict = {"eps": opts.eps, "seed": opts.seed}

    def done(case: Case, **extra):
        geb, acq = CASE_VERDICTS[case]
        diag.update(extra)
        return Classification(case, geb, acq, wit, diag)

    if im.rank == 0:
        # S is everything or nothing; the rank-based case split needs A != 0
        if margin(cone, problem.b) >= -opts.eps * max(1.0, float(np.linalg.norm(problem.b))):
            return done(Case.DEGENERATE_A_ZERO)
        return done(Case.INFEASIBLE)

    tri = trichotomy(im, ker, cone, opts)
    diag["primal_value"] = tri.primal_value
    diag["dual_value"] = tri.dual_value
    diag["solver_iters"] = tri.solver_iters

    if tri.kind == TrichotomyClass.INDETERMINATE:
        diag["reason"] = tri.reason
        return done(Case.INDETERMINATE)

    if tri.kind == TrichotomyClass.MEETS_INTERIOR:
        wit.slater = tri.witness
        aff = affine_interior_test(im, problem.b, cone, opts)
        if aff.witness is not None:
            wit.slater = aff.witness
        return done(Case.T51)

    if tri.kind == TrichotomyClass.ZERO_ONLY:
        aff = affine_interior_test(im, problem.b, cone, opts)
        diag["affine_value"] = aff.value
        if aff.witness is not None:
            wit.slater = aff.witness
            return done(Case.T52I)
        if contains_vector(im, problem.b):
            return done(Case.T52II)
        if not _feasible_probe(problem, opts):
            return done(Case.INFEASIBLE)
        return done(Case.T52III)

    # boundary-ray branch
    wit.ray = tri.witness
    if im.rank == 1:
        return done(Case.T53III)
    if contains_vector(im, problem.b):
        return done(Case.T53I)
    return done(Case.T53II)


def _feasible_probe(problem: AffineInclusion, opts: ClassifyOpts) -> bool:
    """Try to reach the solution set from the origin."""
    from .certify import InfeasibleProblem, SolveOpts, project_onto_solution_set

    try:
        project_onto_solution_set(problem, np.zeros(problem.n),
                                  SolveOpts(seed=opts.seed))
    except InfeasibleProblem:
        return False
    return True
