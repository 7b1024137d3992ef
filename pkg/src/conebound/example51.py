"""Built-in nonlinear counterexample: orthant-concave map on R^4.

The inclusion h(x) in R^2_+ with

    h1(x) = x1
    h2(x) = x4 - P(x1, x2, x3)

for the convex polynomial P below satisfies the interior-point condition
(h(1,0,0,3) = (1,1)) yet admits no Lipschitz global error bound.  This
module reproduces the checkable parts numerically: the interior-point
value, concavity of h relative to the orthant, the residual identity
against f = max(-h1, -h2), and a best-effort divergence search for the
unbounded modulus.  The divergence search uses a subgradient distance
lower bound and may legitimately come back inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as streams
from .certify import ZeroGradient, convex_lower_bound_distance
from .cones import distance, orthant2

CONE = orthant2()


def poly(x1: float, x2: float, x3: float) -> float:
    """The degree-16 convex polynomial coupling the first three variables."""
    return (x1 ** 16 + x2 ** 8 + x3 ** 6
            + x1 * x2 ** 3 * x3 ** 3
            + x1 ** 2 * x2 ** 4 * x3 ** 2
            + x2 ** 2 * x3 ** 4
            + x1 ** 4 * x3 ** 4
            + x1 ** 4 * x2 ** 6
            + x1 ** 2 + x2 ** 2 + x3 ** 2)


def poly_grad(x1: float, x2: float, x3: float) -> np.ndarray:
    return np.array([
        16 * x1 ** 15 + x2 ** 3 * x3 ** 3 + 2 * x1 * x2 ** 4 * x3 ** 2
        + 4 * x1 ** 3 * x3 ** 4 + 4 * x1 ** 3 * x2 ** 6 + 2 * x1,
        8 * x2 ** 7 + 3 * x1 * x2 ** 2 * x3 ** 3 + 4 * x1 ** 2 * x2 ** 3 * x3 ** 2
        + 2 * x2 * x3 ** 4 + 6 * x1 ** 4 * x2 ** 5 + 2 * x2,
        6 * x3 ** 5 + 3 * x1 * x2 ** 3 * x3 ** 2 + 2 * x1 ** 2 * x2 ** 4 * x3
        + 4 * x2 ** 2 * x3 ** 3 + 4 * x1 ** 4 * x3 ** 3 + 2 * x3,
    ])


def h(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([x[0], x[3] - poly(x[0], x[1], x[2])])


def f_value(x: np.ndarray) -> float:
    """f = max(-h1, -h2); the solution set is {f <= 0}."""
    h1, h2 = h(x)
    return float(max(-h1, -h2))


def f_subgradient(x: np.ndarray) -> np.ndarray:
    """A subgradient of f (gradient of the active branch, first on ties)."""
    x = np.asarray(x, dtype=float)
    h1, h2 = h(x)
    if -h1 >= -h2:
        return np.array([-1.0, 0.0, 0.0, 0.0])
    g = np.empty(4)
    g[:3] = poly_grad(x[0], x[1], x[2])
    g[3] = -1.0
    return g


@dataclass
class Example51Report:
    scq_value: tuple[float, float]
    scq_interior: bool
    concavity_min_slack: float
    concavity_samples: int
    residual_max_err: float
    residual_samples: int
    comparability_min: float  # min of d / max(f, 0) over mixed-violation samples
    comparability_max: float
    divergence_max_ratio: float
    divergence_exceeds_1e3: bool
    zero_gradient_hits: int
    verdict: str
    seed: int
    diagnostics: dict = field(default_factory=dict)


def _concavity_check(gen: np.random.Generator, n_samples: int) -> float:
    """min over random triples of the componentwise concavity slack."""
    worst = np.inf
    for _ in range(n_samples):
        x = gen.uniform(-2.0, 2.0, 4)
        y = gen.uniform(-2.0, 2.0, 4)
        lam = gen.uniform()
        gap = h((1 - lam) * x + lam * y) - (1 - lam) * h(x) - lam * h(y)
        worst = min(worst, float(gap.min()))
    return worst


def _residual_identity_samples(gen: np.random.Generator, n_samples: int):
    """Sample points with at most one violated component of h.

    On this set d(h(x), R^2_+) = max(f(x), 0) exactly (a single violated
    coordinate contributes its full magnitude to the Euclidean distance).
    Both violation regimes and the feasible regime are exercised.
    """
    pts = []
    for k in range(n_samples):
        x = gen.uniform(-2.0, 2.0, 4)
        if k % 2 == 0:
            x[0] = abs(x[0])  # h1 >= 0; only h2 may be violated
        else:
            x[3] = poly(x[0], x[1], x[2]) + abs(x[3])  # h2 >= 0
        pts.append(x)
    return pts


def example51_suite(seed: int = 42, n_samples: int = 1000,
                    n_rays: int = 32) -> Example51Report:
    """Run the full reproduction suite for the built-in example."""
    scq = h(np.array([1.0, 0.0, 0.0, 3.0]))
    scq_value = (float(scq[0]), float(scq[1]))
    scq_interior = bool(scq[0] > 0.0 and scq[1] > 0.0)

    gen_c = streams.substream(seed, streams.EXAMPLE51, 1)
    concavity_min = _concavity_check(gen_c, n_samples)

    gen_r = streams.substream(seed, streams.EXAMPLE51, 2)
    max_err = 0.0
    for x in _residual_identity_samples(gen_r, n_samples):
        d = distance(CONE, h(x))
        max_err = max(max_err, abs(d - max(f_value(x), 0.0)))

    # on unrestricted samples only the two-sided comparison holds:
    # max(f,0) <= d <= sqrt(2) * max(f,0)
    gen_m = streams.substream(seed, streams.EXAMPLE51, 3)
    comp_lo, comp_hi = np.inf, 0.0
    for _ in range(n_samples):
        x = gen_m.uniform(-2.0, 2.0, 4)
        fv = max(f_value(x), 0.0)
        if fv <= 1e-12:
            continue
        quot = distance(CONE, h(x)) / fv
        comp_lo = min(comp_lo, quot)
        comp_hi = max(comp_hi, quot)

    # divergence search: ratio lower bounds along rays with x1 <= 0
    gen_d = streams.substream(seed, streams.EXAMPLE51, 4)
    max_ratio = 0.0
    zero_grad = 0
    t_schedule = np.geomspace(0.5, 1e3, 14)
    for _ in range(n_rays):
        v = gen_d.standard_normal(4)
        v[0] = -abs(v[0])
        v /= np.linalg.norm(v)
        for t in t_schedule:
            x = t * v
            fv = f_value(x)
            if fv <= 0.0:
                continue
            res = distance(CONE, h(x))
            if res <= 1e-12:
                continue
            try:
                lb = convex_lower_bound_distance(fv, float(np.linalg.norm(f_subgradient(x))))
            except ZeroGradient:
                zero_grad += 1
                continue
            max_ratio = max(max_ratio, lb / res)
    exceeds = bool(max_ratio > 1e3 or zero_grad > 0)
    verdict = "DivergenceEvidence" if exceeds else "Inconclusive"

    return Example51Report(
        scq_value=scq_value,
        scq_interior=scq_interior,
        concavity_min_slack=concavity_min,
        concavity_samples=n_samples,
        residual_max_err=max_err,
        residual_samples=n_samples,
        comparability_min=float(comp_lo),
        comparability_max=float(comp_hi),
        divergence_max_ratio=float(max_ratio),
        divergence_exceeds_1e3=exceeds,
        zero_gradient_hits=zero_grad,
        verdict=verdict,
        seed=seed,
        diagnostics={"n_rays": n_rays, "t_max": float(t_schedule[-1])},
    )
