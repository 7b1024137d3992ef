"""Exact and numerical primitives for smooth convex cones.

Supported cones in R^m:

* second-order cone  {(t, u) : t >= ||u||_2}
* p-cone             {(t, u) : t >= ||u||_p},  1 < p < inf
* circular cone      {(t, u) : t*tan(theta) >= ||u||_2},  0 < theta < pi/2
  (equivalent, for t >= 0, to t >= cos(theta)*||(t,u)||)
* nonnegative orthant in R^2

Each cone K is represented through a concave, positively homogeneous
margin function phi with K = {z : phi(z) >= 0}.  Projections are exact
closed forms except for the p-cone (p != 2), which reduces to a scalar
root-finding problem in the boundary multiplier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_TOL = 1e-9

# coordinates this much smaller than the block norm are treated as exactly
# zero when differentiating ||.||_p with p < 2 (the limit value)
_PNORM_ZERO = 1e-14


class ConeError(ValueError):
    """Invalid cone parameters or malformed input."""


class DimensionMismatch(ConeError):
    pass


class ApexNotRay(ConeError):
    """Normal cone at the apex is the full polar cone, not a ray."""


class NotOnBoundary(ConeError):
    pass


class CollinearInputs(ConeError):
    pass


class SolverFailure(RuntimeError):
    """A numerical subroutine failed to converge."""


class Kind(str, Enum):
    SECOND_ORDER = "second_order"
    P_CONE = "p_cone"
    CIRCULAR = "circular"
    ORTHANT = "orthant"


@dataclass(frozen=True)
class ConeSpec:
    """Descriptor of a supported regular cone.

    ``p`` is present iff kind is P_CONE, ``theta`` iff kind is CIRCULAR.
    The orthant is only accepted in R^2.
    """

    kind: Kind
    m: int
    p: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ConeError(f"ambient dimension must be an integer >= 2, got {self.m}")
        if self.kind == Kind.P_CONE:
            if self.p is None or not (1.0 < self.p < math.inf):
                raise ConeError(f"p-cone exponent must lie in (1, inf), got {self.p}")
            if self.theta is not None:
                raise ConeError("theta is only valid for circular cones")
        elif self.kind == Kind.CIRCULAR:
            if self.theta is None or not (0.0 < self.theta < math.pi / 2):
                raise ConeError(f"circular-cone angle must lie in (0, pi/2), got {self.theta}")
            if self.p is not None:
                raise ConeError("p is only valid for p-cones")
        else:
            if self.p is not None or self.theta is not None:
                raise ConeError(f"{self.kind.value} cone takes no p/theta parameters")
            if self.kind == Kind.ORTHANT and self.m != 2:
                raise ConeError("orthant cones are only supported in R^2")


def second_order(m: int) -> ConeSpec:
    return ConeSpec(Kind.SECOND_ORDER, m)


def p_cone(m: int, p: float) -> ConeSpec:
    return ConeSpec(Kind.P_CONE, m, p=float(p))


def circular(m: int, theta: float) -> ConeSpec:
    return ConeSpec(Kind.CIRCULAR, m, theta=float(theta))


def orthant2() -> ConeSpec:
    return ConeSpec(Kind.ORTHANT, 2)


class PointClass(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class Membership:
    point_class: PointClass
    margin: float


@dataclass(frozen=True)
class NormalRay:
    """Unit generator of the normal cone at a non-apex boundary point."""

    direction: np.ndarray
    valid_at: np.ndarray


@dataclass(frozen=True)
class PolarCone:
    """The polar cone, expressed as a reflection of a supported cone.

    All supported polars are of the form -C for a supported ConeSpec C,
    so membership of z in the polar is membership of -z in ``base``.
    """

    base: ConeSpec
    reflected: bool = True


def _check_dim(cone: ConeSpec, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (cone.m,):
        raise DimensionMismatch(f"expected a vector of length {cone.m}, got shape {z.shape}")
    return z


def pnorm(u: np.ndarray, p: float) -> float:
    """||u||_p for p in (0, inf); scale-normalized for overflow safety."""
    a = np.abs(np.asarray(u, dtype=float))
    top = a.max(initial=0.0)
    if top == 0.0:
        return 0.0
    return float(top * np.sum((a / top) ** p) ** (1.0 / p))


def raw_pcone_margin(z: np.ndarray, p: float) -> float:
    """z1 - ||z2:||_p without parameter validation.

    Used by the polar-exponent validation suite, which must be able to
    evaluate candidate exponents outside (1, inf).
    """
    z = np.asarray(z, dtype=float)
    return float(z[0] - pnorm(z[1:], p))


def margin(cone: ConeSpec, z: np.ndarray) -> float:
    """Signed margin phi(z): concave, positively homogeneous, K = {phi >= 0}."""
    z = _check_dim(cone, z)
    if cone.kind == Kind.SECOND_ORDER:
        return float(z[0] - np.linalg.norm(z[1:]))
    if cone.kind == Kind.P_CONE:
        return raw_pcone_margin(z, cone.p)
    if cone.kind == Kind.CIRCULAR:
        return float(z[0] * math.tan(cone.theta) - np.linalg.norm(z[1:]))
    return float(min(z[0], z[1]))


def margin_gradient(cone: ConeSpec, z: np.ndarray) -> np.ndarray:
    """A supergradient of the margin at z (the gradient wherever smooth)."""
    z = _check_dim(cone, z)
    g = np.zeros(cone.m)
    if cone.kind == Kind.ORTHANT:
        g[0 if z[0] <= z[1] else 1] = 1.0
        return g
    u = z[1:]
    nu = np.linalg.norm(u)
    if cone.kind == Kind.CIRCULAR:
        g[0] = math.tan(cone.theta)
        if nu > 0.0:
            g[1:] = -u / nu
        return g
    g[0] = 1.0
    p = 2.0 if cone.kind == Kind.SECOND_ORDER else cone.p
    if p == 2.0:
        if nu > 0.0:
            g[1:] = -u / nu
        return g
    npu = pnorm(u, p)
    if npu > 0.0:
        a = np.abs(u)
        live = a >= _PNORM_ZERO * npu
        grad = np.zeros_like(u)
        grad[live] = np.sign(u[live]) * (a[live] / npu) ** (p - 1.0)
        g[1:] = -grad
    return g


def classify_point(cone: ConeSpec, z: np.ndarray, tol: float = DEFAULT_TOL) -> Membership:
    """Interior/Boundary/Outside with the margin normalized by max(1, ||z||)."""
    if tol <= 0.0:
        raise ConeError(f"tolerance must be positive, got {tol}")
    z = _check_dim(cone, z)
    phi = margin(cone, z)
    scaled = phi / max(1.0, float(np.linalg.norm(z)))
    if scaled > tol:
        cls = PointClass.INTERIOR
    elif scaled < -tol:
        cls = PointClass.OUTSIDE
    else:
        cls = PointClass.BOUNDARY
    return Membership(cls, phi)


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------


def _project_slope_cone(z: np.ndarray, beta: float) -> np.ndarray:
    """Projection onto {(t, u) : beta*t >= ||u||_2} (beta = 1: second-order).

    Three regimes: inside -> identity, inside the polar -> apex, otherwise
    project onto the nearest boundary ray (1, beta*uhat)/sqrt(1+beta^2).
    """
    t, u = z[0], z[1:]
    r = np.linalg.norm(u)
    if beta * t >= r:
        return z.copy()
    if t + beta * r <= 0.0:
        return np.zeros_like(z)
    coef = (t + beta * r) / (1.0 + beta * beta)
    out = np.empty_like(z)
    out[0] = coef
    out[1:] = coef * beta * (u / r)
    return out


def _newton_bisect(fun, lo: float, hi: float, flo: float, fhi: float,
                   tol: float, max_iter: int):
    """Safeguarded Newton on a bracketed scalar root; bisection fallback.

    ``fun`` returns (value, derivative).  Iterates until |value| <= tol.
    """
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f, df = fun(x)
        if df != 0.0 and np.isfinite(df):
            step = x - f / df
        else:
            step = math.nan
        if abs(f) <= tol:
            # one guarded polish step; the residual is already below tol
            return step if lo < step < hi else x
        if f > 0.0:
            hi = x
        else:
            lo = x
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        x = step
    raise SolverFailure(f"scalar root-finder did not reach |residual| <= {tol}")


def _pcone_w_of_mu(a: np.ndarray, mu: float, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Solve w + mu*w^(p-1) = a coordinatewise on w in [0, a].

    Returns (w, dw/dmu).  Vectorized safeguarded Newton; the map is strictly
    increasing in w so the bracket [0, a] always contains the unique root.
    """
    if mu == 0.0:
        return a.copy(), np.zeros_like(a)
    # min of two upper bounds for the root: exact as mu -> 0 and mu -> inf
    with np.errstate(over="ignore", divide="ignore"):
        asym = np.where(a > 0.0, (a / mu) ** (1.0 / (p - 1.0)), 0.0)
    w = np.minimum(a, np.nan_to_num(asym, nan=0.0, posinf=np.inf))
    lo = np.zeros_like(a)
    hi = a.copy()
    for _ in range(80):
        wp = np.where(w > 0.0, w ** (p - 1.0), 0.0)
        f = w + mu * wp - a
        lo = np.where(f < 0.0, w, lo)
        hi = np.where(f > 0.0, w, hi)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            dp = np.where(w > 0.0, w ** (p - 2.0), np.inf)
        df = 1.0 + mu * (p - 1.0) * dp
        step = np.where(np.isfinite(df), w - f / df, 0.5 * (lo + hi))
        bad = (step <= lo) | (step >= hi) | ~np.isfinite(step)
        w_new = np.where(bad, 0.5 * (lo + hi), step)
        if np.all(np.abs(w_new - w) <= 1e-17 + 1e-16 * np.abs(w)):
            w = w_new
            break
        w = w_new
    wp = np.where(w > 0.0, w ** (p - 1.0), 0.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        dpp = np.where(w > 0.0, w ** (p - 2.0), np.inf)
    denom = 1.0 + mu * (p - 1.0) * dpp
    dw = np.where(np.isfinite(denom) & (denom > 0.0), -wp / denom, 0.0)
    return w, dw


def _project_pcone(z: np.ndarray, p: float) -> np.ndarray:
    """p-cone projection via the scalar dual equation in mu = lambda / s^(p-1).

    With s = t + lambda the KKT system reduces to
        w_i + mu * w_i^(p-1) = |u_i|,   s = ||w||_p,   mu * s^(p-1) = s - t,
    and the last equation is solved for mu by safeguarded Newton with a
    bisection fallback (residual tolerance 1e-12 on the normalized data).
    """
    q = p / (p - 1.0)
    t, u = z[0], z[1:]
    if t - pnorm(u, p) >= 0.0:
        return z.copy()
    if -t >= pnorm(u, q):  # z in the polar cone -K_q
        return np.zeros_like(z)
    scale = float(np.linalg.norm(z))
    zs = z / scale
    ts, a = zs[0], np.abs(zs[1:])

    def residual(mu: float) -> tuple[float, float]:
        w, dw = _pcone_w_of_mu(a, mu, p)
        s = pnorm(w, p)
        if s == 0.0:
            return ts, 0.0
        ds_dw = (w / s) ** (p - 1.0)
        ds = float(np.dot(ds_dw, dw))
        g = mu * s ** (p - 1.0) - s + ts
        dg = s ** (p - 1.0) + mu * (p - 1.0) * s ** (p - 2.0) * ds - ds
        return g, dg

    # the multiplier spans many orders of magnitude near the polar
    # boundary, so root-find in x = log1p(mu) instead of mu itself
    def residual_log(x: float) -> tuple[float, float]:
        mu = math.expm1(x)
        g, dg = residual(mu)
        return g, dg * (1.0 + mu)

    flo = residual(0.0)[0]
    x_lo, x_hi, fhi = 0.0, 1.0, residual_log(1.0)[0]
    while fhi <= 0.0 and x_hi < 700.0:  # mu up to ~1e304
        x_lo, x_hi = x_hi, min(2.0 * x_hi, 700.0)
        fhi = residual_log(x_hi)[0]
    if fhi <= 0.0:
        # the point sits within float dust of the polar boundary; the
        # projection is indistinguishable from the apex at this precision
        return np.zeros_like(z)
    x = _newton_bisect(residual_log, x_lo, x_hi, flo, fhi, tol=1e-12, max_iter=200)
    w, _ = _pcone_w_of_mu(a, math.expm1(x), p)
    out = np.empty_like(z)
    out[0] = pnorm(w, p)
    out[1:] = np.sign(zs[1:]) * w
    return out * scale


def project(cone: ConeSpec, z: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the cone."""
    z = _check_dim(cone, z)
    if not np.all(np.isfinite(z)):
        raise ConeError("cannot project a non-finite vector")
    if cone.kind == Kind.SECOND_ORDER:
        return _project_slope_cone(z, 1.0)
    if cone.kind == Kind.CIRCULAR:
        return _project_slope_cone(z, math.tan(cone.theta))
    if cone.kind == Kind.ORTHANT:
        return np.maximum(z, 0.0)
    return _project_pcone(z, cone.p)


def distance(cone: ConeSpec, z: np.ndarray) -> float:
    """Euclidean distance to the cone."""
    return float(np.linalg.norm(_check_dim(cone, z) - project(cone, z)))


def moreau_decompose(cone: ConeSpec, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split z = zK + zP with zK in K, zP in the polar, <zK, zP> = 0."""
    zk = project(cone, z)
    return zk, z - zk


# ---------------------------------------------------------------------------
# polarity
# ---------------------------------------------------------------------------


def holder_conjugate(p: float) -> float:
    """Exponent q with 1/p + 1/q = 1.

    This is the relation validated by the polar-pairing suite; the
    alternative 1/p + 1/q = 2 fails it (see selftest 'polar-pairing').
    """
    return p / (p - 1.0)


def polar(cone: ConeSpec) -> PolarCone:
    """The polar cone, as a reflected supported descriptor."""
    if cone.kind == Kind.SECOND_ORDER:
        return PolarCone(second_order(cone.m))
    if cone.kind == Kind.P_CONE:
        return PolarCone(p_cone(cone.m, holder_conjugate(cone.p)))
    if cone.kind == Kind.CIRCULAR:
        return PolarCone(circular(cone.m, math.pi / 2 - cone.theta))
    return PolarCone(orthant2())


def polar_margin(pc: PolarCone, z: np.ndarray) -> float:
    z = np.asarray(z, dtype=float)
    return margin(pc.base, -z if pc.reflected else z)


def polar_margin_gradient(pc: PolarCone, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if pc.reflected:
        return -margin_gradient(pc.base, -z)
    return margin_gradient(pc.base, z)


def polar_project(pc: PolarCone, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if pc.reflected:
        return -project(pc.base, -z)
    return project(pc.base, z)


def polar_classify_point(pc: PolarCone, z: np.ndarray, tol: float = DEFAULT_TOL) -> Membership:
    z = np.asarray(z, dtype=float)
    return classify_point(pc.base, -z if pc.reflected else z, tol)


def bipolar(cone: ConeSpec) -> ConeSpec:
    """polar(polar(cone)) folded back to a plain descriptor.

    The two reflections cancel, so the result is directly comparable
    with the original cone.
    """
    return polar(polar(cone).base).base


# ---------------------------------------------------------------------------
# normal rays and strict convexity
# ---------------------------------------------------------------------------


def normal_ray(cone: ConeSpec, z: np.ndarray, tol: float = DEFAULT_TOL) -> NormalRay:
    """Unit generator of N_K(z) at a non-apex boundary point.

    The normal cone at such points of a smooth cone is the ray spanned by
    the negated margin gradient.  At the apex the normal cone is the full
    polar cone; represent it with ``polar(cone)`` instead.
    """
    z = _check_dim(cone, z)
    if np.linalg.norm(z) <= tol:
        raise ApexNotRay("normal cone at the apex is the polar cone, not a ray")
    member = classify_point(cone, z, tol)
    if member.point_class != PointClass.BOUNDARY:
        raise NotOnBoundary(f"point is {member.point_class.value} (margin {member.margin:.3e})")
    d = -margin_gradient(cone, z)
    nd = np.linalg.norm(d)
    if nd <= tol:
        raise SolverFailure("degenerate margin gradient on the boundary")
    return NormalRay(direction=d / nd, valid_at=z.copy())


def strict_convexity_probe(cone: ConeSpec, x: np.ndarray, y: np.ndarray,
                           tol: float = DEFAULT_TOL) -> bool:
    """True iff the open segment (x, y) enters the interior.

    Preconditions: x, y in K \\ {0} and not positive multiples of each
    other.  For the supported cones this always returns True, which is
    exactly the strict-convexity property the suite exercises.
    """
    x = _check_dim(cone, x)
    y = _check_dim(cone, y)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx <= tol or ny <= tol:
        raise ConeError("probe points must be nonzero")
    for v in (x, y):
        if classify_point(cone, v, tol).point_class == PointClass.OUTSIDE:
            raise ConeError("probe points must belong to the cone")
    cosang = float(np.dot(x, y) / (nx * ny))
    if cosang >= 1.0 - tol:
        raise CollinearInputs("probe points lie on a common ray")
    mid = 0.5 * (x + y)
    return margin(cone, mid) > tol * max(1.0, float(np.linalg.norm(mid)))


def interior_axis(cone: ConeSpec) -> np.ndarray:
    """A canonical unit interior direction."""
    if cone.kind == Kind.ORTHANT:
        return np.full(2, 1.0 / math.sqrt(2.0))
    e = np.zeros(cone.m)
    e[0] = 1.0
    return e


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------

_KIND_NAMES = {k.value for k in Kind}


def cone_to_json(cone: ConeSpec) -> dict:
    out: dict = {"kind": cone.kind.value, "m": cone.m}
    if cone.p is not None:
        out["p"] = cone.p
    if cone.theta is not None:
        out["theta"] = cone.theta
    return out


def cone_from_json(obj: dict) -> ConeSpec:
    """Strict decoder: unknown keys and missing/extra parameters are errors."""
    if not isinstance(obj, dict):
        raise ConeError(f"cone must be a JSON object, got {type(obj).__name__}")
    allowed = {"kind", "m", "p", "theta"}
    unknown = set(obj) - allowed
    if unknown:
        raise ConeError(f"unknown cone fields: {sorted(unknown)}")
    kind = obj.get("kind")
    if kind not in _KIND_NAMES:
        raise ConeError(f"cone kind must be one of {sorted(_KIND_NAMES)}, got {kind!r}")
    m = obj.get("m")
    if not isinstance(m, int) or isinstance(m, bool):
        raise ConeError(f"cone field 'm' must be an integer, got {m!r}")
    p = obj.get("p")
    theta = obj.get("theta")
    if p is not None and not isinstance(p, (int, float)):
        raise ConeError(f"cone field 'p' must be a number, got {p!r}")
    if theta is not None and not isinstance(theta, (int, float)):
        raise ConeError(f"cone field 'theta' must be a number, got {theta!r}")
    return ConeSpec(Kind(kind), m,
                    p=float(p) if p is not None else None,
                    theta=float(theta) if theta is not None else None)
