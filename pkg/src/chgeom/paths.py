"""Paths of points, their lifts and flows, and bendings of point pairs.

A path of points admits a normalized lift: representative vectors chosen so
consecutive pairings are real and positive.  The velocity of such a lift,
made orthogonal to the base point, defines a tangent whose `hat` is a Lie
algebra element; integrating it along the path produces the isometry that
transports the reflection in the moving point.

A pair of points spanning a line carries a one-parameter bending group
preserving the line, of hyperbolic, spherical, or euclidean type with the
line.  Bendings are the elementary moves used everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .core import (
    DEFAULT_TOL,
    J,
    LineType,
    Point,
    _rep,
    form,
    line_type,
    point,
    polar_point,
    project_orthogonal,
    projectively_equal,
    self_product,
)
from .errors import (
    EqualPoints,
    EuclideanGeodesic,
    ExceptionalCase,
    NotOnGeodesic,
    OrthogonalPoints,
    SignChange,
    StepTooLarge,
)
from .isometry import (
    IDENTITY,
    Isometry,
    _expm3_batch,
    _ro,
    project_to_su,
    rank_one_map,
    reflection,
    star,
)


@dataclass(frozen=True)
class PathSample:
    """A sampled path of points with parameter values."""

    params: np.ndarray
    points: list[Point]

    def __len__(self) -> int:
        return len(self.points)


def path_sample(points, params=None) -> PathSample:
    points = list(points)
    if params is None:
        params = np.linspace(0.0, 1.0, len(points))
    params = np.asarray(params, dtype=float)
    if params.shape != (len(points),):
        raise ValueError("params and points lengths differ")
    return PathSample(params=_ro(params.copy()), points=points)


@dataclass(frozen=True)
class TangentAtPoint:
    """The tangent map x -> <x, base> * sign(base) * v, with v orthogonal
    to the base point.  Evaluated at the base vector it returns v itself, so
    v is the velocity of the curve base + eps * v."""

    base: Point
    v: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.base.sign * rank_one_map(self.v, self.base)


def tangent(base: Point, v, tol: float = DEFAULT_TOL) -> TangentAtPoint:
    v = np.asarray(v, dtype=complex)
    if abs(form(v, base.rep)) > tol * max(1.0, float(np.linalg.norm(v))):
        raise ValueError("tangent vector is not orthogonal to its base point")
    return TangentAtPoint(base=base, v=_ro(v.copy()))


def hat(t: TangentAtPoint) -> np.ndarray:
    """The Lie algebra element t - star(t) attached to a tangent.

    Multiplying by the reflection in the base point recovers the derivative
    of the reflection: d/deps R(base + eps v) = 2 (t + star(t)) =
    2 hat(t) R(base), and hat anticommutes with that reflection.
    """
    m = t.matrix()
    return m - star(m)


def _same_sign(points) -> int:
    sign = points[0].sign
    for p in points[1:]:
        if p.sign != sign:
            raise SignChange("path crosses the isotropic cone")
    return sign


def normalized_lift(path, max_angle: float = 0.2) -> np.ndarray:
    """Lift a path of points to vectors with real positive consecutive pairing.

    Returns an (n, 3) array c with c[0] the first point's representative and
    <c[k], c[k+1]> a positive multiple of the common sign.  Raises
    StepTooLarge when consecutive samples are further apart than `max_angle`
    radians of euclidean angle (the phase alignment would be unreliable),
    SignChange when the points change sign.
    """
    points = path.points if isinstance(path, PathSample) else list(path)
    sign = _same_sign(points)
    out = np.empty((len(points), 3), dtype=complex)
    out[0] = points[0].rep
    for k in range(1, len(points)):
        r = points[k].rep
        c = out[k - 1]
        cosang = min(1.0, abs(np.vdot(c, r)) / (np.linalg.norm(c) * np.linalg.norm(r)))
        if np.arccos(cosang) > max_angle:
            raise StepTooLarge(
                f"samples {k - 1} and {k} are {np.arccos(cosang):.3f} rad apart"
            )
        w = form(c, r)
        if abs(w) < 1e-12:
            raise StepTooLarge("consecutive samples are nearly orthogonal")
        out[k] = (sign * w / abs(w)) * r
    return out


def follow_path(path, F0: Isometry | None = None, max_angle: float = 0.2) -> Isometry:
    """Integrate the tangent flow along a path of points.

    Returns the isometry F with R(c_end) = F R(c_start) F^{-1}; composing
    with F0 on the right when given.  A midpoint rule on the normalized lift
    gives second-order accuracy in the step size.
    """
    lift = normalized_lift(path, max_angle)
    if len(lift) < 2:
        return F0 if F0 is not None else IDENTITY
    sign = (
        path.points[0].sign if isinstance(path, PathSample) else list(path)[0].sign
    )
    mids = 0.5 * (lift[:-1] + lift[1:])
    mids = mids / np.sqrt(np.abs(form(mids, mids).real))[:, None]
    vels = lift[1:] - lift[:-1]
    vels = vels - (form(vels, mids) / form(mids, mids))[:, None] * mids
    jm = (mids @ J).conj()
    jv = (vels @ J).conj()
    gens = sign * (
        np.einsum("ki,kj->kij", vels, jm) - np.einsum("ki,kj->kij", mids, jv)
    )
    steps = _expm3_batch(gens)
    f = np.eye(3, dtype=complex)
    for k in range(steps.shape[0]):
        f = steps[k] @ f
        if k % 256 == 255:
            f = project_to_su(f).m
    f = project_to_su(f).m
    if F0 is not None:
        f = f @ F0.m
    return Isometry(_ro(f))


@dataclass(frozen=True)
class Bending:
    """One-parameter group of isometries preserving the line of a pair.

    `cols` holds the adapted basis as columns; `rate` is the speed making
    evaluate(1) carry the first point of the pair onto the second (onto its
    orthogonal partner when the pair mixes signs on a hyperbolic line).
    """

    kind: LineType
    cols: np.ndarray
    cols_inv: np.ndarray
    rate: float

    def _normal_form(self, s: float) -> np.ndarray:
        th = self.rate * s
        if self.kind is LineType.HYPERBOLIC:
            return np.diag([np.exp(-th), np.exp(th), 1.0])
        if self.kind is LineType.SPHERICAL:
            c, sn = np.cos(th), np.sin(th)
            return np.array([[c, -sn, 0.0], [sn, c, 0.0], [0.0, 0.0, 1.0]])
        return np.array(
            [[1.0, 0.0, 0.0], [-s, 1.0, 0.0], [-s * s / 2.0, s, 1.0]]
        )

    def evaluate(self, s: float) -> Isometry:
        m = self.cols @ self._normal_form(s) @ self.cols_inv
        return Isometry(_ro(m))

    def point_parameter(self, q: Point, tol: float = 1e-7) -> tuple[float, int]:
        """Parameter u with evaluate(u) carrying the base fiber onto q's.

        Returns (u, sign of q).  Raises NotOnGeodesic when q is off the real
        geodesic (or circle) swept by the bending.
        """
        c = self.cols_inv @ q.rep
        scale = float(np.abs(c).max())
        if self.kind is LineType.HYPERBOLIC:
            if abs(c[2]) > tol * scale:
                raise NotOnGeodesic("point is off the complex line")
            if min(abs(c[0]), abs(c[1])) <= tol * scale:
                raise NotOnGeodesic("point is at an end of the geodesic")
            r = c[1] / c[0]
            if abs(r.imag) > tol * max(1.0, abs(r)):
                raise NotOnGeodesic("point is off the real geodesic")
            if (r.real < 0) != (q.sign < 0):
                raise NotOnGeodesic("branch does not match the point sign")
            return 0.5 * np.log(abs(r.real)) / self.rate, q.sign
        if self.kind is LineType.SPHERICAL:
            if abs(c[2]) > tol * scale:
                raise NotOnGeodesic("point is off the complex line")
            k = 0 if abs(c[0]) >= abs(c[1]) else 1
            c = c * (abs(c[k]) / c[k])
            if max(abs(c[0].imag), abs(c[1].imag)) > tol * scale:
                raise NotOnGeodesic("point is off the real circle")
            th = float(np.arctan2(c[1].real, c[0].real)) % np.pi
            if th >= np.pi * (1.0 - 1e-12):
                th = 0.0
            return th / self.rate, q.sign
        if abs(c[0]) > tol * scale:
            raise NotOnGeodesic("point is off the horocyclic family")
        if abs(c[1]) <= tol * scale:
            raise NotOnGeodesic("point is at the isotropic end")
        r = c[2] / c[1]
        if abs(r.imag) > tol * max(1.0, abs(r)):
            raise NotOnGeodesic("point is off the real family")
        return float(r.real), q.sign


def _phase_fixed(p1: Point, p2: Point, tol: float):
    """p2's representative rotated so its pairing with p1 is real positive."""
    g = form(p1.rep, p2.rep)
    scale = max(1.0, float(np.linalg.norm(p1.rep) * np.linalg.norm(p2.rep)))
    if abs(g) <= tol * scale:
        raise OrthogonalPoints("orthogonal points admit no bending")
    return (g / abs(g)) * p2.rep, abs(g)


def bending(p1: Point, p2: Point, tol: float = DEFAULT_TOL) -> Bending:
    """The bending group of an ordered pair of distinct non-orthogonal points."""
    if projectively_equal(p1, p2, tol):
        raise EqualPoints("equal points admit no bending")
    kind = line_type(p1, p2, tol)
    q2, g = _phase_fixed(p1, p2, tol)
    s1, s2 = p1.sign, p2.sign
    if kind is LineType.HYPERBOLIC:
        d = g * g - s1 * s2
        rp = (-g + np.sqrt(d)) / s1
        rm = (-g - np.sqrt(d)) / s1
        a = s1 / (2.0 * np.sqrt(d))
        v1 = a * (rp * p1.rep + q2)
        v2 = s1 * (-a) * (rm * p1.rep + q2)
        # p1 = v1 + s1 v2 and <v1, v2> = 1/2 hold exactly; q2 sits at
        # geodesic parameter -log|lam|, which normalizes the speed.
        lam = abs((g + np.sqrt(d)) / s1)
        rate = -np.log(lam)
        pol = polar_point(p1, p2, tol)
        cols = np.column_stack([v1, v2, pol.rep])
    elif kind is LineType.SPHERICAL:
        ang = np.arccos(min(1.0, g))
        if ang <= tol:
            raise EqualPoints("spherical pair at angle zero")
        p1prime = (q2 - g * p1.rep) / np.sin(ang)
        pol = polar_point(p1, p2, tol)
        cols = np.column_stack([p1.rep, p1prime, pol.rep])
        rate = float(ang)
    else:
        u = q2 - g * p1.rep
        best, r = None, None
        for k in range(3):
            cand = project_orthogonal(p1, np.eye(3)[k])
            w = abs(form(cand, u))
            if best is None or w > best:
                best, r = w, cand
        eta = 1.0 / form(r, u)
        gam = -(1.0 + abs(eta) ** 2 * self_product(r)) / 2.0
        b = gam * u + eta * r
        cols = np.column_stack([b, p1.rep, u])
        rate = 1.0
    return Bending(
        kind=kind,
        cols=_ro(cols),
        cols_inv=_ro(np.linalg.inv(cols)),
        rate=float(rate),
    )


def bend_pair(p1: Point, p2: Point, s: float, tol: float = DEFAULT_TOL):
    """The pair with p2 carried along the bending of (p1, p2) by parameter s."""
    b = bending(p1, p2, tol)
    return p1, b.evaluate(s).apply(p2, tol)


def orthogonal_partner(q: Point, line: Bending, tol: float = 1e-7) -> Point:
    """The point of the line orthogonal to q, on the other family.

    On a hyperbolic line this flips between the real geodesic and its polar
    family; on a spherical line it advances a quarter turn.  Euclidean lines
    carry no orthogonal partners.
    """
    if line.kind is LineType.EUCLIDEAN:
        raise EuclideanGeodesic("euclidean lines have no orthogonal partners")
    c = line.cols_inv @ q.rep
    scale = float(np.abs(c).max())
    if abs(c[2]) > tol * scale:
        raise NotOnGeodesic("point is off the complex line")
    if line.kind is LineType.HYPERBOLIC:
        partner = c[0] * line.cols[:, 0] - c[1] * line.cols[:, 1]
    else:
        partner = -c[1] * line.cols[:, 0] + c[0] * line.cols[:, 1]
    return point(partner, DEFAULT_TOL)


def _spherical_peak(z1: complex, z2: complex) -> float:
    """max over theta of |cos(theta) z1 + sin(theta) z2|^2."""
    a, b = abs(z1) ** 2, abs(z2) ** 2
    c = (z1 * z2.conjugate()).real
    return (a + b) / 2.0 + float(np.hypot((a - b) / 2.0, c))


def make_hyperbolic(
    p1: Point,
    p2: Point,
    p3: Point,
    margin: float = 0.5,
    tol: float = DEFAULT_TOL,
) -> float:
    """Bending parameter s of the pair (p1, p2) making (p2(s), p3) hyperbolic.

    Returns 0.0 when the pair (p2, p3) is already hyperbolic.  Otherwise
    moves p2 until the pairwise invariant clears the hyperbolicity threshold
    by `margin`, raising ExceptionalCase for the configurations no bending
    can repair: p3 on the euclidean line of (p1, p2), p3 the polar point of
    a hyperbolic line, or a spherical bending whose orbit never clears the
    threshold.
    """
    if p2.sign * p3.sign < 0:
        return 0.0
    b = bending(p1, p2, tol)

    def gap(s: float) -> float:
        q = b.evaluate(s).m @ p2.rep
        return abs(form(q, p3.rep)) ** 2 / (self_product(q) * p3.sign) - 1.0

    if gap(0.0) > 0.0:
        return 0.0
    p3norm = float(np.linalg.norm(p3.rep))
    if b.kind is LineType.EUCLIDEAN:
        u = b.cols[:, 2]
        if abs(form(u, p3.rep)) <= 1e-8 * float(np.linalg.norm(u)) * p3norm:
            raise ExceptionalCase("p3 lies on the euclidean line of (p1, p2)")
    elif b.kind is LineType.HYPERBOLIC:
        z1 = form(b.cols[:, 0], p3.rep) / (np.linalg.norm(b.cols[:, 0]) * p3norm)
        z2 = form(b.cols[:, 1], p3.rep) / (np.linalg.norm(b.cols[:, 1]) * p3norm)
        if max(abs(z1), abs(z2)) <= 1e-8:
            raise ExceptionalCase("p3 is the polar point of the line of (p1, p2)")
    else:
        # theta-amplitude of the rotating pairing, in p2's normalization
        c = b.cols_inv @ p2.rep
        norm = np.linalg.norm(c[:2])
        z1 = form(b.cols[:, 0], p3.rep) * norm
        z2 = form(b.cols[:, 1], p3.rep) * norm
        peak = _spherical_peak(z1, z2)
        if peak - 1.0 <= 1e-10:
            raise ExceptionalCase("the spherical orbit never becomes hyperbolic")
        target = min(margin, 0.5 * (peak - 1.0))
        period = np.pi / b.rate
        grid = np.linspace(0.0, period, 129)
        vals = np.array([gap(s) for s in grid])
        k = int(np.argmax(vals))
        if vals[k] < target:
            target = 0.9 * vals[k]
        root = scipy.optimize.brentq(lambda s: gap(s) - target, 0.0, grid[k])
        return float(root)

    target = margin
    if b.kind is LineType.HYPERBOLIC:
        max_s = 700.0 / max(abs(b.rate), 1e-9)
    else:
        max_s = 1e12
    for direction in (1.0, -1.0):
        s = 0.5 * direction
        while abs(s) <= max_s:
            if gap(s) >= target:
                root = scipy.optimize.brentq(lambda t: gap(t) - target, 0.0, s)
                return float(root)
            s *= 2.0
    raise ExceptionalCase("no bending parameter clears the threshold")
