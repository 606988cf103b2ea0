"""Triples of points: classification, moduli coordinates, surface moves.

A strongly regular triple is pinned down, up to holomorphic isometry, by the
signs of its points, the consecutive pairwise invariants t1 = ta(p1, p2) and
t2 = ta(p2, p3), the real shape invariant t, and the pair (alpha, beta).
These satisfy one relation,

    t1 t2 (t - 1)^2 + t1 + t2 - t1 t2 + beta - 1 + alpha^2 / (t1 t2) = 0,

so with signs and (alpha, beta) fixed the triples sweep a surface: two
sheets over the (t1, t2) region, distinguished by the sign of t - 1 and
glued along the ramification locus t = 1.  Bending a consecutive pair (both
points of the pair move, the third stays) preserves sigma, alpha, beta and
one coordinate while sweeping the other: these are the vertical and
horizontal lines used to connect triples.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    Gram,
    LineType,
    Point,
    alpha as alpha_of,
    beta as beta_of,
    form,
    gram,
    point,
    projectively_equal,
    realize_gram,
    tance,
    tau,
)
from .errors import (
    IncompatibleInvariants,
    InadmissibleCoords,
    NotConjugate,
    NotRegular,
    NotStronglyRegular,
    TraceMinusOne,
    Unreachable,
)
from .isometry import (
    Isometry,
    center_reduce,
    conjugator,
    project_to_su,
    reflection,
    star,
)
from .paths import Bending, bending, hat


class TripleClass(enum.Enum):
    NOT_REGULAR = "not regular"
    REGULAR = "regular"
    STRONGLY_REGULAR = "strongly regular"
    REAL_STRONGLY_REGULAR = "real strongly regular"


@dataclass(frozen=True)
class Triple:
    p1: Point
    p2: Point
    p3: Point

    @property
    def points(self) -> tuple[Point, Point, Point]:
        return (self.p1, self.p2, self.p3)

    def gram(self) -> Gram:
        return gram(self.points)

    def apply(self, g: Isometry, tol: float = DEFAULT_TOL) -> "Triple":
        return Triple(*(g.apply(p, tol) for p in self.points))

    def product(self) -> Isometry:
        """The isometry R(p3) R(p2) R(p1)."""
        return reflection(self.p3) @ reflection(self.p2) @ reflection(self.p1)


def triple(p1: Point, p2: Point, p3: Point) -> Triple:
    return Triple(p1, p2, p3)


def _on_common_geodesic(p1: Point, p2: Point, p3: Point, tol: float = 1e-7) -> bool:
    """Whether the three points lie on one real geodesic (or coincide)."""
    if (
        projectively_equal(p1, p2, tol)
        or projectively_equal(p2, p3, tol)
        or projectively_equal(p1, p3, tol)
    ):
        return True
    reps = np.array([p1.rep, p2.rep, p3.rep])
    sv = np.linalg.svd(reps, compute_uv=False)
    if sv[2] > tol * sv[0]:
        return False
    sol, *_ = np.linalg.lstsq(
        np.column_stack([p1.rep, p2.rep]), p3.rep, rcond=None
    )
    z1, z2 = sol
    g = form(p1.rep, p2.rep)
    if abs(g) <= tol:
        return True
    phase = g / abs(g)
    return abs((z1 * z2.conjugate() * phase).imag) <= tol * max(abs(z1 * z2), 1e-30)


def classify_triple(T: Triple, tol: float = DEFAULT_TOL) -> TripleClass:
    """Regularity class of a triple.

    Two positive points, a vanishing consecutive pairing, or three points on
    a common real geodesic break regularity; vanishing beta (degenerate
    Gram) or a real configuration with a positive point stop short of strong
    regularity; otherwise alpha separates the real locus from the generic
    one.
    """
    p1, p2, p3 = T.points
    if sum(1 for p in T.points if p.sign > 0) >= 2:
        return TripleClass.NOT_REGULAR
    m = T.gram().m
    if min(abs(m[0, 1]), abs(m[1, 2])) <= tol:
        return TripleClass.NOT_REGULAR
    a = alpha_of(p1, p2, p3)
    b = beta_of(p1, p2, p3)
    if abs(a) <= tol and abs(b) <= tol and _on_common_geodesic(p1, p2, p3):
        return TripleClass.NOT_REGULAR
    if abs(b) <= tol:
        return TripleClass.REGULAR
    if abs(a) <= tol:
        if any(p.sign > 0 for p in T.points):
            return TripleClass.REGULAR
        return TripleClass.REAL_STRONGLY_REGULAR
    return TripleClass.STRONGLY_REGULAR


@dataclass(frozen=True)
class SCoords:
    """Surface coordinates of a strongly regular triple."""

    t: float
    t1: float
    t2: float
    sigma: tuple[int, int, int]
    alpha: float
    beta: float

    @property
    def sheet(self) -> int:
        return 1 if self.t >= 1.0 else -1

    def residual(self) -> float:
        t1t2 = self.t1 * self.t2
        return (
            t1t2 * (self.t - 1.0) ** 2
            + self.t1
            + self.t2
            - t1t2
            + self.beta
            - 1.0
            + self.alpha**2 / t1t2
        )


def validate_coords(c: SCoords, tol: float = 1e-8) -> None:
    """Raise InadmissibleCoords unless c describes a strongly regular triple."""
    s1, s2, s3 = c.sigma
    if any(s not in (-1, 1) for s in c.sigma):
        raise InadmissibleCoords("signs must be +-1")
    if sum(1 for s in c.sigma if s > 0) > 1:
        raise InadmissibleCoords("at most one positive point is allowed")
    for name, tval, ss in (("t1", c.t1, s1 * s2), ("t2", c.t2, s2 * s3)):
        if tval * ss <= 0:
            raise InadmissibleCoords(f"{name} must have the sign of the pair")
        if ss > 0 and tval <= 1.0:
            raise InadmissibleCoords(
                f"{name} <= 1 makes the equal-sign pair non-hyperbolic"
            )
    if c.beta * s1 * s2 * s3 >= 0:
        raise InadmissibleCoords("beta has the wrong sign for signature (2, 1)")
    if abs(c.alpha) <= tol and any(s > 0 for s in c.sigma):
        raise InadmissibleCoords("a real configuration with a positive point")
    scale = max(1.0, abs(c.t1 * c.t2) * (1.0 + (c.t - 1.0) ** 2))
    if abs(c.residual()) > tol * scale:
        raise InadmissibleCoords(
            f"coordinates violate the surface relation (residual {c.residual():.2e})"
        )


def s_coords(T: Triple, tol: float = DEFAULT_TOL) -> SCoords:
    """Surface coordinates of a (real) strongly regular triple."""
    cls = classify_triple(T, tol)
    if cls not in (TripleClass.STRONGLY_REGULAR, TripleClass.REAL_STRONGLY_REGULAR):
        raise NotStronglyRegular(f"triple is {cls.value}")
    p1, p2, p3 = T.points
    return SCoords(
        t=tau(p1, p2, p3, tol),
        t1=tance(p1, p2),
        t2=tance(p2, p3),
        sigma=(p1.sign, p2.sign, p3.sign),
        alpha=alpha_of(p1, p2, p3),
        beta=beta_of(p1, p2, p3),
    )


def standard_gram(c: SCoords) -> np.ndarray:
    """The Gram matrix with positive consecutive pairings realizing c."""
    s1, s2, s3 = c.sigma
    g12 = np.sqrt(c.t1 * s1 * s2)
    g23 = np.sqrt(c.t2 * s2 * s3)
    tau_c = c.t - 1j * c.alpha / (c.t1 * c.t2)
    g13 = tau_c * g12 * g23 * s2
    return np.array(
        [
            [s1, g12, g13],
            [g12, s2, g23],
            [np.conj(g13), g23, s3],
        ]
    )


def triple_from_coords(c: SCoords, tol: float = DEFAULT_TOL) -> Triple:
    """A triple with the given surface coordinates (InadmissibleCoords if none)."""
    validate_coords(c)
    vecs = realize_gram(standard_gram(c), tol)
    return Triple(*(point(v, tol) for v in vecs))


def _standard_cols(T: Triple) -> np.ndarray:
    """Representatives re-phased so consecutive pairings are real positive.

    Triples with equal surface coordinates get bases with equal Grams, so
    the change of basis between them is the conjugating isometry.
    """
    c1 = T.p1.rep
    g12 = form(c1, T.p2.rep)
    c2 = (g12 / abs(g12)) * T.p2.rep
    g23 = form(c2, T.p3.rep)
    c3 = (g23 / abs(g23)) * T.p3.rep
    return np.column_stack([c1, c2, c3])


def decompose_three_reflections(F: Isometry, tol: float = DEFAULT_TOL) -> Triple:
    """A triple whose reflections multiply to F: R(p3) R(p2) R(p1) = F.

    The trace of F fixes alpha and beta; a balanced point on the matching
    surface is realized for each admissible sign pattern and transported
    onto F by a conjugator.  Raises TraceMinusOne for trace -1 (reflections
    and other undecomposable classes) and NotConjugate when no pattern's
    class matches (same-trace elliptic classes differ by their sign data).
    """
    tr = F.trace
    if abs(tr + 1.0) <= tol:
        raise TraceMinusOne("trace -1 admits no three-reflection decomposition")
    a = tr.imag / 8.0
    b = (tr.real + 1.0) / 4.0
    if b > tol:
        patterns = [(-1, -1, -1)]
    elif b < -tol:
        patterns = [(1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    else:
        patterns = [(-1, -1, -1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    failure: Exception | None = None
    for sigma in patterns:
        s1, s2, s3 = sigma
        g = 2.0
        for _ in range(20):
            C = (
                s1 * s3 * (b - 1.0) / g**4
                + s2 * (s1 + s3) / g**2
                + a**2 / g**8
            )
            if C <= 0.75:
                break
            g *= 2.0
        t = 1.0 + np.sqrt(1.0 - C)
        g13 = s2 * g * g * t - 1j * a * s1 * s2 * s3 / (g * g)
        G = np.array(
            [
                [s1, g, g13],
                [g, s2, g],
                [np.conj(g13), g, s3],
            ]
        )
        pts = [point(v, tol) for v in realize_gram(G, tol)]
        f0 = reflection(pts[2]) @ reflection(pts[1]) @ reflection(pts[0])
        try:
            h = conjugator(f0, F, tol)
        except (NotConjugate, NotRegular) as err:
            failure = err
            continue
        return Triple(*(h.apply(p, tol) for p in pts))
    raise NotConjugate(
        f"no admissible sign pattern matches the input ({failure})"
    )


@dataclass(frozen=True)
class Move:
    """One bending move: the consecutive pair bent, and by how much."""

    pair: str
    s: float


BendProgram = list[Move]


def _pair_bending(T: Triple, pair: str, tol: float) -> Bending:
    if pair == "12":
        b = bending(T.p1, T.p2, tol)
    elif pair == "23":
        b = bending(T.p2, T.p3, tol)
    else:
        raise ValueError(f"unknown pair {pair!r} for a triple")
    if b.kind is not LineType.HYPERBOLIC:
        raise ValueError(f"pair {pair} does not span a hyperbolic line")
    return b


def _apply_pair_move(T: Triple, pair: str, b: Bending, s: float, tol: float) -> Triple:
    g = b.evaluate(s)
    if pair == "12":
        return Triple(g.apply(T.p1, tol), g.apply(T.p2, tol), T.p3)
    return Triple(T.p1, g.apply(T.p2, tol), g.apply(T.p3, tol))


def apply_bend_program(T: Triple, moves, tol: float = DEFAULT_TOL) -> Triple:
    cur = T
    for mv in moves:
        b = _pair_bending(cur, mv.pair, tol)
        cur = _apply_pair_move(cur, mv.pair, b, mv.s, tol)
    return cur


def _bend_targets(
    b: Bending, moving: Point, fixed: Point, target: float, tol: float
) -> list[float]:
    """Bending parameters s with ta(B(s) moving, fixed) = target.

    The tracked pairing sweeps e^{-2th} c1^2 + e^{2th} c2^2 + k, so targets
    below the profile minimum raise Unreachable, the minimum itself has one
    preimage (the ramification), and anything above has two.
    """
    sm, sy = moving.sign, fixed.sign
    um = b.point_parameter(moving)[0]
    z1 = form(b.cols[:, 0], fixed.rep)
    z2 = form(b.cols[:, 1], fixed.rep)
    c1, c2 = abs(z1), abs(z2)
    k = 2.0 * sm * (z1 * z2.conjugate()).real
    M = target * sm * sy
    mmin = k + 2.0 * c1 * c2
    scale = max(1.0, abs(M), abs(mmin))
    eps = 1e-12 * max(1.0, c1 + c2)
    rate = b.rate
    if c1 <= eps or c2 <= eps:
        # one-sided profile: a single preimage, no sheet structure
        if M <= k + tol * scale:
            raise Unreachable("target is below the degenerate profile")
        if c2 > eps:
            th = 0.5 * np.log((M - k) / (c2 * c2))
        else:
            th = -0.5 * np.log((M - k) / (c1 * c1))
        return [th / rate - um]
    if M < mmin - tol * scale:
        raise Unreachable(
            f"target {target:.6g} lies below the profile minimum"
        )
    if M <= mmin + tol * scale:
        th = 0.5 * np.log(c1 / c2)
        return [th / rate - um]
    disc = np.sqrt(max((M - k) ** 2 - 4.0 * c1 * c1 * c2 * c2, 0.0))
    # larger root by the plus branch, smaller by Vieta: the minus branch
    # cancels catastrophically for targets just above the minimum
    x_hi = ((M - k) + disc) / (2.0 * c2 * c2)
    out = []
    for x in (x_hi, c1 * c1 / (c2 * c2 * x_hi)):
        for _ in range(2):
            fp = c2 * c2 - c1 * c1 / (x * x)
            if abs(fp) < 1e-30:
                break
            step = (c2 * c2 * x + c1 * c1 / x + k - M) / fp
            if abs(step) > 0.5 * x:
                break
            x -= step
        out.append(0.5 * np.log(x) / rate - um)
    return out


def _coordinate_move(
    T: Triple,
    pair: str,
    target: float,
    sheet: int | None = None,
    tol: float = DEFAULT_TOL,
) -> tuple[Triple, Move]:
    """Bend `pair` until the tracked coordinate hits `target`.

    Pair "12" tracks t2 = ta(p2, p3) (a vertical line, t1 frozen); pair "23"
    tracks t1 = ta(p1, p2) (a horizontal line, t2 frozen).  Each reachable
    target has one preimage per sheet; `sheet` picks by the sign of t - 1,
    None keeps the current sheet.
    """
    b = _pair_bending(T, pair, tol)
    moving = T.p2
    fixed = T.p3 if pair == "12" else T.p1
    cand_s = _bend_targets(b, moving, fixed, target, tol)
    best: tuple[float, Triple, float] | None = None
    for s in cand_s:
        cand = _apply_pair_move(T, pair, b, s, tol)
        tc = tau(cand.p1, cand.p2, cand.p3)
        if sheet is None:
            t_cur = tau(T.p1, T.p2, T.p3)
            score = -abs(tc - t_cur)
        else:
            score = sheet * (tc - 1.0)
        if best is None or score > best[0]:
            best = (score, cand, s)
    return best[1], Move(pair=pair, s=best[2])


def vertical_line(
    T: Triple, t2_target: float, sheet: int | None = None, tol: float = DEFAULT_TOL
) -> tuple[Triple, Move]:
    """Move along {t1 = const} to the requested t2 (bending the pair 12)."""
    return _coordinate_move(T, "12", t2_target, sheet, tol)


def horizontal_line(
    T: Triple, t1_target: float, sheet: int | None = None, tol: float = DEFAULT_TOL
) -> tuple[Triple, Move]:
    """Move along {t2 = const} to the requested t1 (bending the pair 23)."""
    return _coordinate_move(T, "23", t1_target, sheet, tol)


def connect_triples(
    A: Triple, B: Triple, tol: float = DEFAULT_TOL
) -> tuple[BendProgram, Isometry]:
    """A bend program (at most three moves) and isometry carrying A onto B.

    Replaying the program on A and applying the isometry reproduces B
    pointwise.  Raises IncompatibleInvariants when the sign patterns or the
    pair (alpha, beta) differ: those are constant on the surface.
    """
    ca, cb = s_coords(A, tol), s_coords(B, tol)
    if ca.sigma != cb.sigma:
        raise IncompatibleInvariants(f"sign patterns {ca.sigma} != {cb.sigma}")
    inv_tol = 1e-7 * max(1.0, abs(ca.beta))
    if abs(ca.alpha - cb.alpha) > inv_tol or abs(ca.beta - cb.beta) > inv_tol:
        raise IncompatibleInvariants("alpha or beta differ between the triples")
    moves: BendProgram = []
    cur = A
    coord_tol = 1e-11

    if abs(ca.t1 - cb.t1) > coord_tol * max(1.0, abs(cb.t1)):
        try:
            cur, mv = _coordinate_move(cur, "23", cb.t1, None, tol)
            moves.append(mv)
        except Unreachable:
            # raise |t2| until the horizontal target becomes reachable, then
            # commit that single vertical leg followed by the horizontal one
            y = s_coords(cur, tol).t2
            done = False
            for _ in range(60):
                y *= 2.0
                lifted, mv_v = _coordinate_move(cur, "12", y, None, tol)
                try:
                    lifted, mv_h = _coordinate_move(lifted, "23", cb.t1, None, tol)
                except Unreachable:
                    continue
                cur = lifted
                moves.extend([mv_v, mv_h])
                done = True
                break
            if not done:
                raise Unreachable("horizontal target stayed out of reach")

    cc = s_coords(cur, tol)
    want_sheet = None if abs(cb.t - 1.0) <= tol else cb.sheet
    if abs(cc.t2 - cb.t2) > coord_tol * max(1.0, abs(cb.t2)):
        cur, mv = _coordinate_move(cur, "12", cb.t2, want_sheet, tol)
        moves.append(mv)
    elif want_sheet is not None and abs(cc.t - 1.0) > tol and cc.sheet != cb.sheet:
        # coordinates already match but the sheet does not: step away
        # vertically and come back choosing the right preimage
        cur, mv = _coordinate_move(cur, "12", 2.0 * cb.t2, None, tol)
        moves.append(mv)
        cur, mv = _coordinate_move(cur, "12", cb.t2, want_sheet, tol)
        moves.append(mv)

    pa = _standard_cols(cur)
    pb = _standard_cols(B)
    m = pb @ np.linalg.inv(pa)
    # a badly conditioned frame leaves a form residual in the quotient;
    # polish back onto the isometry group before the determinant fix
    for _ in range(3):
        err = star(m) @ m - np.eye(3)
        if np.abs(err).max() <= 1e-15:
            break
        m = m @ (np.eye(3) - 0.5 * err)
    g = center_reduce(project_to_su(m))
    for pc, pt in zip(cur.points, B.points):
        if not projectively_equal(g.apply(pc), pt, 1e-6):
            raise NotConjugate("connected triple does not match the target")
    return moves, g


def tangent_ef_residual(T: Triple, tg1, tg2, tg3) -> float:
    """Residual of the product-preserving tangency condition.

    A triple deformation (tg1, tg2, tg3) keeps R(p3) R(p2) R(p1) fixed to
    first order iff -hat(tg3) + hat(tg2) + R2 hat(tg1) R2 vanishes.
    """
    r2 = reflection(T.p2).m
    m = -hat(tg3) + hat(tg2) + r2 @ hat(tg1) @ r2
    return float(np.abs(m).max())
