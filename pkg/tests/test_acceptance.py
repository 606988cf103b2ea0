"""Acceptance gate: one end-to-end check per contract item.

Each test exercises a full pipeline at its stated tolerance and prints as a
single pass/fail line under pytest -v.  Sampling keeps configurations inside
the numerically meaningful range: pair separations are bounded so that the
s-grid endpoints stay well conditioned (reflection entries grow like
exp(2 r |s|)), and large-|s| limits are evaluated where truncation and
round-off balance.
"""

import numpy as np
import pytest

from chgeom.core import (
    Gram,
    LineType,
    alpha,
    beta,
    form,
    gram,
    line_type,
    point,
    polar_point,
    projectively_equal,
    realize_gram,
    self_product,
    tance,
)
from chgeom.errors import TraceMinusOne
from chgeom.holonomy import (
    b_commutator,
    holonomy_dimension,
    holonomy_samples,
    omega_commutator,
    rectangle_holonomy,
    vertical_part,
)
from chgeom.isometry import (
    CubeRoot,
    reflection,
    split_two_reflections,
    stabilizer_algebra,
    trace_formula,
)
from chgeom.paths import bending, follow_path, orthogonal_partner, path_sample
from chgeom.pentagons import (
    apply_pentagon_moves,
    connect_pentagons,
    is_real_pentagon,
    pentagon,
    pentagon_from_moduli,
    pentagon_moduli,
)
from chgeom.sampling import (
    default_rng,
    random_isometry,
    random_negative_point,
    random_point,
    random_strongly_regular_coords,
    random_strongly_regular_triple,
    random_vector,
)
from chgeom.triples import (
    Move,
    SCoords,
    TripleClass,
    apply_bend_program,
    classify_triple,
    connect_triples,
    decompose_three_reflections,
    s_coords,
    triple_from_coords,
)
from chgeom.errors import InadmissibleModuli

J = np.diag([1.0, 1.0, -1.0])

SIGN_PATTERNS = ((-1, -1, -1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


def project_orthogonal(p, w):
    return w - form(w, p.rep) / self_product(p.rep) * p.rep


def unit_positive_normal(rng, p):
    while True:
        w = project_orthogonal(p, random_vector(rng))
        if self_product(w) > 0.05:
            return w / np.sqrt(self_product(w))


def hyperbolic_pair(rng, rmin=0.05, rmax=0.4):
    """Two negative points at bounded geodesic separation."""
    p1 = random_negative_point(rng)
    w = unit_positive_normal(rng, p1)
    r = rng.uniform(rmin, rmax)
    return p1, point(np.cosh(r) * p1.rep + np.sinh(r) * w)


def spherical_pair(rng):
    # cap the representative size: positive points close to the isotropic
    # cone have large canonical coordinates and ill-conditioned reflections
    while True:
        p1 = random_point(rng, sign=1)
        if np.abs(p1.rep).max() <= 2.0:
            break
    while True:
        w = unit_positive_normal(rng, p1)
        if np.abs(w).max() <= 2.5:
            break
    ang = rng.uniform(0.2, 1.3)
    return p1, point(np.cos(ang) * p1.rep + np.sin(ang) * w)


def euclidean_pair(rng):
    g = random_isometry(rng, 0.5)
    return g.apply(point([0.0, 1.0, 0.0])), g.apply(point([0.5, 1.0, 0.5]))


def mixed_pair(rng):
    """Negative p1 and a positive point on the same hyperbolic line."""
    while True:
        p1 = random_negative_point(rng)
        q = random_negative_point(rng)
        w = project_orthogonal(p1, q.rep)
        if self_product(w) < 0.05:
            continue
        v = w / np.sqrt(self_product(w)) + rng.uniform(0.2, 0.8) * p1.rep
        if self_product(v) > 0.05:
            return p1, point(v)


def random_pentagon_moduli(rng, k):
    while True:
        m = (-rng.uniform(0.3, 4.0), rng.uniform(1.3, 6.0), rng.uniform(1.2, 5.0))
        try:
            pentagon_from_moduli(m, CubeRoot(k))
        except InadmissibleModuli:
            continue
        return m


def test_01_reflection_laws():
    rng = default_rng(201)
    for _ in range(1000):
        p = random_point(rng)
        R = reflection(p).m
        assert np.abs(R @ R - np.eye(3)).max() <= 1e-10
        assert np.abs(R.conj().T @ J @ R - J).max() <= 1e-10
        assert abs(np.linalg.det(R) - 1.0) <= 1e-10
        assert abs(np.trace(R) + 1.0) <= 1e-10


def test_02_trace_formula():
    rng = default_rng(202)
    for n in (2, 3, 4, 5):
        for _ in range(125):
            pts = [random_point(rng) for _ in range(n)]
            F = np.eye(3, dtype=complex)
            for p in pts:
                F = reflection(p).m @ F
            assert abs(trace_formula(gram(pts)) - np.trace(F)) <= 1e-8


def test_03_bendings():
    rng = default_rng(203)
    grid = np.linspace(-5.0, 5.0, 9)
    for sampler in (hyperbolic_pair, spherical_pair, euclidean_pair):
        for _ in range(100):
            p1, p2 = sampler(rng)
            b = bending(p1, p2)
            base = (reflection(p2) @ reflection(p1)).m
            for s in grid:
                g = b.evaluate(s)
                q1, q2 = g.apply(p1, 1e-13), g.apply(p2, 1e-13)
                moved = (reflection(q2) @ reflection(q1)).m
                assert np.abs(moved - base).max() <= 1e-9
            for s, u in ((0.7, -2.1), (-3.0, 1.2), (2.5, 2.5)):
                drift = b.evaluate(s + u).m - (b.evaluate(s) @ b.evaluate(u)).m
                assert np.abs(drift).max() <= 1e-10
            if sampler is hyperbolic_pair:
                assert projectively_equal(b.evaluate(1.0).apply(p1), p2, tol=1e-10)
    # noneuclidean lines: swapping both points for their orthogonal partners
    # leaves the reflection product unchanged
    for sampler in (hyperbolic_pair, mixed_pair, spherical_pair):
        for _ in range(50):
            p1, p2 = sampler(rng)
            b = bending(p1, p2)
            base = (reflection(p2) @ reflection(p1)).m
            for s in (-1.0, 0.3, 1.5):
                g = b.evaluate(s)
                r1 = orthogonal_partner(g.apply(p1, 1e-13), b)
                r2 = orthogonal_partner(g.apply(p2, 1e-13), b)
                swapped = (reflection(r2) @ reflection(r1)).m
                assert np.abs(swapped - base).max() <= 1e-9


def test_04_path_following():
    def curve(t):
        return point([
            0.3 * np.sin(2 * t) + 0.05j * t,
            0.2 * t + 0.1j * np.sin(3 * t),
            1.0,
        ])

    n = 10_000
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = [curve(t) for t in ts]
    path = path_sample(pts, ts)
    F = follow_path(path)

    # transport of the initial point and of its reflection
    assert projectively_equal(F.apply(pts[0]), pts[-1], tol=1e-6)
    moved = (F @ reflection(pts[0]) @ F.inv()).m
    assert np.abs(moved - reflection(pts[-1]).m).max() <= 1e-6

    # concatenation
    h = n // 2
    Fa = follow_path(path_sample(pts[: h + 1], ts[: h + 1]))
    Fb = follow_path(path_sample(pts[h:], ts[h:]))
    assert np.abs((Fb @ Fa).m - F.m).max() <= 1e-6

    # reparameterization invariance: same curve traversed at t = u^2
    us = np.linspace(0.0, 1.0, n + 1)
    repar = path_sample([curve(u * u) for u in us], us)
    assert np.abs(follow_path(repar).m - F.m).max() <= 1e-6

    # geodesic input reproduces the closed-form bending matrix
    rng = default_rng(204)
    p1, p2 = random_negative_point(rng), random_negative_point(rng)
    b = bending(p1, p2)
    ss = np.linspace(0.0, 2.0, n + 1)
    orbit = path_sample([b.evaluate(s).apply(p1) for s in ss], ss)
    assert np.abs(follow_path(orbit).m - b.evaluate(2.0).m).max() <= 1e-6

    # the lift is Killing-horizontal: dF/dt F^-1 annihilates every
    # stabilizer direction of the current point under the trace pairing
    for k in (2500, 5000, 7500):
        Fm = follow_path(path_sample(pts[: k + 1], ts[: k + 1]))
        Fp = follow_path(path_sample(pts[: k + 2], ts[: k + 2]))
        Fq = follow_path(path_sample(pts[:k], ts[:k]))
        gen = (Fp.m - Fq.m) / (ts[k + 1] - ts[k - 1]) @ Fm.inv().m
        for l in stabilizer_algebra(pts[k]):
            assert abs(np.trace(l @ gen)) <= 1e-6


def test_05_three_reflection_decomposition():
    rng = default_rng(205)
    inputs = []
    for _ in range(100):
        inputs.append(random_strongly_regular_triple(rng).product())
    while len(inputs) < 200:
        F = random_isometry(rng, scale=0.8)
        # clearly loxodromic: near-parabolic inputs have coalescing
        # eigenvectors and no eigen-based conjugation holds digits there
        if np.abs(np.linalg.eigvals(F.m)).max() < 1.15:
            continue
        if abs(np.trace(F.m) + 1.0) < 0.1:
            continue
        inputs.append(F)
    for F in inputs:
        D = decompose_three_reflections(F)
        assert classify_triple(D) is not TripleClass.NOT_REGULAR
        scale = max(1.0, float(np.abs(F.m).max()))
        assert np.abs(D.product().m - F.m).max() <= 1e-8 * scale
    with pytest.raises(TraceMinusOne):
        decompose_three_reflections(reflection(random_negative_point(rng)))


def test_06_surface_coordinates():
    rng = default_rng(206)
    for sigma in SIGN_PATTERNS:
        for _ in range(500):
            c = random_strongly_regular_coords(rng, sigma=sigma)
            assert abs(c.residual()) <= 1e-9
            T = triple_from_coords(c)
            back = s_coords(T)
            assert back.sigma == c.sigma
            for a, b in (
                (back.t, c.t),
                (back.t1, c.t1),
                (back.t2, c.t2),
                (back.alpha, c.alpha),
                (back.beta, c.beta),
            ):
                assert abs(a - b) <= 1e-10
            assert abs(back.residual()) <= 1e-9
    # converse: coordinates of a generic triple rebuild the same class
    for _ in range(100):
        T = random_strongly_regular_triple(rng)
        c = s_coords(T)
        assert abs(c.residual()) <= 1e-9
        again = s_coords(triple_from_coords(c))
        for a, b in (
            (again.t, c.t),
            (again.t1, c.t1),
            (again.t2, c.t2),
            (again.alpha, c.alpha),
            (again.beta, c.beta),
        ):
            assert abs(a - b) <= 1e-10


def test_07_vertical_line_foliation():
    rng = default_rng(207)
    for _ in range(100):
        T = random_strongly_regular_triple(rng)
        c0 = s_coords(T)
        rate = abs(bending(T.points[0], T.points[1]).rate)

        def coords_at(s):
            moved = apply_bend_program(T, [Move(pair="12", s=float(s))], tol=1e-13)
            return s_coords(moved, tol=1e-13)

        # the first pairing is constant along the line
        for s in np.linspace(-1.5 / rate, 1.5 / rate, 41):
            assert abs(coords_at(s).t1 - c0.t1) <= 1e-12

        # the second pairing has a single interior minimum and diverges
        ms = np.array([
            c.sigma[1] * c.sigma[2] * c.t2
            for c in (coords_at(s) for s in np.linspace(-7.0 / rate, 7.0 / rate, 41))
        ])
        d = np.diff(ms)
        assert d[0] < 0 < d[-1]
        assert int(np.sum(np.sign(d[1:]) != np.sign(d[:-1]))) == 1
        assert min(ms[0], ms[-1]) >= 1e2 * max(1.0, ms.min())

        # the two ends approach sheet values adding to 2
        best = min(
            abs(coords_at(m / rate).t + coords_at(-m / rate).t - 2.0)
            for m in (9.0, 9.5, 10.0)
        )
        assert best <= 1e-6


def test_08_bending_connectivity():
    rng = default_rng(208)
    pairs = ("12", "23")
    for _ in range(100):
        # moderate-coordinate pairs: an absolute 1e-8 coordinate match is
        # void once |t2| reaches 1e3, so reject runaway move programs
        while True:
            A = random_strongly_regular_triple(rng)
            prog = [
                Move(pair=pairs[i % 2], s=float(rng.uniform(-0.8, 0.8)))
                for i in range(rng.integers(1, 4))
            ]
            B = apply_bend_program(A, prog).apply(random_isometry(rng, 0.6))
            cb = s_coords(B)
            if max(abs(cb.t), abs(cb.t1), abs(cb.t2)) <= 50.0:
                break
        moves, g = connect_triples(A, B)
        assert len(moves) <= 3
        replay = apply_bend_program(A, moves).apply(g)
        ca, cb = s_coords(replay), s_coords(B)
        for a, b in (
            (ca.t, cb.t), (ca.t1, cb.t1), (ca.t2, cb.t2),
            (ca.alpha, cb.alpha), (ca.beta, cb.beta),
        ):
            assert abs(a - b) <= 1e-8 * max(1.0, abs(b))
        for p, q in zip(replay.points, B.points):
            assert projectively_equal(p, q, tol=1e-7)
    for k in (1, 2):
        for _ in range(25):
            A = pentagon_from_moduli(
                random_pentagon_moduli(rng, k), CubeRoot(k),
                s5=float(rng.uniform(-1.0, 1.0)),
            )
            B = pentagon_from_moduli(
                random_pentagon_moduli(rng, k), CubeRoot(k),
                s5=float(rng.uniform(-1.0, 1.0)),
            ).apply(random_isometry(rng, 0.6))
            moves, g = connect_pentagons(A, B)
            assert len(moves) <= 6
            replay = apply_pentagon_moves(A, moves).apply(g)
            ca, cb = s_coords(replay.triple()), s_coords(B.triple())
            for a, b in (
                (ca.t, cb.t), (ca.t1, cb.t1), (ca.t2, cb.t2),
                (ca.alpha, cb.alpha), (ca.beta, cb.beta),
            ):
                assert abs(a - b) <= 1e-8 * max(1.0, abs(b))
            ta_r = tance(replay.points[3], replay.points[4])
            ta_b = tance(B.points[3], B.points[4])
            assert abs(ta_r - ta_b) <= 1e-8 * max(1.0, abs(ta_b))
            for p, q in zip(replay.points, B.points):
                assert projectively_equal(p, q, tol=1e-7)


def test_09_curvature_chain():
    # raw-vector bending fields, degree one in each argument, for finite
    # differencing without point canonicalization
    def field_b1(v1, v2, v3):
        g11, g22 = self_product(v1), self_product(v2)
        return (
            v1 - g11 * v2 / form(v2, v1),
            g22 * v1 / form(v1, v2) - v2,
            np.zeros(3, dtype=complex),
        )

    def field_b2(v1, v2, v3):
        g22, g33 = self_product(v2), self_product(v3)
        return (
            np.zeros(3, dtype=complex),
            v2 - g22 * v3 / form(v3, v2),
            g33 * v2 / form(v2, v3) - v3,
        )

    def fd_bracket(vs, fx, fy, eps):
        def shift(ws, e):
            return tuple(v + e * w for v, w in zip(vs, ws))

        X, Y = fx(*vs), fy(*vs)
        dy = tuple(
            (a - b) / (2 * eps)
            for a, b in zip(fy(*shift(X, eps)), fy(*shift(X, -eps)))
        )
        dx = tuple(
            (a - b) / (2 * eps)
            for a, b in zip(fx(*shift(Y, eps)), fx(*shift(Y, -eps)))
        )
        return tuple(a - b for a, b in zip(dy, dx))

    rng = default_rng(209)
    for _ in range(10):
        T = random_strongly_regular_triple(rng)
        vs = tuple(p.rep for p in T.points)
        closed = b_commutator(T)

        def err(eps):
            fd = fd_bracket(vs, field_b1, field_b2, eps)
            return max(np.abs(a - b).max() for a, b in zip(closed, fd))

        e2, e3 = err(1e-2), err(1e-3)
        assert e3 <= e2 / 6.0
        assert e3 <= 1e-4

    for _ in range(20):
        T = random_strongly_regular_triple(rng)
        Z = vertical_part(T, b_commutator(T)).lie
        om = omega_commutator(T)
        scale = max(1.0, float(np.abs(om).max()))
        assert np.abs(Z @ T.p1.rep - om).max() <= 1e-9 * scale

        # pairing displays of the vertical curvature against the dual frame
        c = s_coords(T)
        p1, p2, p3 = T.points
        g21 = form(p2.rep, p1.rep)
        g31 = form(p3.rep, p1.rep)
        u3 = point(p2.rep / g21 - p3.rep / g31)
        u2 = polar_point(p1, u3)
        bco = form(p2.rep, u2.rep) / g21
        s1 = c.sigma[0]
        t, t1, t2, al, be = c.t, c.t1, c.t2, c.alpha, c.beta
        d1 = (
            (2 * al**2 - (1 - be - t2) * t1 * t2)
            / (t1**2 * t2**2 * (t - 1)) * s1 * bco
        )
        d2 = (
            1j * al * (1 - be - 3 * t2 + 2 * t1 * t2)
            / (3 * t1**2 * t2**2 * (t - 1)) * s1
        )
        assert abs(form(om, u2.rep) - d1) <= 1e-9 * max(1.0, abs(d1))
        assert abs(form(om, p1.rep) - d2) <= 1e-9 * max(1.0, abs(d2))


def test_10_holonomy_dimension():
    rng = default_rng(210)
    for _ in range(20):
        T = random_strongly_regular_triple(rng)
        assert holonomy_dimension(T, 8, ds=1e-2, rng=default_rng(1)) == 2
        sv = np.linalg.svd(
            holonomy_samples(T, 8, ds=1e-2, rng=default_rng(2)), compute_uv=False
        )
        noise = np.linalg.svd(
            holonomy_samples(T, 4, ds=0.0, rng=default_rng(3)), compute_uv=False
        )[0]
        assert sv[1] >= 1e3 * noise
    for _ in range(20):
        T = triple_from_coords(random_strongly_regular_coords(rng, real=True))
        assert holonomy_dimension(T, 8, ds=1e-2, rng=default_rng(4)) == 1
        F = T.product()
        scale = max(1.0, float(np.abs(F.m).max()))
        for _ in range(3):
            g, _ = rectangle_holonomy(
                T, float(rng.uniform(0.5, 2.0)) * 1e-2,
                float(rng.uniform(0.5, 2.0)) * 1e-2,
            )
            assert np.abs(g.m @ F.m - F.m @ g.m).max() <= 1e-8 * scale
            # in the standard frame the real plane is the real span
            assert np.abs(g.m.imag).max() <= 1e-7


def test_11_pentagons():
    rng = default_rng(211)

    def checks(P, delta):
        assert np.abs(P.product().m - delta.matrix()).max() <= 1e-9
        a = alpha(*P.points[:3])
        b = beta(*P.points[:3])
        t45 = tance(P.points[3], P.points[4])
        assert abs(8j * a + 4 * b - 1 - delta.value * (4 * t45 - 1)) <= 1e-9

    # central value 1: all-negative real chart (alpha = 0, beta = t4),
    # splitting the triple product into the two remaining reflections
    for _ in range(50):
        t1 = float(rng.uniform(2.5, 6.0))
        t2 = float(rng.uniform(2.5, 6.0))
        t4 = float(rng.uniform(1.2, min(5.0, (t1 - 1.0) * (t2 - 1.0) - 0.2)))
        rhs = 1.0 - (t1 + t2 + t4 - 1.0) / (t1 * t2)
        c = SCoords(
            t=1.0 + float(np.sqrt(rhs)), t1=t1, t2=t2,
            sigma=(-1, -1, -1), alpha=0.0, beta=t4,
        )
        T = triple_from_coords(c)
        x1, x2 = split_two_reflections(T.product(), float(rng.uniform(-1.0, 1.0)))
        P = pentagon(T.p1, T.p2, T.p3, x2, x1)
        checks(P, CubeRoot(0))
        assert all(p.sign == -1 for p in P.points)
        assert is_real_pentagon(P)

    for k in (1, 2):
        delta = CubeRoot(k)
        for _ in range(50):
            m = random_pentagon_moduli(rng, k)
            P = pentagon_from_moduli(m, delta, s5=float(rng.uniform(-1.5, 1.5)))
            checks(P, delta)
            assert sum(1 for p in P.points if p.sign == 1) == 1
            assert not is_real_pentagon(P)
            t1, t2, t4 = pentagon_moduli(P)
            t = s_coords(P.triple()).t
            lhs = (t1 - 1.0) * (t2 - 1.0)
            rhs = (
                t1 * t2 * (t - 1.0) ** 2
                + 3.0 * (4.0 * t4 - 1.0) ** 2 / (256.0 * t1 * t2)
                + (3.0 - 4.0 * t4) / 8.0
            )
            assert abs(lhs - rhs) <= 1e-9


def test_12_spherical_flip_fixture():
    z = 0.125
    G = np.array(
        [[0.0, 0.5, 1.0], [0.5, 0.0, z], [1.0, z, 1.0]], dtype=complex
    )
    v1, v2, v3 = realize_gram(Gram(m=G))
    p2 = point(v1 + v2)
    q2 = point(0.5 * v1 + 2.0 * v2)
    p3 = point(v3)
    assert tance(p2, p3) == pytest.approx(81.0 / 64.0, abs=1e-12)
    assert line_type(p2, p3) is LineType.HYPERBOLIC
    assert tance(q2, p3) == pytest.approx(9.0 / 16.0, abs=1e-12)
    assert line_type(q2, p3) is LineType.SPHERICAL
