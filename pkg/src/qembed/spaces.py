"""Concrete example spaces with exact distance oracles.

Flat tori, flat orbifolds, lens spaces, holonomy bundles and Euclidean cones
are all presented as isometry-group quotients and served by the enumeration
oracle; ellipsoid boundaries get a triangulated-mesh geodesic oracle instead
(no closed form exists for their intrinsic distance).
"""
from __future__ import annotations

import functools
import math

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph
import scipy.spatial

from .geometry import Euclidean, Product, Sphere
from .quotient import AffineIsometry, QuotientSpace, translation_isometry

_PI = math.pi


def reduce_angle(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    t = math.fmod(theta + _PI, 2.0 * _PI)
    if t <= 0:
        t += 2.0 * _PI
    return t - _PI


def rot2(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


# -- flat tori and orbifolds ------------------------------------------------------


def flat_torus(basis, cap: int = 10**6) -> QuotientSpace:
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    n = basis.shape[1]
    space = QuotientSpace(Euclidean(n), [translation_isometry(v) for v in basis],
                          cap=cap, name=f"torus-{n}d")
    space.sampler = lambda count, rng: rng.random((count, n)) @ basis
    return space


def flat_orbifold(n: int, generators, cap: int = 10**6, sample_radius: float = 2.0) -> QuotientSpace:
    space = QuotientSpace(Euclidean(n), list(generators), cap=cap, name=f"orbifold-{n}d")
    basis = space._translation_basis

    def sampler(count, rng):
        if basis is not None:
            return rng.random((count, n)) @ basis
        pts = rng.normal(size=(count, n))
        pts *= (sample_radius * rng.random(count) ** (1.0 / n) /
                np.linalg.norm(pts, axis=1))[:, None]
        return pts

    space.sampler = sampler
    return space


# -- lens spaces -------------------------------------------------------------------


def lens_generator(p: int, q: int) -> AffineIsometry:
    m = np.zeros((4, 4))
    m[:2, :2] = rot2(2.0 * _PI / p)
    m[2:, 2:] = rot2(2.0 * _PI * q / p)
    return AffineIsometry(m, np.zeros(4))


def lens_space(p: int, q: int, cap: int = 10**6) -> QuotientSpace:
    """L(p,q) = S^3 / Z_p with t (z1, z2) = (e^{2 pi i t/p} z1, e^{2 pi i t q/p} z2)."""
    if math.gcd(p, q) != 1:
        raise ValueError("lens space requires coprime (p, q)")
    space = QuotientSpace(Sphere(4, 1.0), [lens_generator(p, q)], cap=cap,
                          name=f"lens-{p}-{q}")

    def sampler(count, rng):
        pts = rng.normal(size=(count, 4))
        return pts / np.linalg.norm(pts, axis=1)[:, None]

    space.sampler = sampler
    space.lens_pq = (p, q)
    return space


def in_lens_chart(j: int, v, slack: float = 0.0) -> bool:
    """Chart U_j membership: |z_{3-j}| < sqrt(3) |z_j| (shrunk by slack)."""
    v = np.asarray(v, dtype=float)
    r1 = float(np.hypot(v[0], v[1]))
    r2 = float(np.hypot(v[2], v[3]))
    if j == 2:
        r1, r2 = r2, r1
    return r2 < (math.sqrt(3.0) - slack) * r1


def lens_chart_point(p: int, q: int, j: int, v) -> np.ndarray:
    """Map a lens-space point in U_j to its holonomy-bundle point (theta, w)."""
    from .embeddings import _chart_lens

    if not in_lens_chart(j, v):
        raise ValueError("point outside the requested chart")
    return _chart_lens({"p": p, "q": q, "j": j})(np.asarray(v, dtype=float))


def lens_chart_params(p: int, q: int, j: int) -> tuple[float, float]:
    """(base circumference, holonomy angle) of the chart bundle of U_j."""
    if j == 1:
        return 2.0 * _PI / p, 2.0 * _PI * q / p
    s = pow(q, -1, p)
    return 2.0 * _PI / p, 2.0 * _PI * s / p


def lens_chart_tensor_ratio(alpha: float, probe) -> float:
    """g(v,v)/g_f(v,v) for a tangent probe (a,b,c) in (d theta, d alpha, d phi).

    The round metric is cos^2(a) dtheta^2 + dalpha^2 + sin^2(a) dphi^2 and the
    flattened one is dtheta^2 + dalpha^2 + alpha^2 dphi^2; on alpha < pi/3 the
    ratio lies in [1/4, 4].
    """
    a, b, c = (float(t) for t in probe)
    num = np.cos(alpha) ** 2 * a * a + b * b + np.sin(alpha) ** 2 * c * c
    den = a * a + b * b + alpha * alpha * c * c
    if den == 0.0:
        return 1.0
    if alpha == 0.0 and a == 0.0 and b == 0.0:
        return 1.0
    return float(num / den)


# -- holonomy bundles ---------------------------------------------------------------


def holonomy_bundle(theta: float | None = None, d: int = 2, base_circumference: float = 2.0 * _PI,
                    matrix=None, fiber_cap: float | None = None, cap: int = 10**6) -> QuotientSpace:
    """Flat R^d-bundle over a circle: t (x, w) = (x + b t, H^t w)."""
    if matrix is None:
        if d != 2:
            raise ValueError("angle-specified holonomy needs d = 2")
        matrix = rot2(0.0 if theta is None else float(theta))
    matrix = np.asarray(matrix, dtype=float)
    b = float(base_circumference)
    gen = AffineIsometry(np.eye(1), np.array([b]), matrix)
    space = QuotientSpace(Product(Euclidean(1), Euclidean(d)), [gen], cap=cap,
                          name="holonomy-bundle")
    D = b / 2.0
    if fiber_cap is None:
        fiber_cap = 2.0**5 * D
    space.bundle_params = {"b": b, "d": d, "theta": theta, "fiber_cap": float(fiber_cap)}

    def sampler(count, rng):
        x = rng.random(count) * b
        w = rng.normal(size=(count, d))
        w *= (fiber_cap * rng.random(count) ** (1.0 / d) / np.linalg.norm(w, axis=1))[:, None]
        return np.column_stack([x, w])

    space.sampler = sampler
    return space


def bundle_radial(space: QuotientSpace, x) -> float:
    """Distance to the zero section: the fiber norm (exact for these bundles)."""
    split = space.ambient.base.dim
    return float(np.linalg.norm(np.asarray(x, dtype=float)[split:]))


def sample_annulus(b: float, D: float, k: int, count: int, rng, d: int = 2) -> np.ndarray:
    """Points of T_k = {2^{k-1} D <= |w| <= 2^{k+1} D} (T_0 = {|w| <= 2D})."""
    x = rng.random(count) * b
    if k == 0:
        lo, hi = 1e-6, 2.0 * D
    else:
        lo, hi = 2.0 ** (k - 1) * D, 2.0 ** (k + 1) * D
    r = (lo**d + (hi**d - lo**d) * rng.random(count)) ** (1.0 / d)
    w = rng.normal(size=(count, d))
    w *= (r / np.linalg.norm(w, axis=1))[:, None]
    return np.column_stack([x, w])


def annulus_surrogate_space(b: float, twist: float, R: float, cap: int = 10**6) -> QuotientSpace:
    """The flat product (interval) x (torus) carrying the surrogate annulus metric.

    Coordinates (t, x, y) with y = R * fiber angle; the lattice is generated by
    (x, y) -> (x + b, y + R h') and y -> y + 2 pi R.
    """
    h = reduce_angle(twist)
    gens = [translation_isometry([0.0, b, R * h]), translation_isometry([0.0, 0.0, 2.0 * _PI * R])]
    space = QuotientSpace(Euclidean(3), gens, cap=cap, name="annulus-surrogate")
    return space


def annulus_flat_coords(space: QuotientSpace, R: float, x) -> np.ndarray:
    """(|w|, x, R arg w) for a bundle point, matching annulus_surrogate_space."""
    x = np.asarray(x, dtype=float)
    split = space.ambient.base.dim
    w = x[split:split + 2]
    return np.array([np.linalg.norm(w), x[0], R * np.arctan2(w[1], w[0])])


# -- Euclidean cones -----------------------------------------------------------------


def cone_space(n: int, generators, cap: int = 10**6, sample_radius: float = 2.0) -> QuotientSpace:
    """R^n/Gamma for Gamma fixing 0; isometric to the cone over S^{n-1}/Gamma."""
    gens = list(generators)
    for g in gens:
        if np.max(np.abs(g.translation)) > 1e-12:
            raise ValueError("cone generators must fix the origin")
    space = flat_orbifold(n, gens, cap=cap, sample_radius=sample_radius)
    space.name = f"cone-{n}d"
    link = QuotientSpace(Sphere(n, 1.0), gens, cap=cap, name=f"cone-link-{n}d")

    def link_sampler(count, rng):
        pts = rng.normal(size=(count, n))
        return pts / np.linalg.norm(pts, axis=1)[:, None]

    link.sampler = link_sampler
    space.link_space = link
    return space


def cyclic_cone(order: int, cap: int = 10**6) -> QuotientSpace:
    return cone_space(2, [AffineIsometry(rot2(2.0 * _PI / order), np.zeros(2))], cap=cap)


def cone_metric(link: QuotientSpace, t: float, x, s: float, y) -> float:
    """d([t,x],[s,y]) = sqrt(t^2 + s^2 - 2 t s cos d_link(x,y)) for diam(link) <= pi."""
    if t == 0.0 or s == 0.0:
        return abs(t - s) if (t == 0.0 or s == 0.0) else 0.0
    dl = link.quotient_distance(x, y)
    return float(np.sqrt(max(t * t + s * s - 2.0 * t * s * np.cos(dl), 0.0)))


# -- ellipsoid mesh oracle -------------------------------------------------------------


@functools.lru_cache(maxsize=4)
def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit icosphere by repeated 4-1 subdivision; (vertices, faces)."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ])
    vlist = [v for v in verts]
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in cache:
                m = vlist[i] + vlist[j]
                m /= np.linalg.norm(m)
                cache[key] = len(vlist)
                vlist.append(m)
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
        faces = np.asarray(new_faces)
    return np.asarray(vlist), faces


class EllipsoidMesh:
    """Geodesic oracle for S_N = {x^2 + y^2 + N^2 z^2 = 1} via graph shortest paths.

    The unit icosphere is mapped by (x, y, z) -> (x, y, z/N); the graph joins
    each vertex to its 1-, 2- and 3-ring neighbors with chord-length weights,
    which keeps the graph-metric overestimate below ~2 percent on the sphere.
    """

    def __init__(self, N: float, level: int = 6):
        self.N = float(N)
        self.level = int(level)
        unit, faces = icosphere(level)
        verts = unit.copy()
        verts[:, 2] /= self.N
        self.vertices = verts
        nv = len(verts)
        ii = np.concatenate([faces[:, 0], faces[:, 1], faces[:, 2]])
        jj = np.concatenate([faces[:, 1], faces[:, 2], faces[:, 0]])
        one = scipy.sparse.coo_matrix((np.ones_like(ii), (ii, jj)), shape=(nv, nv)).tocsr()
        one = ((one + one.T) > 0).astype(np.int8)
        rings = ((one + one @ one + one @ one @ one) > 0).astype(np.int8)
        rings.setdiag(0)
        adj = rings.tocoo()
        w = np.linalg.norm(verts[adj.row] - verts[adj.col], axis=1)
        self.graph = scipy.sparse.csr_matrix((w, (adj.row, adj.col)), shape=(nv, nv))
        self.edge_length = float(np.median(np.linalg.norm(
            verts[faces[:, 0]] - verts[faces[:, 1]], axis=1)))
        self._tree = scipy.spatial.cKDTree(verts)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def snap(self, points) -> np.ndarray:
        _, idx = self._tree.query(np.atleast_2d(np.asarray(points, dtype=float)))
        return idx

    def vertex_distances(self, sources) -> np.ndarray:
        return scipy.sparse.csgraph.dijkstra(self.graph, directed=False,
                                             indices=np.asarray(sources, dtype=int))

    def sample_vertex_indices(self, count: int, rng) -> np.ndarray:
        return rng.choice(self.num_vertices, size=count, replace=False)

    def quotient_distance(self, p, q) -> float:
        i, j = self.snap([p, q])
        row = scipy.sparse.csgraph.dijkstra(self.graph, directed=False, indices=[i])
        return float(row[0, j])

    def pair_distances(self, A, B, chunk: int = 64) -> np.ndarray:
        src = self.snap(A)
        dst = self.snap(B)
        uniq, inverse = np.unique(src, return_inverse=True)
        out = np.empty(len(src))
        for start in range(0, len(uniq), chunk):
            idx = uniq[start:start + chunk]
            mat = self.vertex_distances(idx)
            for local, global_i in enumerate(range(start, start + len(idx))):
                mask = inverse == global_i
                out[mask] = mat[local, dst[mask]]
        return out

    def contains(self, p, tol: float = 1e-9) -> bool:
        x, y, z = np.asarray(p, dtype=float)
        return abs(x * x + y * y + self.N**2 * z * z - 1.0) <= tol


def ellipsoid_point(N: float, unit_point) -> np.ndarray:
    u = np.asarray(unit_point, dtype=float)
    return np.array([u[0], u[1], u[2] / N])


def ellipsoid_map(N: float, point) -> np.ndarray:
    """The explicit flattening map (x,y,z) -> (x, y, z + (1 - sqrt(x^2+y^2)) H(z))."""
    p = np.asarray(point, dtype=float)
    x, y, z = p
    if abs(x * x + y * y + N * N * z * z - 1.0) > 1e-9:
        raise ValueError("point is not on the ellipsoid surface")
    h = 1.0 if z >= 0 else 0.0
    return np.array([x, y, z + (1.0 - np.sqrt(x * x + y * y)) * h])


def ellipsoid_map_many(N: float, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rho = np.sqrt(pts[:, 0] ** 2 + pts[:, 1] ** 2)
    h = (pts[:, 2] >= 0).astype(float)
    out = pts.copy()
    out[:, 2] = pts[:, 2] + (1.0 - rho) * h
    return out


# -- unified construction ---------------------------------------------------------------


def construct_space(spec):
    """Build a space from a spec dict (raw quotient JSON or a model-space kind)."""
    if isinstance(spec, QuotientSpace):
        return spec
    if not isinstance(spec, dict):
        raise ValueError("space spec must be a dict")
    if "ambient" in spec:
        space = QuotientSpace.from_json(spec)
        _attach_default_sampler(space)
        return space
    kind = spec.get("kind")
    if kind == "flat_torus":
        return flat_torus(np.asarray(spec["basis"], dtype=float), cap=spec.get("cap", 10**6))
    if kind == "flat_orbifold":
        gens = [AffineIsometry.from_json(g) for g in spec["generators"]]
        return flat_orbifold(int(spec["n"]), gens, cap=spec.get("cap", 10**6))
    if kind == "lens":
        return lens_space(int(spec["p"]), int(spec["q"]), cap=spec.get("cap", 10**6))
    if kind == "holonomy_bundle":
        return holonomy_bundle(
            theta=spec.get("theta"),
            d=int(spec.get("d", 2)),
            base_circumference=float(spec.get("base_circumference", 2.0 * _PI)),
            matrix=None if spec.get("matrix") is None else np.asarray(spec["matrix"], dtype=float),
            fiber_cap=spec.get("fiber_cap"),
            cap=spec.get("cap", 10**6),
        )
    if kind == "cone":
        gens = [AffineIsometry.from_json(g) for g in spec["generators"]]
        return cone_space(int(spec["n"]), gens, cap=spec.get("cap", 10**6))
    if kind == "cyclic_cone":
        return cyclic_cone(int(spec["order"]), cap=spec.get("cap", 10**6))
    if kind == "ellipsoid":
        return EllipsoidMesh(float(spec["N"]), level=int(spec.get("mesh_level", 6)))
    raise ValueError(f"unknown space kind {kind!r}")


def _attach_default_sampler(space: QuotientSpace) -> None:
    ambient = space.ambient
    if isinstance(ambient, Sphere):
        n = ambient.n

        def sph(count, rng):
            pts = rng.normal(size=(count, n))
            return ambient.radius * pts / np.linalg.norm(pts, axis=1)[:, None]

        space.sampler = sph
        return
    if isinstance(ambient, Product):
        nb, nf = ambient.base.dim, ambient.fiber.dim
        shifts = np.asarray([g.translation for g in space.generators]) if space.generators else None
        span = float(np.max(np.abs(shifts))) if shifts is not None and shifts.size else 1.0
        cap = 16.0 * span

        def prod(count, rng):
            x = rng.random((count, nb)) * span
            if isinstance(ambient.fiber, Sphere):
                w = rng.normal(size=(count, nf))
                w *= ambient.fiber.radius / np.linalg.norm(w, axis=1)[:, None]
            else:
                w = rng.normal(size=(count, nf))
                w *= (cap * rng.random(count) ** (1.0 / nf) / np.linalg.norm(w, axis=1))[:, None]
            return np.column_stack([x, w])

        space.sampler = prod
        return
    basis = space._translation_basis
    n = ambient.dim

    def euc(count, rng):
        if basis is not None:
            return rng.random((count, n)) @ basis
        pts = rng.normal(size=(count, n))
        return 2.0 * pts * (rng.random(count) ** (1.0 / n) / np.linalg.norm(pts, axis=1))[:, None]

    space.sampler = euc
