"""Isometry-group quotients of flat and spherical ambients.

A :class:`QuotientSpace` is a presented metric space X/Gamma: an ambient, a
finite list of generating isometries, and an exact distance oracle obtained by
bounded enumeration of group elements.  Distances between orbits are

    d([p], [q]) = inf_{g in Gamma} d_ambient(p, g q),

and any minimizer satisfies |g|_q <= 2 d(p, q) by the triangle inequality, so
enumerating the ball of word norms up to twice the ambient distance is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Ambient, Euclidean, Product, Sphere, ambient_from_json

ORTHO_TOL = 1e-9
# Dedup grid for group elements: coarse buckets with an irrational-ish offset,
# then an exact tolerance check inside the bucket.
_BUCKET = 1e-6
_OFFSET = 0.5000001234567891e-6


class EnumerationCapError(RuntimeError):
    """Raised when ball enumeration exceeds the properly-discontinuous cap."""


def _check_orthogonal(m: np.ndarray, what: str) -> None:
    err = np.max(np.abs(m.T @ m - np.eye(m.shape[0])))
    if err > ORTHO_TOL:
        raise ValueError(f"{what} is not orthogonal (defect {err:.3g})")


@dataclass(frozen=True)
class AffineIsometry:
    """x -> A x + t on the base block, w -> F w on the optional fiber block."""

    matrix: np.ndarray
    translation: np.ndarray
    fiber_matrix: np.ndarray | None = None

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        t = np.atleast_1d(np.asarray(self.translation, dtype=float))
        if m.shape[0] != m.shape[1] or m.shape[0] != t.shape[0]:
            raise ValueError("matrix/translation dimension mismatch")
        _check_orthogonal(m, "matrix")
        f = self.fiber_matrix
        if f is not None:
            f = np.atleast_2d(np.asarray(f, dtype=float))
            _check_orthogonal(f, "fiber_matrix")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "fiber_matrix", f)

    @classmethod
    def _raw(cls, matrix, translation, fiber_matrix):
        """Internal constructor for products of already-validated isometries."""
        out = object.__new__(cls)
        object.__setattr__(out, "matrix", matrix)
        object.__setattr__(out, "translation", translation)
        object.__setattr__(out, "fiber_matrix", fiber_matrix)
        return out

    @property
    def base_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def fiber_dim(self) -> int:
        return 0 if self.fiber_matrix is None else self.fiber_matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.base_dim + self.fiber_dim

    def act(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"point has dim {x.shape}, isometry acts on dim {self.dim}")
        n = self.base_dim
        out = np.empty_like(x)
        out[:n] = self.matrix @ x[:n] + self.translation
        if self.fiber_matrix is not None:
            out[n:] = self.fiber_matrix @ x[n:]
        return out

    def inverse(self) -> "AffineIsometry":
        ainv = self.matrix.T.copy()
        finv = None if self.fiber_matrix is None else self.fiber_matrix.T.copy()
        return AffineIsometry._raw(ainv, -(ainv @ self.translation), finv)

    def params(self) -> np.ndarray:
        parts = [self.matrix.ravel(), self.translation]
        if self.fiber_matrix is not None:
            parts.append(self.fiber_matrix.ravel())
        return np.concatenate(parts)

    def is_identity(self, tol: float = ORTHO_TOL) -> bool:
        if np.max(np.abs(self.matrix - np.eye(self.base_dim))) > tol:
            return False
        if np.max(np.abs(self.translation)) > tol:
            return False
        f = self.fiber_matrix
        return f is None or np.max(np.abs(f - np.eye(self.fiber_dim))) <= tol

    def to_json(self) -> dict:
        out = {
            "matrix": [float(v) for v in self.matrix.ravel()],
            "translation": [float(v) for v in self.translation],
        }
        if self.fiber_matrix is not None:
            out["fiber_matrix"] = [float(v) for v in self.fiber_matrix.ravel()]
        return out

    @staticmethod
    def from_json(data: dict) -> "AffineIsometry":
        t = np.asarray(data["translation"], dtype=float)
        n = t.shape[0]
        m = np.asarray(data["matrix"], dtype=float).reshape(n, n)
        f = None
        if data.get("fiber_matrix") is not None:
            fr = np.asarray(data["fiber_matrix"], dtype=float)
            d = int(round(np.sqrt(fr.size)))
            f = fr.reshape(d, d)
        return AffineIsometry(m, t, f)


def compose(a: AffineIsometry, b: AffineIsometry) -> AffineIsometry:
    """The isometry acting as a after b: compose(a, b)(x) = a(b(x))."""
    if a.dim != b.dim or a.base_dim != b.base_dim:
        raise ValueError("composing isometries with mismatched signatures")
    if (a.fiber_matrix is None) != (b.fiber_matrix is None):
        raise ValueError("composing isometries with mismatched fiber blocks")
    f = None if a.fiber_matrix is None else a.fiber_matrix @ b.fiber_matrix
    return AffineIsometry._raw(a.matrix @ b.matrix,
                               a.matrix @ b.translation + a.translation, f)


def identity_isometry(ambient: Ambient) -> AffineIsometry:
    if isinstance(ambient, Product):
        return AffineIsometry(np.eye(ambient.base.n), np.zeros(ambient.base.n), np.eye(ambient.fiber.n))
    return AffineIsometry(np.eye(ambient.n), np.zeros(ambient.n))


def translation_isometry(v) -> AffineIsometry:
    v = np.asarray(v, dtype=float)
    return AffineIsometry(np.eye(v.shape[0]), v)


def rotation2(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


class _ElementStore:
    """Dedup store keyed on bucketed parameter vectors."""

    def __init__(self):
        self._buckets: dict[bytes, list[int]] = {}
        self.elements: list[AffineIsometry] = []
        self._params: list[np.ndarray] = []

    def _key(self, params: np.ndarray) -> bytes:
        return np.floor((params + _OFFSET) / _BUCKET).astype(np.int64).tobytes()

    def add(self, el: AffineIsometry) -> int | None:
        """Insert el; return its new index, or None if already present."""
        params = el.params()
        key = self._key(params)
        for idx in self._buckets.get(key, ()):
            if np.max(np.abs(self._params[idx] - params)) <= ORTHO_TOL:
                return None
        idx = len(self.elements)
        self.elements.append(el)
        self._params.append(params)
        self._buckets.setdefault(key, []).append(idx)
        return idx

    def __contains__(self, el: AffineIsometry) -> bool:
        params = el.params()
        key = self._key(params)
        return any(
            np.max(np.abs(self._params[idx] - params)) <= ORTHO_TOL
            for idx in self._buckets.get(key, ())
        )

    def __len__(self) -> int:
        return len(self.elements)


def _int_reduce_against(v: np.ndarray, basis: list[np.ndarray], tol: float) -> np.ndarray:
    for _ in range(64):
        changed = False
        for b in basis:
            mu = round(float(v @ b) / float(b @ b))
            if mu != 0:
                v = v - mu * b
                changed = True
        if not changed or np.linalg.norm(v) <= tol:
            break
    return v


def reduce_translation_generators(vectors: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Reduce a redundant translation generating set to an independent one.

    Shortest-first insertion with integer reduction (subtracting rounded
    projections); every step is an integer combination, so the generated
    subgroup is preserved while near-zero leftovers are dropped.
    """
    vs = np.atleast_2d(np.asarray(vectors, dtype=float))
    order = np.argsort(np.linalg.norm(vs, axis=1), kind="stable")
    basis: list[np.ndarray] = []
    for v in vs[order]:
        w = _int_reduce_against(v.copy(), basis, tol)
        if np.linalg.norm(w) > tol:
            basis.append(w)
            for _ in range(32):
                basis.sort(key=lambda u: float(np.linalg.norm(u)))
                changed = False
                for i in range(1, len(basis)):
                    r = _int_reduce_against(basis[i], basis[:i], tol)
                    if np.linalg.norm(r - basis[i]) > tol:
                        basis[i] = r
                        changed = True
                basis = [u for u in basis if np.linalg.norm(u) > tol]
                if not changed:
                    break
    return np.asarray(basis)


def lattice_ball(basis: np.ndarray, radius: float, cap: int | None = None) -> np.ndarray:
    """All integer combinations of the basis rows with norm <= radius (incl. 0)."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    inv = np.linalg.inv(basis)
    bounds = np.floor(radius * np.linalg.norm(inv, axis=0) + 1e-9).astype(np.int64)
    total = int(np.prod(2 * bounds + 1))
    if cap is not None and total > cap:
        raise EnumerationCapError(
            f"not properly discontinuous at this scale (lattice box of {total} points)")
    axes = [np.arange(-b, b + 1) for b in bounds]
    coeffs = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(bounds))
    # elementwise accumulation: each vector's floats are independent of the box
    # shape, so enumerations at different radii agree bitwise on shared points
    vecs = np.zeros((len(coeffs), basis.shape[1]))
    for i in range(basis.shape[0]):
        vecs += coeffs[:, i:i + 1] * basis[i]
    return vecs[np.linalg.norm(vecs, axis=1) <= radius + 1e-9]


class GroupBall:
    """All distinct group elements g with |g|_center <= radius, inverse-closed."""

    def __init__(self, center, radius, elements, displacements,
                 translations=None, center_orbit=None, element_builder=None):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self._elements = elements
        self._builder = element_builder
        self.displacements = np.asarray(displacements, dtype=float)
        self.translations = translations   # fast path: pure base translations
        self._center_orbit = center_orbit
        self._arrays = None

    @property
    def elements(self) -> list[AffineIsometry]:
        if self._elements is None:
            self._elements = self._builder()
        return self._elements

    def __len__(self) -> int:
        return len(self.displacements)

    def acting_arrays(self):
        """Stacked (A, t, F) arrays for vectorized orbit computations."""
        if self._arrays is None:
            els = self.elements
            A = np.stack([e.matrix for e in els])
            t = np.stack([e.translation for e in els])
            F = None
            if els and els[0].fiber_matrix is not None:
                F = np.stack([e.fiber_matrix for e in els])
            self._arrays = (A, t, F)
        return self._arrays

    def orbit(self, x) -> np.ndarray:
        """All images g x, one row per element."""
        x = np.asarray(x, dtype=float)
        if self._center_orbit is not None and np.array_equal(x, self.center):
            return self._center_orbit
        if self.translations is not None:
            out = np.tile(x, (len(self.translations), 1))
            out[:, : self.translations.shape[1]] += self.translations
            return out
        A, t, F = self.acting_arrays()
        n = A.shape[1]
        out = np.empty((len(self.displacements), x.shape[0]))
        out[:, :n] = np.einsum("kij,j->ki", A, x[:n]) + t
        if F is not None:
            out[:, n:] = np.einsum("kij,j->ki", F, x[n:])
        return out

    def contains_element(self, el: AffineIsometry, tol: float = ORTHO_TOL) -> bool:
        p = el.params()
        return any(np.max(np.abs(e.params() - p)) <= tol for e in self.elements)


class QuotientSpace:
    """A presented quotient X/Gamma with an exact, enumeration-based oracle.

    All operations are pure functions of the immutable presentation; lazy
    caches (fiber powers, cyclic groups, translation bases) are idempotent, so
    enumeration and distance queries may run concurrently on a shared space.
    """

    def __init__(self, ambient: Ambient, generators, basepoint=None, cap: int = 10**6,
                 name: str | None = None):
        self.ambient = ambient
        self.generators = tuple(generators)
        self.cap = int(cap)
        self.name = name or "quotient"
        if basepoint is None:
            basepoint = self._default_basepoint()
        self.basepoint = np.asarray(basepoint, dtype=float)
        self.sampler = None  # set by model-space constructors; (count, rng) -> points
        self._validate()

    def _default_basepoint(self) -> np.ndarray:
        if isinstance(self.ambient, Sphere):
            p = np.zeros(self.ambient.n)
            p[0] = self.ambient.radius
            return p
        if isinstance(self.ambient, Product) and isinstance(self.ambient.fiber, Sphere):
            p = np.zeros(self.ambient.dim)
            p[self.ambient.base.dim] = self.ambient.fiber.radius
            return p
        return np.zeros(self.ambient.dim)

    def _validate(self) -> None:
        for g in self.generators:
            if g.dim != self.ambient.dim:
                raise ValueError("generator dimension does not match ambient")
            if isinstance(self.ambient, Sphere) and np.max(np.abs(g.translation), initial=0.0) > ORTHO_TOL:
                raise ValueError("sphere ambients admit linear orthogonal generators only")
            if isinstance(self.ambient, Product):
                if g.fiber_matrix is None or g.fiber_dim != self.ambient.fiber.n:
                    raise ValueError("product-ambient generators need a fiber block of the fiber dimension")

    # -- ambient plumbing ---------------------------------------------------

    def ambient_distance(self, x, y) -> float:
        return self.ambient.distance(x, y)

    def act(self, g: AffineIsometry, x) -> np.ndarray:
        if g.dim != self.ambient.dim:
            raise ValueError("isometry/ambient dimension mismatch")
        return g.act(x)

    def displacement(self, g: AffineIsometry, p) -> float:
        """The subadditive norm |g|_p = d(g p, p)."""
        return self.ambient.distance(g.act(p), p)

    # -- enumeration --------------------------------------------------------

    def _symmetrized_generators(self) -> list[AffineIsometry]:
        store = _ElementStore()
        store.add(identity_isometry(self.ambient))
        gens = []
        for g in self.generators:
            for h in (g, g.inverse()):
                if store.add(h) is not None:
                    gens.append(h)
        return gens

    def enumerate_ball(self, p, r: float) -> GroupBall:
        """Every group element expressible as a generator word with |g|_p <= r.

        BFS over words; a partial word is pruned once its displacement exceeds
        r plus the largest single-generator displacement (sound because the
        word norms |.|_p are subadditive).
        """
        p = np.asarray(p, dtype=float)
        if r < 0:
            raise ValueError("radius must be nonnegative")
        basis = self._translation_basis
        if basis is not None:
            # pure translation lattice: the word ball is the norm ball, enumerable
            # directly (displacement is base-point independent here)
            vecs = lattice_ball(basis, r, cap=self.cap)
            norms = np.linalg.norm(vecs, axis=1)
            order = np.lexsort(np.vstack([vecs.T, norms]))
            vecs, norms = vecs[order], norms[order]
            nb = basis.shape[1]
            eye = np.eye(nb)
            fib = None
            if isinstance(self.ambient, Product):
                fib = np.eye(self.ambient.fiber.n)
            els = [AffineIsometry._raw(eye, v, fib) for v in vecs]
            return GroupBall(p, r, els, norms, translations=vecs)
        if len(self.generators) == 1:
            ball = self._single_generator_ball(p, r)
            if ball is not None:
                return ball
        gens = self._symmetrized_generators()
        ident = identity_isometry(self.ambient)
        if not gens:
            return GroupBall(p, r, [ident], np.zeros(1))
        maxgen = max(self.displacement(g, p) for g in gens)
        margin = r + maxgen + 1e-9
        keep = r + 1e-9

        store = _ElementStore()
        store.add(ident)
        disps = [0.0]
        frontier = [ident]
        while frontier:
            nxt = []
            for el in frontier:
                for g in gens:
                    cand = compose(el, g)
                    d = self.displacement(cand, p)
                    if d > margin:
                        continue
                    if store.add(cand) is not None:
                        if len(store) > self.cap:
                            raise EnumerationCapError(
                                "not properly discontinuous at this scale "
                                f"(more than {self.cap} elements within radius {margin:.3g})"
                            )
                        disps.append(d)
                        nxt.append(cand)
            frontier = nxt

        kept: list[AffineIsometry] = []
        kept_d: list[float] = []
        kept_store = _ElementStore()
        for el, d in zip(store.elements, disps):
            if d <= keep and kept_store.add(el) is not None:
                kept.append(el)
                kept_d.append(d)
        # Close under inverses: |g^{-1}|_p = |g|_p, so this stays inside radius r.
        for el, d in zip(list(kept), list(kept_d)):
            inv = el.inverse()
            if kept_store.add(inv) is not None:
                kept.append(inv)
                kept_d.append(d)
        return GroupBall(p, r, kept, np.asarray(kept_d))

    def _single_generator_ball(self, p: np.ndarray, r: float) -> GroupBall | None:
        """Closed forms for cyclic groups: power ranges instead of word search."""
        g = self.generators[0]
        nb = g.base_dim
        eye = np.eye(nb)
        base_translates = (np.max(np.abs(g.matrix - eye)) <= ORTHO_TOL
                           and np.linalg.norm(g.translation) > ORTHO_TOL)
        if base_translates:
            v = g.translation
            T = int(np.floor(r * (1.0 + 1e-12) / np.linalg.norm(v))) + 1
            if 2 * T + 1 > self.cap:
                raise EnumerationCapError(
                    f"not properly discontinuous at this scale ({2 * T + 1} powers)")
            ts = np.arange(-T, T + 1)
            base_disp = np.abs(ts) * np.linalg.norm(v)
            orbit = np.tile(p, (len(ts), 1))
            orbit[:, :nb] += ts[:, None] * v
            if g.fiber_matrix is None:
                disps = base_disp
                stack = None
            else:
                stack = self._fiber_power_stack(T)
                pf = p[nb:]
                fib_imgs = np.einsum("kij,j->ki", stack, pf)
                orbit[:, nb:] = fib_imgs
                if isinstance(self.ambient, Product) and not isinstance(
                        self.ambient.fiber, Euclidean):
                    fib_d = self.ambient.fiber.distance_many(pf, fib_imgs)
                else:
                    diff = fib_imgs - pf
                    fib_d = np.sqrt(np.einsum("ki,ki->k", diff, diff))
                disps = np.hypot(base_disp, fib_d)
            keep = disps <= r + 1e-9
            ts_kept = ts[keep]

            def build():
                return [AffineIsometry._raw(eye, t * v,
                                            None if stack is None else stack[t + T])
                        for t in ts_kept]

            return GroupBall(p, r, None, disps[keep], center_orbit=orbit[keep],
                             element_builder=build)
        if np.linalg.norm(g.translation) <= ORTHO_TOL:
            group = self._cached_cyclic_group()
            if group is None:
                return None
            els, disps = [], []
            for el in group:
                d = self.displacement(el, p)
                if d <= r + 1e-9:
                    els.append(el)
                    disps.append(d)
            return GroupBall(p, r, els, np.asarray(disps))
        return None

    def _fiber_power_stack(self, T: int) -> np.ndarray:
        """Stacked fiber powers F^t for t in [-T, T] (cached, grown on demand)."""
        g = self.generators[0]
        if not hasattr(self, "_fpow"):
            self._fpow = [np.eye(g.fiber_dim)]
        while len(self._fpow) <= T:
            self._fpow.append(g.fiber_matrix @ self._fpow[-1])
        pos = self._fpow[: T + 1]
        return np.stack([pos[-t].T for t in range(-T, 0)] + pos)

    def _cached_cyclic_group(self) -> list[AffineIsometry] | None:
        """The full finite cyclic group generated by a single linear isometry."""
        if not hasattr(self, "_cyclic_group"):
            g = self.generators[0]
            els = [identity_isometry(self.ambient)]
            cur = g
            while not cur.is_identity(1e-8):
                els.append(cur)
                cur = compose(cur, g)
                if len(els) > min(self.cap, 10**5):
                    self._cyclic_group = None
                    return None
            self._cyclic_group = els
        return self._cyclic_group

    # -- distances ----------------------------------------------------------

    def quotient_distance(self, p, q) -> float:
        """Exact quotient distance d([p],[q]) by bounded enumeration at q."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        d0 = self.ambient.distance(p, q)
        if not self.generators or d0 == 0.0:
            return d0
        ball = self.enumerate_ball(q, 2.0 * d0)
        images = ball.orbit(q)
        return float(np.min(self.ambient.distance_many(p, images)))

    def distances_to_many(self, x, points) -> np.ndarray:
        """Quotient distances from [x] to each [point], one enumeration total."""
        x = np.asarray(x, dtype=float)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        damb = self.ambient.distance_many(x, points)
        if not self.generators:
            return damb
        ball = self.enumerate_ball(x, 2.0 * float(np.max(damb)))
        images = ball.orbit(x)
        chunk = max(1, int(4e6 // max(1, len(images))))
        out = np.empty(len(points))
        for start in range(0, len(points), chunk):
            block = points[start:start + chunk]
            out[start:start + chunk] = np.min(
                self.ambient.cross_distance(images, block), axis=0)
        return out

    def pairwise_distances(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros((len(points), len(points)))
        for i, p in enumerate(points):
            if i + 1 < len(points):
                out[i, i + 1:] = self.distances_to_many(p, points[i + 1:])
        return out + out.T

    def pair_distances(self, A, B) -> np.ndarray:
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        return np.asarray([self.quotient_distance(a, b) for a, b in zip(A, B)])

    @property
    def _translation_basis(self) -> np.ndarray | None:
        """Base-translation rows if the group is purely translational, else None."""
        if not hasattr(self, "_tbasis"):
            rows = []
            ok = bool(self.generators)
            for g in self.generators:
                pure = (np.max(np.abs(g.matrix - np.eye(g.base_dim))) <= ORTHO_TOL
                        and (g.fiber_matrix is None
                             or np.max(np.abs(g.fiber_matrix - np.eye(g.fiber_dim))) <= ORTHO_TOL))
                if not pure:
                    ok = False
                    break
                rows.append(g.translation)
            basis = None
            if ok:
                rows = np.asarray(rows)
                if rows.shape[0] == rows.shape[1] and abs(np.linalg.det(rows)) > 1e-12:
                    basis = rows
            self._tbasis = basis
        return self._tbasis

    def nearest_representative(self, x, target) -> np.ndarray:
        """The orbit point of [x] closest (in the ambient) to target."""
        x = np.asarray(x, dtype=float)
        target = np.asarray(target, dtype=float)
        basis = self._translation_basis
        if basis is not None:
            nb = basis.shape[1]
            coeff = np.linalg.solve(basis.T, (target - x)[:nb])
            base = np.floor(coeff)
            shifts = np.stack(np.meshgrid(*([[0.0, 1.0, -1.0, 2.0]] * len(coeff)), indexing="ij"),
                              axis=-1).reshape(-1, len(coeff))
            cands = (base + shifts) @ basis
            pts = x.copy()[None, :].repeat(len(cands), axis=0)
            pts[:, :nb] += cands
            return pts[int(np.argmin(self.ambient.distance_many(target, pts)))]
        d0 = self.ambient.distance(x, target)
        ball = self.enumerate_ball(x, 2.0 * d0)
        images = ball.orbit(x)
        return images[int(np.argmin(self.ambient.distance_many(target, images)))]

    # -- local groups -------------------------------------------------------

    def local_group(self, p, r: float) -> tuple[GroupBall, "QuotientSpace"]:
        """Gamma_p(r), the local group generated by elements with |g|_p <= 8r.

        Returns the generating ball and the derived quotient X/Gamma_p(r);
        the r-ball about [p] is isometric between the two quotients.  When the
        generating set is purely translational its presentation is reduced to
        an independent basis of the same subgroup.
        """
        p = np.asarray(p, dtype=float)
        ball = self.enumerate_ball(p, 8.0 * r)
        gens = [e for e in ball.elements if not e.is_identity()]
        if gens and all(
            np.max(np.abs(g.matrix - np.eye(g.base_dim))) <= ORTHO_TOL
            and (g.fiber_matrix is None
                 or np.max(np.abs(g.fiber_matrix - np.eye(g.fiber_dim))) <= ORTHO_TOL)
            for g in gens
        ):
            reduced = reduce_translation_generators(
                np.asarray([g.translation for g in gens]))
            fib = gens[0].fiber_matrix
            gens = [AffineIsometry._raw(np.eye(len(v)), v,
                                        None if fib is None else np.eye(fib.shape[0]))
                    for v in reduced]
        derived = QuotientSpace(self.ambient, gens, basepoint=p, cap=self.cap,
                                name=f"{self.name}/local")
        return ball, derived

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient.to_json(),
            "generators": [g.to_json() for g in self.generators],
            "cap": self.cap,
        }

    @staticmethod
    def from_json(data: dict) -> "QuotientSpace":
        ambient = ambient_from_json(data["ambient"])
        gens = [AffineIsometry.from_json(g) for g in data.get("generators", [])]
        return QuotientSpace(ambient, gens, cap=int(data.get("cap", 10**6)))


@dataclass
class Net:
    """An eps-separated point set covering its host region at sampler resolution."""

    scale: float
    points: np.ndarray
    host: QuotientSpace

    def __len__(self) -> int:
        return len(self.points)


def build_net(space: QuotientSpace, samples, eps: float) -> Net:
    """Greedy eps-net: accept a sample iff it is > eps from all accepted points.

    Samples are consumed in the given (deterministic) order, so the result is
    reproducible for a fixed sampler.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise ValueError("empty sampler")
    accepted = [samples[0]]
    for s in samples[1:]:
        d = space.distances_to_many(s, np.asarray(accepted))
        if np.all(d > eps):
            accepted.append(s)
    return Net(eps, np.asarray(accepted), space)
