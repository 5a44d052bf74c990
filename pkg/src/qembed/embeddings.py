"""Evaluable embeddings with serializable construction trees.

An :class:`Embedding` is a map from ambient representatives of a quotient
space into R^N.  It is stored as a construction tree (plain dict) listing the
operator at each node together with every constant, net point and net value
needed to re-evaluate the map bit-reproducibly; `build_evaluator` compiles a
tree back into a callable.  Claimed distortion constants are two-sided:
1/L d(a,b) <= |f(a)-f(b)| <= L d(a,b).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quotient import Net, QuotientSpace

_PI = math.pi


# -- chart formulas (pure coordinate maps usable inside trees) -------------------


def _rot2(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _chart_linear_map(params):
    m = np.asarray(params["matrix"], dtype=float)
    b = np.asarray(params["offset"], dtype=float)
    return lambda x: m @ x + b


def _chart_select(params):
    idx = list(params["indices"])
    return lambda x: np.asarray(x, dtype=float)[idx]


def _chart_bundle_untwist(params):
    """(x, w) -> (x, R(-twist*x/b) w): trivializes a rank-2 bundle over a circle."""
    b = float(params["b"])
    twist = float(params["twist"])
    split = int(params["split"])

    def fn(x):
        x = np.asarray(x, dtype=float)
        out = x.copy()
        out[split:split + 2] = _rot2(-twist * x[split - 1] / b) @ x[split:split + 2]
        return out

    return fn


def _chart_annulus_flat(params):
    """(x, w) -> (|w|, x, R*arg(w)): flat product coordinates on an annulus."""
    split = int(params["split"])
    R = float(params["R"])

    def fn(x):
        x = np.asarray(x, dtype=float)
        w = x[split:split + 2]
        return np.concatenate([[np.linalg.norm(w)], x[:split], [R * np.arctan2(w[1], w[0])]])

    return fn


def _chart_lens(params):
    """Lens chart U_j -> holonomy-bundle point (theta, alpha e^{i phi})."""
    j = int(params["j"])

    def fn(v):
        v = np.asarray(v, dtype=float)
        z1 = complex(v[0], v[1])
        z2 = complex(v[2], v[3])
        if j == 2:
            z1, z2 = z2, z1
        alpha = np.arctan2(abs(z2), abs(z1))
        theta = np.angle(z1)
        phi = np.angle(z2) if abs(z2) > 0 else 0.0
        return np.array([theta, alpha * np.cos(phi), alpha * np.sin(phi)])

    return fn


def _chart_angle_coord(params):
    i, j = int(params["i"]), int(params["j"])
    radius = float(params["radius"])
    return lambda x: np.array([radius * np.arctan2(x[j], x[i])])


def _chart_nearest_rep(params):
    from .spaces import construct_space  # lazy: spaces does not import this module

    space = construct_space(params["space"])
    center = np.asarray(params["center"], dtype=float)
    return lambda x: space.nearest_representative(x, center)


_CHARTS = {
    "linear_map": _chart_linear_map,
    "select": _chart_select,
    "bundle_untwist": _chart_bundle_untwist,
    "annulus_flat": _chart_annulus_flat,
    "lens_chart": _chart_lens,
    "angle_coord": _chart_angle_coord,
    "nearest_rep": _chart_nearest_rep,
}


def _space_from_tree(data) -> QuotientSpace:
    from .spaces import construct_space

    return construct_space(data)


# -- evaluator compilation -------------------------------------------------------


class UnknownOperatorError(ValueError):
    pass


def build_evaluator(tree: dict) -> Callable[[np.ndarray], np.ndarray]:
    op = tree["op"]
    if op == "linear":
        m = np.asarray(tree["matrix"], dtype=float)
        b = np.asarray(tree["offset"], dtype=float)
        return lambda x: m @ np.asarray(x, dtype=float) + b
    if op == "circle_trig":
        c = float(tree["circumference"])
        idx = int(tree.get("index", 0))
        r = c / (2.0 * _PI)

        def circle(x):
            t = 2.0 * _PI * np.asarray(x, dtype=float)[idx] / c
            return np.array([r * np.cos(t), r * np.sin(t)])

        return circle
    if op == "chart":
        fn = _CHARTS[tree["name"]](tree["params"])
        child = build_evaluator(tree["child"])
        return lambda x: child(fn(x))
    if op == "affine_post":
        child = build_evaluator(tree["child"])
        s = float(tree["scale"])
        b = np.asarray(tree["offset"], dtype=float)
        return lambda x: s * child(x) + b
    if op == "product":
        split = int(tree["split"])
        f = build_evaluator(tree["children"][0])
        g = build_evaluator(tree["children"][1])
        return lambda x: np.concatenate([f(np.asarray(x)[:split]), g(np.asarray(x)[split:])])
    if op in ("stack", "patch"):
        evals = [build_evaluator(c) for c in tree["children"]]
        return lambda x: np.concatenate([e(x) for e in evals])
    if op == "cone":
        child = build_evaluator(tree["child"])
        L = float(tree["L"])
        anchor = np.asarray(tree["anchor"], dtype=float)

        def cone(x):
            x = np.asarray(x, dtype=float)
            r = float(np.linalg.norm(x))
            if r == 0.0:
                return np.zeros(1 + anchor.shape[0])
            link = child(x / r) - anchor
            return np.concatenate([[L * r], r * link])

        return cone
    if op == "mcshane":
        space = _space_from_tree(tree["space"])
        net = np.asarray(tree["net"], dtype=float)
        values = np.asarray(tree["values"], dtype=float)
        L = float(tree["lipschitz"])

        def mcshane(x):
            d = space.distances_to_many(x, net)
            iz = int(np.argmin(d))
            if d[iz] == 0.0:
                # exact net hit: the inf is attained at the point itself
                return values[iz].copy()
            return np.min(values + L * d[:, None], axis=0)

        return mcshane
    if op == "dist_to_set":
        space = _space_from_tree(tree["space"])
        net = np.asarray(tree["net"], dtype=float)
        return lambda x: np.array([float(np.min(space.distances_to_many(x, net)))])
    if op == "net_dist":
        space = _space_from_tree(tree["space"])
        net = np.asarray(tree["net"], dtype=float)
        return lambda x: space.distances_to_many(x, net)
    if op == "doubling":
        return _build_doubling(tree)
    if op == "annulus":
        return _build_annulus(tree)
    if op == "ellipsoid_map":
        def emap(x):
            x = np.asarray(x, dtype=float)
            h = 1.0 if x[2] >= 0 else 0.0
            lift = (1.0 - np.hypot(x[0], x[1])) * h
            return np.array([x[0], x[1], x[2] + lift])

        return emap
    raise UnknownOperatorError(f"unknown embedding operator {op!r}")


def _build_doubling(tree: dict):
    space = _space_from_tree(tree["space"])
    centers = np.asarray(tree["centers"], dtype=float)
    colors = np.asarray(tree["colors"], dtype=int)
    K = int(tree["num_colors"])
    radius = float(tree["radius"])
    N = int(tree["block_dim"])
    children = [build_evaluator(c) for c in tree["children"]]
    ext_center = np.asarray(tree["ext_center"], dtype=int)
    ext_point = np.asarray(tree["ext_point"], dtype=int)
    ext_values = np.asarray(tree["ext_values"], dtype=float)
    L = float(tree["ext_lipschitz"])
    include_net = bool(tree["include_net_dist"])
    class_centers = [np.flatnonzero(colors == k) for k in range(K)]
    class_ext = [np.flatnonzero(colors[ext_center] == k) for k in range(K)]

    def doubling(x):
        dq = space.distances_to_many(x, centers)
        blocks = []
        for k in range(K):
            idx = class_centers[k]
            i = idx[int(np.argmin(dq[idx]))]
            if dq[i] <= radius + 1e-12:
                blocks.append(children[i](x))
            else:
                rows = class_ext[k]
                blocks.append(np.min(ext_values[rows] + L * dq[ext_point[rows]][:, None], axis=0))
        if include_net:
            blocks.append(dq)
        return np.concatenate(blocks)

    return doubling


def _build_annulus(tree: dict):
    space = _space_from_tree(tree["space"])
    split = int(tree["split"])
    D = float(tree["D"])
    N = int(tree["pad_dim"])
    annuli = tree["annuli"]
    children = [build_evaluator(a["child"]) for a in annuli]
    ks = [int(a["k"]) for a in annuli]
    class_L = [float(v) for v in tree["class_lipschitz"]]
    all_nets = np.concatenate([np.asarray(a["net"], dtype=float) for a in annuli])
    all_vals = np.concatenate(
        [_pad_cols(np.asarray(a["values"], dtype=float), N) for a in annuli])
    owner = np.concatenate([np.full(len(a["net"]), i) for i, a in enumerate(annuli)])
    class_rows = [np.flatnonzero(np.asarray([ks[i] % 4 for i in owner]) == s) for s in range(4)]

    def in_annulus(k: int, r: float) -> bool:
        if k == 0:
            return r <= 2.0 * D + 1e-12
        return (2.0 ** (k - 1)) * D - 1e-12 <= r <= (2.0 ** (k + 1)) * D + 1e-12

    def annulus(x):
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x[split:]))
        out = [np.array([r])]
        dnet = None
        for s in range(4):
            direct = None
            for i, k in enumerate(ks):
                if k % 4 == s and in_annulus(k, r):
                    direct = i
                    break
            if direct is not None:
                out.append(_pad_vec(children[direct](x), N))
                continue
            if dnet is None:
                dnet = space.distances_to_many(x, all_nets)
            rows = class_rows[s]
            if len(rows) == 0:
                out.append(np.zeros(N))
                continue
            out.append(np.min(all_vals[rows] + class_L[s] * dnet[rows][:, None], axis=0))
        return np.concatenate(out)

    return annulus


def _pad_cols(a: np.ndarray, n: int) -> np.ndarray:
    if a.shape[1] == n:
        return a
    out = np.zeros((a.shape[0], n))
    out[:, : a.shape[1]] = a
    return out


def _pad_vec(v: np.ndarray, n: int) -> np.ndarray:
    if v.shape[0] == n:
        return v
    out = np.zeros(n)
    out[: v.shape[0]] = v
    return out


# -- the Embedding object ---------------------------------------------------------


@dataclass
class Embedding:
    """An evaluable map into R^N with its claimed distortion and construction tree."""

    tree: dict
    target_dim: int
    claimed_distortion: float | None
    provenance: str
    _eval: Callable = field(repr=False, default=None)

    def __post_init__(self):
        if self._eval is None:
            self._eval = build_evaluator(self.tree)

    def evaluate(self, x) -> np.ndarray:
        return self._eval(np.asarray(x, dtype=float))

    def evaluate_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.asarray([self._eval(x) for x in X])


def embedding_from_tree(tree: dict, provenance: str = "") -> Embedding:
    claim = tree.get("claim")
    return Embedding(tree=tree, target_dim=int(tree["target_dim"]),
                     claimed_distortion=None if claim is None else float(claim),
                     provenance=provenance or tree.get("provenance", ""))


# -- closed-form constructors ------------------------------------------------------


def linear_embedding(matrix, offset=None, claim: float | None = None) -> Embedding:
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if offset is None:
        offset = np.zeros(m.shape[0])
    if claim is None:
        s = np.linalg.svd(m, compute_uv=False)
        smin = float(np.min(s))
        if smin <= 0:
            raise ValueError("linear embedding must be injective")
        claim = max(float(np.max(s)), 1.0 / smin)
    tree = {"op": "linear", "matrix": m.tolist(), "offset": np.asarray(offset).tolist(),
            "claim": float(claim), "target_dim": m.shape[0]}
    return embedding_from_tree(tree, "linear map")


def identity_embedding(dim: int) -> Embedding:
    return linear_embedding(np.eye(dim), claim=1.0)


def circle_embedding(circumference: float, index: int = 0) -> Embedding:
    """x -> (R cos, R sin)(2 pi x / c): expansion 1, contraction pi/2."""
    tree = {"op": "circle_trig", "circumference": float(circumference), "index": int(index),
            "claim": _PI / 2.0, "target_dim": 2}
    return embedding_from_tree(tree, "trigonometric circle embedding")


def chart_embedding(child: Embedding, name: str, params: dict, chart_claim: float,
                    provenance: str = "") -> Embedding:
    claim = None
    if child.claimed_distortion is not None:
        claim = chart_claim * child.claimed_distortion
    tree = {"op": "chart", "name": name, "params": params, "child": child.tree,
            "chart_claim": float(chart_claim), "claim": claim,
            "target_dim": child.target_dim}
    return embedding_from_tree(tree, provenance or f"{name} chart into {child.provenance}")


def affine_post(child: Embedding, scale: float, offset) -> Embedding:
    tree = {"op": "affine_post", "child": child.tree, "scale": float(scale),
            "offset": np.asarray(offset, dtype=float).tolist(),
            "claim": child.claimed_distortion, "target_dim": child.target_dim}
    return embedding_from_tree(tree, child.provenance)


def normalize_to_unit_lipschitz(child: Embedding, anchor_point) -> Embedding:
    """Translate so the anchor maps to 0 and rescale by the claimed expansion."""
    if child.claimed_distortion is None:
        raise ValueError("need a claimed distortion to normalize")
    s = 1.0 / child.claimed_distortion
    off = -s * child.evaluate(anchor_point)
    return affine_post(child, s, off)


def product_embed(f: Embedding, g: Embedding, split: int) -> Embedding:
    """(x, y) -> (f(x), g(y)) on the l2 product; distortion sqrt(2) max(L_f, L_g)."""
    if f.claimed_distortion is None or g.claimed_distortion is None:
        raise ValueError("product factors need claimed distortions")
    claim = math.sqrt(2.0) * max(f.claimed_distortion, g.claimed_distortion)
    tree = {"op": "product", "split": int(split), "children": [f.tree, g.tree],
            "claim": claim, "target_dim": f.target_dim + g.target_dim}
    return embedding_from_tree(tree, f"product of ({f.provenance}) and ({g.provenance})")


def cone_embed(f: Embedding, link: QuotientSpace, link_samples) -> Embedding:
    """(r, x) -> (L r, r f(x)) on the Euclidean cone R^n/Gamma over its unit link.

    Checks diam(link) <= pi on the given samples and translates f so that 0 is
    in its image (at the first sample); the claimed distortion is 20 L.
    """
    if f.claimed_distortion is None:
        raise ValueError("cone child needs a claimed distortion")
    samples = np.atleast_2d(np.asarray(link_samples, dtype=float))
    diam = float(np.max(link.pairwise_distances(samples), initial=0.0))
    if diam > _PI + 1e-9:
        raise ValueError(f"link diameter {diam:.4f} exceeds pi; cone formula does not apply")
    L = f.claimed_distortion
    anchor = f.evaluate(samples[0])
    tree = {"op": "cone", "child": f.tree, "L": float(L), "anchor": anchor.tolist(),
            "claim": 20.0 * L, "target_dim": f.target_dim + 1}
    return embedding_from_tree(tree, f"cone over ({f.provenance})")


# -- net functions and extension ----------------------------------------------------


@dataclass
class NetFunction:
    """Vector values on a net with a certified Lipschitz constant."""

    net: Net
    values: np.ndarray
    lipschitz: float

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if len(self.values) != len(self.net.points):
            raise ValueError("one value row per net point required")
        dmat = self.net.host.pairwise_distances(self.net.points)
        vdiff = np.linalg.norm(self.values[:, None, :] - self.values[None, :, :], axis=-1)
        mask = dmat > 0
        if np.any(vdiff[mask] > self.lipschitz * dmat[mask] + 1e-9):
            raise ValueError("values violate the declared Lipschitz constant on the net")

    @property
    def target_dim(self) -> int:
        return self.values.shape[1]


def net_function_from_map(net: Net, fn, lipschitz: float | None = None) -> NetFunction:
    values = np.asarray([np.atleast_1d(fn(p)) for p in net.points], dtype=float)
    if lipschitz is None:
        dmat = net.host.pairwise_distances(net.points)
        vdiff = np.linalg.norm(values[:, None, :] - values[None, :, :], axis=-1)
        mask = dmat > 0
        lipschitz = float(np.max(vdiff[mask] / dmat[mask])) if np.any(mask) else 0.0
    return NetFunction(net=net, values=values, lipschitz=float(lipschitz))


def mcshane_extend(f: NetFunction) -> Embedding:
    """Per-coordinate inf-convolution extension off the net.

    Agrees with f exactly on net points; each coordinate is L-Lipschitz, so the
    vector map is sqrt(N) L-Lipschitz.  Extension only: no lower bound claimed.
    """
    if len(f.net.points) == 0:
        raise ValueError("empty net")
    host = f.net.host
    tree = {"op": "mcshane", "space": host.to_json(), "net": f.net.points.tolist(),
            "values": f.values.tolist(), "lipschitz": float(f.lipschitz),
            "claim": None, "target_dim": f.target_dim}
    return embedding_from_tree(
        tree, f"McShane extension of a {f.lipschitz:.4g}-Lipschitz net function")


def patch_two(f: NetFunction, g: NetFunction, host: QuotientSpace, L: float,
              coverage_samples=None, coverage_radius: float | None = None) -> Embedding:
    """F = (f~, g~, d(., A)) from two L-bi-Lipschitz charts covering the space.

    f and g are given on nets of their charts and extended by McShane; the
    third coordinate is the distance to the first chart's net.  Claimed
    distortion 10 L^2.  When coverage_samples are given, every sample must be
    within coverage_radius of one of the two nets (A union B covers X).
    """
    if coverage_samples is not None:
        if coverage_radius is None:
            coverage_radius = 2.0 * max(f.net.scale, g.net.scale)
        for s in np.atleast_2d(np.asarray(coverage_samples, dtype=float)):
            da = float(np.min(host.distances_to_many(s, f.net.points)))
            db = float(np.min(host.distances_to_many(s, g.net.points)))
            if min(da, db) > coverage_radius:
                raise ValueError("A union B fails to cover the sampled domain "
                                 f"(gap {min(da, db):.3g} at {s.tolist()})")
    fext = mcshane_extend(f)
    gext = mcshane_extend(g)
    dist_node = {"op": "dist_to_set", "space": host.to_json(),
                 "net": f.net.points.tolist(), "target_dim": 1}
    tree = {"op": "patch", "children": [fext.tree, gext.tree, dist_node],
            "L": float(L), "claim": 10.0 * L * L,
            "target_dim": fext.target_dim + gext.target_dim + 1}
    return embedding_from_tree(tree, "two-set patching (charts + distance coordinate)")


def quotient_circle_embedding(order: int, radius: float = 1.0) -> Embedding:
    """Embedding of the circle S^1(radius)/Z_order via its angle coordinate."""
    circ = 2.0 * _PI * radius / order
    inner = circle_embedding(circ)
    return chart_embedding(inner, "angle_coord", {"i": 0, "j": 1, "radius": radius},
                           chart_claim=1.0,
                           provenance=f"angle chart of S^1/Z_{order} into a trig circle")


def torus2_embedding(basis) -> Embedding:
    """Closed-form embedding of a flat 2-torus R^2/L into R^4.

    Short basis -> QR -> shear to a rectangular lattice -> a trig circle per
    axis.  Size reduction bounds the shear slope by 1/sqrt(3), so the claimed
    distortion is at most sigma(1/sqrt(3)) * sqrt(2) * pi/2 ~ 2.96 for every
    lattice.
    """
    from .lattices import short_basis

    sb = short_basis(np.asarray(basis, dtype=float))
    cols = sb.vectors.T
    q, r = np.linalg.qr(cols)
    # fix signs so the diagonal is positive
    signs = np.sign(np.diag(r))
    q = q * signs
    r = signs[:, None] * r
    shear = np.array([[1.0, -r[0, 1] / r[1, 1]], [0.0, 1.0]])
    M = shear @ q.T
    circles = product_embed(circle_embedding(r[0, 0]), circle_embedding(r[1, 1]), split=1)
    svals = np.linalg.svd(M, compute_uv=False)
    chart_claim = max(float(svals[0]), 1.0 / float(svals[-1]))
    emb = chart_embedding(circles, "linear_map", {"matrix": M.tolist(), "offset": [0.0, 0.0]},
                          chart_claim=chart_claim,
                          provenance="shear-to-rectangular torus embedding")
    return emb


# -- bookkeeping audit ----------------------------------------------------------------


def claim_formula(tree: dict) -> float | None:
    """Recompute this node's claim from its children by the combinator formulas."""
    op = tree["op"]
    if op == "product":
        cl = [c.get("claim") for c in tree["children"]]
        return math.sqrt(2.0) * max(cl)
    if op == "cone":
        return 20.0 * float(tree["L"])
    if op == "patch":
        return 10.0 * float(tree["L"]) ** 2
    if op == "chart":
        child = tree["child"].get("claim")
        return None if child is None else float(tree["chart_claim"]) * child
    if op == "affine_post":
        return tree["child"].get("claim")
    return tree.get("claim")


def verify_claim_bookkeeping(tree: dict) -> list[tuple[str, float, float]]:
    """All (op, stated, recomputed) claim pairs in the tree, depth first."""
    out = []
    stated = tree.get("claim")
    recomputed = claim_formula(tree)
    if stated is not None and recomputed is not None:
        out.append((tree["op"], float(stated), float(recomputed)))
    for key in ("child", ):
        if key in tree and isinstance(tree[key], dict):
            out.extend(verify_claim_bookkeeping(tree[key]))
    for c in tree.get("children", []):
        if isinstance(c, dict):
            out.extend(verify_claim_bookkeeping(c))
    return out
