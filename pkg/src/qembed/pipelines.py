"""End-to-end embedding recipes for the model spaces and the method dispatcher."""
from __future__ import annotations

import math

import numpy as np

from .combinators import (annulus_embed, doubling_embed, euclidean_chart_embedder,
                          shear_sigma)
from .embeddings import (Embedding, chart_embedding, circle_embedding, embedding_from_tree,
                         identity_embedding, net_function_from_map, patch_two,
                         product_embed, torus2_embedding)
from .lattices import short_basis
from .quotient import QuotientSpace, build_net
from .spaces import (EllipsoidMesh, construct_space, holonomy_bundle, in_lens_chart,
                     lens_chart_params, lens_space, reduce_angle)

_PI = math.pi


# -- holonomy bundles ---------------------------------------------------------------


def bundle_core_embedding(b: float, theta: float, d: int = 2) -> Embedding:
    """T_0 = {|w| <= 2D}: untwist the fiber along the base, then circle x disk.

    The twist is reduced mod 2 pi, so the untwist shear slope is at most pi and
    the claimed distortion is independent of the holonomy angle.
    """
    h = reduce_angle(theta)
    prod = product_embed(circle_embedding(b), identity_embedding(d), split=1)
    return chart_embedding(
        prod, "bundle_untwist", {"b": b, "twist": h, "split": 1},
        chart_claim=shear_sigma(abs(h)),
        provenance="core untwist trivialization + circle x disk",
    )


def bundle_annulus_level_embedding(b: float, theta: float, D: float, k: int) -> Embedding:
    """T_k (k >= 1): flat-chart to (interval) x (torus), torus in closed form."""
    h = reduce_angle(theta)
    R = 2.0**k * D
    torus = torus2_embedding([[b, R * h], [0.0, 2.0 * _PI * R]])
    prod = product_embed(identity_embedding(1), torus, split=1)
    return chart_embedding(
        prod, "annulus_flat", {"split": 1, "R": R}, chart_claim=10.0,
        provenance=f"flat annulus chart (k={k}) + interval x torus",
    )


def bundle_annulus_pipeline(bundle: QuotientSpace, k_max: int = 4, net_count: int = 40,
                            seed: int = 7) -> Embedding:
    params = bundle.bundle_params
    b, d, theta = params["b"], params["d"], params["theta"] or 0.0
    if d != 2:
        raise ValueError("the closed-form annulus pipeline needs fiber dimension 2")
    D = b / 2.0

    def per_annulus(k: int) -> Embedding:
        if k == 0:
            return bundle_core_embedding(b, theta, d)
        return bundle_annulus_level_embedding(b, theta, D, k)

    return annulus_embed(bundle, per_annulus, k_max, D=D, net_count=net_count, seed=seed)


# -- lens spaces -----------------------------------------------------------------------


def lens_chart_k_max(p: int) -> int:
    """Annulus levels needed for the chart bundle to cover fiber radius pi/3."""
    return max(0, math.ceil(math.log2(p / 3.0)) - 1)


def lens_chart_embedding(p: int, q: int, j: int, net_count: int = 30, seed: int = 7) -> Embedding:
    """Embedding of one lens chart: chart map (factor 4) into its holonomy bundle."""
    b, h = lens_chart_params(p, q, j)
    bundle = holonomy_bundle(theta=h, base_circumference=b, fiber_cap=_PI / 3.0)
    bund = bundle_annulus_pipeline(bundle, k_max=lens_chart_k_max(p),
                                   net_count=net_count, seed=seed)
    return chart_embedding(bund, "lens_chart", {"p": p, "q": q, "j": j}, chart_claim=4.0,
                           provenance=f"lens chart U_{j} -> holonomy bundle (factor 4)")


def lens_patched_embedding(p: int, q: int, net_eps: float = 0.3, sample_count: int = 1500,
                           net_count: int = 30, seed: int = 11) -> Embedding:
    """Patched embedding of L(p,q): two chart embeddings glued by patch_two."""
    lens = lens_space(p, q)
    rng = np.random.default_rng(seed)
    samples = lens.sampler(sample_count, rng)
    charts = {j: lens_chart_embedding(p, q, j, net_count=net_count, seed=seed)
              for j in (1, 2)}
    nets = {}
    funcs = {}
    for j in (1, 2):
        pts = np.asarray([v for v in samples if in_lens_chart(j, v)])
        nets[j] = build_net(lens, pts, net_eps)
        funcs[j] = net_function_from_map(nets[j], charts[j].evaluate)
    L = max(charts[1].claimed_distortion, charts[2].claimed_distortion)
    emb = patch_two(funcs[1], funcs[2], lens, L)
    emb.provenance = (f"L({p},{q}) patched from charts U_1, U_2; chart claim 4 x bundle; "
                      + emb.provenance)
    return emb


# -- tori and cones ---------------------------------------------------------------------


def torus_embedding(space: QuotientSpace) -> Embedding:
    basis = space._translation_basis
    if basis is None:
        raise ValueError("space is not a translation-lattice quotient")
    if basis.shape[0] == 1:
        return circle_embedding(float(abs(basis[0, 0])))
    if basis.shape[0] == 2:
        return torus2_embedding(basis)
    raise ValueError("closed-form torus embeddings implemented for n <= 2; use doubling")


def torus_doubling_embedding(space: QuotientSpace, sample_count: int = 2500,
                             seed: int = 5, doubling_constant: float | None = None,
                             r: float | None = None) -> Embedding:
    basis = space._translation_basis
    if basis is None:
        raise ValueError("doubling pipeline here expects a translation lattice")
    sb = short_basis(basis)
    inj = float(sb.norms[0]) / 2.0
    if r is None:
        r = 0.9 * inj
    rng = np.random.default_rng(seed)
    samples = space.sampler(sample_count, rng)
    if doubling_constant is None:
        doubling_constant = 2.0 ** basis.shape[0] + 1
    analytic_diam = 6.0 * basis.shape[0] * float(np.max(sb.norms))
    return doubling_embed(space, space.basepoint, analytic_diam, r,
                          euclidean_chart_embedder, samples, doubling_constant)


def cone_embedding(space: QuotientSpace, order: int | None = None) -> Embedding:
    """Cone embedding of R^2/Z_m via the quotient-circle link embedding."""
    from .embeddings import cone_embed, quotient_circle_embedding

    link = getattr(space, "link_space", None)
    if link is None:
        raise ValueError("space carries no cone link")
    if order is None:
        # infer the rotation order from the link group size at full radius
        order = len(link.enumerate_ball(link.basepoint, 2.0 * _PI))
    f = quotient_circle_embedding(order)
    ts = np.linspace(0.0, 2.0 * _PI, 64, endpoint=False)
    samples = np.column_stack([np.cos(ts), np.sin(ts)])
    return cone_embed(f, link, samples)


def ellipsoid_embedding(N: float) -> Embedding:
    """The explicit flattening map of S_N; its constant is measured, not claimed."""
    tree = {"op": "ellipsoid_map", "N": float(N), "claim": None, "target_dim": 3}
    return embedding_from_tree(tree, "explicit ellipsoid flattening map")


# -- dispatch -----------------------------------------------------------------------------


def embed_space(spec, method: str = "auto", **options):
    """Build (space, embedding) from a space spec and a method name."""
    space = construct_space(spec)
    if method == "auto":
        method = _auto_method(spec, space)
    if method == "torus2":
        return space, torus_embedding(space)
    if method == "doubling":
        return space, torus_doubling_embedding(space, **options)
    if method == "annulus":
        return space, bundle_annulus_pipeline(space, **options)
    if method == "cone":
        return space, cone_embedding(space)
    if method == "patch":
        p, q = space.lens_pq
        return space, lens_patched_embedding(p, q, **options)
    if method == "product":
        params = getattr(space, "bundle_params", None)
        if params is None or (params["theta"] or 0.0) != 0.0:
            raise ValueError("product method applies to untwisted bundles")
        emb = product_embed(circle_embedding(params["b"]),
                            identity_embedding(params["d"]), split=1)
        return space, emb
    if method == "ellipsoid":
        if not isinstance(space, EllipsoidMesh):
            raise ValueError("ellipsoid method needs an ellipsoid space")
        return space, ellipsoid_embedding(space.N)
    raise ValueError(f"unknown embedding method {method!r}")


def _auto_method(spec, space) -> str:
    if isinstance(space, EllipsoidMesh):
        return "ellipsoid"
    if hasattr(space, "lens_pq"):
        return "patch"
    if hasattr(space, "bundle_params"):
        return "annulus"
    if hasattr(space, "link_space"):
        return "cone"
    basis = space._translation_basis
    if basis is not None and basis.shape[0] <= 2:
        return "torus2"
    if basis is not None:
        return "doubling"
    raise ValueError("no automatic method for this space; pass --method")
