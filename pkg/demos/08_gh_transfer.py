#!/usr/bin/env python3
"""Transferring an embedding along a Gromov-Hausdorff approximation.

A thin torus R^2/((1,0),(0,0.01)) collapses to a circle: projecting away the
short direction changes distances by at most twice the fiber diameter.  The
global map combines a McShane extension of (circle embedding o projection)
with glued local cylinder charts at the collapse scale.
"""
import numpy as np

from qembed import circle_embedding, empirical_distortion, flat_torus, gh_transfer
from qembed.combinators import cylinder_chart_embedder

delta = 0.01
thin = flat_torus([[1.0, 0.0], [0.0, delta]])
base = flat_torus([[1.0]])

# the projection is a GH approximation with defect <= 2 delta
rng = np.random.default_rng(0)
defect = 0.0
for _ in range(200):
    a, b = thin.sampler(2, rng)
    defect = max(defect, abs(thin.quotient_distance(a, b)
                             - base.quotient_distance(a[:1], b[:1])))
print(f"projection defect over 200 pairs: {defect:.4f} <= 2 delta = {2 * delta}")

samples = thin.sampler(1200, rng)
emb = gh_transfer(
    thin, lambda x: np.asarray([x[0]]), circle_embedding(1.0),
    eps_prime=2 * delta, eps=5 * delta,
    local_embedder=lambda host, c: cylinder_chart_embedder(host, c, delta),
    samples=samples, doubling_constant=5,
)
print(f"transferred embedding: dim {emb.target_dim}, claim {emb.claimed_distortion:.3g}")
rep = empirical_distortion(thin, emb, 400, seed=42)
print(f"audited distortion {rep.distortion:.3f} (expansion {rep.max_expansion:.2f}, "
      f"contraction {rep.max_contraction:.3f}) -> pass = {rep.passed}")
