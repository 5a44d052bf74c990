#!/usr/bin/env python3
"""Lens spaces: chart comparison, bundle reduction, and the patched embedding.

L(p,q) = S^3 / Z_p is covered by two polar charts.  On each chart the round
metric differs from a flattened one by a factor of at most 4 (checked on
tangent probes), and the flattened chart is exactly a plane bundle over a short
circle.  Patching the two chart embeddings with a distance coordinate gives the
global map; one claim formula covers every (p, q).
"""
import numpy as np

from qembed import empirical_distortion, lens_chart_tensor_ratio, lens_space
from qembed.pipelines import lens_patched_embedding

# chart certificate: the tensor ratio stays inside [1/4, 4]
rng = np.random.default_rng(0)
ratios = [lens_chart_tensor_ratio(rng.random() * np.pi / 3, rng.normal(size=3))
          for _ in range(2000)]
print(f"chart tensor ratios over 2000 probes: [{min(ratios):.4f}, {max(ratios):.4f}]"
      "  (allowed [0.25, 4])")
print("spot values: alpha=pi/3 d-theta ->", lens_chart_tensor_ratio(np.pi / 3, (1, 0, 0)),
      " alpha=pi/6 d-phi ->", round(lens_chart_tensor_ratio(np.pi / 6, (0, 0, 1)), 4))

print("\npatched embeddings (same construction for every coprime pair):")
for p, q in [(5, 2), (7, 3), (13, 5)]:
    emb = lens_patched_embedding(p, q)
    L = lens_space(p, q)
    rep = empirical_distortion(L, emb, 1500, seed=42)
    print(f"  L({p:2d},{q}): dim {emb.target_dim:4d}, audited distortion "
          f"{rep.distortion:6.3f}  (claim {emb.claimed_distortion:.3g})")
