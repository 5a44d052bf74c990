#!/usr/bin/env python3
"""The embedding combinators and their audited constants.

Each constructor carries its analytic distortion bound:
products sqrt(2) max(L_f, L_g), cones 20 L, two-set patching 10 L^2, McShane
extensions sqrt(N) L on the Lipschitz side.  Audits sample pairs and report
max expansion, max contraction and the balanced distortion
sqrt(expansion x contraction).
"""
import numpy as np

from qembed import (build_net, circle_embedding, cone_embed, empirical_distortion,
                    identity_embedding, mcshane_extend, net_function_from_map,
                    patch_two, product_embed, quotient_circle_embedding)
from qembed.spaces import cyclic_cone, flat_torus, holonomy_bundle

# ------------------------------------------------------------- trig circle
circ = flat_torus([[1.0]])
emb = circle_embedding(1.0)
rep = empirical_distortion(circ, emb, 4000, seed=42)
print(f"circle via (cos, sin): expansion {rep.max_expansion:.4f}, "
      f"contraction {rep.max_contraction:.4f} (-> pi/2), "
      f"balanced {rep.distortion:.4f} (claim {emb.claimed_distortion:.4f})")

# ------------------------------------------------------------- product
cyl = holonomy_bundle(matrix=[[1.0]], d=1, base_circumference=1.0, fiber_cap=1.0)
prod = product_embed(circle_embedding(1.0), identity_embedding(1), split=1)
rep = empirical_distortion(cyl, prod, 4000, seed=42)
print(f"circle x interval:     balanced {rep.distortion:.4f} "
      f"<= sqrt(2) max(L_f, L_g) = {prod.claimed_distortion:.4f}")

# ------------------------------------------------------------- cone
cone = cyclic_cone(3)
link_emb = quotient_circle_embedding(3)
ts = np.linspace(0, 2 * np.pi, 64, endpoint=False)
cemb = cone_embed(link_emb, cone.link_space, np.column_stack([np.cos(ts), np.sin(ts)]))
rep = empirical_distortion(cone, cemb, 4000, seed=42)
print(f"cone over S^1/Z_3:     balanced {rep.distortion:.4f} "
      f"<= 20 L = {cemb.claimed_distortion:.4f}")

# ------------------------------------------------------------- patching
netA = build_net(circ, np.arange(-0.3, 0.3, 0.01).reshape(-1, 1), 0.02)
netB = build_net(circ, np.arange(0.2, 0.8, 0.01).reshape(-1, 1), 0.02)
fA = net_function_from_map(netA, lambda x: np.array([x[0] if x[0] < 0.5 else x[0] - 1.0]))
fB = net_function_from_map(netB, lambda x: np.array([x[0] % 1.0]))
patch = patch_two(fA, fB, circ, 1.5)
rep = empirical_distortion(circ, patch, 4000, seed=42)
print(f"two-arc patching:      balanced {rep.distortion:.4f} "
      f"<= 10 L^2 = {patch.claimed_distortion:.4f}")

# ------------------------------------------------------------- McShane
torus = flat_torus([[1.0, 0.0], [0.0, 1.0]])
rng = np.random.default_rng(0)
net = build_net(torus, rng.random((120, 2)), 0.18)
nf = net_function_from_map(net, lambda p: np.array([np.sin(2 * np.pi * p[0]),
                                                    np.cos(2 * np.pi * p[1])]))
ext = mcshane_extend(nf)
print(f"McShane extension:     net Lipschitz {nf.lipschitz:.3f}, global bound "
      f"sqrt(N) L = {np.sqrt(2) * nf.lipschitz:.3f}; values on the net are exact:",
      all(np.array_equal(ext.evaluate(a), v) for a, v in zip(net.points, nf.values)))
