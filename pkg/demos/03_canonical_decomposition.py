#!/usr/bin/env python3
"""Canonical decomposition of a commuting orthogonal family, plus averaging.

Commuting orthogonal matrices share invariant blocks: a fixed subspace,
+-1 lines, and rotation planes where every element acts as cos(t) I + sin(t) J
for one complex structure J.  Fixed points of small orbits come from averaging
(arithmetic mean in R^n, Karcher mean on spheres).
"""
import numpy as np
import scipy.linalg

from qembed import canonical_decomposition, euclidean_fixed_point, invariant_circle, karcher_mean_sphere
from qembed.spaces import rot2

# build a hidden block structure and conjugate it away
rng = np.random.default_rng(3)
U, r = np.linalg.qr(rng.normal(size=(5, 5)))
U = U * np.sign(np.diag(r))
mats = [U @ scipy.linalg.block_diag(rot2(a), rot2(b), [[s]]) @ U.T
        for a, b, s in [(0.6, 1.9, 1.0), (2.2, 0.4, -1.0), (1.0, 1.0, 1.0)]]

dec = canonical_decomposition(mats)
print("blocks found:")
for blk in dec.blocks:
    extra = ""
    if blk.kind == "rotation":
        extra = f" angles per generator {np.round(blk.angles, 3)}"
    if blk.kind == "reflection":
        extra = f" signs {blk.signs.astype(int)}"
    print(f"  {blk.kind:10s} dim {blk.dim}{extra}")
print("reconstruction error:", dec.reconstruction_error(mats))

# an invariant circle inside the first rotation block
j = next(i for i, b in enumerate(dec.blocks) if b.kind == "rotation")
circ = invariant_circle(dec, j, rng.normal(size=5))
pts = circ.points(np.linspace(0, 2 * np.pi, 6, endpoint=False))
img = pts @ mats[0].T
print("circle invariance (images stay on the circle):",
      np.max(np.abs(np.linalg.norm(img @ np.column_stack([circ.u1, circ.u2]), axis=1) - 1)))

# averaging: the mean of a finite orbit is a fixed point
orbit = np.asarray([rot2(k * np.pi / 2) @ np.array([1.0, 2.0]) for k in range(4)])
print("\neuclidean fixed point of a 4-fold orbit:", euclidean_fixed_point(orbit))

g = scipy.linalg.block_diag(rot2(2 * np.pi / 5), [[1.0]])
p = np.array([0.2, 0.1, 0.97])
p /= np.linalg.norm(p)
orb = [p]
for _ in range(4):
    orb.append(g @ orb[-1])
m = karcher_mean_sphere(np.asarray(orb), tol=1e-13)
print("Karcher mean of a 5-element orbit on S^2:", np.round(m, 6))
print("fixed by the rotation?", np.linalg.norm(g @ m - m) < 1e-9)
