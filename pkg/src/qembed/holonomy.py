"""Canonical decompositions of abelian orthogonal groups and averaged fixed points.

A commuting family of orthogonal matrices splits R^d into pairwise orthogonal
invariant blocks: a pointwise-fixed block, reflection blocks (every element
acts as +-1), and even-dimensional rotation blocks carrying a complex
structure J on which every element acts as cos(theta) I + sin(theta) J.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

_COMMUTE_TOL = 1e-8
_ANGLE_TOL = 1e-7
_WEIGHT_SEED = 20240901


@dataclass
class Block:
    kind: str                      # "trivial" | "reflection" | "rotation"
    basis: np.ndarray              # d x m, orthonormal columns
    signs: np.ndarray | None = None    # per-generator +-1 (reflection blocks)
    angles: np.ndarray | None = None   # per-generator angle (rotation blocks)
    J: np.ndarray | None = None        # m x m complex structure in block coords

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def j_full(self) -> np.ndarray:
        if self.J is None:
            raise ValueError("block has no complex structure")
        return self.basis @ self.J @ self.basis.T

    def restriction(self, gen_index: int) -> np.ndarray:
        """The block action of generator gen_index, rebuilt from the signature."""
        m = self.dim
        if self.kind == "trivial":
            return np.eye(m)
        if self.kind == "reflection":
            return float(self.signs[gen_index]) * np.eye(m)
        th = float(self.angles[gen_index])
        return np.cos(th) * np.eye(m) + np.sin(th) * self.J


@dataclass
class CanonicalDecomposition:
    d: int
    blocks: list[Block]            # trivial block first (possibly 0-dim)
    num_generators: int

    @property
    def trivial(self) -> Block:
        return self.blocks[0]

    def rotation_blocks(self) -> list[Block]:
        return [b for b in self.blocks if b.kind == "rotation"]

    def reconstruct(self, gen_index: int) -> np.ndarray:
        out = np.zeros((self.d, self.d))
        for b in self.blocks:
            if b.dim:
                out += b.basis @ b.restriction(gen_index) @ b.basis.T
        return out

    def reconstruction_error(self, mats) -> float:
        return max(
            float(np.max(np.abs(self.reconstruct(i) - m)))
            for i, m in enumerate(mats)
        )

    def invariance_defect(self, mats) -> float:
        """max over blocks and generators of |h V_j - V_j| measured via projectors."""
        worst = 0.0
        for b in self.blocks:
            if not b.dim:
                continue
            P = b.basis @ b.basis.T
            for m in mats:
                worst = max(worst, float(np.max(np.abs(m @ P - P @ m))))
        return worst

    def to_report(self) -> dict:
        blocks = []
        for b in self.blocks:
            entry: dict = {"kind": b.kind, "dim": int(b.dim),
                           "basis": [[float(v) for v in col] for col in b.basis.T]}
            if b.signs is not None:
                entry["signs"] = [int(s) for s in b.signs]
            if b.angles is not None:
                entry["angles"] = [float(a) for a in b.angles]
            blocks.append(entry)
        return {"d": self.d, "blocks": blocks}


def _validate(mats) -> list[np.ndarray]:
    mats = [np.asarray(m, dtype=float) for m in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    d = mats[0].shape[0]
    for m in mats:
        if m.shape != (d, d):
            raise ValueError("matrices must share one dimension")
        if np.max(np.abs(m.T @ m - np.eye(d))) > _COMMUTE_TOL:
            raise ValueError("matrices must be orthogonal")
    for i, a in enumerate(mats):
        for b in mats[i + 1:]:
            if np.max(np.abs(a @ b - b @ a)) > _COMMUTE_TOL:
                raise ValueError("matrices must commute pairwise")
    return mats


def _weights(count: int, offset: int = 0) -> np.ndarray:
    # fixed seeded pseudo-random rationals: deterministic, collision-avoiding
    rng = np.random.default_rng(_WEIGHT_SEED + offset)
    return rng.integers(2**19, 2**20, size=count) / 2.0**19


def _eigenspaces(sym: np.ndarray, tol: float = 1e-8):
    vals, vecs = np.linalg.eigh(sym)
    groups = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            groups.append(vecs[:, start:i])
            start = i
    return groups


def _refine_eigenspace(Q: np.ndarray, mats: list[np.ndarray]) -> list[Block]:
    """Split one invariant subspace into canonical blocks via complexification."""
    rest = [Q.T @ m @ Q for m in mats]
    m_dim = Q.shape[1]

    # scalar case: every restriction is +-identity
    signs = []
    scalar = True
    for r in rest:
        s = np.sign(np.trace(r)) or 1.0
        if np.max(np.abs(r - s * np.eye(m_dim))) > 1e-9:
            scalar = False
            break
        signs.append(s)
    if scalar:
        if all(s > 0 for s in signs):
            return [Block("trivial", Q)]
        return [Block("reflection", Q, signs=np.asarray(signs))]

    # generic normal combination; complex Schur gives a joint unitary eigenbasis
    N = sum(w * r for w, r in zip(_weights(len(rest), offset=1), rest))
    T, Z = scipy.linalg.schur(np.asarray(N), output="complex")
    cols = [Z[:, i] for i in range(m_dim)]
    lam_tuples = [np.asarray([np.conj(z) @ (r @ z) for r in rest]) for z in cols]

    def canonical(lams: np.ndarray):
        for v in lams:
            if abs(v.imag) > _ANGLE_TOL:
                return (lams if v.imag > 0 else np.conj(lams)), v.imag > 0
        return lams, True

    clusters: list[dict] = []
    for z, lams in zip(cols, lam_tuples):
        canon, is_canon = canonical(lams)
        if not is_canon:
            continue  # the conjugate column represents this plane
        placed = False
        for c in clusters:
            if np.max(np.abs(c["lams"] - canon)) <= _ANGLE_TOL:
                c["cols"].append(z)
                placed = True
                break
        if not placed:
            clusters.append({"lams": canon, "cols": [z]})

    blocks: list[Block] = []
    for c in clusters:
        lams = c["lams"]
        if np.max(np.abs(lams.imag)) <= _ANGLE_TOL:
            # real eigenvalue tuple inside a non-scalar eigenspace: +-1 lines
            vecs = []
            for z in c["cols"]:
                u = np.real(z)
                if np.linalg.norm(u) < 0.5:
                    u = np.imag(z)
                vecs.append(u / np.linalg.norm(u))
            basis = Q @ np.linalg.qr(np.stack(vecs, axis=1))[0]
            signs = np.sign(np.real(lams))
            kind = "trivial" if np.all(signs > 0) else "reflection"
            blocks.append(Block(kind, basis, signs=None if kind == "trivial" else signs))
            continue
        pairs = []
        for z in c["cols"]:
            u = np.sqrt(2.0) * np.real(z)
            v = np.sqrt(2.0) * np.imag(z)
            pairs.extend([u, v])
        sub = np.stack(pairs, axis=1)
        k = sub.shape[1]
        # J sends u -> -v, v -> u on each plane (so R = cos I + sin J)
        Jb = np.zeros((k, k))
        for i in range(0, k, 2):
            Jb[i + 1, i] = -1.0
            Jb[i, i + 1] = 1.0
        blocks.append(Block("rotation", Q @ sub, angles=np.angle(lams), J=Jb))
    return blocks


def _signature_key(b: Block):
    if b.kind == "trivial":
        return ("trivial",)
    if b.kind == "reflection":
        return ("reflection", tuple(int(s) for s in b.signs))
    return ("rotation", tuple(np.round(b.angles / _ANGLE_TOL).astype(np.int64)))


def _merge_blocks(blocks: list[Block]) -> list[Block]:
    merged: dict[tuple, Block] = {}
    order: list[tuple] = []
    for b in blocks:
        key = _signature_key(b)
        if key not in merged:
            merged[key] = b
            order.append(key)
            continue
        old = merged[key]
        basis = np.concatenate([old.basis, b.basis], axis=1)
        J = None
        if b.kind == "rotation":
            J = np.zeros((basis.shape[1], basis.shape[1]))
            J[: old.dim, : old.dim] = old.J
            J[old.dim:, old.dim:] = b.J
        merged[key] = Block(b.kind, basis, signs=old.signs, angles=old.angles, J=J)
    return [merged[k] for k in order]


def canonical_decomposition(mats) -> CanonicalDecomposition:
    """Canonical invariant-subspace decomposition of commuting orthogonal matrices.

    Block-diagonalizes via the spectral decomposition of a fixed generic
    symmetric combination sum r_i (A_i + A_i^T), then refines and classifies
    each eigenspace by the generators' restrictions, merging blocks with equal
    (kind, angle-pattern) signatures.  Rotation angles are oriented so the
    first non-real one lies in (0, pi).
    """
    mats = _validate(mats)
    d = mats[0].shape[0]
    w = _weights(len(mats))
    M = sum(wi * (m + m.T) for wi, m in zip(w, mats))
    blocks: list[Block] = []
    for Q in _eigenspaces(np.asarray(M)):
        blocks.extend(_refine_eigenspace(Q, mats))
    blocks = _merge_blocks(blocks)
    trivial = [b for b in blocks if b.kind == "trivial"]
    rest = [b for b in blocks if b.kind != "trivial"]
    if trivial:
        t0 = trivial[0]
        for extra in trivial[1:]:
            t0 = Block("trivial", np.concatenate([t0.basis, extra.basis], axis=1))
    else:
        t0 = Block("trivial", np.zeros((d, 0)))
    return CanonicalDecomposition(d=d, blocks=[t0] + rest, num_generators=len(mats))


# -- averaging ------------------------------------------------------------------


def euclidean_fixed_point(points) -> np.ndarray:
    """Arithmetic mean; for a full G-orbit this is a G-fixed point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("empty orbit")
    return pts.mean(axis=0)


def karcher_mean_sphere(points, tol: float = 1e-12, max_iter: int = 10**4) -> np.ndarray:
    """Intrinsic mean on a round sphere by iterated exp/log averaging.

    Requires the point set to sit well inside a hemisphere: raises once the
    geodesic spread reaches rho*pi/2 (uniqueness regime boundary).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    norms = np.linalg.norm(pts, axis=1)
    rho = float(norms.mean())
    if rho <= 0 or np.max(np.abs(norms - rho)) > 1e-6 * max(1.0, rho):
        raise ValueError("points must lie on a common sphere")
    unit = pts / rho
    gram = np.clip(unit @ unit.T, -1.0, 1.0)
    spread = rho * float(np.max(np.arccos(gram)))
    if spread >= rho * np.pi / 2:
        raise ValueError("outside uniqueness regime: spread "
                         f"{spread:.3g} >= rho*pi/2 = {rho * np.pi / 2:.3g}")
    q = unit.sum(axis=0)
    q /= np.linalg.norm(q)
    for _ in range(max_iter):
        c = np.clip(unit @ q, -1.0, 1.0)
        theta = np.arccos(c)
        rad = unit - c[:, None] * q
        rn = np.linalg.norm(rad, axis=1)
        safe = rn > 1e-15
        logs = np.zeros_like(unit)
        logs[safe] = (theta[safe] / rn[safe])[:, None] * rad[safe]
        m = logs.mean(axis=0)
        mn = float(np.linalg.norm(m))
        if rho * mn < tol:
            return rho * q
        q = np.cos(mn) * q + np.sin(mn) * (m / mn)
        q /= np.linalg.norm(q)
    raise RuntimeError("Karcher iteration did not converge")


@dataclass(frozen=True)
class CircleDescriptor:
    """The circle {cos(t) u1 + sin(t) u2} inside one rotation block."""

    u1: np.ndarray
    u2: np.ndarray
    radius: float = 1.0

    def points(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return self.radius * (np.cos(ts)[:, None] * self.u1 + np.sin(ts)[:, None] * self.u2)


def invariant_circle(dec: CanonicalDecomposition, block_index: int, v) -> CircleDescriptor:
    """Group-invariant circle through the normalized rotation-block projection of v."""
    b = dec.blocks[block_index]
    if b.kind != "rotation":
        raise ValueError("block is not a rotation block")
    v = np.asarray(v, dtype=float)
    coords = b.basis.T @ v
    nrm = float(np.linalg.norm(coords))
    if nrm < 1e-12:
        raise ValueError("zero projection onto the rotation block")
    u1 = b.basis @ (coords / nrm)
    u2 = b.j_full() @ u1
    return CircleDescriptor(u1=u1, u2=u2)


# -- JSON interface --------------------------------------------------------------


def holonomy_from_json(data: dict) -> list[np.ndarray]:
    d = int(data["d"])
    mats = [np.asarray(m, dtype=float).reshape(d, d) for m in data["matrices"]]
    return mats


def decomposition_report(mats) -> dict:
    return canonical_decomposition(mats).to_report()
