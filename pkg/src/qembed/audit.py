"""Distortion auditing, doubling estimation, and embedding serialization."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .embeddings import Embedding, UnknownOperatorError, embedding_from_tree

_FORMAT = "qembed-embedding"
_VERSION = 1


class DeserializeError(ValueError):
    pass


@dataclass
class DistortionReport:
    """Empirical audit of an embedding against its claimed distortion.

    max_expansion = max |f(a)-f(b)| / d(a,b), max_contraction = max of the
    inverse ratio, and distortion = sqrt(expansion x contraction) is the
    smallest two-sided constant L (1/L d <= |df| <= L d) after optimally
    rescaling the map.
    """

    pair_count: int
    used_pairs: int
    seed: int
    max_expansion: float
    max_contraction: float
    distortion: float
    claimed_bound: float | None
    passed: bool | None
    sampling: str
    min_distance: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QE_THREADS", "1")))
    except ValueError:
        return 1


def _chunked_eval(embedding: Embedding, pts: np.ndarray, threads: int) -> np.ndarray:
    if threads <= 1 or len(pts) < 64:
        return embedding.evaluate_many(pts)
    chunks = np.array_split(np.arange(len(pts)), threads)
    out = [None] * len(chunks)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = {pool.submit(embedding.evaluate_many, pts[c]): i
                for i, c in enumerate(chunks) if len(c)}
        for fut, i in futs.items():
            out[i] = fut.result()
    return np.concatenate([o for o in out if o is not None])


def empirical_distortion(space, embedding: Embedding, pair_count: int, seed: int,
                         sampler=None, min_distance: float = 1e-12,
                         claimed: float | None = None,
                         sampling_note: str = "uniform over the space's canonical region",
                         ) -> DistortionReport:
    """Sample point pairs with a seeded generator and audit the distortion.

    Zero-distance (and sub-min_distance) pairs are skipped; the reduction is a
    max, so fanning evaluation out across QE_THREADS workers cannot change the
    result.
    """
    if claimed is None:
        claimed = embedding.claimed_distortion
    if sampler is None:
        sampler = getattr(space, "sampler", None)
    if sampler is None:
        raise ValueError("space has no sampler; pass one explicitly")
    # one seeded substream per pair: samples for smaller pair counts are a
    # prefix of those for larger ones, so the estimate grows monotonically
    pairs = [sampler(2, np.random.default_rng([seed, i])) for i in range(pair_count)]
    A = np.asarray([p[0] for p in pairs])
    B = np.asarray([p[1] for p in pairs])
    d = np.asarray(space.pair_distances(A, B))
    keep = d > max(min_distance, 1e-12)
    if not np.any(keep):
        raise ValueError("all sampled pairs are degenerate")
    A, B, d = A[keep], B[keep], d[keep]
    threads = worker_count()
    fa = _chunked_eval(embedding, A, threads)
    fb = _chunked_eval(embedding, B, threads)
    e = np.linalg.norm(fa - fb, axis=1)
    expansion = float(np.max(e / d))
    contraction = float(np.max(d / e)) if np.all(e > 0) else float("inf")
    # expansion x contraction >= 1 holds pairwise, so the floor only absorbs roundoff
    distortion = float(np.sqrt(max(expansion * contraction, 1.0)))
    passed = None if claimed is None else bool(distortion <= claimed * (1.0 + 1e-6))
    return DistortionReport(
        pair_count=int(pair_count), used_pairs=int(keep.sum()), seed=int(seed),
        max_expansion=expansion, max_contraction=contraction, distortion=distortion,
        claimed_bound=None if claimed is None else float(claimed), passed=passed,
        sampling=sampling_note, min_distance=float(min_distance),
    )


def greedy_cover_count(dmat: np.ndarray, radius: float) -> int:
    """Max-coverage greedy: balls centered at candidate points, radius given."""
    m = dmat.shape[0]
    if m == 0:
        return 0
    covers = dmat <= radius
    covered = np.zeros(m, dtype=bool)
    count = 0
    while not covered.all():
        gains = (covers & ~covered).sum(axis=1)
        count += 1
        covered |= covers[int(np.argmax(gains))]
    return count


def estimate_doubling(space, p, R: float, r: float, sample_count: int = 300,
                      seed: int = 0, num_centers: int = 6) -> int:
    """Upper-bound estimate of the doubling constant over dyadic scales in [r, R].

    For sampled centers x and each dyadic scale rho, greedily covers the
    sampled part of B_x(rho) by rho/2-balls centered at sample points and
    returns the largest count seen.
    """
    if not (R > r > 0):
        raise ValueError("need R > r > 0")
    if getattr(space, "sampler", None) is None:
        raise ValueError("space has no sampler")
    rng = np.random.default_rng(seed)
    samples = np.atleast_2d(np.asarray(space.sampler(sample_count, rng)))
    p = np.asarray(p, dtype=float)
    pair = space.pairwise_distances(samples)
    center_rows = [space.distances_to_many(p, samples)] + [
        pair[i] for i in range(min(num_centers, len(samples)))]
    best = 1
    for d in center_rows:
        rho = R
        while rho >= r:
            idx = np.flatnonzero(d <= rho)
            if len(idx):
                best = max(best, greedy_cover_count(pair[np.ix_(idx, idx)], rho / 2.0))
            rho /= 2.0
    return best


# -- serialization ---------------------------------------------------------------


def serialize_embedding(embedding: Embedding) -> bytes:
    doc = {
        "format": _FORMAT,
        "version": _VERSION,
        "target_dim": embedding.target_dim,
        "claimed_distortion": embedding.claimed_distortion,
        "provenance": embedding.provenance,
        "tree": embedding.tree,
    }
    return json.dumps(doc, sort_keys=True).encode("utf-8")


def deserialize_embedding(data: bytes, space=None) -> Embedding:
    """Rebuild an embedding from its artifact; raises before returning anything partial."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DeserializeError(f"truncated or corrupt embedding artifact: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != _FORMAT:
        raise DeserializeError("not a qembed embedding artifact")
    if doc.get("version") != _VERSION:
        raise DeserializeError(f"unsupported artifact version {doc.get('version')!r}")
    try:
        emb = embedding_from_tree(doc["tree"], doc.get("provenance", ""))
    except UnknownOperatorError:
        raise
    except KeyError as exc:
        raise DeserializeError(f"artifact missing field {exc}") from exc
    if space is not None and hasattr(space, "ambient"):
        probe_dim = space.ambient.dim
        emb.evaluate(np.asarray(space.basepoint, dtype=float).reshape(probe_dim))
    return emb
