"""Ambient spaces: Euclidean space, round spheres, and their products.

Points are plain 1-D numpy arrays of length ``ambient.dim``.  For a product
ambient the base coordinates come first and the fiber coordinates last.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Euclidean:
    n: int

    @property
    def dim(self) -> int:
        return self.n

    def distance(self, x, y):
        return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))

    def distance_many(self, x, Y):
        return np.linalg.norm(np.asarray(Y) - np.asarray(x), axis=-1)

    def cross_distance(self, X, Y):
        X, Y = np.asarray(X), np.asarray(Y)
        return np.sqrt(self.cross_sq(X, Y))

    def cross_sq(self, X, Y):
        diff = X[:, None, :] - Y[None, :, :]
        return np.einsum("kmi,kmi->km", diff, diff)

    def contains(self, x, tol=1e-9):
        return np.asarray(x).shape == (self.n,)

    def to_json(self):
        return {"kind": "euclidean", "n": self.n}


@dataclass(frozen=True)
class Sphere:
    """Round sphere of radius ``radius`` sitting in R^n (so S^{n-1})."""

    n: int
    radius: float = 1.0

    @property
    def dim(self) -> int:
        return self.n

    def distance(self, x, y):
        # same reduction as distance_many, so scalar and batch paths agree bitwise
        r = self.radius
        c = float(np.sum(np.asarray(x) * np.asarray(y))) / (r * r)
        return r * float(np.arccos(np.clip(c, -1.0, 1.0)))

    def distance_many(self, x, Y):
        # elementwise reduction: row results do not depend on the row count
        r = self.radius
        c = np.sum(np.asarray(Y) * np.asarray(x), axis=-1) / (r * r)
        return r * np.arccos(np.clip(c, -1.0, 1.0))

    def cross_distance(self, X, Y):
        r = self.radius
        c = np.sum(np.asarray(X)[:, None, :] * np.asarray(Y)[None, :, :], axis=-1) / (r * r)
        return r * np.arccos(np.clip(c, -1.0, 1.0))

    def contains(self, x, tol=1e-9):
        x = np.asarray(x)
        return x.shape == (self.n,) and abs(np.linalg.norm(x) - self.radius) <= tol * max(1.0, self.radius)

    def to_json(self):
        return {"kind": "sphere", "n": self.n, "radius": self.radius}


@dataclass(frozen=True)
class Product:
    """Base x fiber with the l2 combination of the factor metrics."""

    base: Euclidean
    fiber: Euclidean | Sphere

    @property
    def dim(self) -> int:
        return self.base.dim + self.fiber.dim

    def split(self, x):
        x = np.asarray(x)
        return x[: self.base.dim], x[self.base.dim:]

    def split_many(self, X):
        X = np.asarray(X)
        return X[..., : self.base.dim], X[..., self.base.dim:]

    def distance(self, x, y):
        xb, xf = self.split(x)
        yb, yf = self.split(y)
        return float(np.hypot(self.base.distance(xb, yb), self.fiber.distance(xf, yf)))

    def distance_many(self, x, Y):
        xb, xf = self.split(x)
        Yb, Yf = self.split_many(Y)
        return np.hypot(self.base.distance_many(xb, Yb), self.fiber.distance_many(xf, Yf))

    def cross_distance(self, X, Y):
        Xb, Xf = self.split_many(X)
        Yb, Yf = self.split_many(Y)
        if isinstance(self.fiber, Euclidean):
            return np.sqrt(self.base.cross_sq(Xb, Yb) + self.fiber.cross_sq(Xf, Yf))
        return np.hypot(self.base.cross_distance(Xb, Yb), self.fiber.cross_distance(Xf, Yf))

    def contains(self, x, tol=1e-9):
        x = np.asarray(x)
        if x.shape != (self.dim,):
            return False
        _, xf = self.split(x)
        return self.fiber.contains(xf, tol)

    def to_json(self):
        out = {"kind": "product", "n": self.base.n, "d": self.fiber.n}
        if isinstance(self.fiber, Sphere):
            out["radius"] = self.fiber.radius
        return out


Ambient = Euclidean | Sphere | Product


def ambient_from_json(data: dict) -> Ambient:
    kind = data["kind"]
    if kind == "euclidean":
        return Euclidean(int(data["n"]))
    if kind == "sphere":
        return Sphere(int(data["n"]), float(data.get("radius", 1.0)))
    if kind == "product":
        base = Euclidean(int(data["n"]))
        d = int(data["d"])
        if "radius" in data and data["radius"] is not None:
            fiber: Euclidean | Sphere = Sphere(d, float(data["radius"]))
        else:
            fiber = Euclidean(d)
        return Product(base, fiber)
    raise ValueError(f"unknown ambient kind {kind!r}")
