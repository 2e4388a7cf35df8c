"""Euclidean balls and sup-metric cubes used as polynomial domains.

Cubes follow the closed-cube convention: Q_r(x) = {y : max_i |y_i - x_i| <= r}
with r the half side-length ("radius").  Equal-measure quasi-random samples
come from an unscrambled Sobol sequence, so sample prefixes are nested and
anything computed as a max over samples is monotone in the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sobol_unit(dim: int, count: int, skip_zero: bool = False) -> np.ndarray:
    """First `count` points of the unscrambled Sobol sequence in [0,1]^dim."""
    eng = qmc.Sobol(d=dim, scramble=False)
    if skip_zero:
        eng.fast_forward(1)
    return eng.random(count)


@dataclass(frozen=True)
class Cube:
    """Closed axis-aligned cube with center c and radius r (half side)."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("cube radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return (2.0 * self.radius) ** self.dim

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        c = np.asarray(self.center)
        return np.max(np.abs(pts - c), axis=1) <= self.radius

    def contains_cube(self, other: "Cube") -> bool:
        dc = max(abs(a - b) for a, b in zip(self.center, other.center))
        return dc <= self.radius - other.radius

    def sample(self, count: int) -> np.ndarray:
        lo, hi = self.bounds()
        u = sobol_unit(self.dim, count)
        return lo + u * (hi - lo)

    def axis_extremes(self) -> np.ndarray:
        c = np.asarray(self.center)
        pts = [c]
        for i in range(self.dim):
            for sgn in (-1.0, 1.0):
                p = c.copy()
                p[i] += sgn * self.radius
                pts.append(p)
        return np.array(pts)

    def coordinate_segment(self, x: np.ndarray, i: int) -> tuple[float, float]:
        return self.center[i] - self.radius, self.center[i] + self.radius


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def contains(self, points, rtol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        c = np.asarray(self.center)
        return np.linalg.norm(pts - c, axis=1) <= self.radius * (1.0 + rtol)

    def sample(self, count: int) -> np.ndarray:
        """Equal-measure Sobol sample of the ball."""
        c = np.asarray(self.center)
        if self.dim == 1:
            u = sobol_unit(1, count)[:, 0]
            return (c[0] - self.radius + 2.0 * self.radius * u)[:, None]
        if self.dim == 2:
            u = sobol_unit(2, count)
            r = self.radius * np.sqrt(u[:, 0])
            th = 2.0 * math.pi * u[:, 1]
            return c + np.column_stack([r * np.cos(th), r * np.sin(th)])
        from scipy.stats import norm

        u = sobol_unit(self.dim + 1, count, skip_zero=True)
        z = norm.ppf(np.clip(u[:, : self.dim], 1e-12, 1 - 1e-12))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        r = self.radius * u[:, self.dim] ** (1.0 / self.dim)
        return c + z * r[:, None]

    def axis_extremes(self) -> np.ndarray:
        c = np.asarray(self.center)
        pts = [c]
        for i in range(self.dim):
            for sgn in (-1.0, 1.0):
                p = c.copy()
                p[i] += sgn * self.radius
                pts.append(p)
        return np.array(pts)

    def coordinate_segment(self, x: np.ndarray, i: int) -> tuple[float, float]:
        c = np.asarray(self.center)
        rest = np.delete(x - c, i)
        slack = self.radius ** 2 - float(rest @ rest)
        if slack <= 0.0:
            return float(x[i]), float(x[i])
        w = math.sqrt(slack)
        return c[i] - w, c[i] + w
