"""Self-similar s-sets generated by iterated function systems.

A FractalSet is a weighted point cloud standing in for an Ahlfors-regular
set X together with its natural self-similar measure: one representative
point per depth-d cell carrying the cell's measure.  For open-set-condition
presets this measure is a constant multiple of the s-dimensional Hausdorff
measure restricted to X, and every inequality verified downstream is
invariant under that normalization.

Representatives are the orbit of the fixed point of the first map, so the
cloud at depth d is a subset of the cloud at depth d+1 and the measure is
refined exactly: a parent cell's mass is the sum of its children's.

Shipped presets: "cantor:R" (two maps, ratio R in (0,1/2), on [0,1]),
"dust2d:R" (four corner maps in the unit square), "cube:N" (the unit
N-cube, s = N, carrying Lebesgue mass), and products joined with "*",
e.g. "cantor:1/3*cantor:1/3".
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

MAX_CELLS = 10 ** 7
BUCKET_THRESHOLD = 10 ** 5


class CellCountError(ValueError):
    """Requested refinement would exceed the cell budget."""


@dataclass(frozen=True)
class Similarity:
    """Contracting similarity x -> ratio * O x + translation."""

    ratio: float
    translation: tuple
    orthogonal: tuple | None = None

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("similarity ratio must lie in (0, 1)")
        object.__setattr__(self, "translation",
                           tuple(float(t) for t in self.translation))
        if self.orthogonal is not None:
            o = np.asarray(self.orthogonal, dtype=float)
            if not np.allclose(o @ o.T, np.eye(len(o)), atol=1e-10):
                raise ValueError("orthogonal part is not orthogonal")
            object.__setattr__(self, "orthogonal",
                               tuple(tuple(row) for row in o))

    def matrix(self) -> np.ndarray:
        n = len(self.translation)
        o = np.eye(n) if self.orthogonal is None else np.asarray(self.orthogonal)
        return self.ratio * o

    def apply(self, points: np.ndarray) -> np.ndarray:
        t = np.asarray(self.translation)
        if self.orthogonal is None:
            return self.ratio * points + t
        return self.ratio * (points @ np.asarray(self.orthogonal).T) + t

    def fixed_point(self) -> np.ndarray:
        n = len(self.translation)
        return np.linalg.solve(np.eye(n) - self.matrix(),
                               np.asarray(self.translation))


def solve_similarity_dim(ratios, tol: float = 1e-12) -> float:
    """Solve sum r_i^s = 1 for s by bisection to residual <= tol."""
    r = np.asarray(ratios, dtype=float)
    if len(r) < 2:
        raise ValueError("need at least two maps")

    def g(s):
        return float(np.sum(r ** s)) - 1.0

    lo, hi = 1e-12, 1.0
    while g(hi) > 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError("similarity dimension did not bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if abs(g(mid)) <= tol:
            return mid
    s = 0.5 * (lo + hi)
    if abs(g(s)) > tol:
        raise ValueError("similarity dimension bisection did not converge")
    return s


@dataclass(frozen=True)
class IFS:
    ambient_dim: int
    maps: tuple
    similarity_dim: float
    osc_verified: bool = False

    @classmethod
    def from_maps(cls, maps, osc_verified: bool = False) -> "IFS":
        maps = tuple(maps)
        dims = {len(m.translation) for m in maps}
        if len(dims) != 1:
            raise ValueError("maps have inconsistent ambient dimensions")
        s = solve_similarity_dim([m.ratio for m in maps])
        return cls(ambient_dim=dims.pop(), maps=maps, similarity_dim=s,
                   osc_verified=osc_verified)


@dataclass
class FractalSet:
    """Weighted point cloud approximating (X, H_s) at a fixed depth."""

    points: np.ndarray
    masses: np.ndarray
    s: float
    diam: float
    cell_diam: float
    total_mass: float
    ifs: IFS | None = None
    depth: int | None = None
    _bucket: object = field(default=None, repr=False, compare=False)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def to_csv(self, path_or_buf) -> None:
        """Write the cloud as CSV with columns x1,...,xn,mass."""
        header = ",".join(f"x{i+1}" for i in range(self.ambient_dim)) + ",mass"
        data = np.column_stack([self.points, self.masses])
        if isinstance(path_or_buf, (str, bytes)):
            with open(path_or_buf, "w") as fh:
                np.savetxt(fh, data, delimiter=",", header=header, comments="")
        else:
            np.savetxt(path_or_buf, data, delimiter=",", header=header,
                       comments="")


def build_set(ifs: IFS, depth: int, total_mass: float = 1.0,
              diam: float | None = None) -> FractalSet:
    """Refine the IFS to the given depth.

    Cell representatives are S_w(x0) with x0 the fixed point of map 0, and
    the cell mass is total_mass * prod p_i over the word, where p_i = 1/m
    for equal ratios (exact dyadic masses for the shipped presets) and
    p_i = r_i^s otherwise.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    m = len(ifs.maps)
    if m ** depth > MAX_CELLS:
        raise CellCountError(f"{m}^{depth} cells exceed the {MAX_CELLS} cap")

    ratios = np.array([mp.ratio for mp in ifs.maps])
    if np.all(ratios == ratios[0]):
        probs = np.full(m, 1.0 / m)
    else:
        probs = ratios ** ifs.similarity_dim
        probs = probs / probs.sum()

    points = ifs.maps[0].fixed_point()[None, :]
    masses = np.array([float(total_mass)])
    for _ in range(depth):
        points = np.concatenate([mp.apply(points) for mp in ifs.maps])
        masses = np.concatenate([p * masses for p in probs])

    if diam is None:
        lo, hi = points.min(axis=0), points.max(axis=0)
        diam = float(np.linalg.norm(hi - lo))
    cell_diam = diam * float(ratios.max()) ** depth
    return FractalSet(points=points, masses=masses, s=ifs.similarity_dim,
                      diam=diam, cell_diam=cell_diam, total_mass=float(total_mass),
                      ifs=ifs, depth=depth)


# -- ball queries ------------------------------------------------------


class _BucketIndex:
    """Uniform grid over the cloud; an index only, never an approximation."""

    def __init__(self, points: np.ndarray, cell: float):
        self.cell = cell
        self.lo = points.min(axis=0)
        keys = np.floor((points - self.lo) / cell).astype(np.int64)
        self.buckets: dict = {}
        for i, k in enumerate(map(tuple, keys)):
            self.buckets.setdefault(k, []).append(i)

    def candidates(self, x: np.ndarray, r: float) -> np.ndarray:
        lo_k = np.floor((x - r - self.lo) / self.cell).astype(np.int64)
        hi_k = np.floor((x + r - self.lo) / self.cell).astype(np.int64)
        idx: list = []
        ranges = [range(a, b + 1) for a, b in zip(lo_k, hi_k)]
        for key in itertools.product(*ranges):
            idx.extend(self.buckets.get(key, ()))
        return np.array(sorted(idx), dtype=np.int64)


def _get_bucket(X: FractalSet) -> _BucketIndex:
    if X._bucket is None:
        cell = max(X.diam / max(int(round(X.size ** (1.0 / X.ambient_dim))), 1),
                   X.cell_diam, 1e-12)
        X._bucket = _BucketIndex(X.points, cell)
    return X._bucket


def ball_measure(X: FractalSet, x, r: float, method: str = "auto") -> float:
    """Mass of the open Euclidean ball B_r(x) under the cloud measure.

    Brute force and the bucketed index visit the same points in the same
    index order, so their results are bitwise identical.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if method == "auto":
        method = "bucket" if X.size >= BUCKET_THRESHOLD else "brute"
    if method == "brute":
        d = np.linalg.norm(X.points - x, axis=1)
        return float(np.sum(X.masses[d < r]))
    if method == "bucket":
        cand = _get_bucket(X).candidates(x, r)
        if len(cand) == 0:
            return 0.0
        d = np.linalg.norm(X.points[cand] - x, axis=1)
        return float(np.sum(X.masses[cand[d < r]]))
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class RegularityEstimate:
    a_hat: float
    b_hat: float
    s: float
    num_samples: int
    radius_range: tuple

    def __post_init__(self):
        if not (0.0 < self.b_hat <= self.a_hat < math.inf):
            raise ValueError("regularity estimate must satisfy 0 < b <= a < inf")


def regularity_samples(X: FractalSet, num_samples: int, radius_range,
                       rng) -> tuple[np.ndarray, np.ndarray]:
    """Sample (center, radius) pairs: centers at cloud points, radii log-uniform."""
    r_min, r_max = radius_range
    idx = rng.integers(0, X.size, size=num_samples)
    centers = X.points[idx]
    radii = np.exp(rng.uniform(math.log(r_min), math.log(r_max),
                               size=num_samples))
    return centers, radii


def estimate_regularity(X: FractalSet, num_samples: int = 1000,
                        radius_range=None, rng=None,
                        samples=None) -> RegularityEstimate:
    """Empirical Ahlfors constants: extremes of ball_measure / r^s.

    Radii below 4 cell diameters are rejected; beneath cell resolution the
    cloud no longer represents the measure.
    """
    if X.size < 2:
        raise ValueError("degenerate set: need at least two cloud points")
    if samples is None:
        if radius_range is None:
            radius_range = (4.0 * X.cell_diam, X.diam)
        r_min, r_max = radius_range
        if not (0.0 < r_min < r_max <= X.diam * (1 + 1e-9)):
            raise ValueError(f"degenerate radius range {radius_range}")
        if r_min < 4.0 * X.cell_diam * (1 - 1e-9):
            raise ValueError("radius range extends below 4x cell resolution")
        if rng is None:
            rng = np.random.default_rng(0)
        centers, radii = regularity_samples(X, num_samples, radius_range, rng)
    else:
        centers, radii = samples
        radius_range = (float(np.min(radii)), float(np.max(radii)))
    ratios = np.array([
        ball_measure(X, c, r) / r ** X.s for c, r in zip(centers, radii)
    ])
    return RegularityEstimate(a_hat=float(ratios.max()),
                              b_hat=float(ratios.min()),
                              s=X.s, num_samples=len(radii),
                              radius_range=tuple(radius_range))


# -- constructions on sets ---------------------------------------------


def product_set(X1: FractalSet, X2: FractalSet) -> FractalSet:
    """Tensor product: dims and similarity dimensions add, masses multiply."""
    if X1.size * X2.size > MAX_CELLS:
        raise CellCountError("product cloud exceeds the cell cap")
    n1 = X1.ambient_dim
    pts = np.empty((X1.size * X2.size, n1 + X2.ambient_dim))
    pts[:, :n1] = np.repeat(X1.points, X2.size, axis=0)
    pts[:, n1:] = np.tile(X2.points, (X1.size, 1))
    masses = np.outer(X1.masses, X2.masses).ravel()
    return FractalSet(points=pts, masses=masses, s=X1.s + X2.s,
                      diam=math.hypot(X1.diam, X2.diam),
                      cell_diam=math.hypot(X1.cell_diam, X2.cell_diam),
                      total_mass=X1.total_mass * X2.total_mass)


def transform(X: FractalSet, scale: float, offset) -> FractalSet:
    """Dilation plus translation; mass rescales by scale^s."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    offset = np.broadcast_to(np.asarray(offset, dtype=float),
                             (X.ambient_dim,))
    factor = scale ** X.s
    return FractalSet(points=scale * X.points + offset,
                      masses=X.masses * factor,
                      s=X.s, diam=X.diam * scale, cell_diam=X.cell_diam * scale,
                      total_mass=X.total_mass * factor,
                      ifs=None, depth=X.depth)


# -- preset registry ----------------------------------------------------


def _cantor_ifs(ratio: float) -> IFS:
    if not 0.0 < ratio < 0.5:
        raise ValueError(f"cantor ratio must lie in (0, 1/2), got {ratio}")
    maps = (Similarity(ratio, (0.0,)), Similarity(ratio, (1.0 - ratio,)))
    return IFS.from_maps(maps, osc_verified=True)

def _dust2d_ifs(ratio: float) -> IFS:
    if not 0.0 < ratio <= 0.5:
        raise ValueError(f"dust ratio must lie in (0, 1/2], got {ratio}")
    c = 1.0 - ratio
    maps = tuple(Similarity(ratio, t) for t in
                 ((0.0, 0.0), (c, 0.0), (0.0, c), (c, c)))
    return IFS.from_maps(maps, osc_verified=True)

def _cube_ifs(n: int) -> IFS:
    if not 1 <= n <= 3:
        raise ValueError(f"cube dimension must be 1..3, got {n}")
    maps = tuple(Similarity(0.5, t)
                 for t in itertools.product((0.0, 0.5), repeat=n))
    return IFS.from_maps(maps, osc_verified=True)


def _parse_fraction(text: str) -> float:
    return float(Fraction(text))


def list_preset_ids() -> list[str]:
    return ["cantor:<ratio in (0,1/2)>", "dust2d:<ratio in (0,1/2]>",
            "cube:<dim 1..3>", "<id>*<id> (product)"]


def build_preset(set_id: str, depth: int) -> FractalSet:
    """Build a preset cloud by string id, e.g. "cantor:1/3" or "cube:1"."""
    set_id = set_id.strip()
    if "*" in set_id:
        parts = set_id.split("*")
        X = build_preset(parts[0], depth)
        for part in parts[1:]:
            X = product_set(X, build_preset(part, depth))
        return X
    if ":" not in set_id:
        raise KeyError(f"unknown set id {set_id!r}")
    name, _, param = set_id.partition(":")
    if name == "cantor":
        return build_set(_cantor_ifs(_parse_fraction(param)), depth, diam=1.0)
    if name == "dust2d":
        return build_set(_dust2d_ifs(_parse_fraction(param)), depth,
                         diam=math.sqrt(2.0))
    if name == "cube":
        n = int(param)
        return build_set(_cube_ifs(n), depth, total_mass=1.0,
                         diam=math.sqrt(n))
    raise KeyError(f"unknown set id {set_id!r}")
