"""Whitney-type extension of functions from fractal sets to the ambient space.

The pipeline realizes a linear extension operator in four steps:

  1. project:  P_Q(f) is the mass-weighted L2 projection of f onto
     polynomials of degree k-1 over Q cap X (linear, idempotent, exact on
     its range).
  2. trace_tilde:  the pointwise trace value at a cloud point x is the
     limit of P_Q(f)(x) along shrinking dyadic cubes; the deepest
     resolvable rung is used and the Cauchy increments are reported.
  3. build_chain:  each cube receives the recentered polynomial
     P~_Q = P_Q(f) - P_Q(f)(c_Q) + trace(c_Q), so P~_Q(c_Q) interpolates
     the trace; cubes larger than diam X borrow the projection over a
     fixed cube of radius 2 diam X.  The map f -> chain is linear.
  4. whitney_extend:  an ambient grid node y at distance d from X blends
     the chain polynomials of cubes with radius in [d, 4d] whose doubled
     cubes contain y, with smooth bump weights normalized to sum one;
     nodes on X fall back to the smallest covering cubes.

The chain seminorm is the max over nested cube pairs Q inside Q', with
radii within two rungs of the same dyadic window, of
max_Q |P_Q - P_Q'| / omega(r_Q').  For entries of degree <= 2 the inner
max over the closed cube is computed exactly from corner, edge-vertex,
and interior critical values; higher degrees fall back to sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial import cKDTree

from .campanato import (CubeFamily, Majorant, build_cube_family,
                        dyadic_radii, local_best_approx, campanato_seminorm,
                        lipschitz_seminorm, quasipower_check)
from .fractals import FractalSet
from .geometry import Cube
from .polynomials import Polynomial, multi_indices

__all__ = [
    "Chain", "GridSpec", "ExtensionField", "project", "trace_tilde",
    "build_chain", "chain_seminorm", "whitney_extend", "verify_extension",
    "local_decay_diagnostic",
]


def project(f_values: np.ndarray, X: FractalSet, Q: Cube, k: int) -> Polynomial:
    """Weighted L2 projection of f onto degree-(k-1) polynomials over Q cap X."""
    return local_best_approx(f_values, X, Q, k, 2).poly


@dataclass
class TraceResult:
    value: float
    increments: np.ndarray
    radii: np.ndarray


def trace_tilde(f_values: np.ndarray, x, k: int, X: FractalSet,
                q=2, min_radius: float | None = None) -> TraceResult:
    """Pointwise trace at a cloud point via shrinking dyadic cubes.

    Returns the deepest-rung projection value P_Q(f)(x) together with the
    per-rung increments |P_{j+1}(x) - P_j(x)| as convergence diagnostics.
    Requires at least three resolvable rungs above cell resolution.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if min_radius is None:
        min_radius = 4.0 * X.cell_diam
    radii = dyadic_radii(min_radius, max(X.diam, 2.0 * min_radius))
    if len(radii) < 3:
        raise ValueError("fewer than three resolvable ladder rungs")
    vals = []
    for r in radii:  # ascending; the deepest rung is first
        res = local_best_approx(f_values, X, Cube(tuple(x), r), k, q)
        vals.append(float(np.real(res.poly.eval(x))))
    vals = np.array(vals)
    return TraceResult(value=vals[0], increments=np.abs(np.diff(vals)),
                       radii=np.array(radii))


@dataclass
class Chain:
    """Cube-indexed family of degree-(k-1) polynomials.

    Cubes whose local systems were rank-deficient (too few cloud points,
    or degenerate geometry, for the polynomial space) are listed in
    `deficient`; their minimum-norm entries interpolate the data but do
    not determine the polynomial, so the Whitney assembly skips them.
    """

    entries: dict
    k: int
    omega: Majorant
    seminorm_estimate: float | None = None
    deficient: frozenset = frozenset()

    @property
    def cubes(self) -> list:
        return list(self.entries.keys())


def build_chain(f_values: np.ndarray, X: FractalSet, family: CubeFamily,
                k: int, omega: Majorant, q=2) -> Chain:
    """Recentered projection chain; linear in f throughout.

    Cubes with radius above diam X all borrow the projection over the
    fixed cube of radius 2 diam X centered at the first cloud point, so
    only the interpolated constant varies across them.
    """
    qp = quasipower_check(omega)
    if not qp.is_quasipower:
        raise ValueError(f"chain construction needs a quasipower majorant: "
                         f"{qp.reason}")
    trace_cache: dict = {}

    def trace_at(center: tuple) -> float:
        if center not in trace_cache:
            trace_cache[center] = trace_tilde(f_values, center, k, X, q).value
        return trace_cache[center]

    big_poly = None
    entries: dict = {}
    deficient = set()
    for Q in family.cubes:
        if Q.radius > X.diam:
            if big_poly is None:
                anchor = Cube(tuple(X.points[0]), 2.0 * X.diam)
                big_poly = local_best_approx(f_values, X, anchor, k, 2).poly
            P = big_poly
        else:
            res = local_best_approx(f_values, X, Q, k, 2)
            P = res.poly
            if res.rank_deficient:
                deficient.add(Q)
        shift = trace_at(Q.center) - float(np.real(P.eval(np.asarray(Q.center))))
        entries[Q] = P + shift
    return Chain(entries=entries, k=k, omega=omega,
                 deficient=frozenset(deficient))


# -- exact sup of low-degree polynomials over cubes -------------------------


def _coef_matrix(polys: list, num_vars: int, deg: int) -> np.ndarray:
    m = len(multi_indices(num_vars, deg))
    C = np.zeros((len(polys), m))
    for i, p in enumerate(polys):
        if p.degree_bound > deg:
            raise ValueError("polynomial exceeds the common degree bound")
        C[i, : len(p.coeffs)] = np.real(p.coeffs)
    return C


def _max_abs_deg2_interval(C: np.ndarray, lo: np.ndarray,
                           hi: np.ndarray) -> np.ndarray:
    """Exact max of |c0 + c1 t + c2 t^2| over [lo, hi], rowwise."""
    c0, c1, c2 = (C[:, j] if C.shape[1] > j else np.zeros(len(C))
                  for j in range(3))
    vals = [np.abs(c0 + c1 * lo + c2 * lo ** 2),
            np.abs(c0 + c1 * hi + c2 * hi ** 2)]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(c2 != 0.0, -c1 / (2.0 * c2), np.nan)
    ok = np.isfinite(t) & (t >= lo) & (t <= hi)
    v = np.where(ok, np.abs(c0 + c1 * t + c2 * t ** 2), -np.inf)
    vals.append(v)
    return np.max(vals, axis=0)


def _max_abs_deg2_square(C: np.ndarray, centers: np.ndarray,
                         radii: np.ndarray) -> np.ndarray:
    """Exact max of |quadratic| over sup-metric squares, rowwise (n = 2).

    Basis order follows multi_indices(2, 2):
    1, y, x, y^2, xy, x^2.
    """
    pad = np.zeros((len(C), 6))
    pad[:, : C.shape[1]] = C
    a, by, cx, dyy, exy, fxx = (pad[:, j] for j in range(6))
    x0, y0 = centers[:, 0], centers[:, 1]
    r = radii
    xs = np.stack([x0 - r, x0 + r])
    ys = np.stack([y0 - r, y0 + r])

    def val(x, y):
        return np.abs(a + by * y + cx * x + dyy * y ** 2 + exy * x * y
                      + fxx * x ** 2)

    best = np.full(len(C), -np.inf)
    for xi in range(2):
        for yi in range(2):
            best = np.maximum(best, val(xs[xi], ys[yi]))
    with np.errstate(divide="ignore", invalid="ignore"):
        for xi in range(2):  # edges x fixed, vertex in y
            x = xs[xi]
            ystar = -(by + exy * x) / (2.0 * dyy)
            ok = np.isfinite(ystar) & (ystar >= ys[0]) & (ystar <= ys[1])
            best = np.maximum(best, np.where(ok, val(x, ystar), -np.inf))
        for yi in range(2):  # edges y fixed, vertex in x
            y = ys[yi]
            xstar = -(cx + exy * y) / (2.0 * fxx)
            ok = np.isfinite(xstar) & (xstar >= xs[0]) & (xstar <= xs[1])
            best = np.maximum(best, np.where(ok, val(xstar, y), -np.inf))
        det = 4.0 * fxx * dyy - exy ** 2
        xstar = (-2.0 * dyy * cx + exy * by) / det
        ystar = (exy * cx - 2.0 * fxx * by) / det
        ok = (np.isfinite(xstar) & np.isfinite(ystar)
              & (xstar >= xs[0]) & (xstar <= xs[1])
              & (ystar >= ys[0]) & (ystar <= ys[1]))
        best = np.maximum(best, np.where(ok, val(xstar, ystar), -np.inf))
    return best


def _max_abs_sampled(p: Polynomial, Q: Cube, budget: int = 256) -> float:
    from .remez import sup_norm

    return sup_norm(p, Q, budget=budget)


@dataclass
class ChainSeminormResult:
    value: float
    witness: tuple | None
    num_pairs: int


def chain_seminorm(chain: Chain, family: CubeFamily) -> ChainSeminormResult:
    """Max over admissible nested pairs of max_Q |P_Q - P_Q'| / omega(r_Q').

    Admissible means Q inside Q' with dyadic radii at most two rungs apart
    (the two-rung window t_i <= r_Q < r_Q' <= t_{i+2} for family radii that
    are exact powers of two).
    """
    cubes = [Q for Q in family.cubes if Q in chain.entries]
    if not cubes:
        return ChainSeminormResult(0.0, None, 0)
    n = len(cubes[0].center)
    deg = max(chain.k - 1, 0)
    by_radius: dict = {}
    for Q in cubes:
        by_radius.setdefault(Q.radius, []).append(Q)
    radii = sorted(by_radius)
    exact = deg <= 2 and n <= 2

    best = -math.inf
    witness = None
    num_pairs = 0
    C_cache = {r: _coef_matrix([chain.entries[Q] for Q in by_radius[r]], n, deg)
               for r in by_radius}
    trees = {r: cKDTree(np.array([Q.center for Q in by_radius[r]]))
             for r in by_radius}

    for bi, r_big in enumerate(radii):
        for r_small in radii[max(0, bi - 2): bi]:
            if r_big > 4.0 * r_small * (1 + 1e-12):
                continue
            small = by_radius[r_small]
            tree = trees[r_small]
            big = by_radius[r_big]
            pairs_small, pairs_big = [], []
            for j, Qb in enumerate(big):
                idx = tree.query_ball_point(np.asarray(Qb.center),
                                            r_big - r_small + 1e-12, p=np.inf)
                pairs_small.extend(idx)
                pairs_big.extend([j] * len(idx))
            if not pairs_small:
                continue
            num_pairs += len(pairs_small)
            si = np.array(pairs_small)
            bj = np.array(pairs_big)
            D = C_cache[r_small][si] - C_cache[r_big][bj]
            centers = np.array([small[i].center for i in si])
            if exact and n == 1:
                lo = centers[:, 0] - r_small
                hi = centers[:, 0] + r_small
                sups = _max_abs_deg2_interval(D, lo, hi)
            elif exact:
                sups = _max_abs_deg2_square(D, centers,
                                            np.full(len(si), r_small))
            else:
                sups = np.array([
                    _max_abs_sampled(chain.entries[small[i]]
                                     - chain.entries[big[j]], small[i])
                    for i, j in zip(si, bj)
                ])
            ratios = sups / float(chain.omega(r_big))
            jbest = int(np.argmax(ratios))
            if ratios[jbest] > best:
                best = float(ratios[jbest])
                witness = (small[si[jbest]], big[bj[jbest]])
    if witness is None:
        chain.seminorm_estimate = 0.0
        return ChainSeminormResult(0.0, None, 0)
    chain.seminorm_estimate = best
    return ChainSeminormResult(best, witness, num_pairs)


# -- Whitney assembly --------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    lo: tuple
    hi: tuple
    shape: tuple

    @property
    def dim(self) -> int:
        return len(self.shape)

    def axes(self) -> list:
        return [np.linspace(self.lo[i], self.hi[i], self.shape[i])
                for i in range(self.dim)]

    def nodes(self) -> np.ndarray:
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.column_stack([g.ravel() for g in grids])

    @property
    def spacing(self) -> float:
        return max((self.hi[i] - self.lo[i]) / (self.shape[i] - 1)
                   for i in range(self.dim))


@dataclass
class ExtensionField:
    grid: GridSpec
    values: np.ndarray
    provenance: list
    holes: list
    chain_k: int

    def interpolate(self, points) -> np.ndarray:
        interp = RegularGridInterpolator(tuple(self.grid.axes()),
                                         self.values.reshape(self.grid.shape),
                                         method="linear")
        return interp(np.atleast_2d(np.asarray(points, dtype=float)))

    def as_callable(self):
        interp = RegularGridInterpolator(tuple(self.grid.axes()),
                                         self.values.reshape(self.grid.shape),
                                         method="linear")

        def g(pts):
            return interp(np.atleast_2d(np.asarray(pts, dtype=float)))

        return g

    def to_csv(self, path) -> None:
        nodes = self.grid.nodes()
        header = ",".join(f"x{i+1}" for i in range(self.grid.dim)) + ",value"
        with open(path, "w") as fh:
            np.savetxt(fh, np.column_stack([nodes, self.values]),
                       delimiter=",", header=header, comments="")

    def meta_json(self) -> dict:
        return {
            "grid": {"lo": list(self.grid.lo), "hi": list(self.grid.hi),
                     "shape": list(self.grid.shape)},
            "holes": len(self.holes),
            "k": self.chain_k,
        }


def _bump(t: np.ndarray) -> np.ndarray:
    """Smooth compactly supported profile exp(-1/(1-t^2)) on |t| < 1."""
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def whitney_extend(chain: Chain, X: FractalSet, grid: GridSpec) -> ExtensionField:
    """Blend chain polynomials over an ambient grid with Whitney scaling."""
    nodes = grid.nodes()
    n = grid.dim
    cubes = [Q for Q in chain.cubes if Q not in chain.deficient]
    if not cubes:
        raise ValueError("chain has no full-rank entries to blend")
    deg = max(chain.k - 1, 0)
    C = _coef_matrix([chain.entries[Q] for Q in cubes], n, deg)
    exps = np.array(multi_indices(n, deg), dtype=int)
    centers = np.array([Q.center for Q in cubes])
    radii = np.array([Q.radius for Q in cubes])

    tree_X = cKDTree(X.points)
    dist, _ = tree_X.query(nodes)

    values = np.full(len(nodes), np.nan)
    provenance: list = [None] * len(nodes)
    holes: list = []
    unique_radii = np.array(sorted(set(radii)))

    for i, y in enumerate(nodes):
        d = dist[i]
        supd = np.max(np.abs(centers - y), axis=1)
        in_double = supd <= 2.0 * radii
        band = in_double & (radii >= d) & (radii <= 4.0 * d)
        sel = np.nonzero(band)[0]
        if len(sel) == 0:
            # on-set nodes and band gaps: smallest covering scale
            for r in unique_radii:
                sel = np.nonzero(in_double & (radii == r))[0]
                if len(sel):
                    break
        if len(sel) == 0:
            holes.append(i)
            continue
        t = supd[sel] / (2.0 * radii[sel])
        w = _bump(t)
        if w.sum() == 0.0:
            w = np.ones(len(sel))
        w = w / w.sum()
        mono = np.prod(np.power(y[None, :], exps), axis=1)
        values[i] = float(w @ (C[sel] @ mono))
        provenance[i] = list(zip(sel.tolist(), w.tolist()))
    return ExtensionField(grid=grid, values=values, provenance=provenance,
                          holes=holes, chain_k=chain.k)


# -- end-to-end verification --------------------------------------------------


@dataclass
class ExtensionReport:
    trace_error: float
    lipschitz: float
    campanato: float
    ratio: float | None
    not_applicable: bool


def verify_extension(f_values: np.ndarray, fld: ExtensionField, X: FractalSet,
                     k: int, omega: Majorant, q=2,
                     family: CubeFamily | None = None,
                     lip_budget: int = 2 ** 12,
                     h_max: float | None = None,
                     h_min: float | None = None) -> ExtensionReport:
    """Trace error, Lipschitz seminorm of the field, and the operator-norm
    proxy ratio against the trace seminorm of f.

    The Lipschitz probe keeps |h| in [h_min, h_max]; h_min defaults to four
    grid spacings.  When comparing fields across grid refinements, pass the
    same explicit range so both runs probe identical scales.
    """
    interp_vals = fld.interpolate(X.points)
    trace_err = float(np.max(np.abs(interp_vals - np.asarray(f_values))))

    lo = np.asarray(fld.grid.lo) + fld.grid.spacing
    hi = np.asarray(fld.grid.hi) - fld.grid.spacing
    g = fld.as_callable()
    hm = h_max if h_max is not None else float(np.min(hi - lo)) / (2.0 * k)
    hmin = h_min if h_min is not None else 4.0 * fld.grid.spacing
    decades = max(math.log10(hm / hmin), 0.5)
    lip = lipschitz_seminorm(g, k, omega, (lo, hi), budget=lip_budget,
                             h_decades=decades, h_max=hm).value

    if family is None:
        family = build_cube_family(X, center_budget=128)
    camp = campanato_seminorm(f_values, family, k, q, omega).value

    scale = float(np.max(np.abs(f_values))) if len(f_values) else 1.0
    na = camp <= 1e-12 * max(scale, 1.0)
    ratio = None if na else lip / camp
    return ExtensionReport(trace_error=trace_err, lipschitz=lip,
                           campanato=camp, ratio=ratio, not_applicable=na)


def local_decay_diagnostic(f_values: np.ndarray, X: FractalSet, Q: Cube,
                           K: Cube, omega: Majorant, q=2) -> dict:
    """Both sides of the first-order decay estimate on nested cubes.

    Compares E_1(f; Q) with r * int_r^{2R} omega(t)/t^2 dt plus
    (r/R) times the normalized norm of f over the doubled outer cube; no
    constant is asserted, the two sides are reported for inspection.
    """
    r, R = Q.radius, K.radius
    if not r < R:
        raise ValueError("need r_Q < r_K")
    e1 = local_best_approx(f_values, X, Q, 1, q).value
    ts = np.exp(np.linspace(math.log(r), math.log(2.0 * R), 400))
    integral = float(np.trapezoid(omega(ts) / ts ** 2, ts))
    ktilde = Cube(K.center, 2.0 * R)
    norm_term = local_best_approx(f_values, X, ktilde, 0, q).value
    return {
        "E1": e1,
        "integral_term": r * integral,
        "norm_term": (r / R) * norm_term,
        "rhs_total": r * integral + (r / R) * norm_term,
    }
