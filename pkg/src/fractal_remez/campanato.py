"""Local polynomial approximation and Morrey-Campanato-type seminorms.

The central quantity is the local best approximation of order k over a
cube Q = Q_r(x) with center on the set X,

    E_k(f; Q) = inf_{p of degree k-1} { (1/mu(Q cap X))
                 int_{Q cap X} |f - p|^q dmu }^(1/q),

with E_0 the normalized L_q norm of f itself.  The seminorm of the
generalized Morrey-Campanato space is sup_Q E_k(f; Q) / omega(r_Q) over a
family of cubes with dyadic radii up to 4 diam X.

Smoothness moduli omega are "quasipower k-majorants" when omega(+0) = 0,
omega(t)/t^k is nonincreasing, and the Dini constant

    C_omega = sup_t (1/omega(t)) int_0^t omega(u)/u du

is finite; for omega(t) = t^lam this is 1/lam.  The companion Lipschitz
seminorm sup |delta_h^k g(x)| / omega(|h|) is estimated by quasi-random
probing with |h| log-uniform across several decades.

Best approximations: q = 2 is a weighted least-squares solve (minimum-norm
on rank-deficient cubes); q = 1 and q = infinity are solved exactly as
linear programs.  The basis is monomials in (x - c_Q)/r_Q for conditioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .fractals import FractalSet
from .geometry import Cube, sobol_unit
from .polynomials import Polynomial, binomial, multi_indices

LN2 = math.log(2.0)


# -- cube families -------------------------------------------------------


@dataclass
class CubeFamily:
    base_set: FractalSet
    cubes: list
    radius_cap: float

    @property
    def radii(self) -> np.ndarray:
        return np.array(sorted({q.radius for q in self.cubes}))


def dyadic_radii(r_min: float, r_max: float) -> list[float]:
    """Powers of two 2^j covering [r_min, r_max]."""
    if not 0 < r_min <= r_max:
        raise ValueError("need 0 < r_min <= r_max")
    j_lo = math.ceil(math.log2(r_min) - 1e-12)
    j_hi = math.floor(math.log2(r_max) + 1e-12)
    if j_hi < j_lo:
        j_hi = j_lo
    return [2.0 ** j for j in range(j_lo, j_hi + 1)]


def build_cube_family(X: FractalSet, center_budget: int | None = None,
                      min_radius: float | None = None,
                      rng=None) -> CubeFamily:
    """Cubes centered at cloud points with dyadic radii up to 4 diam X.

    All cloud points serve as centers below 1000 points (or within the
    given budget); otherwise a seeded random subset.  Because the family
    is a sample, any sup over it is a certified lower bound.
    """
    cap = 4.0 * X.diam
    if min_radius is None:
        min_radius = 4.0 * X.cell_diam
    radii = dyadic_radii(min_radius, cap)
    centers = X.points
    budget = center_budget if center_budget is not None else 1000
    if X.size > budget:
        if rng is None:
            rng = np.random.default_rng(0)
        idx = rng.choice(X.size, size=budget, replace=False)
        centers = X.points[np.sort(idx)]
    cubes = [Cube(tuple(c), r) for c in centers for r in radii]
    return CubeFamily(base_set=X, cubes=cubes, radius_cap=cap)


# -- smoothness moduli -----------------------------------------------------


@dataclass(frozen=True)
class Majorant:
    """Modulus omega(t) of kind power t^lam, constant, or table."""

    kind: str
    param: object
    k: int

    @classmethod
    def power(cls, lam: float, k: int) -> "Majorant":
        if lam <= 0:
            raise ValueError("power exponent must be positive")
        return cls("power", float(lam), k)

    @classmethod
    def const(cls, value: float, k: int) -> "Majorant":
        if value <= 0:
            raise ValueError("constant majorant must be positive")
        return cls("constant", float(value), k)

    @classmethod
    def table(cls, ts, vals, k: int) -> "Majorant":
        ts = tuple(float(t) for t in ts)
        vals = tuple(float(v) for v in vals)
        if len(ts) != len(vals) or len(ts) < 2:
            raise ValueError("table needs matching ts/vals, length >= 2")
        return cls("table", (ts, vals), k)

    @classmethod
    def from_id(cls, text: str, k: int) -> "Majorant":
        name, _, arg = text.partition(":")
        if name == "power":
            return cls.power(float(arg), k)
        if name == "const":
            return cls.const(float(arg), k)
        raise KeyError(f"unknown majorant id {text!r}")

    @property
    def id(self) -> str:
        if self.kind == "power":
            return f"power:{self.param:g}"
        if self.kind == "constant":
            return f"const:{self.param:g}"
        return "table"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            return t ** self.param
        if self.kind == "constant":
            return np.full_like(t, self.param)
        ts, vals = self.param
        return np.interp(t, ts, vals)


@dataclass(frozen=True)
class QuasipowerReport:
    is_quasipower: bool
    C_omega: float
    reason: str = ""


def quasipower_check(omega: Majorant, grid_lo: float = 1e-8,
                     grid_hi: float = 1e4, grid_n: int = 400) -> QuasipowerReport:
    """Verify omega(+0) = 0, monotonicity, omega(t)/t^k nonincreasing, and
    compute C_omega (closed form for powers, log-grid quadrature otherwise)."""
    k = omega.k
    if omega.kind == "power":
        lam = omega.param
        if lam > k:
            return QuasipowerReport(False, math.inf,
                                    f"omega(t)/t^{k} increasing (lam={lam:g})")
        return QuasipowerReport(True, 1.0 / lam)
    if omega.kind == "constant":
        return QuasipowerReport(False, math.inf, "omega(+0) != 0")
    ts = np.exp(np.linspace(math.log(grid_lo), math.log(grid_hi), grid_n))
    vals = omega(ts)
    # omega(+0) = 0 checked as decay across the lower half of the log grid
    if vals[0] > 0.5 * vals[grid_n // 2]:
        return QuasipowerReport(False, math.inf, "omega(+0) != 0")
    if np.any(np.diff(vals) < -1e-12 * vals.max()):
        return QuasipowerReport(False, math.inf, "omega not nondecreasing")
    ratio = vals / ts ** k
    if np.any(np.diff(ratio) > 1e-9 * ratio[:-1]):
        return QuasipowerReport(False, math.inf, f"omega(t)/t^{k} increasing")
    # C_omega = sup_t (1/omega(t)) int_0^t omega(u)/u du on the log grid
    logs = np.log(ts)
    integrand = vals  # omega(u)/u du = omega d(ln u)
    cum = np.concatenate([[0.0],
                          np.cumsum(0.5 * (integrand[1:] + integrand[:-1])
                                    * np.diff(logs))])
    with np.errstate(divide="ignore", invalid="ignore"):
        sup = np.nanmax(np.where(vals > 0, cum / vals, 0.0))
    return QuasipowerReport(bool(np.isfinite(sup)), float(sup))


class MajorantSumError(AssertionError):
    """Dyadic sum exceeded the quasipower cap 2^k C_omega / ln 2."""


def majorant_sum_check(omega: Majorant, i: int, i_prime: int,
                       rtol: float = 1e-6) -> tuple[float, float, float]:
    """Sum of omega over the dyadic ladder 2^i .. 2^i' against omega(2^i').

    Returns (lhs, rhs, ratio) and raises if ratio exceeds the cap
    2^k C_omega / ln 2 that the quasipower property forces.
    """
    if i >= i_prime:
        raise ValueError("need i < i_prime")
    rep = quasipower_check(omega)
    if not rep.is_quasipower:
        raise ValueError(f"majorant is not quasipower: {rep.reason}")
    js = np.arange(i, i_prime + 1)
    lhs = float(np.sum(omega(2.0 ** js)))
    rhs = float(omega(2.0 ** i_prime))
    ratio = lhs / rhs
    cap = 2.0 ** omega.k * rep.C_omega / LN2
    if ratio > cap * (1.0 + rtol):
        raise MajorantSumError(
            f"dyadic sum ratio {ratio:.6g} exceeds cap {cap:.6g}")
    return lhs, rhs, ratio


# -- local best approximation ---------------------------------------------


@dataclass
class ApproxResult:
    value: float
    poly: Polynomial
    rank_deficient: bool


def _scaled_design(points: np.ndarray, cube: Cube, k: int) -> np.ndarray:
    """Design matrix of monomials in (x - c)/r of degree <= k-1."""
    c = np.asarray(cube.center)
    z = (points - c) / cube.radius
    exps = np.array(multi_indices(points.shape[1], k - 1), dtype=int)
    return np.prod(np.power(z[:, None, :], exps[None, :, :]), axis=2)


def _poly_from_scaled(coefs: np.ndarray, cube: Cube, k: int,
                      num_vars: int) -> Polynomial:
    c = np.asarray(cube.center)
    p = Polynomial(num_vars, max(k - 1, 0),
                   np.asarray(coefs, dtype=float)
                   if len(coefs) else np.zeros(1))
    if k <= 1:
        return p
    return p.compose_affine(1.0 / cube.radius, -c / cube.radius)


def local_best_approx(f_values: np.ndarray, X: FractalSet, Q: Cube, k: int,
                      q) -> ApproxResult:
    """E_k(f; Q) over the cloud measure, with the achieved polynomial.

    k = 0 approximates by the zero polynomial, so the value is the
    normalized L_q norm of f.  Rank deficiency (fewer points than the
    polynomial space dimension) is flagged; the q=2 solve then returns the
    minimum-norm coefficient vector so results stay reproducible.
    """
    f_values = np.asarray(f_values, dtype=float)
    mask = Q.contains(X.points)
    if not np.any(mask):
        raise ValueError("cube does not meet the cloud")
    pts = X.points[mask]
    w = X.masses[mask]
    w = w / w.sum()
    fv = f_values[mask]
    n = X.ambient_dim

    if k == 0:
        value = _normalized_norm(fv, w, q)
        return ApproxResult(value, Polynomial.zero(n), False)

    A = _scaled_design(pts, Q, k)
    dim = A.shape[1]
    rank = int(np.linalg.matrix_rank(A))
    deficient = rank < dim

    sw = np.sqrt(w)
    coefs2, *_ = np.linalg.lstsq(A * sw[:, None], fv * sw, rcond=None)
    if q == 2:
        coefs = coefs2
    elif q == 1:
        coefs = _l1_fit(A, fv, w, seed=coefs2)
    elif q in (np.inf, math.inf, "inf"):
        coefs = _linf_fit(A, fv, seed=coefs2)
    else:
        raise ValueError("q must be 1, 2, or infinity")
    res = fv - A @ coefs
    value = _normalized_norm(res, w, q)
    return ApproxResult(value, _poly_from_scaled(coefs, Q, k, n), deficient)


def _normalized_norm(vals: np.ndarray, w: np.ndarray, q) -> float:
    if q in (np.inf, math.inf, "inf"):
        return float(np.max(np.abs(vals)))
    return float(np.sum(w * np.abs(vals) ** q) ** (1.0 / q))


def _l1_fit(A: np.ndarray, f: np.ndarray, w: np.ndarray,
            seed: np.ndarray) -> np.ndarray:
    """Weighted L1 coefficient fit as an exact linear program."""
    m, d = A.shape
    c = np.concatenate([np.zeros(d), w])
    A_ub = np.block([[A, -np.eye(m)], [-A, -np.eye(m)]])
    b_ub = np.concatenate([f, -f])
    bounds = [(None, None)] * d + [(0, None)] * m
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return seed
    return res.x[:d]


def _linf_fit(A: np.ndarray, f: np.ndarray, seed: np.ndarray) -> np.ndarray:
    """Chebyshev (minimax) coefficient fit as an exact linear program."""
    m, d = A.shape
    c = np.concatenate([np.zeros(d), [1.0]])
    ones = np.ones((m, 1))
    A_ub = np.block([[A, -ones], [-A, -ones]])
    b_ub = np.concatenate([f, -f])
    bounds = [(None, None)] * d + [(0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return seed
    return res.x[:d]


# -- seminorms -------------------------------------------------------------


@dataclass
class SeminormResult:
    value: float
    witness: Cube | None
    num_cubes: int


def campanato_seminorm(f_values: np.ndarray, family: CubeFamily, k: int, q,
                       omega: Majorant) -> SeminormResult:
    """sup over the family of E_k(f; Q) / omega(r_Q), with the witness cube.

    Over a sampled family this is a certified lower bound for the full sup.
    """
    if not family.cubes:
        raise ValueError("empty cube family")
    best = -math.inf
    witness = None
    X = family.base_set
    for Qc in family.cubes:
        e_k = local_best_approx(f_values, X, Qc, k, q).value
        ratio = e_k / float(omega(Qc.radius))
        if ratio > best:
            best, witness = ratio, Qc
    return SeminormResult(value=best, witness=witness,
                          num_cubes=len(family.cubes))


@dataclass
class LipschitzEstimate:
    value: float
    argmax_x: np.ndarray
    argmax_h: np.ndarray
    num_probes: int


def finite_difference_many(g, k: int, X: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Vectorized delta_h^k g(x) for batches of base points and steps."""
    total = np.zeros(len(X))
    for j in range(k + 1):
        sign = -1.0 if (k - j) % 2 else 1.0
        total += sign * binomial(k, j) * np.asarray(g(X + j * H), dtype=float)
    return total


def lipschitz_seminorm(g, k: int, omega: Majorant, box,
                       budget: int = 2 ** 12,
                       h_decades: float = 4.0,
                       h_max: float | None = None) -> LipschitzEstimate:
    """sup |delta_h^k g(x)| / omega(|h|) over quasi-random probes.

    g must accept an (N, n) array and return (N,).  Base points x are
    kept inside the probe box together with x + k h, and |h| is
    log-uniform over `h_decades` decades below h_max.  Nested Sobol
    prefixes make the estimate monotone nondecreasing in the budget.
    """
    lo = np.asarray(box[0], dtype=float)
    hi = np.asarray(box[1], dtype=float)
    n = len(lo)
    span = float(np.min(hi - lo))
    if h_max is None:
        h_max = span / (2.0 * k)
    u = sobol_unit(2 * n + 1, budget)
    x = lo + u[:, :n] * (hi - lo)
    if n == 1:
        dirs = np.where(u[:, n:n + 1] < 0.5, -1.0, 1.0)
    else:
        th = 2.0 * math.pi * u[:, n]
        dirs = np.column_stack([np.cos(th), np.sin(th)]) if n == 2 else None
        if dirs is None:
            from scipy.stats import norm

            z = norm.ppf(np.clip(u[:, n:2 * n], 1e-12, 1 - 1e-12))
            dirs = z / np.linalg.norm(z, axis=1, keepdims=True)
    mags = h_max * 10.0 ** (-h_decades * u[:, -1])
    Hs = dirs * mags[:, None]
    inside = np.all((x + k * Hs >= lo) & (x + k * Hs <= hi), axis=1)
    x, Hs, mags = x[inside], Hs[inside], mags[inside]
    diffs = np.abs(finite_difference_many(g, k, x, Hs))
    ratios = diffs / omega(mags)
    if len(ratios) == 0:
        return LipschitzEstimate(0.0, lo, np.zeros(n), 0)
    j = int(np.argmax(ratios))
    return LipschitzEstimate(float(ratios[j]), x[j], Hs[j], int(len(ratios)))
