"""Executable Cartan-type covering machinery on finite measure spaces.

Given a finite atomic measure and a majorant phi (continuous, strictly
increasing, phi(0) = 0, eventually exceeding the total mass A), the
threshold

    tau(x) = sup { t : xi(closed ball B_t(x)) >= phi(t) }

splits points into regular (tau = 0) and irregular.  For atomic measures
xi(B_t(x)) is a right-continuous step function of t, so tau is computed
exactly by scanning the finite set of jump radii.

greedy_ball_cover implements the exclusion-ball construction: repeatedly
take the point of largest tau among those not yet covered, emit the ball
of radius beta * tau around it, and stop when every remaining candidate
is regular.  The emitted balls B_k satisfy

    sum_k phi(gamma * t_k) < A,    t_k nonincreasing,

and every candidate outside their union is regular.  For atomic measures
the number of balls never exceeds the number of atoms (each ball of
radius tau_k around its witness carries positive mass and these balls are
pairwise disjoint).

The two corollaries turn this into quantitative statements about the
log-potential u(x) = sum m_i ln|x - x_i|: a radius-sum budget with a
pointwise lower bound on u off the balls, and, for a univariate f with
f(0) = 1, exclusion disks outside which ln|f| >= -H(eta) ln M(2eR) with
H(eta) = 2 + ln(3e / (2 eta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polynomials import Polynomial

DEFAULT_GAMMA = 1.0 / 3.0
DEFAULT_ALPHA = 0.9
DEFAULT_BETA = 2.5
MAX_CARTAN_DEGREE = 50


# -- measure spaces ----------------------------------------------------


@dataclass
class DiscreteMeasureSpace:
    """Finite weighted point set with a (pseudo)metric; A is the total mass.

    The metric defaults to Euclidean distance.  A custom pseudometric is
    spot-checked for symmetry and the triangle inequality on 100 random
    triples at construction.
    """

    points: np.ndarray
    masses: np.ndarray
    metric: object = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.masses = np.asarray(self.masses, dtype=float)
        if len(self.masses) != len(self.points):
            raise ValueError("points and masses must have equal length")
        if np.any(self.masses < 0):
            raise ValueError("masses must be non-negative")
        if self.metric is not None and len(self.points) >= 2:
            _spot_check_pseudometric(self)

    @classmethod
    def from_complex(cls, zs, masses=None) -> "DiscreteMeasureSpace":
        zs = np.asarray(zs, dtype=complex)
        pts = np.column_stack([zs.real, zs.imag])
        if masses is None:
            masses = np.ones(len(zs))
        return cls(pts, masses)

    @property
    def A(self) -> float:
        return float(np.sum(self.masses))

    @property
    def size(self) -> int:
        return len(self.points)

    def dist_from(self, x: np.ndarray, targets: np.ndarray) -> np.ndarray:
        if self.metric is None:
            return np.linalg.norm(targets - x, axis=1)
        return np.array([self.metric(x, y) for y in targets])

    def extent(self) -> float:
        lo, hi = self.points.min(axis=0), self.points.max(axis=0)
        return float(np.linalg.norm(hi - lo))


def _spot_check_pseudometric(space: DiscreteMeasureSpace, trials: int = 100):
    rng = np.random.default_rng(0)
    n = space.size
    d = space.metric
    for _ in range(trials):
        i, j, k = rng.integers(0, n, size=3)
        x, y, z = space.points[i], space.points[j], space.points[k]
        if abs(d(x, y) - d(y, x)) > 1e-9 * (1.0 + abs(d(x, y))):
            raise ValueError("pseudometric is not symmetric")
        if d(x, z) > d(x, y) + d(y, z) + 1e-9:
            raise ValueError("pseudometric violates the triangle inequality")


# -- majorants ----------------------------------------------------------


@dataclass(frozen=True)
class MajorantFn:
    """Strictly increasing threshold phi with phi(0) = 0.

    kind "power" is phi(t) = (p t)^s; kind "scaled_power" is t^s / H;
    kind "table" interpolates a strictly increasing table.
    """

    kind: str
    params: tuple

    @classmethod
    def power(cls, p: float, s: float) -> "MajorantFn":
        if p <= 0 or s <= 0:
            raise ValueError("power majorant needs p > 0, s > 0")
        return cls("power", (float(p), float(s)))

    @classmethod
    def scaled_power(cls, H: float, s: float) -> "MajorantFn":
        if H <= 0 or s <= 0:
            raise ValueError("scaled power majorant needs H > 0, s > 0")
        return cls("scaled_power", (float(H), float(s)))

    @classmethod
    def table(cls, ts, vals) -> "MajorantFn":
        ts = tuple(float(t) for t in ts)
        vals = tuple(float(v) for v in vals)
        if len(ts) != len(vals) or len(ts) < 2:
            raise ValueError("table needs matching ts/vals of length >= 2")
        if ts[0] != 0.0 or vals[0] != 0.0:
            raise ValueError("table must start at (0, 0)")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("table values must be strictly increasing")
        return cls("table", (ts, vals))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            p, s = self.params
            return (p * t) ** s
        if self.kind == "scaled_power":
            H, s = self.params
            return t ** s / H
        ts, vals = self.params
        return np.interp(t, ts, vals)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "power":
            p, s = self.params
            return y ** (1.0 / s) / p
        if self.kind == "scaled_power":
            H, s = self.params
            return (y * H) ** (1.0 / s)
        ts, vals = self.params
        return np.interp(y, vals, ts)

    def validate(self, total_mass: float, diam: float) -> None:
        if float(self(0.0)) != 0.0:
            raise ValueError("majorant must vanish at 0")
        # the limit condition phi(t) > A for large t, checked at the larger
        # of 10*diam and a hair past phi^{-1}(A)
        horizon = max(10.0 * diam, 1.01 * float(self.inverse(total_mass)),
                      1e-12)
        if float(self(horizon)) <= total_mass:
            raise ValueError("majorant never exceeds the total mass")


# -- the regularity threshold tau ---------------------------------------


def tau_many(space: DiscreteMeasureSpace, phi: MajorantFn,
             queries: np.ndarray) -> np.ndarray:
    """Exact tau at each query point, by the step-function scan.

    xi(B_t(x)) jumps only at the atom distances; on each step interval
    [d_j, d_{j+1}) the condition xi >= phi(t) holds up to phi^{-1}(level_j),
    so tau is the largest valid min(phi^{-1}(level_j), d_{j+1}).
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    keep = space.masses > 0
    atoms = space.points[keep]
    masses = space.masses[keep]
    if len(atoms) == 0:
        return np.zeros(len(queries))
    if space.metric is None:
        D = np.linalg.norm(queries[:, None, :] - atoms[None, :, :], axis=2)
    else:
        D = np.array([space.dist_from(q, atoms) for q in queries])
    order = np.argsort(D, axis=1)
    Ds = np.take_along_axis(D, order, axis=1)
    levels = np.cumsum(masses[order], axis=1)
    d_next = np.concatenate([Ds[:, 1:], np.full((len(queries), 1), np.inf)],
                            axis=1)
    inv = phi.inverse(levels)
    valid = inv >= Ds
    cand = np.where(valid, np.minimum(inv, d_next), 0.0)
    return np.max(cand, axis=1, initial=0.0)


def tau(space: DiscreteMeasureSpace, phi: MajorantFn, x) -> float:
    """tau(x) = sup { t : xi(B_t(x)) >= phi(t) }, exact for atomic measures."""
    return float(tau_many(space, phi, np.atleast_1d(np.asarray(x, dtype=float))[None, :])[0])


# -- the greedy exclusion-ball construction -----------------------------


@dataclass
class CoverOutput:
    """Balls emitted by the greedy construction, with its audit trail."""

    centers: np.ndarray
    radii: np.ndarray
    taus: np.ndarray
    gamma: float
    alpha: float
    beta: float
    budget_used: float

    @property
    def count(self) -> int:
        return len(self.radii)

    def covers(self, points: np.ndarray) -> np.ndarray:
        """Mask of points lying in the union of the closed balls."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        mask = np.zeros(len(pts), dtype=bool)
        for c, r in zip(self.centers, self.radii):
            mask |= np.linalg.norm(pts - c, axis=1) <= r
        return mask

    def to_json(self) -> dict:
        return {
            "centers": [list(map(float, c)) for c in self.centers],
            "radii": [float(r) for r in self.radii],
            "taus": [float(t) for t in self.taus],
            "gamma": self.gamma,
            "alpha": self.alpha,
            "beta": self.beta,
            "budget_used": self.budget_used,
        }


def greedy_ball_cover(space: DiscreteMeasureSpace, phi: MajorantFn,
                      gamma: float = DEFAULT_GAMMA,
                      alpha: float = DEFAULT_ALPHA,
                      beta: float = DEFAULT_BETA,
                      probes: np.ndarray | None = None) -> CoverOutput:
    """Cover all irregular candidate points by exclusion balls.

    Candidates are the atoms plus any caller-supplied probe points; for
    atomic measures this makes the construction exact at the atoms, and
    probes extend the regularity guarantee to off-atom points.  The
    witness at each step is the candidate of maximal tau, ties broken by
    lowest index, so runs are reproducible.
    """
    if not 0.0 < gamma < 0.5:
        raise ValueError("gamma must lie in (0, 1/2)")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if beta <= 2.0:
        raise ValueError("beta must exceed 2")
    if gamma >= alpha / beta:
        raise ValueError("parameters must satisfy gamma < alpha / beta")
    phi.validate(space.A, space.extent())

    cands = space.points
    if probes is not None and len(probes) > 0:
        cands = np.concatenate([cands, np.atleast_2d(np.asarray(probes,
                                                                dtype=float))])
    taus_all = tau_many(space, phi, cands)
    uncovered = np.ones(len(cands), dtype=bool)

    centers, radii, taus = [], [], []
    for _ in range(len(cands) + 1):
        active = uncovered & (taus_all > 0.0)
        if not np.any(active):
            break
        masked = np.where(active, taus_all, -np.inf)
        k = int(np.argmax(masked))
        tau_k = taus_all[k]
        t_k = beta * tau_k
        x_k = cands[k]
        centers.append(x_k)
        radii.append(t_k)
        taus.append(tau_k)
        if space.metric is None:
            uncovered &= np.linalg.norm(cands - x_k, axis=1) > t_k
        else:
            uncovered &= space.dist_from(x_k, cands) > t_k

    centers = np.array(centers) if centers else np.zeros((0, cands.shape[1]))
    radii = np.array(radii)
    taus = np.array(taus)
    budget = float(np.sum(phi(gamma * radii))) if len(radii) else 0.0
    return CoverOutput(centers=centers, radii=radii, taus=taus, gamma=gamma,
                       alpha=alpha, beta=beta, budget_used=budget)


def verify_cover(space: DiscreteMeasureSpace, phi: MajorantFn,
                 cover: CoverOutput,
                 probes: np.ndarray | None = None) -> dict:
    """Audit the construction's postconditions on a finished cover."""
    checks = {
        "budget_below_total_mass": (cover.budget_used < space.A
                                    if cover.count else True),
        "radii_nonincreasing": bool(np.all(np.diff(cover.radii) <= 1e-12))
        if cover.count else True,
        "ball_count_le_atoms": cover.count <= int(np.sum(space.masses > 0)),
    }
    cands = space.points
    if probes is not None and len(probes) > 0:
        cands = np.concatenate([cands, np.atleast_2d(np.asarray(probes,
                                                                dtype=float))])
    outside = ~cover.covers(cands)
    taus_out = tau_many(space, phi, cands[outside]) if np.any(outside) else \
        np.zeros(0)
    checks["uncovered_points_regular"] = bool(np.all(taus_out == 0.0))
    # each tau-ball around its witness carries positive mass
    meets = []
    for c, t in zip(cover.centers, cover.taus):
        d = space.dist_from(c, space.points[space.masses > 0])
        meets.append(bool(np.any(d <= t + 1e-12)))
    checks["tau_balls_meet_support"] = all(meets)
    checks["emitted_balls_cover_support"] = bool(np.all(
        cover.covers(space.points[space.masses > 0]))) if cover.count else \
        bool(np.sum(space.masses > 0) == 0)
    return checks


# -- log-potentials ------------------------------------------------------


def potential(space: DiscreteMeasureSpace, x) -> float:
    """u(x) = sum m_i ln d(x, x_i); -inf when positive mass sits at x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    keep = space.masses > 0
    if not np.any(keep):
        return 0.0
    d = space.dist_from(x, space.points[keep])
    if np.any(d == 0.0):
        return -math.inf
    return float(np.sum(space.masses[keep] * np.log(d)))


def potential_many(space: DiscreteMeasureSpace,
                   queries: np.ndarray) -> np.ndarray:
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    keep = space.masses > 0
    if not np.any(keep):
        return np.zeros(len(queries))
    atoms = space.points[keep]
    masses = space.masses[keep]
    D = np.linalg.norm(queries[:, None, :] - atoms[None, :, :], axis=2)
    out = np.full(len(queries), -np.inf)
    ok = np.all(D > 0.0, axis=1)
    with np.errstate(divide="ignore"):
        out[ok] = np.log(D[ok]) @ masses
    return out


# -- corollary: radius-sum budget + potential lower bound -----------------


@dataclass
class PotentialBoundReport:
    cover: CoverOutput
    radius_sum_s: float
    radius_cap: float
    lower_bound: float
    num_checked: int
    violations: list
    worst_margin: float | None

    @property
    def ok(self) -> bool:
        return self.radius_sum_s < self.radius_cap and not self.violations


def potential_bound_verify(space: DiscreteMeasureSpace, H: float, s: float,
                           gamma: float = DEFAULT_GAMMA,
                           grid: np.ndarray | None = None,
                           alpha: float = DEFAULT_ALPHA,
                           beta: float = DEFAULT_BETA,
                           rtol: float = 1e-9) -> PotentialBoundReport:
    """Emit exclusion balls for the total mass k and certify on a grid that

        sum r_j^s < (H / gamma)^s / s   and   u(x) >= k ln(H / e)

    at every grid point outside the balls.  The majorant is (p t)^s with
    p = (k s)^{1/s} / H; grid points are included among the construction's
    candidates so every uncovered grid point is certifiably regular.
    """
    k = space.A
    cap = (H / gamma) ** s / s
    if k == 0.0:
        empty = CoverOutput(np.zeros((0, space.points.shape[1])),
                            np.zeros(0), np.zeros(0), gamma, alpha, beta, 0.0)
        return PotentialBoundReport(empty, 0.0, cap, 0.0,
                                    0 if grid is None else len(grid), [], None)
    p = (k * s) ** (1.0 / s) / H
    phi = MajorantFn.power(p, s)
    cover = greedy_ball_cover(space, phi, gamma=gamma, alpha=alpha, beta=beta,
                              probes=grid)
    radius_sum_s = float(np.sum(cover.radii ** s))
    bound = k * math.log(H / math.e)
    violations = []
    worst = None
    checked = 0
    if grid is not None and len(grid):
        grid = np.atleast_2d(np.asarray(grid, dtype=float))
        outside = ~cover.covers(grid)
        checked = int(np.sum(outside))
        u = potential_many(space, grid[outside])
        margins = u - bound
        worst = float(margins.min()) if len(margins) else None
        grace = rtol * (1.0 + abs(bound))
        bad = margins < -grace
        for pt, m in zip(grid[outside][bad], margins[bad]):
            violations.append({"point": list(map(float, pt)),
                               "margin": float(m)})
    return PotentialBoundReport(cover=cover, radius_sum_s=radius_sum_s,
                                radius_cap=cap, lower_bound=bound,
                                num_checked=checked, violations=violations,
                                worst_margin=worst)


# -- corollary: exclusion disks for univariate polynomials ---------------


def polynomial_zeros(f: Polynomial, polish_steps: int = 3) -> np.ndarray:
    """Zeros of a univariate polynomial via the companion matrix, polished
    by a few Newton steps."""
    if f.num_vars != 1:
        raise ValueError("zeros are computed for univariate polynomials only")
    coeffs = np.asarray(f.coeffs, dtype=complex)
    nz = np.nonzero(np.abs(coeffs) > 0)[0]
    if len(nz) == 0 or nz.max() == 0:
        return np.zeros(0, dtype=complex)
    deg = int(nz.max())
    if deg > MAX_CARTAN_DEGREE:
        raise ValueError(f"degree {deg} exceeds the cap {MAX_CARTAN_DEGREE}")
    roots = np.roots(coeffs[: deg + 1][::-1])
    df = f.partial(0)
    for _ in range(polish_steps):
        fz = f.eval_many(roots)
        dfz = df.eval_many(roots)
        ok = np.abs(dfz) > 1e-14
        roots[ok] = roots[ok] - fz[ok] / dfz[ok]
    return roots


def _circle_max_abs(f: Polynomial, radius: float, samples: int = 4096) -> float:
    th = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    z = radius * np.exp(1j * th)
    vals = np.abs(f.eval_many(z))
    best = float(vals.max())
    j = int(np.argmax(vals))
    lo = th[j] - 2.0 * math.pi / samples
    hi = th[j] + 2.0 * math.pi / samples
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi

    def val(theta: float) -> float:
        return float(abs(f.eval_many(np.array([radius * np.exp(1j * theta)]))[0]))

    for _ in range(40):
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        if val(c) > val(d):
            b = d
        else:
            a = c
    return max(best, val(0.5 * (a + b)))


@dataclass
class CartanDiskReport:
    disks: list                # (complex center, radius) pairs
    zeros: np.ndarray
    eta: float
    R: float
    H_eta: float
    log_max: float             # ln M(2eR)
    lower_bound: float         # -H(eta) * ln M(2eR)
    radius_sum: float
    num_checked: int
    violations: list
    worst_margin: float | None
    half_radius_covers_zeros: bool

    @property
    def ok(self) -> bool:
        return (self.radius_sum <= 4.0 * self.eta * self.R
                and not self.violations and self.half_radius_covers_zeros)


def cartan_exclusion_disks(f: Polynomial, R: float, eta: float,
                           gamma: float = DEFAULT_GAMMA,
                           alpha: float = DEFAULT_ALPHA,
                           beta: float = DEFAULT_BETA,
                           grid: np.ndarray | None = None,
                           rtol: float = 1e-9) -> CartanDiskReport:
    """Exclusion disks for ln|f| on |z| <= R, for univariate f with f(0) = 1.

    The zeros of f in |z| <= 2R carry unit masses and the ball construction
    runs with phi(t) = (p t) and p = (#zeros) / (4 gamma eta R), so the disk
    radii satisfy sum r_i <= 4 eta R.  Off the disks, with gamma = 1/3, the
    potential bound chains into

        ln|f(z)| >= -H(eta) ln M(2eR),   H(eta) = 2 + ln(3e / (2 eta)),

    which is verified on the supplied grid (grid points participate as
    construction candidates, so uncovered ones are certifiably regular).
    """
    if f.num_vars != 1:
        raise ValueError("univariate polynomials only")
    if not 0.0 < eta <= 1.5 * math.e:
        raise ValueError("eta must lie in (0, 3e/2]")
    if R <= 0:
        raise ValueError("R must be positive")
    f0 = f.eval_many(np.array([0.0 + 0.0j]))[0]
    if abs(f0 - 1.0) > 1e-12:
        raise ValueError(f"f(0) must equal 1 (got {f0}); normalize caller-side")

    H_eta = 2.0 + math.log(1.5 * math.e / eta)
    M = _circle_max_abs(f, 2.0 * math.e * R)
    M = max(M, 1.0)  # f(0) = 1 forces M >= 1; guard sampling slack
    log_max = math.log(M)
    lower = -H_eta * log_max

    roots = polynomial_zeros(f)
    zeros_in = roots[np.abs(roots) <= 2.0 * R]

    grid_pts = None
    if grid is not None and len(grid):
        grid = np.asarray(grid)
        if np.iscomplexobj(grid):
            grid_pts = np.column_stack([grid.real, grid.imag])
        else:
            grid_pts = np.atleast_2d(grid.astype(float))

    disks: list = []
    radius_sum = 0.0
    cover = None
    if len(zeros_in):
        space = DiscreteMeasureSpace.from_complex(zeros_in)
        H_c = 4.0 * gamma * eta * R
        phi = MajorantFn.power(len(zeros_in) / H_c, 1.0)
        cover = greedy_ball_cover(space, phi, gamma=gamma, alpha=alpha,
                                  beta=beta, probes=grid_pts)
        disks = [(complex(c[0], c[1]), float(r))
                 for c, r in zip(cover.centers, cover.radii)]
        radius_sum = float(np.sum(cover.radii))
        # A ball can swallow a zero in its outer half, where the halved
        # disk misses it.  Such zeros get their own disks, paid for out
        # of the strict slack left in the radius-sum budget; excluding
        # more points never weakens the off-disk lower bound.
        stranded = [z for z in zeros_in
                    if not any(abs(z - c) <= r / 2.0 for c, r in disks)]
        slack = 4.0 * eta * R - radius_sum
        if stranded and slack > 0.0:
            taus_z = tau_many(space, phi,
                              np.column_stack([[z.real for z in stranded],
                                               [z.imag for z in stranded]]))
            share = 0.5 * slack / len(stranded)
            for z, tz in zip(stranded, taus_z):
                r_extra = min(beta * float(tz), share)
                disks.append((complex(z), r_extra))
                radius_sum += r_extra

    violations = []
    worst = None
    checked = 0
    if grid_pts is not None:
        zs = grid_pts[:, 0] + 1j * grid_pts[:, 1]
        sel = np.abs(zs) <= R
        for c, r in disks:
            sel &= np.abs(zs - c) > r
        checked = int(np.sum(sel))
        vals = np.abs(f.eval_many(zs[sel]))
        with np.errstate(divide="ignore"):
            logs = np.log(vals)
        margins = logs - lower
        worst = float(margins.min()) if len(margins) else None
        grace = rtol * (1.0 + abs(lower))
        bad = margins < -grace
        for z, m in zip(zs[sel][bad], margins[bad]):
            violations.append({"point": [float(z.real), float(z.imag)],
                               "margin": float(m)})

    half_ok = True
    for z in zeros_in:
        if not any(abs(z - c) <= r / 2.0 + 1e-12 for c, r in disks):
            half_ok = False
            break

    return CartanDiskReport(disks=disks, zeros=zeros_in, eta=eta, R=R,
                            H_eta=H_eta, log_max=log_max, lower_bound=lower,
                            radius_sum=radius_sum, num_checked=checked,
                            violations=violations, worst_margin=worst,
                            half_radius_covers_zeros=half_ok)
