"""Dense multivariate polynomials with total-degree storage.

Carrier type for every polynomial quantity in the library: Chebyshev
polynomials T_k, gradients D^a p, and the k-th forward difference

    delta_h^k f(x) = sum_{j=0..k} (-1)^(k-j) C(k,j) f(x + j*h).

Coefficients are stored densely against the graded list of multi-indices
with |a| <= degree_bound.  Real and complex polynomials share the type;
the scalar kind is the dtype of the coefficient array (complex is used
only for univariate polynomials here).  Degrees stay small (<= ~12), so
dense storage and naive convolution multiplication are the right tools.

All instances are immutable after construction and all operations are
pure; sharing across threads is safe.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

__all__ = [
    "Polynomial",
    "multi_indices",
    "binomial",
    "chebyshev",
    "finite_difference",
]

_PASCAL_MAX = 30


@lru_cache(maxsize=None)
def _pascal_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _pascal_row(n - 1)
    return tuple(
        (prev[j - 1] if j > 0 else 0) + (prev[j] if j < n else 0)
        for j in range(n + 1)
    )


def binomial(n: int, k: int) -> int:
    """C(n, k) by the Pascal recurrence, exact integers, n <= 30."""
    if n < 0 or n > _PASCAL_MAX:
        raise ValueError(f"binomial supports 0 <= n <= {_PASCAL_MAX}, got {n}")
    if k < 0 or k > n:
        return 0
    return _pascal_row(n)[k]


@lru_cache(maxsize=None)
def multi_indices(num_vars: int, max_degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent multi-indices with |a| <= max_degree, graded-lex order.

    Graded order means the indices of degree <= d form a prefix of the
    list for any larger bound, which makes re-embedding coefficient
    arrays a zero-pad.
    """
    if num_vars < 1:
        raise ValueError("num_vars must be positive")
    out = []
    for total in range(max_degree + 1):
        block = [
            alpha
            for alpha in itertools.product(range(total + 1), repeat=num_vars)
            if sum(alpha) == total
        ]
        out.extend(sorted(block))
    return tuple(out)


@lru_cache(maxsize=None)
def _index_positions(num_vars: int, max_degree: int) -> dict:
    return {a: i for i, a in enumerate(multi_indices(num_vars, max_degree))}


class Polynomial:
    """Immutable dense polynomial sum_a c_a x^a with |a| <= degree_bound."""

    __slots__ = ("num_vars", "degree_bound", "coeffs")

    def __init__(self, num_vars: int, degree_bound: int, coeffs):
        if num_vars < 1:
            raise ValueError("num_vars must be positive")
        if degree_bound < 0:
            raise ValueError("degree_bound must be non-negative")
        idx = multi_indices(num_vars, degree_bound)
        if isinstance(coeffs, dict):
            arr = np.zeros(len(idx), dtype=complex)
            pos = _index_positions(num_vars, degree_bound)
            for alpha, c in coeffs.items():
                alpha = tuple(int(e) for e in alpha)
                if len(alpha) != num_vars:
                    raise ValueError(f"multi-index {alpha} has wrong arity")
                if any(e < 0 for e in alpha) or sum(alpha) > degree_bound:
                    raise ValueError(f"multi-index {alpha} outside degree bound")
                arr[pos[alpha]] += c
            if np.all(arr.imag == 0.0):
                arr = arr.real.copy()
        else:
            arr = np.asarray(coeffs)
            if arr.shape != (len(idx),):
                raise ValueError(
                    f"expected {len(idx)} coefficients for n={num_vars}, "
                    f"degree<={degree_bound}, got shape {arr.shape}"
                )
            arr = arr.astype(complex if np.iscomplexobj(arr) else float)
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "degree_bound", degree_bound)
        object.__setattr__(self, "coeffs", arr)
        arr.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int = 1) -> "Polynomial":
        return cls(num_vars, 0, np.zeros(1))

    @classmethod
    def constant(cls, value, num_vars: int = 1) -> "Polynomial":
        return cls(num_vars, 0, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, i: int = 0, num_vars: int = 1) -> "Polynomial":
        alpha = tuple(1 if j == i else 0 for j in range(num_vars))
        return cls(num_vars, 1, {alpha: 1.0})

    @classmethod
    def from_dict(cls, num_vars: int, coeffs: dict) -> "Polynomial":
        deg = max((sum(a) for a in coeffs), default=0)
        return cls(num_vars, deg, coeffs)

    @classmethod
    def random(cls, rng, num_vars: int, degree: int, scale: float = 1.0,
               complex_coeffs: bool = False) -> "Polynomial":
        m = len(multi_indices(num_vars, degree))
        c = rng.uniform(-scale, scale, size=m)
        if complex_coeffs:
            c = c + 1j * rng.uniform(-scale, scale, size=m)
        return cls(num_vars, degree, c)

    # -- views --------------------------------------------------------

    @property
    def exponents(self) -> np.ndarray:
        return np.array(multi_indices(self.num_vars, self.degree_bound), dtype=int)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.coeffs)

    def coeffs_dict(self, tol: float = 0.0) -> dict:
        idx = multi_indices(self.num_vars, self.degree_bound)
        return {a: c for a, c in zip(idx, self.coeffs) if abs(c) > tol}

    def degree(self) -> int:
        """Actual total degree (0 for the zero polynomial)."""
        idx = multi_indices(self.num_vars, self.degree_bound)
        deg = 0
        for a, c in zip(idx, self.coeffs):
            if c != 0:
                deg = max(deg, sum(a))
        return deg

    # -- evaluation ---------------------------------------------------

    def eval_many(self, points) -> np.ndarray:
        """Evaluate at an (N, n) array of points (or (N,) when n == 1)."""
        x = np.asarray(points)
        if self.num_vars == 1 and x.ndim == 1:
            x = x[:, None]
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.num_vars:
            raise ValueError(
                f"points have dimension {x.shape[1]}, polynomial has "
                f"{self.num_vars} variables"
            )
        exps = self.exponents
        monomials = np.prod(
            np.power(x[:, None, :], exps[None, :, :]), axis=2
        )
        return monomials @ self.coeffs

    def eval(self, x):
        """Evaluate at a single point (scalar for n == 1)."""
        x = np.atleast_1d(np.asarray(x))
        if x.shape != (self.num_vars,):
            raise ValueError(
                f"point has shape {x.shape}, expected ({self.num_vars},)"
            )
        return self.eval_many(x[None, :])[0]

    __call__ = eval

    # -- arithmetic ---------------------------------------------------

    def _embedded(self, degree_bound: int) -> np.ndarray:
        m = len(multi_indices(self.num_vars, degree_bound))
        out = np.zeros(m, dtype=self.coeffs.dtype)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def __add__(self, other):
        other = self._coerce(other)
        d = max(self.degree_bound, other.degree_bound)
        return Polynomial(self.num_vars, d, self._embedded(d) + other._embedded(d))

    def __sub__(self, other):
        other = self._coerce(other)
        d = max(self.degree_bound, other.degree_bound)
        return Polynomial(self.num_vars, d, self._embedded(d) - other._embedded(d))

    def __neg__(self):
        return Polynomial(self.num_vars, self.degree_bound, -self.coeffs)

    def __rmul__(self, c):
        return self.__mul__(c)

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.num_vars, self.degree_bound, self.coeffs * other)
        other = self._coerce(other)
        d = self.degree_bound + other.degree_bound
        pos = _index_positions(self.num_vars, d)
        dtype = complex if (self.is_complex or other.is_complex) else float
        out = np.zeros(len(multi_indices(self.num_vars, d)), dtype=dtype)
        idx_a = multi_indices(self.num_vars, self.degree_bound)
        idx_b = multi_indices(other.num_vars, other.degree_bound)
        for a, ca in zip(idx_a, self.coeffs):
            if ca == 0:
                continue
            for b, cb in zip(idx_b, other.coeffs):
                if cb == 0:
                    continue
                key = tuple(ea + eb for ea, eb in zip(a, b))
                out[pos[key]] += ca * cb
        return Polynomial(self.num_vars, d, out)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise ValueError("mixed numbers of variables")
            return other
        if np.isscalar(other):
            return Polynomial.constant(other, self.num_vars)
        raise TypeError(f"cannot combine Polynomial with {type(other)!r}")

    # -- calculus -----------------------------------------------------

    def partial(self, i: int) -> "Polynomial":
        """Partial derivative with respect to variable i."""
        if not 0 <= i < self.num_vars:
            raise ValueError(f"variable index {i} out of range")
        d = max(self.degree_bound - 1, 0)
        pos = _index_positions(self.num_vars, d)
        out = np.zeros(len(multi_indices(self.num_vars, d)), dtype=self.coeffs.dtype)
        for a, c in zip(multi_indices(self.num_vars, self.degree_bound), self.coeffs):
            if c == 0 or a[i] == 0:
                continue
            b = tuple(e - 1 if j == i else e for j, e in enumerate(a))
            out[pos[b]] += c * a[i]
        return Polynomial(self.num_vars, d, out)

    def gradient(self) -> list:
        """Vector of partials; degree bound drops by one (0 for constants)."""
        return [self.partial(i) for i in range(self.num_vars)]

    def compose_affine(self, scale, offset) -> "Polynomial":
        """p(s * x + o) with per-coordinate scale s and offset o."""
        scale = np.broadcast_to(np.asarray(scale, dtype=float), (self.num_vars,))
        offset = np.broadcast_to(np.asarray(offset, dtype=float), (self.num_vars,))
        lin = [
            Polynomial(self.num_vars, 1, {
                tuple(1 if j == i else 0 for j in range(self.num_vars)): scale[i],
                (0,) * self.num_vars: offset[i],
            })
            for i in range(self.num_vars)
        ]
        powers = [{0: Polynomial.constant(1.0, self.num_vars)} for _ in lin]
        out = Polynomial.zero(self.num_vars)
        for a, c in zip(multi_indices(self.num_vars, self.degree_bound), self.coeffs):
            if c == 0:
                continue
            term = Polynomial.constant(c, self.num_vars)
            for i, e in enumerate(a):
                if e not in powers[i]:
                    prev = max(k for k in powers[i] if k < e)
                    acc = powers[i][prev]
                    for _ in range(e - prev):
                        acc = acc * lin[i]
                    powers[i][e] = acc
                if e > 0:
                    term = term * powers[i][e]
            out = out + term
        return out


def chebyshev(k: int) -> Polynomial:
    """Chebyshev polynomial T_k via T_{k+1} = 2 x T_k - T_{k-1}."""
    if k < 0:
        raise ValueError("k must be non-negative")
    t_prev = Polynomial.constant(1.0)
    if k == 0:
        return t_prev
    t = Polynomial.variable()
    two_x = 2.0 * Polynomial.variable()
    for _ in range(k - 1):
        t_prev, t = t, two_x * t - t_prev
    return t


def finite_difference(f, k: int, x, h) -> float:
    """k-th forward difference of f at x with step vector h.

    Annihilates polynomials of degree <= k - 1 exactly.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if x.shape != h.shape:
        raise ValueError("x and h must have the same dimension")
    total = 0.0
    for j in range(k + 1):
        sign = -1.0 if (k - j) % 2 else 1.0
        arg = x + j * h
        total += sign * binomial(k, j) * float(f(arg if len(arg) > 1 else arg[0]))
    return total
