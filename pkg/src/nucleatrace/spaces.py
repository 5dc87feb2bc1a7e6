"""Finite dimensional l_p spaces, vectors, and operator norm brackets.

Operator norms between l_p spaces are only cheap in a handful of exact
cases.  Everywhere else this module returns a two-sided bracket: the
lower end is attained by an ascent iterate, the upper end comes from
interpolation between exact endpoints or from dimension-factor routes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .tolerances import slack

__all__ = [
    "AmbientSpace",
    "Vector",
    "OperatorMatrix",
    "NormBracket",
    "vector_norm",
    "dual_exponent",
    "operator_norm",
    "projection_onto_span",
]

_ASCENT_SEED = 0x5EED0F42
_ASCENT_ITERS = 60
_ASCENT_RANDOM_STARTS = 6
_ASCENT_BASIS_STARTS = 8
_SIGN_ENUM_LIMIT = 16
_RANK_CUTOFF = 1e-10


def _check_exponent(p: float) -> float:
    p = float(p)
    if not (p >= 1.0):
        raise ValueError("exponent must satisfy p >= 1")
    return p


@dataclass(frozen=True)
class AmbientSpace:
    """R^dim carrying the l_p norm, 1 <= p <= inf."""

    dim: int
    exponent: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        object.__setattr__(self, "exponent", _check_exponent(self.exponent))

    def dual(self) -> "AmbientSpace":
        return AmbientSpace(self.dim, dual_exponent(self.exponent))


@dataclass(frozen=True)
class Vector:
    """Coordinates tagged with their home space."""

    coords: np.ndarray
    home: AmbientSpace

    def __post_init__(self):
        arr = np.asarray(self.coords, dtype=float)
        if arr.ndim != 1 or arr.size != self.home.dim:
            raise ValueError("coordinate length must match the home space")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "coords", arr)

    def norm(self) -> float:
        return vector_norm(self)


def _p_norm(arr: np.ndarray, p: float) -> float:
    if arr.size == 0:
        return 0.0
    a = np.abs(arr)
    if math.isinf(p):
        return float(np.max(a))
    if p == 1.0:
        return float(np.sum(a))
    if p == 2.0:
        return float(np.linalg.norm(arr))
    m = float(np.max(a))
    if m == 0.0:
        return 0.0
    # scale out the max to dodge overflow for large p
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def vector_norm(v: Vector) -> float:
    """l_p norm of a vector in its home space."""
    return _p_norm(v.coords, v.home.exponent)


def dual_exponent(p: float) -> float:
    """Conjugate exponent: 1/p + 1/p' = 1, with 1 and inf swapping."""
    p = _check_exponent(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


class NormBracket(NamedTuple):
    """Certified enclosure lower <= norm <= upper."""

    lower: float
    upper: float


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense matrix acting between two ambient spaces."""

    entries: np.ndarray
    domain: AmbientSpace
    codomain: AmbientSpace

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2:
            raise ValueError("entries must be a matrix")
        if arr.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError("matrix shape must be (codomain dim, domain dim)")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls, space: AmbientSpace) -> "OperatorMatrix":
        return cls(np.eye(space.dim), space, space)

    def apply(self, v) -> Vector:
        coords = v.coords if isinstance(v, Vector) else np.asarray(v, dtype=float)
        if isinstance(v, Vector) and v.home.dim != self.domain.dim:
            raise ValueError("vector dimension mismatch")
        return Vector(self.entries @ coords, self.codomain)

    def compose(self, inner: "OperatorMatrix") -> "OperatorMatrix":
        """self after inner."""
        if inner.codomain.dim != self.domain.dim:
            raise ValueError("composition dimension mismatch")
        return OperatorMatrix(
            self.entries @ inner.entries, inner.domain, self.codomain
        )

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))


def _dual_map(z: np.ndarray, p: float) -> np.ndarray:
    """Unit l_p vector x maximizing <z, x>, so that <z, x> = ||z||_{p'}."""
    if math.isinf(p):
        out = np.sign(z)
        out[out == 0.0] = 1.0
        return out
    if p == 1.0:
        out = np.zeros_like(z)
        i = int(np.argmax(np.abs(z)))
        out[i] = math.copysign(1.0, z[i]) if z[i] != 0.0 else 1.0
        return out
    a = np.abs(z)
    m = float(np.max(a))
    if m == 0.0:
        out = np.zeros_like(z)
        out[0] = 1.0
        return out
    y = np.sign(z) * (a / m) ** (dual_exponent(p) - 1.0)
    return y / _p_norm(y, p)


def _ascent_lower(A: np.ndarray, p_in: float, p_out: float) -> float:
    """Attained lower bound by multi-start alternating maximization."""
    n_out, n_in = A.shape
    q_dual = dual_exponent(p_out)
    starts: list[np.ndarray] = []
    col_norms = np.linalg.norm(A, axis=0)
    order = np.argsort(-col_norms)
    for j in order[: min(_ASCENT_BASIS_STARTS, n_in)]:
        e = np.zeros(n_in)
        e[j] = 1.0
        starts.append(e)
    starts.append(np.ones(n_in))
    rng = np.random.default_rng(_ASCENT_SEED)
    for _ in range(_ASCENT_RANDOM_STARTS):
        starts.append(rng.standard_normal(n_in))
    best = 0.0
    for x0 in starts:
        nx = _p_norm(x0, p_in)
        if nx == 0.0:
            continue
        x = x0 / nx
        for _ in range(_ASCENT_ITERS):
            y = A @ x
            val = _p_norm(y, p_out) / _p_norm(x, p_in)
            if val > best:
                best = val
            if val == 0.0:
                break
            g = A.T @ _dual_map(y, q_dual)
            if _p_norm(g, dual_exponent(p_in)) == 0.0:
                break
            x_new = _dual_map(g, p_in)
            if np.allclose(x_new, x, rtol=0.0, atol=1e-15):
                x = x_new
                break
            x = x_new
        y = A @ x
        val = _p_norm(y, p_out) / _p_norm(x, p_in)
        if val > best:
            best = val
    return best


def _exact_norm(A: np.ndarray, p_in: float, p_out: float) -> float | None:
    """Closed-form operator norm where one is known, else None."""
    n_out, n_in = A.shape
    if p_in == 1.0:
        return max(_p_norm(A[:, j], p_out) for j in range(n_in))
    if p_in == 2.0 and p_out == 2.0:
        return float(np.linalg.norm(A, 2))
    if math.isinf(p_in) and math.isinf(p_out):
        return float(np.max(np.sum(np.abs(A), axis=1)))
    if math.isinf(p_in) and n_in <= _SIGN_ENUM_LIMIT:
        # sign vertices of the unit cube, first coordinate pinned by symmetry
        best = 0.0
        for mask in range(2 ** max(n_in - 1, 0)):
            signs = np.ones(n_in)
            for j in range(n_in - 1):
                if (mask >> j) & 1:
                    signs[j + 1] = -1.0
            best = max(best, _p_norm(A @ signs, p_out))
        return best
    return None


def _interpolation_upper(A: np.ndarray, p: float) -> float | None:
    """Riesz-Thorin style bound for p -> p between exact endpoints."""
    if 1.0 < p < 2.0:
        n11 = _exact_norm(A, 1.0, 1.0)
        n22 = _exact_norm(A, 2.0, 2.0)
        theta = 2.0 * (1.0 - 1.0 / p)
        return float(n11 ** (1.0 - theta) * n22 ** theta)
    if 2.0 < p < math.inf:
        n22 = _exact_norm(A, 2.0, 2.0)
        ninf = _exact_norm(A, math.inf, math.inf)
        theta = 1.0 - 2.0 / p
        return float(n22 ** (1.0 - theta) * ninf ** theta)
    return None


def _dimension_factor_upper(A: np.ndarray, p_in: float, p_out: float) -> float:
    """min over exact routes (a, b) of the norm inflated by inclusion factors.

    Moving the domain exponent from p_in down to a costs
    n_in**max(1/a - 1/p_in, 0); moving the codomain from b to p_out costs
    n_out**max(1/p_out - 1/b, 0).
    """
    n_out, n_in = A.shape
    routes = [(1.0, 1.0), (2.0, 2.0), (math.inf, math.inf), (1.0, 2.0),
              (1.0, math.inf), (1.0, p_out)]
    if n_in <= _SIGN_ENUM_LIMIT:
        routes.append((math.inf, p_out))
    inv = lambda x: 0.0 if math.isinf(x) else 1.0 / x
    best = math.inf
    for a, b in routes:
        base = _exact_norm(A, a, b)
        if base is None:
            continue
        f_in = n_in ** max(inv(a) - inv(p_in), 0.0)
        f_out = n_out ** max(inv(p_out) - inv(b), 0.0)
        best = min(best, f_in * base * f_out)
    return best


def operator_norm(A: OperatorMatrix) -> NormBracket:
    """Bracket for the operator norm of A between its ambient spaces.

    Exact cases (domain exponent 1; the 2 -> 2 case; domain exponent inf
    with codomain inf, or with at most 16 columns) return a degenerate
    bracket.  Otherwise the lower end is attained by ascent and the upper
    end is the best of interpolation and dimension-factor routes.
    """
    mat = A.entries
    p_in = A.domain.exponent
    p_out = A.codomain.exponent
    exact = _exact_norm(mat, p_in, p_out)
    if exact is not None:
        return NormBracket(exact, exact)
    lower = _ascent_lower(mat, p_in, p_out)
    upper = _dimension_factor_upper(mat, p_in, p_out)
    if p_in == p_out:
        interp = _interpolation_upper(mat, p_in)
        if interp is not None:
            upper = min(upper, interp)
    if lower > upper:
        # attained iterate can overshoot a tight upper bound by rounding only
        if lower - upper > slack(max(1.0, upper)):
            raise RuntimeError("norm bracket crossed beyond rounding slack")
        lower = upper
    return NormBracket(lower, upper)


def projection_onto_span(
    vectors: Sequence[Vector], space: AmbientSpace
) -> tuple[OperatorMatrix, NormBracket]:
    """Orthogonal projection onto the span of the given vectors.

    The span is orthonormalized by singular value decomposition with
    singular values below 1e-10 of the largest treated as rank noise.
    The returned bracket encloses the projection's operator norm on the
    given space; on l_2 it is exactly (1, 1).
    """
    if len(vectors) == 0:
        raise ValueError("projection requires at least one vector")
    for v in vectors:
        if v.home.dim != space.dim:
            raise ValueError("vector dimension mismatch")
    M = np.stack([v.coords for v in vectors], axis=1)
    U, sing, _ = np.linalg.svd(M, full_matrices=False)
    if sing.size == 0 or sing[0] == 0.0:
        raise ValueError("span is degenerate after rank filtering")
    r = int(np.sum(sing > _RANK_CUTOFF * sing[0]))
    Q = U[:, :r]
    P = OperatorMatrix(Q @ Q.T, space, space)
    if space.exponent == 2.0:
        return P, NormBracket(1.0, 1.0)
    return P, operator_norm(P)
