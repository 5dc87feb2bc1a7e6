"""Finite Lorentz sequence arithmetic.

Sequences are finite real vectors read as the leading terms of a sequence
that is zero beyond the stored length.  The module computes decreasing
rearrangements, Lorentz quasi-norms, the Holder-type bound for pointwise
products against summable sequences, a product law check across index
pairs, and a factorization of a non-increasing sequence through l_1 times
a weak-type tail, with an exact reconstruction certificate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tolerances import slack

__all__ = [
    "FiniteSequence",
    "LorentzIndex",
    "DecayFamily",
    "FactorizationCertificate",
    "ProductLawReport",
    "decreasing_rearrangement",
    "lorentz_quasi_norm",
    "holder_product_bound",
    "sharpness_witness",
    "product_law_check",
    "factor_l1_lorentz",
]


def as_values(a) -> np.ndarray:
    """Coerce a FiniteSequence or array-like to a 1-d float array."""
    if isinstance(a, FiniteSequence):
        return a.values
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        raise ValueError("expected a one dimensional sequence")
    return arr


@dataclass(frozen=True)
class FiniteSequence:
    """A finite real sequence, zero beyond its stored length."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("expected a one dimensional sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sequence entries must be finite")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def abs(self) -> "FiniteSequence":
        return FiniteSequence(np.abs(self.values))


@dataclass(frozen=True)
class LorentzIndex:
    """Index pair (p, q) of a Lorentz sequence space l_{p,q}.

    p in (0, inf], q in (0, inf].  The pairing p = inf with finite q is
    rejected: the weight k**(1/p - 1/q) would then sum a negative power
    against a bounded rearrangement and the expression is not a norm of
    the intended family.  small_o selects the subspace of sequences whose
    weighted rearrangement tends to zero rather than merely staying
    bounded; it only changes certificate reporting, not the norm value.
    """

    p: float
    q: float = math.inf
    small_o: bool = False

    def __post_init__(self):
        if not (self.p > 0):
            raise ValueError("p must be positive")
        if not (self.q > 0):
            raise ValueError("q must be positive")
        if math.isinf(self.p) and not math.isinf(self.q):
            raise ValueError("p = inf requires q = inf")


@dataclass(frozen=True)
class DecayFamily:
    """Power-decay model a_k = c * k**(-beta) truncated at length L."""

    c: float
    beta: float
    truncation: int

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("c must be nonnegative")
        if self.truncation < 1:
            raise ValueError("truncation must be at least 1")

    def sample(self, length: int | None = None) -> FiniteSequence:
        n = self.truncation if length is None else int(length)
        if n < 1:
            raise ValueError("length must be at least 1")
        k = np.arange(1, n + 1, dtype=float)
        return FiniteSequence(self.c * k ** (-self.beta))


def _rearranged(arr: np.ndarray) -> np.ndarray:
    return np.sort(np.abs(arr))[::-1]


def decreasing_rearrangement(a) -> FiniteSequence:
    """Absolute values sorted in non-increasing order.

    Parameters
    ----------
    a : FiniteSequence or array-like
        Input sequence.

    Returns
    -------
    FiniteSequence
        The rearranged sequence, same length as the input.
    """
    return FiniteSequence(_rearranged(as_values(a)))


def lorentz_quasi_norm(a, index: LorentzIndex) -> float:
    """Lorentz quasi-norm of a finite sequence.

    For finite q this is (sum_k (k**(1/p - 1/q) a*_k)**q)**(1/q) over the
    stored length, where a* is the decreasing rearrangement.  For q = inf
    it is sup_k k**(1/p) a*_k (plain sup norm when p = inf).  The zero
    sequence returns 0.0, and l_{p,p} agrees with the plain l_p norm.

    Parameters
    ----------
    a : FiniteSequence or array-like
    index : LorentzIndex

    Returns
    -------
    float
    """
    star = _rearranged(as_values(a))
    if star.size == 0 or star[0] == 0.0:
        return 0.0
    k = np.arange(1, star.size + 1, dtype=float)
    if math.isinf(index.q):
        if math.isinf(index.p):
            return float(star[0])
        return float(np.max(k ** (1.0 / index.p) * star))
    exponent = 1.0 / index.p - 1.0 / index.q
    terms = k ** exponent * star
    # trailing zeros contribute nothing even for q < 1
    return float(np.sum(terms ** index.q) ** (1.0 / index.q))


def _lp_norm(arr: np.ndarray, p: float) -> float:
    if arr.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(np.abs(arr)))
    return float(np.sum(np.abs(arr) ** p) ** (1.0 / p))


def holder_product_bound(a, b, s: float) -> tuple[float, float, bool]:
    """Evaluate the product bound ||a b||_s <= ||a||_1 ||b||_q.

    Here 1/q = 1/s - 1, so s in (0, 1] and q = s/(1-s), with q = inf at
    s = 1.  The left side is the l_s quasi-norm of the pointwise product
    over the overlap of the two stored lengths (the shorter sequence is
    zero beyond its length).

    Parameters
    ----------
    a, b : FiniteSequence or array-like
    s : float
        Product exponent in (0, 1].

    Returns
    -------
    (lhs, rhs, holds) : tuple of float, float, bool
        holds allows a relative slack of 1e-9 on the right side.
    """
    if not (0.0 < s <= 1.0):
        raise ValueError("s must lie in (0, 1]")
    av = as_values(a)
    bv = as_values(b)
    m = min(av.size, bv.size)
    prod = np.abs(av[:m] * bv[:m])
    lhs = _lp_norm(prod, s)
    q = math.inf if s == 1.0 else s / (1.0 - s)
    rhs = _lp_norm(av, 1.0) * _lp_norm(bv, q)
    return lhs, rhs, bool(lhs <= rhs + slack(rhs))


def sharpness_witness(a, s: float) -> FiniteSequence:
    """Companion sequence making the product bound an equality.

    For s < 1 returns b_k = |a_k|**(1/q) / ||a||_1**(1/q) with
    q = s/(1-s), which has unit l_q norm whenever a is nonzero and turns
    the bound into lhs = rhs = ||a||_1.  For s = 1 the all-ones sequence
    plays the same role against the sup norm.
    """
    av = as_values(a)
    if not (0.0 < s <= 1.0):
        raise ValueError("s must lie in (0, 1]")
    if av.size == 0 or not np.any(av != 0.0):
        raise ValueError("witness requires a nonzero sequence")
    if s == 1.0:
        return FiniteSequence(np.ones_like(av))
    q = s / (1.0 - s)
    l1 = float(np.sum(np.abs(av)))
    return FiniteSequence(np.abs(av) ** (1.0 / q) / l1 ** (1.0 / q))


@dataclass(frozen=True)
class ProductLawReport:
    """Sampled evidence that a pointwise product lands in l_{s,t}."""

    target_p: float
    target_q: float
    truncations: tuple[int, ...]
    norms: tuple[float, ...]
    growth_factor: float
    bounded: bool
    tail_non_increasing: bool | None = None


def _combine_exponents(x1: float, x2: float) -> float:
    # harmonic combination 1/x = 1/x1 + 1/x2 with inf treated as 0
    inv = (0.0 if math.isinf(x1) else 1.0 / x1) + (
        0.0 if math.isinf(x2) else 1.0 / x2
    )
    return math.inf if inv == 0.0 else 1.0 / inv


def product_law_check(
    a_family: DecayFamily,
    a_index: LorentzIndex,
    b_family: DecayFamily,
    b_index: LorentzIndex,
    growth_factor: float = 1.05,
) -> ProductLawReport:
    """Probe whether the product of two decay families lands where expected.

    The target index combines the inputs harmonically in both slots:
    1/s = 1/p1 + 1/p2 and 1/t = 1/q1 + 1/q2.  The product sequence is
    sampled at the larger truncation L and at 2L and 4L; the verdict is
    bounded when no step grows the target quasi-norm by more than
    growth_factor.  When t = inf the report also records whether the
    weighted rearrangement k**(1/s) (ab)*_k is non-increasing over the
    tail half at 4L, the small-o style certificate.
    """
    s = _combine_exponents(a_index.p, b_index.p)
    t = _combine_exponents(a_index.q, b_index.q)
    target = LorentzIndex(s, t, small_o=a_index.small_o and b_index.small_o)
    base = max(a_family.truncation, b_family.truncation)
    truncations = (base, 2 * base, 4 * base)
    norms = []
    for n in truncations:
        prod = a_family.sample(n).values * b_family.sample(n).values
        norms.append(lorentz_quasi_norm(prod, target))
    bounded = all(
        norms[i + 1] <= norms[i] * growth_factor + slack(norms[i])
        for i in range(len(norms) - 1)
    )
    tail_flag = None
    if math.isinf(t):
        prod = a_family.sample(truncations[-1]).values
        prod = prod * b_family.sample(truncations[-1]).values
        star = _rearranged(prod)
        k = np.arange(1, star.size + 1, dtype=float)
        weighted = k ** (1.0 / s) * star if not math.isinf(s) else star
        half = weighted[star.size // 2 :]
        tail_flag = bool(np.all(np.diff(half) <= slack(weighted[0])))
    return ProductLawReport(
        target_p=s,
        target_q=t,
        truncations=truncations,
        norms=tuple(norms),
        growth_factor=growth_factor,
        bounded=bounded,
        tail_non_increasing=tail_flag,
    )


@dataclass(frozen=True)
class FactorizationCertificate:
    """Checkable evidence attached to an l_1 times weak-tail factorization.

    weighted_tail holds k**(1/q) beta_k; non_increasing asserts that this
    sequence never rises (bitwise comparison, no slack), which is the
    finite stand-in for the tail tending to zero.
    """

    l1_alpha: float
    q: float
    weighted_tail: np.ndarray = field(repr=False)
    non_increasing: bool
    final_to_quarter_ratio: float


def _exact_pair_down(d: float, target: float) -> tuple[float, float]:
    """Find (alpha, beta) with alpha * beta == d exactly and beta <= target.

    Searches downward from target through coarse relative backoffs and a
    few unit-in-last-place steps.  The downward bias keeps the caller's
    running cap honest: every accepted beta respects the monotone budget.
    """
    if d == 0.0:
        return 0.0, target
    scales = [0.0] + [2.0 ** -e for e in range(43, 8, -1)]
    for t in scales:
        base = target * (1.0 - t)
        if base <= 0.0:
            continue
        b = base
        for _ in range(6):
            a0 = d / b
            for a in (a0, math.nextafter(a0, math.inf), math.nextafter(a0, 0.0)):
                if a * b == d:
                    return a, b
            b = math.nextafter(b, 0.0)
    raise RuntimeError("no exactly representable factor pair near target")


def factor_l1_lorentz(
    d,
    s: float,
    epsilon=None,
    gamma: float | None = None,
) -> tuple[FiniteSequence, FiniteSequence, FactorizationCertificate]:
    """Split a non-increasing sequence as d = alpha * beta pointwise.

    alpha is summable and beta sits in the weak space with exponent q
    given by 1/s = 1 + 1/q, i.e. q = s/(1-s) for s in (0, 1).  The split
    is exact in floating point: alpha_k * beta_k == d_k bitwise for every
    k, which the certificate relies on.

    Parameters
    ----------
    d : FiniteSequence or array-like
        Non-increasing, nonnegative.
    s : float
        Product exponent in (0, 1).
    epsilon : array-like, optional
        Explicit non-increasing positive envelope for k**(1/q) beta_k.
        Overrides the default envelope and gamma.
    gamma : float, optional
        Power envelope epsilon_k = k**(-gamma), gamma > 0.

    Returns
    -------
    (alpha, beta, certificate)

    Notes
    -----
    The default envelope is epsilon_k = sqrt(k**(1/q) d_k / d_1) clipped
    to be non-increasing, which balances the two factors for power-decay
    input.  Exactness is achieved by a per-entry search: each beta_k is
    nudged at most a few ulps below its envelope target until the
    rounding of d_k / beta_k multiplies back bitwise, and a running cap
    min over k'<=k of k'**(1/q) beta_k' clips later targets so the
    weighted tail is non-increasing by construction.
    """
    dv = as_values(d)
    if dv.size == 0:
        raise ValueError("empty input")
    if np.any(dv < 0.0):
        raise ValueError("input must be nonnegative")
    if np.any(np.diff(dv) > 0.0):
        raise ValueError("input must be non-increasing")
    if not (0.0 < s < 1.0):
        raise ValueError("s must lie in (0, 1)")
    q = s / (1.0 - s)
    L = dv.size
    k = np.arange(1, L + 1, dtype=float)
    w = k ** (1.0 / q)

    if epsilon is not None:
        eps = as_values(epsilon)
        if eps.size != L:
            raise ValueError("epsilon length mismatch")
        if np.any(eps < 0.0) or np.any(np.diff(eps) > 0.0):
            raise ValueError("epsilon must be nonnegative and non-increasing")
        if np.any((dv > 0.0) & (eps == 0.0)):
            raise ValueError("epsilon vanishes where the input does not")
    elif gamma is not None:
        if not (gamma > 0.0):
            raise ValueError("gamma must be positive")
        eps = k ** (-gamma)
    else:
        if dv[0] == 0.0:
            eps = np.zeros(L)
        else:
            eps = np.sqrt(w * dv / dv[0])
            eps = np.minimum.accumulate(eps)

    alpha = np.zeros(L)
    beta = np.zeros(L)
    cap = math.inf
    for i in range(L):
        target = min(eps[i], cap)
        if dv[i] == 0.0:
            beta[i] = 0.0 if eps[i] == 0.0 else target / w[i]
            alpha[i] = 0.0
            if beta[i] > 0.0:
                cap = min(cap, w[i] * beta[i])
            continue
        a, b = _exact_pair_down(dv[i], target / w[i])
        alpha[i] = a
        beta[i] = b
        cap = min(cap, w[i] * b)

    weighted = w * beta
    non_increasing = bool(np.all(np.diff(weighted) <= 0.0))
    quarter = max(L // 4 - 1, 0)
    if weighted[quarter] > 0.0:
        ratio = float(weighted[-1] / weighted[quarter])
    else:
        ratio = 0.0
    cert = FactorizationCertificate(
        l1_alpha=float(np.sum(np.abs(alpha))),
        q=q,
        weighted_tail=weighted,
        non_increasing=non_increasing,
        final_to_quarter_ratio=ratio,
    )
    return FiniteSequence(alpha), FiniteSequence(beta), cert
