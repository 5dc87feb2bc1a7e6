"""Finite nuclear representations and their quasi-norms.

A representation is a finite list of rank-one atoms lambda_k x'_k (x) x_k
acting between two ambient spaces.  The module evaluates the induced
matrix, the nuclear trace, summability and Lorentz quasi-norms of the
atom magnitude sequence, weak-type norms of vector systems, two bracket
style quantities built from an l_1 factor and a weak factor, and a
perturbation bound for the trace under composition with an operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sequences import FiniteSequence, LorentzIndex, lorentz_quasi_norm
from .spaces import (
    AmbientSpace,
    NormBracket,
    OperatorMatrix,
    Vector,
    dual_exponent,
    operator_norm,
    vector_norm,
)

__all__ = [
    "NuclearIndex",
    "Representation",
    "induced_matrix",
    "nuclear_trace",
    "split_representation",
    "quasi_norm",
    "weak_norm",
    "weak_norm_bracket",
    "build_from_factorization",
    "trace_perturbation_bound",
    "rebalance",
    "improve_representation",
]

S_VARIANT = "S"
LORENTZ_VARIANT = "LORENTZ"
BRACKET_LOWER = "BRACKET_LOWER"
BRACKET_UPPER = "BRACKET_UPPER"


@dataclass(frozen=True)
class NuclearIndex:
    """Which quasi-norm of a representation to evaluate.

    S(s): l_s sum of the atom magnitudes lambda_k |x'_k| |x_k|, s in (0, 1].
    LORENTZ(r, w): Lorentz l_{r,w} quasi-norm of the same magnitude
    sequence; admissible when 0 < r < 1 with any w in (0, inf], or r = 1
    with w in (0, 1].  The pair r = 1, w > 1 is rejected.
    BRACKET_LOWER(r, p) and BRACKET_UPPER(r, p): l_r mass on one side
    times a weak p'-norm on the other, r in (0, 1], p in [1, 2].
    """

    variant: str
    s: float | None = None
    r: float | None = None
    w: float | None = None
    p: float | None = None

    def __post_init__(self):
        v = self.variant
        if v == S_VARIANT:
            if self.s is None or not (0.0 < self.s <= 1.0):
                raise ValueError("S variant needs s in (0, 1]")
        elif v == LORENTZ_VARIANT:
            if self.r is None or self.w is None:
                raise ValueError("LORENTZ variant needs r and w")
            if not (0.0 < self.r <= 1.0) or not (self.w > 0.0):
                raise ValueError("LORENTZ variant needs 0 < r <= 1, w > 0")
            if self.r == 1.0 and self.w > 1.0:
                raise ValueError("r = 1 admits only w <= 1")
        elif v in (BRACKET_LOWER, BRACKET_UPPER):
            if self.r is None or not (0.0 < self.r <= 1.0):
                raise ValueError("bracket variants need r in (0, 1]")
            if self.p is None or not (1.0 <= self.p <= 2.0):
                raise ValueError("bracket variants need p in [1, 2]")
        else:
            raise ValueError(f"unknown variant {v!r}")

    @classmethod
    def absolutely_summable(cls, s: float) -> "NuclearIndex":
        return cls(S_VARIANT, s=s)

    @classmethod
    def lorentz(cls, r: float, w: float) -> "NuclearIndex":
        return cls(LORENTZ_VARIANT, r=r, w=w)

    @classmethod
    def bracket_lower(cls, r: float, p: float) -> "NuclearIndex":
        return cls(BRACKET_LOWER, r=r, p=p)

    @classmethod
    def bracket_upper(cls, r: float, p: float) -> "NuclearIndex":
        return cls(BRACKET_UPPER, r=r, p=p)


@dataclass(frozen=True)
class Representation:
    """Sorted rank-one expansion sum_k lambda_k <x'_k, .> x_k.

    Construction sorts atoms by non-increasing coefficient (stable) and
    drops zero coefficients.  Functionals live in the dual of the domain,
    vectors in the codomain.  The spaces are stored explicitly so an
    empty representation still knows where it acts.
    """

    coefficients: np.ndarray
    functionals: tuple[Vector, ...]
    vectors: tuple[Vector, ...]
    domain: AmbientSpace
    codomain: AmbientSpace

    def __post_init__(self):
        lam = np.asarray(self.coefficients, dtype=float)
        if lam.ndim != 1:
            raise ValueError("coefficients must be one dimensional")
        if not np.all(np.isfinite(lam)) or np.any(lam < 0.0):
            raise ValueError("coefficients must be finite and nonnegative")
        fns = tuple(self.functionals)
        vecs = tuple(self.vectors)
        if len(fns) != lam.size or len(vecs) != lam.size:
            raise ValueError("atom count mismatch")
        dual = self.domain.dual()
        for f in fns:
            if f.home != dual:
                raise ValueError("functionals must live in the dual of the domain")
        for x in vecs:
            if x.home != self.codomain:
                raise ValueError("vectors must live in the codomain")
        keep = lam > 0.0
        order = np.argsort(-lam[keep], kind="stable")
        idx = np.flatnonzero(keep)[order]
        object.__setattr__(self, "coefficients", lam[idx])
        object.__setattr__(self, "functionals", tuple(fns[i] for i in idx))
        object.__setattr__(self, "vectors", tuple(vecs[i] for i in idx))

    @classmethod
    def from_arrays(
        cls,
        coefficients,
        functionals,
        vectors,
        domain: AmbientSpace,
        codomain: AmbientSpace,
    ) -> "Representation":
        """Rows of `functionals` and rows of `vectors` are the atoms."""
        lam = np.asarray(coefficients, dtype=float)
        F = np.asarray(functionals, dtype=float)
        X = np.asarray(vectors, dtype=float)
        if F.ndim != 2 or X.ndim != 2:
            raise ValueError("expected 2-d atom arrays")
        dual = domain.dual()
        return cls(
            lam,
            tuple(Vector(F[i], dual) for i in range(F.shape[0])),
            tuple(Vector(X[i], codomain) for i in range(X.shape[0])),
            domain,
            codomain,
        )

    @property
    def atom_count(self) -> int:
        return int(self.coefficients.size)

    def functional_matrix(self) -> np.ndarray:
        if not self.functionals:
            return np.zeros((0, self.domain.dim))
        return np.stack([f.coords for f in self.functionals])

    def vector_matrix(self) -> np.ndarray:
        if not self.vectors:
            return np.zeros((0, self.codomain.dim))
        return np.stack([x.coords for x in self.vectors])

    def magnitudes(self) -> FiniteSequence:
        """The sequence lambda_k |x'_k| |x_k| driving every quasi-norm."""
        vals = np.array(
            [
                lam * vector_norm(f) * vector_norm(x)
                for lam, f, x in zip(
                    self.coefficients, self.functionals, self.vectors
                )
            ]
        )
        if vals.size == 0:
            vals = np.zeros(0)
        return FiniteSequence(vals)


def induced_matrix(z: Representation) -> OperatorMatrix:
    """Dense matrix of the representation as a map domain -> codomain."""
    if z.atom_count == 0:
        entries = np.zeros((z.codomain.dim, z.domain.dim))
    else:
        entries = (z.vector_matrix().T * z.coefficients) @ z.functional_matrix()
    return OperatorMatrix(entries, z.domain, z.codomain)


def nuclear_trace(z: Representation) -> float:
    """sum_k lambda_k <x'_k, x_k> for an endomorphism representation."""
    if z.domain.dim != z.codomain.dim:
        raise ValueError("trace requires equal domain and codomain dimension")
    if z.atom_count == 0:
        return 0.0
    pairings = np.einsum("ij,ij->i", z.functional_matrix(), z.vector_matrix())
    return float(np.sum(z.coefficients * pairings))


def split_representation(
    z: Representation, s: float
) -> tuple[FiniteSequence, tuple[Vector, ...]]:
    """Split atoms into weights lambda_k**s |x'_k| and vectors lambda_k**(1-s) x_k.

    The outer product of the two parts against normalized functionals
    reassembles the representation; callers use the weight sequence as
    the l_1 side of factorizations.
    """
    if not (0.0 < s <= 1.0):
        raise ValueError("s must lie in (0, 1]")
    lam = z.coefficients
    weights = np.array(
        [l ** s * vector_norm(f) for l, f in zip(lam, z.functionals)]
    )
    if weights.size == 0:
        weights = np.zeros(0)
    scaled = tuple(
        Vector(l ** (1.0 - s) * x.coords, x.home)
        for l, x in zip(lam, z.vectors)
    )
    return FiniteSequence(weights), scaled


def _lr_norm(vals: np.ndarray, r: float) -> float:
    if vals.size == 0:
        return 0.0
    if math.isinf(r):
        return float(np.max(np.abs(vals)))
    return float(np.sum(np.abs(vals) ** r) ** (1.0 / r))


def weak_norm_bracket(vectors, p_prime: float) -> NormBracket:
    """Bracket for the weak l_{p'} norm of a finite vector system.

    The value is sup over unit functionals y' of the l_{p'} norm of the
    pairing sequence (<y', y_i>)_i, equivalently the operator norm of the
    pairing map from the dual of the vectors' home into l_{p'}^m.  Exact
    in the home spaces l_2 (with p' = 2), l_inf, and small l_1 systems;
    otherwise the attained ascent value and the best cheap upper bound.
    """
    vecs = tuple(vectors)
    if len(vecs) == 0:
        raise ValueError("weak norm needs at least one vector")
    if not (p_prime >= 1.0):
        raise ValueError("p' must satisfy p' >= 1")
    home = vecs[0].home
    for v in vecs:
        if v.home != home:
            raise ValueError("vectors must share one home space")
    if len(vecs) == 1:
        nv = vector_norm(vecs[0])
        return NormBracket(nv, nv)
    Y = np.stack([v.coords for v in vecs])  # rows are the vectors
    pairing = OperatorMatrix(
        Y,
        AmbientSpace(home.dim, dual_exponent(home.exponent)),
        AmbientSpace(len(vecs), p_prime),
    )
    lo, hi = operator_norm(pairing)
    crude = _lr_norm(np.array([vector_norm(v) for v in vecs]), p_prime)
    hi = min(hi, crude)
    if lo > hi:
        lo = hi
    return NormBracket(lo, hi)


def weak_norm(vectors, p_prime: float) -> float:
    """Weak l_{p'} norm; exact when the bracket is tight, else attained lower."""
    lo, hi = weak_norm_bracket(vectors, p_prime)
    return hi if hi - lo <= 1e-12 * max(1.0, hi) else lo


def quasi_norm(z: Representation, index: NuclearIndex) -> float:
    """Evaluate the selected quasi-norm of the representation.

    S and LORENTZ act on the magnitude sequence lambda_k |x'_k| |x_k|.
    BRACKET_LOWER multiplies the l_r mass of (lambda_k x'_k) by the weak
    p'-norm of the vector system; BRACKET_UPPER swaps the roles.
    """
    mags = z.magnitudes().values
    if index.variant == S_VARIANT:
        return _lr_norm(mags, index.s)
    if index.variant == LORENTZ_VARIANT:
        return lorentz_quasi_norm(mags, LorentzIndex(index.r, index.w))
    if z.atom_count == 0:
        return 0.0
    p_prime = dual_exponent(index.p)
    if index.variant == BRACKET_LOWER:
        side = np.array(
            [l * vector_norm(f) for l, f in zip(z.coefficients, z.functionals)]
        )
        return _lr_norm(side, index.r) * weak_norm(z.vectors, p_prime)
    side = np.array(
        [l * vector_norm(x) for l, x in zip(z.coefficients, z.vectors)]
    )
    return _lr_norm(side, index.r) * weak_norm(z.functionals, p_prime)


def build_from_factorization(
    A: OperatorMatrix,
    diagonal,
    B: OperatorMatrix,
    mode: str,
) -> tuple[Representation, OperatorMatrix]:
    """Assemble a representation from a diagonal factorization B D A.

    mode "lower" expects A to land in an l_inf middle space and B to
    leave from the matching l_p middle space; mode "upper" expects B to
    leave from an l_1 middle space.  Atoms are lambda_k = d_k with the
    k-th row of A as functional and the k-th column of B as vector.  The
    returned matrix is the induced matrix of the representation, which
    coincides with the product B diag(d) A.
    """
    if mode not in ("lower", "upper"):
        raise ValueError("mode must be 'lower' or 'upper'")
    d = np.asarray(diagonal, dtype=float)
    if d.ndim != 1:
        raise ValueError("diagonal must be one dimensional")
    m = d.size
    if A.codomain.dim != m or B.domain.dim != m:
        raise ValueError("middle dimension mismatch")
    if np.any(d < 0.0) or np.any(np.diff(d) > 0.0):
        raise ValueError("diagonal must be nonnegative and non-increasing")
    if mode == "lower" and not math.isinf(A.codomain.exponent):
        raise ValueError("lower mode expects A to land in an l_inf space")
    if mode == "upper" and B.domain.exponent != 1.0:
        raise ValueError("upper mode expects B to leave from an l_1 space")
    rep = Representation.from_arrays(
        d, A.entries, B.entries.T, A.domain, B.codomain
    )
    return rep, induced_matrix(rep)


def trace_perturbation_bound(
    z: Representation, R: OperatorMatrix, s: float
) -> tuple[float, float]:
    """Defect |trace z - trace(R z)| and its split-based upper bound.

    The bound is the l_1 mass of the split weights times the worst
    displacement of a scaled vector under R, measured in the codomain.
    """
    if R.domain.dim != z.codomain.dim or R.codomain.dim != z.codomain.dim:
        raise ValueError("perturbation must be an endomorphism of the codomain")
    tr = nuclear_trace(z)
    if z.atom_count == 0:
        return 0.0, 0.0
    F = z.functional_matrix()
    X = z.vector_matrix()
    moved = X @ R.entries.T
    tr_perturbed = float(
        np.sum(z.coefficients * np.einsum("ij,ij->i", F, moved))
    )
    defect = abs(tr - tr_perturbed)
    weights, scaled = split_representation(z, s)
    p_out = z.codomain.exponent
    worst = 0.0
    for v in scaled:
        resid = v.coords - R.entries @ v.coords
        worst = max(worst, _p_vec_norm(resid, p_out))
    return defect, float(np.sum(weights.values)) * worst


def _p_vec_norm(arr: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(arr))) if arr.size else 0.0
    return float(np.sum(np.abs(arr) ** p) ** (1.0 / p)) if arr.size else 0.0


def rebalance(z: Representation) -> Representation:
    """Push all atom mass into the coefficients.

    Functionals and vectors are normalized and lambda_k becomes
    lambda_k |x'_k| |x_k|; atoms with a zero factor are dropped.  The
    induced matrix is unchanged up to rounding and every magnitude-based
    quasi-norm is invariant.
    """
    lam = []
    fns = []
    vecs = []
    for l, f, x in zip(z.coefficients, z.functionals, z.vectors):
        nf = vector_norm(f)
        nx = vector_norm(x)
        if nf == 0.0 or nx == 0.0:
            continue
        lam.append(l * nf * nx)
        fns.append(Vector(f.coords / nf, f.home))
        vecs.append(Vector(x.coords / nx, x.home))
    return Representation(
        np.array(lam) if lam else np.zeros(0),
        tuple(fns),
        tuple(vecs),
        z.domain,
        z.codomain,
    )


def improve_representation(
    z: Representation, index: NuclearIndex, sweeps: int = 2
) -> tuple[Representation, float, float]:
    """Greedy per-atom rescaling that never increases the quasi-norm.

    For magnitude-based indices rebalancing is already optimal, so only
    the bracket variants are swept: each atom is rescaled by a grid of
    factors applied to the functional and undone on the vector, keeping
    the induced matrix fixed while trading mass between the l_r side and
    the weak side.  Returns (new representation, old value, new value).
    """
    before = quasi_norm(z, index)
    if index.variant in (S_VARIANT, LORENTZ_VARIANT):
        zb = rebalance(z)
        return zb, before, quasi_norm(zb, index)
    current = rebalance(z)
    best_val = quasi_norm(current, index)
    grid = [0.25, 0.5, 0.75, 1.5, 2.0, 4.0]
    for _ in range(max(sweeps, 0)):
        changed = False
        for i in range(current.atom_count):
            for c in grid:
                fns = list(current.functionals)
                vecs = list(current.vectors)
                fns[i] = Vector(fns[i].coords * c, fns[i].home)
                vecs[i] = Vector(vecs[i].coords / c, vecs[i].home)
                cand = Representation(
                    current.coefficients.copy(),
                    tuple(fns),
                    tuple(vecs),
                    current.domain,
                    current.codomain,
                )
                val = quasi_norm(cand, index)
                if val < best_val:
                    best_val = val
                    current = cand
                    changed = True
        if not changed:
            break
    return current, before, min(before, best_val)
