"""Product-cone vectors, the blockwise scaling algebra, and block norms.

Vectors live in V = R^{n_1} x ... x R^{n_d} and are stored as d separate
blocks.  A *block scaling* is a length-d array ``alpha`` acting as
``alpha (x) x = (alpha_1 x_1, ..., alpha_d x_d)``; scalings compose through
entrywise products and can be raised to matrix exponents,
``(alpha ** B)_i = prod_k alpha_k^{B_ik}``.  All objects are immutable and
every function is pure, so they are safe to share across threads.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ShapeSpec",
    "ProductVector",
    "NormSpec",
    "as_weight_vector",
    "scale_blocks",
    "matrix_power_scale",
    "block_norms",
    "normalize",
    "weighted_norm_product",
    "partial_order_compare",
    "ones_vector",
    "random_interior",
]

#: Floor used by the diagnostic approximate-positivity predicate.
APPROX_POS_FLOOR = 1e-14


@dataclasses.dataclass(frozen=True)
class ShapeSpec:
    """Block structure (n_1, ..., n_d) of a product space."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        if len(sizes) < 1:
            raise ValueError("a product space needs at least one block")
        if any(n < 1 for n in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def d(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def nodes(self) -> list[tuple[int, int]]:
        """All coordinate indices (i, j) with 0 <= j < n_i, block-major order."""
        return [(i, j) for i, n in enumerate(self.sizes) for j in range(n)]

    def block_slices(self) -> list[slice]:
        """Slices of each block inside the flattened length-``total`` layout."""
        out, off = [], 0
        for n in self.sizes:
            out.append(slice(off, off + n))
            off += n
        return out


class ProductVector:
    """Immutable point of R^{n_1} x ... x R^{n_d}, stored as d blocks."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Iterable[Sequence[float]]):
        parsed = []
        for blk in blocks:
            arr = np.array(blk, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError("each block must be a nonempty 1-d array")
            arr.setflags(write=False)
            parsed.append(arr)
        if not parsed:
            raise ValueError("a product vector needs at least one block")
        object.__setattr__(self, "blocks", tuple(parsed))

    def __setattr__(self, name, value):
        raise AttributeError("ProductVector is immutable")

    @property
    def shape(self) -> ShapeSpec:
        return ShapeSpec(tuple(len(b) for b in self.blocks))

    @property
    def d(self) -> int:
        return len(self.blocks)

    def concat(self) -> np.ndarray:
        return np.concatenate(self.blocks)

    @classmethod
    def from_flat(cls, flat: Sequence[float], shape: ShapeSpec) -> "ProductVector":
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (shape.total,):
            raise ValueError("flat data does not match the shape")
        return cls([flat[sl] for sl in shape.block_slices()])

    # -- membership predicates (K_+, K_{+,0}, K_{++}) -----------------------

    def is_nonneg(self) -> bool:
        return all(b.min() >= 0.0 for b in self.blocks)

    def is_semipos(self) -> bool:
        """Each block nonnegative with at least one nonzero entry."""
        return self.is_nonneg() and all(b.max() > 0.0 for b in self.blocks)

    def is_pos(self) -> bool:
        return all(b.min() > 0.0 for b in self.blocks)

    def approx_pos(self, floor: float = APPROX_POS_FLOOR) -> bool:
        """Diagnostic predicate: every entry exceeds ``floor``.

        Membership tests use exact zero; this looser check is for reporting
        near-boundary iterates only.
        """
        return all(b.min() > floor for b in self.blocks)

    # -- convenience arithmetic ---------------------------------------------

    def __add__(self, other: "ProductVector") -> "ProductVector":
        _check_same_shape(self, other)
        return ProductVector([a + b for a, b in zip(self.blocks, other.blocks)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductVector):
            return NotImplemented
        return len(self.blocks) == len(other.blocks) and all(
            a.shape == b.shape and bool(np.all(a == b))
            for a, b in zip(self.blocks, other.blocks)
        )

    def __hash__(self):
        return hash(tuple((b.shape[0], b.tobytes()) for b in self.blocks))

    def __repr__(self):
        inner = ", ".join(np.array2string(b, precision=6) for b in self.blocks)
        return f"ProductVector({inner})"


class NormSpec:
    """Per-block monotonic norms.

    Each block selector is either an exponent p in [1, inf] (the usual p-norm,
    monotonic on all of R^n) or a strictly positive weight vector phi defining
    the weighted-l1 functional <|v|, phi>.
    """

    __slots__ = ("selectors",)

    def __init__(self, selectors: Sequence):
        parsed = []
        for sel in selectors:
            if isinstance(sel, (int, float, np.integer, np.floating)):
                p = float(sel)
                if math.isnan(p) or p < 1.0:
                    raise ValueError(
                        f"p-norm exponent must lie in [1, inf], got {sel!r}"
                    )
                parsed.append(("p", p))
            else:
                phi = np.array(sel, dtype=float)
                if phi.ndim != 1 or phi.size == 0 or np.any(phi <= 0.0):
                    raise ValueError("weighted-l1 weights must be strictly positive")
                phi.setflags(write=False)
                parsed.append(("phi", phi))
        if not parsed:
            raise ValueError("need at least one block selector")
        object.__setattr__(self, "selectors", tuple(parsed))

    def __setattr__(self, name, value):
        raise AttributeError("NormSpec is immutable")

    @classmethod
    def euclidean(cls, d: int) -> "NormSpec":
        return cls([2.0] * d)

    @classmethod
    def lp(cls, p: float, d: int) -> "NormSpec":
        return cls([p] * d)

    @property
    def d(self) -> int:
        return len(self.selectors)

    def is_smooth_interior(self) -> bool:
        """True when every selector is differentiable on the open orthant."""
        return all(
            kind == "phi" or val != math.inf for kind, val in self.selectors
        )

    def block_norm(self, i: int, v: np.ndarray) -> float:
        kind, val = self.selectors[i]
        av = np.abs(v)
        if kind == "phi":
            if val.shape != v.shape:
                raise ValueError(f"phi weight length mismatch in block {i}")
            return float(np.dot(av, val))
        p = val
        if p == math.inf:
            return float(av.max())
        if p == 1.0:
            return float(av.sum())
        if p == 2.0:
            return float(np.sqrt(np.dot(v, v)))
        return float(np.sum(av**p) ** (1.0 / p))

    def __repr__(self):
        parts = [
            f"p={val:g}" if kind == "p" else f"phi(len {val.size})"
            for kind, val in self.selectors
        ]
        return f"NormSpec([{', '.join(parts)}])"


def _check_same_shape(x: ProductVector, y: ProductVector):
    if tuple(len(b) for b in x.blocks) != tuple(len(b) for b in y.blocks):
        raise ValueError("shape mismatch between product vectors")


def _as_scaling(alpha, d: int) -> np.ndarray:
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    if a.shape != (d,):
        raise ValueError(f"block scaling must have length {d}, got shape {a.shape}")
    return a


def as_weight_vector(b, d: int, normalized: bool = False) -> np.ndarray:
    """Validate a strictly positive weight vector, optionally on the simplex."""
    w = np.atleast_1d(np.asarray(b, dtype=float))
    if w.shape != (d,):
        raise ValueError(f"weight vector must have length {d}, got shape {w.shape}")
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be strictly positive and finite")
    if normalized and abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1")
    return w


def scale_blocks(alpha, x: ProductVector) -> ProductVector:
    """Blockwise scaling alpha (x) x = (alpha_1 x_1, ..., alpha_d x_d)."""
    a = _as_scaling(alpha, x.d)
    return ProductVector([a[i] * blk for i, blk in enumerate(x.blocks)])


def matrix_power_scale(alpha, B) -> np.ndarray:
    """Raise a nonnegative scaling to a matrix exponent: out_i = prod_k alpha_k^{B_ik}.

    Computed as exp(B @ log alpha) to stay stable for extreme fractional
    exponents.  Zero bases follow the 0^0 = 1 convention (forced by continuity
    of multi-homogeneity at the boundary); a zero base under a negative
    exponent is rejected.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("exponent matrix must be square")
    a = _as_scaling(alpha, B.shape[0])
    if np.any(a < 0.0):
        raise ValueError("scaling entries must be nonnegative")
    if np.all(a > 0.0):
        return np.exp(B @ np.log(a))
    zero = a == 0.0
    if np.any(B[:, zero] < 0.0):
        raise ValueError("zero base with negative exponent")
    log_a = np.where(zero, 0.0, np.log(np.where(zero, 1.0, a)))
    out = np.exp(B @ log_a)
    out[(B[:, zero] > 0.0).any(axis=1)] = 0.0
    return out


def block_norms(x: ProductVector, norms: NormSpec) -> np.ndarray:
    """Vector of per-block norms (||x_1||_{g_1}, ..., ||x_d||_{g_d})."""
    if norms.d != x.d:
        raise ValueError("norm spec block count does not match the vector")
    return np.array([norms.block_norm(i, blk) for i, blk in enumerate(x.blocks)])


def normalize(x: ProductVector, norms: NormSpec) -> ProductVector:
    """Rescale every block to unit norm, landing on the slice S_+.

    Raises when some block is identically zero (the input left K_{+,0}).
    """
    ns = block_norms(x, norms)
    if np.any(ns == 0.0):
        i = int(np.argmin(ns))
        raise ValueError(f"block {i} is identically zero; input left K_+0")
    return scale_blocks(1.0 / ns, x)


def weighted_norm_product(x: ProductVector, b, norms: NormSpec) -> float:
    """The weighted norm product |||x|||_b = prod_i ||x_i||^{b_i}.

    Equals 1 on S_+ when b sums to 1; scales as prod alpha_i^{b_i} under
    blockwise scaling.
    """
    w = as_weight_vector(b, x.d)
    ns = block_norms(x, norms)
    if np.any(ns == 0.0):
        return 0.0
    return float(np.exp(np.dot(w, np.log(ns))))


def partial_order_compare(x: ProductVector, y: ProductVector) -> str:
    """Classify x against y in the componentwise order of the product cone.

    Returns one of ``eq``, ``lt`` (strict everywhere), ``lneq`` (<= with some
    strict coordinate), the mirror images ``gt`` / ``gneq``, or
    ``incomparable``.
    """
    _check_same_shape(x, y)
    diff = np.concatenate([yb - xb for xb, yb in zip(x.blocks, y.blocks)])
    if np.all(diff == 0.0):
        return "eq"
    if np.all(diff >= 0.0):
        return "lt" if np.all(diff > 0.0) else "lneq"
    if np.all(diff <= 0.0):
        return "gt" if np.all(diff < 0.0) else "gneq"
    return "incomparable"


def ones_vector(shape: ShapeSpec) -> ProductVector:
    return ProductVector([np.ones(n) for n in shape.sizes])


def random_interior(shape: ShapeSpec, rng, low: float = 0.5, high: float = 1.5) -> ProductVector:
    """Seeded strictly positive sample, entrywise uniform on (low, high)."""
    return ProductVector([rng.uniform(low, high, n) for n in shape.sizes])
