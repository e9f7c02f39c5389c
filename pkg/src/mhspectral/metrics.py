"""Blockwise ratio extrema and weighted Hilbert / Thompson metrics.

Both metrics live on the open cone K_{++}.  For a positive weight vector b,

    mu_b(x, y)     = sum_i b_i * ln( M_i(x/y) / m_i(x/y) )
    mubar_b(x, y)  = sum_i b_i * ln( max{ M_i(x/y), M_i(y/x) } )

where M_i / m_i are the per-block maxima / minima of entrywise ratios.  All
ratio logs are taken as log(x) - log(y) coordinatewise, so enormous or tiny
entries never overflow an intermediate quotient.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .cones import ProductVector, _check_same_shape, as_weight_vector

__all__ = [
    "POSITIVITY_FLOOR",
    "RatioExtrema",
    "ratio_extrema",
    "hilbert_metric",
    "thompson_metric",
]

#: Entries at or below this magnitude count as nonpositive for metric purposes;
#: the metrics have no boundary extension.
POSITIVITY_FLOOR = 1e-300


@dataclasses.dataclass(frozen=True)
class RatioExtrema:
    """Per-block maxima M_i(x/y) and minima m_i(x/y) of entrywise ratios."""

    maxima: np.ndarray
    minima: np.ndarray


def _require_interior(v: ProductVector, name: str):
    for blk in v.blocks:
        if blk.min() <= POSITIVITY_FLOOR:
            raise ValueError(f"{name} must be strictly positive (entry <= {POSITIVITY_FLOOR:g})")


def _log_blocks(v: ProductVector) -> list[np.ndarray]:
    with np.errstate(divide="ignore"):
        return [np.log(blk) for blk in v.blocks]


def ratio_extrema(x: ProductVector, y: ProductVector) -> RatioExtrema:
    """Blockwise max and min of x/y; y must be strictly positive, x nonnegative.

    The sandwich m(x/y) (x) y <=_K x <=_K M(x/y) (x) y holds componentwise.
    """
    _check_same_shape(x, y)
    maxima, minima = [], []
    for xb, yb in zip(x.blocks, y.blocks):
        if yb.min() <= 0.0:
            raise ValueError("y has a zero entry; ratios need y in K_++")
        if xb.min() < 0.0:
            raise ValueError("x must be nonnegative")
        with np.errstate(divide="ignore"):
            diff = np.log(xb) - np.log(yb)  # -inf where x is 0
        maxima.append(np.exp(diff.max()))
        minima.append(np.exp(diff.min()))
    return RatioExtrema(np.array(maxima), np.array(minima))


def hilbert_metric(x: ProductVector, y: ProductVector, b) -> float:
    """Weighted Hilbert (projective) metric on K_{++}.

    Vanishes exactly when every block of x is a positive multiple of the
    corresponding block of y; invariant under blockwise rescaling of either
    argument.
    """
    _check_same_shape(x, y)
    _require_interior(x, "x")
    _require_interior(y, "y")
    w = as_weight_vector(b, x.d)
    total = 0.0
    for wi, xb, yb in zip(w, _log_blocks(x), _log_blocks(y)):
        diff = xb - yb
        total += wi * (diff.max() - diff.min())
    return float(total)


def thompson_metric(x: ProductVector, y: ProductVector, b) -> float:
    """Weighted Thompson metric on K_{++}: a genuine metric, zero iff x == y."""
    _check_same_shape(x, y)
    _require_interior(x, "x")
    _require_interior(y, "y")
    w = as_weight_vector(b, x.d)
    total = 0.0
    for wi, xb, yb in zip(w, _log_blocks(x), _log_blocks(y)):
        diff = xb - yb
        total += wi * max(diff.max(), -diff.min())
    return float(total)
