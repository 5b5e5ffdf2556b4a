"""Metric primitives on finite point sets in R^d.

Everything here is brute force over all pairs, processed in row blocks so
memory stays bounded for sets of up to ~1e5 points.
"""

from __future__ import annotations

import math

import numpy as np

_BLOCK = 2048


def as_points(points) -> np.ndarray:
    """Coerce ``points`` to a float array of shape (n, d); empty input gives (0, d)."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        dim = arr.shape[-1] if arr.ndim == 2 else 0
        return np.zeros((0, dim))
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"expected an (n, d) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def _blocks(n: int):
    for start in range(0, n, _BLOCK):
        yield slice(start, min(start + _BLOCK, n))


def _pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def diam(points) -> float:
    """Largest pairwise Euclidean distance; 0.0 for empty and singleton sets."""
    pts = as_points(points)
    n = len(pts)
    if n < 2:
        return 0.0
    best = 0.0
    for rows in _blocks(n):
        # upper triangle of blocks only
        for cols in _blocks(n):
            if cols.start < rows.start:
                continue
            best = max(best, float(_pairwise(pts[rows], pts[cols]).max()))
    return best


def directed_deviation(a, b) -> float:
    """sup over x in ``a`` of dist(x, b)."""
    pa, pb = as_points(a), as_points(b)
    worst = 0.0
    for rows in _blocks(len(pa)):
        nearest = np.full(rows.stop - rows.start, np.inf)
        for cols in _blocks(len(pb)):
            nearest = np.minimum(nearest, _pairwise(pa[rows], pb[cols]).min(axis=1))
        worst = max(worst, float(nearest.max()))
    return worst


def set_distance(a, b) -> float:
    """Infimum of pairwise distances; ``inf`` if either set is empty."""
    pa, pb = as_points(a), as_points(b)
    if len(pa) == 0 or len(pb) == 0:
        return math.inf
    best = math.inf
    for rows in _blocks(len(pa)):
        for cols in _blocks(len(pb)):
            best = min(best, float(_pairwise(pa[rows], pb[cols]).min()))
    return best


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two nonempty finite point sets.

    Raises
    ------
    ValueError
        If either set is empty (the distance is undefined for empty sets).
    """
    pa, pb = as_points(a), as_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("Hausdorff distance is undefined for empty set")
    return max(directed_deviation(pa, pb), directed_deviation(pb, pa))


def point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    lam = min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + lam * ab)))


def segment_distances(p1, q1, p2, q2) -> np.ndarray:
    """Minimum distance between segments [p1_k, q1_k] and [p2_k, q2_k], row-wise.

    Vectorized closest-point computation for arrays of shape (k, d).
    Degenerate (zero-length) segments are handled as points.
    """
    p1, q1, p2, q2 = (np.atleast_2d(np.asarray(v, dtype=float)) for v in (p1, q1, p2, q2))
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    denom = a * e - b * b

    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0.0, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = np.where(e > 0.0, (b * s + f) / e, 0.0)
        # t out of range: clamp it and recompute s for the clamped t
        s = np.where(t < 0.0, np.where(a > 0.0, np.clip(-c / a, 0.0, 1.0), 0.0), s)
        s = np.where(t > 1.0, np.where(a > 0.0, np.clip((b - c) / a, 0.0, 1.0), 0.0), s)
        t = np.clip(t, 0.0, 1.0)
        # second segment is a point
        s = np.where((e == 0.0) & (a > 0.0), np.clip(-c / a, 0.0, 1.0), s)
    c1 = p1 + s[:, None] * d1
    c2 = p2 + t[:, None] * d2
    return np.linalg.norm(c1 - c2, axis=1)
