"""Polyline self-intersection by uniform spatial hashing of segments."""

from __future__ import annotations

import numpy as np

from ._kernel import njit


@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@njit(cache=True)
def _on_segment(ax, ay, bx, by, px, py):
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


@njit(cache=True)
def segments_intersect(p, q, r, s):
    """Closed segments ``pq`` and ``rs`` share a point."""
    d1 = _orient(r[0], r[1], s[0], s[1], p[0], p[1])
    d2 = _orient(r[0], r[1], s[0], s[1], q[0], q[1])
    d3 = _orient(p[0], p[1], q[0], q[1], r[0], r[1])
    d4 = _orient(p[0], p[1], q[0], q[1], s[0], s[1])
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(r[0], r[1], s[0], s[1], p[0], p[1]):
        return True
    if d2 == 0 and _on_segment(r[0], r[1], s[0], s[1], q[0], q[1]):
        return True
    if d3 == 0 and _on_segment(p[0], p[1], q[0], q[1], r[0], r[1]):
        return True
    if d4 == 0 and _on_segment(p[0], p[1], q[0], q[1], s[0], s[1]):
        return True
    return False


@njit(cache=True)
def _hash_scan(pts, cell, x0, y0, nx, ny):
    nseg = pts.shape[0] - 1
    # count (cell, segment) incidences, then bucket them
    counts = np.zeros(nx * ny + 1, np.int64)
    for k in range(nseg):
        i0 = int((min(pts[k, 0], pts[k + 1, 0]) - x0) / cell)
        i1 = int((max(pts[k, 0], pts[k + 1, 0]) - x0) / cell)
        j0 = int((min(pts[k, 1], pts[k + 1, 1]) - y0) / cell)
        j1 = int((max(pts[k, 1], pts[k + 1, 1]) - y0) / cell)
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                counts[i * ny + j + 1] += 1
    for c in range(1, nx * ny + 1):
        counts[c] += counts[c - 1]
    fill = counts[:-1].copy()
    members = np.empty(counts[-1], np.int64)
    for k in range(nseg):
        i0 = int((min(pts[k, 0], pts[k + 1, 0]) - x0) / cell)
        i1 = int((max(pts[k, 0], pts[k + 1, 0]) - x0) / cell)
        j0 = int((min(pts[k, 1], pts[k + 1, 1]) - y0) / cell)
        j1 = int((max(pts[k, 1], pts[k + 1, 1]) - y0) / cell)
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                c = i * ny + j
                members[fill[c]] = k
                fill[c] += 1
    best_i, best_j = -1, -1
    for c in range(nx * ny):
        lo, hi = counts[c], counts[c + 1]
        for u in range(lo, hi):
            a = members[u]
            for v in range(u + 1, hi):
                b = members[v]
                i, j = (a, b) if a < b else (b, a)
                if j - i <= 1:
                    continue
                if best_j >= 0 and (j > best_j or (j == best_j and i >= best_i)):
                    continue
                if segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]):
                    best_i, best_j = i, j
    return best_i, best_j


def first_self_intersection(points) -> tuple[int, int] | None:
    """Segment pair ``(i, j)``, ``i < j - 1``, of the earliest crossing.

    "Earliest" means smallest ``j``, then smallest ``i``: the first segment
    along the polyline that meets an earlier, non-adjacent one.
    """
    pts = np.ascontiguousarray(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    if pts.shape[0] < 4:
        return None
    seg = np.hypot(*np.diff(pts, axis=0).T)
    cell = float(np.median(seg))
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    if not cell > 0:
        cell = max(float(span.max()), 1.0) / 1024.0
    # keep the grid and the incidence count bounded
    cell = max(cell, float(span.max()) / 4096.0, 1e-300)
    while True:
        incid = np.sum((np.floor(np.abs(np.diff(pts[:, 0])) / cell) + 2)
                       * (np.floor(np.abs(np.diff(pts[:, 1])) / cell) + 2))
        if incid <= 64 * len(seg):
            break
        cell *= 2.0
    nx = int(span[0] / cell) + 2
    ny = int(span[1] / cell) + 2
    i, j = _hash_scan(pts, cell, float(lo[0]), float(lo[1]), nx, ny)
    return None if i < 0 else (int(i), int(j))


def first_self_intersection_bruteforce(points) -> tuple[int, int] | None:
    """All-pairs oracle for :func:`first_self_intersection` (quadratic cost)."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0] - 1
    p, q = pts[:-1], pts[1:]

    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])

    def within(a, b, c):
        return ((np.minimum(a[..., 0], b[..., 0]) <= c[..., 0]) & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
                & (np.minimum(a[..., 1], b[..., 1]) <= c[..., 1]) & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1])))

    for j in range(2, n):
        pi, qi = p[: j - 1], q[: j - 1]
        r = np.broadcast_to(p[j], pi.shape)
        s = np.broadcast_to(q[j], pi.shape)
        d1, d2 = orient(r, s, pi), orient(r, s, qi)
        d3, d4 = orient(pi, qi, r), orient(pi, qi, s)
        hit = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d3) * np.sign(d4) < 0)
        hit |= (d1 == 0) & within(r, s, pi)
        hit |= (d2 == 0) & within(r, s, qi)
        hit |= (d3 == 0) & within(pi, qi, r)
        hit |= (d4 == 0) & within(pi, qi, s)
        idx = np.nonzero(hit)[0]
        if idx.size:
            return int(idx[0]), j
    return None


def intersection_point(points, pair: tuple[int, int]) -> tuple[float, float]:
    pts = np.asarray(points, dtype=float)
    i, j = pair
    p, r = pts[i], pts[j]
    d1, d2 = pts[i + 1] - p, pts[j + 1] - r
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0.0:
        return float(p[0]), float(p[1])
    t = ((r[0] - p[0]) * d2[1] - (r[1] - p[1]) * d2[0]) / den
    pt = p + t * d1
    return float(pt[0]), float(pt[1])
