"""Planar polygon primitives: shoelace area, ray casting, segment distance.

Single-point queries run through a compiled kernel (they sit inside the
closed-loop simulation hot path); batch helpers vectorize over both points
and segments in memory-bounded chunks.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _point_query(
    ax: np.ndarray,
    ay: np.ndarray,
    dx: np.ndarray,
    dy: np.ndarray,
    len2: np.ndarray,
    px: float,
    py: float,
) -> tuple[float, int, int]:
    """(squared distance, nearest segment index, ray-cast parity)."""
    best = 1e300
    idx = 0
    crossings = 0
    for i in range(ax.shape[0]):
        rx = px - ax[i]
        ry = py - ay[i]
        t = (rx * dx[i] + ry * dy[i]) / len2[i]
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        cx = rx - t * dx[i]
        cy = ry - t * dy[i]
        d2 = cx * cx + cy * cy
        if d2 < best:
            best = d2
            idx = i
        ya = ay[i]
        yb = ay[i] + dy[i]
        if (ya > py) != (yb > py):
            xc = ax[i] + (py - ya) / (yb - ya) * dx[i]
            if px < xc:
                crossings += 1
    return best, idx, crossings & 1


def shoelace_area(vertices: np.ndarray) -> float:
    """Signed area of a closed polygon (positive when counterclockwise)."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


class PolygonGeometry:
    """Precomputed segment arrays for repeated point queries."""

    def __init__(self, vertices: np.ndarray):
        self.vertices = np.asarray(vertices, dtype=float)
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        self.seg_a = a
        self.seg_d = b - a
        self.seg_len2 = np.maximum(np.einsum("ij,ij->i", self.seg_d, self.seg_d), 1e-300)
        self._ax = np.ascontiguousarray(a[:, 0])
        self._ay = np.ascontiguousarray(a[:, 1])
        self._dx = np.ascontiguousarray(self.seg_d[:, 0])
        self._dy = np.ascontiguousarray(self.seg_d[:, 1])

    def query(self, point: tuple[float, float]) -> tuple[float, int, bool]:
        """(unsigned boundary distance, nearest segment index, inside flag)."""
        d2, idx, parity = _point_query(
            self._ax, self._ay, self._dx, self._dy, self.seg_len2,
            float(point[0]), float(point[1]),
        )
        return float(np.sqrt(d2)), int(idx), bool(parity)

    def distance(self, point: tuple[float, float]) -> tuple[float, int]:
        """(unsigned distance to the boundary, index of the nearest segment)."""
        d, idx, _ = self.query(point)
        return d, idx

    def contains(self, point: tuple[float, float]) -> bool:
        """Ray-cast parity test; points on edges may land on either side."""
        return self.query(point)[2]

    def batch_distance(self, points: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """Unsigned boundary distance for an (N, 2) array of points."""
        pts = np.asarray(points, dtype=float)
        out = np.empty(len(pts))
        for lo in range(0, len(pts), chunk):
            block = pts[lo:lo + chunk]
            rel = block[:, None, :] - self.seg_a[None, :, :]
            t = np.einsum("pij,ij->pi", rel, self.seg_d) / self.seg_len2
            np.clip(t, 0.0, 1.0, out=t)
            diff = rel - t[:, :, None] * self.seg_d[None, :, :]
            d2 = np.einsum("pij,pij->pi", diff, diff)
            out[lo:lo + chunk] = np.sqrt(d2.min(axis=1))
        return out

    def batch_contains(self, points: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """Ray-cast parity for an (N, 2) array of points."""
        pts = np.asarray(points, dtype=float)
        out = np.empty(len(pts), dtype=bool)
        a = self.seg_a
        ya = a[:, 1]
        yb = ya + self.seg_d[:, 1]
        for lo in range(0, len(pts), chunk):
            block = pts[lo:lo + chunk]
            x = block[:, 0][:, None]
            y = block[:, 1][:, None]
            cond = (ya[None, :] > y) != (yb[None, :] > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                x_cross = a[:, 0][None, :] + (y - ya[None, :]) / (yb - ya)[None, :] * self.seg_d[:, 0][None, :]
            hits = cond & (x < x_cross)
            out[lo:lo + chunk] = (np.count_nonzero(hits, axis=1) % 2).astype(bool)
        return out
