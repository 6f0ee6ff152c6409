"""Exact Euclidean distance transform by two separable lower-envelope passes."""
import numpy as np


def _intersection(f, p, q):
    return ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p)


def lower_envelope(f):
    """1-D squared distance transform of a sampled function.

    Returns ``(d, arg)`` with ``d[q] = min_p (q - p)^2 + f[p]`` and ``arg[q]``
    the minimising ``p``; equal candidates resolve to the smaller ``p``.
    Infinite entries of ``f`` are not sites; with no site ``d`` is inf and
    ``arg`` is -1.
    """
    f = np.asarray(f, dtype=np.float64)
    n = f.size
    d = np.full(n, np.inf)
    arg = np.full(n, -1, dtype=np.intp)
    sites = np.flatnonzero(np.isfinite(f))
    if sites.size == 0:
        return d, arg
    v = np.zeros(sites.size, dtype=np.intp)
    z = np.zeros(sites.size + 1)
    k = 0
    v[0], z[0], z[1] = sites[0], -np.inf, np.inf
    for q in sites[1:]:
        s = _intersection(f, v[k], q)
        while s <= z[k]:
            k -= 1
            s = _intersection(f, v[k], q)
        k += 1
        v[k], z[k], z[k + 1] = q, s, np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        arg[q] = v[k]
        d[q] = (q - v[k]) ** 2 + f[v[k]]
    return d, arg


def distance_transform(sites):
    """Distance from every cell to its nearest nonzero cell of ``sites``.

    Returns ``(dist, rows, cols)``; ``rows``/``cols`` index the nearest site,
    preferring the smallest column and then the smallest row among equals.
    """
    sites = np.asarray(sites) != 0
    height, width = sites.shape
    f = np.where(sites, 0.0, np.inf)
    column_d = np.empty((height, width))
    column_arg = np.empty((height, width), dtype=np.intp)
    for j in range(width):
        column_d[:, j], column_arg[:, j] = lower_envelope(f[:, j])
    dist2 = np.empty((height, width))
    rows = np.full((height, width), -1, dtype=np.intp)
    cols = np.full((height, width), -1, dtype=np.intp)
    for i in range(height):
        dist2[i], cols[i] = lower_envelope(column_d[i])
        found = cols[i] >= 0
        rows[i, found] = column_arg[i, cols[i, found]]
    return np.sqrt(dist2), rows, cols
