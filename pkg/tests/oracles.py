"""Independent brute-force oracles used to pin expected values.

Nothing here shares code paths with the package solvers: entropy programs
are checked by dense grids over the weight simplex, linear programs by
enumerating basic feasible points, and covers by exhausting vertex subsets.
"""

from __future__ import annotations

import itertools

import numpy as np


def entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    pos = p[p > 1e-300]
    return float(-(pos * np.log2(pos)).sum())


def simplex_grid(m: int, steps: int) -> np.ndarray:
    """All weight vectors with entries k/steps summing to 1, shape (G, m)."""
    out = []
    for comp in itertools.combinations_with_replacement(range(m), steps):
        out.append(np.bincount(comp, minlength=m) / steps)
    return np.array(out)


def _marginal_table(points: np.ndarray, dims, weights: np.ndarray) -> list[np.ndarray]:
    """Marginals for a batch of weight vectors: list of (G, n_j) arrays."""
    res = []
    for j, n in enumerate(dims):
        table = np.zeros((weights.shape[0], n))
        for e in range(points.shape[0]):
            table[:, points[e, j]] += weights[:, e]
        res.append(table)
    return res


def grid_max_weighted_entropy(points: np.ndarray, dims, theta, steps: int) -> float:
    """Dense-grid maximum of sum_j theta_j H(p_j) over joint weights, in bits."""
    weights = simplex_grid(points.shape[0], steps)
    total = np.zeros(weights.shape[0])
    for j, table in enumerate(_marginal_table(points, dims, weights)):
        if theta[j] == 0:
            continue
        safe = np.where(table > 0, table, 1.0)
        total += theta[j] * (-(table * np.log2(safe)).sum(axis=1))
    return float(total.max())


def grid_max_min_entropy(points: np.ndarray, dims, xi, steps: int) -> float:
    """Dense-grid maximum of min_j H(p_j)/xi_j (zero-weight legs skipped)."""
    weights = simplex_grid(points.shape[0], steps)
    tables = _marginal_table(points, dims, weights)
    terms = []
    for j, table in enumerate(tables):
        if xi[j] == 0:
            continue
        safe = np.where(table > 0, table, 1.0)
        terms.append((-(table * np.log2(safe)).sum(axis=1)) / xi[j])
    return float(np.min(terms, axis=0).max())


def grid_min_convex(points: np.ndarray, dims, fn, steps: int) -> float:
    """Dense-grid minimum of a marginal-tuple function over joint weights."""
    weights = simplex_grid(points.shape[0], steps)
    tables = _marginal_table(points, dims, weights)
    best = np.inf
    for g in range(weights.shape[0]):
        best = min(best, fn([table[g] for table in tables]))
    return float(best)


def brute_force_lp(c: np.ndarray, a: np.ndarray, senses, b: np.ndarray) -> float:
    """Minimum of c.x over {A x (sense) b, x >= 0} by vertex enumeration."""
    c = np.asarray(c, float)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    n = c.size
    rows = [(a[i], b[i]) for i in range(b.size)]
    rows += [(-np.eye(n)[i], 0.0) for i in range(n)]  # x_i >= 0 as -x_i <= 0 boundary
    best = np.inf
    for combo in itertools.combinations(range(len(rows)), n):
        mat = np.array([rows[i][0] for i in combo])
        rhs = np.array([rows[i][1] for i in combo])
        if abs(np.linalg.det(mat)) < 1e-12:
            continue
        x = np.linalg.solve(mat, rhs)
        if np.any(x < -1e-9):
            continue
        ax = a @ x
        ok = True
        for i, s in enumerate(senses):
            if s == "<=" and ax[i] > b[i] + 1e-9:
                ok = False
            elif s == ">=" and ax[i] < b[i] - 1e-9:
                ok = False
            elif s == "=" and abs(ax[i] - b[i]) > 1e-9:
                ok = False
        if ok:
            best = min(best, float(c @ x))
    return best


def brute_force_vertex_cover(parts, edges) -> int:
    """Smallest vertex set hitting every edge, by subset enumeration."""
    vertices = [(j, v) for j, n in enumerate(parts) for v in range(n)]
    for size in range(len(vertices) + 1):
        for combo in itertools.combinations(vertices, size):
            chosen = set(combo)
            if all(any((j, e[j]) in chosen for j in range(len(parts))) for e in edges):
                return size
    return len(vertices)
