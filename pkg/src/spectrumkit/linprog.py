"""A small dense two-phase simplex solver with dual extraction.

The problems solved here are tiny (at most a few hundred variables), so the
solver favors determinism over speed: Bland's anti-cycling rule throughout,
dense tableaus, fixed tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9

LEQ = "<="
EQ = "="
GEQ = ">="


class LpError(RuntimeError):
    pass


class LpInfeasible(LpError):
    """The constraint system has no feasible point."""


class LpUnbounded(LpError):
    """The objective is unbounded below on the feasible region."""


@dataclass(frozen=True)
class LinearProgram:
    """min c.x  subject to  A x (sense_i) b  and  x >= 0.

    ``senses`` holds one of ``"<=", "=", ">="`` per row.  Nonnegativity is
    the only variable bound; callers model other bounds with extra rows.
    """

    objective: np.ndarray
    lhs: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        a = np.atleast_2d(np.asarray(self.lhs, dtype=float))
        b = np.asarray(self.rhs, dtype=float)
        if a.shape != (b.size, c.size):
            raise ValueError(f"inconsistent LP shapes: A {a.shape}, b {b.size}, c {c.size}")
        if len(self.senses) != b.size:
            raise ValueError("one sense per row required")
        if any(s not in (LEQ, EQ, GEQ) for s in self.senses):
            raise ValueError(f"unknown row sense in {self.senses}")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "lhs", a)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "senses", tuple(self.senses))

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.rhs.size

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective.tolist(),
            "lhs": self.lhs.tolist(),
            "senses": list(self.senses),
            "rhs": self.rhs.tolist(),
        }


@dataclass(frozen=True)
class LpSolution:
    value: float
    x: np.ndarray
    y: np.ndarray  # row duals: value == b.y, sign convention y_i >= 0 for ">=" rows
    iterations: int


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    """Pivot on tableau row ``row`` (1-based; row 0 is the cost row)."""
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row - 1] = col


def _bland_simplex(tableau: np.ndarray, basis: np.ndarray, cost: np.ndarray, ncols: int) -> int:
    """Run primal simplex on rows [1:]; row 0 is the reduced-cost row.

    Returns the number of pivots.  Raises LpUnbounded when a negative reduced
    cost column has no positive entry.
    """
    m = tableau.shape[0] - 1
    iters = 0
    while True:
        red = tableau[0, :ncols]
        enter = -1
        for j in range(ncols):
            if red[j] < -TOL:
                enter = j
                break
        if enter < 0:
            return iters
        col = tableau[1:, enter]
        best_row, best_ratio = -1, np.inf
        for i in range(m):
            if col[i] > TOL:
                ratio = tableau[1 + i, -1] / col[i]
                if ratio < best_ratio - TOL or (
                    abs(ratio - best_ratio) <= TOL and (best_row < 0 or basis[i] < basis[best_row])
                ):
                    best_row, best_ratio = i, ratio
        if best_row < 0:
            raise LpUnbounded("unbounded objective")
        _pivot(tableau, basis, 1 + best_row, enter)
        iters += 1
        if iters > 50000:
            raise LpError("simplex iteration limit hit")


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase simplex.  Returns optimal value, primal x, and row duals y.

    The duals satisfy strong duality ``b.y == value`` and the usual sign
    convention for a minimization: ``y_i >= 0`` on ``>=`` rows, ``y_i <= 0``
    on ``<=`` rows, free on equalities.
    """
    n, m = lp.n_vars, lp.n_rows
    a = lp.lhs.copy()
    b = lp.rhs.copy()
    senses = list(lp.senses)
    flipped = np.zeros(m, dtype=bool)
    for i in range(m):
        if b[i] < 0:
            a[i] *= -1.0
            b[i] *= -1.0
            flipped[i] = True
            senses[i] = {LEQ: GEQ, GEQ: LEQ, EQ: EQ}[senses[i]]

    # standard form columns: x | slack/surplus | artificials
    slack_cols, art_cols = [], []
    cols = [a]
    for i, s in enumerate(senses):
        if s == LEQ:
            e = np.zeros((m, 1))
            e[i, 0] = 1.0
            cols.append(e)
            slack_cols.append((i, n + len(slack_cols)))
        elif s == GEQ:
            e = np.zeros((m, 1))
            e[i, 0] = -1.0
            cols.append(e)
            slack_cols.append((i, n + len(slack_cols)))
    n_slack = len(slack_cols)
    a_std = np.hstack(cols) if len(cols) > 1 else a.copy()
    # artificials: for >= and = rows (and <= rows whose slack already gives a basis)
    basis = -np.ones(m, dtype=int)
    for i, s in enumerate(senses):
        if s == LEQ:
            j = next(c for r, c in slack_cols if r == i)
            basis[i] = j
    need_art = [i for i in range(m) if basis[i] < 0]
    for k, i in enumerate(need_art):
        e = np.zeros((m, 1))
        e[i, 0] = 1.0
        a_std = np.hstack([a_std, e])
        basis[i] = n + n_slack + k
        art_cols.append(n + n_slack + k)
    total = a_std.shape[1]

    tableau = np.zeros((m + 1, total + 1))
    tableau[1:, :total] = a_std
    tableau[1:, -1] = b
    iters = 0

    if art_cols:
        # phase 1: minimize the sum of artificials
        cost1 = np.zeros(total)
        cost1[art_cols] = 1.0
        tableau[0, :total] = cost1
        for i in range(m):
            if basis[i] in art_cols:
                tableau[0] -= tableau[1 + i]
        iters += _bland_simplex(tableau, basis, cost1, total)
        if tableau[0, -1] < -1e-7:
            raise LpInfeasible(f"phase-1 objective {-tableau[0, -1]:.3e} > 0")
        # drive leftover artificials out of the basis where possible
        for i in range(m):
            if basis[i] in art_cols:
                pivoted = False
                for j in range(n + n_slack):
                    if abs(tableau[1 + i, j]) > TOL:
                        _pivot(tableau, basis, 1 + i, j)
                        pivoted = True
                        break
                if not pivoted:
                    # redundant row; keep the artificial pinned at zero
                    pass

    # phase 2
    ncols2 = n + n_slack
    cost2 = np.zeros(total)
    cost2[:n] = lp.objective
    tableau[0, :] = 0.0
    tableau[0, :total] = cost2
    for i in range(m):
        if tableau[0, basis[i]] != 0.0:
            tableau[0] -= tableau[0, basis[i]] * tableau[1 + i]
    iters += _bland_simplex(tableau, basis, cost2, ncols2)

    x_full = np.zeros(total)
    for i in range(m):
        x_full[basis[i]] = tableau[1 + i, -1]
    x = x_full[:n]
    value = float(lp.objective @ x)

    # duals from the final basis: y = B^{-T} c_B on the standard-form rows
    bmat = a_std[:, basis]
    cb = cost2[basis]
    y = np.linalg.solve(bmat.T, cb)
    y = np.where(flipped, -y, y)
    return LpSolution(value=value, x=x, y=y, iterations=iters)
