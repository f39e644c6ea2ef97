"""Global nearest neighbour assignment.

The optimization itself is scipy's ``linear_sum_assignment``, which accepts
rectangular matrices and saturates the smaller side. Among several optimal
assignments the one whose pair list, sorted by track, is lexicographically
smallest is returned.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cost import CostMatrix

TIE_TOLERANCE = 1e-12

_NO_INDEX = np.zeros(0, dtype=np.int64)


@dataclass(frozen=True)
class Assignment:
    """Matched (track, obs) pairs sorted by track and the leftovers."""

    pairs: tuple
    unassigned_tracks: tuple
    unassigned_obs: tuple

    @classmethod
    def empty(cls, n_tracks, n_obs):
        return cls((), tuple(range(n_tracks)), tuple(range(n_obs)))


def forbidden_mask(costs, forbid_above=None):
    """Entries that may not be assigned: infinite or >= forbid_above."""
    mask = ~np.isfinite(costs)
    if forbid_above is not None:
        mask |= costs >= forbid_above
    return mask


def _uncontested(matrix, forbid_above):
    """
    Assignment when every item of the smaller side has a distinct favourite

    Each of them then gets its own minimum, which no other assignment can
    beat; ``argmin`` keeps the lowest index among equal minima.
    """
    n_tracks, n_obs = matrix.shape
    if n_tracks <= n_obs:
        rows = np.arange(n_tracks)
        cols = matrix.argmin(axis=1)
        favourites = cols
    else:
        cols = np.arange(n_obs)
        rows = matrix.argmin(axis=0)
        favourites = rows
    if len(set(favourites.tolist())) != len(favourites):
        return None
    chosen = matrix[rows, cols]
    if not np.isfinite(chosen).all():
        return None
    if forbid_above is not None and not (chosen < forbid_above).all():
        return None
    if n_tracks > n_obs:
        order = np.argsort(rows)
        rows, cols = rows[order], cols[order]
    return rows, cols


def _reassignment(start, column, assigned, owner, options):
    """
    Moves giving ``column`` to row ``start`` along tight edges

    Rows up to ``start`` keep their columns, except ``start`` itself.

    Returns:
        * moves (list): (row, column) pairs, None when no cycle exists
    """
    target = assigned[start]
    visited = {column}

    def search(row):
        for candidate in options[row]:
            if candidate == target:
                return [(row, candidate)]
            if candidate in visited or owner[candidate] <= start:
                continue
            visited.add(candidate)
            rest = search(owner[candidate])
            if rest is not None:
                return [(row, candidate)] + rest
        return None

    displaced = owner[column]
    if displaced <= start:
        return None
    rest = search(displaced)
    if rest is None:
        return None
    return [(start, column)] + rest


def _lexicographic_optimum(matrix, rows, cols):
    """
    Smallest optimal assignment in lexicographic order

    The matrix is padded to a square with zero cost rows or columns. Column
    potentials from a Bellman-Ford pass over the reassignment graph give
    reduced costs that vanish exactly on the edges of optimal assignments;
    rows are then fixed in order to their smallest column that still
    completes to an optimal assignment.

    Arguments:
        * matrix (numpy.ndarray): finite costs
        * rows, cols (numpy.ndarray): one optimal assignment

    Returns:
        * rows, cols (numpy.ndarray): lexicographically smallest optimal
            assignment, sorted by row
    """
    n_tracks, n_obs = matrix.shape
    size = max(n_tracks, n_obs)
    square = np.zeros((size, size))
    square[:n_tracks, :n_obs] = matrix
    assigned = np.empty(size, dtype=np.int64)
    assigned[rows] = cols
    if n_tracks < n_obs:
        assigned[n_tracks:] = np.setdiff1d(np.arange(size), cols)
    elif n_tracks > n_obs:
        assigned[np.setdiff1d(np.arange(size), rows)] = np.arange(
            n_obs, size)

    # moves[i, j]: change in cost when row i leaves its column for column j
    moves = square - square[np.arange(size), assigned][:, None]
    tolerance = TIE_TOLERANCE * max(1.0, float(np.abs(square).max())) * size
    potential = np.zeros(size)
    for _ in range(size):
        relaxed = np.minimum(
            potential, (potential[assigned][:, None] + moves).min(axis=0))
        if (relaxed >= potential - tolerance).all():
            break
        potential = relaxed
    tight = moves + potential[assigned][:, None] - potential <= tolerance
    if np.count_nonzero(tight) == size:
        return rows, cols

    options = [np.flatnonzero(line).tolist() for line in tight]
    owner = np.empty(size, dtype=np.int64)
    owner[assigned] = np.arange(size)
    assigned, owner = assigned.tolist(), owner.tolist()
    for row in range(size):
        for column in options[row]:
            if column >= assigned[row]:
                break
            cycle = _reassignment(row, column, assigned, owner, options)
            if cycle is not None:
                for moved, taken in cycle:
                    assigned[moved] = taken
                    owner[taken] = moved
                break
    pairs = [(row, assigned[row]) for row in range(n_tracks)
             if assigned[row] < n_obs]
    return (np.array([row for row, _ in pairs], dtype=np.int64),
            np.array([col for _, col in pairs], dtype=np.int64))


def solve_assignment(matrix, forbid_above=None):
    """
    Minimum cost one-to-one assignment over a raw cost array

    Forbidden entries are replaced by a cost larger than the sum of every
    allowed entry, so the solver first uses as many allowed pairs as it can
    and then minimizes their total; forbidden pairs are dropped afterwards.
    Ties between optimal assignments go to the smallest pair list.

    Arguments:
        * matrix (numpy.ndarray): n_tracks x n_obs costs, no NaN
        * forbid_above (float): entries >= this value are unassignable

    Returns:
        * rows (numpy.ndarray): assigned track indices, increasing
        * cols (numpy.ndarray): observation index of each assigned track
    """
    n_tracks, n_obs = matrix.shape
    if n_tracks == 0 or n_obs == 0:
        return _NO_INDEX, _NO_INDEX
    uncontested = _uncontested(matrix, forbid_above)
    if uncontested is not None:
        return uncontested

    forbidden = forbidden_mask(matrix, forbid_above)
    if forbidden.all():
        return _NO_INDEX, _NO_INDEX
    if forbidden.any():
        matrix = np.where(forbidden, matrix[~forbidden].sum() + 1.0, matrix)
    rows, cols = linear_sum_assignment(matrix)
    rows, cols = _lexicographic_optimum(matrix, rows, cols)
    keep = ~forbidden[rows, cols]
    return rows[keep], cols[keep]


def hungarian_solve(costs, forbid_above=None):
    """
    Minimum cost one-to-one assignment of tracks to observations

    Arguments:
        * costs (CostMatrix or array_like): n_tracks x n_obs costs
        * forbid_above (float): entries >= this value are unassignable

    Returns:
        * assignment (Assignment): pairs and unassigned indices
    """
    if not isinstance(costs, CostMatrix):
        costs = CostMatrix(costs)
    n_tracks, n_obs = costs.shape
    rows, cols = solve_assignment(costs.costs, forbid_above)
    pairs = tuple(zip(rows.tolist(), cols.tolist()))
    used_tracks = set(rows.tolist())
    used_obs = set(cols.tolist())
    return Assignment(
        pairs=pairs,
        unassigned_tracks=tuple(
            i for i in range(n_tracks) if i not in used_tracks),
        unassigned_obs=tuple(j for j in range(n_obs) if j not in used_obs),
    )
