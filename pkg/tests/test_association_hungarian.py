#!/usr/bin/env python

"""Tests for `fusetrack` package."""

import itertools

import numpy as np
import pytest

from fusetrack.association.cost import (
    COST_TRACK_PLUS_OBS,
    CostMatrix,
    cost_matrix,
    mahalanobis_cost,
)
from fusetrack.association.hungarian import hungarian_solve, solve_assignment
from fusetrack.exceptions import InvalidInputError, SingularInnovationError
from fusetrack.filtering.kalman import Innovation, StateEstimate, gate_distance


def brute_force_minimum(costs):
    """Smallest total over every injection of the smaller side."""
    n_tracks, n_obs = costs.shape
    if n_tracks <= n_obs:
        return min(
            sum(costs[row, col] for row, col in enumerate(cols))
            for cols in itertools.permutations(range(n_obs), n_tracks))
    return min(
        sum(costs[row, col] for col, row in enumerate(rows))
        for rows in itertools.permutations(range(n_tracks), n_obs))


@pytest.fixture
def rng():
    """Seeded random generator.

    See more at: http://doc.pytest.org/en/latest/fixture.html
    """
    return np.random.default_rng(2024)


def test_cost_zero_at_observation():
    """Tests a zero cost when the track sits on the observation."""
    costs = mahalanobis_cost(
        [StateEstimate([5, 2, -1, 0], np.eye(4))], [[5, 2, -1, 0]],
        np.eye(4))
    assert costs.costs[0, 0] == 0.0


def test_cost_identity_covariance():
    """Tests the Euclidean reduction with an identity covariance."""
    costs = mahalanobis_cost(
        [StateEstimate(np.zeros(4), np.eye(4))], [[1, 1, 1, 1]], np.eye(4))
    assert costs.costs[0, 0] == pytest.approx(4.0)


def test_cost_diagonal_covariance():
    """Tests the cost with a diagonal track covariance."""
    costs = mahalanobis_cost(
        [StateEstimate(np.zeros(4), np.diag([0.25, 0.25, 1, 1]))],
        [[1, 0, 0, 0]], np.eye(4))
    assert costs.costs[0, 0] == pytest.approx(4.0)


def test_cost_track_plus_obs():
    """Tests the cost weighted by track and observation covariances."""
    costs = mahalanobis_cost(
        [StateEstimate(np.zeros(4), np.eye(4))], [[1, 1, 1, 1]], np.eye(4),
        cost_covariance=COST_TRACK_PLUS_OBS)
    assert costs.costs[0, 0] == pytest.approx(2.0)


def test_cost_shape():
    """Tests one row per track and one column per observation."""
    tracks = [StateEstimate(np.full(4, k), np.eye(4)) for k in range(3)]
    costs = mahalanobis_cost(tracks, np.zeros((2, 4)), np.eye(4))
    assert costs.shape == (3, 2)
    np.testing.assert_allclose(costs.costs[:, 0], [0, 4, 16])


def test_cost_singular_names_track():
    """Tests that a singular covariance reports the track id."""
    covs = np.stack([np.eye(4), np.zeros((4, 4))])
    with pytest.raises(SingularInnovationError) as error:
        cost_matrix(np.zeros((2, 4)), covs, np.ones((1, 4)), labels=[7, 9])
    assert error.value.track_id == 9


def test_cost_unknown_mode():
    """Tests rejection of an unknown weighting mode."""
    with pytest.raises(InvalidInputError):
        cost_matrix(np.zeros((1, 4)), np.eye(4)[None], np.ones((1, 4)),
                    cost_covariance='obs')


def test_cost_matrix_validation():
    """Tests that negative and NaN costs are refused."""
    with pytest.raises(InvalidInputError):
        CostMatrix([[1.0, -1.0]])
    with pytest.raises(InvalidInputError):
        CostMatrix([[np.nan]])
    assert CostMatrix([[1.0, np.inf]]).total([(0, 0)]) == 1.0


def test_solve_square_example():
    """Tests the diagonal assignment of a 2x2 matrix."""
    assignment = hungarian_solve([[1, 2], [2, 1]])
    assert assignment.pairs == ((0, 0), (1, 1))
    assert CostMatrix([[1, 2], [2, 1]]).total(assignment.pairs) == 2


def test_solve_forbidden_single_entry():
    """Tests that a single forbidden entry leaves both sides unassigned."""
    assignment = hungarian_solve([[5]], forbid_above=4)
    assert assignment.pairs == ()
    assert assignment.unassigned_tracks == (0,)
    assert assignment.unassigned_obs == (0,)


def test_solve_rectangular_example():
    """Tests two tracks against three observations."""
    assignment = hungarian_solve([[1, 3, 5], [2, 0, 9]])
    assert assignment.pairs == ((0, 0), (1, 1))
    assert assignment.unassigned_obs == (2,)
    assert assignment.unassigned_tracks == ()


def test_solve_empty():
    """Tests empty problems."""
    assignment = hungarian_solve(np.zeros((0, 3)))
    assert assignment.pairs == ()
    assert assignment.unassigned_obs == (0, 1, 2)
    assignment = hungarian_solve(np.zeros((2, 0)))
    assert assignment.unassigned_tracks == (0, 1)


def test_solve_prefers_more_allowed_pairs():
    """Tests that forbidden entries never displace feasible pairs."""
    assignment = hungarian_solve([[1, 2], [3, np.inf]])
    assert assignment.pairs == ((0, 1), (1, 0))


def test_solve_drops_forbidden_pairs():
    """Tests infinite entries in a partially forbidden matrix."""
    assignment = hungarian_solve([[np.inf, 1], [np.inf, np.inf]])
    assert assignment.pairs == ((0, 1),)
    assert assignment.unassigned_tracks == (1,)
    assert assignment.unassigned_obs == (0,)


def test_solve_matches_brute_force(rng):
    """Tests optimality against exhaustive search on random matrices."""
    for _ in range(1000):
        shape = tuple(rng.integers(1, 7, size=2))
        costs = rng.uniform(0, 10, size=shape)
        assignment = hungarian_solve(costs)
        assert len(assignment.pairs) == min(shape)
        total = CostMatrix(costs).total(assignment.pairs)
        assert total == pytest.approx(brute_force_minimum(costs), abs=1e-9)


def test_solve_permutation_equivariant(rng):
    """Tests that permuting rows and columns permutes the pairs."""
    costs = rng.uniform(0, 10, size=(5, 6))
    rows, cols = rng.permutation(5), rng.permutation(6)
    original = hungarian_solve(costs)
    permuted = hungarian_solve(costs[rows][:, cols])
    mapped = sorted((int(rows[r]), int(cols[c])) for r, c in permuted.pairs)
    assert mapped == sorted(original.pairs)


def test_solve_constant_shift(rng):
    """Tests that shifting every entry keeps the pairing."""
    costs = rng.uniform(0, 10, size=(6, 6))
    assert hungarian_solve(costs).pairs == hungarian_solve(costs + 3).pairs


def smallest_optimal_pairs(costs):
    """Sorted pair list of the lexicographically first optimal assignment."""
    n_tracks, n_obs = costs.shape
    if n_tracks <= n_obs:
        candidates = [
            tuple(enumerate(cols))
            for cols in itertools.permutations(range(n_obs), n_tracks)]
    else:
        candidates = [
            tuple(sorted((row, col) for col, row in enumerate(rows)))
            for rows in itertools.permutations(range(n_tracks), n_obs)]
    best = min(sum(costs[r, c] for r, c in pairs) for pairs in candidates)
    return min(pairs for pairs in candidates
               if sum(costs[r, c] for r, c in pairs) == best)


def test_solve_tie_goes_to_smallest_pair_list():
    """Tests the tie-break among equal-cost assignments."""
    assignment = hungarian_solve([[2, 2, 1], [2, 2, 1], [2, 2, 2]])
    assert assignment.pairs == ((0, 0), (1, 2), (2, 1))


def test_solve_all_equal_is_identity():
    """Tests that a constant matrix pairs each track with its own index."""
    assignment = hungarian_solve(np.ones((4, 4)))
    assert assignment.pairs == ((0, 0), (1, 1), (2, 2), (3, 3))


def test_solve_ties_match_exhaustive_search(rng):
    """Tests tie-breaking against exhaustive search on integer matrices."""
    for _ in range(500):
        shape = tuple(rng.integers(1, 6, size=2))
        costs = rng.integers(0, 3, size=shape).astype(float)
        assert hungarian_solve(costs).pairs == smallest_optimal_pairs(costs)


def test_solve_assignment_arrays():
    """Tests the raw index arrays returned for a rectangular problem."""
    rows, cols = solve_assignment(np.array([[4.0, 1.0], [1.0, 4.0],
                                            [0.5, 0.5]]))
    assert rows.tolist() == [0, 2]
    assert cols.tolist() == [1, 0]


def test_cost_matches_whitened_distance(rng):
    """Tests every cost entry against a Cholesky-whitened distance."""
    means = rng.normal(scale=20.0, size=(4, 4))
    a = rng.normal(size=(4, 4, 4))
    covs = a @ np.swapaxes(a, 1, 2) + 0.1 * np.eye(4)
    observations = rng.normal(scale=20.0, size=(3, 4))
    costs = cost_matrix(means, covs, observations)
    for k in range(4):
        for i in range(3):
            expected = gate_distance(
                Innovation(observations[i] - means[k], covs[k], 0.0))
            assert costs[k, i] == pytest.approx(expected, rel=1e-8, abs=1e-8)
