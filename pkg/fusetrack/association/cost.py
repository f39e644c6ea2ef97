"""Mahalanobis association costs between tracks and observations."""
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError
from ..filtering.kalman import (
    STATE_DIM,
    as_finite,
    check_psd,
    inverse_covariances,
)

COST_TRACK = 'track'
COST_TRACK_PLUS_OBS = 'track_plus_obs'
COST_COVARIANCES = (COST_TRACK, COST_TRACK_PLUS_OBS)


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Squared Mahalanobis distances, one row per track, +inf forbids."""

    costs: np.ndarray

    def __post_init__(self):
        costs = np.array(self.costs, dtype=float)
        if costs.ndim != 2:
            raise InvalidInputError("costs must be a 2-d matrix")
        if np.isnan(costs).any() or (costs < 0).any():
            raise InvalidInputError("costs must be >= 0 or +inf")
        costs.flags.writeable = False
        object.__setattr__(self, 'costs', costs)

    @property
    def shape(self):
        return self.costs.shape

    def total(self, pairs):
        """Sum of the costs of the given (track, obs) pairs."""
        return float(sum(self.costs[row, col] for row, col in pairs))


def quadratic_costs(means, inverses, observations):
    """
    (x_k - z_i)ᵀ A_k (x_k - z_i) for every track k and observation i

    The form is expanded as xᵀAx - 2 (Ax)ᵀz + zᵀAz, so every term is
    a plain matrix product. Rounding below zero is clipped.

    Arguments:
        * means (numpy.ndarray): (n, 4) track means x_k
        * inverses (numpy.ndarray): (n, 4, 4) symmetric weights A_k
        * observations (numpy.ndarray): (m, 4) observations z_i

    Returns:
        * costs (numpy.ndarray): (n, m) matrix
    """
    n_tracks, n_obs = len(means), len(observations)
    projected = (inverses @ means[:, :, None])[:, :, 0]
    own = (projected * means).sum(axis=1)
    outer = (observations[:, :, None] * observations[:, None, :]).reshape(
        n_obs, STATE_DIM * STATE_DIM)
    costs = inverses.reshape(n_tracks, STATE_DIM * STATE_DIM) @ outer.T
    costs -= 2.0 * (projected @ observations.T)
    costs += own[:, None]
    return np.maximum(costs, 0.0, out=costs)


def cost_matrix(means, covs, observations, obs_cov=None,
                cost_covariance=COST_TRACK, labels=None):
    """
    Squared Mahalanobis distances over stacked arrays

    Arguments:
        * means (numpy.ndarray): (n, 4) track means
        * covs (numpy.ndarray): (n, 4, 4) track covariances
        * observations (numpy.ndarray): (m, 4) observations
        * obs_cov (numpy.ndarray): 4x4 observation noise, needed for
            ``track_plus_obs``
        * cost_covariance (str): 'track' weighs with the track covariance
            alone, 'track_plus_obs' with track + observation covariance
        * labels (list): track ids for error messages

    Returns:
        * costs (numpy.ndarray): (n, m) matrix of d²

    Raises:
        * SingularInnovationError: a weighting covariance is singular
    """
    n_tracks, n_obs = len(means), len(observations)
    if n_tracks == 0 or n_obs == 0:
        return np.zeros((n_tracks, n_obs))
    if cost_covariance == COST_TRACK:
        weights = covs
    elif cost_covariance == COST_TRACK_PLUS_OBS:
        weights = covs + obs_cov
    else:
        raise InvalidInputError(
            "cost_covariance must be one of {}, got {!r}".format(
                COST_COVARIANCES, cost_covariance))
    return quadratic_costs(
        means, inverse_covariances(weights, labels), observations)


def mahalanobis_cost(tracks, observations, obs_cov,
                     cost_covariance=COST_TRACK):
    """
    Association cost d²_{k,i} between every track and every observation

    Arguments:
        * tracks (list): StateEstimate of each compensated track
        * observations (list): observed 4-vectors
        * obs_cov (array_like): 4x4 observation noise, positive definite
        * cost_covariance (str): 'track' (default) or 'track_plus_obs'

    Returns:
        * costs (CostMatrix): n_tracks x n_obs matrix

    Raises:
        * SingularInnovationError: a track covariance is singular; the
            error's track_id is the track index
    """
    obs_cov = as_finite(obs_cov, (STATE_DIM, STATE_DIM), 'obs_cov')
    check_psd(obs_cov, 'obs_cov', strict=True)
    means = np.array([track.mean for track in tracks]).reshape(-1, STATE_DIM)
    covs = np.array([track.cov for track in tracks]).reshape(
        -1, STATE_DIM, STATE_DIM)
    observations = as_finite(
        np.reshape(observations, (-1, STATE_DIM)),
        (len(observations), STATE_DIM),
        'observations',
    )
    return CostMatrix(cost_matrix(
        means, covs, observations, obs_cov, cost_covariance))
