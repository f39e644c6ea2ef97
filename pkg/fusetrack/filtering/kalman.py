"""Linear Kalman filter over the [x, y, vx, vy] obstacle state.

The observation matrix is the identity: sensors report the full state.
Single-state functions are thin wrappers around the ``batch_*`` versions
the tracker uses on stacks of tracks.
"""
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError, SingularInnovationError
from ..sensors import SensorId

STATE_DIM = 4
SYMMETRY_TOL = 1e-9


def as_finite(value, shape, name):
    """
    Float array of the expected shape with only finite entries

    Arguments:
        * value (array_like): input to check
        * shape (tuple): required shape
        * name (str): argument name used in the error message

    Returns:
        * array (numpy.ndarray): float copy of value

    Raises:
        * InvalidInputError: wrong shape or non-finite entries
    """
    array = np.array(value, dtype=float)
    if array.shape != tuple(shape):
        raise InvalidInputError(
            "{} must have shape {}, got {}".format(name, shape, array.shape))
    if not np.isfinite(array).all():
        raise InvalidInputError("{} has non-finite entries".format(name))
    return array


def symmetrize(matrices):
    """(M + Mᵀ) / 2 over the last two axes."""
    return 0.5 * (matrices + np.swapaxes(matrices, -1, -2))


def check_psd(matrix, name, strict=False):
    """
    Reject matrices that are not symmetric positive (semi)definite

    Arguments:
        * matrix (numpy.ndarray): 4x4 matrix
        * name (str): argument name used in the error message
        * strict (bool): require positive definiteness

    Raises:
        * InvalidInputError: asymmetric or indefinite matrix
    """
    if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOL:
        raise InvalidInputError("{} is not symmetric".format(name))
    if strict:
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            raise InvalidInputError(
                "{} is not positive definite".format(name))
    elif np.linalg.eigvalsh(matrix).min() < -SYMMETRY_TOL:
        raise InvalidInputError(
            "{} is not positive semidefinite".format(name))


@dataclass(frozen=True, eq=False)
class StateEstimate:
    """Mean [x, y, vx, vy] in the ego frame and its 4x4 covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, 'mean', as_finite(self.mean, (STATE_DIM,), 'mean'))
        object.__setattr__(
            self, 'cov', as_finite(self.cov, (STATE_DIM, STATE_DIM), 'cov'))
        self.mean.flags.writeable = False
        self.cov.flags.writeable = False


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Process (P_S) and observation (N_S) covariances of one sensor."""

    process_cov: np.ndarray
    obs_cov: np.ndarray
    sensor_id: SensorId

    def __post_init__(self):
        process_cov = as_finite(
            self.process_cov, (STATE_DIM, STATE_DIM), 'process_cov')
        obs_cov = as_finite(self.obs_cov, (STATE_DIM, STATE_DIM), 'obs_cov')
        check_psd(process_cov, 'process_cov')
        check_psd(obs_cov, 'obs_cov', strict=True)
        process_cov.flags.writeable = False
        obs_cov.flags.writeable = False
        object.__setattr__(self, 'process_cov', process_cov)
        object.__setattr__(self, 'obs_cov', obs_cov)
        object.__setattr__(self, 'sensor_id', SensorId.parse(self.sensor_id))

    @classmethod
    def diagonal(cls, sensor_id, obs_diag, process_diag):
        """
        Noise model with diagonal covariances

        Arguments:
            * sensor_id (SensorId): sensor the model belongs to
            * obs_diag (list): 4 variances of N_S
            * process_diag (list): 4 variances of P_S

        Returns:
            * model (NoiseModel): new noise model
        """
        return cls(
            process_cov=np.diag(np.asarray(process_diag, dtype=float)),
            obs_cov=np.diag(np.asarray(obs_diag, dtype=float)),
            sensor_id=sensor_id,
        )


@dataclass(frozen=True, eq=False)
class Innovation:
    """Residual ν = z - x̂, its covariance S and d² = νᵀ S⁻¹ ν."""

    residual: np.ndarray
    cov: np.ndarray
    d2: float


def whitening_factors(covs, labels=None):
    """
    Inverse Cholesky factors of a stack of covariances

    For S = L Lᵀ returns L⁻¹, so that S⁻¹ = L⁻ᵀ L⁻¹ and
    νᵀ S⁻¹ ν = |L⁻¹ ν|².

    Arguments:
        * covs (numpy.ndarray): (..., 4, 4) positive definite matrices
        * labels (list): optional names (track ids) of the stacked matrices

    Returns:
        * factors (numpy.ndarray): (..., 4, 4) lower triangular inverses

    Raises:
        * SingularInnovationError: a matrix is not positive definite
    """
    try:
        lower = np.linalg.cholesky(covs)
    except np.linalg.LinAlgError:
        raise _singular_error(covs, labels)
    return np.linalg.inv(lower)


def inverse_covariances(covs, labels=None):
    """
    Inverses of a stack of covariances

    One LAPACK call for the whole stack. A matrix counts as singular when
    the factorization fails or its inverse has a non-positive diagonal.

    Arguments:
        * covs (numpy.ndarray): (n, 4, 4) covariances
        * labels (list): optional names (track ids) of the stacked matrices

    Returns:
        * inverses (numpy.ndarray): (n, 4, 4) inverse matrices

    Raises:
        * SingularInnovationError: a matrix is singular or indefinite
    """
    try:
        inverses = np.linalg.inv(covs)
    except np.linalg.LinAlgError:
        raise _singular_error(covs, labels)
    if not (np.diagonal(inverses, axis1=-2, axis2=-1) > 0).all():
        raise _singular_error(covs, labels)
    return inverses


def _singular_error(covs, labels):
    if covs.ndim == 2:
        return SingularInnovationError("covariance is not positive definite")
    flat = covs.reshape(-1, STATE_DIM, STATE_DIM)
    for index, matrix in enumerate(flat):
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            label = labels[index] if labels is not None else index
            return SingularInnovationError(
                "covariance is not positive definite", track_id=label)
    return SingularInnovationError("covariance is not positive definite")


def batch_predict(means, covs, transition, process_cov):
    """
    Prediction step over a stack of states

    Arguments:
        * means (numpy.ndarray): (n, 4) state means
        * covs (numpy.ndarray): (n, 4, 4) state covariances
        * transition (numpy.ndarray): 4x4 transition F
        * process_cov (numpy.ndarray): 4x4 process noise P_S

    Returns:
        * means (numpy.ndarray): F x for every state
        * covs (numpy.ndarray): F P Fᵀ + P_S, symmetrized
    """
    means = means @ transition.T
    covs = transition @ covs @ transition.T + process_cov
    return means, symmetrize(covs)


def batch_update(means, covs, observations, obs_cov, labels=None,
                 inverses=None):
    """
    Update step over a stack of (state, observation) pairs, H = I

    With K = P S⁻¹ the corrected covariance P - K S Kᵀ equals P - K P.

    Arguments:
        * means (numpy.ndarray): (n, 4) predicted means
        * covs (numpy.ndarray): (n, 4, 4) predicted covariances
        * observations (numpy.ndarray): (n, 4) observations z
        * obs_cov (numpy.ndarray): 4x4 observation noise N_S
        * labels (list): optional track ids for error messages
        * inverses (numpy.ndarray): S⁻¹ when the caller already holds it

    Returns:
        * means (numpy.ndarray): corrected means
        * covs (numpy.ndarray): corrected covariances, symmetrized
        * residuals (numpy.ndarray): (n, 4) innovations ν
        * innovation_covs (numpy.ndarray): (n, 4, 4) innovation covariances S
        * d2 (numpy.ndarray): (n,) normalized innovations

    Raises:
        * SingularInnovationError: some S is singular
    """
    innovation_covs = covs + obs_cov
    if inverses is None:
        inverses = inverse_covariances(innovation_covs, labels)
    gains = covs @ inverses
    residuals = observations - means
    means = means + (gains @ residuals[:, :, None])[:, :, 0]
    covs = covs - gains @ covs
    d2 = (residuals * (inverses @ residuals[:, :, None])[:, :, 0]).sum(axis=1)
    return means, symmetrize(covs), residuals, innovation_covs, d2


def kalman_predict(state, transition, process_cov):
    """
    Kalman prediction of a single state

    Arguments:
        * state (StateEstimate): estimate at the previous step
        * transition (array_like): 4x4 transition F
        * process_cov (array_like): 4x4 process noise P_S

    Returns:
        * state (StateEstimate): predicted estimate
    """
    transition = as_finite(transition, (STATE_DIM, STATE_DIM), 'F')
    process_cov = as_finite(
        process_cov, (STATE_DIM, STATE_DIM), 'process_cov')
    means, covs = batch_predict(
        state.mean[None, :], state.cov[None, :, :], transition, process_cov)
    return StateEstimate(means[0], covs[0])


def kalman_update(predicted, z, obs_cov):
    """
    Kalman correction of a single state with an observation of it

    Arguments:
        * predicted (StateEstimate): predicted estimate
        * z (array_like): observed [x, y, vx, vy]
        * obs_cov (array_like): 4x4 observation noise N_S

    Returns:
        * state (StateEstimate): corrected estimate
        * innovation (Innovation): ν, S and d²

    Raises:
        * SingularInnovationError: S is not positive definite
    """
    z = as_finite(z, (STATE_DIM,), 'z')
    obs_cov = as_finite(obs_cov, (STATE_DIM, STATE_DIM), 'obs_cov')
    means, covs, residuals, innovation_covs, d2 = batch_update(
        predicted.mean[None, :],
        predicted.cov[None, :, :],
        z[None, :],
        obs_cov,
    )
    innovation = Innovation(
        residual=residuals[0], cov=innovation_covs[0], d2=float(d2[0]))
    return StateEstimate(means[0], covs[0]), innovation


def gate_distance(innovation):
    """
    Normalized innovation νᵀ S⁻¹ ν

    Arguments:
        * innovation (Innovation): residual and its covariance

    Returns:
        * d2 (float): squared Mahalanobis length of the residual

    Raises:
        * SingularInnovationError: S is not positive definite
    """
    residual = as_finite(innovation.residual, (STATE_DIM,), 'residual')
    cov = as_finite(innovation.cov, (STATE_DIM, STATE_DIM), 'cov')
    whitened = whitening_factors(cov) @ residual
    return float(whitened @ whitened)
