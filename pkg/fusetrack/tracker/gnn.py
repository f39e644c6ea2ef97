"""Global nearest neighbour fusion of asynchronous sensor frames.

Every frame goes through the same cycle: compensate the fused tracks for
the ego motion since the previous frame, associate them to the frame's
detections with the Hungarian method, gate and correct the pairs, then
remove the unassociated tracks and spawn tracks for the unassociated
detections.
"""
import logging

import numpy as np

from ..association.cost import COST_TRACK_PLUS_OBS, quadratic_costs
from ..association.hungarian import solve_assignment
from ..exceptions import StaleFrameError
from ..filtering.kalman import STATE_DIM, batch_update, inverse_covariances
from ..motion.ego import FrameStep, apply_affine, compensation_affine
from .config import VELOCITY_RELATIVE, TrackerConfig
from .types import FusedList

logger = logging.getLogger(__name__)

_NO_INDEX = np.zeros(0, dtype=np.int64)


def init_list(frame, noise, first_id=0):
    """
    Fused list built from the first frame

    Arguments:
        * frame (SensorFrame): first frame processed
        * noise (NoiseModel): noise model of the frame's sensor
        * first_id (int): id of the first track

    Returns:
        * fused (FusedList): one track per detection, in detection order
    """
    fused = FusedList.empty(frame.t, next_id=first_id, sensor=frame.sensor_id)
    return _append_new(
        fused, frame, noise.obs_cov, np.arange(len(frame)), frame.t)


def _append_new(fused, frame, obs_cov, indices, t):
    """Fused list with one new track per detection index appended."""
    count = len(indices)
    mask = frame.sensor_id.mask
    ids = np.arange(fused.next_id, fused.next_id + count, dtype=np.int64)
    return FusedList(
        t=t,
        ids=np.concatenate([fused.ids, ids]),
        means=np.concatenate(
            [fused.means, frame.measurements[indices].reshape(-1, STATE_DIM)]),
        covs=np.concatenate(
            [fused.covs, np.broadcast_to(obs_cov, (count,) + obs_cov.shape)]),
        ages=np.concatenate([fused.ages, np.ones(count, dtype=np.int64)]),
        misses=np.concatenate(
            [fused.misses, np.zeros(count, dtype=np.int64)]),
        created_at=np.concatenate([fused.created_at, np.full(count, t)]),
        updated_at=np.concatenate([fused.updated_at, np.full(count, t)]),
        last_sensor=np.concatenate(
            [fused.last_sensor, np.full(count, mask, dtype=np.int8)]),
        sensor_masks=np.concatenate(
            [fused.sensor_masks, np.full(count, mask, dtype=np.int8)]),
        next_id=fused.next_id + count,
        sensor=frame.sensor_id,
    )


def propagate(fused, t, ego, config, sensor):
    """
    Track means and covariances compensated into the ego frame at t

    Arguments:
        * fused (FusedList): list at its own timestamp
        * t (float): new frame time, > fused.t
        * ego (EgoMotion): latest ego motion, None if unknown
        * config (TrackerConfig): tracker settings
        * sensor (SensorId): sensor of the new frame

    Returns:
        * means (numpy.ndarray): (n, 4) compensated means
        * covs (numpy.ndarray): (n, 4, 4) compensated covariances
    """
    if not len(fused):
        return np.array(fused.means), np.array(fused.covs)
    frame_step = FrameStep.from_ego(ego, t - fused.t)
    v = omega = 0.0
    if ego is not None and config.velocity_reference == VELOCITY_RELATIVE:
        v, omega = ego.v, ego.omega
    transform, offset, noise_map = compensation_affine(
        frame_step, config.rotation_sign, v, omega)
    return apply_affine(
        fused.means, fused.covs, transform, offset,
        config.process_cov_for(sensor), noise_map)


def _inverses(covs, obs_cov, cost_covariance, labels):
    """Weights of the association cost and S⁻¹, in one inversion."""
    innovation_covs = covs + obs_cov
    if cost_covariance == COST_TRACK_PLUS_OBS:
        inverses = inverse_covariances(innovation_covs, labels)
        return inverses, inverses
    both = inverse_covariances(
        np.concatenate((covs, innovation_covs)), labels + labels)
    return both[:len(covs)], both[len(covs):]


def step(fused, frame, ego=None, config=None):
    """
    One fusion cycle of the fused list with a new sensor frame

    Arguments:
        * fused (FusedList): current fused list
        * frame (SensorFrame): new frame, frame.t > fused.t
        * ego (EgoMotion): latest ego motion at frame.t, None if unknown
        * config (TrackerConfig): tracker settings, defaults if None

    Returns:
        * fused (FusedList): updated tracks, then new tracks, at frame.t

    Raises:
        * StaleFrameError: frame.t <= fused.t; the input list is unchanged
        * SingularInnovationError: a track covariance is singular
    """
    if frame.t <= fused.t:
        raise StaleFrameError(
            "{} frame at t={} is not after fused list t={}".format(
                frame.sensor_id.value, frame.t, fused.t))
    if config is None:
        config = TrackerConfig()
    sensor = frame.sensor_id
    noise = config.noise_model(sensor)
    observations = frame.measurements
    n_tracks, n_obs = len(fused), len(observations)

    means, covs = propagate(fused, frame.t, ego, config, sensor)
    rows = cols = _NO_INDEX
    if n_tracks and n_obs:
        gamma = config.gamma
        labels = fused.ids.tolist()
        cost_inverses, innovation_inverses = _inverses(
            covs, noise.obs_cov, config.cost_covariance, labels)
        costs = quadratic_costs(means, cost_inverses, observations)
        rows, cols = solve_assignment(
            costs, gamma if config.pre_gate else None)
        gated = costs[rows, cols] < gamma
        rows, cols = rows[gated], cols[gated]
        if len(rows):
            updated = batch_update(
                means[rows], covs[rows], observations[cols], noise.obs_cov,
                inverses=innovation_inverses[rows])
            means[rows], covs[rows] = updated[0], updated[1]

    matched = np.zeros(n_tracks, dtype=bool)
    matched[rows] = True
    if n_obs == 0 and not config.empty_frame_deletes:
        misses = fused.misses
    else:
        misses = np.where(matched, 0, fused.misses + 1)
    ages = fused.ages + matched
    updated_at = np.where(matched, frame.t, fused.updated_at)
    last_sensor = fused.last_sensor.copy()
    last_sensor[matched] = sensor.mask
    sensor_masks = fused.sensor_masks.copy()
    sensor_masks[matched] |= sensor.mask
    columns = [fused.ids, means, covs, ages, misses, fused.created_at,
               updated_at, last_sensor, sensor_masks]
    keep = matched | (misses <= config.coast_cycles)
    if not keep.all():
        columns = [column[keep] for column in columns]
    survivors = FusedList(frame.t, *columns, next_id=fused.next_id,
                          sensor=sensor)

    taken = np.zeros(n_obs, dtype=bool)
    taken[cols] = True
    spawn = np.flatnonzero(~taken)
    result = survivors
    if len(spawn):
        result = _append_new(survivors, frame, noise.obs_cov, spawn, frame.t)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "%s t=%.3f: %d tracks, %d detections, %d updated, %d removed, "
            "%d spawned", sensor.value, frame.t, n_tracks, n_obs, len(rows),
            n_tracks - len(survivors), len(spawn))
    return result


class GnnTracker:
    """Stateful wrapper around ``init_list`` and ``step``."""

    def __init__(self, config=None):
        """
        Tracker starting without a fused list

        Arguments:
            * config (TrackerConfig): tracker settings, defaults if None
        """
        self.config = config if config is not None else TrackerConfig()
        self.fused = None

    def process(self, frame, ego=None):
        """
        Fuse one frame

        Arguments:
            * frame (SensorFrame): next frame
            * ego (EgoMotion): latest ego motion at frame.t

        Returns:
            * fused (FusedList): list after the frame

        Raises:
            * StaleFrameError: frame not after the current list; the
                tracker keeps its state
        """
        if self.fused is None:
            self.fused = init_list(
                frame, self.config.noise_model(frame.sensor_id))
        else:
            self.fused = step(self.fused, frame, ego, self.config)
        return self.fused

    def reset(self):
        self.fused = None
