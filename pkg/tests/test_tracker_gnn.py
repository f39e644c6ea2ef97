#!/usr/bin/env python

"""Tests for `fusetrack` package."""

import math

import numpy as np
import pytest

from fusetrack.association.cost import COST_TRACK_PLUS_OBS, cost_matrix
from fusetrack.exceptions import SingularInnovationError, StaleFrameError
from fusetrack.filtering.gating import chi2_gate_threshold
from fusetrack.filtering.kalman import NoiseModel, StateEstimate
from fusetrack.motion.ego import (
    EgoMotion,
    FrameStep,
    compensate_batch,
    to_over_ground,
    to_relative,
)
from fusetrack.records.jsonl import dumps
from fusetrack.sensors import SensorId
from fusetrack.sim.scenario import ScenarioConfig, SensorConfig
from fusetrack.sim.simulator import simulate
from fusetrack.tracker.config import (
    LIDAR_OBS_DIAG,
    PROCESS_DIAG,
    TrackerConfig,
    default_noise,
)
from fusetrack.tracker.gnn import GnnTracker, init_list, propagate, step
from fusetrack.tracker.replay import replay
from fusetrack.tracker.types import Detection, FusedList, SensorFrame, Track


def noise_free(config_factory, **overrides):
    """Scenario without sensor or RTK noise."""
    zero = np.zeros((4, 4))
    return config_factory(
        lidar=SensorConfig.lidar(obs_cov=zero),
        radar=SensorConfig.radar(obs_cov=zero),
        rtk_sigma_pos=0.0,
        rtk_sigma_vel=0.0,
        **overrides)


@pytest.fixture
def config():
    """Default tracker settings.

    See more at: http://doc.pytest.org/en/latest/fixture.html
    """
    return TrackerConfig()


@pytest.fixture
def lidar_noise():
    """Default Lidar noise model.

    See more at: http://doc.pytest.org/en/latest/fixture.html
    """
    return default_noise()[SensorId.LIDAR]


def test_init_empty_frame(lidar_noise):
    """Tests initialization from a frame without detections."""
    fused = init_list(SensorFrame(1.5, 'Lidar'), lidar_noise)
    assert len(fused) == 0
    assert fused.t == 1.5


def test_init_single_detection(lidar_noise):
    """Tests a new track takes the detection and the sensor noise."""
    frame = SensorFrame.from_detections(
        0.0, SensorId.LIDAR, [Detection(5, 2, -1, 0)])
    fused = init_list(frame, lidar_noise)
    track = fused.tracks[0]
    np.testing.assert_array_equal(track.state.mean, [5, 2, -1, 0])
    np.testing.assert_array_equal(track.state.cov, np.diag(LIDAR_OBS_DIAG))
    assert track.age == 1
    assert track.sensors == (SensorId.LIDAR,)


def test_init_ids_in_detection_order(lidar_noise):
    """Tests ids 0, 1, 2 for three detections."""
    frame = SensorFrame(0.0, 'Lidar', [[1, 0, 0, 0], [2, 0, 0, 0],
                                       [3, 0, 0, 0]])
    fused = init_list(frame, lidar_noise)
    assert fused.ids.tolist() == [0, 1, 2]
    np.testing.assert_array_equal(fused.means[:, 0], [1, 2, 3])
    assert fused.next_id == 3


def test_step_from_empty_list(config):
    """Tests that every detection spawns a track on an empty list."""
    fused = step(FusedList.empty(0.0),
                 SensorFrame(0.04, 'Radar', np.ones((4, 4))), None, config)
    assert fused.ids.tolist() == [0, 1, 2, 3]
    assert fused.sensor == SensorId.RADAR


def test_step_perfect_match(config, lidar_noise):
    """Tests an in-place update of a track sitting on the detection."""
    fused = init_list(SensorFrame(0.0, 'Lidar', [[5, 2, 0, 0]]), lidar_noise)
    fused = step(fused, SensorFrame(0.04, 'Lidar', [[5, 2, 0, 0]]), None,
                 config)
    assert fused.ids.tolist() == [0]
    track = fused.track(0)
    assert track.age == 2
    assert track.updated_at == 0.04
    np.testing.assert_allclose(track.state.mean, [5, 2, 0, 0])
    assert np.trace(track.state.cov) < np.sum(LIDAR_OBS_DIAG)


def test_step_gate_rejects_far_detection(config, lidar_noise):
    """Tests that a detection beyond the gate replaces the track."""
    fused = init_list(SensorFrame(0.0, 'Lidar', [[5, 2, 0, 0]]), lidar_noise)
    # propagated x variance is about obs + process, so d2 is about 2 gamma
    variance = LIDAR_OBS_DIAG[0] + PROCESS_DIAG[0]
    offset = math.sqrt(2.0 * chi2_gate_threshold(0.9, 4) * variance)
    fused = step(fused, SensorFrame(0.04, 'Lidar', [[5 + offset, 2, 0, 0]]),
                 None, config)
    assert fused.ids.tolist() == [1]
    assert fused.track(0) is None
    np.testing.assert_allclose(fused.means[0], [5 + offset, 2, 0, 0])


def test_step_stale_frame(config, lidar_noise):
    """Tests that a frame not after the list is refused."""
    fused = init_list(SensorFrame(1.0, 'Lidar', [[5, 2, 0, 0]]), lidar_noise)
    with pytest.raises(StaleFrameError):
        step(fused, SensorFrame(1.0, 'Radar', [[5, 2, 0, 0]]), None, config)
    with pytest.raises(StaleFrameError):
        step(fused, SensorFrame(0.5, 'Radar'), None, config)
    assert fused.t == 1.0
    assert len(fused) == 1


def test_step_empty_frame_deletes(lidar_noise):
    """Tests empty frames with and without deletion and coasting."""
    fused = init_list(SensorFrame(0.0, 'Lidar', [[5, 2, 0, 0]]), lidar_noise)
    empty = SensorFrame(0.04, 'Radar')
    assert len(step(fused, empty, None, TrackerConfig())) == 0

    kept = step(fused, empty, None, TrackerConfig(empty_frame_deletes=False))
    assert kept.ids.tolist() == [0]
    assert kept.misses.tolist() == [0]
    assert kept.t == 0.04

    coasting = TrackerConfig(coast_cycles=1)
    once = step(fused, empty, None, coasting)
    assert once.misses.tolist() == [1]
    assert once.track(0).updated_at == 0.0
    assert len(step(once, SensorFrame(0.08, 'Radar'), None, coasting)) == 0


def test_step_sensor_history(config, lidar_noise):
    """Tests the sensor mask after a Lidar then Radar update."""
    fused = init_list(SensorFrame(0.0, 'Lidar', [[20, 0, 0, 0]]), lidar_noise)
    fused = step(fused, SensorFrame(0.005, 'Radar', [[20, 0, 0, 0]]), None,
                 config)
    track = fused.track(0)
    assert track.last_sensor == SensorId.RADAR
    assert track.sensors == (SensorId.LIDAR, SensorId.RADAR)


def test_step_singular_covariance_names_track():
    """Tests the error raised for a degenerate track."""
    noise = {
        sensor: NoiseModel.diagonal(sensor, LIDAR_OBS_DIAG, [0.0] * 4)
        for sensor in SensorId
    }
    config = TrackerConfig(noise=noise)
    track = Track(7, StateEstimate(np.zeros(4), np.zeros((4, 4))), 1, 0.0,
                  0.0, SensorId.LIDAR)
    fused = FusedList.from_tracks(0.0, [track])
    with pytest.raises(SingularInnovationError) as error:
        step(fused, SensorFrame(0.04, 'Lidar', [[1, 0, 0, 0]]), None, config)
    assert error.value.track_id == 7


def test_covariance_non_increasing(config, lidar_noise):
    """Tests Kalman convergence on a still obstacle."""
    frame = SensorFrame(0.0, 'Lidar', [[10, 1, 0, 0]])
    fused = init_list(frame, lidar_noise)
    traces = [np.trace(fused.covs[0])]
    for k in range(1, 101):
        fused = step(fused, SensorFrame(0.04 * k, 'Lidar', [[10, 1, 0, 0]]),
                     None, config)
        assert fused.ids.tolist() == [0]
        traces.append(np.trace(fused.covs[0]))
    assert np.all(np.diff(traces) <= 1e-12)


def test_conservation_and_id_policy(config):
    """Tests track counts and that removed ids never come back."""
    rng = np.random.default_rng(5)
    tracker = GnnTracker(config)
    removed = set()
    previous = None
    for k in range(300):
        count = int(rng.integers(0, 6))
        frame = SensorFrame(
            0.02 * k, ('Lidar', 'Radar')[k % 2],
            rng.normal(scale=[5, 5, 1, 1], size=(count, 4)) + [20, 0, 0, 0])
        fused = tracker.process(frame)
        if previous is not None:
            kept = set(previous.ids.tolist()) & set(fused.ids.tolist())
            spawned = set(range(previous.next_id, fused.next_id))
            assert set(fused.ids.tolist()) == kept | spawned
            assert len(kept) + len(spawned) == len(fused)
            assert len(spawned) == len(frame) - len(kept)
            removed |= set(previous.ids.tolist()) - kept
            assert not removed & set(fused.ids.tolist())
            assert np.all(fused.misses == 0)
        previous = fused


def test_tracker_keeps_state_on_stale_frame(config):
    """Tests that GnnTracker survives a stale frame."""
    tracker = GnnTracker(config)
    first = tracker.process(SensorFrame(1.0, 'Lidar', [[5, 0, 0, 0]]))
    with pytest.raises(StaleFrameError):
        tracker.process(SensorFrame(1.0, 'Radar', [[5, 0, 0, 0]]))
    assert tracker.fused is first
    tracker.reset()
    assert tracker.fused is None


def test_replay_is_deterministic():
    """Tests bit-identical outputs for identical inputs."""
    log = simulate(ScenarioConfig.highway(duration=3.0, seed=11))
    first, _ = replay(log.frames, log.ego)
    second, _ = replay(log.frames, log.ego)
    assert [dumps(f) for f in first] == [dumps(f) for f in second]


def test_noise_free_highway_keeps_one_id():
    """Tests that Lidar and Radar frames of one object share its id."""
    scenario = noise_free(ScenarioConfig.highway, duration=10.0)
    log = simulate(scenario)
    fused_lists, stats = replay(
        log.frames, log.ego, TrackerConfig(noise=scenario.tracker_noise()))
    assert stats.accepted == 400
    assert all(fused.ids.tolist() == [0] for fused in fused_lists)
    assert fused_lists[-1].next_id == 1
    assert fused_lists[-1].track(0).sensors == (
        SensorId.LIDAR, SensorId.RADAR)


@pytest.mark.parametrize('sign,keeps_id', [(-1, True), (1, False)])
def test_rotation_sign_on_a_bend(sign, keeps_id):
    """Tests which compensation sign tracks a target on a circle."""
    scenario = noise_free(
        ScenarioConfig.custom, segments=[(1000.0, 1.0 / 40.0)],
        duration=10.0, ego_speed=12.0, speed_amplitude=0.0,
        lateral_amplitude=0.0, gap_time=2.5)
    log = simulate(scenario)
    assert len(log.frames_of('Radar')) == 150
    assert all(len(frame) == 1 for frame in log.frames)
    config = TrackerConfig(
        noise=scenario.tracker_noise(), rotation_sign=sign)
    fused_lists, _ = replay(log.frames, log.ego, config)
    if keeps_id:
        assert fused_lists[-1].next_id == 1
    else:
        assert fused_lists[-1].next_id > 5


def test_gate_uses_association_weights(config, lidar_noise):
    """Tests that the gate reads d² under the configured cost covariance."""
    fused = init_list(SensorFrame(0.0, 'Lidar', [[5, 2, 0, 0]]), lidar_noise)
    means, covs = propagate(fused, 0.04, None, config, SensorId.LIDAR)
    unit = means + np.array([1.0, 0.0, 0.0, 0.0])
    own = cost_matrix(means, covs, unit)[0, 0]
    summed = cost_matrix(means, covs, unit, lidar_noise.obs_cov,
                         COST_TRACK_PLUS_OBS)[0, 0]
    offset = math.sqrt(1.5 * config.gamma / own)
    assert offset ** 2 * summed < config.gamma
    frame = SensorFrame(0.04, 'Lidar', means + [offset, 0, 0, 0])

    assert step(fused, frame, None, config).ids.tolist() == [1]
    plus_obs = TrackerConfig(cost_covariance=COST_TRACK_PLUS_OBS)
    assert step(fused, frame, None, plus_obs).ids.tolist() == [0]


@pytest.mark.parametrize('sign', [1, -1])
def test_propagate_matches_ground_compensation(sign):
    """Tests one-pass propagation against the over-ground round trip."""
    rng = np.random.default_rng(11)
    tracks = []
    for index in range(6):
        a = rng.normal(size=(4, 4))
        state = StateEstimate(rng.normal(scale=10.0, size=4),
                              a.dot(a.T) + np.eye(4))
        tracks.append(Track(index, state, 1, 0.0, 0.0, SensorId.RADAR))
    fused = FusedList.from_tracks(0.0, tracks)
    ego = EgoMotion(0.05, 13.0, 0.2)
    config = TrackerConfig(rotation_sign=sign)

    means, covs = propagate(fused, 0.05, ego, config, SensorId.LIDAR)

    ground, ground_covs = to_over_ground(fused.means, fused.covs, 13.0, 0.2)
    moved, moved_covs = compensate_batch(
        ground, ground_covs, FrameStep.from_ego(ego, 0.05),
        config.process_cov_for(SensorId.LIDAR), sign)
    expected, expected_covs = to_relative(moved, moved_covs, 13.0, 0.2)
    np.testing.assert_allclose(means, expected, atol=1e-9)
    np.testing.assert_allclose(covs, expected_covs, atol=1e-9)
