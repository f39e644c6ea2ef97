#!/usr/bin/env python

"""Tests for `fusetrack` package."""

import logging

import numpy as np
import pytest

from fusetrack.config import as_matrix, dump_yaml, load_yaml
from fusetrack.exceptions import ConfigError
from fusetrack.log import LOG_ENV, get_log_level
from fusetrack.sensors import SensorId
from fusetrack.tracker.config import (
    PROCESS_DIAG,
    RADAR_OBS_DIAG,
    TrackerConfig,
    noise_from_dict,
)


def test_defaults():
    """Tests the default gate and noise models."""
    config = TrackerConfig()
    assert config.gamma == pytest.approx(7.779440, abs=1e-5)
    np.testing.assert_array_equal(
        np.diag(config.noise_model('radar').obs_cov), RADAR_OBS_DIAG)
    np.testing.assert_array_equal(
        config.process_cov_for(SensorId.LIDAR), np.diag(PROCESS_DIAG))


def test_validation_reports_every_field():
    """Tests one message per invalid field."""
    with pytest.raises(ConfigError) as error:
        TrackerConfig(alpha=1.5, coast_cycles=-1, rotation_sign=0)
    assert error.value.messages == [
        'alpha: must be in (0, 1)',
        'coast_cycles: must be an integer >= 0',
        'rotation_sign: must be 1 or -1',
    ]


def test_from_dict_unknown_and_bad_fields():
    """Tests unknown keys and unreadable values."""
    with pytest.raises(ConfigError) as error:
        TrackerConfig.from_dict({'gate': 3, 'alpha': 'wide'})
    assert error.value.messages == [
        'gate: unknown field', 'alpha: must be a number']


def test_noise_from_dict():
    """Tests the accepted matrix spellings and unknown sensors."""
    noise = noise_from_dict({'Radar': {'obs_cov': [1, 1, 0.1, 0.1]}})
    np.testing.assert_array_equal(
        np.diag(noise[SensorId.RADAR].obs_cov), [1, 1, 0.1, 0.1])
    with pytest.raises(ConfigError) as error:
        noise_from_dict({'Sonar': {}})
    assert error.value.messages == ['noise.Sonar: unknown sensor']


def test_as_matrix_spellings():
    """Tests diagonal, flat and nested matrices."""
    expected = np.diag([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(as_matrix([1, 2, 3, 4], 'm'), expected)
    np.testing.assert_array_equal(
        as_matrix(expected.ravel().tolist(), 'm'), expected)
    np.testing.assert_array_equal(as_matrix(expected.tolist(), 'm'), expected)
    with pytest.raises(ConfigError):
        as_matrix([1, 2, 3], 'm')


def test_yaml_round_trip(tmpdir):
    """Tests writing a tracker config and reading it back."""
    config = TrackerConfig(
        alpha=0.95, coast_cycles=2, cost_covariance='track_plus_obs',
        rotation_sign=-1)
    path = str(tmpdir.join('tracker.yaml'))
    dump_yaml(config.to_dict(), path)
    assert TrackerConfig.from_yaml(path).to_dict() == config.to_dict()


def test_empty_yaml(tmpdir):
    """Tests that an empty file gives the defaults."""
    path = tmpdir.join('empty.yaml')
    path.write('')
    assert load_yaml(str(path)) == {}
    assert TrackerConfig.from_yaml(str(path)).to_dict() == \
        TrackerConfig().to_dict()


def test_log_level_from_environment(monkeypatch):
    """Tests the FUSETRACK_LOG variable."""
    monkeypatch.setenv(LOG_ENV, 'debug')
    assert get_log_level() == logging.DEBUG
    monkeypatch.setenv(LOG_ENV, 'chatty')
    assert get_log_level() == logging.WARNING
    monkeypatch.delenv(LOG_ENV)
    assert get_log_level(logging.INFO) == logging.INFO
