"""Tracker configuration."""
import math
from dataclasses import dataclass, field

import numpy as np

from ..association.cost import COST_COVARIANCES, COST_TRACK
from ..config import as_matrix, load_yaml, matrix_to_config, unknown_keys
from ..exceptions import ConfigError, InvalidInputError
from ..filtering.gating import (
    DEFAULT_GATE_ALPHA,
    DEFAULT_GATE_DOF,
    chi2_gate_threshold,
)
from ..filtering.kalman import NoiseModel
from ..motion.ego import DEFAULT_ROTATION_SIGN
from ..sensors import SensorId

LIDAR_OBS_DIAG = (0.02, 0.02, 0.5, 0.5)
RADAR_OBS_DIAG = (0.5, 0.5, 0.02, 0.02)
PROCESS_DIAG = (0.01, 0.01, 0.05, 0.05)

VELOCITY_RELATIVE = 'relative'
VELOCITY_GROUND = 'ground'
VELOCITY_REFERENCES = (VELOCITY_RELATIVE, VELOCITY_GROUND)

PROCESS_PER_SENSOR = 'per_sensor'
PROCESS_SHARED = 'shared'
PROCESS_NOISE_MODES = (PROCESS_PER_SENSOR, PROCESS_SHARED)


def default_noise():
    """Default Lidar and Radar noise models."""
    return {
        SensorId.LIDAR: NoiseModel.diagonal(
            SensorId.LIDAR, LIDAR_OBS_DIAG, PROCESS_DIAG),
        SensorId.RADAR: NoiseModel.diagonal(
            SensorId.RADAR, RADAR_OBS_DIAG, PROCESS_DIAG),
    }


def noise_from_dict(data, section='noise.'):
    """
    Noise models from their configuration mapping

    Arguments:
        * data (dict): ``{sensor: {obs_cov: ..., process_cov: ...}}``
        * section (str): prefix of the field names in error messages

    Returns:
        * noise (dict): SensorId -> NoiseModel, defaults for missing sensors

    Raises:
        * ConfigError: unknown sensor, unknown field or bad matrix
    """
    noise = default_noise()
    messages = []
    for name, entry in (data or {}).items():
        try:
            sensor = SensorId.parse(name)
        except InvalidInputError:
            messages.append("{}{}: unknown sensor".format(section, name))
            continue
        prefix = '{}{}.'.format(section, name)
        entry = entry or {}
        messages.extend(
            unknown_keys(entry, ('obs_cov', 'process_cov'), prefix))
        current = noise[sensor]
        try:
            obs_cov = current.obs_cov
            process_cov = current.process_cov
            if 'obs_cov' in entry:
                obs_cov = as_matrix(entry['obs_cov'], prefix + 'obs_cov')
            if 'process_cov' in entry:
                process_cov = as_matrix(
                    entry['process_cov'], prefix + 'process_cov')
            noise[sensor] = NoiseModel(process_cov, obs_cov, sensor)
        except ConfigError as error:
            messages.extend(error.messages)
        except InvalidInputError as error:
            messages.append("{}: {}".format(prefix.rstrip('.'), error))
    if messages:
        raise ConfigError(messages)
    return noise


def noise_to_dict(noise):
    """Configuration mapping of a SensorId -> NoiseModel dict."""
    return {
        sensor.value: {
            'obs_cov': matrix_to_config(model.obs_cov),
            'process_cov': matrix_to_config(model.process_cov),
        }
        for sensor, model in noise.items()
    }


@dataclass
class TrackerConfig:
    """
    Settings of the GNN fusion tracker

    ``alpha`` and ``gate_dof`` fix the validation gate. ``process_noise``
    selects whether compensation uses the process noise of the incoming
    frame's sensor or ``shared_process_cov`` for every sensor.
    """

    alpha: float = DEFAULT_GATE_ALPHA
    gate_dof: int = DEFAULT_GATE_DOF
    coast_cycles: int = 0
    empty_frame_deletes: bool = True
    cost_covariance: str = COST_TRACK
    pre_gate: bool = False
    rotation_sign: int = DEFAULT_ROTATION_SIGN
    velocity_reference: str = VELOCITY_RELATIVE
    process_noise: str = PROCESS_PER_SENSOR
    shared_process_cov: np.ndarray = None
    noise: dict = field(default_factory=default_noise)

    def __post_init__(self):
        if self.shared_process_cov is None:
            self.shared_process_cov = np.diag(PROCESS_DIAG)
        self.validate()

    def validate(self):
        """
        Check every field, reporting all problems at once

        Raises:
            * ConfigError: one message per offending field
        """
        messages = []
        try:
            chi2_gate_threshold(self.alpha, 4)
        except (InvalidInputError, TypeError):
            messages.append("alpha: must be in (0, 1)")
        if not isinstance(self.gate_dof, int) or self.gate_dof < 1:
            messages.append("gate_dof: must be a positive integer")
        if not isinstance(self.coast_cycles, int) or self.coast_cycles < 0:
            messages.append("coast_cycles: must be an integer >= 0")
        if self.cost_covariance not in COST_COVARIANCES:
            messages.append("cost_covariance: must be one of {}".format(
                ', '.join(COST_COVARIANCES)))
        if self.rotation_sign not in (1, -1):
            messages.append("rotation_sign: must be 1 or -1")
        if self.velocity_reference not in VELOCITY_REFERENCES:
            messages.append("velocity_reference: must be one of {}".format(
                ', '.join(VELOCITY_REFERENCES)))
        if self.process_noise not in PROCESS_NOISE_MODES:
            messages.append("process_noise: must be one of {}".format(
                ', '.join(PROCESS_NOISE_MODES)))
        try:
            NoiseModel(self.shared_process_cov, np.eye(4), SensorId.LIDAR)
        except InvalidInputError as error:
            messages.append("shared_process_cov: {}".format(error))
        for sensor in SensorId:
            model = self.noise.get(sensor)
            if not isinstance(model, NoiseModel):
                messages.append(
                    "noise.{}: missing noise model".format(sensor.value))
        if messages:
            raise ConfigError(messages)

    @property
    def gamma(self):
        """Validation gate size."""
        return chi2_gate_threshold(self.alpha, self.gate_dof)

    def noise_model(self, sensor):
        return self.noise[SensorId.parse(sensor)]

    def process_cov_for(self, sensor):
        """Process noise used when compensating towards a frame of sensor."""
        if self.process_noise == PROCESS_SHARED:
            return self.shared_process_cov
        return self.noise_model(sensor).process_cov

    @classmethod
    def from_dict(cls, data):
        """
        Tracker config from a mapping, missing fields keep their defaults

        Arguments:
            * data (dict): fields of TrackerConfig; ``noise`` as written by
                ``to_dict``

        Returns:
            * config (TrackerConfig): validated config

        Raises:
            * ConfigError: unknown or invalid fields
        """
        data = dict(data or {})
        known = [name for name in cls.__dataclass_fields__]
        messages = unknown_keys(data, known, '')
        kwargs = {}
        for name in known:
            if name not in data:
                continue
            value = data[name]
            try:
                if name == 'noise':
                    value = noise_from_dict(value)
                elif name == 'shared_process_cov':
                    value = as_matrix(value, name)
                elif name == 'alpha':
                    value = float(value)
                    if not math.isfinite(value):
                        raise ValueError(value)
            except ConfigError as error:
                messages.extend(error.messages)
                continue
            except (TypeError, ValueError):
                messages.append("{}: must be a number".format(name))
                continue
            kwargs[name] = value
        if messages:
            raise ConfigError(messages)
        return cls(**kwargs)

    @classmethod
    def from_yaml(cls, path):
        return cls.from_dict(load_yaml(path))

    def to_dict(self):
        return {
            'alpha': float(self.alpha),
            'gate_dof': int(self.gate_dof),
            'coast_cycles': int(self.coast_cycles),
            'empty_frame_deletes': bool(self.empty_frame_deletes),
            'cost_covariance': self.cost_covariance,
            'pre_gate': bool(self.pre_gate),
            'rotation_sign': int(self.rotation_sign),
            'velocity_reference': self.velocity_reference,
            'process_noise': self.process_noise,
            'shared_process_cov': matrix_to_config(self.shared_process_cov),
            'noise': noise_to_dict(self.noise),
        }
