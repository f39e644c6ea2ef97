"""Scenario settings of the car-following simulator."""
import copy
import math
from dataclasses import dataclass, field

import numpy as np

from ..config import as_matrix, load_yaml, matrix_to_config, unknown_keys
from ..exceptions import ConfigError, InvalidInputError
from ..filtering.kalman import NoiseModel, check_psd
from ..sensors import SensorId
from ..tracker.config import LIDAR_OBS_DIAG, PROCESS_DIAG, RADAR_OBS_DIAG

KIND_HIGHWAY = 'highway'
KIND_BEND = 'bend'
KIND_CUSTOM = 'custom'
KINDS = (KIND_HIGHWAY, KIND_BEND, KIND_CUSTOM)

LIDAR_RATE_HZ = 25.0
RADAR_RATE_HZ = 15.0
RADAR_FOV = math.radians(56.0)
RADAR_PHASE = 0.005


@dataclass
class SensorConfig:
    """
    Emulated sensor

    Detections are emitted every 1 / rate_hz seconds starting at ``phase``.
    ``fov`` is the full angular aperture centred on the ego x axis. The
    target is missed inside ``dropout_windows`` ([start, end) pairs) and
    with probability ``dropout_probability`` elsewhere. ``velocity_hold``
    repeats each measured velocity for that many frames.
    """

    sensor: SensorId
    rate_hz: float
    fov: float
    obs_cov: np.ndarray
    phase: float = 0.0
    process_cov: np.ndarray = None
    dropout_windows: list = field(default_factory=list)
    dropout_probability: float = 0.0
    velocity_hold: int = 1
    max_range: float = 150.0

    def __post_init__(self):
        self.sensor = SensorId.parse(self.sensor)
        self.obs_cov = np.array(self.obs_cov, dtype=float)
        if self.process_cov is None:
            self.process_cov = np.diag(PROCESS_DIAG)
        self.process_cov = np.array(self.process_cov, dtype=float)
        self.dropout_windows = [
            tuple(float(bound) for bound in window)
            for window in self.dropout_windows
        ]

    @classmethod
    def lidar(cls, **overrides):
        """Surround Lidar: 25 Hz, 360 degrees."""
        values = dict(
            sensor=SensorId.LIDAR, rate_hz=LIDAR_RATE_HZ, fov=2.0 * math.pi,
            obs_cov=np.diag(LIDAR_OBS_DIAG))
        values.update(overrides)
        return cls(**values)

    @classmethod
    def radar(cls, **overrides):
        """Front Radar: 15 Hz, +/-28 degrees, 5 ms after the Lidar."""
        values = dict(
            sensor=SensorId.RADAR, rate_hz=RADAR_RATE_HZ, fov=RADAR_FOV,
            obs_cov=np.diag(RADAR_OBS_DIAG), phase=RADAR_PHASE)
        values.update(overrides)
        return cls(**values)

    @classmethod
    def default(cls, sensor):
        if SensorId.parse(sensor) == SensorId.LIDAR:
            return cls.lidar()
        return cls.radar()

    def problems(self, prefix):
        """Field-level messages, empty when the sensor is valid."""
        messages = []
        if not _positive(self.rate_hz):
            messages.append("{}rate_hz: must be > 0".format(prefix))
        if not (_finite(self.fov) and 0.0 < self.fov <= 2.0 * math.pi):
            messages.append("{}fov: must be in (0, 2*pi]".format(prefix))
        if not (_finite(self.phase) and self.phase >= 0.0):
            messages.append("{}phase: must be >= 0".format(prefix))
        for name in ('obs_cov', 'process_cov'):
            matrix = getattr(self, name)
            try:
                if matrix.shape != (4, 4) or not np.isfinite(matrix).all():
                    raise InvalidInputError("must be a finite 4x4 matrix")
                check_psd(matrix, name)
            except InvalidInputError as error:
                messages.append("{}{}: {}".format(prefix, name, error))
        for start, end in self.dropout_windows:
            if not (_finite(start) and _finite(end) and start < end):
                messages.append(
                    "{}dropout_windows: start must be < end".format(prefix))
        if not (_finite(self.dropout_probability)
                and 0.0 <= self.dropout_probability < 1.0):
            messages.append(
                "{}dropout_probability: must be in [0, 1)".format(prefix))
        if not isinstance(self.velocity_hold, int) or self.velocity_hold < 1:
            messages.append(
                "{}velocity_hold: must be an integer >= 1".format(prefix))
        if not _positive(self.max_range):
            messages.append("{}max_range: must be > 0".format(prefix))
        return messages

    def noise_model(self, obs_floor=1e-6):
        """
        Tracker noise model matching this sensor

        Arguments:
            * obs_floor (float): variance added to a singular obs_cov

        Returns:
            * model (NoiseModel): obs_cov and process_cov of the sensor
        """
        obs_cov = self.obs_cov
        if np.linalg.eigvalsh(obs_cov).min() <= 0:
            obs_cov = obs_cov + obs_floor * np.eye(4)
        return NoiseModel(self.process_cov, obs_cov, self.sensor)

    def to_dict(self):
        return {
            'rate_hz': float(self.rate_hz),
            'fov': float(self.fov),
            'phase': float(self.phase),
            'obs_cov': matrix_to_config(self.obs_cov),
            'process_cov': matrix_to_config(self.process_cov),
            'dropout_windows': [list(window) for window in
                                self.dropout_windows],
            'dropout_probability': float(self.dropout_probability),
            'velocity_hold': int(self.velocity_hold),
            'max_range': float(self.max_range),
        }

    def updated(self, data, prefix):
        """Copy with the fields of ``data`` applied."""
        data = dict(data or {})
        known = [name for name in self.__dataclass_fields__
                 if name != 'sensor']
        messages = unknown_keys(data, known, prefix)
        values = {name: getattr(self, name) for name in known}
        for name, value in data.items():
            if name not in known:
                continue
            if name in ('obs_cov', 'process_cov'):
                try:
                    value = as_matrix(value, prefix + name)
                except ConfigError as error:
                    messages.extend(error.messages)
                    continue
            values[name] = value
        if messages:
            raise ConfigError(messages)
        return SensorConfig(sensor=self.sensor, **values)


def _finite(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) \
        and math.isfinite(value)


def _positive(value):
    return _finite(value) and value > 0


@dataclass
class ScenarioConfig:
    """
    Two-vehicle following scenario

    The ego vehicle drives along a road made of constant curvature
    segments with speed ``ego_speed + speed_amplitude * sin(2 pi t /
    speed_period)``. The target drives the same road ``gap_time`` seconds
    ahead, shifted sideways by ``lateral_offset + lateral_amplitude *
    sin(2 pi t / lateral_period)``.

    ``highway`` is a straight road. ``bend`` is a ``lead_in`` straight
    followed by arcs of ``arc_length`` metres with alternating curvature
    +/-``curvature``. ``custom`` uses ``segments``, a list of
    [length, curvature] pairs; the road continues straight after the last
    segment.
    """

    kind: str = KIND_HIGHWAY
    duration: float = 60.0
    seed: int = 0
    ego_speed: float = 26.4
    speed_amplitude: float = 1.3
    speed_period: float = 30.0
    gap_time: float = 2.0
    lateral_offset: float = 0.0
    lateral_amplitude: float = 0.5
    lateral_period: float = 20.0
    curvature: float = 1.0 / 40.0
    lead_in: float = 50.0
    arc_length: float = 60.0
    segments: list = field(default_factory=list)
    lidar: SensorConfig = field(default_factory=SensorConfig.lidar)
    radar: SensorConfig = field(default_factory=SensorConfig.radar)
    rtk_rate_hz: float = 100.0
    rtk_sigma_pos: float = 0.02
    rtk_sigma_vel: float = 0.02
    rtk_sigma_heading: float = 0.0
    n_clutter: int = 0
    clutter_offset: tuple = (4.0, 10.0)

    def __post_init__(self):
        self.kind = str(self.kind).lower()
        self.segments = [tuple(float(v) for v in seg) for seg in self.segments]
        self.clutter_offset = tuple(float(v) for v in self.clutter_offset)
        self.validate()

    @classmethod
    def highway(cls, **overrides):
        """Straight road at 90 to 100 km/h."""
        values = dict(kind=KIND_HIGHWAY)
        values.update(overrides)
        return cls(**values)

    @classmethod
    def bend(cls, **overrides):
        """Succession of tight bends at constant 12 m/s."""
        values = dict(
            kind=KIND_BEND, ego_speed=12.0, speed_amplitude=0.0,
            lateral_amplitude=0.3, gap_time=2.0)
        values.update(overrides)
        return cls(**values)

    @classmethod
    def custom(cls, segments, **overrides):
        values = dict(kind=KIND_CUSTOM, segments=segments)
        values.update(overrides)
        return cls(**values)

    @property
    def sensors(self):
        return (self.lidar, self.radar)

    def sensor_config(self, sensor):
        if SensorId.parse(sensor) == SensorId.LIDAR:
            return self.lidar
        return self.radar

    def tracker_noise(self):
        """SensorId -> NoiseModel dict matching the emulated sensors."""
        return {sensor.sensor: sensor.noise_model() for sensor in self.sensors}

    def validate(self):
        """
        Check every field, reporting all problems at once

        Raises:
            * ConfigError: one message per offending field
        """
        messages = []
        if self.kind not in KINDS:
            messages.append("kind: must be one of {}".format(', '.join(KINDS)))
        if not _positive(self.duration):
            messages.append("duration: must be > 0")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) \
                or self.seed < 0:
            messages.append("seed: must be an integer >= 0")
        if not (_finite(self.ego_speed) and self.ego_speed >= 0):
            messages.append("ego_speed: must be >= 0")
        if not (_finite(self.speed_amplitude)
                and abs(self.speed_amplitude) <= abs(self.ego_speed or 0)):
            messages.append("speed_amplitude: must not exceed ego_speed")
        for name in ('speed_period', 'lateral_period', 'rtk_rate_hz'):
            if not _positive(getattr(self, name)):
                messages.append("{}: must be > 0".format(name))
        for name in ('gap_time', 'rtk_sigma_pos', 'rtk_sigma_vel',
                     'rtk_sigma_heading', 'lead_in'):
            value = getattr(self, name)
            if not (_finite(value) and value >= 0):
                messages.append("{}: must be >= 0".format(name))
        for name in ('lateral_offset', 'lateral_amplitude', 'curvature'):
            if not _finite(getattr(self, name)):
                messages.append("{}: must be finite".format(name))
        if not _positive(self.arc_length):
            messages.append("arc_length: must be > 0")
        if self.kind == KIND_CUSTOM and not self.segments:
            messages.append("segments: custom scenarios need segments")
        for length, curvature in self.segments:
            if not (_positive(length) and _finite(curvature)):
                messages.append(
                    "segments: lengths must be > 0, curvatures finite")
        if isinstance(self.n_clutter, bool) \
                or not isinstance(self.n_clutter, int) or self.n_clutter < 0:
            messages.append("n_clutter: must be an integer >= 0")
        low, high = (self.clutter_offset + (None, None))[:2]
        if not (_finite(low) and _finite(high) and 0 <= low <= high):
            messages.append("clutter_offset: must be 0 <= min <= max")
        messages.extend(self.lidar.problems('lidar.'))
        messages.extend(self.radar.problems('radar.'))
        if messages:
            raise ConfigError(messages)

    def with_dropout(self, sensor, start, end):
        """Copy with one more dropout window on the given sensor."""
        config = copy.deepcopy(self)
        target = config.sensor_config(sensor)
        target.dropout_windows = target.dropout_windows + [(start, end)]
        config.validate()
        return config

    @classmethod
    def from_dict(cls, data):
        """
        Scenario from a mapping; ``kind`` selects the preset that the other
        fields override

        Arguments:
            * data (dict): scenario fields, ``lidar`` and ``radar`` as
                mappings of SensorConfig fields

        Returns:
            * config (ScenarioConfig): validated config

        Raises:
            * ConfigError: unknown or invalid fields
        """
        data = dict(data or {})
        kind = str(data.pop('kind', KIND_HIGHWAY)).lower()
        known = [name for name in cls.__dataclass_fields__ if name != 'kind']
        messages = unknown_keys(data, known, '')
        if kind not in KINDS:
            raise ConfigError(
                ["kind: must be one of {}".format(', '.join(KINDS))])
        sensors = {}
        for name, factory in (('lidar', SensorConfig.lidar),
                              ('radar', SensorConfig.radar)):
            try:
                sensors[name] = factory().updated(
                    data.pop(name, None), name + '.')
            except ConfigError as error:
                messages.extend(error.messages)
        if messages:
            raise ConfigError(messages)
        values = {name: value for name, value in data.items()}
        values.update(sensors)
        if kind == KIND_BEND:
            return cls.bend(**values)
        if kind == KIND_CUSTOM:
            return cls(kind=KIND_CUSTOM, **values)
        return cls.highway(**values)

    @classmethod
    def from_yaml(cls, path):
        return cls.from_dict(load_yaml(path))

    def to_dict(self):
        return {
            'kind': self.kind,
            'duration': float(self.duration),
            'seed': int(self.seed),
            'ego_speed': float(self.ego_speed),
            'speed_amplitude': float(self.speed_amplitude),
            'speed_period': float(self.speed_period),
            'gap_time': float(self.gap_time),
            'lateral_offset': float(self.lateral_offset),
            'lateral_amplitude': float(self.lateral_amplitude),
            'lateral_period': float(self.lateral_period),
            'curvature': float(self.curvature),
            'lead_in': float(self.lead_in),
            'arc_length': float(self.arc_length),
            'segments': [list(segment) for segment in self.segments],
            'lidar': self.lidar.to_dict(),
            'radar': self.radar.to_dict(),
            'rtk_rate_hz': float(self.rtk_rate_hz),
            'rtk_sigma_pos': float(self.rtk_sigma_pos),
            'rtk_sigma_vel': float(self.rtk_sigma_vel),
            'rtk_sigma_heading': float(self.rtk_sigma_heading),
            'n_clutter': int(self.n_clutter),
            'clutter_offset': list(self.clutter_offset),
        }
