"""JSON Lines codec for the logs read and written by the tools.

One record per line. Every record is an object whose first key ``type``
names its kind and whose second key ``t`` is its timestamp:

    sensor_frame    t, sensor, detections [{x, y, vx, vy}]
    ego_motion      t, v, omega
    rtk_fix         t, vehicle, px, py, vx, vy, heading
    relative_state  t, x, y, vx, vy
    fused_list      t, sensor, next_id, tracks [{id, x, y, vx, vy, cov,
                    age, misses, created_at, updated_at, sensor, sensors}]

``cov`` holds the 16 covariance entries in row-major order.
"""
import io
import json
import logging
import math

import numpy as np

from ..exceptions import FuseTrackError, InvalidInputError, RecordError
from ..filtering.kalman import STATE_DIM, StateEstimate
from ..motion.ego import EgoMotion
from ..sensors import SensorId
from ..tracker.types import FusedList, SensorFrame, Track
from ..truth_eval.ground_truth import RelativeState, RtkFix

logger = logging.getLogger(__name__)

SENSOR_FRAME = 'sensor_frame'
EGO_MOTION = 'ego_motion'
RTK_FIX = 'rtk_fix'
RELATIVE_STATE = 'relative_state'
FUSED_LIST = 'fused_list'
SEPARATORS = (',', ':')


def _float(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RecordError("{} must be a number, got {!r}".format(name, value))
    value = float(value)
    if not math.isfinite(value):
        raise RecordError("{} must be finite".format(name))
    return value


def _int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise RecordError(
            "{} must be an integer, got {!r}".format(name, value))
    return value


def _field(data, name):
    try:
        return data[name]
    except KeyError:
        raise RecordError("missing field {!r}".format(name))


def _state_fields(vector):
    return dict(zip(('x', 'y', 'vx', 'vy'), (float(v) for v in vector)))


def _encode_frame(frame):
    return {
        'sensor': frame.sensor_id.value,
        'detections': [_state_fields(row) for row in frame.measurements],
    }


def _decode_frame(t, data):
    detections = _field(data, 'detections')
    if not isinstance(detections, list):
        raise RecordError("detections must be a list")
    rows = [
        [_float(_field(item, name), name) for name in ('x', 'y', 'vx', 'vy')]
        for item in detections
    ]
    return SensorFrame(
        t, _field(data, 'sensor'), np.array(rows).reshape(-1, STATE_DIM))


def _encode_ego(ego):
    return {'v': float(ego.v), 'omega': float(ego.omega)}


def _decode_ego(t, data):
    return EgoMotion(
        t, _float(_field(data, 'v'), 'v'),
        _float(_field(data, 'omega'), 'omega'))


def _encode_fix(fix):
    return {
        'vehicle': fix.vehicle.value,
        'px': float(fix.px),
        'py': float(fix.py),
        'vx': float(fix.vx),
        'vy': float(fix.vy),
        'heading': None if fix.heading is None else float(fix.heading),
    }


def _decode_fix(t, data):
    heading = data.get('heading')
    return RtkFix(
        t=t,
        vehicle=_field(data, 'vehicle'),
        px=_float(_field(data, 'px'), 'px'),
        py=_float(_field(data, 'py'), 'py'),
        vx=_float(_field(data, 'vx'), 'vx'),
        vy=_float(_field(data, 'vy'), 'vy'),
        heading=None if heading is None else _float(heading, 'heading'),
    )


def _encode_relative(state):
    return _state_fields(state.as_vector())


def _decode_relative(t, data):
    return RelativeState(
        t, *(_float(_field(data, name), name)
             for name in ('x', 'y', 'vx', 'vy')))


def _encode_fused(fused):
    tracks = []
    for track in fused.tracks:
        entry = {'id': track.id}
        entry.update(_state_fields(track.state.mean))
        entry.update({
            'cov': [float(value) for value in track.state.cov.ravel()],
            'age': track.age,
            'misses': track.misses,
            'created_at': track.created_at,
            'updated_at': track.updated_at,
            'sensor': track.last_sensor.value,
            'sensors': [sensor.value for sensor in track.sensors],
        })
        tracks.append(entry)
    return {
        'sensor': fused.sensor.value if fused.sensor is not None else None,
        'next_id': int(fused.next_id),
        'tracks': tracks,
    }


def _decode_track(item):
    cov = _field(item, 'cov')
    if not isinstance(cov, list) or len(cov) != STATE_DIM * STATE_DIM:
        raise RecordError("cov must hold 16 numbers")
    return Track(
        id=_int(_field(item, 'id'), 'id'),
        state=StateEstimate(
            [_float(_field(item, name), name)
             for name in ('x', 'y', 'vx', 'vy')],
            np.array([_float(value, 'cov') for value in cov]).reshape(
                STATE_DIM, STATE_DIM),
        ),
        age=_int(_field(item, 'age'), 'age'),
        created_at=_float(_field(item, 'created_at'), 'created_at'),
        updated_at=_float(_field(item, 'updated_at'), 'updated_at'),
        last_sensor=_field(item, 'sensor'),
        misses=_int(item.get('misses', 0), 'misses'),
        sensors=tuple(item.get('sensors') or ()),
    )


def _decode_fused(t, data):
    tracks = _field(data, 'tracks')
    if not isinstance(tracks, list):
        raise RecordError("tracks must be a list")
    sensor = data.get('sensor')
    next_id = data.get('next_id')
    return FusedList.from_tracks(
        t,
        [_decode_track(item) for item in tracks],
        next_id=None if next_id is None else _int(next_id, 'next_id'),
        sensor=None if sensor is None else SensorId.parse(sensor),
    )


CODECS = {
    SensorFrame: (SENSOR_FRAME, _encode_frame),
    EgoMotion: (EGO_MOTION, _encode_ego),
    RtkFix: (RTK_FIX, _encode_fix),
    RelativeState: (RELATIVE_STATE, _encode_relative),
    FusedList: (FUSED_LIST, _encode_fused),
}
DECODERS = {
    SENSOR_FRAME: _decode_frame,
    EGO_MOTION: _decode_ego,
    RTK_FIX: _decode_fix,
    RELATIVE_STATE: _decode_relative,
    FUSED_LIST: _decode_fused,
}


def encode(record):
    """
    JSON object of a record

    Arguments:
        * record: SensorFrame, EgoMotion, RtkFix, RelativeState or FusedList

    Returns:
        * data (dict): ``type`` and ``t`` first, then the record fields
    """
    try:
        kind, encoder = CODECS[type(record)]
    except KeyError:
        raise InvalidInputError(
            "cannot encode {}".format(type(record).__name__))
    data = {'type': kind, 't': float(record.t)}
    data.update(encoder(record))
    return data


def decode(data, line=None):
    """
    Record from its JSON object

    Arguments:
        * data (dict): parsed JSON object
        * line (int): source line number for error messages

    Returns:
        * record: the decoded record

    Raises:
        * RecordError: unknown type, missing or invalid field
    """
    try:
        if not isinstance(data, dict):
            raise RecordError("record must be a JSON object")
        kind = _field(data, 'type')
        if kind not in DECODERS:
            raise RecordError("unknown record type {!r}".format(kind))
        t = _float(_field(data, 't'), 't')
        return DECODERS[kind](t, data)
    except RecordError as error:
        raise RecordError(str(error), line) if line is not None else error
    except (FuseTrackError, TypeError, AttributeError) as error:
        raise RecordError(str(error), line)


def dumps(record):
    """One JSONL line, without the newline."""
    return json.dumps(encode(record), separators=SEPARATORS,
                      allow_nan=False)


def loads(text, line=None):
    """Record parsed from one JSONL line."""
    try:
        data = json.loads(text)
    except ValueError as error:
        raise RecordError("invalid JSON: {}".format(error), line)
    return decode(data, line)


def iter_jsonl(source):
    """
    Records of a JSONL file, lazily; blank lines are skipped

    Arguments:
        * source (str or file): path or open text file

    Returns:
        * records (generator): decoded records in file order
    """
    if isinstance(source, io.TextIOBase) or hasattr(source, 'read'):
        for number, text in enumerate(source, start=1):
            if text.strip():
                yield loads(text, number)
        return
    with open(source, encoding='utf-8') as f:
        yield from iter_jsonl(f)


def read_jsonl(source, kind=None):
    """
    Every record of a JSONL file

    Arguments:
        * source (str or file): path or open text file
        * kind (type): keep only records of this class

    Returns:
        * records (list): decoded records in file order
    """
    records = list(iter_jsonl(source))
    if kind is not None:
        records = [record for record in records if isinstance(record, kind)]
    logger.debug("Read %d records from %s", len(records), source)
    return records


def write_jsonl(records, target):
    """
    Write records as JSON Lines

    Arguments:
        * records (iterable): records to encode
        * target (str or file): path or open text file

    Returns:
        * count (int): number of lines written
    """
    if hasattr(target, 'write'):
        count = 0
        for record in records:
            target.write(dumps(record))
            target.write('\n')
            count += 1
        return count
    with open(target, 'w', encoding='utf-8') as f:
        count = write_jsonl(records, f)
    logger.info("Wrote %d records to %s", count, target)
    return count
