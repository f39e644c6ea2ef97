from .jsonl import (
    EGO_MOTION,
    FUSED_LIST,
    RELATIVE_STATE,
    RTK_FIX,
    SENSOR_FRAME,
    decode,
    dumps,
    encode,
    iter_jsonl,
    loads,
    read_jsonl,
    write_jsonl,
)

__all__ = [
    'EGO_MOTION',
    'FUSED_LIST',
    'RELATIVE_STATE',
    'RTK_FIX',
    'SENSOR_FRAME',
    'decode',
    'dumps',
    'encode',
    'iter_jsonl',
    'loads',
    'read_jsonl',
    'write_jsonl',
]
