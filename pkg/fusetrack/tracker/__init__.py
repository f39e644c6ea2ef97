from .config import TrackerConfig, default_noise
from .gnn import GnnTracker, init_list, propagate, step
from .replay import ReplayStats, process_log, replay
from .types import Detection, FusedList, SensorFrame, Track

__all__ = [
    'Detection',
    'FusedList',
    'GnnTracker',
    'ReplayStats',
    'SensorFrame',
    'Track',
    'TrackerConfig',
    'default_noise',
    'init_list',
    'process_log',
    'propagate',
    'replay',
    'step',
]
