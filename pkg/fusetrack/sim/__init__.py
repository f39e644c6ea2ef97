from .bench import BenchReport, bench, synthetic_frames
from .scenario import KINDS, ScenarioConfig, SensorConfig
from .simulator import SimulationLog, Simulator, simulate, stream_rng
from .trajectory import Road, Scene

__all__ = [
    'KINDS',
    'BenchReport',
    'Road',
    'ScenarioConfig',
    'Scene',
    'SensorConfig',
    'SimulationLog',
    'Simulator',
    'bench',
    'simulate',
    'stream_rng',
    'synthetic_frames',
]
