from .ego import (
    EgoMotion,
    EgoTimeline,
    FrameStep,
    apply_affine,
    compensate_batch,
    compensation_affine,
    ego_compensate,
    latest_ego,
    over_ground_velocity,
    to_over_ground,
    to_relative,
)
from .models import block_rotation, cv_transition, rotation

__all__ = [
    'EgoMotion',
    'EgoTimeline',
    'FrameStep',
    'apply_affine',
    'block_rotation',
    'compensate_batch',
    'compensation_affine',
    'cv_transition',
    'ego_compensate',
    'latest_ego',
    'over_ground_velocity',
    'rotation',
    'to_over_ground',
    'to_relative',
]
