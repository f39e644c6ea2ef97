"""Replay of recorded sensor and odometry streams through the tracker."""
import logging
from dataclasses import dataclass

from ..exceptions import StaleFrameError
from ..motion.ego import EgoTimeline
from .gnn import GnnTracker

logger = logging.getLogger(__name__)


@dataclass
class ReplayStats:
    """Counters filled while a log is replayed."""

    accepted: int = 0
    dropped_stale: int = 0
    missing_ego: int = 0


def process_log(frames, ego_stream=(), config=None, stats=None):
    """
    Fuse a time-ordered stream of frames

    Frames are processed in arrival order. A frame whose timestamp is not
    after the current fused list (including a frame sharing the timestamp
    of the previous one) is dropped and counted.

    Arguments:
        * frames (iterable): SensorFrame objects
        * ego_stream (iterable): EgoMotion records sorted by time
        * config (TrackerConfig): tracker settings
        * stats (ReplayStats): counters to fill, optional

    Returns:
        * fused_lists (generator): one FusedList per accepted frame
    """
    if stats is None:
        stats = ReplayStats()
    timeline = EgoTimeline(ego_stream)
    tracker = GnnTracker(config)
    for frame in frames:
        ego = timeline.latest(frame.t)
        if ego is None and tracker.fused is not None:
            if stats.missing_ego == 0:
                logger.warning(
                    "No ego motion before t=%s; compensating with v = "
                    "omega = 0", frame.t)
            stats.missing_ego += 1
        try:
            fused = tracker.process(frame, ego)
        except StaleFrameError as error:
            stats.dropped_stale += 1
            logger.warning("Dropped stale frame: %s", error)
            continue
        stats.accepted += 1
        yield fused
    logger.info(
        "Replay finished: %d frames accepted, %d stale, %d without ego "
        "motion", stats.accepted, stats.dropped_stale, stats.missing_ego)


def replay(frames, ego_stream=(), config=None):
    """
    Fuse a whole log at once

    Arguments:
        * frames (iterable): SensorFrame objects
        * ego_stream (iterable): EgoMotion records sorted by time
        * config (TrackerConfig): tracker settings

    Returns:
        * fused_lists (list): one FusedList per accepted frame
        * stats (ReplayStats): replay counters
    """
    stats = ReplayStats()
    fused_lists = list(process_log(frames, ego_stream, config, stats))
    return fused_lists, stats
