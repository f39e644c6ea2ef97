"""Errors raised by fusetrack.

Argument problems derive from ``ValueError`` so callers catching the usual
builtin keep working.
"""


class FuseTrackError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(FuseTrackError, ValueError):
    """An argument is non-finite, out of range or missing."""


class ConfigError(InvalidInputError):

    def __init__(self, messages):
        """
        Configuration rejected with one message per offending field

        Arguments:
            * messages (list): strings formatted as ``"field: problem"``
        """
        self.messages = list(messages)
        super(ConfigError, self).__init__("; ".join(self.messages))


class SingularInnovationError(FuseTrackError, ArithmeticError):

    def __init__(self, message, track_id=None):
        """
        Covariance that should be positive definite is not

        Arguments:
            * message (str): description of the failing factorization
            * track_id (int): id (or index) of the offending track, if known
        """
        self.track_id = track_id
        if track_id is not None:
            message = "{} (track {})".format(message, track_id)
        super(SingularInnovationError, self).__init__(message)


class StaleFrameError(FuseTrackError):
    """Frame timestamp is not after the fused list timestamp."""


class UndefinedMseError(FuseTrackError):
    """No sample could be paired with the ground truth."""


class InsufficientDataError(FuseTrackError):
    """Too few samples for a statistical estimate."""


class RecordError(FuseTrackError, ValueError):

    def __init__(self, message, line=None):
        """
        Malformed JSONL record

        Arguments:
            * message (str): what is wrong with the record
            * line (int): 1-based line number in the source file
        """
        self.line = line
        if line is not None:
            message = "line {}: {}".format(line, message)
        super(RecordError, self).__init__(message)
