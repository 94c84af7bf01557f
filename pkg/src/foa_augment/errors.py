"""Exception types raised by the library."""


class FoaAugmentError(Exception):
    """Base class for every error raised by foa_augment."""


class SpanMismatchError(FoaAugmentError):
    """Signal and label track durations differ by more than one frame hop."""


class OverlapUnsupportedError(FoaAugmentError):
    """A frame holds two or more active sources where only one is allowed."""


class NoActiveFramesError(FoaAugmentError):
    """A label-driven operation found no active frame to work from."""


class NoCoactiveFramesError(FoaAugmentError):
    """Estimate and reference share no frame where both are active."""


class RngFailureError(FoaAugmentError):
    """Random draws kept producing degenerate matrices."""


class WavError(FoaAugmentError):
    pass


class BadChannelCountError(WavError):
    pass


class UnsupportedFormatError(WavError):
    pass


class CorruptHeaderError(WavError):
    pass


class LabelFileError(FoaAugmentError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LabelParseError(LabelFileError):
    pass


class LabelRangeError(LabelFileError):
    pass


class ScenarioError(FoaAugmentError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
