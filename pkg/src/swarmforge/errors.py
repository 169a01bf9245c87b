"""Exception and warning types shared across the package."""


class SwarmForgeError(Exception):
    """Base class for all package errors."""


class UnsupportedFormatError(SwarmForgeError):
    """WAV file uses a codec, bit depth, or layout we do not read."""


class SourceTooShortError(SwarmForgeError):
    """Source recording shorter than the minimum chunk length."""


class StaleRefError(SwarmForgeError):
    """Chunk reference points at a missing or modified source file."""


class EmptyBankError(SwarmForgeError):
    """Chunk bank has no usable chunks."""


class ZeroSignalPowerError(SwarmForgeError):
    """Clean mix is all-silent, so an SNR target is meaningless."""


class RejectionBudgetExceededError(SwarmForgeError):
    """Too many consecutive rejected draws for one sample index."""


class SignalTooShortError(SwarmForgeError):
    """Signal shorter than one analysis window."""


class ShapeMismatchError(SwarmForgeError):
    """Label/score matrices disagree in shape."""


class DegenerateStratumWarning(UserWarning):
    """A cardinality stratum is too small to populate all three splits."""


class DegenerateSpectrogramWarning(UserWarning):
    """Spectrogram carries no contrast (e.g. all-silent input)."""


class CollapsedMelFilterWarning(UserWarning):
    """Mel triangle narrower than one FFT bin; its row is all zero."""
