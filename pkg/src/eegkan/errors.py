"""Exception taxonomy shared across the package.

Every error raised by eegkan code derives from :class:`EegkanError`, so
callers can catch the package's failures with a single except clause while
still being able to discriminate the specific condition.
"""


class EegkanError(Exception):
    """Base class for all eegkan errors."""


# --- signal processing ------------------------------------------------------

class DesignError(EegkanError):
    """Invalid filter design request (cutoff ordering, Nyquist, order)."""


class SignalTooShort(EegkanError):
    """Signal shorter than the zero-phase filter's edge padding allows."""


class InvalidSegmentation(EegkanError):
    """Bad Welch segmentation (segment longer than signal, bad overlap)."""


class EmptyBand(EegkanError):
    """No spectral bins fall inside the requested band."""


# --- data handling ----------------------------------------------------------

class ParseError(EegkanError):
    """Malformed recording file, manifest, or feature table."""


class UnknownChannel(EegkanError):
    """Requested channel names missing from a recording."""

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"unknown channel(s): {', '.join(self.missing)}")


class InvalidProfile(EegkanError):
    """Synthetic class profile with negative amplitudes or missing bands."""


class EmptyDataset(EegkanError):
    """No usable rows after manifest filtering."""


class TooFewRows(EegkanError):
    """Not enough rows for the requested split or fit."""


# --- network engine ---------------------------------------------------------

class DimensionMismatch(EegkanError):
    """Input width does not match the model's expected dimension."""


class IndexOutOfRange(EegkanError):
    """Class label index outside the logit vector."""


class ShapeMismatch(EegkanError):
    """Parameter/gradient/state shapes disagree."""


class StaleCache(EegkanError):
    """Backward called with a cache from a differently-shaped forward."""


class InvalidEpochs(EegkanError):
    """Epoch count below one."""


# --- experiment / analysis --------------------------------------------------

class EmptyResult(EegkanError):
    """Sweep result contains no usable rows for the requested query."""


class RankDeficient(EegkanError):
    """Design matrix has collinear columns."""


class ConfigError(EegkanError):
    """Invalid or unknown configuration keys/values."""
