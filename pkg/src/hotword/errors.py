"""Exception hierarchy shared by all engine modules.

Everything user-facing derives from HotwordError so the CLI can map
data/format problems to a single exit code.
"""


class HotwordError(Exception):
    """Base class for all engine errors."""


class DecodeError(HotwordError):
    """Malformed WAV container or header."""


class UnsupportedFormat(HotwordError):
    """WAV codec or channel layout the decoder does not handle."""


class RateMismatch(HotwordError):
    """Two clips with different sample rates where one rate is required."""


class EmptyCorpus(HotwordError):
    """A directory of audio inputs turned out to contain none."""


class ShapeError(HotwordError):
    """Tensor or spectrogram shape violates an operation's contract."""


class ParamError(HotwordError):
    """Hyperparameter outside an operation's accepted range."""


class BadMagic(HotwordError):
    """Weight file missing its magic bytes, truncated, or unparseable."""


class ManifestMismatch(HotwordError):
    """Weight file manifest drifts from the fixed architecture."""


class NonFiniteTensor(HotwordError):
    """Weight tensor contains NaN or infinity."""


class TemplateError(HotwordError):
    """Hotword template file is corrupt or has the wrong version."""
