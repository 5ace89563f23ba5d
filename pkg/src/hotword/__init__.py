"""One-shot hotword detection engine.

Pipeline: WAV -> 16 kHz mono clip -> 98x64 log mel spectrogram -> 256-d unit
embedding -> distance-based match against enrolled templates, streamed over
1 s windows with a 0.25 s hop.
"""

from .audio import (
    AudioClip,
    decode_wav,
    encode_wav,
    fit_window,
    mix_noise,
    read_wav,
    resample,
    synth_dataset,
    write_wav,
)
from .bench import BenchReport, measure_far, measure_frr, sweep
from .errors import (
    BadMagic,
    DecodeError,
    EmptyCorpus,
    HotwordError,
    ManifestMismatch,
    NonFiniteTensor,
    ParamError,
    RateMismatch,
    ShapeError,
    TemplateError,
    UnsupportedFormat,
)
from .features import (
    MelFilterbank,
    MelSpectrogram,
    build_filterbank,
    hz_to_mel,
    log_mel,
    mel_to_hz,
    stft_power,
)
from .matching import (
    HotwordTemplate,
    MatchResult,
    enroll,
    euclidean,
    load_template,
    match,
    save_template,
    similarity_score,
)
from .network import (
    ModelWeights,
    arch_manifest,
    embed,
    intermediate_shapes,
    load_weights,
    random_weights,
    save_weights,
)
from .stream import DetectionEvent, DetectorState, StreamConfig, WindowRing, run_stream, step

__version__ = "0.1.0"
