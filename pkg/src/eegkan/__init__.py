"""EEG band-power classification benchmark.

Feature pipeline (Butterworth band-pass, Welch PSD, band powers) feeding
two from-scratch network families: a fixed-activation dense network and a
spline-edge network with learnable univariate edge functions, plus a
hyperparameter sweep harness and OLS loss analysis.
"""

from .config import RunConfig, load_config
from .dsp import (
    Band,
    CANONICAL_BANDS,
    IirFilter,
    PsdEstimate,
    band_power,
    design_butterworth_bandpass,
    filtfilt,
    frequency_response,
    welch_psd,
)
from .estimators import BandPowerExtractor, NetworkClassifier
from .features import (
    CLASS_NAMES,
    Dataset,
    FeatureRow,
    PipelineConfig,
    build_dataset,
    build_dataset_from_recordings,
    extract_features,
    read_features,
    split,
    write_features,
)
from .nn import (
    AdamState,
    KanConfig,
    ModelSpec,
    SplineGrid,
    TrainReport,
    adam_step,
    backward,
    bspline_basis,
    cross_entropy,
    evaluate,
    forward,
    init_params,
    load_checkpoint,
    param_count,
    save_checkpoint,
    softmax,
    train,
)
from .ols import OlsFit, loss_regression, ols_fit
from .recordings import (
    DEFAULT_CHANNELS,
    ManifestEntry,
    Recording,
    load_recording,
    read_manifest,
    save_recording,
    select_channels,
    write_manifest,
)
from .sweep import (
    ConfusionMatrix,
    SweepGrid,
    SweepResult,
    SweepRow,
    best_config,
    confusion,
    read_sweep,
    run_sweep,
    write_sweep,
)
from .synthetic import DEFAULT_PROFILES, synthesize_dataset

__version__ = "0.1.0"
