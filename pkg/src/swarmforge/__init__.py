"""swarmforge: deterministic synthetic mosquito-swarm audio toolkit.

Builds labeled multi-species swarm mixtures from single-mosquito recordings,
extracts log-mel spectrogram features, performs cardinality-stratified
splits, and evaluates multi-label predictions under decision thresholds.
"""

from .audio import AudioClip, load_wav, peak_normalize, resample, write_wav
from .bank import ChunkBank, ChunkRef, get_chunk, ingest_source, tile_chunks
from .features import (
    MelConfig,
    SpectrogramMatrix,
    StftConfig,
    dft,
    log_mel,
    mel_filterbank,
    render_image,
    save_png,
    stft,
)
from .metrics import (
    EvalReport,
    binarize,
    macro_prf,
    multilabel_accuracy,
    read_predictions_csv,
    threshold_sweep,
    write_predictions_csv,
)
from .pipeline import RunConfig, evaluate_predictions, featurize_dataset, run_pipeline
from .species import Species
from .store import (
    ManifestRecord,
    label_matrix,
    read_manifest,
    stratified_split,
    write_manifest,
)
from .synth import (
    LabelVector,
    MixComponent,
    SwarmRecipe,
    SynthConfig,
    add_noise,
    draw_recipe,
    render_mix,
    synthesize_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "ChunkBank",
    "ChunkRef",
    "EvalReport",
    "LabelVector",
    "ManifestRecord",
    "MelConfig",
    "MixComponent",
    "RunConfig",
    "SpectrogramMatrix",
    "Species",
    "StftConfig",
    "SwarmRecipe",
    "SynthConfig",
    "add_noise",
    "binarize",
    "dft",
    "draw_recipe",
    "evaluate_predictions",
    "featurize_dataset",
    "get_chunk",
    "ingest_source",
    "label_matrix",
    "load_wav",
    "log_mel",
    "macro_prf",
    "mel_filterbank",
    "multilabel_accuracy",
    "peak_normalize",
    "read_manifest",
    "read_predictions_csv",
    "render_image",
    "render_mix",
    "resample",
    "run_pipeline",
    "save_png",
    "stft",
    "stratified_split",
    "synthesize_dataset",
    "threshold_sweep",
    "tile_chunks",
    "write_manifest",
    "write_predictions_csv",
    "write_wav",
]
