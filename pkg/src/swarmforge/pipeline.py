"""Stage orchestration: ingest -> synth -> featurize -> split -> eval.

Every stage's effective configuration is serialized next to its outputs, and
`run` skips stages whose outputs already exist under a matching config hash,
so re-running an identical config does no work and changes no bytes.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .audio import load_wav
from .bank import ChunkBank
from .errors import SwarmForgeError
from .features import (
    DEFAULT_FLOOR_DB,
    IMAGE_SIZE,
    MelConfig,
    SpectrogramMatrix,
    StftConfig,
    log_mel,
    render_image,
    save_png,
)
from .metrics import (
    DEFAULT_TAUS,
    read_predictions_csv,
    recall_monotone,
    threshold_sweep,
)
from .seeding import derive_seed
from .species import Species
from .store import (
    ManifestRecord,
    dataset_paths,
    label_matrix,
    read_manifest,
    split_counts,
    stratified_split,
    write_manifest,
)
from .synth import SynthConfig, synthesize_dataset

STATE_FILE = ".swarmforge_state.json"
RUN_CONFIG_FILE = "run_config.json"

_AUDIO_SUFFIXES = {".wav", ".wave"}


def _require_keys(section: str, row: dict, allowed: set) -> None:
    unknown = set(row) - allowed
    if unknown:
        raise ValueError(f"unknown {section} config field(s): {sorted(unknown)}")


@dataclass(frozen=True)
class IngestSpec:
    src: str
    seed: int | None = None

    @classmethod
    def from_json(cls, row: dict) -> "IngestSpec":
        _require_keys("ingest", row, {"src", "seed"})
        return cls(src=row["src"], seed=row.get("seed"))


@dataclass(frozen=True)
class SynthSpec:
    count: int
    seed: int | None = None
    mode: str = "detailed"
    window_s: float = 5.0
    chunks_min: int | None = None
    chunks_max: int | None = None
    max_species: int | None = None
    snr_min_db: float = 20.0
    snr_max_db: float = 40.0

    @classmethod
    def from_json(cls, row: dict) -> "SynthSpec":
        _require_keys(
            "synth",
            row,
            {"count", "seed", "mode", "window_s", "chunks_min", "chunks_max", "max_species", "snr_min_db", "snr_max_db"},
        )
        return cls(**row)

    def to_synth_config(self) -> SynthConfig:
        base = SynthConfig.eq3 if self.mode == "eq3" else SynthConfig
        overrides = dict(
            window_s=self.window_s,
            snr_min_db=self.snr_min_db,
            snr_max_db=self.snr_max_db,
        )
        for name in ("chunks_min", "chunks_max", "max_species"):
            if getattr(self, name) is not None:
                overrides[name] = getattr(self, name)
        return base(**overrides)


@dataclass(frozen=True)
class FeatureSpec:
    fft_size: int = 512
    window_len: int = 400
    hop: int = 160
    n_mels: int = 128
    f_min: float = 0.0
    f_max: float = 8000.0
    floor_db: float = DEFAULT_FLOOR_DB
    image_size: int = IMAGE_SIZE

    @classmethod
    def from_json(cls, row: dict) -> "FeatureSpec":
        _require_keys(
            "features",
            row,
            {"fft_size", "window_len", "hop", "n_mels", "f_min", "f_max", "floor_db", "image_size"},
        )
        return cls(**row)

    def stft_config(self) -> StftConfig:
        return StftConfig(self.fft_size, self.window_len, self.hop)

    def mel_config(self) -> MelConfig:
        return MelConfig(self.n_mels, self.f_min, self.f_max)


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple = (0.70, 0.15, 0.15)
    seed: int | None = None

    @classmethod
    def from_json(cls, row: dict) -> "SplitSpec":
        _require_keys("split", row, {"ratios", "seed"})
        out = dict(row)
        if "ratios" in out:
            out["ratios"] = tuple(out["ratios"])
        return cls(**out)


@dataclass(frozen=True)
class EvalSpec:
    pred: str
    split: str = "TEST"
    taus: tuple = DEFAULT_TAUS
    report: str | None = None

    @classmethod
    def from_json(cls, row: dict) -> "EvalSpec":
        _require_keys("eval", row, {"pred", "split", "taus", "report"})
        out = dict(row)
        if "taus" in out:
            out["taus"] = tuple(out["taus"])
        return cls(**out)


@dataclass(frozen=True)
class RunConfig:
    """Everything one end-to-end run needs; round-trips through JSON/TOML."""

    out: str
    bank: str
    seed: int = 0
    jobs: int = 1
    ingest: IngestSpec | None = None
    synth: SynthSpec | None = None
    features: FeatureSpec | None = None
    split: SplitSpec | None = None
    eval: EvalSpec | None = None

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if self.synth is not None:
            if self.synth.count < 1:
                raise ValueError(f"synth.count must be >= 1, got {self.synth.count}")
            self.synth.to_synth_config()  # validates bounds before any I/O
        if self.features is not None:
            self.features.stft_config()
            self.features.mel_config()

    def to_json(self) -> dict:
        row: dict = {"out": self.out, "bank": self.bank, "seed": self.seed, "jobs": self.jobs}
        for name in ("ingest", "synth", "features", "split", "eval"):
            section = getattr(self, name)
            if section is not None:
                row[name] = asdict(section)
                for k, v in row[name].items():
                    if isinstance(v, tuple):
                        row[name][k] = list(v)
        return row

    @classmethod
    def from_json(cls, row: dict) -> "RunConfig":
        _require_keys(
            "run", row, {"out", "bank", "seed", "jobs", "ingest", "synth", "features", "split", "eval"}
        )
        return cls(
            out=row["out"],
            bank=row["bank"],
            seed=row.get("seed", 0),
            jobs=row.get("jobs", 1),
            ingest=IngestSpec.from_json(row["ingest"]) if row.get("ingest") else None,
            synth=SynthSpec.from_json(row["synth"]) if row.get("synth") else None,
            features=FeatureSpec.from_json(row["features"]) if row.get("features") else None,
            split=SplitSpec.from_json(row["split"]) if row.get("split") else None,
            eval=EvalSpec.from_json(row["eval"]) if row.get("eval") else None,
        )

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ImportError:
                import tomli as tomllib
            with open(path, "rb") as f:
                return cls.from_json(tomllib.load(f))
        with open(path) as f:
            return cls.from_json(json.load(f))

    def stage_seed(self, section_seed: int | None) -> int:
        return self.seed if section_seed is None else section_seed


def config_hash(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


class StageLog:
    """Stage-tagged progress lines, either human-readable or JSON."""

    def __init__(self, as_json: bool = False, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout
        self.events: list[dict] = []

    def emit(self, stage: str, event: str, **extra) -> None:
        row = {"stage": stage, "event": event, **extra}
        self.events.append(row)
        if self.as_json:
            print(json.dumps(row), file=self.stream)
        else:
            detail = " ".join(f"{k}={v}" for k, v in extra.items())
            print(f"[{stage}] {event}" + (f" {detail}" if detail else ""), file=self.stream)


def _read_state(directory: Path) -> dict:
    path = directory / STATE_FILE
    if path.exists():
        return json.loads(path.read_text())
    return {}


def _write_state(directory: Path, stage: str, digest: str) -> None:
    state = _read_state(directory)
    state[stage] = digest
    (directory / STATE_FILE).write_text(json.dumps(state, sort_keys=True) + "\n")


def discover_sources(src_dir) -> list[tuple[Path, Species]]:
    """Find per-species sources under src_dir/<SPECIES_CODE>/*.wav."""
    src_dir = Path(src_dir)
    if not src_dir.is_dir():
        raise FileNotFoundError(f"source directory {src_dir} does not exist")
    sources = []
    for sub in sorted(src_dir.iterdir()):
        if not sub.is_dir():
            continue
        species = Species.from_code(sub.name)
        for wav in sorted(sub.iterdir()):
            if wav.suffix.lower() in _AUDIO_SUFFIXES:
                sources.append((wav, species))
    if not sources:
        raise SwarmForgeError(f"no <SPECIES>/*.wav sources found under {src_dir}")
    return sources


def run_ingest(config: RunConfig, log: StageLog, force: bool = False) -> str:
    assert config.ingest is not None
    bank_dir = Path(config.bank)
    seed = config.stage_seed(config.ingest.seed)
    digest = config_hash({"stage": "ingest", "src": config.ingest.src, "seed": seed})
    if not force and _read_state(bank_dir).get("ingest") == digest and (bank_dir / "catalog.json").exists():
        log.emit("ingest", "skipped", reason="up-to-date", bank=str(bank_dir))
        return digest
    sources = discover_sources(config.ingest.src)
    bank = ChunkBank.build(sources, bank_dir, seed)
    _write_state(bank_dir, "ingest", digest)
    log.emit("ingest", "done", sources=len(sources), chunks=len(bank.chunks), bank=str(bank_dir))
    return digest


def run_synth(config: RunConfig, log: StageLog, upstream: str = "", force: bool = False) -> str:
    assert config.synth is not None
    out = Path(config.out)
    seed = config.stage_seed(config.synth.seed)
    digest = config_hash(
        {"stage": "synth", "cfg": asdict(config.synth), "seed": seed, "bank": str(config.bank), "upstream": upstream}
    )
    paths = dataset_paths(out)
    if not force and _read_state(out).get("synth") == digest and paths["manifest"].exists():
        log.emit("synth", "skipped", reason="up-to-date", out=str(out))
        return digest
    bank = ChunkBank.load(config.bank)
    synth_cfg = config.synth.to_synth_config()
    rows = synthesize_dataset(bank, synth_cfg, config.synth.count, seed, out, jobs=config.jobs)
    write_manifest([ManifestRecord.from_sample(s) for s in rows], paths["manifest"])
    _write_state(out, "synth", digest)
    log.emit("synth", "done", count=len(rows), out=str(out))
    return digest


def featurize_dataset(
    dataset_dir,
    spec: FeatureSpec = FeatureSpec(),
    jobs: int = 1,
    out_dir=None,
) -> list[ManifestRecord]:
    """Render every manifest row's WAV into a log-mel PNG.

    Writes features/sample_xxxxxx.png plus features/meta.json, and rewrites
    the manifest with image paths filled in. Parallel runs produce the same
    bytes as sequential ones (each row is independent).
    """
    paths = dataset_paths(dataset_dir)
    out_root = Path(out_dir) if out_dir is not None else paths["root"]
    feature_dir = out_root / "features"
    feature_dir.mkdir(parents=True, exist_ok=True)
    records = read_manifest(paths["manifest"])
    stft_cfg = spec.stft_config()
    mel_cfg = spec.mel_config()

    def featurize_one(rec: ManifestRecord) -> ManifestRecord:
        clip = load_wav(paths["root"] / rec.wav_path)
        matrix = log_mel(clip, stft_cfg, mel_cfg, floor_db=spec.floor_db)
        image = render_image(matrix, size=spec.image_size)
        png_rel = f"features/{rec.sample_id}.png"
        save_png(image, out_root / png_rel)
        from dataclasses import replace

        return replace(rec, image_path=png_rel)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            updated = list(pool.map(featurize_one, records))
    else:
        updated = [featurize_one(rec) for rec in records]

    meta = asdict(spec)
    meta.update({"window": "hann", "mel_scale": "htk", "channels": 3, "db_reference": "max"})
    with open(feature_dir / "meta.json", "w") as f:
        json.dump(meta, f, indent=1, sort_keys=True)
        f.write("\n")
    write_manifest(updated, paths["manifest"])
    return updated


def run_featurize(config: RunConfig, log: StageLog, upstream: str = "", force: bool = False) -> str:
    spec = config.features or FeatureSpec()
    out = Path(config.out)
    digest = config_hash({"stage": "featurize", "cfg": asdict(spec), "upstream": upstream})
    if not force and _read_state(out).get("featurize") == digest and (out / "features" / "meta.json").exists():
        log.emit("featurize", "skipped", reason="up-to-date", out=str(out))
        return digest
    updated = featurize_dataset(out, spec, jobs=config.jobs)
    _write_state(out, "featurize", digest)
    log.emit("featurize", "done", images=len(updated), out=str(out))
    return digest


def run_split(config: RunConfig, log: StageLog, upstream: str = "", force: bool = False) -> str:
    spec = config.split or SplitSpec()
    out = Path(config.out)
    seed = config.stage_seed(spec.seed)
    digest = config_hash({"stage": "split", "ratios": list(spec.ratios), "seed": seed, "upstream": upstream})
    paths = dataset_paths(out)
    if not force and _read_state(out).get("split") == digest and paths["manifest"].exists():
        log.emit("split", "skipped", reason="up-to-date", out=str(out))
        return digest
    records = read_manifest(paths["manifest"])
    updated, assignment = stratified_split(records, spec.ratios, seed)
    write_manifest(updated, paths["manifest"])
    _write_state(out, "split", digest)
    log.emit("split", "done", **split_counts(updated))
    return digest


def evaluate_predictions(manifest_path, pred_path, split: str = "TEST", taus=DEFAULT_TAUS) -> dict:
    """Score a predictions CSV against a manifest's split; returns the report payload."""
    records = [r for r in read_manifest(manifest_path) if split == "ALL" or r.split == split]
    if not records:
        raise SwarmForgeError(f"no manifest records in split {split!r}")
    ids, scores = read_predictions_csv(pred_path)
    by_id = dict(zip(ids, scores))
    missing = [r.sample_id for r in records if r.sample_id not in by_id]
    if missing:
        raise SwarmForgeError(f"predictions missing for {len(missing)} sample(s), e.g. {missing[:3]}")
    aligned = np.array([by_id[r.sample_id] for r in records])
    y_true = label_matrix(records)
    reports = threshold_sweep(aligned, y_true, taus)
    return {
        "split": split,
        "n_samples": len(records),
        "taus": list(taus),
        "recall_monotone_in_tau": recall_monotone(reports),
        "reports": [r.to_json() for r in reports],
    }


def run_eval(config: RunConfig, log: StageLog) -> dict:
    assert config.eval is not None
    paths = dataset_paths(config.out)
    payload = evaluate_predictions(
        paths["manifest"], config.eval.pred, config.eval.split, config.eval.taus
    )
    if config.eval.report:
        with open(config.eval.report, "w") as f:
            json.dump(payload, f, indent=1)
            f.write("\n")
    for rep in payload["reports"]:
        log.emit(
            "eval",
            "report",
            tau=rep["tau"],
            accuracy=round(rep["multilabel_accuracy"], 4),
            macro_f1=round(rep["macro_f1"], 4),
            macro_precision=round(rep["macro_precision"], 4),
            macro_recall=round(rep["macro_recall"], 4),
        )
    return payload


def write_run_config(config: RunConfig, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / RUN_CONFIG_FILE, "w") as f:
        json.dump(config.to_json(), f, indent=1, sort_keys=True)
        f.write("\n")


def run_pipeline(config: RunConfig, log: StageLog | None = None, force: bool = False) -> None:
    """Execute every requested (present) stage in order, skipping up-to-date ones."""
    log = log or StageLog()
    upstream = ""
    if config.ingest is not None:
        write_run_config(config, config.bank)
        upstream = run_ingest(config, log, force=force)
    if any(s is not None for s in (config.synth, config.features, config.split)):
        write_run_config(config, config.out)
    if config.synth is not None:
        upstream = run_synth(config, log, upstream=upstream, force=force)
    if config.features is not None:
        upstream = run_featurize(config, log, upstream=upstream, force=force)
    if config.split is not None:
        upstream = run_split(config, log, upstream=upstream, force=force)
    if config.eval is not None:
        run_eval(config, log)
