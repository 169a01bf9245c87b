"""Manifest persistence, label matrices, and the cardinality-stratified split.

The manifest is JSON Lines, one record per sample:

    {"sample_id", "wav_path", "image_path", "y": [6x0/1], "counts": [6 ints],
     "total": int, "recipe": {"components": [{"chunk_id","gain","offset_s"}],
     "snr_db", "noise_seed", "post_mix_scale"}, "split"}
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from math import floor
from pathlib import Path

import json

import numpy as np

from .errors import DegenerateStratumWarning
from .seeding import make_rng
from .species import N_SPECIES
from .synth import LabelVector, SynthesizedSample

SPLITS = ("TRAIN", "VAL", "TEST")
UNASSIGNED = "UNASSIGNED"


@dataclass(frozen=True)
class ManifestRecord:
    """One dataset row; paths are relative to the dataset root."""

    sample_id: str
    wav_path: str
    labels: LabelVector
    recipe: dict
    image_path: str | None = None
    split: str = UNASSIGNED

    def __post_init__(self):
        if self.split not in SPLITS and self.split != UNASSIGNED:
            raise ValueError(f"bad split {self.split!r}")

    def to_json(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "wav_path": self.wav_path,
            "image_path": self.image_path,
            "y": list(self.labels.y),
            "counts": list(self.labels.counts),
            "total": self.labels.total,
            "recipe": self.recipe,
            "split": self.split,
        }

    @classmethod
    def from_json(cls, row: dict) -> "ManifestRecord":
        return cls(
            sample_id=row["sample_id"],
            wav_path=row["wav_path"],
            image_path=row.get("image_path"),
            labels=LabelVector(tuple(row["y"]), tuple(row["counts"]), row["total"]),
            recipe=row["recipe"],
            split=row.get("split", UNASSIGNED),
        )

    @classmethod
    def from_sample(cls, sample: SynthesizedSample) -> "ManifestRecord":
        return cls(
            sample_id=sample.sample_id,
            wav_path=sample.wav_path,
            labels=sample.labels,
            recipe=sample.recipe.to_json(),
        )


def write_manifest(records, path) -> None:
    with open(path, "w") as f:
        for rec in records:
            f.write(json.dumps(rec.to_json()) + "\n")


def read_manifest(path) -> list[ManifestRecord]:
    records = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(ManifestRecord.from_json(json.loads(line)))
    return records


def label_matrix(records) -> np.ndarray:
    """N x 6 binary matrix; column order is the fixed species index order."""
    if not records:
        raise ValueError("manifest is empty")
    return np.array([rec.labels.y for rec in records], dtype=np.int64)


def derive_labels(recipe: dict, chunk_species) -> LabelVector:
    """Recompute a label vector from a stored recipe.

    `chunk_species` maps chunk_id -> Species (e.g. built from a bank
    catalog); used for manifest consistency checks.
    """
    counts = [0] * N_SPECIES
    for comp in recipe["components"]:
        counts[chunk_species[comp["chunk_id"]].index] += 1
    return LabelVector(
        y=tuple(1 if c else 0 for c in counts),
        counts=tuple(counts),
        total=len(recipe["components"]),
    )


def allocate_counts(size: int, ratios: tuple[float, float, float]) -> tuple[int, int, int]:
    """Largest-remainder allocation of a stratum across (train, val, test).

    Ties on the fractional part go to the earlier split. When the stratum
    has >= 3 samples, val and test each get at least one (taken from the
    largest allocation) so every split sees every cardinality.
    """
    ideal = [size * r for r in ratios]
    counts = [floor(v) for v in ideal]
    order = sorted(range(3), key=lambda j: (-(ideal[j] - counts[j]), j))
    for j in order[: size - sum(counts)]:
        counts[j] += 1
    if size >= 3:
        for j in (1, 2):
            if counts[j] == 0:
                donor = max(range(3), key=lambda k: (counts[k], -k))
                counts[donor] -= 1
                counts[j] += 1
    return tuple(counts)


@dataclass(frozen=True)
class SplitAssignment:
    """Per-stratum allocation plus the sample_id -> split map."""

    ratios: tuple
    seed: int
    per_stratum: dict  # cardinality -> (n_train, n_val, n_test)
    assignment: dict  # sample_id -> split name


def stratified_split(
    records,
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15),
    seed: int = 0,
) -> tuple[list[ManifestRecord], SplitAssignment]:
    """Assign splits stratified on label cardinality.

    Samples are grouped by cardinality; each stratum is shuffled with the
    seed and cut into contiguous train/val/test blocks sized by
    largest-remainder rounding. Strata of size 1-2 go entirely to TRAIN
    (with a DegenerateStratumWarning). Deterministic given (manifest order,
    seed).
    """
    if len(records) < 3:
        raise ValueError(f"need >= 3 samples to split, got {len(records)}")
    if any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be positive and sum to 1, got {ratios}")

    strata: dict[int, list[int]] = {}
    for i, rec in enumerate(records):
        strata.setdefault(rec.labels.cardinality, []).append(i)

    rng = make_rng(seed)
    assignment: dict[str, str] = {}
    per_stratum: dict[int, tuple[int, int, int]] = {}
    for card in sorted(strata):
        idx = strata[card]
        if len(idx) < 3:
            warnings.warn(
                f"stratum s={card} has only {len(idx)} sample(s); assigning to TRAIN",
                DegenerateStratumWarning,
                stacklevel=2,
            )
            per_stratum[card] = (len(idx), 0, 0)
            for i in idx:
                assignment[records[i].sample_id] = "TRAIN"
            continue
        counts = allocate_counts(len(idx), ratios)
        per_stratum[card] = counts
        shuffled = [idx[j] for j in rng.permutation(len(idx))]
        bounds = (counts[0], counts[0] + counts[1])
        for pos, i in enumerate(shuffled):
            split = "TRAIN" if pos < bounds[0] else "VAL" if pos < bounds[1] else "TEST"
            assignment[records[i].sample_id] = split

    updated = [replace(rec, split=assignment[rec.sample_id]) for rec in records]
    return updated, SplitAssignment(tuple(ratios), seed, per_stratum, assignment)


def split_counts(records) -> dict[str, int]:
    out = {name: 0 for name in SPLITS}
    for rec in records:
        if rec.split in out:
            out[rec.split] += 1
    return out


def dataset_paths(root) -> dict[str, Path]:
    root = Path(root)
    return {
        "root": root,
        "manifest": root / "manifest.jsonl",
        "audio": root / "audio",
        "features": root / "features",
    }
