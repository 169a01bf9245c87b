"""Chunk bank: tile per-species source recordings into short wingbeat chunks.

A bank is a directory holding 16 kHz peak-normalized copies of the sources
plus a JSON catalog of non-overlapping chunk references:

    bank/catalog.json
    bank/audio/<SPECIES>/<basename>.wav

Chunk boundaries are drawn once at ingest and are deterministic for a given
(file, seed), so the same inputs always produce the same catalog.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioClip, load_wav, peak_normalize, resample, write_wav
from .errors import SourceTooShortError, StaleRefError
from .seeding import derive_seed, make_rng
from .species import Species

BANK_RATE = 16_000
INGEST_PEAK = 0.9
MIN_CHUNK_S = 0.3
MAX_CHUNK_S = 0.6
CATALOG_VERSION = 1


@dataclass(frozen=True)
class ChunkRef:
    """Addressable slice of an ingested source recording."""

    chunk_id: str
    species: Species
    source_file: str  # relative to the bank root (or absolute for loose refs)
    start_s: float
    duration_s: float
    source_hash: str  # 64-bit BLAKE2b of the source file bytes, hex

    @property
    def start_samples(self) -> int:
        return round(self.start_s * BANK_RATE)

    @property
    def n_samples(self) -> int:
        return round(self.duration_s * BANK_RATE)


def file_hash(path) -> str:
    """64-bit content hash of a file, used for stale-reference detection."""
    return hashlib.blake2b(Path(path).read_bytes(), digest_size=8).hexdigest()


def tile_chunks(n_samples: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Greedy left-to-right tiling into (start, length) sample spans.

    Lengths are drawn uniformly from [0.3, 0.6] s; a draw longer than the
    remaining audio is clamped down to it (never below 0.3 s); a final
    remainder shorter than 0.3 s is discarded.
    """
    min_len = round(MIN_CHUNK_S * BANK_RATE)
    max_len = round(MAX_CHUNK_S * BANK_RATE)
    spans = []
    pos = 0
    while n_samples - pos >= min_len:
        length = round(rng.uniform(MIN_CHUNK_S, MAX_CHUNK_S) * BANK_RATE)
        length = min(max(length, min_len), max_len, n_samples - pos)
        spans.append((pos, length))
        pos += length
    return spans


def _prepare(clip: AudioClip) -> AudioClip:
    if clip.sample_rate != BANK_RATE:
        clip = resample(clip, BANK_RATE)
    return peak_normalize(clip, INGEST_PEAK)


def ingest_source(path, species: Species, rng: np.random.Generator) -> list[ChunkRef]:
    """Tile one source file into chunk references.

    The returned refs address the file at `path`, which is expected to stay
    byte-identical afterwards (get_chunk re-checks the content hash).
    """
    clip = _prepare(load_wav(path))
    if len(clip) < round(MIN_CHUNK_S * BANK_RATE):
        raise SourceTooShortError(
            f"{path}: {clip.duration:.3f} s after resampling, need >= {MIN_CHUNK_S} s"
        )
    digest = file_hash(path)
    stem = Path(path).stem
    refs = []
    for i, (start, length) in enumerate(tile_chunks(len(clip), rng)):
        refs.append(
            ChunkRef(
                chunk_id=f"{species.code.lower()}/{stem}#{i:03d}",
                species=species,
                source_file=str(path),
                start_s=start / BANK_RATE,
                duration_s=length / BANK_RATE,
                source_hash=digest,
            )
        )
    return refs


def get_chunk(ref: ChunkRef, root=None, _cache: dict | None = None) -> AudioClip:
    """Resolve a chunk reference to its 16 kHz audio slice.

    Raises StaleRefError if the source file is missing or its bytes changed
    since ingest.
    """
    path = Path(ref.source_file)
    if root is not None and not path.is_absolute():
        path = Path(root) / path
    key = str(path)
    if _cache is not None and key in _cache:
        digest, clip = _cache[key]
    else:
        if not path.exists():
            raise StaleRefError(f"{ref.chunk_id}: source {path} is missing")
        digest = file_hash(path)
        clip = _prepare(load_wav(path))
        if _cache is not None:
            _cache[key] = (digest, clip)
    if digest != ref.source_hash:
        raise StaleRefError(f"{ref.chunk_id}: source {path} changed since ingest")
    start = ref.start_samples
    return AudioClip(clip.samples[start : start + ref.n_samples], BANK_RATE)


class ChunkBank:
    """Catalog of chunk references over a bank directory."""

    def __init__(self, root, chunks: list[ChunkRef]):
        self.root = Path(root)
        self.chunks = list(chunks)
        self.by_id = {c.chunk_id: c for c in self.chunks}
        if len(self.by_id) != len(self.chunks):
            raise ValueError("duplicate chunk ids in catalog")
        self.by_species: dict[Species, list[ChunkRef]] = {}
        for c in self.chunks:
            self.by_species.setdefault(c.species, []).append(c)
        self._cache: dict = {}

    def species_present(self) -> list[Species]:
        return sorted(self.by_species, key=lambda s: s.index)

    def get_chunk(self, ref: ChunkRef) -> AudioClip:
        return get_chunk(ref, root=self.root, _cache=self._cache)

    def get_chunk_by_id(self, chunk_id: str) -> AudioClip:
        try:
            ref = self.by_id[chunk_id]
        except KeyError:
            raise StaleRefError(f"unknown chunk id {chunk_id!r}") from None
        return self.get_chunk(ref)

    @classmethod
    def build(cls, sources, root, seed: int) -> "ChunkBank":
        """Ingest (path, species) pairs into a fresh bank directory.

        Each source gets a 16 kHz peak-normalized copy under bank/audio/ and
        its own RNG stream derived from (seed, species, basename), so the
        catalog does not depend on ingest order.
        """
        root = Path(root)
        (root / "audio").mkdir(parents=True, exist_ok=True)
        normalized = sorted(
            ((Path(p), sp) for p, sp in sources), key=lambda item: (item[1].index, item[0].name)
        )
        seen = set()
        chunks: list[ChunkRef] = []
        for path, sp in normalized:
            rel = Path("audio") / sp.code / (path.stem + ".wav")
            if rel in seen:
                raise ValueError(f"duplicate basename {path.stem!r} for {sp.code}")
            seen.add(rel)
            dest = root / rel
            dest.parent.mkdir(parents=True, exist_ok=True)
            write_wav(_prepare(load_wav(path)), dest)
            rng = make_rng(derive_seed("ingest", seed, sp.code, path.stem))
            refs = ingest_source(dest, sp, rng)
            chunks.extend(
                ChunkRef(r.chunk_id, r.species, str(rel), r.start_s, r.duration_s, r.source_hash)
                for r in refs
            )
        bank = cls(root, chunks)
        bank.save()
        return bank

    def save(self) -> None:
        payload = {
            "version": CATALOG_VERSION,
            "chunks": [
                {
                    "chunk_id": c.chunk_id,
                    "species": c.species.code,
                    "source_file": c.source_file,
                    "start_s": c.start_s,
                    "duration_s": c.duration_s,
                    "hash": c.source_hash,
                }
                for c in self.chunks
            ],
        }
        with open(self.root / "catalog.json", "w") as f:
            json.dump(payload, f, indent=1)
            f.write("\n")

    @classmethod
    def load(cls, root) -> "ChunkBank":
        root = Path(root)
        with open(root / "catalog.json") as f:
            payload = json.load(f)
        if payload.get("version") != CATALOG_VERSION:
            raise ValueError(f"unsupported catalog version: {payload.get('version')!r}")
        chunks = [
            ChunkRef(
                chunk_id=row["chunk_id"],
                species=Species.from_code(row["species"]),
                source_file=row["source_file"],
                start_s=row["start_s"],
                duration_s=row["duration_s"],
                source_hash=row["hash"],
            )
            for row in payload["chunks"]
        ]
        return cls(root, chunks)
