"""Swarm synthesis: draw mixing recipes and render noisy multi-species mixtures.

Each synthetic sample is a 5-second window in which 3-7 wingbeat chunks from
up to 3 species are placed at random gains (0.2-1.0) and offsets (0-3 s),
then overlaid with white Gaussian noise at a 20-40 dB SNR. The recipe stores
everything needed to re-render the sample bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .audio import AudioClip, write_wav
from .bank import BANK_RATE, ChunkBank, ChunkRef
from .errors import (
    EmptyBankError,
    RejectionBudgetExceededError,
    ZeroSignalPowerError,
)
from .seeding import derive_seed, make_rng
from .species import N_SPECIES, Species

GAIN_RANGE = (0.2, 1.0)
OFFSET_RANGE_S = (0.0, 3.0)
CLIP_GUARD_PEAK = 0.99
REJECTION_BUDGET = 100


@dataclass(frozen=True)
class MixComponent:
    """One chunk placed in the mix window."""

    chunk: ChunkRef
    gain: float
    offset_s: float


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the swarm generator.

    DETAILED mode reflects the dataset the prose describes (3-7 chunks from
    up to 3 species); EQ3 mode reflects the bare mixing-formula presentation
    (1-10 chunks, any of the 6 species).
    """

    window_s: float = 5.0
    chunks_min: int = 3
    chunks_max: int = 7
    max_species: int = 3
    snr_min_db: float = 20.0
    snr_max_db: float = 40.0
    mode: str = "detailed"

    def __post_init__(self):
        if self.mode not in ("detailed", "eq3"):
            raise ValueError(f"mode must be 'detailed' or 'eq3', got {self.mode!r}")
        if not 1 <= self.chunks_min <= self.chunks_max:
            raise ValueError(f"need 1 <= chunks_min <= chunks_max, got {self.chunks_min}/{self.chunks_max}")
        if not 1 <= self.max_species <= N_SPECIES:
            raise ValueError(f"max_species must be in 1..{N_SPECIES}, got {self.max_species}")
        if self.snr_min_db > self.snr_max_db:
            raise ValueError("snr_min_db must be <= snr_max_db")
        if self.window_s < OFFSET_RANGE_S[1] + 0.6:
            raise ValueError(f"window_s must be >= {OFFSET_RANGE_S[1] + 0.6} so no chunk is truncated")

    @classmethod
    def eq3(cls, **overrides) -> "SynthConfig":
        base = dict(chunks_min=1, chunks_max=10, max_species=N_SPECIES, mode="eq3")
        base.update(overrides)
        return cls(**base)

    @property
    def window_samples(self) -> int:
        return round(self.window_s * BANK_RATE)


@dataclass(frozen=True)
class LabelVector:
    """Presence flags, per-species counts, and total mosquito count."""

    y: tuple
    counts: tuple
    total: int

    @classmethod
    def from_components(cls, components) -> "LabelVector":
        counts = [0] * N_SPECIES
        for comp in components:
            counts[comp.chunk.species.index] += 1
        return cls(
            y=tuple(1 if c > 0 else 0 for c in counts),
            counts=tuple(counts),
            total=len(components),
        )

    @property
    def cardinality(self) -> int:
        return sum(self.y)


@dataclass(frozen=True)
class SwarmRecipe:
    """Full provenance of one synthetic sample."""

    sample_id: str
    components: tuple
    snr_db: float
    noise_seed: int
    post_mix_scale: float = 1.0

    @property
    def labels(self) -> LabelVector:
        return LabelVector.from_components(self.components)

    def to_json(self) -> dict:
        return {
            "components": [
                {"chunk_id": c.chunk.chunk_id, "gain": c.gain, "offset_s": c.offset_s}
                for c in self.components
            ],
            "snr_db": self.snr_db,
            "noise_seed": self.noise_seed,
            "post_mix_scale": self.post_mix_scale,
        }

    @classmethod
    def from_json(cls, sample_id: str, payload: dict, bank: ChunkBank) -> "SwarmRecipe":
        components = tuple(
            MixComponent(bank.by_id[c["chunk_id"]], c["gain"], c["offset_s"])
            for c in payload["components"]
        )
        return cls(
            sample_id=sample_id,
            components=components,
            snr_db=payload["snr_db"],
            noise_seed=payload["noise_seed"],
            post_mix_scale=payload.get("post_mix_scale", 1.0),
        )


def draw_recipe(
    bank: ChunkBank,
    config: SynthConfig,
    rng: np.random.Generator,
    sample_id: str | None = None,
) -> SwarmRecipe:
    """Draw one swarm recipe.

    Draw order is fixed (species count, species subset, chunk count, chunk
    assignment, then per-chunk source/gain/offset, then SNR and noise seed)
    so a given RNG state always yields the same recipe.
    """
    available = bank.species_present()
    if not available:
        raise EmptyBankError("bank lists no species")

    m = int(rng.integers(1, min(config.max_species, len(available)) + 1))
    picked = list(rng.choice(len(available), size=m, replace=False))
    n = int(rng.integers(config.chunks_min, config.chunks_max + 1))
    if m > n:  # cannot give every drawn species a chunk; drop the surplus
        m, picked = n, picked[:n]
    species = sorted((available[i] for i in picked), key=lambda s: s.index)

    for _ in range(1000):
        assignment = rng.integers(0, m, size=n)
        if len(set(assignment.tolist())) == m:
            break
    else:  # pragma: no cover - P(miss) shrinks geometrically
        raise RuntimeError("could not place every drawn species in 1000 tries")

    components = []
    for idx in assignment:
        pool = bank.by_species[species[int(idx)]]
        chunk = pool[int(rng.integers(0, len(pool)))]
        gain = float(rng.uniform(*GAIN_RANGE))
        offset = float(rng.uniform(*OFFSET_RANGE_S))
        components.append(MixComponent(chunk, gain, offset))

    snr_db = float(rng.uniform(config.snr_min_db, config.snr_max_db))
    noise_seed = int(rng.integers(0, 2**63, dtype=np.uint64))
    if sample_id is None:
        sample_id = bytes(rng.bytes(6)).hex()
    return SwarmRecipe(sample_id, tuple(components), snr_db, noise_seed)


def render_mix(recipe: SwarmRecipe, bank: ChunkBank, window_s: float = 5.0) -> tuple[AudioClip, float]:
    """Render the clean mix: sum of gain-scaled chunks at sample-quantized offsets.

    Returns the clip plus the clipping-guard factor that was applied (1.0 if
    the raw peak stayed within 1.0, else the scale that brought it to 0.99).
    """
    n = round(window_s * BANK_RATE)
    mix = np.zeros(n, dtype=np.float64)
    for comp in recipe.components:
        chunk = bank.get_chunk(comp.chunk)
        start = round(comp.offset_s * BANK_RATE)
        stop = min(start + len(chunk), n)
        if start >= n:
            continue
        mix[start:stop] += comp.gain * chunk.samples[: stop - start]
    peak = np.max(np.abs(mix))
    scale = 1.0
    if peak > 1.0:
        scale = CLIP_GUARD_PEAK / peak
        mix *= scale
    return AudioClip(mix, BANK_RATE), scale


def add_noise(mix: AudioClip, snr_db: float, noise_seed: int) -> AudioClip:
    """Add white Gaussian noise at the target SNR.

    Noise power is set against the mean-square power of the clean mix over
    the full window. No clamping here; that happens at WAV write.
    """
    p_sig = float(np.mean(mix.samples**2))
    if p_sig == 0.0:
        raise ZeroSignalPowerError("all-silent mix; reject the sample upstream")
    sigma = np.sqrt(p_sig * 10.0 ** (-snr_db / 10.0))
    noise = make_rng(noise_seed).standard_normal(len(mix)) * sigma
    return AudioClip(mix.samples + noise, mix.sample_rate)


@dataclass(frozen=True)
class SynthesizedSample:
    """One manifest row as produced by synthesize_dataset."""

    sample_id: str
    wav_path: str
    labels: LabelVector
    recipe: SwarmRecipe


def render_sample(recipe: SwarmRecipe, bank: ChunkBank, config: SynthConfig) -> tuple[AudioClip, SwarmRecipe]:
    """Clean render plus noise for one recipe; returns the noisy clip and the
    recipe updated with the applied post-mix scale."""
    mix, scale = render_mix(recipe, bank, config.window_s)
    noisy = add_noise(mix, recipe.snr_db, recipe.noise_seed)
    return noisy, replace(recipe, post_mix_scale=scale)


def synthesize_sample(
    bank: ChunkBank, config: SynthConfig, master_seed: int, index: int
) -> tuple[AudioClip, SwarmRecipe]:
    """Generate sample `index` of a dataset, independent of all other indices.

    The per-sample seed is derived from (master_seed, index, attempt), so
    parallel generation is bit-identical to sequential. All-silent draws are
    rejected and redrawn with the next attempt seed, up to a fixed budget.
    """
    sample_id = f"sample_{index:06d}"
    for attempt in range(REJECTION_BUDGET):
        rng = make_rng(derive_seed("sample", master_seed, index, attempt))
        recipe = draw_recipe(bank, config, rng, sample_id=sample_id)
        try:
            return render_sample(recipe, bank, config)
        except ZeroSignalPowerError:
            continue
    raise RejectionBudgetExceededError(
        f"{sample_id}: {REJECTION_BUDGET} consecutive all-silent draws"
    )


def synthesize_dataset(
    bank: ChunkBank,
    config: SynthConfig,
    count: int,
    master_seed: int,
    out_dir,
    jobs: int = 1,
) -> list[SynthesizedSample]:
    """Generate `count` samples into out_dir/audio plus manifest rows.

    Output depends only on (master_seed, index, bank, config); `jobs` changes
    wall time, never bytes.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not bank.chunks:
        raise EmptyBankError("bank catalog is empty")
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    def build(index: int) -> SynthesizedSample:
        noisy, recipe = synthesize_sample(bank, config, master_seed, index)
        wav_rel = f"audio/{recipe.sample_id}.wav"
        write_wav(noisy, out_dir / wav_rel)
        return SynthesizedSample(recipe.sample_id, wav_rel, recipe.labels, recipe)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(build, range(count)))
    else:
        rows = [build(i) for i in range(count)]
    return rows


def replay_sample(row_recipe: dict, bank: ChunkBank, config: SynthConfig, sample_id: str) -> AudioClip:
    """Re-render a manifest row's recipe (the replay oracle path)."""
    recipe = SwarmRecipe.from_json(sample_id, row_recipe, bank)
    noisy, _ = render_sample(recipe, bank, config)
    return noisy
