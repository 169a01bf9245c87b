"""Shared fixtures: synthetic wingbeat-like sources and prebuilt toy banks."""

import numpy as np
import pytest

from swarmforge.audio import AudioClip, write_wav
from swarmforge.bank import ChunkBank
from swarmforge.species import Species

# Fixture tones only: fundamental frequency per species for the fake sources.
FIXTURE_TONES_HZ = {
    Species.AE_AEGYPTI: 480.0,
    Species.AE_ALBOPICTUS: 545.0,
    Species.AN_ARABIENSIS: 440.0,
    Species.AN_GAMBIAE: 460.0,
    Species.CX_QUINQUEFASCIATUS: 380.0,
    Species.CX_PIPIENS: 350.0,
}


def wingbeat_like(
    fundamental_hz: float,
    duration_s: float = 8.0,
    sample_rate: int = 16_000,
    seed: int = 0,
) -> AudioClip:
    """A harmonic tone with mild AM/FM jitter, loosely shaped like a flight tone."""
    rng = np.random.default_rng(seed)
    t = np.arange(round(duration_s * sample_rate)) / sample_rate
    wobble = 1.0 + 0.01 * np.sin(2 * np.pi * 1.7 * t + rng.uniform(0, 2 * np.pi))
    phase = 2 * np.pi * fundamental_hz * np.cumsum(wobble) / sample_rate
    signal = np.sin(phase) + 0.4 * np.sin(2 * phase) + 0.15 * np.sin(3 * phase)
    am = 1.0 + 0.25 * np.sin(2 * np.pi * 2.3 * t + rng.uniform(0, 2 * np.pi))
    signal = signal * am * 0.25
    return AudioClip(signal, sample_rate)


def build_source_tree(root, files_per_species: int = 1, duration_s: float = 8.0, rates=(16_000,)):
    """Write <SPECIES>/<name>.wav fixtures under root; returns (path, species) pairs."""
    pairs = []
    for sp in Species:
        sp_dir = root / sp.code
        sp_dir.mkdir(parents=True, exist_ok=True)
        for k in range(files_per_species):
            rate = rates[k % len(rates)]
            clip = wingbeat_like(
                FIXTURE_TONES_HZ[sp], duration_s=duration_s, sample_rate=rate, seed=100 * sp.index + k
            )
            path = sp_dir / f"{sp.code.lower()}_{k}.wav"
            write_wav(clip, path)
            pairs.append((path, sp))
    return pairs


@pytest.fixture(scope="session")
def source_tree(tmp_path_factory):
    root = tmp_path_factory.mktemp("sources")
    build_source_tree(root, files_per_species=2, duration_s=8.0, rates=(16_000, 44_100))
    return root


@pytest.fixture(scope="session")
def toy_bank(tmp_path_factory, source_tree):
    root = tmp_path_factory.mktemp("bank")
    pairs = []
    for sp_dir in sorted(source_tree.iterdir()):
        sp = Species.from_code(sp_dir.name)
        pairs.extend((p, sp) for p in sorted(sp_dir.glob("*.wav")))
    return ChunkBank.build(pairs, root, seed=1234)
