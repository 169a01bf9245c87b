"""Shared helpers for the demo scripts: build toy sources and a bank on demand.

The demos ship no real recordings, so each species gets a synthetic flight
tone (harmonic stack with mild AM/FM). Replace `demo_output/sources` with
real per-species WAV folders to run the same flows on actual data.
"""

from pathlib import Path

import numpy as np

from swarmforge import AudioClip, ChunkBank, Species, write_wav

DEMO_ROOT = Path(__file__).resolve().parent / "demo_output"

TONES_HZ = {
    Species.AE_AEGYPTI: 480.0,
    Species.AE_ALBOPICTUS: 545.0,
    Species.AN_ARABIENSIS: 440.0,
    Species.AN_GAMBIAE: 460.0,
    Species.CX_QUINQUEFASCIATUS: 380.0,
    Species.CX_PIPIENS: 350.0,
}


def synthetic_flight_tone(fundamental_hz, duration_s=8.0, sample_rate=16_000, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(round(duration_s * sample_rate)) / sample_rate
    wobble = 1.0 + 0.01 * np.sin(2 * np.pi * 1.7 * t + rng.uniform(0, 2 * np.pi))
    phase = 2 * np.pi * fundamental_hz * np.cumsum(wobble) / sample_rate
    signal = np.sin(phase) + 0.4 * np.sin(2 * phase) + 0.15 * np.sin(3 * phase)
    signal *= (1.0 + 0.25 * np.sin(2 * np.pi * 2.3 * t)) * 0.25
    return AudioClip(signal, sample_rate)


def ensure_toy_bank() -> ChunkBank:
    """Create demo_output/sources and demo_output/bank if they do not exist."""
    bank_dir = DEMO_ROOT / "bank"
    if (bank_dir / "catalog.json").exists():
        return ChunkBank.load(bank_dir)
    print("building toy sources and chunk bank under", DEMO_ROOT)
    pairs = []
    for sp in Species:
        sp_dir = DEMO_ROOT / "sources" / sp.code
        sp_dir.mkdir(parents=True, exist_ok=True)
        path = sp_dir / f"{sp.code.lower()}_demo.wav"
        write_wav(synthetic_flight_tone(TONES_HZ[sp], seed=sp.index), path)
        pairs.append((path, sp))
    return ChunkBank.build(pairs, bank_dir, seed=2026)
