"""Spectral front end: DFT, STFT, log-mel spectrograms, and 224x224 images.

Conventions are pinned for cross-run reproducibility: periodic Hann window,
no frame centering or padding at the edges, power spectrum, HTK mel scale,
area-normalized triangular filters, dB relative to the matrix maximum with
a -80 dB floor, grayscale replicated to three channels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from PIL import Image

from .audio import AudioClip
from .errors import (
    CollapsedMelFilterWarning,
    DegenerateSpectrogramWarning,
    SignalTooShortError,
)

POWER_GUARD = 1e-10  # added before log10 so silent frames stay finite
DEFAULT_FLOOR_DB = -80.0
IMAGE_SIZE = 224


@dataclass(frozen=True)
class StftConfig:
    """512-point FFT over 25 ms Hann windows with a 10 ms hop (at 16 kHz)."""

    fft_size: int = 512
    window_len: int = 400
    hop: int = 160

    def __post_init__(self):
        if self.window_len > self.fft_size:
            raise ValueError(f"window_len {self.window_len} exceeds fft_size {self.fft_size}")
        if self.hop < 1:
            raise ValueError(f"hop must be >= 1, got {self.hop}")

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.window_len:
            raise SignalTooShortError(f"{n_samples} samples < window_len {self.window_len}")
        return 1 + (n_samples - self.window_len) // self.hop

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1


@dataclass(frozen=True)
class MelConfig:
    """128 triangular filters on the HTK mel axis over 0-8000 Hz."""

    n_mels: int = 128
    f_min: float = 0.0
    f_max: float = 8000.0

    def __post_init__(self):
        if self.n_mels < 1:
            raise ValueError(f"n_mels must be >= 1, got {self.n_mels}")
        if not 0 <= self.f_min < self.f_max:
            raise ValueError(f"need 0 <= f_min < f_max, got {self.f_min}/{self.f_max}")


@dataclass(frozen=True)
class SpectrogramMatrix:
    """Mel-band x frame matrix in dB re max (max is exactly 0 dB)."""

    values: np.ndarray = field(repr=False)
    floor_db: float = DEFAULT_FLOOR_DB

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n_mels(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


def dft(segment) -> np.ndarray:
    """Full complex DFT of a 1-D segment: X[k] = sum_n x[n] e^{-j2pi kn/N}."""
    x = np.asarray(segment.samples if isinstance(segment, AudioClip) else segment)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("dft expects a non-empty 1-D signal")
    return np.fft.fft(x)


def hz_to_mel(f):
    """HTK mel scale: 2595 * log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def periodic_hann(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def stft(signal: AudioClip, cfg: StftConfig = StftConfig()) -> np.ndarray:
    """One-sided STFT, frames x bins.

    Frame f covers samples [f*hop, f*hop + window_len); each frame is
    multiplied by a periodic Hann window and zero-padded to fft_size.
    """
    x = signal.samples
    n_frames = cfg.n_frames(len(x))
    idx = np.arange(cfg.window_len)[None, :] + cfg.hop * np.arange(n_frames)[:, None]
    frames = x[idx] * periodic_hann(cfg.window_len)[None, :]
    return np.fft.rfft(frames, n=cfg.fft_size, axis=1)


@lru_cache(maxsize=8)
def mel_filterbank(cfg: MelConfig, fft_size: int, sample_rate: int) -> np.ndarray:
    """Triangular mel filterbank, n_mels x (fft_size/2 + 1).

    Peaks sit at n_mels points equally spaced on the mel axis strictly
    between mel(f_min) and mel(f_max); each row is normalized to sum to 1.
    Rows whose triangle falls between FFT bins stay zero and are flagged
    with CollapsedMelFilterWarning.
    """
    if cfg.f_max > sample_rate / 2:
        raise ValueError(f"f_max {cfg.f_max} exceeds Nyquist {sample_rate / 2}")
    n_bins = fft_size // 2 + 1
    edges_hz = mel_to_hz(np.linspace(hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max), cfg.n_mels + 2))
    bin_hz = np.arange(n_bins) * (sample_rate / fft_size)

    fb = np.zeros((cfg.n_mels, n_bins))
    for i in range(cfg.n_mels):
        left, center, right = edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]
        up = (bin_hz - left) / (center - left)
        down = (right - bin_hz) / (right - center)
        fb[i] = np.maximum(0.0, np.minimum(up, down))

    sums = fb.sum(axis=1)
    collapsed = np.flatnonzero(sums == 0.0)
    if collapsed.size:
        warnings.warn(
            f"{collapsed.size} mel filter(s) narrower than one FFT bin "
            f"(rows {collapsed.tolist()}); they contribute nothing",
            CollapsedMelFilterWarning,
            stacklevel=2,
        )
    fb[sums > 0] /= sums[sums > 0, None]
    fb.flags.writeable = False  # instances are shared through the cache
    return fb


def log_mel(
    signal: AudioClip,
    stft_cfg: StftConfig = StftConfig(),
    mel_cfg: MelConfig = MelConfig(),
    floor_db: float = DEFAULT_FLOOR_DB,
) -> SpectrogramMatrix:
    """Log-mel spectrogram in dB re max, clamped at floor_db."""
    if floor_db >= 0:
        raise ValueError(f"floor_db must be negative, got {floor_db}")
    power = np.abs(stft(signal, stft_cfg)) ** 2  # frames x bins
    fb = mel_filterbank(mel_cfg, stft_cfg.fft_size, signal.sample_rate)
    mel_power = fb @ power.T  # mels x frames
    db = 10.0 * np.log10(mel_power + POWER_GUARD)
    db -= db.max()
    db = np.maximum(db, floor_db)
    if db.max() == db.min():
        warnings.warn(
            "spectrogram has no contrast (all-silent input?)",
            DegenerateSpectrogramWarning,
            stacklevel=2,
        )
    return SpectrogramMatrix(db, floor_db=floor_db)


def render_image(spec: SpectrogramMatrix, size: int = IMAGE_SIZE) -> np.ndarray:
    """Render to a size x size x 3 uint8 array.

    Linear map [floor_db, 0] -> [0, 255], bilinear resize, lowest mel band at
    the bottom row, grayscale replicated across the three channels.
    """
    if spec.values.size == 0:
        raise ValueError("empty spectrogram")
    scaled = (spec.values - spec.floor_db) * (255.0 / -spec.floor_db)
    flipped = np.flipud(scaled)  # row 0 of the matrix is the lowest band
    img = Image.fromarray(flipped.astype(np.float32), mode="F")
    resized = np.asarray(img.resize((size, size), Image.Resampling.BILINEAR))
    gray = np.clip(np.round(resized), 0, 255).astype(np.uint8)
    return np.repeat(gray[:, :, None], 3, axis=2)


def save_png(image: np.ndarray, path) -> None:
    Image.fromarray(image, mode="RGB").save(path, format="PNG")
