"""audio_core contract tests: WAV I/O, resampling, normalization."""

import struct

import numpy as np
import pytest

from swarmforge.audio import AudioClip, load_wav, peak_normalize, resample, write_wav
from swarmforge.errors import UnsupportedFormatError


def raw_wav_bytes(payload: bytes, channels: int, rate: int, bits: int, tag: int) -> bytes:
    """Hand-built WAV container, independent of write_wav."""
    block = channels * bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, tag, channels, rate, rate * block, block, bits,
        b"data", len(payload),
    )
    return header + payload


def test_load_mono_pcm16_header_arithmetic(tmp_path):
    rate = 8000
    pcm = (np.sin(2 * np.pi * 100 * np.arange(rate) / rate) * 20000).astype("<i2")
    path = tmp_path / "one_second.wav"
    path.write_bytes(raw_wav_bytes(pcm.tobytes(), 1, rate, 16, 1))
    clip = load_wav(path)
    assert len(clip) == 8000
    assert clip.sample_rate == 8000
    np.testing.assert_allclose(clip.samples, pcm / 32768.0)


def test_load_opposite_stereo_channels_cancel(tmp_path):
    c = (np.arange(-500, 500) * 30).astype("<i2")
    stereo = np.empty(2 * len(c), dtype="<i2")
    stereo[0::2] = c
    stereo[1::2] = -c
    path = tmp_path / "stereo.wav"
    path.write_bytes(raw_wav_bytes(stereo.tobytes(), 2, 16_000, 16, 1))
    clip = load_wav(path)
    assert len(clip) == len(c)
    assert np.all(clip.samples == 0.0)


def test_load_float32(tmp_path):
    values = np.linspace(-0.8, 0.8, 1000).astype("<f4")
    path = tmp_path / "float.wav"
    path.write_bytes(raw_wav_bytes(values.tobytes(), 1, 16_000, 32, 3))
    clip = load_wav(path)
    np.testing.assert_allclose(clip.samples, values.astype(np.float64))


def test_load_rejects_unsupported(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(raw_wav_bytes(b"\x00" * 64, 1, 8000, 8, 1))  # 8-bit PCM
    with pytest.raises(UnsupportedFormatError):
        load_wav(path)
    path.write_bytes(raw_wav_bytes(b"\x00" * 64, 1, 8000, 16, 2))  # ADPCM tag
    with pytest.raises(UnsupportedFormatError):
        load_wav(path)
    path.write_bytes(b"OggS" + b"\x00" * 40)
    with pytest.raises(UnsupportedFormatError):
        load_wav(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_wav(tmp_path / "nope.wav")


def test_write_read_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    clip = AudioClip(rng.uniform(-1, 1, 16_000), 16_000)
    path = tmp_path / "rt.wav"
    write_wav(clip, path)
    back = load_wav(path)
    assert len(back) == len(clip)  # length preserved exactly
    assert np.max(np.abs(back.samples - clip.samples)) <= 1.0 / 32768.0


def test_write_data_chunk_size(tmp_path):
    clip = AudioClip(np.zeros(16_000), 16_000)
    path = tmp_path / "sized.wav"
    write_wav(clip, path)
    blob = path.read_bytes()
    # data chunk declared size: last header field before payload
    declared = struct.unpack_from("<I", blob, 40)[0]
    assert declared == 32_000
    assert len(blob) == 44 + 32_000


def test_write_clamps_out_of_range(tmp_path):
    clip = AudioClip(np.array([1.5, -2.0, 0.0]), 16_000)
    path = tmp_path / "clamp.wav"
    write_wav(clip, path)
    stored = np.frombuffer(path.read_bytes()[44:], dtype="<i2")
    assert stored[0] == 32767
    assert stored[1] == -32768
    assert stored[2] == 0


def test_resample_identity():
    clip = AudioClip(np.sin(np.linspace(0, 20, 16_000)), 16_000)
    out = resample(clip, 16_000)
    assert out.sample_rate == 16_000
    np.testing.assert_array_equal(out.samples, clip.samples)


def test_resample_length_ratio():
    clip = AudioClip(np.random.default_rng(0).normal(size=8000), 8000)
    out = resample(clip, 16_000)
    assert len(out) == 16_000
    assert out.sample_rate == 16_000


def test_resample_sine_peak_preserved():
    rate_in, rate_out, freq = 44_100, 16_000, 440.0
    t = np.arange(rate_in) / rate_in
    clip = AudioClip(np.sin(2 * np.pi * freq * t), rate_in)
    out = resample(clip, rate_out)
    spectrum = np.abs(np.fft.rfft(out.samples))
    peak_hz = np.argmax(spectrum) * rate_out / len(out)
    bin_hz = rate_out / len(out)
    assert abs(peak_hz - freq) <= bin_hz


def test_resample_rms_energy_within_one_percent():
    rate_in, rate_out, freq = 44_100, 16_000, 440.0
    t = np.arange(2 * rate_in) / rate_in
    clip = AudioClip(np.sin(2 * np.pi * freq * t), rate_in)
    out = resample(clip, rate_out)
    rms_in = np.sqrt(np.mean(clip.samples**2))
    rms_out = np.sqrt(np.mean(out.samples**2))
    assert abs(rms_out - rms_in) / rms_in < 0.01


def test_resample_rate_idempotent():
    clip = AudioClip(np.random.default_rng(3).normal(size=12_345), 44_100)
    once = resample(clip, 16_000)
    twice = resample(once, 16_000)
    np.testing.assert_array_equal(once.samples, twice.samples)


def test_resample_upsample_preserves_tone():
    t = np.arange(8000) / 8000
    clip = AudioClip(np.sin(2 * np.pi * 440 * t), 8000)
    out = resample(clip, 16_000)
    spectrum = np.abs(np.fft.rfft(out.samples))
    peak_hz = np.argmax(spectrum) * 16_000 / len(out)
    assert abs(peak_hz - 440.0) <= 1.0


def test_peak_normalize_scales():
    clip = AudioClip(np.array([0.5, -0.25]), 16_000)
    out = peak_normalize(clip, 1.0)
    np.testing.assert_allclose(out.samples, [1.0, -0.5])


def test_peak_normalize_zero_input_unchanged():
    clip = AudioClip(np.zeros(100), 16_000)
    out = peak_normalize(clip, 0.9)
    assert np.all(out.samples == 0.0)


def test_peak_normalize_hits_target():
    rng = np.random.default_rng(11)
    clip = AudioClip(rng.normal(size=5000) * 0.03, 16_000)
    out = peak_normalize(clip, 0.9)
    assert abs(np.max(np.abs(out.samples)) - 0.9) < 1e-6


def test_peak_normalize_idempotent():
    clip = AudioClip(np.random.default_rng(2).normal(size=1000), 16_000)
    once = peak_normalize(clip, 0.7)
    twice = peak_normalize(once, 0.7)
    np.testing.assert_allclose(once.samples, twice.samples, atol=1e-15)


def test_peak_normalize_rejects_bad_peak():
    clip = AudioClip(np.ones(10), 16_000)
    with pytest.raises(ValueError):
        peak_normalize(clip, 0.0)
    with pytest.raises(ValueError):
        peak_normalize(clip, 1.5)


def test_clip_validation():
    with pytest.raises(ValueError):
        AudioClip(np.zeros(10), 0)
    with pytest.raises(ValueError):
        AudioClip(np.zeros((2, 5)), 16_000)


def test_clip_samples_are_read_only():
    clip = AudioClip(np.zeros(4), 16_000)
    with pytest.raises(ValueError):
        clip.samples[0] = 1.0
