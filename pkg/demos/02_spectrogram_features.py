"""Demo 2: from waveform to 128-band log-mel spectrogram to 224x224 image.

Shows the STFT/mel conventions (512-point FFT, 25 ms periodic Hann, 10 ms
hop, HTK mel axis, dB re max with a -80 dB floor) and where the fixture
tones land on the mel axis.
"""

import numpy as np

from swarmforge import MelConfig, StftConfig, load_wav, log_mel, render_image, save_png
from swarmforge.features import hz_to_mel, mel_filterbank

from common import DEMO_ROOT, ensure_toy_bank

ensure_toy_bank()
manifest = DEMO_ROOT / "dataset" / "manifest.jsonl"
if not manifest.exists():
    raise SystemExit("run 01_synthesize_swarms.py first to create the demo dataset")

stft_cfg = StftConfig()
mel_cfg = MelConfig()
print(f"stft: fft={stft_cfg.fft_size}, window={stft_cfg.window_len} samples (25 ms), "
      f"hop={stft_cfg.hop} samples (10 ms)")
print(f"mel:  {mel_cfg.n_mels} bands over {mel_cfg.f_min:.0f}-{mel_cfg.f_max:.0f} Hz "
      f"(htk scale, mel(1000 Hz) = {hz_to_mel(1000.0):.2f})")

wav_path = DEMO_ROOT / "dataset" / "audio" / "sample_000000.wav"
clip = load_wav(wav_path)
spec = log_mel(clip, stft_cfg, mel_cfg)
print(f"\n{wav_path.name}: {len(clip)} samples -> {spec.n_mels} x {spec.n_frames} matrix, "
      f"max {spec.values.max():.1f} dB, min {spec.values.min():.1f} dB")

# which mel band is busiest (the fundamentals sit in the 350-550 Hz range)
band_energy = spec.values.mean(axis=1)
top = np.argsort(band_energy)[-3:][::-1]
fb = mel_filterbank(mel_cfg, stft_cfg.fft_size, clip.sample_rate)
bin_hz = np.arange(fb.shape[1]) * clip.sample_rate / stft_cfg.fft_size
for band in top:
    center = bin_hz[np.argmax(fb[band])]
    print(f"  mel band {band:3d} (~{center:4.0f} Hz): mean {band_energy[band]:6.1f} dB")

image = render_image(spec)
png_path = DEMO_ROOT / "sample_000000_logmel.png"
save_png(image, png_path)
print(f"\nwrote {png_path} ({image.shape[0]}x{image.shape[1]}, 3 identical channels, "
      "lowest band at the bottom row)")
