#!/usr/bin/env python3
"""Exercise the three traffic classes and check their realized statistics.

Voice: two-state Markov, 40-byte packets on a generation interval while
talking, 15-byte silence descriptors otherwise. Video: frame bursts of eight
truncated-Pareto packets, upscaled to a 1500-byte floor. Data: aggregated
Pareto on/off sources with uniform payloads in [46, 1500].
"""

import numpy as np

from ulsched.traffic import (
    DataSource,
    VideoSource,
    VoiceSource,
    truncated_pareto_mean,
    truncated_pareto_sample,
)

rng = np.random.default_rng(11)

print("truncated Pareto sanity (sampler vs closed form):")
for scale, shape, cap, label in [(40, 1.2, 250, "video packet bytes"),
                                 (2.5, 1.2, 12.5, "packet gap ms")]:
    s = truncated_pareto_sample(scale, shape, cap, rng, size=400_000)
    print(f"  {label:>18}: empirical {s.mean():7.2f}  closed-form "
          f"{truncated_pareto_mean(scale, shape, cap):7.2f}  "
          f"range [{s.min():.1f}, {s.max():.1f}]")

T = 120_000
print(f"\nvoice over {T} TTIs (interval 20 ms, 0.5 s mean sojourns):")
voice = VoiceSource(np.random.default_rng(1), interval_ms=20.0,
                    talk_mean_ms=500.0, silence_mean_ms=500.0)
pkts = [p for t in range(T) for p in voice.step(t)]
talk = sum(1 for p in pkts if p.size == 40)
print(f"  {len(pkts)} packets ({talk} voice, {len(pkts) - talk} SID), "
      f"realized {sum(p.size for p in pkts) * 8 * 1000 / T / 1e3:.1f} kbps, "
      f"stationary analytic {voice.mean_rate_bps() / 1e3:.1f} kbps")

print("\nvideo at 15 frames/s:")
video = VideoSource(np.random.default_rng(2), fps=15.0)
pkts = [p for t in range(T) for p in video.step(t)]
frames = len(pkts) // 8
sizes = np.array([p.size for p in pkts[:frames * 8]]).reshape(-1, 8)
print(f"  {frames} frames, min frame {sizes.sum(axis=1).min()} bytes "
      f"(floor 1500), mean frame {sizes.sum(axis=1).mean():.0f} bytes, "
      f"rate {sum(p.size for p in pkts) * 8 * 1000 / T / 1e3:.1f} kbps")

print("\nself-similar data at 1 Mbps offered:")
data = DataSource(np.random.default_rng(3), offered_bps=1_000_000)
per_tti = np.zeros(20_000)
for t in range(20_000):
    per_tti[t] = sum(p.size for p in data.step(t))
rate = per_tti.sum() * 8 * 1000 / 20_000 / 1e6
burstiness = per_tti.std() / max(per_tti.mean(), 1e-9)
print(f"  realized {rate:.3f} Mbps, per-TTI burstiness (cv) {burstiness:.1f}")
