"""Multi-class traffic: voice (two-state Markov), near-real-time video
(frame bursts with truncated-Pareto sizes), self-similar data (aggregated
Pareto on/off sources), plus the per-UE deadline-aware buffers and the
urgency quantities the schedulers consume.

All byte accounting is integral. Delays are measured in TTIs (1 ms).
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

VOICE = "voice"
VIDEO = "video"
DATA = "data"
CLASSES = (VOICE, VIDEO, DATA)

VOICE_DEADLINE_MS = 50
VIDEO_DEADLINE_MS = 150


class TrafficError(ValueError):
    pass


@dataclass(slots=True)
class Packet:
    cls: str
    size: int
    arrival_tti: int
    remaining: int

    def delay(self, tti: int) -> int:
        return tti - self.arrival_tti


def make_packet(cls, size, arrival_tti):
    return Packet(cls=cls, size=int(size), arrival_tti=int(arrival_tti), remaining=int(size))


# ---------------------------------------------------------------------------
# truncated Pareto
# ---------------------------------------------------------------------------

def truncated_pareto_sample(scale, shape, maximum, rng, size=None):
    """Pareto(scale, shape) with the mass above `maximum` collapsed onto
    `maximum`; samples lie in [scale, maximum]."""
    if scale <= 0 or shape <= 1 or maximum <= scale:
        raise TrafficError(
            f"need scale > 0, shape > 1, maximum > scale; got ({scale}, {shape}, {maximum})")
    u = rng.uniform(0.0, 1.0, size=size)
    raw = scale * np.power(1.0 - u, -1.0 / shape)
    out = np.minimum(raw, maximum)
    return float(out) if size is None else out


def truncated_pareto_mean(scale, shape, maximum) -> float:
    """Closed-form mean of the sampler above: E[min(X, m)] for X Pareto."""
    return scale + (scale ** shape) * (maximum ** (1 - shape) - scale ** (1 - shape)) / (1 - shape)


# ---------------------------------------------------------------------------
# sources
# ---------------------------------------------------------------------------

class VoiceSource:
    """Two-state Markov VoIP source: fixed-size packets every generation
    interval while talking, SID packets on a slower clock while silent.
    Sojourn times are geometric with the configured means (in ms)."""

    def __init__(self, rng, interval_ms=20.0, packet_bytes=40, sid_bytes=15,
                 sid_interval_ms=160.0, talk_mean_ms=3000.0, silence_mean_ms=3000.0,
                 start_talking=True):
        if interval_ms <= 0 or sid_interval_ms <= 0:
            raise TrafficError("generation intervals must be positive")
        self.rng = rng
        self.interval_ms = interval_ms
        self.packet_bytes = packet_bytes
        self.sid_bytes = sid_bytes
        self.sid_interval_ms = sid_interval_ms
        self.p_leave_talk = 1.0 / talk_mean_ms if talk_mean_ms > 0 else 0.0
        self.p_leave_silence = 1.0 / silence_mean_ms if silence_mean_ms > 0 else 0.0
        self.talking = start_talking
        # separate pacing credits that freeze across state changes, so the
        # long-run rate equals talk_time/interval + silence_time/sid_interval
        self._talk_credit = interval_ms - 1.0
        self._sid_credit = sid_interval_ms - 1.0

    def step(self, tti: int):
        p_leave = self.p_leave_talk if self.talking else self.p_leave_silence
        if p_leave and self.rng.random() < p_leave:
            self.talking = not self.talking
        out = []
        if self.talking:
            self._talk_credit += 1.0
            while self._talk_credit >= self.interval_ms:
                self._talk_credit -= self.interval_ms
                out.append(make_packet(VOICE, self.packet_bytes, tti))
        else:
            self._sid_credit += 1.0
            while self._sid_credit >= self.sid_interval_ms:
                self._sid_credit -= self.sid_interval_ms
                out.append(make_packet(VOICE, self.sid_bytes, tti))
        return out

    def mean_rate_bps(self) -> float:
        """Stationary long-run rate from the two-state chain."""
        lt, ls = self.p_leave_talk, self.p_leave_silence
        if lt == 0 and ls == 0:
            pi_talk = 1.0 if self.talking else 0.0
        else:
            pi_talk = ls / (lt + ls)
        talk_rate = self.packet_bytes * 8 * 1000.0 / self.interval_ms
        sid_rate = self.sid_bytes * 8 * 1000.0 / self.sid_interval_ms
        return pi_talk * talk_rate + (1.0 - pi_talk) * sid_rate


class VideoSource:
    """Near-real-time video: frames on an exact-rate clock, each frame a
    burst of packets with truncated-Pareto sizes and inter-arrival times.
    Undersized frames are scaled up to the minimum frame size."""

    def __init__(self, rng, fps=15.0, packets_per_frame=8, min_frame_bytes=1500,
                 size_scale=40.0, size_shape=1.2, size_max=250.0,
                 ia_scale_ms=2.5, ia_shape=1.2, ia_max_ms=12.5):
        if fps <= 0:
            raise TrafficError("fps must be positive")
        self.rng = rng
        self.fps = fps
        self.frame_period_ms = 1000.0 / fps
        self.packets_per_frame = packets_per_frame
        self.min_frame_bytes = min_frame_bytes
        self.size_params = (size_scale, size_shape, size_max)
        self.ia_params = (ia_scale_ms, ia_shape, ia_max_ms)
        self._next_frame_ms = 0.0
        self._pending = deque()  # (arrival_ms, size) within scheduled frames

    def _emit_frame(self, start_ms: float):
        sizes = truncated_pareto_sample(*self.size_params, self.rng, size=self.packets_per_frame)
        total = float(sizes.sum())
        if total < self.min_frame_bytes:
            sizes = np.ceil(sizes * (self.min_frame_bytes / total))
        sizes = np.maximum(1, np.ceil(sizes)).astype(np.int64)
        gaps = truncated_pareto_sample(*self.ia_params, self.rng, size=self.packets_per_frame)
        t = start_ms
        for size, gap in zip(sizes, gaps):
            self._pending.append((t, int(size)))
            t += float(gap)

    def step(self, tti: int):
        while self._next_frame_ms < tti + 1.0:
            self._emit_frame(self._next_frame_ms)
            self._next_frame_ms += self.frame_period_ms
        out = []
        while self._pending and self._pending[0][0] < tti + 1.0:
            _, size = self._pending.popleft()
            out.append(make_packet(VIDEO, size, tti))
        return out

    def mean_frame_bytes(self) -> float:
        return estimate_mean_frame_bytes(self.packets_per_frame, self.min_frame_bytes,
                                         *self.size_params)


_FRAME_MEAN_CACHE: dict = {}


def estimate_mean_frame_bytes(packets_per_frame, min_frame_bytes, size_scale,
                              size_shape, size_max, n_frames=4000) -> float:
    """Monte-Carlo mean frame size under the upscale-to-minimum rule
    (seeded, cached); used to translate offered video load into fps."""
    key = (packets_per_frame, min_frame_bytes, size_scale, size_shape, size_max)
    got = _FRAME_MEAN_CACHE.get(key)
    if got is None:
        rng = np.random.default_rng(20240901)
        sizes = truncated_pareto_sample(size_scale, size_shape, size_max, rng,
                                        size=(n_frames, packets_per_frame))
        totals = sizes.sum(axis=1)
        scale = np.maximum(1.0, min_frame_bytes / totals)
        got = float(np.ceil(sizes * scale[:, None]).sum(axis=1).mean())
        _FRAME_MEAN_CACHE[key] = got
    return got


class OnOffSource:
    """Single Pareto on/off source: bytes accrue at `rate` during ON periods
    and are emitted as packets with uniform payload sizes. The partial-packet
    credit persists across bursts so the long-run rate is exact."""

    def __init__(self, rng, rate_bytes_per_ms, on_mean_ms, off_mean_ms,
                 on_shape=1.4, off_shape=1.2, cap_factor=50.0,
                 payload_min=46, payload_max=1500):
        self.rng = rng
        self.rate = rate_bytes_per_ms
        self.on_shape = on_shape
        self.off_shape = off_shape
        self.on_scale = _pareto_scale_for_mean(on_mean_ms, on_shape, cap_factor)
        self.off_scale = _pareto_scale_for_mean(off_mean_ms, off_shape, cap_factor)
        self.on_cap = self.on_scale * cap_factor
        self.off_cap = self.off_scale * cap_factor
        self.payload_min = payload_min
        self.payload_max = payload_max
        self.on = bool(rng.integers(0, 2))
        self._remaining = self._draw_duration()
        self._credit = 0.0
        self._next_size = self._draw_size()

    def _draw_duration(self) -> float:
        if self.on:
            return truncated_pareto_sample(self.on_scale, self.on_shape, self.on_cap, self.rng)
        return truncated_pareto_sample(self.off_scale, self.off_shape, self.off_cap, self.rng)

    def _draw_size(self) -> int:
        return int(self.rng.integers(self.payload_min, self.payload_max + 1))

    def step_ms(self) -> float:
        """Advance one 1 ms TTI; returns bytes of credit accrued."""
        t_left = 1.0
        accrued = 0.0
        while t_left > 1e-12:
            dt = min(t_left, self._remaining)
            if self.on:
                accrued += self.rate * dt
            self._remaining -= dt
            t_left -= dt
            if self._remaining <= 1e-12:
                self.on = not self.on
                self._remaining = self._draw_duration()
        self._credit += accrued
        return accrued

    def take_packets(self, tti: int):
        out = []
        while self._credit >= self._next_size:
            self._credit -= self._next_size
            out.append(make_packet(DATA, self._next_size, tti))
            self._next_size = self._draw_size()
        return out


def _pareto_scale_for_mean(mean, shape, cap_factor) -> float:
    """Invert truncated_pareto_mean for cap = cap_factor * scale."""
    if mean <= 0:
        raise TrafficError("duration mean must be positive")
    g = 1.0 + (1.0 - cap_factor ** (1.0 - shape)) / (shape - 1.0)
    return mean / g


class DataSource:
    """Self-similar data: aggregate of independent on/off sources."""

    def __init__(self, rng, offered_bps, n_sources=8, source_rate_bps=200_000.0,
                 on_mean_ms=6.0, on_shape=1.4, off_shape=1.2, cap_factor=50.0,
                 payload_min=46, payload_max=1500):
        if offered_bps < 0:
            raise TrafficError("offered load must be nonnegative")
        self.sources = []
        if offered_bps == 0 or n_sources == 0:
            return
        per_source = offered_bps / n_sources
        # load scaling varies the off-time mean at a fixed peak; when the
        # offered load would push the duty cycle past 1/2 the peak rises too
        source_rate_bps = max(source_rate_bps, 2.0 * per_source)
        duty = per_source / source_rate_bps
        off_mean = on_mean_ms * (1.0 / duty - 1.0)
        rate_bytes_per_ms = source_rate_bps / 8.0 / 1000.0
        for _ in range(n_sources):
            self.sources.append(OnOffSource(
                rng, rate_bytes_per_ms, on_mean_ms, off_mean,
                on_shape=on_shape, off_shape=off_shape, cap_factor=cap_factor,
                payload_min=payload_min, payload_max=payload_max))

    def step(self, tti: int):
        out = []
        for src in self.sources:
            src.step_ms()
            out.extend(src.take_packets(tti))
        return out


# ---------------------------------------------------------------------------
# per-UE buffer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UrgencyReport:
    """Snapshot of how many bytes a UE stands to lose this TTI.

    k is the scheduler-facing urgency (current critical bytes plus the drop
    history window); k_current excludes the history term and is what the
    per-chunk drop matrix is built from.
    """

    k: int
    k_current: int
    m_vo: int
    m_vi: int
    m_d: int
    b: int
    history_sum: int


class UeBuffer:
    """Three per-class FIFO queues with byte capacity, deadline enforcement
    for the real-time classes, and drop-history tracking."""

    def __init__(self, capacity=65536, threshold=None,
                 voice_deadline=VOICE_DEADLINE_MS, video_deadline=VIDEO_DEADLINE_MS,
                 history_window=1000):
        if threshold is None:
            threshold = (capacity * 3) // 4
        if threshold >= capacity:
            raise TrafficError("buffer_threshold must be smaller than capacity")
        self.capacity = capacity
        self.threshold = threshold
        self.deadlines = {VOICE: voice_deadline, VIDEO: video_deadline}
        self.queues = {cls: deque() for cls in CLASSES}
        self.occupancy = {cls: 0 for cls in CLASSES}
        self.total = 0
        self.history = deque(maxlen=history_window)
        self.history_sum = 0
        # lifetime byte counters for the conservation identity
        self.arrived = {cls: 0 for cls in CLASSES}
        self.transmitted = {cls: 0 for cls in CLASSES}
        self.deadline_dropped = {cls: 0 for cls in CLASSES}
        self.overflow_dropped = {cls: 0 for cls in CLASSES}
        self.deadline_dropped_pkts = {cls: 0 for cls in CLASSES}

    def enqueue(self, packets) -> int:
        """Append packets to their class FIFOs; tail-drop on overflow.
        Returns the overflow-dropped byte count."""
        overflow = 0
        for p in packets:
            self.arrived[p.cls] += p.size
            if self.total + p.size > self.capacity:
                overflow += p.size
                self.overflow_dropped[p.cls] += p.size
                continue
            self.queues[p.cls].append(p)
            self.occupancy[p.cls] += p.size
            self.total += p.size
        return overflow

    def age_and_drop(self, tti: int) -> dict:
        """Remove every real-time packet past its class deadline; record the
        per-TTI drop history. Call once per TTI, before scheduling."""
        dropped = {cls: 0 for cls in CLASSES}
        for cls, deadline in self.deadlines.items():
            q = self.queues[cls]
            while q and tti - q[0].arrival_tti > deadline:
                p = q.popleft()
                dropped[cls] += p.remaining
                self.deadline_dropped[cls] += p.remaining
                self.deadline_dropped_pkts[cls] += 1
                self.occupancy[cls] -= p.remaining
                self.total -= p.remaining
        eps = dropped[VOICE] + dropped[VIDEO]
        if len(self.history) == self.history.maxlen:
            self.history_sum -= self.history[0]
        self.history.append(eps)
        self.history_sum += eps
        return dropped

    def critical_bytes(self, tti: int, cls: str) -> int:
        """Bytes that will cross the class deadline by the next TTI (the
        cohort at exactly the deadline; older ones were already dropped)."""
        deadline = self.deadlines[cls]
        total = 0
        for p in self.queues[cls]:
            if tti - p.arrival_tti >= deadline:
                total += p.remaining
            else:
                break
        return total

    def packets(self, cls: str):
        return self.queues[cls]

    def conservation_holds(self) -> bool:
        for cls in CLASSES:
            resident = self.occupancy[cls]
            if self.arrived[cls] != (self.transmitted[cls] + self.deadline_dropped[cls]
                                     + self.overflow_dropped[cls] + resident):
                return False
        return True


def compute_urgency(buf: UeBuffer, tti: int, mode: str = "single_class") -> UrgencyReport:
    """Urgency snapshot for one UE; age_and_drop must already have run this
    TTI. single_class counts only deadline-critical bytes; mixed adds the
    buffer build-up above the threshold as the data component."""
    if mode not in ("single_class", "mixed"):
        raise TrafficError(f"unknown urgency mode: {mode}")
    m_vo = buf.critical_bytes(tti, VOICE)
    m_vi = buf.critical_bytes(tti, VIDEO)
    m_d = max(0, buf.total - buf.threshold) if mode == "mixed" else 0
    k_current = m_vo + m_vi + m_d
    return UrgencyReport(k=k_current + buf.history_sum, k_current=k_current,
                         m_vo=m_vo, m_vi=m_vi, m_d=m_d, b=buf.total,
                         history_sum=buf.history_sum)


# ---------------------------------------------------------------------------
# arrival trace fixture
# ---------------------------------------------------------------------------

def load_arrival_trace(path):
    """Deterministic arrivals: lines of `tti ue class size_bytes`.
    Returns {tti: [(ue, cls, size), ...]}."""
    out: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 4:
                raise TrafficError(f"{path}:{lineno}: expected `tti ue class size`")
            tti, ue, cls, size = int(parts[0]), int(parts[1]), parts[2], int(parts[3])
            if cls not in CLASSES:
                raise TrafficError(f"{path}:{lineno}: unknown class {cls!r}")
            out.setdefault(tti, []).append((ue, cls, size))
    return out


# ---------------------------------------------------------------------------
# offered-load calibration
# ---------------------------------------------------------------------------

def voice_interval_for_load(load_bps, packet_bytes=40, sid_bytes=15,
                            sid_interval_ms=160.0, talk_mean_ms=3000.0,
                            silence_mean_ms=3000.0) -> float:
    """Generation interval giving the target long-run voice rate."""
    pi_talk = silence_mean_ms / (talk_mean_ms + silence_mean_ms)
    sid_part = (1.0 - pi_talk) * sid_bytes * 8 * 1000.0 / sid_interval_ms
    talk_budget = load_bps - sid_part
    if talk_budget <= 0:
        raise TrafficError(f"voice load {load_bps} bps is below the SID floor")
    return pi_talk * packet_bytes * 8 * 1000.0 / talk_budget


def video_fps_for_load(load_bps, packets_per_frame=8, min_frame_bytes=1500,
                       size_scale=40.0, size_shape=1.2, size_max=250.0) -> float:
    mean_frame = estimate_mean_frame_bytes(packets_per_frame, min_frame_bytes,
                                           size_scale, size_shape, size_max)
    fps = load_bps / (8.0 * mean_frame)
    if fps <= 0:
        raise TrafficError("video load must be positive")
    return fps
