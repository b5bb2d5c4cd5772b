"""Scenario orchestration: deployment, the per-TTI loop (generate, enqueue,
age/drop, urgency, channel, schedule, drain, record), configuration
validation, seeding, and load sweeps.

The per-TTI phase order is fixed: deadline drops always run before the
scheduling decision, so the urgency a scheduler sees is what it can still
save. One master seed fans out into independent substreams per UE and
purpose, so adding a UE never perturbs the draws of the others.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelConfig, CqiSource, Topology, load_cqi_trace
from .metrics import MetricsCollector, MetricsSummary, summary_row, worst_user
from .schedulers import build_traffic_matrix, dispatch
from .traffic import (
    CLASSES,
    DATA,
    DataSource,
    UeBuffer,
    VIDEO,
    VOICE,
    VideoSource,
    VoiceSource,
    compute_urgency,
    load_arrival_trace,
    make_packet,
    video_fps_for_load,
    voice_interval_for_load,
)
from .ue_tx import flip_drain, strict_priority_drain


class ConfigError(ValueError):
    pass


def _default_loads():
    return {VOICE: 1.0, VIDEO: 1.0, DATA: 1.0}


def _default_voice_params():
    return {"packet_bytes": 40, "sid_bytes": 15, "sid_interval_ms": 160.0,
            "talk_mean_ms": 3000.0, "silence_mean_ms": 3000.0}


def _default_video_params():
    return {"packets_per_frame": 8, "min_frame_bytes": 1500,
            "size_scale": 40.0, "size_shape": 1.2, "size_max": 250.0,
            "ia_scale_ms": 2.5, "ia_shape": 1.2, "ia_max_ms": 12.5}


def _default_data_params():
    return {"n_sources": 8, "source_rate_bps": 200_000.0, "on_mean_ms": 6.0,
            "on_shape": 1.4, "off_shape": 1.2, "cap_factor": 50.0,
            "payload_min": 46, "payload_max": 1500}


@dataclass(frozen=True)
class ScenarioConfig:
    policy: str = "dham"
    ue_policy: str = "strict"        # strict | flip; dafs + flip is the PF variant
    seed: int = 1
    tti_count: int = 10_000
    ue_mode: str = "fixed"           # fixed | ppp
    n_ues: int = 30
    ppp_intensity_per_km2: float = 150.0
    loads_mbps: dict = field(default_factory=_default_loads)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    buffer_capacity: int = 65536
    buffer_threshold: int = 49152
    voice_deadline_ms: int = 50
    video_deadline_ms: int = 150
    history_window: int = 1000
    voice_params: dict = field(default_factory=_default_voice_params)
    video_params: dict = field(default_factory=_default_video_params)
    data_params: dict = field(default_factory=_default_data_params)
    cqi_trace: str = None
    arrival_trace: str = None
    keep_trace: bool = False
    sweep: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        chan = d.pop("channel", {})
        if isinstance(chan, dict):
            unknown = set(chan) - {f for f in ChannelConfig.__dataclass_fields__}
            if unknown:
                raise ConfigError(f"unknown channel key: {sorted(unknown)[0]}")
            if "cqi_thresholds_db" in chan:
                chan["cqi_thresholds_db"] = tuple(chan["cqi_thresholds_db"])
            chan = ChannelConfig(**chan)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config key: {sorted(unknown)[0]}")
        return cls(channel=chan, **d)

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = {f: getattr(self, f) for f in self.__dataclass_fields__ if f != "channel"}
        out["channel"] = {f: getattr(self.channel, f)
                          for f in ChannelConfig.__dataclass_fields__}
        out["channel"]["cqi_thresholds_db"] = list(self.channel.cqi_thresholds_db)
        return out


def validate(cfg: ScenarioConfig) -> None:
    """Reject invalid scenarios before TTI 0; error messages name the
    offending configuration key."""
    if cfg.policy not in ("dham", "darts", "dafs"):
        raise ConfigError(f"policy must be dham|darts|dafs, got {cfg.policy!r}")
    if cfg.ue_policy not in ("strict", "flip"):
        raise ConfigError(f"ue_policy must be strict|flip, got {cfg.ue_policy!r}")
    if cfg.tti_count < 1:
        raise ConfigError("tti_count must be at least 1")
    if cfg.ue_mode not in ("fixed", "ppp"):
        raise ConfigError(f"ue_mode must be fixed|ppp, got {cfg.ue_mode!r}")
    if cfg.ue_mode == "fixed" and cfg.n_ues < 0:
        raise ConfigError("n_ues must be nonnegative")
    if cfg.ue_mode == "ppp" and cfg.ppp_intensity_per_km2 <= 0:
        raise ConfigError("ppp_intensity_per_km2 must be positive")
    unknown_cls = set(cfg.loads_mbps) - set(CLASSES)
    if unknown_cls:
        raise ConfigError(f"loads_mbps.{sorted(unknown_cls)[0]} is not a traffic class")
    for cls in CLASSES:
        if cfg.loads_mbps.get(cls, 0.0) < 0:
            raise ConfigError(f"loads_mbps.{cls} must be nonnegative")
    if cfg.buffer_threshold >= cfg.buffer_capacity:
        raise ConfigError("buffer_threshold must be below buffer_capacity")
    if cfg.buffer_capacity <= 0:
        raise ConfigError("buffer_capacity must be positive")
    ch = cfg.channel
    if not 0 < ch.alpha_pc <= 1:
        raise ConfigError("channel.alpha_pc must lie in (0, 1]")
    if ch.prb_per_rc <= 0 or ch.n_prb_data % ch.prb_per_rc != 0:
        raise ConfigError("channel.n_prb_data must be a multiple of channel.prb_per_rc")
    if ch.n_prb_data > ch.n_prb_total:
        raise ConfigError("channel.n_prb_data cannot exceed channel.n_prb_total")
    if len(ch.cqi_thresholds_db) != 15 or list(ch.cqi_thresholds_db) != sorted(ch.cqi_thresholds_db):
        raise ConfigError("channel.cqi_thresholds_db must be 15 nondecreasing values")
    if cfg.history_window < 1:
        raise ConfigError("history_window must be at least 1")


# ---------------------------------------------------------------------------
# deployment
# ---------------------------------------------------------------------------

def deploy(cfg: ScenarioConfig, rng) -> Topology:
    """Hexagonal 7-site layout (serving site at the origin) with UEs placed
    uniformly in the serving cell disc: a fixed count, or a Poisson draw with
    the configured intensity. Shadowing is drawn once per UE (static users).
    """
    ch = cfg.channel
    radius = ch.cell_radius_m
    d0 = ch.min_ue_distance_m
    if cfg.ue_mode == "ppp":
        area_km2 = math.pi * (radius ** 2 - d0 ** 2) / 1e6
        n = int(rng.poisson(cfg.ppp_intensity_per_km2 * area_km2))
    else:
        n = cfg.n_ues
    u = rng.uniform(0.0, 1.0, size=n)
    r = np.sqrt(u * (radius ** 2 - d0 ** 2) + d0 ** 2)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    xy = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    shadow = rng.normal(0.0, ch.shadowing_sigma_db, size=n)
    angles = np.arange(6) * (math.pi / 3.0)
    centers = ch.inter_site_distance_m * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return Topology(neighbor_centers=centers, ue_xy=xy, ue_distance_m=r,
                    ue_shadow_db=shadow, cell_radius_m=radius)


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------

def _build_sources(cfg: ScenarioConfig, n_ues: int):
    """Per-UE generator lists; network loads divide evenly across UEs."""
    if n_ues == 0:
        return []
    per_ue = {cls: cfg.loads_mbps.get(cls, 0.0) * 1e6 / n_ues for cls in CLASSES}
    sources = []
    for ue in range(n_ues):
        gen = []
        if per_ue[VOICE] > 0:
            vp = cfg.voice_params
            rng = np.random.default_rng([cfg.seed, 1, ue])
            interval = voice_interval_for_load(per_ue[VOICE], **{
                "packet_bytes": vp["packet_bytes"], "sid_bytes": vp["sid_bytes"],
                "sid_interval_ms": vp["sid_interval_ms"],
                "talk_mean_ms": vp["talk_mean_ms"],
                "silence_mean_ms": vp["silence_mean_ms"]})
            pi_talk = vp["silence_mean_ms"] / (vp["talk_mean_ms"] + vp["silence_mean_ms"])
            gen.append(VoiceSource(rng, interval_ms=interval,
                                   packet_bytes=vp["packet_bytes"],
                                   sid_bytes=vp["sid_bytes"],
                                   sid_interval_ms=vp["sid_interval_ms"],
                                   talk_mean_ms=vp["talk_mean_ms"],
                                   silence_mean_ms=vp["silence_mean_ms"],
                                   start_talking=bool(rng.random() < pi_talk)))
        if per_ue[VIDEO] > 0:
            vd = cfg.video_params
            fps = video_fps_for_load(per_ue[VIDEO],
                                     packets_per_frame=vd["packets_per_frame"],
                                     min_frame_bytes=vd["min_frame_bytes"],
                                     size_scale=vd["size_scale"],
                                     size_shape=vd["size_shape"],
                                     size_max=vd["size_max"])
            gen.append(VideoSource(np.random.default_rng([cfg.seed, 2, ue]),
                                   fps=fps, **vd))
        if per_ue[DATA] > 0:
            gen.append(DataSource(np.random.default_rng([cfg.seed, 3, ue]),
                                  offered_bps=per_ue[DATA], **cfg.data_params))
        sources.append(gen)
    return sources


def run(cfg: ScenarioConfig) -> MetricsSummary:
    """Execute one scenario end to end; fully deterministic per (cfg, seed)."""
    validate(cfg)
    topo = deploy(cfg, np.random.default_rng([cfg.seed, 0]))
    n = topo.n_ues
    buffers = [UeBuffer(capacity=cfg.buffer_capacity, threshold=cfg.buffer_threshold,
                        voice_deadline=cfg.voice_deadline_ms,
                        video_deadline=cfg.video_deadline_ms,
                        history_window=cfg.history_window)
               for _ in range(n)]
    arrival_trace = load_arrival_trace(cfg.arrival_trace) if cfg.arrival_trace else None
    sources = [] if arrival_trace is not None else _build_sources(cfg, n)
    if cfg.cqi_trace:
        trace = load_cqi_trace(cfg.cqi_trace, n, cfg.channel.rc_count)
        cqi_source = CqiSource(topo=None, cfg=None, trace=trace)
    else:
        fading = [np.random.default_rng([cfg.seed, 4, ue]) for ue in range(n)]
        interference = np.random.default_rng([cfg.seed, 5])
        cqi_source = CqiSource(topo=topo, cfg=cfg.channel,
                               fading_rngs=fading, interference_rng=interference)
    worst = worst_user(topo) if n else 0
    collector = MetricsCollector(n, worst, keep_trace=cfg.keep_trace)
    urgency_mode = "mixed" if cfg.policy == "dafs" else "single_class"
    drain = flip_drain if cfg.ue_policy == "flip" else strict_priority_drain

    for tti in range(cfg.tti_count):
        if arrival_trace is not None:
            for ue, cls, size in arrival_trace.get(tti, ()):
                buffers[ue].enqueue([make_packet(cls, size, tti)])
        else:
            for ue in range(n):
                for src in sources[ue]:
                    pkts = src.step(tti)
                    if pkts:
                        buffers[ue].enqueue(pkts)
        drops = [buf.age_and_drop(tti) for buf in buffers]
        if cfg.policy == "dham":
            reports = None
        else:
            reports = [compute_urgency(buf, tti, urgency_mode) for buf in buffers]
        if n:
            grid = cqi_source.grid(tti)
            W = build_traffic_matrix(grid, buffers)
            decision = dispatch(cfg.policy, W, reports)
        else:
            decision = None
        drains = [None] * n
        if decision is not None:
            for ue in range(n):
                g = int(decision.grants[ue])
                if g > 0:
                    drains[ue] = drain(buffers[ue], g, tti)
        collector.record_tti(tti, drops, drains, decision)
    return collector.finalize(buffers)


def run_row(cfg: ScenarioConfig) -> dict:
    """run() condensed to a CSV summary row (used by sweep workers)."""
    summary = run(cfg)
    return summary_row(summary, cfg.policy, cfg.ue_policy, cfg.seed, cfg.loads_mbps)


def sweep(cfg: ScenarioConfig, points_mbps=None, seeds=None, jobs: int = 1):
    """One run per (load point x seed). The varied class comes from
    cfg.sweep['vary']; the other class loads stay at their configured values.
    Returns the list of summary rows in (point, seed) order."""
    sw = cfg.sweep or {}
    vary = sw.get("vary", VOICE)
    if vary not in CLASSES:
        raise ConfigError(f"sweep.vary must be one of {CLASSES}, got {vary!r}")
    points = points_mbps if points_mbps is not None else sw.get("points_mbps")
    if not points:
        raise ConfigError("sweep.points_mbps must list at least one load point")
    seeds = seeds if seeds is not None else sw.get("seeds", [cfg.seed])
    configs = []
    for point in points:
        loads = dict(cfg.loads_mbps)
        loads[vary] = float(point)
        for seed in seeds:
            configs.append(replace(cfg, loads_mbps=loads, seed=int(seed)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_row, configs))
    return [run_row(c) for c in configs]
