"""Uplink channel model: cell geometry, macro NLOS path loss, lognormal
shadowing, open-loop power control, first-tier interference, and the mapping
from SINR to CQI to transmittable bytes per resource chunk.

One resource chunk (RC) is prb_per_rc contiguous PRBs scheduled for one TTI.
Channel quality is block fading: constant within a TTI, redrawn per TTI.
"""

import math
from dataclasses import dataclass, field

import numpy as np

PRB_BANDWIDTH_HZ = 180e3  # 12 subcarriers x 15 kHz


class ChannelError(ValueError):
    pass


def _default_cqi_thresholds():
    # 15 evenly spaced SINR thresholds, CQI k applies on [t_k, t_{k+1})
    return tuple(-6.0 + 2.0 * i for i in range(15))


@dataclass(frozen=True)
class ChannelConfig:
    inter_site_distance_m: float = 500.0
    bandwidth_hz: float = 10e6
    n_prb_total: int = 50
    n_prb_data: int = 48
    prb_per_rc: int = 6
    p_max_dbm: float = 24.0
    p_o_dbm: float = -106.0
    alpha_pc: float = 1.0
    shadowing_sigma_db: float = 4.0
    penetration_loss_db: float = 20.0  # indoor users, macro evaluation convention
    center_freq_hz: float = 2e9
    noise_figure_db: float = 5.0
    thermal_noise_dbm_hz: float = -174.0
    min_ue_distance_m: float = 35.0
    fast_fading: bool = True
    cqi_thresholds_db: tuple = field(default_factory=_default_cqi_thresholds)

    @property
    def rc_count(self) -> int:
        return self.n_prb_data // self.prb_per_rc

    @property
    def cell_radius_m(self) -> float:
        # hexagonal cells approximated as discs with the hex circumradius
        return self.inter_site_distance_m / math.sqrt(3.0)

    def noise_dbm_per_rc(self) -> float:
        bw = self.prb_per_rc * PRB_BANDWIDTH_HZ
        return self.thermal_noise_dbm_hz + 10.0 * math.log10(bw) + self.noise_figure_db


@dataclass(frozen=True)
class Topology:
    """Serving cell at the origin, six first-tier cells, static UEs."""

    neighbor_centers: np.ndarray  # (6, 2) meters
    ue_xy: np.ndarray             # (n_ue, 2) meters
    ue_distance_m: np.ndarray     # (n_ue,) to the serving site
    ue_shadow_db: np.ndarray      # (n_ue,) lognormal shadowing, drawn once
    cell_radius_m: float

    @property
    def n_ues(self) -> int:
        return len(self.ue_distance_m)


def path_loss(distance_m) -> float:
    """Macro NLOS path loss in dB: 128.1 + 37.6 log10(d_km)."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ChannelError("distance must be positive")
    out = 128.1 + 37.6 * np.log10(d / 1000.0)
    return out.item() if out.ndim == 0 else out


def uplink_tx_power(pl_db, n_prb, cfg: ChannelConfig):
    """Open-loop power control: min(P_max, P_o + 10 log10(n_prb) + alpha*PL).

    pl_db is the loss estimate the UE compensates: the distance-dependent
    path loss plus penetration (what a reference-signal average exposes);
    the shadowing realization stays uncompensated. Users whose estimate
    pushes the uncapped value past P_max transmit at P_max and arrive
    correspondingly weaker: cell-edge users are power-limited.
    """
    if n_prb < 1:
        raise ChannelError("n_prb must be >= 1")
    raw = cfg.p_o_dbm + 10.0 * math.log10(n_prb) + cfg.alpha_pc * np.asarray(pl_db, dtype=float)
    out = np.minimum(cfg.p_max_dbm, raw)
    return out.item() if out.ndim == 0 else out


def pc_estimate_db(topo: Topology, cfg: ChannelConfig):
    """The loss each UE compensates via power control."""
    return path_loss(topo.ue_distance_m) + cfg.penetration_loss_db


def coupling_loss_db(topo: Topology, cfg: ChannelConfig):
    """Actual static link loss per UE: path loss + penetration + shadowing."""
    return pc_estimate_db(topo, cfg) + topo.ue_shadow_db


def _dbm_to_mw(dbm):
    return np.power(10.0, np.asarray(dbm, dtype=float) / 10.0)


def _mw_to_dbm(mw):
    return 10.0 * np.log10(mw)


@dataclass(frozen=True)
class SinrTerms:
    """Per-term breakdown of one SINR evaluation, for trace recomputation."""

    signal_dbm: float
    noise_dbm: float
    interference_dbm: tuple

    def sinr_db(self) -> float:
        denom = _dbm_to_mw(self.noise_dbm) + sum(_dbm_to_mw(p) for p in self.interference_dbm)
        return self.signal_dbm - _mw_to_dbm(denom)


def sinr(ue: int, rc: int, topo: Topology, fading_db: float, cfg: ChannelConfig,
         interference_dbm=()) -> float:
    """SINR in dB for one (UE, RC): received signal over thermal noise plus
    the summed first-tier interference, combined in the linear domain."""
    return sinr_terms(ue, rc, topo, fading_db, cfg, interference_dbm).sinr_db()


def sinr_terms(ue: int, rc: int, topo: Topology, fading_db: float, cfg: ChannelConfig,
               interference_dbm=()) -> SinrTerms:
    ptx = uplink_tx_power(pc_estimate_db(topo, cfg)[ue], cfg.prb_per_rc, cfg)
    signal = ptx - coupling_loss_db(topo, cfg)[ue] + fading_db
    return SinrTerms(signal_dbm=float(signal), noise_dbm=cfg.noise_dbm_per_rc(),
                     interference_dbm=tuple(float(p) for p in interference_dbm))


def sinr_to_cqi(sinr_db, thresholds=None):
    """Piecewise-constant step map onto CQI 1..15; [t_k, t_{k+1}) -> k,
    clamped below t_1 to 1 and at or above t_15 to 15."""
    thr = np.asarray(thresholds if thresholds is not None else _default_cqi_thresholds())
    idx = np.searchsorted(thr, np.asarray(sinr_db, dtype=float), side="right")
    out = np.clip(idx, 1, 15)
    return int(out) if out.ndim == 0 else out.astype(np.int64)


_CQI_BYTES = np.array([0, 252, 252, 252, 252, 252, 252, 504, 504, 504,
                       756, 756, 756, 756, 756, 756], dtype=np.int64)


def cqi_to_bytes_per_rc(cqi):
    """Transmittable bytes on one RC in one TTI: QPSK 252, 16-QAM 504,
    64-QAM 756 (coding overhead ignored)."""
    c = np.asarray(cqi)
    if np.any((c < 1) | (c > 15)):
        raise ChannelError(f"CQI out of range 1..15: {cqi}")
    out = _CQI_BYTES[c]
    return out.item() if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# per-TTI realization
# ---------------------------------------------------------------------------

def rayleigh_fading_db(rng, size):
    """Rayleigh-equivalent power fading in dB: 10 log10 X with X ~ Exp(1)."""
    return 10.0 * np.log10(rng.exponential(1.0, size=size))


def draw_interference_dbm(topo: Topology, cfg: ChannelConfig, rng) -> np.ndarray:
    """Received interference power (6, rc_count) dBm at the serving site.

    Per TTI and RC each first-tier cell holds one uniformly placed UE
    transmitting under the same power-control law toward its own site.
    """
    n_rc = cfg.rc_count
    centers = topo.neighbor_centers[:, None, :]  # (6, 1, 2)
    d_own = topo.cell_radius_m * np.sqrt(rng.uniform(0.0, 1.0, size=(6, n_rc)))
    d_own = np.maximum(d_own, cfg.min_ue_distance_m)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=(6, n_rc))
    pos = centers + np.stack([d_own * np.cos(theta), d_own * np.sin(theta)], axis=-1)
    d_serving = np.maximum(np.hypot(pos[..., 0], pos[..., 1]), cfg.min_ue_distance_m)
    ptx = uplink_tx_power(path_loss(d_own) + cfg.penetration_loss_db,
                          cfg.prb_per_rc, cfg)
    shadow_serving = rng.normal(0.0, cfg.shadowing_sigma_db, size=(6, n_rc))
    return ptx - (path_loss(d_serving) + cfg.penetration_loss_db + shadow_serving)


def realize_cqi_grid(tti: int, topo: Topology, cfg: ChannelConfig,
                     fading_rngs, interference_rng) -> np.ndarray:
    """CQI grid (n_ue, rc_count) for one TTI.

    fading_rngs holds one generator per UE so adding a UE never perturbs the
    draws of the others; interference placement uses its own stream. Grids
    are deterministic for a fixed master seed and TTI sequence.
    """
    n_ue = topo.n_ues
    n_rc = cfg.rc_count
    ptx = uplink_tx_power(pc_estimate_db(topo, cfg), cfg.prb_per_rc, cfg)
    signal = (ptx - coupling_loss_db(topo, cfg))[:, None]  # (n_ue, 1)
    if cfg.fast_fading:
        fading = np.stack([rayleigh_fading_db(fading_rngs[u], n_rc) for u in range(n_ue)])
        signal = signal + fading
    interference_mw = _dbm_to_mw(draw_interference_dbm(topo, cfg, interference_rng)).sum(axis=0)
    denom_dbm = _mw_to_dbm(_dbm_to_mw(cfg.noise_dbm_per_rc()) + interference_mw)  # (n_rc,)
    sinr_db = signal - denom_dbm[None, :]
    return sinr_to_cqi(sinr_db, cfg.cqi_thresholds_db)


# ---------------------------------------------------------------------------
# trace fixtures
# ---------------------------------------------------------------------------

def load_cqi_trace(path, n_ue: int, n_rc: int) -> np.ndarray:
    """Read a CQI trace: one line per TTI, whitespace-separated ints,
    row-major (UE-major, RC-minor). Returns (n_tti, n_ue, n_rc)."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != n_ue * n_rc:
                raise ChannelError(
                    f"{path}:{lineno}: expected {n_ue * n_rc} values, got {len(parts)}")
            vals = np.array([int(p) for p in parts], dtype=np.int64)
            if np.any((vals < 1) | (vals > 15)):
                raise ChannelError(f"{path}:{lineno}: CQI values must be in 1..15")
            rows.append(vals.reshape(n_ue, n_rc))
    if not rows:
        raise ChannelError(f"{path}: empty CQI trace")
    return np.stack(rows)


class CqiSource:
    """Per-TTI CQI grids, either realized from the geometric model or
    replayed verbatim from a trace file (the model is then never consulted)."""

    def __init__(self, topo, cfg, fading_rngs=None, interference_rng=None, trace=None):
        self._topo = topo
        self._cfg = cfg
        self._fading_rngs = fading_rngs
        self._interference_rng = interference_rng
        self._trace = trace

    def grid(self, tti: int) -> np.ndarray:
        if self._trace is not None:
            return self._trace[min(tti, len(self._trace) - 1)]
        return realize_cqi_grid(tti, self._topo, self._cfg,
                                self._fading_rngs, self._interference_rng)
