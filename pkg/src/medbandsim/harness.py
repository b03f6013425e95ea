"""Seeded Monte Carlo harness: BER sweeps, fading-factor statistics, CSV.

Reproducibility contract: every trial derives its own PCG64 stream from the
seed tuple (seed, snr_index, trial_index, attempt), and every fading-factor
realization from (seed, realization_index), so results are independent of
worker count and scheduling.  Within a trial the draw order is pilot
symbols, data symbols, path delays, path gains, then noise.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from .channel import MultipathChannel, sample_channel
from .detection import (
    build_channel_matrix,
    estimate_g_from_pilots,
    ml_detect,
    mmse_detect,
    SolverFailure,
)
from .pulses import PulseConfig
from .timing import SearchParams, TimingMode, desired_fading_factor, estimate_offsets
from .waveform import Constellation, Frame, add_noise, sigma2_for_snr, synthesize_samples

__all__ = [
    "Detector",
    "CsiMode",
    "SimConfig",
    "BerPoint",
    "FadingPdf",
    "preset",
    "run_ber_sweep",
    "run_fading_pdf",
    "emit_csv",
    "read_ber_csv",
    "read_fading_csv",
    "load_config",
    "save_config",
]

log = logging.getLogger(__name__)

# A trial whose solver fails is redrawn from a fresh substream at most this
# many times before the sweep gives up.
_MAX_TRIAL_ATTEMPTS = 5


class Detector(str, Enum):
    MMSE = "mmse"
    ML = "ml"


class CsiMode(str, Enum):
    PERFECT = "perfect"
    PILOT = "pilot"


@dataclass(frozen=True)
class SimConfig:
    """Full description of one BER / fading-statistics experiment.

    Defaults mirror the reference mediumband setup: 2 MHz symbol rate,
    0.22 roll-off, uniform 10-path profile at 60% delay spread, frames of
    250 BPSK symbols with a 50-symbol pilot block, 5000 trials per SNR.
    """

    ts: float = 5e-7
    beta: float = 0.22
    span_k: int = 6
    kappa: float = 0.0
    n_paths: int = 10
    pds_percent: float = 60.0
    frame_len: int = 250
    pilot_len: int = 50
    es: float = 1.0
    snr_db_list: tuple = (0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0)
    trials: int = 5000
    detector: Detector = Detector.ML
    timing_mode: TimingMode = TimingMode.SPLIT
    csi: CsiMode = CsiMode.PERFECT
    seed: int = 0
    # Which rail's offset drives the matrix-model detector under split timing.
    mmse_timing_rail: str = "i"
    # Replay support: a fixed channel realization used for every trial.
    fixed_channel: MultipathChannel | None = None

    @property
    def pulse_config(self) -> PulseConfig:
        return PulseConfig(ts=self.ts, beta=self.beta, span_k=self.span_k)

    @property
    def tm(self) -> float:
        return self.pds_percent / 100.0 * self.ts

    def validate(self) -> None:
        self.pulse_config  # delegates ts / beta / span_k checks
        if self.kappa < 0.0:
            raise ValueError(f"profile decay rate must be >= 0, got {self.kappa}")
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.pds_percent < 0.0:
            raise ValueError(f"delay spread percentage must be >= 0, got {self.pds_percent}")
        if self.pds_percent > 300.0:
            raise ValueError("delay spread percentage above 300 leaves the search window")
        if self.pilot_len < 0:
            raise ValueError(f"pilot_len must be >= 0, got {self.pilot_len}")
        if self.frame_len <= self.pilot_len:
            raise ValueError(
                f"frame_len {self.frame_len} must exceed pilot_len {self.pilot_len}"
            )
        if self.frame_len <= self.span_k:
            raise ValueError(
                f"frame_len {self.frame_len} must exceed the pulse half-span {self.span_k}"
            )
        if self.es <= 0.0:
            raise ValueError(f"symbol energy must be positive, got {self.es}")
        if len(self.snr_db_list) < 1:
            raise ValueError("need at least one SNR point")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.mmse_timing_rail not in ("i", "q"):
            raise ValueError(f"mmse_timing_rail must be 'i' or 'q', got {self.mmse_timing_rail}")
        if self.csi is CsiMode.PILOT and self.pilot_len < 1:
            raise ValueError("pilot-based CSI needs pilot_len >= 1")
        if self.fixed_channel is not None and self.fixed_channel.n_paths != self.n_paths:
            raise ValueError("fixed channel path count conflicts with n_paths")

    def to_dict(self) -> dict:
        record = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Enum):
                value = value.value
            elif isinstance(value, MultipathChannel):
                value = value.to_dict()
            elif isinstance(value, tuple):
                value = list(value)
            record[f.name] = value
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(record) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(record)
        if "snr_db_list" in kwargs:
            kwargs["snr_db_list"] = tuple(float(x) for x in kwargs["snr_db_list"])
        if "detector" in kwargs:
            kwargs["detector"] = Detector(kwargs["detector"])
        if "timing_mode" in kwargs:
            kwargs["timing_mode"] = TimingMode(kwargs["timing_mode"])
        if "csi" in kwargs:
            kwargs["csi"] = CsiMode(kwargs["csi"])
        if kwargs.get("fixed_channel") is not None:
            kwargs["fixed_channel"] = MultipathChannel.from_dict(kwargs["fixed_channel"])
        return cls(**kwargs)


def preset(name: str) -> SimConfig:
    """Named experiment setups.

    ``annexA``: the long-frame reference run (L = 250, ML detection).
    ``fig3``: short frames, matrix-model MMSE detection with perfect H,
    no pilot block (L = 40).
    ``fig4``: medium frames, ML detection with perfect fading factor
    (L = 200).
    """
    if name == "annexA":
        return SimConfig()
    if name == "fig3":
        return SimConfig(frame_len=40, pilot_len=0, detector=Detector.MMSE)
    if name == "fig4":
        return SimConfig(frame_len=200, pilot_len=50, detector=Detector.ML)
    raise ValueError(f"unknown preset {name!r}")


@dataclass(frozen=True)
class BerPoint:
    """One SNR point of a sweep, with its binomial standard error."""

    snr_db: float
    trials: int
    bit_errors: int
    data_bits: int
    ber: float
    stderr: float


@dataclass(frozen=True)
class FadingPdf:
    """Histogram of |g| over channel realizations, plus a tail probability."""

    bin_left: np.ndarray
    bin_right: np.ndarray
    density: np.ndarray
    threshold: float
    p_below: float
    samples: np.ndarray | None = None


def _trial_rng(config: SimConfig, snr_index: int, trial_index: int, attempt: int):
    seq = np.random.SeedSequence((config.seed, snr_index, trial_index, attempt))
    return np.random.default_rng(seq)


def _trial_bit_errors(
    config: SimConfig,
    cfg: PulseConfig,
    constellation: Constellation,
    search: SearchParams,
    sigma2: float,
    snr_index: int,
    trial_index: int,
) -> int:
    for attempt in range(_MAX_TRIAL_ATTEMPTS):
        rng = _trial_rng(config, snr_index, trial_index, attempt)
        frame = Frame.random(
            config.pilot_len,
            config.frame_len - config.pilot_len,
            constellation,
            rng,
            es=config.es,
        )
        if config.fixed_channel is not None:
            channel = config.fixed_channel
        else:
            channel = sample_channel(config.n_paths, config.tm, config.kappa, rng)
        offsets = estimate_offsets(channel, config.timing_mode, cfg, search)
        y = synthesize_samples(frame, channel, offsets, cfg)
        r = add_noise(y, sigma2, rng)
        try:
            if config.detector is Detector.MMSE:
                tau = offsets.tau_i if config.mmse_timing_rail == "i" else offsets.tau_q
                h = build_channel_matrix(channel, tau, cfg, config.frame_len)
                result = mmse_detect(h, r, sigma2, config.es, constellation)
                detected = result.symbols[config.pilot_len :]
            else:
                if config.csi is CsiMode.PERFECT:
                    g = desired_fading_factor(channel, offsets, cfg)
                else:
                    g = estimate_g_from_pilots(
                        r[: config.pilot_len], frame.pilots, config.es
                    )
                detected = ml_detect(r[config.pilot_len :], g, config.es, constellation)
        except SolverFailure as exc:
            log.warning(
                "solver failure at snr index %d, trial %d, attempt %d: %s",
                snr_index,
                trial_index,
                attempt,
                exc,
            )
            continue
        return int(np.count_nonzero(detected != frame.data))
    raise SolverFailure(
        f"trial {trial_index} at snr index {snr_index} failed "
        f"{_MAX_TRIAL_ATTEMPTS} attempts"
    )


def _run_indexed(task, n_tasks: int, n_workers: int) -> None:
    if n_workers <= 1:
        for i in range(n_tasks):
            task(i)
        return
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        for future in [pool.submit(task, i) for i in range(n_tasks)]:
            future.result()


def run_ber_sweep(config: SimConfig, n_workers: int = 1) -> list[BerPoint]:
    """Monte Carlo BER versus SNR.

    Errors are counted on data symbols only (frames are BPSK, one bit per
    symbol).  The noise is calibrated per SNR point against the average
    channel power: 1 for randomly drawn channels by construction of the
    gain profile, or the realized power of a fixed replay channel.

    Args:
        config: Experiment description.
        n_workers: Worker threads; the result does not depend on it.

    Returns:
        One :class:`BerPoint` per entry of ``config.snr_db_list``.
    """
    config.validate()
    cfg = config.pulse_config
    search = SearchParams.for_pulse(cfg)
    constellation = Constellation.bpsk()
    if config.fixed_channel is not None:
        gamma_power = float(np.sum(np.abs(config.fixed_channel.gammas) ** 2))
    else:
        gamma_power = 1.0
    data_bits_per_trial = (config.frame_len - config.pilot_len) * constellation.bits_per_symbol

    points: list[BerPoint] = []
    for snr_index, snr_db in enumerate(config.snr_db_list):
        snr = 10.0 ** (float(snr_db) / 10.0)
        sigma2 = sigma2_for_snr(snr, config.es, gamma_power, constellation.size)
        counts = np.zeros(config.trials, dtype=np.int64)

        def task(trial_index: int) -> None:
            counts[trial_index] = _trial_bit_errors(
                config, cfg, constellation, search, sigma2, snr_index, trial_index
            )

        _run_indexed(task, config.trials, n_workers)
        bit_errors = int(counts.sum())
        data_bits = config.trials * data_bits_per_trial
        ber = bit_errors / data_bits
        stderr = float(np.sqrt(ber * (1.0 - ber) / data_bits))
        points.append(
            BerPoint(
                snr_db=float(snr_db),
                trials=config.trials,
                bit_errors=bit_errors,
                data_bits=data_bits,
                ber=ber,
                stderr=stderr,
            )
        )
        log.info("snr %.1f dB: ber %.3e (%d/%d bits)", snr_db, ber, bit_errors, data_bits)
    return points


def run_fading_pdf(
    config: SimConfig,
    n_realizations: int,
    threshold: float = 0.1,
    n_bins: int = 100,
    n_workers: int = 1,
) -> FadingPdf:
    """Distribution of the fading-factor magnitude over channel realizations.

    Each realization draws a channel, runs the timing search in the
    configured mode, and records the resulting fading factor.  Returns a
    normalized histogram of |g| plus P(|g| < threshold).
    """
    config.validate()
    if n_realizations < 1:
        raise ValueError(f"n_realizations must be >= 1, got {n_realizations}")
    if threshold <= 0.0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    cfg = config.pulse_config
    search = SearchParams.for_pulse(cfg)
    samples = np.zeros(n_realizations, dtype=complex)

    def task(index: int) -> None:
        rng = np.random.default_rng(np.random.SeedSequence((config.seed, index)))
        channel = sample_channel(config.n_paths, config.tm, config.kappa, rng)
        offsets = estimate_offsets(channel, config.timing_mode, cfg, search)
        samples[index] = desired_fading_factor(channel, offsets, cfg).g

    _run_indexed(task, n_realizations, n_workers)
    magnitudes = np.abs(samples)
    density, edges = np.histogram(magnitudes, bins=n_bins, density=True)
    p_below = float(np.count_nonzero(magnitudes < threshold) / n_realizations)
    return FadingPdf(
        bin_left=edges[:-1],
        bin_right=edges[1:],
        density=density,
        threshold=float(threshold),
        p_below=p_below,
        samples=samples,
    )


def emit_csv(result, path) -> None:
    """Write sweep or histogram results as CSV with full-precision floats.

    BER sweeps use the columns ``snr_db,ber,bit_errors,data_bits,trials,stderr``;
    fading histograms use ``bin_left,bin_right,density`` followed by a final
    summary row ``#P_below,<threshold>,<value>``.
    """
    with open(path, "w", newline="") as handle:
        if isinstance(result, FadingPdf):
            handle.write("bin_left,bin_right,density\n")
            for left, right, dens in zip(result.bin_left, result.bin_right, result.density):
                handle.write(f"{float(left)!r},{float(right)!r},{float(dens)!r}\n")
            handle.write(f"#P_below,{float(result.threshold)!r},{float(result.p_below)!r}\n")
            return
        handle.write("snr_db,ber,bit_errors,data_bits,trials,stderr\n")
        for point in result:
            handle.write(
                f"{float(point.snr_db)!r},{float(point.ber)!r},{point.bit_errors},"
                f"{point.data_bits},{point.trials},{float(point.stderr)!r}\n"
            )


def read_ber_csv(path) -> list[BerPoint]:
    """Parse a BER sweep CSV written by :func:`emit_csv`."""
    points = []
    with open(path) as handle:
        header = handle.readline().strip()
        if header != "snr_db,ber,bit_errors,data_bits,trials,stderr":
            raise ValueError(f"unrecognized BER csv header: {header!r}")
        for line in handle:
            snr_db, ber, bit_errors, data_bits, trials, stderr = line.strip().split(",")
            points.append(
                BerPoint(
                    snr_db=float(snr_db),
                    trials=int(trials),
                    bit_errors=int(bit_errors),
                    data_bits=int(data_bits),
                    ber=float(ber),
                    stderr=float(stderr),
                )
            )
    return points


def read_fading_csv(path) -> FadingPdf:
    """Parse a fading histogram CSV written by :func:`emit_csv`."""
    left, right, density = [], [], []
    threshold = p_below = None
    with open(path) as handle:
        header = handle.readline().strip()
        if header != "bin_left,bin_right,density":
            raise ValueError(f"unrecognized fading csv header: {header!r}")
        for line in handle:
            line = line.strip()
            if line.startswith("#P_below"):
                _, thr, val = line.split(",")
                threshold, p_below = float(thr), float(val)
                continue
            a, b, c = line.split(",")
            left.append(float(a))
            right.append(float(b))
            density.append(float(c))
    if threshold is None:
        raise ValueError("missing #P_below summary row")
    return FadingPdf(
        bin_left=np.array(left),
        bin_right=np.array(right),
        density=np.array(density),
        threshold=threshold,
        p_below=p_below,
        samples=None,
    )


def load_config(path) -> SimConfig:
    """Load a :class:`SimConfig` from a JSON file of field overrides."""
    with open(path) as handle:
        record = json.load(handle)
    return SimConfig.from_dict(record)


def save_config(config: SimConfig, path) -> None:
    """Write a :class:`SimConfig` as JSON."""
    with open(path, "w") as handle:
        json.dump(config.to_dict(), handle, indent=2)
        handle.write("\n")
