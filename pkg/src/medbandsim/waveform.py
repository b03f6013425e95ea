"""Baseband frame synthesis at the receiver sampling instants, plus noise.

The receive waveform is a gain-weighted sum of delayed pulse trains.  For
detection only its values at the L chosen sampling instants matter, so the
synthesizer evaluates exactly those samples; a separate oversampled path
exists solely for plotting.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import MultipathChannel
from .pulses import PulseConfig, rc_pulse
from .timing import TimingMode, TimingOffsets

__all__ = [
    "Constellation",
    "Frame",
    "ReceivedFrame",
    "synthesize_samples",
    "synthesize_oversampled",
    "sigma2_for_snr",
    "add_noise",
]

# Tolerance for "this point belongs to the constellation" checks.
_MEMBER_TOL = 1e-12


@dataclass(frozen=True)
class Constellation:
    """A unit-average-power symbol alphabet.

    Attributes:
        name: Short label, e.g. "bpsk".
        points: Complex constellation points, mean squared magnitude 1.
    """

    name: str
    points: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=complex)
        if points.ndim != 1 or points.size < 2:
            raise ValueError("a constellation needs at least two points")
        mean_power = float(np.mean(np.abs(points) ** 2))
        if abs(mean_power - 1.0) > 1e-9:
            raise ValueError(f"constellation mean power must be 1, got {mean_power}")
        object.__setattr__(self, "points", points)

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        m = self.points.size
        bits = int(round(np.log2(m)))
        if 2**bits != m:
            raise ValueError(f"constellation size must be a power of two, got {m}")
        return bits

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.points.imag == 0.0))

    def nearest(self, raw: np.ndarray) -> np.ndarray:
        """Slice soft estimates to the nearest constellation points.

        Distance ties resolve to the lowest point index.
        """
        raw = np.atleast_1d(np.asarray(raw, dtype=complex))
        idx = np.argmin(np.abs(raw[:, None] - self.points[None, :]), axis=1)
        return self.points[idx]

    @classmethod
    def bpsk(cls) -> "Constellation":
        return cls(name="bpsk", points=np.array([1.0 + 0.0j, -1.0 + 0.0j]))

    @classmethod
    def qam4(cls) -> "Constellation":
        corners = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j], dtype=complex)
        return cls(name="qam4", points=corners / np.sqrt(2.0))


@dataclass(frozen=True)
class Frame:
    """One transmit frame: pilot symbols followed by data symbols.

    Attributes:
        pilots: Pilot symbols (possibly empty).
        data: Data symbols, at least one.
        es: Symbol energy scale applied at synthesis, > 0.
        constellation: Alphabet the symbols are drawn from.
    """

    pilots: np.ndarray
    data: np.ndarray
    es: float
    constellation: Constellation

    def __post_init__(self) -> None:
        pilots = np.asarray(self.pilots, dtype=complex)
        data = np.asarray(self.data, dtype=complex)
        if data.size < 1:
            raise ValueError("a frame needs at least one data symbol")
        if self.es <= 0.0:
            raise ValueError(f"symbol energy must be positive, got {self.es}")
        for name, block in (("pilot", pilots), ("data", data)):
            if block.size == 0:
                continue
            dist = np.min(np.abs(block[:, None] - self.constellation.points[None, :]), axis=1)
            if np.any(dist > _MEMBER_TOL):
                raise ValueError(f"{name} symbols must lie on the constellation")
        object.__setattr__(self, "pilots", pilots)
        object.__setattr__(self, "data", data)

    @property
    def symbols(self) -> np.ndarray:
        return np.concatenate([self.pilots, self.data])

    def __len__(self) -> int:
        return self.pilots.size + self.data.size

    @classmethod
    def random(
        cls,
        n_pilots: int,
        n_data: int,
        constellation: Constellation,
        rng: np.random.Generator,
        es: float = 1.0,
    ) -> "Frame":
        """Draw a frame of uniform symbols, pilot block first."""
        pilots = constellation.points[rng.integers(0, constellation.size, n_pilots)]
        data = constellation.points[rng.integers(0, constellation.size, n_data)]
        return cls(pilots=pilots, data=data, es=es, constellation=constellation)


@dataclass(frozen=True)
class ReceivedFrame:
    """Noisy receive samples together with the noiseless reference."""

    samples: np.ndarray
    noiseless: np.ndarray
    sigma2: float


@lru_cache(maxsize=256)
def _taps_row(delta: float, ts: float, beta: float, span_k: int, m_min: int, m_max: int):
    cfg = PulseConfig(ts=ts, beta=beta, span_k=span_k)
    row = rc_pulse(np.arange(m_min, m_max + 1) * ts + delta, cfg)
    row.flags.writeable = False
    return row


def _branch_samples(s, taus, gains, tau_hat, cfg: PulseConfig, n_out: int):
    # One rail: sum_n gains[n] * sum_i s[i] * p(tau_hat + (k - i)*ts - tau_n),
    # computed as a per-path discrete convolution of the symbol stream with
    # the pulse sampled at symbol spacing.  The tap index range covers the
    # truncated pulse support for every path; p() zeroes anything outside.
    # Equal delays share one tap row, so their gains fold into one convolution.
    d = tau_hat - np.asarray(taus, dtype=float)
    gains = np.asarray(gains)
    if d.size > 1 and np.all(d == d[0]):
        d = d[:1]
        gains = gains.sum(keepdims=True)
    m_min = min(int(np.floor(-cfg.span_k - d.max() / cfg.ts)) - 1, -1)
    m_max = max(int(np.ceil(cfg.span_k - d.min() / cfg.ts)) + 1, 1)
    if d.size == 1:
        taps = _taps_row(float(d[0]), cfg.ts, cfg.beta, cfg.span_k, m_min, m_max)[None, :]
    else:
        m = np.arange(m_min, m_max + 1)
        taps = rc_pulse(m[None, :] * cfg.ts + d[:, None], cfg)
    out = np.zeros(n_out + taps.shape[1] - 1, dtype=np.result_type(np.asarray(s).dtype, gains.dtype))
    for gain, row in zip(gains, taps):
        out += gain * np.convolve(s, row)
    return out[-m_min : -m_min + n_out]


def synthesize_samples(
    frame: Frame,
    channel: MultipathChannel,
    offsets: TimingOffsets,
    cfg: PulseConfig,
) -> np.ndarray:
    """Noiseless receive samples of a frame at the chosen sampling instants.

    Split mode samples the in-phase rail (real gain parts) at
    tau_i + k*ts and the quadrature rail (imaginary gain parts) at
    tau_q + k*ts, then recombines; it requires a real constellation.  Joint
    mode evaluates the full complex sum at tau_i + k*ts.  The output carries
    the sqrt(es) scale; symbols outside the frame are treated as zero.

    Returns:
        Complex samples, shape (len(frame),).
    """
    s = frame.symbols
    n_out = s.size
    if offsets.mode is TimingMode.SPLIT:
        if not frame.constellation.is_real:
            raise ValueError("split-rail sampling requires a real constellation")
        s_real = s.real
        y_i = _branch_samples(s_real, channel.taus, channel.gammas.real, offsets.tau_i, cfg, n_out)
        y_q = _branch_samples(s_real, channel.taus, channel.gammas.imag, offsets.tau_q, cfg, n_out)
        y = y_i + 1j * y_q
    else:
        y = _branch_samples(s, channel.taus, channel.gammas, offsets.tau_i, cfg, n_out)
    return np.sqrt(frame.es) * y


def synthesize_oversampled(
    frame: Frame,
    channel: MultipathChannel,
    cfg: PulseConfig,
    oversample: int = 16,
):
    """Densely sampled receive waveform, for plotting only.

    Evaluates y(t) = sqrt(es) * sum_n gamma_n sum_i s_i p(t - i*ts - tau_n)
    on a uniform grid with ``oversample`` points per symbol period covering
    the frame plus the pulse tails.

    Returns:
        Tuple ``(t, y)`` of the time grid in seconds and complex samples.
    """
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    s = frame.symbols
    pad = cfg.span_k * cfg.ts + float(np.max(channel.taus))
    t = np.arange(-pad, (s.size - 1) * cfg.ts + pad + cfg.ts / oversample, cfg.ts / oversample)
    y = np.zeros(t.size, dtype=complex)
    instants = np.arange(s.size) * cfg.ts
    for tau, gamma in zip(channel.taus, channel.gammas):
        pulses = rc_pulse(t[:, None] - instants[None, :] - tau, cfg)
        y += gamma * (pulses @ s)
    return t, np.sqrt(frame.es) * y


def sigma2_for_snr(snr: float, es: float, gamma_power: float, m: int) -> float:
    """Total complex noise variance realizing a target SNR per bit-normalized symbol.

    sigma2 = es * gamma_power / (snr * log2(m)) for linear snr > 0, average
    channel power gamma_power, and constellation size m.
    """
    if snr <= 0.0:
        raise ValueError(f"snr must be positive (linear), got {snr}")
    if es <= 0.0:
        raise ValueError(f"symbol energy must be positive, got {es}")
    if gamma_power <= 0.0:
        raise ValueError(f"channel power must be positive, got {gamma_power}")
    if m < 2:
        raise ValueError(f"constellation size must be >= 2, got {m}")
    return es * gamma_power / (snr * np.log2(m))


def add_noise(samples: np.ndarray, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise of total variance sigma2.

    Each component gets variance sigma2 / 2; samples are independent, which
    is the correct discrete model for receiver noise observed through the
    root pulse at symbol-spaced instants.
    """
    if sigma2 < 0.0:
        raise ValueError(f"noise variance must be >= 0, got {sigma2}")
    samples = np.asarray(samples)
    scale = np.sqrt(sigma2 / 2.0)
    noise = scale * rng.standard_normal(samples.shape) + 1j * (
        scale * rng.standard_normal(samples.shape)
    )
    return samples + noise
