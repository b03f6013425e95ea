"""Random multipath channel generation with a controlled delay spread.

A channel realization is a set of path delays spanning exactly [0, tm]
together with complex Gaussian path gains drawn from an exponential power
profile normalized to unit total average power.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "BandClass",
    "MultipathChannel",
    "sample_delays",
    "sample_gains",
    "sample_channel",
    "delay_spread",
    "pds",
    "classify_band",
]


class BandClass(Enum):
    """Operating regime of a link, from delay spread relative to symbol period."""

    NARROWBAND = "narrowband"
    MEDIUMBAND = "mediumband"
    BROADBAND = "broadband"


@dataclass(frozen=True)
class MultipathChannel:
    """One multipath channel realization.

    Attributes:
        taus: Path delays in seconds, sorted ascending, first entry 0.
        gammas: Complex path gains, same length as ``taus``.
        kappa: Decay rate of the generating power profile (informational).
    """

    taus: np.ndarray
    gammas: np.ndarray
    kappa: float = 0.0

    def __post_init__(self) -> None:
        taus = np.asarray(self.taus, dtype=float)
        gammas = np.asarray(self.gammas, dtype=complex)
        if taus.ndim != 1 or gammas.ndim != 1 or taus.size != gammas.size:
            raise ValueError("delays and gains must be 1-d arrays of equal length")
        if taus.size < 1:
            raise ValueError("a channel needs at least one path")
        if taus[0] != 0.0:
            raise ValueError("the first path delay must be 0")
        if np.any(np.diff(taus) < 0.0):
            raise ValueError("path delays must be sorted ascending")
        if self.kappa < 0.0:
            raise ValueError(f"profile decay rate must be >= 0, got {self.kappa}")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "gammas", gammas)

    @property
    def n_paths(self) -> int:
        return self.taus.size

    def to_dict(self) -> dict:
        """JSON-friendly record: delays in seconds, gains as [re, im] pairs."""
        return {
            "taus": self.taus.tolist(),
            "gammas": [[float(g.real), float(g.imag)] for g in self.gammas],
            "kappa": float(self.kappa),
        }

    @classmethod
    def from_dict(cls, record: dict) -> "MultipathChannel":
        gammas = np.array([complex(re, im) for re, im in record["gammas"]])
        return cls(
            taus=np.asarray(record["taus"], dtype=float),
            gammas=gammas,
            kappa=float(record.get("kappa", 0.0)),
        )


def sample_delays(n_paths: int, tm: float, rng: np.random.Generator) -> np.ndarray:
    """Draw path delays spanning exactly [0, tm].

    Uniform draws on [0, tm] are shifted so the earliest is 0, rescaled so
    the latest is exactly tm, and sorted.  A single path, or tm = 0, yields
    all-zero delays with no rescale.

    Args:
        n_paths: Number of paths, >= 1.
        tm: Target delay spread in seconds, >= 0.
        rng: Source of randomness.

    Returns:
        Sorted delays, shape (n_paths,), with ``delays[0] == 0`` and, for
        n_paths >= 2 and tm > 0, ``delays[-1] == tm``.
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    if tm < 0.0:
        raise ValueError(f"delay spread must be >= 0, got {tm}")
    if n_paths == 1 or tm == 0.0:
        return np.zeros(n_paths)
    raw = tm * rng.random(n_paths)
    raw = raw - raw.min()
    peak = raw.max()
    if peak == 0.0:
        # All draws coincided; degenerate but valid.
        return np.zeros(n_paths)
    return np.sort(raw * (tm / peak))


def sample_gains(n_paths: int, kappa: float, rng: np.random.Generator) -> np.ndarray:
    """Draw complex Gaussian path gains from an exponential power profile.

    The average power of path n (1-based) is proportional to exp(-2*kappa*n)
    after the amplitude profile exp(-kappa*n) is normalized so the powers sum
    to exactly 1.  Real and imaginary parts are independent zero-mean normals
    with half the path power each, so the total average power is 1.

    Args:
        n_paths: Number of paths, >= 1.
        kappa: Profile decay rate, >= 0 (0 gives a uniform profile).
        rng: Source of randomness.

    Returns:
        Complex gains, shape (n_paths,).
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    if kappa < 0.0:
        raise ValueError(f"profile decay rate must be >= 0, got {kappa}")
    alpha = np.exp(-kappa * np.arange(1, n_paths + 1, dtype=float))
    alpha = alpha / np.sqrt(np.sum(alpha**2))
    sigma = np.sqrt(alpha**2 / 2.0)
    return sigma * (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths))


def sample_channel(
    n_paths: int, tm: float, kappa: float, rng: np.random.Generator
) -> MultipathChannel:
    """Draw a full channel realization (delays first, then gains)."""
    taus = sample_delays(n_paths, tm, rng)
    gammas = sample_gains(n_paths, kappa, rng)
    return MultipathChannel(taus=taus, gammas=gammas, kappa=kappa)


def delay_spread(taus: np.ndarray) -> float:
    """Maximum delay relative to the first listed path, max |tau_n - tau_0|."""
    taus = np.asarray(taus, dtype=float)
    if taus.size < 1:
        raise ValueError("need at least one delay")
    return float(np.max(np.abs(taus - taus[0])))


def pds(tm: float, ts: float) -> float:
    """Percentage delay spread, 100 * tm / ts."""
    if ts <= 0.0:
        raise ValueError(f"symbol period must be positive, got {ts}")
    if tm < 0.0:
        raise ValueError(f"delay spread must be >= 0, got {tm}")
    return 100.0 * tm / ts


def classify_band(tm: float, ts: float) -> BandClass:
    """Operating regime for a delay spread tm against a symbol period ts.

    Narrowband up to tm = 0.1*ts inclusive, broadband from tm = ts inclusive,
    mediumband strictly in between.
    """
    if ts <= 0.0:
        raise ValueError(f"symbol period must be positive, got {ts}")
    if tm < 0.0:
        raise ValueError(f"delay spread must be >= 0, got {tm}")
    if tm <= 0.1 * ts:
        return BandClass.NARROWBAND
    if tm >= ts:
        return BandClass.BROADBAND
    return BandClass.MEDIUMBAND
