"""Symbol detection: banded linear channel model, MMSE and ML detectors.

The sampled link over one frame is r = sqrt(es) * H s + w with H a banded
Toeplitz matrix assembled from the pulse sampled at the receiver timing
offset.  The MMSE detector never forms an explicit inverse; it solves the
regularized normal equations and then slices.  The ML detector is the
per-sample nearest-point rule against the known fading factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .channel import MultipathChannel
from .pulses import PulseConfig, rc_pulse
from .timing import FadingFactor
from .waveform import Constellation

__all__ = [
    "SolverFailure",
    "ChannelMatrix",
    "DetectionResult",
    "build_channel_matrix",
    "mmse_detect",
    "ml_detect",
    "estimate_g_from_pilots",
    "residual_interference",
]


class SolverFailure(RuntimeError):
    """The MMSE system could not be solved (singular at zero noise)."""


@dataclass(frozen=True)
class ChannelMatrix:
    """Banded Toeplitz frame-level channel matrix.

    Entry (i, j) is coeffs[j - i + half_band] when |j - i| <= half_band and
    zero otherwise, so row l of H @ s is sum_nu h_nu * s[l + nu].

    Attributes:
        dim: Frame length L (matrix is L x L).
        half_band: Half bandwidth K.
        coeffs: The 2K + 1 diagonal coefficients h_{-K} .. h_{K}.
    """

    dim: int
    half_band: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.size != 2 * self.half_band + 1:
            raise ValueError("need exactly 2*half_band + 1 coefficients")
        if self.dim <= self.half_band:
            raise ValueError(
                f"frame length {self.dim} must exceed half bandwidth {self.half_band}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    def coefficient(self, nu: int) -> complex:
        """Diagonal coefficient h_nu, zero outside |nu| <= half_band."""
        if abs(nu) > self.half_band:
            return 0.0 + 0.0j
        return complex(self.coeffs[nu + self.half_band])

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for nu in range(-self.half_band, self.half_band + 1):
            idx = np.arange(max(0, -nu), min(self.dim, self.dim - nu))
            h[idx, idx + nu] = self.coeffs[nu + self.half_band]
        return h

    def matvec(self, s: np.ndarray) -> np.ndarray:
        """H @ s without materializing H."""
        s = np.asarray(s)
        if s.size != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}, got {s.size}")
        return np.convolve(s, self.coeffs[::-1])[self.half_band : self.half_band + self.dim]

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """H.conj().T @ x without materializing H."""
        x = np.asarray(x)
        if x.size != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}, got {x.size}")
        return np.convolve(x, np.conj(self.coeffs))[self.half_band : self.half_band + self.dim]


@dataclass(frozen=True)
class DetectionResult:
    """Sliced symbols plus the soft estimates they came from."""

    symbols: np.ndarray
    raw: np.ndarray


def build_channel_matrix(
    channel: MultipathChannel, tau_hat: float, cfg: PulseConfig, frame_len: int
) -> ChannelMatrix:
    """Assemble the banded channel matrix for one timing offset.

    Coefficient nu is sum_n gamma_n * p(tau_hat - tau_n - nu*ts) for
    nu in [-K, K]; all other diagonals are zero.
    """
    if frame_len <= cfg.span_k:
        raise ValueError(
            f"frame length {frame_len} must exceed the pulse half-span {cfg.span_k}"
        )
    nu = np.arange(-cfg.span_k, cfg.span_k + 1)
    taps = rc_pulse(tau_hat - channel.taus[:, None] - nu[None, :] * cfg.ts, cfg)
    coeffs = channel.gammas @ taps
    return ChannelMatrix(dim=frame_len, half_band=cfg.span_k, coeffs=coeffs)


def _solve_dense(h: ChannelMatrix, r: np.ndarray, lam: float) -> np.ndarray:
    dense = h.to_dense()
    gram = dense @ dense.conj().T + lam * np.eye(h.dim)
    try:
        x = np.linalg.solve(gram, r)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"MMSE system is singular: {exc}") from exc
    return dense.conj().T @ x


def _solve_banded(h: ChannelMatrix, r: np.ndarray, lam: float) -> np.ndarray:
    # H H^H + lam I is Hermitian with bandwidth 2K; assemble its lower
    # diagonals sparsely and hand them to the banded Cholesky solver.
    k = h.half_band
    sparse_h = scipy.sparse.diags(
        [np.full(h.dim - abs(nu), h.coeffs[nu + k]) for nu in range(-k, k + 1)],
        offsets=range(-k, k + 1),
        format="csr",
    )
    gram = (sparse_h @ sparse_h.conj().T).tocsc()
    ab = np.zeros((2 * k + 1, h.dim), dtype=complex)
    for d in range(2 * k + 1):
        ab[d, : h.dim - d] = gram.diagonal(-d)
    ab[0, :] += lam
    try:
        x = scipy.linalg.solveh_banded(ab, r, lower=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverFailure(f"MMSE system is singular: {exc}") from exc
    return h.rmatvec(x)


def mmse_detect(
    h: ChannelMatrix,
    r: np.ndarray,
    sigma2: float,
    es: float,
    constellation: Constellation,
    solver: str = "dense",
) -> DetectionResult:
    """Frame-level MMSE detection against a known channel matrix.

    Solves (H H^H + (sigma2/es) I) x = r, forms the soft estimates H^H x,
    and slices them to the constellation.  ``solver`` picks the reference
    dense solve or the banded O(L K^2) fast path; both give the same result.
    """
    r = np.asarray(r, dtype=complex)
    if r.size != h.dim:
        raise ValueError(f"expected {h.dim} received samples, got {r.size}")
    if es <= 0.0:
        raise ValueError(f"symbol energy must be positive, got {es}")
    if sigma2 < 0.0:
        raise ValueError(f"noise variance must be >= 0, got {sigma2}")
    lam = sigma2 / es
    if solver == "dense":
        raw = _solve_dense(h, r, lam)
    elif solver == "banded":
        raw = _solve_banded(h, r, lam)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    return DetectionResult(symbols=constellation.nearest(raw), raw=raw)


def ml_detect(r, g: FadingFactor, es: float, constellation: Constellation):
    """Per-sample nearest-point detection against a known fading factor.

    Picks argmin over the alphabet of |r_k - sqrt(es) * g * q|; distance
    ties resolve to the lowest point index.  Scalar in, scalar out.
    """
    if es <= 0.0:
        raise ValueError(f"symbol energy must be positive, got {es}")
    r_arr = np.atleast_1d(np.asarray(r, dtype=complex))
    scalar = np.ndim(r) == 0
    targets = np.sqrt(es) * g.g * constellation.points
    idx = np.argmin(np.abs(r_arr[:, None] - targets[None, :]), axis=1)
    symbols = constellation.points[idx]
    return complex(symbols[0]) if scalar else symbols


def estimate_g_from_pilots(r_pilots: np.ndarray, pilots: np.ndarray, es: float) -> FadingFactor:
    """Least-squares fading-factor estimate from the pilot block.

    g_hat = sum_k r_k conj(s_k) / (sqrt(es) * sum_k |s_k|^2).
    """
    r_pilots = np.asarray(r_pilots, dtype=complex)
    pilots = np.asarray(pilots, dtype=complex)
    if pilots.size < 1 or r_pilots.size != pilots.size:
        raise ValueError("need matching, non-empty pilot blocks")
    if es <= 0.0:
        raise ValueError(f"symbol energy must be positive, got {es}")
    num = np.sum(r_pilots * np.conj(pilots))
    den = np.sqrt(es) * np.sum(np.abs(pilots) ** 2)
    return FadingFactor(complex(num / den))


def residual_interference(y, g: FadingFactor, s, es: float):
    """Receive samples minus the desired term sqrt(es) * g * s (vectorized)."""
    if es <= 0.0:
        raise ValueError(f"symbol energy must be positive, got {es}")
    return np.asarray(y, dtype=complex) - np.sqrt(es) * g.g * np.asarray(s, dtype=complex)
