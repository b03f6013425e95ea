"""Closed-form raised-cosine pulse family and symbol-stream autocorrelation.

Everything in this module is a direct formula evaluation, vectorized over
the time (or frequency) argument.  Points where a denominator vanishes are
removable singularities of the printed formulas; they are routed to their
analytic limits instead of relying on floating point to survive the 0/0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PulseConfig",
    "rc_pulse",
    "rc_spectrum",
    "srrc_pulse",
    "srrc_tx_pulse",
    "srrc_rx_pulse",
    "autocorr",
]

# A point is routed to a singular-point branch when it lies within this
# fraction of a symbol period of the singularity.
SINGULARITY_TOL = 1e-8


@dataclass(frozen=True)
class PulseConfig:
    """Parameters of the raised-cosine pulse family.

    Attributes:
        ts: Symbol period in seconds (> 0).
        beta: Excess-bandwidth roll-off factor, in (0, 1].
        span_k: Half-span K of the truncated combined pulse in symbol
            periods; the pulse is forced to zero outside |t| <= K * ts.
    """

    ts: float
    beta: float
    span_k: int = 6

    def __post_init__(self) -> None:
        if not self.ts > 0.0:
            raise ValueError(f"symbol period must be positive, got {self.ts}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"roll-off must be in (0, 1], got {self.beta}")
        if self.span_k < 1:
            raise ValueError(f"span_k must be >= 1, got {self.span_k}")


def rc_pulse(t, cfg: PulseConfig):
    """Combined (transmit * receive) raised-cosine pulse p(t).

    The closed form, with x = t/ts, is

        p(t) = sinc(x) * cos(pi*beta*x) / (1 - (2*beta*x)**2)

    and p is forced to zero outside |t| <= span_k * ts.  At |x| = 1/(2*beta)
    the cosine and the denominator vanish together; the analytic limit there
    is (pi/4) * sinc(1/(2*beta)).

    Args:
        t: Time in seconds, scalar or ndarray.
        cfg: Pulse parameters.

    Returns:
        Dimensionless pulse value(s), same shape as ``t``.
    """
    x = np.asarray(t, dtype=float) / cfg.ts
    scalar = x.ndim == 0
    sing = 1.0 / (2.0 * cfg.beta)
    on_sing = np.abs(np.abs(x) - sing) < SINGULARITY_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        generic = np.sinc(x) * np.cos(np.pi * cfg.beta * x) / (1.0 - (2.0 * cfg.beta * x) ** 2)
    out = np.where(on_sing, (np.pi / 4.0) * np.sinc(sing), generic)
    out = np.where(np.abs(x) > cfg.span_k, 0.0, out)
    return float(out) if scalar else out


def rc_spectrum(f, cfg: PulseConfig):
    """Spectrum P(f) of the combined raised-cosine pulse, in seconds.

    Flat at ts over |f| <= (1-beta)/(2*ts), raised-cosine roll-off out to
    (1+beta)/(2*ts), zero beyond.  Integrates to exactly 1 over frequency.

    Args:
        f: Frequency in hertz, scalar or ndarray.
        cfg: Pulse parameters.

    Returns:
        Spectrum value(s) in seconds, same shape as ``f``.
    """
    af = np.abs(np.asarray(f, dtype=float))
    scalar = af.ndim == 0
    f_flat = (1.0 - cfg.beta) / (2.0 * cfg.ts)
    f_stop = (1.0 + cfg.beta) / (2.0 * cfg.ts)
    rolloff = 0.5 * cfg.ts * (1.0 + np.cos(np.pi * cfg.ts / cfg.beta * (af - f_flat)))
    out = np.select([af <= f_flat, af <= f_stop], [cfg.ts, rolloff], default=0.0)
    return float(out) if scalar else out


def srrc_pulse(t, cfg: PulseConfig):
    """Square-root raised-cosine shape, as printed in common references.

    With x = t/ts the generic expression is

        (sqrt(ts)/(pi*t)) * [sin(pi*x*(1-beta)) + 4*beta*x*cos(pi*x*(1+beta))]
                          / (1 - (4*beta*x)**2)

    with special values 1 + beta*(4/pi - 1) at t = 0 and

        (beta/sqrt(2)) * [(1 + 2/pi)*sin(pi/(4*beta))
                          + (1 - 2/pi)*cos(pi/(4*beta))]

    at |t| = ts/(4*beta).  Note the special values follow the common
    unit-symbol-period convention and omit the 1/sqrt(ts) scale carried by
    the generic expression, so for ts != 1 this function is a shape
    diagnostic rather than a unit-consistent impulse response.  Untruncated.
    """
    x = np.asarray(t, dtype=float) / cfg.ts
    scalar = x.ndim == 0
    sing = 1.0 / (4.0 * cfg.beta)
    at_zero = np.abs(x) < SINGULARITY_TOL
    at_sing = np.abs(np.abs(x) - sing) < SINGULARITY_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        generic = (
            (np.sin(np.pi * x * (1.0 - cfg.beta)) + 4.0 * cfg.beta * x * np.cos(np.pi * x * (1.0 + cfg.beta)))
            / (np.pi * x * (1.0 - (4.0 * cfg.beta * x) ** 2))
            / np.sqrt(cfg.ts)
        )
    zero_val = 1.0 + cfg.beta * (4.0 / np.pi - 1.0)
    sing_val = (cfg.beta / np.sqrt(2.0)) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * cfg.beta))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * cfg.beta))
    )
    out = np.select([at_zero, at_sing], [zero_val, sing_val], default=generic)
    return float(out) if scalar else out


def srrc_tx_pulse(t, cfg: PulseConfig):
    """Transmit-side square-root pulse, sqrt(ts) times :func:`srrc_pulse`."""
    return np.sqrt(cfg.ts) * srrc_pulse(t, cfg)


def srrc_rx_pulse(t, cfg: PulseConfig):
    """Receive-side square-root pulse, :func:`srrc_pulse` over sqrt(ts)."""
    return srrc_pulse(t, cfg) / np.sqrt(cfg.ts)


def autocorr(tau, cfg: PulseConfig):
    """Autocorrelation R(tau) of an RC-shaped unit-power symbol stream.

    With x = tau/ts,

        R(tau) = sinc(x) * cos(pi*beta*x) / (1 - (2*beta*x)**2)
                 - (beta/4) * sinc(beta*x) * cos(pi*x) / (1 - (beta*x)**2).

    Both terms have removable singularities.  The first is the same 0/0 as
    the combined pulse, at |x| = 1/(2*beta), with limit (pi/4)*sinc(1/(2*beta)).
    The second is at |x| = 1/beta: writing u = beta*x and letting u -> 1,
    sin(pi*u) = sin(pi*(1-u)) ~ pi*(1-u), so

        sinc(u)/(1 - u**2) = sin(pi*u) / (pi*u*(1-u)*(1+u)) -> 1/(u*(1+u)) -> 1/2

    (even in u, so the same holds at u -> -1), leaving -(beta/8)*cos(pi*x)
    for that term.  R(0) = 1 - beta/4.  Evaluated untruncated.

    Args:
        tau: Lag in seconds, scalar or ndarray.
        cfg: Pulse parameters.

    Returns:
        Dimensionless autocorrelation value(s), same shape as ``tau``.
    """
    x = np.asarray(tau, dtype=float) / cfg.ts
    scalar = x.ndim == 0
    b = cfg.beta
    ax = np.abs(x)

    sing1 = 1.0 / (2.0 * b)
    on_sing1 = np.abs(ax - sing1) < SINGULARITY_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        term1 = np.sinc(x) * np.cos(np.pi * b * x) / (1.0 - (2.0 * b * x) ** 2)
    term1 = np.where(on_sing1, (np.pi / 4.0) * np.sinc(sing1), term1)

    sing2 = 1.0 / b
    on_sing2 = np.abs(ax - sing2) < SINGULARITY_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        term2 = np.sinc(b * x) * np.cos(np.pi * x) / (1.0 - (b * x) ** 2)
    term2 = np.where(on_sing2, 0.5 * np.cos(np.pi * x), term2)

    out = term1 - (b / 4.0) * term2
    return float(out) if scalar else out
