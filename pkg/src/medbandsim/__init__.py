"""Link-level simulator for mediumband wireless channels.

Synthesizes baseband frames over random multipath channels whose delay
spread is a controlled fraction of the symbol period, finds per-rail symbol
timing against the pulse autocorrelation, detects with MMSE or ML, and runs
seeded Monte Carlo BER and fading-factor experiments.
"""

from .channel import (
    BandClass,
    MultipathChannel,
    classify_band,
    delay_spread,
    pds,
    sample_channel,
    sample_delays,
    sample_gains,
)
from .detection import (
    ChannelMatrix,
    DetectionResult,
    SolverFailure,
    build_channel_matrix,
    estimate_g_from_pilots,
    ml_detect,
    mmse_detect,
    residual_interference,
)
from .harness import (
    BerPoint,
    CsiMode,
    Detector,
    FadingPdf,
    SimConfig,
    emit_csv,
    load_config,
    preset,
    read_ber_csv,
    read_fading_csv,
    run_ber_sweep,
    run_fading_pdf,
    save_config,
)
from .pulses import (
    PulseConfig,
    autocorr,
    rc_pulse,
    rc_spectrum,
    srrc_pulse,
    srrc_rx_pulse,
    srrc_tx_pulse,
)
from .timing import (
    FadingFactor,
    SearchParams,
    TimingMode,
    TimingOffsets,
    desired_fading_factor,
    estimate_offsets,
    find_offset,
    timing_objective,
)
from .waveform import (
    Constellation,
    Frame,
    ReceivedFrame,
    add_noise,
    sigma2_for_snr,
    synthesize_oversampled,
    synthesize_samples,
)

__version__ = "0.1.0"
