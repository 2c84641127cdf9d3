# Share of a run, counted back from its end, over which speed is measured. Longer = less transient
# bias when the run is long enough to settle, more when it is not.
DEFAULT_WINDOW_FRACTION = 0.5
# Resonance probe: per-period peak-to-peak growth over the first period that counts as resonant.
GROWTH_THRESHOLD = 5.0
PROBE_PERIODS = 20
# Response scan length in drive periods. Longer = sharper peak, slower scan.
RESPONSE_PERIODS = 40
# Sweeps with fewer successful points than this fraction fail the command.
MIN_SUCCESS_FRACTION = 0.9
# Relative slack when comparing a measured speed against the speed ceiling.
BOUND_RTOL = 1e-9
