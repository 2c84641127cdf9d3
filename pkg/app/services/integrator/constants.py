# Derived max_step is the shortest relevant period divided by this. Higher = smoother dense output,
# more steps per run.
STEPS_PER_SHORTEST_PERIOD = 40
# Derived event_tol as a fraction of max_step. Smaller = tighter guard residuals, more bisections.
EVENT_TOL_FRACTION = 1e-7
# Interior points per accepted step at which guards are probed for sign changes. Guards that dip
# and recover inside a step are missed when this is too low.
GUARD_PROBES_PER_STEP = 4
# Bisection stops at this many halvings even if event_tol is below float spacing at t.
MAX_BISECTIONS = 200
# Oracle records every Nth step unless the caller asks otherwise.
ORACLE_RECORD_EVERY = 10
