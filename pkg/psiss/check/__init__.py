"""PSISS sampled and grid checks."""

# relative slack of the sampled Lyapunov checks: margin > SAMPLE_TOL * (1 + |bound|)
SAMPLE_TOL = 1e-12

# absolute slack of the switching-signal bound checks
SIGNAL_TOL = 1e-9
