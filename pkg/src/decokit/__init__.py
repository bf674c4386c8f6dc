"""Environment-induced decoherence timescales, density-matrix bookkeeping
for subject/object/environment splits, and grid oracles for the analytic
suppression factors."""

__version__ = "0.1.0"
