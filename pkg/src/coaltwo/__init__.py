"""Correlation of pairwise coalescence times at two linked loci.

A diploid Wright-Fisher population of N individuals reproduces with
selfing probability s and recombination probability r between loci i and
j. ``coaltwo`` computes Cov and Corr of the two coalescence times exactly
for finite N, their leading large-N behaviour under four scalings of s and
r, and seeded Monte Carlo estimates.

Modules
-------
core
    Parameters, states and scaling scenarios.
chain
    Transition matrices of the 3-, 13- and 17-state chains.
exact
    Exact rational moments, covariances and correlations.
asympt
    Large-N limits and closed forms.
mc
    Seeded matrix-driven and lineage-tracing samplers.
cli
    Command-line interface.
"""
from .core import Parameters, ScalingScenario, State, parse_rational

__version__ = "0.1.0"

__all__ = ["Parameters", "ScalingScenario", "State", "parse_rational", "__version__"]
