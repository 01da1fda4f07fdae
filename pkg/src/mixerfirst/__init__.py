"""Mixer-first receiver front ends with matching networks.

Submodules: :mod:`netcore` (two-port algebra), :mod:`matchsynth` (matching
network synthesis), :mod:`rxmodel` (LTI receiver models), :mod:`lptv`
(switched-network oracles) and :mod:`sweepcli` (configs, sweeps, reports).
"""
__version__ = "0.1.0"
