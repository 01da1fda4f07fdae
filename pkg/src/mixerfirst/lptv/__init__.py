"""Switched-network oracles: trapezoidal time stepping and conversion matrices."""
from .harmonic import HarmonicResponse, SingularHarmonicSystem, harmonic_transfer
from .kernel import COMPILED
from .lo import LoWaveform
from .measure import (
    measure_conversion_gain,
    measure_iq_isolation,
    measure_vds_peak,
    measure_zin,
)
from .network import Netlist, SwitchedNetwork, build_network, lo_for
from .pss import NonConvergence, NotCommensurate, PssTrace, SimulationError, simulate_pss

__all__ = [
    "COMPILED",
    "HarmonicResponse",
    "LoWaveform",
    "Netlist",
    "NonConvergence",
    "NotCommensurate",
    "PssTrace",
    "SimulationError",
    "SingularHarmonicSystem",
    "SwitchedNetwork",
    "build_network",
    "harmonic_transfer",
    "lo_for",
    "measure_conversion_gain",
    "measure_iq_isolation",
    "measure_vds_peak",
    "measure_zin",
    "simulate_pss",
]
