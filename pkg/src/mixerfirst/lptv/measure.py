"""Measurements on simulated steady states.

Every function accepts either a :class:`PssTrace` or a
:class:`HarmonicResponse`; both expose ``phasor(name, f)``.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .harmonic import harmonic_transfer
from .lo import LoWaveform
from .network import SwitchedNetwork, build_network
from .pss import PssTrace, simulate_pss

# floor reported when the coupled response vanishes numerically
ISOLATION_FLOOR_DB = -300.0


def measure_zin(result, f_rf: float | None = None) -> complex:
    """Source-plane voltage over the current delivered by the source."""
    f = result.f_rf if f_rf is None else f_rf
    v = result.phasor(result.rf_node, f)
    i = (result.source_amplitude - v) / result.r_s
    if i == 0:
        return complex(math.inf)
    return complex(v / i)


def baseband_frequency(f_rf: float, f_lo: float) -> float:
    return abs(f_rf - f_lo)


def differential_output(result, f: float, pair=("out0", "out2")) -> complex:
    return result.phasor(pair[0], f) - result.phasor(pair[1], f)


def measure_conversion_gain(result, f_rf: float | None = None, f_lo: float | None = None) -> float:
    """Differential I output at ``|f_rf - f_lo|`` over source EMF, in dB."""
    f_rf = result.f_rf if f_rf is None else f_rf
    f_lo = result.f_lo if f_lo is None else f_lo
    out = differential_output(result, baseband_frequency(f_rf, f_lo))
    return float(20 * math.log10(abs(out) / result.source_amplitude))


def measure_vds_peak(trace: PssTrace, net: SwitchedNetwork, lo: LoWaveform) -> float:
    """Peak switch voltage while conducting, over source EMF amplitude.

    A switch counts as conducting where its drive is fully on.
    """
    worst = 0.0
    for p, (a, b) in enumerate(net.switch_nodes):
        on = lo.pulse(trace.time + 0.5 * (trace.time[1] - trace.time[0]), p) >= 1.0 - 1e-12
        if not on.any():
            continue
        vds = trace.waveform(a)[on] - trace.waveform(b)[on]
        worst = max(worst, float(np.max(np.abs(vds))))
    return worst / trace.source_amplitude


def isolation_injection() -> dict:
    """Differential current into the I-path baseband capacitors."""
    return {"inj_i": {"bb0": 1.0, "bb2": -1.0}}


def measure_iq_isolation(
    spec,
    lo: LoWaveform | None = None,
    f_bb: float | None = None,
    *,
    engine: str = "pss",
    n_harmonics: int = 41,
    steps_per_period: int = 1024,
) -> float:
    """Q-path over I-path differential baseband response, in dB.

    A differential current tone at ``f_bb`` is injected on the I-path
    baseband capacitors with the antenna EMF off.  The result is the coupled
    Q response relative to the I response at the same frequency, so more
    negative values mean better isolation.
    """
    from .network import lo_for

    lo = lo_for(spec) if lo is None else lo
    f_bb = spec.f_lo / 31.0 if f_bb is None else f_bb
    net = build_network(spec, source=False, injections=isolation_injection())
    if engine == "harmonic":
        res = harmonic_transfer(net, lo, f_bb, n_harmonics, tones={"inj_i": 1.0})
    elif engine == "pss":
        res = simulate_pss(net, lo, f_bb, steps_per_period, tones={"inj_i": (1.0, f_bb)})
    else:
        raise ValueError(f"unknown engine {engine!r}")
    i_out = differential_output(res, f_bb, ("bb0", "bb2"))
    q_out = differential_output(res, f_bb, ("bb1", "bb3"))
    if abs(q_out) == 0:
        return ISOLATION_FLOOR_DB
    return max(float(20 * math.log10(abs(q_out) / abs(i_out))), ISOLATION_FLOOR_DB)
