"""Fitting the overlap-resistance constant against the switched-network oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .. import rxmodel
from ..matchsynth import MatchKind
from ..netcore import FrequencyGrid
from ..rxmodel import ReceiverSpec
from ..lptv import build_network, harmonic_transfer, lo_for, measure_conversion_gain, measure_zin

K_BOUNDS = (1e-3, 1e3)
# baseband offset of the oracle tone: f_rf = f_lo (1 + 1/IF_DIVISOR)
IF_DIVISOR = 31


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class OraclePoint:
    f_lo: float
    f_rf: float
    z_in: complex
    gain_db: float


@dataclass(frozen=True)
class CalibrationResult:
    k_cal: float
    # RMS of the relative fit errors over all points
    residual: float
    points: tuple
    lti_z_in: tuple
    lti_gain_db: tuple
    # False when the LTI model does not depend on k_cal at all
    identifiable: bool = True


def oracle_frequency(f_lo: float, f: float | None = None, max_den: int = 64) -> float:
    """Commensurate RF frequency for the oracle near ``f`` (default just above ``f_lo``)."""
    if f is None:
        return f_lo * (1 + 1 / IF_DIVISOR)
    ratio = Fraction(f / f_lo).limit_denominator(max_den)
    if ratio.denominator == 1 or 2 * ratio == round(2 * ratio):
        ratio = Fraction(1) + Fraction(1, IF_DIVISOR)
    return f_lo * float(ratio)


def default_spec_at(spec: ReceiverSpec, f: float) -> ReceiverSpec:
    """Receiver tuned to ``f``: LO follows, a tunable network is retuned."""
    tuned = spec.with_(f_lo=f)
    if spec.match is not None and spec.match.kind is MatchKind.TUNABLE_L_MATCH:
        tuned = rxmodel.design_match(tuned, f)
    return tuned


def oracle_point(spec: ReceiverSpec, n_harmonics: int = 41, rise_time: float | None = 0.0) -> OraclePoint:
    """Conversion-matrix solution just above the LO; ideal switches by default."""
    f_rf = oracle_frequency(spec.f_lo)
    res = harmonic_transfer(build_network(spec), lo_for(spec, rise_time), f_rf, n_harmonics)
    return OraclePoint(spec.f_lo, f_rf, measure_zin(res), measure_conversion_gain(res))


def _errors(specs, points, k):
    z, g, e = [], [], []
    for spec, p in zip(specs, points):
        s = spec.with_(k_cal=k)
        lti = rxmodel.build_lti(s, p.f_rf)
        gain = rxmodel.conversion_gain_lti(s, lti)
        z.append(lti.z_in)
        g.append(gain)
        e.append((lti.z_in.real - p.z_in.real) / abs(p.z_in))
        e.append((gain - p.gain_db) * math.log(10) / 20)
    return np.array(e), z, g


def calibrate_r_ol(
    spec: ReceiverSpec,
    f_points: FrequencyGrid,
    *,
    n_harmonics: int = 41,
    rise_time: float | None = 0.0,
    spec_at: Callable[[ReceiverSpec, float], ReceiverSpec] = default_spec_at,
) -> CalibrationResult:
    """Least-squares fit of ``k_cal`` to the oracle's overlap loading.

    At every point the receiver is tuned to ``f`` and solved by the
    conversion-matrix oracle just above the LO.  ``k_cal`` is chosen so the
    LTI model reproduces the oracle's input resistance and conversion loss;
    both only feel the overlap through R_OL.  The oracle switches are ideal
    unless ``rise_time`` is given (None takes the receiver's own edge), since the
    LTI model has no term for finite edges.  The residual is the RMS of the
    relative resistance errors and the gain errors in nepers.
    """
    if spec.tau_overlap == 0:
        raise CalibrationError("no overlap to calibrate (duty must exceed 1/n_phases)")
    specs = [spec_at(spec, f) for f in f_points]
    points = [oracle_point(s, n_harmonics, rise_time) for s in specs]

    def cost(log_k):
        e, _, _ = _errors(specs, points, math.exp(log_k))
        return float(np.sum(e**2))

    lo, hi = (math.log(b) for b in K_BOUNDS)
    fit = minimize_scalar(cost, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    k = math.exp(fit.x)
    e, z, g = _errors(specs, points, k)
    flat = abs(cost(lo) - cost(hi)) <= 1e-12 * max(cost(lo), 1e-300)
    return CalibrationResult(
        k_cal=k,
        residual=float(math.sqrt(np.mean(e**2))),
        points=tuple(points),
        lti_z_in=tuple(z),
        lti_gain_db=tuple(g),
        identifiable=not flat,
    )


def calibrated_design(
    spec: ReceiverSpec,
    f_design: float,
    f_points: FrequencyGrid,
    *,
    f_band_low: float | None = None,
    iterations: int = 4,
    n_harmonics: int = 41,
    match_kw: dict | None = None,
) -> tuple[ReceiverSpec, CalibrationResult | None]:
    """Alternate matching-network synthesis and ``k_cal`` fitting.

    The network is designed for the LTI load, which depends on ``k_cal``,
    and the fit depends on the network; a few rounds settle both.
    """
    match_kw = match_kw or {}

    def design(s):
        if s.architecture.match_kind is None:
            return s
        return rxmodel.design_match(s.with_(f_lo=f_design), f_design, f_band_low, **match_kw)

    current = design(spec)
    if current.tau_overlap == 0:
        return current, None
    result = None
    for _ in range(iterations):
        result = calibrate_r_ol(current, f_points, n_harmonics=n_harmonics)
        changed = abs(result.k_cal / current.k_cal - 1.0) > 1e-3
        current = design(current.with_(k_cal=result.k_cal))
        if not changed:
            break
    return current, result
