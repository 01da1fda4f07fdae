"""LTI equivalent models of mixer-first receiver front-ends.

The equivalent circuit is: source EMF and ``r_s`` -> optional matching network
-> switch resistance ``r_sw`` -> mixer node.  The mixer node is loaded by the
re-radiation resistance ``r_sh``, the overlap resistance ``r_ol`` and the
feedback amplifier input impedance ``gamma * r_f / (1 + a_ol)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import matchsynth, netcore
from .matchsynth import MatchKind, MatchSpec
from .netcore import parallel

INF = math.inf
GAMMA_4PHASE = 2.0 / math.pi**2
R_REF = 50.0


class Architecture(str, enum.Enum):
    MILLER_MATCHED = "miller_matched"
    SHUNT_RESISTOR = "shunt_resistor"
    PER_PATH_RESISTOR = "per_path_resistor"
    QUARTER_WAVE_DIVIDER = "quarter_wave_divider"
    L_MATCH = "l_match"
    TUNABLE_L_MATCH = "tunable_l_match"

    @property
    def match_kind(self) -> MatchKind | None:
        return {
            Architecture.QUARTER_WAVE_DIVIDER: MatchKind.QUARTER_WAVE,
            Architecture.L_MATCH: MatchKind.L_MATCH,
            Architecture.TUNABLE_L_MATCH: MatchKind.TUNABLE_L_MATCH,
        }.get(self)

    @property
    def split_iq(self) -> bool:
        """True when I and Q switch pairs sit behind separate branches."""
        return self.match_kind is not None


class SpecError(ValueError):
    """A receiver description violates one of its invariants."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ReceiverSpec:
    r_s: float = 50.0
    r_sw: float = 12.0
    r_f: float = 1000.0
    a_ol: float = 10 ** (36 / 20)
    c_bb: float = 2e-12
    f_lo: float = 30e9
    n_phases: int = 4
    duty: float = 0.5
    architecture: Architecture = Architecture.MILLER_MATCHED
    match: MatchSpec | None = None
    # series resistor per switch path (per-path-resistor architecture)
    r_path: float = 50.0
    # shunt resistor at the antenna (shunt-resistor architecture)
    r_shunt: float = 50.0
    r_off: float = 1e6
    rise_frac: float = 0.05
    # overlap-resistance proportionality constant, from calibration
    k_cal: float = 1.0
    a_mixers: float = 1.0
    # input-referred baseband amplifier excess noise factor contribution
    f_bb_excess: float = 0.0
    k_max: int = 15

    def __post_init__(self):
        object.__setattr__(self, "architecture", Architecture(self.architecture))
        for name in ("r_s", "r_sw", "r_f"):
            if not getattr(self, name) > 0:
                raise SpecError(name, f"must be > 0, got {getattr(self, name)}")
        if not self.a_ol >= 0:
            raise SpecError("a_ol", "must be >= 0")
        if not self.c_bb > 0:
            raise SpecError("c_bb", "must be > 0")
        if not self.f_lo > 0:
            raise SpecError("f_lo", "must be > 0")
        if self.n_phases != 4:
            raise SpecError("n_phases", "only 4-phase mixers are supported")
        if not 0 < self.duty <= 0.5:
            raise SpecError("duty", f"must satisfy 0 < duty <= 0.5, got {self.duty}")
        if self.architecture.match_kind is not None:
            if self.match is None:
                raise SpecError("match", f"architecture {self.architecture.value} requires a match")
            if self.match.kind is not self.architecture.match_kind:
                raise SpecError(
                    "match",
                    f"{self.architecture.value} needs a {self.architecture.match_kind.value} match",
                )
        if not 0 <= self.rise_frac < self.duty / 2:
            raise SpecError("rise_frac", "must be >= 0 and leave a flat top")
        if not self.k_cal > 0:
            raise SpecError("k_cal", "must be > 0")
        if self.k_max < 1:
            raise SpecError("k_max", "must be >= 1")

    @property
    def tau_overlap(self) -> float:
        return max(0.0, self.duty - 1.0 / self.n_phases) / self.f_lo

    @property
    def r_amp(self) -> float:
        """Feedback amplifier input impedance referred to the RF side."""
        return miller_input_impedance(GAMMA_4PHASE, self.r_f, self.a_ol)

    @property
    def path_r(self) -> float:
        """Resistance of one switch path."""
        extra = self.r_path if self.architecture is Architecture.PER_PATH_RESISTOR else 0.0
        return self.r_sw + extra

    @property
    def conducting_paths(self) -> float:
        """Average number of paths sharing one RF node at any instant."""
        per_node = 2 if self.architecture.split_iq else self.n_phases
        return max(1.0, per_node * self.duty)

    @property
    def series_r(self) -> float:
        """Series resistance between the RF node and the mixer node."""
        return self.path_r / self.conducting_paths

    def with_(self, **changes) -> "ReceiverSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class LtiEquivalent:
    gamma: float
    r_sh: float
    r_ol: float
    z_in: complex
    a_mn: float
    a_mixers: float
    f_rf: float
    r_amp: float
    z_node: complex
    z_load: complex
    # source impedance seen by one switch pair, looking back to the antenna
    z_source_mixer: complex
    mn_gain: float = 1.0
    extras: dict = field(default_factory=dict)


def miller_input_impedance(gamma: float, r_f: float, a_ol: float) -> float:
    if not r_f > 0 or not a_ol >= 0:
        raise ValueError("need r_f > 0 and a_ol >= 0")
    if math.isinf(a_ol):
        return 0.0
    return gamma * r_f / (1.0 + a_ol)


def lo_fourier_coefficient(k: int, duty: float) -> float:
    """|c_k| of a rectangular 0/1 switching function with the given duty."""
    if k == 0:
        return duty
    return abs(math.sin(math.pi * k * duty)) / (math.pi * abs(k))


def r_sh_estimate(
    front_end_z: Callable[[float], complex],
    f_lo: float,
    k_max: int = 15,
    duty: float = 0.25,
) -> float:
    """Re-radiation resistance: weighted parallel combination over odd harmonics.

    Each odd harmonic ``k`` contributes the conductance Re{1/Z(k f_lo)}
    scaled by ``|c_k / c_1|**2`` of the switching function.  Harmonics that
    the switching function does not produce contribute nothing.
    """
    c1 = lo_fourier_coefficient(1, duty)
    g = 0.0
    for k in range(3, k_max + 1, 2):
        w = (lo_fourier_coefficient(k, duty) / c1) ** 2
        if w < 1e-15:
            continue
        z = complex(front_end_z(k * f_lo))
        if math.isinf(abs(z)):
            continue
        g += w * max((1.0 / z).real, 0.0)
    return INF if g == 0 else 1.0 / g


def r_ol_estimate(r_path: float, f_lo: float, tau_overlap: float, k_cal: float = 1.0) -> float:
    if not r_path > 0 or tau_overlap < 0 or not k_cal > 0:
        raise ValueError("need r_path > 0, tau_overlap >= 0, k_cal > 0")
    if tau_overlap == 0:
        return INF
    return k_cal * r_path / (2.0 * math.pi * f_lo * tau_overlap)


def noise_factor(r_sw: float, r_s: float, r_sh: float = INF, r_ol: float = INF) -> float:
    """Noise factor of the switch/virtual-ground equivalent; baseband noise excluded."""
    return shunt_matched_noise_factor(r_sw, r_s, r_sh, r_ol, r_p=INF)


def shunt_matched_noise_factor(
    r_ser: float, r_s: float, r_sh: float = INF, r_ol: float = INF, r_p: float = INF
) -> float:
    """Noise factor with an optional shunt resistor ``r_p`` across the antenna.

    Series resistance ``r_ser`` feeds a virtual ground that is shunted by the
    noisy resistors ``r_sh`` and ``r_ol``.  With ``r_p = inf`` this is exactly
    ``1 + r_ser/r_s + (r_s + r_ser)**2 / (r_s r_sh) + (r_s + r_ser)**2 / (r_s r_ol)``.
    """
    if math.isinf(r_p):
        r_th, k = r_s, 1.0
    else:
        r_th, k = r_s * r_p / (r_s + r_p), r_p / (r_s + r_p)
    # everything below is normalised to the source's own output noise power
    f = 1.0
    if not math.isinf(r_p):
        f += r_s / r_p
    f += r_ser / (r_s * k * k)
    for r in (r_sh, r_ol):
        if not math.isinf(r):
            f += (r_th + r_ser) ** 2 / (r * r_s * k * k)
    return f


def nf_db(f: float) -> float:
    return 10.0 * math.log10(f)


def vds_ratio(r_sw: float, r_s: float) -> float:
    return 0.5 * math.sqrt(r_sw / (2.0 * r_s))


def iip3_cascade(a_mn: float, a_mixers: float, v_iip3_mixer: float, v_iip3_bb: float) -> float:
    inv = 0.0
    if not math.isinf(v_iip3_mixer):
        inv += (a_mn / v_iip3_mixer) ** 2
    if not math.isinf(v_iip3_bb):
        inv += (a_mn * a_mixers / v_iip3_bb) ** 2
    return INF if inv == 0 else 1.0 / math.sqrt(inv)


def volts_to_dbm(v_peak: float, r_ref: float = R_REF) -> float:
    """Sinusoidal peak voltage across ``r_ref`` expressed in dBm."""
    return 10.0 * math.log10(v_peak**2 / (2.0 * r_ref) / 1e-3)


def dbm_to_volts(p_dbm: float, r_ref: float = R_REF) -> float:
    return math.sqrt(2.0 * r_ref * 1e-3 * 10 ** (p_dbm / 10.0))


# --- front-end views -------------------------------------------------------


def _branch_source_impedance(spec: ReceiverSpec, f: float) -> complex:
    """Impedance a switch node sees looking back towards the antenna."""
    arch = spec.architecture
    if arch.split_iq:
        port = matchsynth.branch_two_port(spec.match, f)
        # the other branch is driven in phase, so each sees 2 r_s
        return netcore.output_impedance(port, 2.0 * spec.r_s)
    if arch is Architecture.SHUNT_RESISTOR:
        return parallel(spec.r_s, spec.r_shunt)
    return complex(spec.r_s)


def iq_path_impedance(spec: ReceiverSpec, f: float) -> complex:
    """Impedance between the I and Q switch nodes through the front end."""
    if not spec.architecture.split_iq:
        return 0j
    y = netcore.y_params(matchsynth.branch_two_port(spec.match, f))
    # three-node network: antenna node (with r_s) shared by two identical branches
    ya = 2 * y[0, 0] + 1.0 / spec.r_s
    # node order: antenna, I, Q
    ymat = np.array(
        [
            [ya, y[0, 1], y[0, 1]],
            [y[1, 0], y[1, 1], 0],
            [y[1, 0], 0, y[1, 1]],
        ],
        dtype=complex,
    )
    v = np.linalg.solve(ymat, np.array([0, 1, -1], dtype=complex))
    return complex(v[1] - v[2])


def overlap_path_resistance(spec: ReceiverSpec, f: float | None = None) -> float:
    f = spec.f_lo if f is None else f
    return 2.0 * spec.path_r


def mixer_gain_factor(spec: ReceiverSpec) -> float:
    """Differential I baseband current per unit RF current into a switch node."""
    d = spec.duty
    share = max(1.0, (2.0 if spec.architecture.split_iq else 4.0) * d)
    return 2.0 * math.sin(math.pi * d) / math.pi / share


def build_lti(spec: ReceiverSpec, f_rf: float | None = None) -> LtiEquivalent:
    f_rf = spec.f_lo if f_rf is None else f_rf
    arch = spec.architecture
    r_ser = spec.series_r

    def seen_from_mixer(f):
        return _branch_source_impedance(spec, f) + r_ser

    r_sh = r_sh_estimate(seen_from_mixer, spec.f_lo, spec.k_max, spec.duty)
    r_ol = r_ol_estimate(overlap_path_resistance(spec), spec.f_lo, spec.tau_overlap, spec.k_cal)
    r_amp = spec.r_amp
    z_node = parallel(r_amp, r_sh, r_ol)
    z_load = r_ser + z_node
    z_src = _branch_source_impedance(spec, f_rf)

    if arch.split_iq:
        port = matchsynth.branch_two_port(spec.match, f_rf)
        z_in = matchsynth.divider_input_impedance(spec.match, f_rf, z_load)
        a_mn = abs(z_load / (port.a * z_load + port.b))
        g_mn = matchsynth.branch_available_gain(spec.match, f_rf, spec.r_s)
    else:
        z_in = z_load
        if arch is Architecture.SHUNT_RESISTOR:
            z_in = parallel(z_load, spec.r_shunt)
        a_mn, g_mn = 1.0, 1.0
    return LtiEquivalent(
        gamma=GAMMA_4PHASE,
        r_sh=r_sh,
        r_ol=r_ol,
        z_in=complex(z_in),
        a_mn=float(a_mn),
        a_mixers=spec.a_mixers,
        f_rf=f_rf,
        r_amp=r_amp,
        z_node=complex(z_node),
        z_load=complex(z_load),
        z_source_mixer=complex(z_src),
        mn_gain=float(g_mn),
    )


def effective_load(spec: ReceiverSpec, f: float | None = None) -> float:
    """Resistance the matching network must present the antenna to."""
    return build_lti(spec, f).z_load.real


def design_match(
    spec: ReceiverSpec,
    f_design: float | None = None,
    f_band_low: float | None = None,
    n_iter: int = 8,
    **match_kw,
) -> ReceiverSpec:
    """Synthesize the architecture's branch network for the actual mixer load.

    The load includes the reflected amplifier impedance and the overlap and
    re-radiation resistances, which themselves depend on the network, so the
    synthesis is iterated to a fixed point.
    """
    kind = spec.architecture.match_kind
    if kind is None:
        return spec
    f_design = spec.f_lo if f_design is None else f_design
    # start from the bare switch resistance
    r_load = spec.series_r
    current = spec
    for _ in range(n_iter):
        r_high = 2.0 * spec.r_s
        if kind is MatchKind.QUARTER_WAVE:
            m = matchsynth.synth_quarter_wave(r_load, spec.r_s, f_design)
            m = replace(m, **match_kw)
        elif kind is MatchKind.L_MATCH:
            m = replace(matchsynth.synth_l_match(r_load, r_high, f_design), **match_kw)
        elif f_band_low is None and spec.match is not None and spec.match.kind is kind:
            # keep the physical inductor, retune the capacitors
            m = matchsynth.retune(spec.match, r_load, r_high, f_design)
        else:
            m = matchsynth.synth_tunable_l_match(r_load, r_high, f_design, f_band_low or f_design)
            m = replace(m, **match_kw)
        current = replace(spec, match=m)
        new_load = effective_load(current, f_design)
        if abs(new_load - r_load) <= 1e-12 * r_load:
            break
        r_load = new_load
    return current


def noise_factor_arch(spec: ReceiverSpec, f_rf: float | None = None, lti: LtiEquivalent | None = None) -> float:
    """Architecture-level noise factor from the LTI equivalent.

    Direct-connected front ends are analysed exactly with the series/shunt
    ladder.  Matched front ends use the matched-network expression, divided
    by the mismatch factor at the switch plane and cascaded behind the
    network's own loss.
    """
    lti = build_lti(spec, f_rf) if lti is None else lti
    arch = spec.architecture
    if arch is Architecture.SHUNT_RESISTOR:
        f = shunt_matched_noise_factor(spec.series_r, spec.r_s, lti.r_sh, lti.r_ol, spec.r_shunt)
    elif not arch.split_iq:
        f = noise_factor(spec.series_r, spec.r_s, lti.r_sh, lti.r_ol)
    else:
        f_core = noise_factor(spec.r_sw, spec.r_s, lti.r_sh, lti.r_ol)
        zs, zl = lti.z_source_mixer, lti.z_load
        gamma = (zl - zs.conjugate()) / (zl + zs)
        mismatch = max(1.0 - abs(gamma) ** 2, 1e-12)
        g = max(lti.mn_gain, 1e-12)
        f = 1.0 / g + (f_core - 1.0) / (g * mismatch)
    return f + spec.f_bb_excess


def conversion_gain_lti(spec: ReceiverSpec, lti: LtiEquivalent | None = None, f_rf: float | None = None) -> float:
    """Baseband differential output over source EMF, in dB.

    Chain: antenna divider E * z_in / (z_in + r_s) -> matching-network voltage
    gain a_mn -> switch-node current V / z_load -> fraction z_node / r_amp of
    that current reaches the amplifier -> commutation to the differential I
    output -> transimpedance r_f * A / (1 + A).
    """
    lti = build_lti(spec, f_rf) if lti is None else lti
    v_in = lti.z_in / (lti.z_in + spec.r_s)
    v_sw = abs(v_in) * lti.a_mn
    i_sw = v_sw / abs(lti.z_load)
    if spec.a_ol == 0:
        # the output is -A times the node voltage: nothing reaches it
        return -math.inf
    # share of the node current that reaches the amplifier, z_node / r_amp,
    # written so the virtual-ground limit r_amp = 0 stays finite
    share = 1.0 / abs(1.0 + spec.r_amp / lti.r_sh + spec.r_amp / lti.r_ol)
    i_amp = i_sw * share
    trans = spec.r_f / (1.0 + 1.0 / spec.a_ol)
    out = i_amp * mixer_gain_factor(spec) * spec.a_mixers * trans
    return float(20 * math.log10(out))


def receiver_iip3(
    spec: ReceiverSpec, v_iip3_mixer: float, v_iip3_bb: float, f_rf: float | None = None
) -> float:
    lti = build_lti(spec, f_rf)
    return iip3_cascade(lti.a_mn, lti.a_mixers, v_iip3_mixer, v_iip3_bb)
