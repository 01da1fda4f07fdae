"""Synthesis of the matching networks placed between antenna and mixers.

Three strategies are supported:

* a quarter-wave line per I/Q branch (two branches in parallel at the antenna,
  no bridge resistor),
* a fixed L-match per branch (shunt C at the antenna side, series L towards the
  switches), and
* a tunable L-match where the series inductor is in series with a switched
  capacitor, so the pair behaves as a smaller effective inductance.

A :class:`MatchSpec` always describes *one* branch.  The receiver places two
identical branches (I and Q) in parallel at the antenna, so a branch is designed
to transform the switch resistance up to ``2 * r_s``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace

from . import netcore
from .netcore import NetworkError, TwoPort


class MatchKind(str, enum.Enum):
    QUARTER_WAVE = "quarter_wave"
    L_MATCH = "l_match"
    TUNABLE_L_MATCH = "tunable_l_match"


class SynthesisError(NetworkError):
    pass


@dataclass(frozen=True)
class MatchSpec:
    kind: MatchKind
    f_design: float
    z0: float | None = None
    l_ser: float | None = None
    c_sh: float | None = None
    c_ser: float | None = None
    # quarter-wave line loss; frequency independent
    loss_db_per_mm: float = 0.0
    length_mm: float = 0.0
    # None means an ideal inductor
    inductor_q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MatchKind(self.kind))
        if not self.f_design > 0:
            raise SynthesisError("f_design must be > 0")
        needed = {
            MatchKind.QUARTER_WAVE: ("z0",),
            MatchKind.L_MATCH: ("l_ser", "c_sh"),
            MatchKind.TUNABLE_L_MATCH: ("l_ser", "c_sh", "c_ser"),
        }[self.kind]
        for name in needed:
            value = getattr(self, name)
            if value is None or not (value >= 0):
                raise SynthesisError(f"{self.kind.value} requires {name} >= 0, got {value}")
        if self.kind is MatchKind.TUNABLE_L_MATCH and not (
            0 < self.c_ser < math.inf
        ):
            raise SynthesisError("c_ser must be finite and > 0")
        if self.loss_db_per_mm < 0 or self.length_mm < 0:
            raise SynthesisError("line loss and length must be >= 0")
        if self.inductor_q is not None and not self.inductor_q > 0:
            raise SynthesisError("inductor_q must be > 0")

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "MatchSpec":
        fields = {
            "kind", "f_design", "z0", "l_ser", "c_sh", "c_ser",
            "loss_db_per_mm", "length_mm", "inductor_q",
        }
        unknown = set(data) - fields
        if unknown:
            raise SynthesisError(f"unknown match fields: {sorted(unknown)}")
        return cls(**data)


def _omega(f: float) -> float:
    return 2.0 * math.pi * f


def synth_quarter_wave(r_sw: float, r_s: float, f_design: float) -> MatchSpec:
    """Line impedance sqrt(2 r_sw r_s): each branch shows 2 r_s, the pair r_s."""
    if not (r_sw > 0 and r_s > 0):
        raise SynthesisError("resistances must be > 0")
    return MatchSpec(MatchKind.QUARTER_WAVE, f_design, z0=math.sqrt(2.0 * r_sw * r_s))


def l_match_q(r_low: float, r_high: float) -> float:
    return math.sqrt(r_high / r_low - 1.0)


def synth_l_match(r_low: float, r_high: float, f_design: float) -> MatchSpec:
    if not (r_low > 0 and f_design > 0):
        raise SynthesisError("r_low and f_design must be > 0")
    if r_low >= r_high:
        raise SynthesisError("L-match requires upward transformation (r_low < r_high)")
    q = l_match_q(r_low, r_high)
    w = _omega(f_design)
    return MatchSpec(MatchKind.L_MATCH, f_design, l_ser=q * r_low / w, c_sh=q / (w * r_high))


def series_lc_impedance(l_ser: float, c_ser: float, f: float) -> complex:
    """j(wL - 1/(wC)); ``c_ser = inf`` gives the bare inductor."""
    if l_ser < 0 or not c_ser > 0 or not f > 0:
        raise SynthesisError("need l_ser >= 0, c_ser > 0, f > 0")
    w = _omega(f)
    return 1j * (w * l_ser - (0.0 if math.isinf(c_ser) else 1.0 / (w * c_ser)))


def synth_tunable_cap(l_ser: float, l_eff_target: float, f: float) -> float:
    if not l_eff_target > 0:
        raise SynthesisError("target effective inductance must be > 0")
    if l_eff_target >= l_ser:
        raise SynthesisError(
            "no passive capacitor realizes a larger effective inductance "
            f"({l_eff_target:.4g} H >= {l_ser:.4g} H)"
        )
    return 1.0 / (_omega(f) ** 2 * (l_ser - l_eff_target))


def synth_tunable_l_match(
    r_low: float,
    r_high: float,
    f_design: float,
    f_band_low: float,
    headroom: float = 0.1,
) -> MatchSpec:
    """Tunable L-match whose inductor covers the band down to ``f_band_low``.

    The physical inductor is the inductance the fixed L-match needs at the
    band low edge plus ``headroom``; a finite series capacitor then trims it
    to the required effective value anywhere at or above that edge.
    """
    if headroom <= 0:
        raise SynthesisError("headroom must be > 0 so c_ser stays finite")
    if f_design < f_band_low:
        raise SynthesisError("f_design lies below the band low edge")
    edge = synth_l_match(r_low, r_high, f_band_low)
    base = MatchSpec(
        MatchKind.TUNABLE_L_MATCH,
        f_band_low,
        l_ser=edge.l_ser * (1.0 + headroom),
        c_sh=edge.c_sh,
        c_ser=1.0,
    )
    return retune(base, r_low, r_high, f_design)


def retune(spec: MatchSpec, r_low: float, r_high: float, f_new: float) -> MatchSpec:
    """Recompute c_sh and c_ser for ``f_new`` keeping the physical inductor."""
    if spec.kind is not MatchKind.TUNABLE_L_MATCH:
        raise SynthesisError("only tunable L-matches can be retuned")
    target = synth_l_match(r_low, r_high, f_new)
    if target.l_ser >= spec.l_ser:
        raise SynthesisError(
            f"inductor too small for this frequency: need {target.l_ser:.4g} H, "
            f"have {spec.l_ser:.4g} H"
        )
    c_ser = synth_tunable_cap(spec.l_ser, target.l_ser, f_new)
    return replace(spec, f_design=f_new, c_sh=target.c_sh, c_ser=c_ser)


def series_branch_impedance(spec: MatchSpec, f: float) -> complex:
    """Impedance of the series arm (inductor, optional trim cap and loss)."""
    c_ser = spec.c_ser if spec.kind is MatchKind.TUNABLE_L_MATCH else math.inf
    z = series_lc_impedance(spec.l_ser, c_ser, f)
    if spec.inductor_q is not None:
        z += _omega(spec.f_design) * spec.l_ser / spec.inductor_q
    return z


def branch_two_port(spec: MatchSpec, f: float) -> TwoPort:
    """Two-port from the antenna node (port 1) to the switch node (port 2)."""
    if spec.kind is MatchKind.QUARTER_WAVE:
        return netcore.tline(
            spec.z0, f, math.pi / 2, spec.loss_db_per_mm, spec.length_mm, f_ref=spec.f_design
        )
    shunt = netcore.shunt_element(1j * _omega(f) * spec.c_sh)
    return shunt @ netcore.series_element(series_branch_impedance(spec, f))


def divider_input_impedance(
    spec: MatchSpec, f: float, z_load: complex, n_branches: int = 2
) -> complex:
    """Antenna-side impedance of ``n_branches`` identical loaded branches in parallel."""
    return netcore.input_impedance(branch_two_port(spec, f), z_load) / n_branches


def available_gain(port: TwoPort, z_source: complex) -> float:
    """Available power gain of a two-port driven from ``z_source``."""
    z_out = netcore.output_impedance(port, z_source)
    # open-circuit output voltage per unit source EMF
    v_oc = 1.0 / (port.a + port.c * z_source)
    p_out = abs(v_oc) ** 2 / (4.0 * z_out.real) if z_out.real > 0 else 0.0
    p_src = 1.0 / (4.0 * complex(z_source).real)
    return p_out / p_src


def branch_available_gain(spec: MatchSpec, f: float, r_s: float, n_branches: int = 2) -> float:
    """Available gain of one branch when the antenna is shared by all branches.

    Each branch sees the antenna in parallel with the other branches' inputs; by
    symmetry that is equivalent to a source of ``n_branches * r_s`` per branch.
    """
    return available_gain(branch_two_port(spec, f), n_branches * r_s)
