"""TOML sweep configurations.

Frequencies are given in GHz, capacitances in pF and inductances in nH; the
loaded objects use SI units.  A minimal file::

    [receiver]
    architecture = "miller_matched"

    [sweep]
    start_ghz = 25
    stop_ghz = 40
    points = 16
    metrics = ["nf_db", "gain_db", "s11_db", "zin"]

Matched architectures also need a ``[match]`` table.  ``[[variant]]`` tables
override receiver and match keys to put several receivers in one sweep.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .. import matchsynth
from ..matchsynth import MatchKind, MatchSpec, SynthesisError
from ..netcore import FrequencyGrid, NetworkError
from ..rxmodel import Architecture, ReceiverSpec, SpecError

METRICS = ("nf_db", "gain_db", "s11_db", "zin", "iip3_dbm", "vds_ratio", "iq_isolation_db")
ORACLE_MODES = ("off", "verify", "full")
FORMATS = ("csv", "json", "svg", "s1p")

_RECEIVER_KEYS = {
    "r_s": 1.0, "r_sw": 1.0, "r_f": 1.0, "a_ol": 1.0, "c_bb_pf": 1e-12, "f_lo_ghz": 1e9,
    "duty": 1.0, "n_phases": 1, "r_path": 1.0, "r_shunt": 1.0, "r_off": 1.0,
    "rise_frac": 1.0, "a_mixers": 1.0, "f_bb_excess": 1.0, "k_max": 1,
}
_MATCH_VALUES = {
    "z0_ohm": ("z0", 1.0), "l_ser_nh": ("l_ser", 1e-9), "c_sh_pf": ("c_sh", 1e-12),
    "c_ser_pf": ("c_ser", 1e-12), "loss_db_per_mm": ("loss_db_per_mm", 1.0),
    "length_mm": ("length_mm", 1.0), "inductor_q": ("inductor_q", 1.0),
}
_MATCH_KEYS = set(_MATCH_VALUES) | {"kind", "f_design_ghz", "f_band_low_ghz", "auto"}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class MatchPlan:
    """How to obtain the matching network for a receiver."""

    kind: MatchKind
    f_design: float
    auto: bool = True
    f_band_low: float | None = None
    # element values (SI) when not synthesized, plus fixed options
    values: tuple = ()

    def options(self) -> dict:
        return dict(self.values)


@dataclass(frozen=True)
class Variant:
    name: str
    receiver: ReceiverSpec
    match: MatchPlan | None = None
    # True: fit k_cal against the oracle before sweeping
    calibrate: bool = False


@dataclass(frozen=True)
class SweepConfig:
    variants: tuple
    grid: FrequencyGrid
    metrics: tuple
    oracle: str = "off"
    lo_tracks_rf: bool = True
    iip3_mixer_dbm: float | None = None
    iip3_bb_dbm: float | None = None
    formats: tuple = ("csv", "json")
    stem: str = "sweep"
    source: Path | None = None
    notes: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def receiver(self) -> ReceiverSpec:
        return self.variants[0].receiver


def _number(table: dict, key: str, where: str, kind=float):
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {value!r}")
    value = kind(value)
    if kind is float and math.isnan(value):
        raise ConfigError(f"{where}.{key}", "NaN is not allowed")
    return value


def _receiver(table: dict, where: str) -> tuple[dict, bool]:
    kw: dict = {}
    calibrate = False
    for key in table:
        if key in _RECEIVER_KEYS:
            kind = int if key in ("n_phases", "k_max") else float
            value = _number(table, key, where, kind)
            name = key.removesuffix("_pf").removesuffix("_ghz")
            kw[name] = value * _RECEIVER_KEYS[key] if kind is float else value
        elif key == "a_ol_db":
            kw["a_ol"] = 10 ** (_number(table, key, where) / 20.0)
        elif key == "architecture":
            try:
                kw["architecture"] = Architecture(table[key])
            except ValueError:
                options = ", ".join(a.value for a in Architecture)
                raise ConfigError(f"{where}.architecture", f"must be one of {options}") from None
        elif key == "k_cal":
            if table[key] == "auto":
                calibrate = True
            else:
                kw["k_cal"] = _number(table, key, where)
        elif key in ("name", "match"):
            continue
        else:
            raise ConfigError(f"{where}.{key}", "unknown key")
    if "a_ol" in table and "a_ol_db" in table:
        raise ConfigError(f"{where}.a_ol", "give either a_ol or a_ol_db, not both")
    return kw, calibrate


def _match_plan(table: dict, where: str, arch: Architecture) -> MatchPlan:
    for key in table:
        if key not in _MATCH_KEYS:
            raise ConfigError(f"{where}.{key}", "unknown key")
    want = arch.match_kind
    try:
        kind = MatchKind(table.get("kind", want.value))
    except ValueError:
        raise ConfigError(f"{where}.kind", f"unknown match kind {table['kind']!r}") from None
    if kind is not want:
        raise ConfigError(f"{where}.kind", f"{arch.value} needs a {want.value} match")
    if "f_design_ghz" not in table:
        raise ConfigError(f"{where}.f_design_ghz", "required")
    f_design = _number(table, "f_design_ghz", where) * 1e9
    values = {}
    for key, (name, scale) in _MATCH_VALUES.items():
        if key in table:
            values[name] = _number(table, key, where) * scale
    element_keys = {"z0", "l_ser", "c_sh", "c_ser"}
    auto = table.get("auto", not (element_keys & set(values)))
    if not isinstance(auto, bool):
        raise ConfigError(f"{where}.auto", "expected true or false")
    f_band_low = None
    if "f_band_low_ghz" in table:
        f_band_low = _number(table, "f_band_low_ghz", where) * 1e9
    if not auto:
        try:
            MatchSpec(kind, f_design, **values)
        except SynthesisError as exc:
            raise ConfigError(where, str(exc)) from None
    elif element_keys & set(values):
        raise ConfigError(where, "element values cannot be combined with auto = true")
    return MatchPlan(kind, f_design, auto, f_band_low, tuple(sorted(values.items())))


def _placeholder_match(plan: MatchPlan, spec_kw: dict) -> MatchSpec:
    """A valid network of the right kind so the ReceiverSpec can be validated before synthesis."""
    if not plan.auto:
        return MatchSpec(plan.kind, plan.f_design, **plan.options())
    r_sw = spec_kw.get("r_sw", 12.0)
    r_s = spec_kw.get("r_s", 50.0)
    if plan.kind is MatchKind.QUARTER_WAVE:
        return matchsynth.synth_quarter_wave(r_sw, r_s, plan.f_design)
    if plan.kind is MatchKind.L_MATCH:
        return matchsynth.synth_l_match(r_sw, 2 * r_s, plan.f_design)
    low = plan.f_band_low or plan.f_design
    return matchsynth.synth_tunable_l_match(r_sw, 2 * r_s, plan.f_design, low)


def _variant(name: str, rx: dict, match: dict | None, where: str) -> Variant:
    kw, calibrate = _receiver(rx, where)
    arch = kw.get("architecture", Architecture.MILLER_MATCHED)
    plan = None
    if arch.match_kind is not None:
        if match is None:
            raise ConfigError(f"{where}.match", f"architecture {arch.value} requires a [match] table")
        plan = _match_plan(match, f"{where}.match", arch)
        try:
            kw["match"] = _placeholder_match(plan, kw)
        except (SynthesisError, NetworkError) as exc:
            raise ConfigError(f"{where}.match", str(exc)) from None
    elif match is not None:
        raise ConfigError(f"{where}.match", f"architecture {arch.value} takes no matching network")
    try:
        spec = ReceiverSpec(**kw)
    except SpecError as exc:
        raise ConfigError(f"{where}.{exc.field}", str(exc).split(": ", 1)[1]) from None
    return Variant(name, spec, plan, calibrate)


def _grid(table: dict) -> FrequencyGrid:
    where = "sweep"
    if "freqs_ghz" in table:
        if any(k in table for k in ("start_ghz", "stop_ghz", "points")):
            raise ConfigError("sweep.freqs_ghz", "use either freqs_ghz or start/stop/points")
        values = table["freqs_ghz"]
        if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
        ):
            raise ConfigError("sweep.freqs_ghz", "expected a list of numbers")
        try:
            return FrequencyGrid.from_ghz(values)
        except NetworkError as exc:
            raise ConfigError("sweep.freqs_ghz", str(exc)) from None
    for key in ("start_ghz", "stop_ghz", "points"):
        if key not in table:
            raise ConfigError(f"{where}.{key}", "required (or give freqs_ghz)")
    points = _number(table, "points", where, int)
    start = _number(table, "start_ghz", where)
    stop = _number(table, "stop_ghz", where)
    if points < 1:
        raise ConfigError("sweep.points", "must be >= 1")
    if points == 1 and start != stop:
        raise ConfigError("sweep.points", "a single point needs start_ghz == stop_ghz")
    try:
        return FrequencyGrid.from_ghz(list(dict.fromkeys(float(v) for v in _linspace(start, stop, points))))
    except NetworkError as exc:
        raise ConfigError("sweep", str(exc)) from None


def _linspace(start, stop, n):
    if n == 1:
        return [start]
    return [start + (stop - start) * i / (n - 1) for i in range(n)]


def parse_config(data: dict, source: Path | None = None) -> SweepConfig:
    known = {"receiver", "match", "sweep", "variant", "iip3", "emit", "notes"}
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown table")
    base_rx = data.get("receiver", {})
    base_match = data.get("match")
    sweep = data.get("sweep")
    if sweep is None:
        raise ConfigError("sweep", "missing [sweep] table")
    for key in sweep:
        if key not in {"start_ghz", "stop_ghz", "points", "freqs_ghz", "metrics", "oracle", "lo_tracks_rf"}:
            raise ConfigError(f"sweep.{key}", "unknown key")
    grid = _grid(sweep)
    metrics = sweep.get("metrics", [])
    if not isinstance(metrics, list) or not metrics:
        raise ConfigError("sweep.metrics", "at least one metric is required")
    for m in metrics:
        if m not in METRICS:
            raise ConfigError("sweep.metrics", f"unknown metric {m!r}; choose from {', '.join(METRICS)}")
    oracle = sweep.get("oracle", "off")
    if oracle not in ORACLE_MODES:
        raise ConfigError("sweep.oracle", f"must be one of {', '.join(ORACLE_MODES)}")
    lo_tracks = sweep.get("lo_tracks_rf", True)
    if not isinstance(lo_tracks, bool):
        raise ConfigError("sweep.lo_tracks_rf", "expected true or false")

    variants = []
    tables = data.get("variant")
    if tables is None:
        variants.append(_variant("receiver", base_rx, base_match, "receiver"))
    else:
        if not isinstance(tables, list) or not tables:
            raise ConfigError("variant", "expected an array of tables")
        names = set()
        for i, tbl in enumerate(tables):
            name = tbl.get("name", f"variant{i}")
            if not isinstance(name, str) or not name.replace("_", "").replace("-", "").isalnum():
                raise ConfigError(f"variant[{i}].name", "use letters, digits, '-' and '_'")
            if name in names:
                raise ConfigError(f"variant[{i}].name", f"duplicate name {name!r}")
            names.add(name)
            rx = {**base_rx, **{k: v for k, v in tbl.items() if k != "match"}}
            arch_value = rx.get("architecture", Architecture.MILLER_MATCHED.value)
            needs_match = arch_value in {a.value for a in Architecture} and (
                Architecture(arch_value).match_kind is not None
            )
            match = tbl.get("match", base_match if needs_match else None)
            variants.append(_variant(name, rx, match, f"variant[{i}]"))

    iip3 = data.get("iip3", {})
    for key in iip3:
        if key not in ("mixer_dbm", "bb_dbm"):
            raise ConfigError(f"iip3.{key}", "unknown key")
    mixer = _number(iip3, "mixer_dbm", "iip3") if "mixer_dbm" in iip3 else None
    bb = _number(iip3, "bb_dbm", "iip3") if "bb_dbm" in iip3 else None
    if "iip3_dbm" in metrics and mixer is None and bb is None:
        raise ConfigError("iip3", "metric iip3_dbm needs mixer_dbm and/or bb_dbm")

    emit = data.get("emit", {})
    for key in emit:
        if key not in ("formats", "stem"):
            raise ConfigError(f"emit.{key}", "unknown key")
    formats = emit.get("formats", ["csv", "json"])
    if not isinstance(formats, list) or not formats or any(f not in FORMATS for f in formats):
        raise ConfigError("emit.formats", f"choose from {', '.join(FORMATS)}")
    stem = emit.get("stem", "sweep")
    if not isinstance(stem, str) or not stem:
        raise ConfigError("emit.stem", "expected a non-empty string")
    if "s1p" in formats and not {"s11_db", "zin"} & set(metrics):
        raise ConfigError("emit.formats", "s1p output needs the s11_db or zin metric")
    notes = data.get("notes", "")
    if not isinstance(notes, str):
        raise ConfigError("notes", "expected a string")

    return SweepConfig(
        variants=tuple(variants),
        grid=grid,
        metrics=tuple(metrics),
        oracle=oracle,
        lo_tracks_rf=lo_tracks,
        iip3_mixer_dbm=mixer,
        iip3_bb_dbm=bb,
        formats=tuple(formats),
        stem=stem,
        source=source,
        notes=notes,
    )


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror or exc}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"TOML parse error: {exc}") from None
    return parse_config(data, path)
