import json
import math
import re

import pytest

from mixerfirst import netcore, rxmodel
from mixerfirst.netcore import FrequencyGrid
from mixerfirst.rxmodel import Architecture, ReceiverSpec
from mixerfirst.sweepcli import cli
from mixerfirst.sweepcli.calibrate import CalibrationError, calibrate_r_ol
from mixerfirst.sweepcli.config import ConfigError, load_config, parse_config
from mixerfirst.sweepcli.emit import emit, read_csv, series_csv, to_json, to_svg
from mixerfirst.sweepcli.sweep import VERIFY_ZIN_TOL, prepare_variant, run_sweep

LMATCH_TOML = """
[receiver]
architecture = "l_match"
duty = 0.5
rise_frac = 0.0

[match]
f_design_ghz = 30.0

[sweep]
start_ghz = 28.0
stop_ghz = 32.0
points = 3
metrics = ["nf_db", "gain_db", "s11_db", "zin"]
"""


# tunable network built for 35 GHz and up; 28 GHz is out of its reach
TUNABLE_NARROW = (
    LMATCH_TOML.replace('"l_match"', '"tunable_l_match"')
    .replace("f_design_ghz = 30.0", "f_design_ghz = 35.0\nf_band_low_ghz = 35.0")
    .replace("stop_ghz = 32.0", "stop_ghz = 38.0")
)


def cfg_from(text, tmp_path, name="c.toml"):
    path = tmp_path / name
    path.write_text(text)
    return load_config(path)


def base(**sweep):
    data = {
        "receiver": {"architecture": "miller_matched"},
        "sweep": {"start_ghz": 25.0, "stop_ghz": 40.0, "points": 4, "metrics": ["nf_db"]},
    }
    data["sweep"].update(sweep)
    return data


class TestConfig:
    def test_minimal(self):
        cfg = parse_config(base())
        assert len(cfg.grid) == 4 and cfg.metrics == ("nf_db",)
        assert cfg.receiver.architecture is Architecture.MILLER_MATCHED

    def test_duty_error_names_field(self):
        data = base()
        data["receiver"]["duty"] = 0.6
        with pytest.raises(ConfigError) as exc:
            parse_config(data)
        assert "duty" in exc.value.field

    def test_missing_match_rejected(self):
        data = base()
        data["receiver"]["architecture"] = "quarter_wave_divider"
        with pytest.raises(ConfigError, match="match"):
            parse_config(data)

    def test_empty_metrics_rejected(self):
        with pytest.raises(ConfigError, match="metric"):
            parse_config(base(metrics=[]))

    def test_unknown_key_rejected(self):
        data = base()
        data["receiver"]["r_sww"] = 3
        with pytest.raises(ConfigError, match="r_sww"):
            parse_config(data)

    def test_units(self):
        data = base()
        data["receiver"].update(c_bb_pf=3.0, f_lo_ghz=28.0)
        rx = parse_config(data).receiver
        assert rx.c_bb == pytest.approx(3e-12) and rx.f_lo == pytest.approx(28e9)

    def test_all_presets_load(self):
        for name in cli.preset_names():
            cfg = load_config(cli.preset_path(name))
            assert cfg.variants and all(v.calibrate for v in cfg.variants)

    def test_bad_toml(self, tmp_path):
        with pytest.raises(ConfigError, match="TOML"):
            cfg_from("[receiver\n", tmp_path)


class TestSweep:
    def test_point_equals_direct_model(self, tmp_path):
        cfg = cfg_from(LMATCH_TOML, tmp_path)
        result = run_sweep(cfg)
        spec, _ = prepare_variant(cfg.variants[0])
        for row, f in zip(result.rows, cfg.grid):
            s = spec.with_(f_lo=f)
            lti = rxmodel.build_lti(s, f)
            assert row["nf_db"] == rxmodel.nf_db(rxmodel.noise_factor_arch(s, f, lti))
            assert row["gain_db"] == rxmodel.conversion_gain_lti(s, lti)
            assert row["s11_db"] == float(netcore.db20(netcore.s11(lti.z_in, 50.0)))
            assert complex(row["zin_re_ohm"], row["zin_im_ohm"]) == lti.z_in

    def test_parallel_equals_serial(self, tmp_path):
        cfg = cfg_from(LMATCH_TOML, tmp_path)
        assert run_sweep(cfg, jobs=1).rows == run_sweep(cfg, jobs=3).rows

    def test_verify_within_tolerance(self, tmp_path):
        cfg = cfg_from(LMATCH_TOML.replace('duty = 0.5', 'duty = 0.5\nk_cal = "auto"'), tmp_path)
        result = run_sweep(cfg, oracle="verify")
        assert not result.failed
        assert all(r["dzin_rel"] <= VERIFY_ZIN_TOL for r in result.rows)

    def test_failing_point_is_reported(self, tmp_path):
        # a retuned network cannot reach below its band edge
        text = TUNABLE_NARROW
        result = run_sweep(cfg_from(text, tmp_path))
        assert result.failed
        assert "inductor too small" in result.rows[0]["error"]
        assert "nf_db" not in result.rows[0]
        assert result.rows[2]["error"] == ""

    def test_tunable_preset_flat_over_band(self):
        # the measured NF spans 6.8 to 7.5 dB over 25-40 GHz; only the flatness is modelled
        result = run_sweep(load_config(cli.preset_path("tunable_25_40")))
        nf = [r["nf_db"] for r in result.rows]
        assert len(nf) == 16 and max(nf) - min(nf) <= 0.7


@pytest.fixture(scope="module")
def result(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "two.toml"
    path.write_text(
        LMATCH_TOML + '\n[[variant]]\nname = "a"\n\n[[variant]]\nname = "b"\nr_sw = 6.0\n'
    )
    return run_sweep(load_config(path))


class TestEmit:
    def test_csv_round_trip(self, result, tmp_path):
        paths = emit(result, tmp_path, ("csv",), "x")
        assert [p.name for p in paths] == ["x_a.csv", "x_b.csv"]
        back = read_csv(paths[1])
        for got, row in zip(back, result.series[1].rows):
            for key, val in row.items():
                if key == "error":
                    assert got[key] == val
                else:
                    assert got[key] == pytest.approx(val, rel=1e-9)

    def test_deterministic(self, result):
        assert series_csv(result) == series_csv(result)
        assert to_json(result) == to_json(result)

    def test_json_schema(self, result):
        doc = json.loads(to_json(result))
        assert doc["schema_version"] == 1
        assert [s["name"] for s in doc["series"]] == ["a", "b"]
        assert doc["series"][1]["receiver"]["r_sw"] == 6.0

    def test_svg_one_polyline_per_series(self, result):
        svg = to_svg(result, "nf_db")
        assert svg.count("<polyline") == 2
        assert "Noise Figure [dB]" in svg and "Frequency [GHz]" in svg

    def test_s1p(self, result, tmp_path):
        paths = emit(result, tmp_path, ("s1p",), "x")
        freqs, gammas, r_ref = netcore.read_s1p(paths[0])
        assert r_ref == 50 and len(freqs) == 3
        z = complex(result.series[0].rows[1]["zin_re_ohm"], result.series[0].rows[1]["zin_im_ohm"])
        assert gammas[1] == pytest.approx(netcore.s11(z, 50.0), abs=1e-9)


class TestCalibrate:
    spec = ReceiverSpec(duty=0.5, rise_frac=0.0)
    grid = FrequencyGrid((30e9,))

    def test_deterministic(self):
        a = calibrate_r_ol(self.spec, self.grid)
        b = calibrate_r_ol(self.spec, self.grid)
        assert a.k_cal == b.k_cal

    def test_no_overlap(self):
        with pytest.raises(CalibrationError, match="no overlap to calibrate"):
            calibrate_r_ol(self.spec.with_(duty=0.25), self.grid)

    def test_residual(self):
        cal = calibrate_r_ol(self.spec, self.grid)
        assert cal.identifiable and cal.residual < 0.2

    @pytest.mark.xfail(strict=True, reason="k_cal is 0.78 at duty 0.3 and 0.58 at duty 0.5 (35% apart)")
    def test_consistent_across_duty(self):
        # the overlap constant should not depend much on how much overlap there is
        k1 = calibrate_r_ol(self.spec.with_(duty=0.3), self.grid).k_cal
        k2 = calibrate_r_ol(self.spec, self.grid).k_cal
        assert max(k1, k2) / min(k1, k2) < 1.3


class TestCli:
    def run(self, capsys, *argv):
        code = cli.main(list(argv))
        return code, capsys.readouterr()

    def test_presets(self, capsys):
        code, out = self.run(capsys, "presets")
        assert code == 0 and "fig7_three_way" in out.out

    def test_sweep_ok(self, tmp_path, capsys):
        path = tmp_path / "c.toml"
        path.write_text(LMATCH_TOML)
        code, out = self.run(capsys, "sweep", "--config", str(path), "--out", str(tmp_path / "o"),
                             "--format", "csv,svg")
        assert code == 0
        assert (tmp_path / "o" / "sweep.csv").exists()
        assert (tmp_path / "o" / "sweep_nf_db.svg").exists()

    def test_config_error(self, tmp_path, capsys):
        path = tmp_path / "c.toml"
        path.write_text(LMATCH_TOML.replace("duty = 0.5", "duty = 0.6"))
        code, out = self.run(capsys, "sweep", "--config", str(path), "--out", str(tmp_path))
        assert code == 1 and "duty" in out.err

    def test_usage_error(self, capsys):
        code = None
        with pytest.raises(SystemExit) as exc:
            cli.main(["sweep", "--jobs", "0"])
        assert exc.value.code == 1

    def test_unknown_preset(self, tmp_path, capsys):
        code, out = self.run(capsys, "synth", "--preset", "nope", "--out", str(tmp_path))
        assert code == 1 and "unknown preset" in out.err

    def test_numeric_failure(self, tmp_path, capsys):
        text = TUNABLE_NARROW
        path = tmp_path / "c.toml"
        path.write_text(text)
        code, out = self.run(capsys, "sweep", "--config", str(path), "--out", str(tmp_path))
        assert code == 2 and "inductor too small" in out.out

    def test_synth(self, tmp_path, capsys):
        path = tmp_path / "c.toml"
        path.write_text(LMATCH_TOML)
        code, out = self.run(capsys, "synth", "--config", str(path), "--out", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "synth.json").read_text())
        assert report["receiver"]["match"]["kind"] == "l_match"
        assert re.search(r"l_ser = [0-9.e-]+", out.out)
