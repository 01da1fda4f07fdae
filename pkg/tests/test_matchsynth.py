import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixerfirst import netcore
from mixerfirst.matchsynth import (
    MatchKind,
    MatchSpec,
    SynthesisError,
    branch_two_port,
    divider_input_impedance,
    retune,
    series_lc_impedance,
    synth_l_match,
    synth_quarter_wave,
    synth_tunable_cap,
    synth_tunable_l_match,
)

F30, F40, F25 = 30e9, 40e9, 25e9


def w(f):
    return 2 * math.pi * f


def l_match_zin(m, f, r_low):
    # oracle: direct chain evaluation, C_sh in parallel with (jwL + r_low)
    z_branch = 1j * w(f) * m.l_ser + r_low
    if m.kind is MatchKind.TUNABLE_L_MATCH:
        z_branch += 1 / (1j * w(f) * m.c_ser)
    y = 1j * w(f) * m.c_sh + 1 / z_branch
    return 1 / y


class TestQuarterWave:
    @pytest.mark.parametrize("r_sw,z0", [(12.5, 35.355), (50, 70.711), (12, 34.641)])
    def test_z0(self, r_sw, z0):
        assert synth_quarter_wave(r_sw, 50, F30).z0 == pytest.approx(z0, abs=1e-3)

    def test_divider_presents_source_resistance(self):
        m = synth_quarter_wave(12, 50, F30)
        assert divider_input_impedance(m, F30, 12) == pytest.approx(50, rel=1e-9)

    def test_rejects_nonpositive(self):
        with pytest.raises(SynthesisError):
            synth_quarter_wave(0, 50, F30)


class TestLMatch:
    def test_30ghz_example(self):
        m = synth_l_match(12, 50, F30)
        q = math.sqrt(50 / 12 - 1)
        assert q == pytest.approx(1.7795, abs=1e-4)
        assert m.l_ser == pytest.approx(113.3e-12, rel=1e-3)
        assert m.c_sh == pytest.approx(188.8e-15, rel=1e-3)
        assert l_match_zin(m, F30, 12) == pytest.approx(50, rel=1e-3)
        assert netcore.input_impedance(branch_two_port(m, F30), 12) == pytest.approx(50, rel=1e-3)

    def test_40ghz_example(self):
        m = synth_l_match(12, 50, F40)
        assert m.l_ser == pytest.approx(85.0e-12, rel=1e-3)
        assert m.c_sh == pytest.approx(141.6e-15, rel=1e-3)
        assert l_match_zin(m, F40, 12) == pytest.approx(50, rel=1e-3)

    def test_degenerate_limit(self):
        # elements shrink with sqrt(r_high/r_low - 1)
        m = synth_l_match(50, 50.0001, F30)
        q = math.sqrt(50.0001 / 50 - 1)
        assert m.l_ser == pytest.approx(q * 50 / w(F30), rel=1e-6)
        assert m.c_sh == pytest.approx(q / (50.0001 * w(F30)), rel=1e-6)
        assert m.l_ser < 1e-2 * synth_l_match(12, 50, F30).l_ser

    def test_requires_upward_transformation(self):
        with pytest.raises(SynthesisError, match="upward transformation"):
            synth_l_match(50, 12, F30)

    @settings(max_examples=200)
    @given(
        st.floats(0.5, 200),
        st.floats(1.01, 50),
        st.floats(1e9, 1e11),
    )
    def test_round_trip(self, r_low, ratio, f):
        r_high = r_low * ratio
        m = synth_l_match(r_low, r_high, f)
        z = netcore.input_impedance(branch_two_port(m, f), r_low)
        assert abs(z - r_high) <= 1e-3 * r_high

    def test_low_pass(self):
        m = synth_l_match(12, 100, F30)
        port_f = branch_two_port(m, F30)
        port_3f = branch_two_port(m, 3 * F30)
        h1 = abs(netcore.voltage_transfer(port_f, 100, 12))
        h3 = abs(netcore.voltage_transfer(port_3f, 100, 12))
        assert h3 < h1


class TestSeriesLC:
    def test_examples(self):
        z = series_lc_impedance(150e-12, 563.0e-15, F30)
        assert z.real == 0
        assert z.imag == pytest.approx(18.85, abs=0.01)
        assert z.imag == pytest.approx(w(F30) * 100e-12, rel=1e-3)
        c_res = 1 / (w(F30) ** 2 * 150e-12)
        assert abs(series_lc_impedance(150e-12, c_res, F30)) < 1e-9
        assert series_lc_impedance(150e-12, math.inf, F30) == pytest.approx(1j * w(F30) * 150e-12)


class TestTunable:
    def test_cap_examples(self):
        assert synth_tunable_cap(150e-12, 100e-12, F30) == pytest.approx(563.0e-15, rel=1e-3)
        assert synth_tunable_cap(150e-12, 100e-12, F40) == pytest.approx(316.7e-15, rel=1e-3)
        with pytest.raises(SynthesisError, match="larger effective inductance"):
            synth_tunable_cap(150e-12, 150e-12, F30)

    @settings(max_examples=300)
    @given(st.floats(1e-12, 1e-8), st.floats(0.01, 0.99), st.floats(1e8, 1e11))
    def test_equivalence(self, l_ser, frac, f):
        l_eff = l_ser * frac
        c = synth_tunable_cap(l_ser, l_eff, f)
        z = series_lc_impedance(l_ser, c, f)
        assert abs(z - 1j * w(f) * l_eff) <= 1e-12 * w(f) * l_ser / frac * 10

    def test_retune_across_band(self):
        m = synth_tunable_l_match(12, 100, F25, F25)
        m40 = retune(m, 12, 100, F40)
        assert m40.l_ser == m.l_ser
        z = l_match_zin(m40, F40, 12)
        assert 20 * math.log10(abs(netcore.s11(z, 100))) < -30

    def test_retune_idempotent(self):
        m = synth_tunable_l_match(12, 100, F30, F25)
        again = retune(m, 12, 100, F30)
        for name in ("l_ser", "c_sh", "c_ser"):
            assert getattr(again, name) == pytest.approx(getattr(m, name), rel=1e-9)

    def test_retune_beyond_band_edge(self):
        m = synth_tunable_l_match(12, 100, F30, F25)
        with pytest.raises(SynthesisError, match="inductor too small"):
            retune(m, 12, 100, 20e9)

    def test_only_tunable_retunes(self):
        with pytest.raises(SynthesisError):
            retune(synth_l_match(12, 100, F30), 12, 100, F40)


class TestMatchSpec:
    def test_invariants(self):
        with pytest.raises(SynthesisError):
            MatchSpec(MatchKind.L_MATCH, F30, l_ser=1e-10)
        with pytest.raises(SynthesisError):
            MatchSpec(MatchKind.TUNABLE_L_MATCH, F30, l_ser=1e-10, c_sh=1e-13, c_ser=math.inf)
        with pytest.raises(SynthesisError):
            MatchSpec(MatchKind.QUARTER_WAVE, F30, z0=35, loss_db_per_mm=-1)

    def test_dict_round_trip(self):
        m = synth_tunable_l_match(12, 100, F30, F25)
        assert MatchSpec.from_dict(m.to_dict()) == m
        with pytest.raises(SynthesisError):
            MatchSpec.from_dict({**m.to_dict(), "bogus": 1})
