import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixerfirst import matchsynth, netcore, rxmodel
from mixerfirst.rxmodel import Architecture, ReceiverSpec, SpecError

INF = math.inf
F30 = 30e9
GAMMA = 2 / math.pi**2


def matched(arch, duty=0.5, **kw):
    kind = arch.match_kind
    if kind is matchsynth.MatchKind.QUARTER_WAVE:
        seed = matchsynth.synth_quarter_wave(12, 50, F30)
    elif kind is matchsynth.MatchKind.L_MATCH:
        seed = matchsynth.synth_l_match(12, 100, F30)
    else:
        seed = matchsynth.synth_tunable_l_match(12, 100, F30, 25e9)
    spec = ReceiverSpec(architecture=arch, match=seed, duty=duty, **kw)
    return rxmodel.design_match(spec, F30)


def s11_db(z, r=50.0):
    return 20 * math.log10(abs(netcore.s11(z, r)))


class TestSpec:
    def test_duty_out_of_range_names_field(self):
        with pytest.raises(SpecError, match="duty"):
            ReceiverSpec(duty=0.6)

    def test_matched_architecture_needs_match(self):
        with pytest.raises(SpecError, match="match"):
            ReceiverSpec(architecture=Architecture.L_MATCH)

    def test_overlap(self):
        assert ReceiverSpec(duty=0.25).tau_overlap == 0
        assert ReceiverSpec(duty=0.5).tau_overlap == pytest.approx(0.25 / F30)


class TestMiller:
    def test_examples(self):
        a36 = 10 ** (36 / 20)
        assert rxmodel.miller_input_impedance(GAMMA, 1000, a36) == pytest.approx(3.16, abs=0.005)
        assert rxmodel.miller_input_impedance(GAMMA, 1000, 0) == pytest.approx(202.6, abs=0.05)
        assert rxmodel.miller_input_impedance(GAMMA, 1000, INF) == 0

    @given(st.floats(1, 1e5), st.floats(0, 1e4), st.floats(1, 10))
    def test_scale_invariance(self, r_f, a, c):
        z = rxmodel.miller_input_impedance(GAMMA, r_f, a)
        z2 = rxmodel.miller_input_impedance(GAMMA, c * r_f, c * (1 + a) - 1)
        assert z2 == pytest.approx(z, rel=1e-9)

    def test_gamma_in_lti(self):
        assert rxmodel.build_lti(ReceiverSpec()).gamma == pytest.approx(GAMMA, abs=1e-12)


class TestNoiseFactor:
    def test_examples(self):
        assert rxmodel.noise_factor(12, 50, INF, INF) == 1.24
        assert rxmodel.nf_db(1.24) == pytest.approx(0.934, abs=5e-4)
        assert rxmodel.noise_factor(0, 50, INF, INF) == 1
        f = rxmodel.noise_factor(12, 50, 500, 1000)
        assert f == pytest.approx(1.24 + 62**2 / (50 * 500) + 62**2 / (50 * 1000), rel=1e-12)
        assert f == pytest.approx(1.4706, abs=1e-4)
        assert rxmodel.nf_db(f) == pytest.approx(1.675, abs=5e-4)

    pos = st.floats(0.1, 1e4)

    @settings(max_examples=300)
    @given(pos, pos, pos, pos, st.floats(1.01, 10))
    def test_monotone(self, r_sw, r_s, r_sh, r_ol, k):
        f = rxmodel.noise_factor(r_sw, r_s, r_sh, r_ol)
        assert f >= 1
        assert rxmodel.noise_factor(k * r_sw, r_s, r_sh, r_ol) > f
        assert rxmodel.noise_factor(r_sw, r_s, k * r_sh, r_ol) < f
        assert rxmodel.noise_factor(r_sw, r_s, r_sh, k * r_ol) < f

    def test_shunt_reduces_to_plain_without_resistor(self):
        assert rxmodel.shunt_matched_noise_factor(12, 50, 500, 1000, INF) == pytest.approx(
            rxmodel.noise_factor(12, 50, 500, 1000)
        )

    def test_shunt_resistor_alone_costs_3db(self):
        # matched shunt, no switch: half the available power is burnt in r_p
        f = rxmodel.shunt_matched_noise_factor(0, 50, INF, INF, 50)
        assert f == pytest.approx(2.0)


class TestROl:
    def test_infinite_without_overlap(self):
        assert rxmodel.r_ol_estimate(24, F30, 0.0) == INF

    def test_inverse_in_overlap(self):
        r1 = rxmodel.r_ol_estimate(24, F30, 1e-12)
        assert rxmodel.r_ol_estimate(24, F30, 2e-12) == pytest.approx(r1 / 2)
        assert rxmodel.r_ol_estimate(48, F30, 1e-12) == pytest.approx(2 * r1)

    def test_lti_duty_quarter_has_no_overlap_resistance(self):
        assert rxmodel.build_lti(ReceiverSpec(duty=0.25)).r_ol == INF


class TestRsh:
    def test_resistive_front_end_monotone_in_impedance(self):
        lo = rxmodel.r_sh_estimate(lambda f: 20.0, F30)
        hi = rxmodel.r_sh_estimate(lambda f: 80.0, F30)
        assert hi > lo

    def test_low_pass_network_raises_rsh(self):
        # a shunt capacitor at the harmonics shorts them: far less re-radiated power
        m = matchsynth.synth_l_match(12, 100, F30)

        def through_network(f):
            return netcore.output_impedance(matchsynth.branch_two_port(m, f), 100.0) + 12

        resistive = rxmodel.r_sh_estimate(lambda f: 62.0, F30)
        assert rxmodel.r_sh_estimate(through_network, F30) >= 10 * resistive

    def test_even_harmonics_absent_at_half_duty(self):
        assert rxmodel.lo_fourier_coefficient(2, 0.5) == pytest.approx(0, abs=1e-15)
        assert rxmodel.lo_fourier_coefficient(0, 0.25) == 0.25


class TestVds:
    def test_examples(self):
        assert rxmodel.vds_ratio(12, 50) == pytest.approx(0.1732, abs=1e-4)
        assert rxmodel.vds_ratio(0, 50) == 0
        assert rxmodel.vds_ratio(100, 50) == pytest.approx(0.5)

    @given(st.floats(0.01, 1e4), st.floats(0.01, 1e4))
    def test_sqrt_scaling(self, r_sw, r_s):
        ratio = rxmodel.vds_ratio(r_sw / 2, r_s) / rxmodel.vds_ratio(r_sw, r_s)
        assert ratio == pytest.approx(1 / math.sqrt(2), rel=1e-12)


class TestIip3:
    def test_examples(self):
        assert rxmodel.iip3_cascade(1, 1, 0.3, INF) == pytest.approx(0.3)
        assert rxmodel.iip3_cascade(0.5, 1, 0.3, INF) == pytest.approx(0.6)
        assert rxmodel.iip3_cascade(1, 1, 1, 1) == pytest.approx(1 / math.sqrt(2))

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10))
    def test_symmetry(self, a_mn, a_mix, v_m, v_bb):
        v = rxmodel.iip3_cascade(a_mn, a_mix, v_m, v_bb)
        assert rxmodel.iip3_cascade(a_mn, a_mix, v_bb / a_mix, v_m * a_mix) == pytest.approx(v, rel=1e-12)

    def test_dbm_round_trip(self):
        assert rxmodel.volts_to_dbm(rxmodel.dbm_to_volts(-7.5)) == pytest.approx(-7.5)
        # 1 mW in 50 ohm is 0.316 V peak
        assert rxmodel.dbm_to_volts(0) == pytest.approx(math.sqrt(0.1))


class TestLti:
    def test_quarter_wave_matched(self):
        for duty in (0.25, 0.5):
            lti = rxmodel.build_lti(matched(Architecture.QUARTER_WAVE_DIVIDER, duty), F30)
            assert lti.z_in.real == pytest.approx(50, rel=1e-6)
            assert abs(lti.z_in.imag) < 1e-6

    def test_shunt_resistor_topology(self):
        spec = ReceiverSpec(architecture=Architecture.SHUNT_RESISTOR)
        lti = rxmodel.build_lti(spec)
        assert lti.z_in == pytest.approx(netcore.parallel(50.0, lti.z_load))

    def test_lmatch_narrowband(self):
        spec = matched(Architecture.L_MATCH)
        assert s11_db(rxmodel.build_lti(spec, F30).z_in) < -30
        assert s11_db(rxmodel.build_lti(spec, 2 * F30).z_in) > -10

    def test_design_match_reaches_fixed_point(self):
        spec = matched(Architecture.L_MATCH)
        again = rxmodel.design_match(spec, F30)
        assert again.match.l_ser == pytest.approx(spec.match.l_ser, rel=1e-9)


class TestGain:
    @pytest.mark.parametrize("arch", [Architecture.QUARTER_WAVE_DIVIDER, Architecture.L_MATCH])
    def test_window(self, arch):
        g = rxmodel.conversion_gain_lti(matched(arch))
        assert 15 <= g <= 21

    def test_rf_doubled_virtual_ground(self):
        spec = matched(Architecture.L_MATCH, a_ol=INF)
        g1 = rxmodel.conversion_gain_lti(spec)
        g2 = rxmodel.conversion_gain_lti(spec.with_(r_f=2000))
        assert g2 - g1 == pytest.approx(20 * math.log10(2), abs=1e-9)

    def test_no_amplifier_gain(self):
        assert rxmodel.conversion_gain_lti(ReceiverSpec(a_ol=0)) < 0
