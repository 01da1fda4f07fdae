import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixerfirst import netcore
from mixerfirst.netcore import (
    FrequencyGrid,
    NetworkError,
    OpenCircuitResonance,
    Termination,
    cascade,
    input_impedance,
    s11,
    series_element,
    shunt_element,
    tline,
)

F30 = 30e9
pos = st.floats(min_value=1e-2, max_value=1e4, allow_nan=False)


def telegrapher_zin(z0, zl, alpha_l, beta_l):
    # independent closed form: Z0 (ZL + Z0 tanh gl) / (Z0 + ZL tanh gl)
    t = np.tanh(alpha_l + 1j * beta_l)
    return z0 * (zl + z0 * t) / (z0 + zl * t)


class TestFrequencyGrid:
    def test_rejects_empty_nonpositive_and_unsorted(self):
        with pytest.raises(NetworkError):
            FrequencyGrid(())
        with pytest.raises(NetworkError):
            FrequencyGrid((0.0, 1e9))
        with pytest.raises(NetworkError):
            FrequencyGrid((2e9, 1e9))
        with pytest.raises(NetworkError):
            FrequencyGrid((1e9, 1e9))

    def test_ghz_helpers(self):
        g = FrequencyGrid.from_ghz([25, 30])
        assert g.points == (25e9, 30e9)
        assert list(g.ghz) == [25.0, 30.0]
        assert len(FrequencyGrid.linspace(25e9, 40e9, 16)) == 16


class TestElements:
    def test_series_identity_and_sum(self):
        assert series_element(0).allclose(netcore.IDENTITY)
        assert input_impedance(series_element(12), 50) == pytest.approx(62)
        z = 1j * 2 * math.pi * F30 * 200e-12
        assert input_impedance(series_element(z), 50) == pytest.approx(50 + 37.699j, abs=1e-3)

    def test_shunt(self):
        assert shunt_element(0).allclose(netcore.IDENTITY)
        assert input_impedance(shunt_element(1 / 50), 50) == pytest.approx(25)
        y = 1j * 2 * math.pi * F30 * 189e-15
        z = input_impedance(shunt_element(y), Termination(math.inf))
        assert z == pytest.approx(-28.07j, abs=0.01)

    def test_passive_termination_only(self):
        with pytest.raises(NetworkError):
            Termination(-1 + 0j)

    def test_quarter_wave_example(self):
        z = input_impedance(tline(35.36, F30, math.pi / 2), 12.5)
        assert z == pytest.approx(100.03, rel=1e-4)

    def test_half_wave_identity(self):
        for zl in (3.0, 50.0, 12 - 40j):
            assert input_impedance(tline(70.0, F30, math.pi), zl) == pytest.approx(zl, rel=1e-9)

    def test_lossy_line_matches_telegrapher_form(self):
        alpha_l = 0.5 * 2.0 * math.log(10) / 20
        z = input_impedance(tline(35.36, F30, math.pi / 2, 0.5, 2.0), 12.5)
        assert z == pytest.approx(telegrapher_zin(35.36, 12.5, alpha_l, math.pi / 2), rel=1e-9)
        lossless = input_impedance(tline(35.36, F30, math.pi / 2), 12.5)
        assert abs(z) < abs(lossless)

    def test_tline_rejects_bad_z0(self):
        with pytest.raises(NetworkError):
            tline(0.0, F30, 1.0)
        with pytest.raises(NetworkError):
            tline(50.0, F30, 1.0, -0.1, 1.0)

    def test_cascade_identities(self):
        x = tline(40.0, F30, 0.3)
        assert cascade([netcore.IDENTITY, x]).allclose(x)
        assert cascade([series_element(3 + 1j), series_element(4 - 2j)]).allclose(series_element(7 - 1j))
        assert cascade([]).allclose(netcore.IDENTITY)

    def test_open_circuit_resonance(self):
        port = netcore.TwoPort(1, 0, 1, -50)
        with pytest.raises(OpenCircuitResonance, match="open-circuit resonance"):
            input_impedance(port, 50)


class TestS11:
    def test_examples(self):
        assert s11(50) == 0
        assert s11(complex(math.inf)) == 1
        assert s11(12).real == pytest.approx(-0.6129, abs=1e-4)

    def test_rejects_bad_reference(self):
        with pytest.raises(NetworkError):
            s11(50, 0)

    @given(pos, st.floats(min_value=-1e4, max_value=1e4))
    def test_passive_bounded(self, r, x):
        assert abs(s11(complex(r, x))) <= 1 + 1e-12


class TestProperties:
    @given(pos, pos, st.floats(min_value=1e8, max_value=1e11), st.floats(0, 6))
    def test_reciprocal_elements_unit_det(self, r, c, f, theta):
        w = 2 * math.pi * f
        for port in (
            series_element(r + 1j * w * 1e-10),
            shunt_element(1 / r + 1j * w * c * 1e-15),
            tline(r, f, theta),
            tline(r, f, theta, 0.7, 2.0),
        ):
            assert abs(port.det - 1) <= 1e-9

    @given(st.lists(st.tuples(pos, st.floats(-100, 100)), min_size=3, max_size=3))
    def test_cascade_associative(self, zs):
        a, b, c = (tline(r, F30, x / 50 + 1.0) @ series_element(complex(r, x)) for r, x in zs)
        left = cascade([cascade([a, b]), c]).matrix
        right = cascade([a, cascade([b, c])]).matrix
        assert np.allclose(left, right, rtol=1e-12, atol=1e-12 * np.abs(left).max())

    @settings(max_examples=100)
    @given(pos, pos)
    def test_quarter_wave_inversion(self, z0, zl):
        z = input_impedance(tline(z0, F30, math.pi / 2), zl)
        assert z.real * zl == pytest.approx(z0**2, rel=1e-9)
        assert abs(z.imag) <= 1e-9 * abs(z)


class TestTouchstone:
    def test_round_trip(self, tmp_path):
        freqs = [25e9, 30e9]
        vals = [0.1 - 0.2j, -0.613 + 0j]
        path = netcore.write_s1p(tmp_path / "a.s1p", freqs, vals, comments=["test"])
        text = path.read_text()
        assert "# HZ S RI R 50" in text
        f, s, z_ref = netcore.read_s1p(path)
        assert np.allclose(f, freqs) and np.allclose(s, vals, rtol=1e-12) and z_ref == 50


def test_parallel_and_yparams():
    assert netcore.parallel(50, 50) == pytest.approx(25)
    assert netcore.parallel(50, math.inf) == pytest.approx(50)
    assert netcore.parallel(math.inf) == complex(math.inf)
    y = netcore.y_params(series_element(10))
    assert np.allclose(y, [[0.1, -0.1], [-0.1, 0.1]])
