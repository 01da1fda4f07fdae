"""Complex impedance arithmetic and two-port chain (ABCD) algebra.

All frequencies are in Hz.  Values are plain Python/NumPy complex numbers, so
every function here broadcasts over NumPy arrays of frequencies as well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

NEPER_PER_DB = math.log(10.0) / 20.0


class NetworkError(ValueError):
    """Raised for invalid element values or singular network evaluations."""


class OpenCircuitResonance(NetworkError):
    pass


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing set of positive frequencies in Hz."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if not pts:
            raise NetworkError("frequency grid is empty")
        if any(p <= 0 for p in pts):
            raise NetworkError("frequency grid points must be > 0 Hz")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise NetworkError("frequency grid must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def linspace(cls, start: float, stop: float, num: int) -> "FrequencyGrid":
        return cls(tuple(np.linspace(start, stop, num)))

    @classmethod
    def from_ghz(cls, values: Iterable[float]) -> "FrequencyGrid":
        return cls(tuple(v * 1e9 for v in values))

    @property
    def ghz(self) -> np.ndarray:
        return np.asarray(self.points) / 1e9

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class Termination:
    impedance: complex

    def __post_init__(self):
        z = complex(self.impedance)
        if not math.isinf(z.real) and z.real < 0:
            raise NetworkError(f"termination must be passive, got Re(Z)={z.real}")
        object.__setattr__(self, "impedance", z)


@dataclass(frozen=True)
class TwoPort:
    """Chain parameters relating (V1, I1) to (V2, I2) with I2 leaving port 2."""

    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "TwoPort") -> "TwoPort":
        return TwoPort(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def allclose(self, other: "TwoPort", rtol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=rtol, atol=0.0))


IDENTITY = TwoPort(1.0 + 0j, 0j, 0j, 1.0 + 0j)


def series_element(z: complex) -> TwoPort:
    return TwoPort(1.0 + 0j, complex(z), 0j, 1.0 + 0j)


def shunt_element(y: complex) -> TwoPort:
    return TwoPort(1.0 + 0j, 0j, complex(y), 1.0 + 0j)


def tline(
    z0: float,
    f: float,
    electrical_length: float,
    loss_db_per_mm: float = 0.0,
    phys_length: float = 0.0,
    f_ref: float | None = None,
) -> TwoPort:
    """Uniform transmission line evaluated at frequency ``f``.

    ``electrical_length`` is the phase length in radians at ``f_ref``
    (defaults to ``f``), so a line specified as pi/2 at its design
    frequency scales linearly when evaluated elsewhere.  Loss is a
    frequency-independent attenuation over ``phys_length`` millimetres.
    """
    if not z0 > 0:
        raise NetworkError(f"characteristic impedance must be > 0, got {z0}")
    if loss_db_per_mm < 0:
        raise NetworkError("loss must be >= 0 dB/mm")
    ref = f if f_ref is None else f_ref
    beta_l = electrical_length * f / ref
    alpha_l = loss_db_per_mm * phys_length * NEPER_PER_DB
    gl = alpha_l + 1j * beta_l
    ch, sh = np.cosh(gl), np.sinh(gl)
    return TwoPort(ch, z0 * sh, sh / z0, ch)


def cascade(ports: Sequence[TwoPort]) -> TwoPort:
    if not ports:
        return IDENTITY
    return reduce(lambda x, y: x @ y, ports)


def input_impedance(port: TwoPort, load: Termination | complex) -> complex:
    zl = load.impedance if isinstance(load, Termination) else complex(load)
    if math.isinf(abs(zl)):
        num, den = port.a, port.c
    else:
        num, den = port.a * zl + port.b, port.c * zl + port.d
    if np.any(np.abs(den) == 0):
        raise OpenCircuitResonance("open-circuit resonance: c*Z_L + d = 0")
    return num / den


def output_impedance(port: TwoPort, source: complex) -> complex:
    """Impedance looking back into port 2 with ``source`` on port 1."""
    zs = complex(source)
    den = port.c * zs + port.a
    if np.any(np.abs(den) == 0):
        raise OpenCircuitResonance("open-circuit resonance looking into port 2")
    return (port.d * zs + port.b) / den


def voltage_transfer(port: TwoPort, source: complex, load: complex) -> complex:
    """V_load / E_source for a Thevenin source driving the loaded two-port."""
    zs, zl = complex(source), complex(load)
    return zl / (port.a * zl + port.b + zs * (port.c * zl + port.d))


def s11(z_in: complex, z_ref: float = 50.0) -> complex:
    if not z_ref > 0:
        raise NetworkError("reference impedance must be > 0")
    z = complex(z_in)
    if math.isinf(abs(z)):
        return 1.0 + 0j
    return (z - z_ref) / (z + z_ref)


def db20(x) -> float:
    return 20.0 * np.log10(np.abs(x))


def parallel(*zs: complex) -> complex:
    """Parallel combination; infinite members are ignored."""
    y = 0j
    for z in zs:
        z = complex(z)
        if math.isinf(abs(z)):
            continue
        if z == 0:
            return 0j
        y += 1.0 / z
    return complex(math.inf) if y == 0 else 1.0 / y


def y_params(port: TwoPort) -> np.ndarray:
    """Admittance matrix with both port currents flowing into the network."""
    if port.b == 0:
        raise NetworkError("two-port has no admittance representation (b = 0)")
    return np.array(
        [[port.d / port.b, -port.det / port.b], [-1.0 / port.b, port.a / port.b]],
        dtype=complex,
    )


def write_s1p(
    path: str | Path,
    freqs_hz: Sequence[float],
    s11_values: Sequence[complex],
    z_ref: float = 50.0,
    comments: Sequence[str] = (),
) -> Path:
    """Write a Touchstone v1 one-port file in real/imaginary format."""
    path = Path(path)
    lines = [f"! {c}" for c in comments]
    lines.append(f"# HZ S RI R {z_ref:g}")
    for f, s in zip(freqs_hz, s11_values):
        s = complex(s)
        lines.append(f"{float(f):.10e} {s.real:.12e} {s.imag:.12e}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_s1p(path: str | Path) -> tuple[np.ndarray, np.ndarray, float]:
    """Minimal reader for files written by :func:`write_s1p` (RI or MA, any unit)."""
    scale = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
    unit, fmt, z_ref = 1e9, "MA", 50.0
    freqs, vals = [], []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            tok = line[1:].upper().split()
            for i, t in enumerate(tok):
                if t in scale:
                    unit = scale[t]
                elif t in ("RI", "MA", "DB"):
                    fmt = t
                elif t == "R":
                    z_ref = float(tok[i + 1])
            continue
        f, x, y = (float(v) for v in line.split()[:3])
        freqs.append(f * unit)
        if fmt == "RI":
            vals.append(complex(x, y))
        else:
            mag = x if fmt == "MA" else 10 ** (x / 20)
            vals.append(mag * np.exp(1j * np.deg2rad(y)))
    return np.asarray(freqs), np.asarray(vals), z_ref


ImpedanceFn = Callable[[float], complex]
