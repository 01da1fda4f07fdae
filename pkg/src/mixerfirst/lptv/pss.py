"""Periodic steady state by brute-force trapezoidal time stepping."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import kernel
from .lo import LoWaveform
from .network import MnaSystem, SwitchedNetwork


class SimulationError(RuntimeError):
    pass


class NonConvergence(SimulationError):
    def __init__(self, residual: float, periods: int):
        super().__init__(f"no periodic steady state after {periods} periods (residual {residual:.3e})")
        self.residual = residual
        self.periods = periods


class NotCommensurate(SimulationError):
    pass


def common_period(f_lo: float, freqs, max_den: int = 4096) -> int:
    """Number of LO periods in the shortest window that holds whole cycles of ``freqs``.

    Each frequency must be a rational multiple of ``f_lo`` with a modest
    denominator.
    """
    n = 1
    for f in freqs:
        ratio = Fraction(f / f_lo).limit_denominator(max_den)
        if ratio == 0 or abs(float(ratio) * f_lo - f) > 1e-9 * f:
            raise NotCommensurate(
                f"{f:.6g} Hz is not commensurate with f_lo = {f_lo:.6g} Hz; "
                "pass beat_window to simulate anyway"
            )
        n = math.lcm(n, ratio.denominator)
    return n


@dataclass
class StepMatrices:
    P: np.ndarray
    Ea: np.ndarray
    Eb: np.ndarray
    h: float


def step_matrices(mna: MnaSystem, lo: LoWaveform, steps: int) -> StepMatrices:
    """Per-step propagators over one LO period.

    Within step ``k`` every switch holds its conductance at the step
    midpoint.  Algebraic variables are re-solved at the start of each step so
    that a conductance change does not violate the constraints, then the
    trapezoidal rule is applied to the differential part only.
    """
    n = mna.n
    T = lo.period
    h = T / steps
    C = mna.C
    B = np.hstack([mna.B_ext, mna.B_hist])
    m = B.shape[1]
    U, sv, _ = np.linalg.svd(C)
    tol = sv.max() * 1e-12 if sv.size and sv.max() > 0 else 0.0
    r = int(np.sum(sv > tol))
    Wr = U[:, :r].T
    N = U[:, r:].T
    t_mid = (np.arange(steps) + 0.5) * h
    g = mna.switch_conductance(lo, t_mid)
    base = mna.G0 + mna.G_tl_companion
    WC = Wr @ C
    WB = Wr @ B
    NB = N @ B
    P = np.empty((steps, n, n))
    Ea = np.empty((steps, n, m))
    Eb = np.empty((steps, n, m))
    cache: dict = {}
    zeros_a = np.zeros((n - r, n))
    zeros_b = np.zeros((n - r, m))
    for k in range(steps):
        key = g[:, k].tobytes()
        if key not in cache:
            G = base.copy()
            for j, S in enumerate(mna.switch_stamps):
                G += g[j, k] * S
            NG = N @ G
            R = np.vstack([WC, NG])
            Q1 = np.linalg.solve(R, np.vstack([WC, zeros_a]))
            Q2 = np.linalg.solve(R, np.vstack([np.zeros((r, m)), NB]))
            L = np.vstack([Wr @ (2 * C / h + G), NG])
            Rm = np.vstack([Wr @ (2 * C / h - G), zeros_a])
            Ba = np.vstack([WB, zeros_b])
            Bb = np.vstack([WB, NB])
            Li = np.linalg.inv(L)
            cache[key] = (Li @ Rm @ Q1, Li @ (Rm @ Q2 + Ba), Li @ Bb)
        P[k], Ea[k], Eb[k] = cache[key]
    return StepMatrices(P, Ea, Eb, h)


@dataclass
class PssTrace:
    """One converged window of the periodic steady state."""

    time: np.ndarray
    states: np.ndarray  # (len(time), n_vars)
    var_names: list
    residual: float
    periods: int
    f_lo: float
    f_rf: float
    source_amplitude: float
    r_s: float
    rf_node: str = "rf"
    info: dict = field(default_factory=dict)

    @property
    def window(self) -> float:
        return self.time[1] * len(self.time) if len(self.time) > 1 else 0.0

    def index(self, name: str) -> int:
        return self.var_names.index(name)

    def waveform(self, name: str) -> np.ndarray:
        if name == "0":
            return np.zeros(len(self.time))
        return self.states[:, self.index(name)]

    def phasor(self, name: str, f: float) -> complex:
        """Complex amplitude of the component at ``f`` (cosine reference)."""
        x = self.waveform(name)
        n = len(x)
        if abs(f) * self.window < 0.5:
            return complex(np.mean(x))
        e = np.exp(-2j * math.pi * f * self.time)
        return complex(2.0 / n * np.dot(x, e))

    def mean_square(self, name: str) -> float:
        return float(np.mean(self.waveform(name) ** 2))

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", *self.var_names])
            for t, row in zip(self.time, self.states):
                w.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
        return path


def _ext_samples(names, tones, h, n_steps):
    t = np.arange(n_steps) * h
    ext = np.zeros((n_steps, len(names)))
    for i, name in enumerate(names):
        if name in tones:
            amp, f = tones[name]
            ext[:, i] = amp * np.cos(2 * math.pi * f * t)
    return ext


def simulate_pss(
    net: SwitchedNetwork,
    lo: LoWaveform,
    f_rf: float,
    steps_per_period: int = 1024,
    max_periods: int = 2000,
    tol: float = 1e-6,
    *,
    tones: dict | None = None,
    beat_window: float | None = None,
    x0: np.ndarray | None = None,
    backend=None,
) -> PssTrace:
    """Integrate ``net`` until its response repeats over the common period.

    ``tones`` maps external inputs to ``(amplitude, frequency)``; by default
    the source EMF is a cosine of ``net.source_amplitude`` at ``f_rf``.  The
    simulated window holds whole cycles of the LO and of every tone.
    """
    if steps_per_period < 256:
        raise ValueError("steps_per_period must be >= 256")
    if max_periods < 2:
        raise ValueError("max_periods must be >= 2")
    mna = net.mna()
    if tones is None:
        tones = {"src": (net.source_amplitude, f_rf)} if "src" in mna.ext_names else {}
    unknown = set(tones) - set(mna.ext_names)
    if unknown:
        raise ValueError(f"unknown inputs: {sorted(unknown)}")
    freqs = [f_rf] + [f for _, f in tones.values()]
    if beat_window is None:
        n_lo = common_period(lo.f_lo, freqs)
        n_steps = n_lo * steps_per_period
    else:
        n_steps = int(round(beat_window / lo.period * steps_per_period))
        if n_steps < steps_per_period:
            raise ValueError("beat_window shorter than one LO period")

    sm = step_matrices(mna, lo, steps_per_period)
    h = sm.h
    tl_d = np.array([int(round(t.delay / h)) for t in net.netlist.tlines], dtype=np.int64)
    if (tl_d < 1).any():
        raise SimulationError("transmission-line delay shorter than one time step")
    tl_z0 = np.array([t.z0 for t in net.netlist.tlines], dtype=float)
    tl_k = np.array([t.atten for t in net.netlist.tlines], dtype=float)
    lb = int(tl_d.max()) + 2 if len(tl_d) else 1
    wbuf = np.zeros((len(tl_d), 2, lb))
    ext = _ext_samples(mna.ext_names, tones, h, n_steps)
    x = np.zeros(mna.n) if x0 is None else np.array(x0, dtype=float)
    for j in range(len(tl_d)):
        wbuf[j, 0, 0] = 2.0 * x[mna.tl_a[j]]
        wbuf[j, 1, 0] = 2.0 * x[mna.tl_b[j]]
    advance = backend or kernel.advance
    args = (
        sm.P, sm.Ea, sm.Eb, np.ascontiguousarray(ext), mna.tl_a, mna.tl_b,
        tl_z0, tl_k, tl_d,
    )

    prev = np.empty((n_steps, mna.n))
    cur = np.empty((n_steps, mna.n))
    advance(*args, x, wbuf, 0, n_steps, prev)
    residual = math.inf
    n0 = n_steps
    for period in range(2, max_periods + 1):
        advance(*args, x, wbuf, n0, n_steps, cur)
        n0 += n_steps
        scale = math.sqrt(np.mean(cur**2))
        residual = math.sqrt(np.mean((cur - prev) ** 2)) / scale if scale > 0 else 0.0
        if residual < tol:
            return PssTrace(
                time=np.arange(n_steps) * h,
                states=cur.copy(),
                var_names=list(mna.var_names),
                residual=residual,
                periods=period,
                f_lo=lo.f_lo,
                f_rf=f_rf,
                source_amplitude=tones.get("src", (0.0, f_rf))[0],
                r_s=net.spec.r_s,
                rf_node=net.rf_node,
                info={
                    "steps_per_period": steps_per_period,
                    "tones": dict(tones),
                    # line delays as simulated, after snapping to the grid
                    "line_delays": [float(d * h) for d in tl_d],
                },
            )
        prev, cur = cur, prev
    raise NonConvergence(residual, max_periods)
