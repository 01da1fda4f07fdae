"""Multi-phase LO switching waveforms."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LoWaveform:
    """N phase-shifted copies of one trapezoidal switching pulse.

    Phase ``p`` conducts on ``[p T/N, p T/N + duty T)`` (modulo T).  The
    switch conductance ramps linearly over ``rise_time`` at both ends of the
    window, inside it, so the window length is the full conduction time.
    """

    f_lo: float
    duty: float = 0.5
    n_phases: int = 4
    rise_time: float | None = None
    # extra delay applied to every phase
    delay: float = 0.0

    def __post_init__(self):
        if not self.f_lo > 0:
            raise ValueError("f_lo must be > 0")
        if not 0 < self.duty <= 1:
            raise ValueError("duty must be in (0, 1]")
        if self.n_phases < 1:
            raise ValueError("n_phases must be >= 1")
        if self.rise_time is None:
            object.__setattr__(self, "rise_time", 0.05 / self.f_lo)
        if self.duty < 1 and not 0 <= 2 * self.rise_time <= self.duty * self.period:
            raise ValueError("rise_time must fit twice inside the conduction window")

    @property
    def period(self) -> float:
        return 1.0 / self.f_lo

    @property
    def tau_overlap(self) -> float:
        return max(0.0, self.duty - 1.0 / self.n_phases) * self.period

    def phase_offset(self, phase: int) -> float:
        return phase * self.period / self.n_phases + self.delay

    def pulse(self, t, phase: int = 0) -> np.ndarray:
        """Switch drive in [0, 1] for ``phase`` at times ``t``."""
        t = np.asarray(t, dtype=float)
        if self.duty >= 1:
            return np.ones_like(t)
        T = self.period
        u = np.mod(t - self.phase_offset(phase), T)
        w = self.duty * T
        tr = self.rise_time
        if tr == 0:
            return (u < w).astype(float)
        up = np.clip(u / tr, 0.0, 1.0)
        down = np.clip((w - u) / tr, 0.0, 1.0)
        return np.minimum(up, down) * (u < w)

    def fourier(self, n, phase: int = 0) -> np.ndarray:
        """Complex Fourier coefficients c_n of :meth:`pulse` (c_n e^{j n w t})."""
        n = np.asarray(n)
        if self.duty >= 1:
            return (n == 0).astype(complex)
        T = self.period
        w0 = 2 * math.pi / T
        tr = self.rise_time
        width = self.duty * T - tr
        x = n * w0
        # trapezoid = rect(width) convolved with unit-area rect(tr)
        c = (width / T) * np.exp(-1j * x * (width + tr) / 2) * np.sinc(x * width / (2 * math.pi))
        if tr > 0:
            c = c * np.sinc(x * tr / (2 * math.pi))
        return c * np.exp(-1j * x * self.phase_offset(phase))
