"""Netlists of the switched receiver and their modified-nodal-analysis matrices.

The network is written as ``C dx/dt + G(t) x = B s(t)`` where ``x`` holds node
voltages, inductor currents and amplifier output currents.  ``G(t)`` is a
static part plus one stamp per switch scaled by its periodic conductance.
Transmission lines are lossless-delay (optionally attenuated) lines: the time
engine uses a method-of-characteristics companion, the harmonic engine their
exact admittance matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..matchsynth import MatchKind
from ..netcore import NEPER_PER_DB
from ..rxmodel import Architecture, ReceiverSpec
from .lo import LoWaveform

GND = "0"


@dataclass
class Switch:
    a: str
    b: str
    phase: int
    r_on: float
    r_off: float
    # None follows the LO; True/False pins the switch
    forced: bool | None = None


@dataclass
class TLine:
    a: str
    b: str
    z0: float
    delay: float
    atten: float = 1.0


@dataclass
class Amplifier:
    """Output voltage obeys ``tau dv_out/dt + v_out = -gain v_in``."""

    inp: str
    out: str
    gain: float
    tau: float = 0.0


@dataclass
class Netlist:
    resistors: list = field(default_factory=list)
    capacitors: list = field(default_factory=list)
    inductors: list = field(default_factory=list)
    switches: list = field(default_factory=list)
    tlines: list = field(default_factory=list)
    amplifiers: list = field(default_factory=list)
    # Norton source: (node, r_s); the excitation is the EMF input "src"
    source: tuple | None = None
    injections: dict = field(default_factory=dict)
    _nodes: dict = field(default_factory=dict)

    def node(self, name: str) -> int:
        if name == GND:
            return -1
        if name not in self._nodes:
            self._nodes[name] = len(self._nodes)
        return self._nodes[name]

    @property
    def node_names(self) -> list[str]:
        return list(self._nodes)

    def add_r(self, a, b, r):
        self.node(a), self.node(b)
        self.resistors.append((a, b, float(r)))

    def add_c(self, a, b, c):
        self.node(a), self.node(b)
        self.capacitors.append((a, b, float(c)))

    def add_l(self, a, b, l, name=None):
        self.node(a), self.node(b)
        self.inductors.append((a, b, float(l), name or f"L{len(self.inductors)}"))

    def add_switch(self, a, b, phase, r_on, r_off, forced=None):
        self.node(a), self.node(b)
        self.switches.append(Switch(a, b, phase, float(r_on), float(r_off), forced))

    def add_tline(self, a, b, z0, delay, atten=1.0):
        self.node(a), self.node(b)
        self.tlines.append(TLine(a, b, float(z0), float(delay), float(atten)))

    def add_amp(self, inp, out, gain, tau=0.0):
        self.node(inp), self.node(out)
        self.amplifiers.append(Amplifier(inp, out, float(gain), float(tau)))

    def set_source(self, node, r_s):
        self.node(node)
        self.source = (node, float(r_s))

    def add_injection(self, name: str, weights: dict[str, float]):
        for n in weights:
            self.node(n)
        self.injections[name] = dict(weights)

    def assemble(self) -> "MnaSystem":
        return MnaSystem(self)


def _stamp_g(mat, i, j, g):
    if i >= 0:
        mat[i, i] += g
    if j >= 0:
        mat[j, j] += g
    if i >= 0 and j >= 0:
        mat[i, j] -= g
        mat[j, i] -= g


class MnaSystem:
    """Static matrices of a :class:`Netlist`."""

    def __init__(self, net: Netlist):
        self.net = net
        nn = len(net._nodes)
        self.n_nodes = nn
        names = list(net._nodes)
        names += [f"i({l[3]})" for l in net.inductors]
        names += [f"i(amp{k})" for k in range(len(net.amplifiers))]
        self.var_names = names
        self.index = {nm: i for i, nm in enumerate(names)}
        n = len(names)
        self.n = n
        G = np.zeros((n, n))
        C = np.zeros((n, n))
        idx = net.node
        for a, b, r in net.resistors:
            _stamp_g(G, idx(a), idx(b), 1.0 / r)
        for a, b, c in net.capacitors:
            _stamp_g(C, idx(a), idx(b), c)
        for k, (a, b, l, _) in enumerate(net.inductors):
            j = nn + k
            ia, ib = idx(a), idx(b)
            if ia >= 0:
                G[ia, j] += 1
                G[j, ia] += 1
            if ib >= 0:
                G[ib, j] -= 1
                G[j, ib] -= 1
            C[j, j] = -l
        for k, amp in enumerate(net.amplifiers):
            j = nn + len(net.inductors) + k
            io, ii = idx(amp.out), idx(amp.inp)
            G[io, j] -= 1
            G[j, io] += 1
            G[j, ii] += amp.gain
            C[j, io] = amp.tau
        self.ext_names = []
        cols = []
        if net.source is not None:
            node, r_s = net.source
            _stamp_g(G, idx(node), -1, 1.0 / r_s)
            col = np.zeros(n)
            col[idx(node)] = 1.0 / r_s
            cols.append(col)
            self.ext_names.append("src")
        for name, weights in net.injections.items():
            col = np.zeros(n)
            for node, w in weights.items():
                col[idx(node)] += w
            cols.append(col)
            self.ext_names.append(name)
        self.B_ext = np.array(cols).T if cols else np.zeros((n, 0))
        self.G0 = G
        self.C = C
        self.switch_stamps = []
        for sw in net.switches:
            S = np.zeros((n, n))
            _stamp_g(S, idx(sw.a), idx(sw.b), 1.0)
            self.switch_stamps.append(S)
        nt = len(net.tlines)
        self.tl_a = np.array([idx(t.a) for t in net.tlines], dtype=np.int64)
        self.tl_b = np.array([idx(t.b) for t in net.tlines], dtype=np.int64)
        B_hist = np.zeros((n, 2 * nt))
        G_tl = np.zeros((n, n))
        for j, t in enumerate(net.tlines):
            _stamp_g(G_tl, idx(t.a), -1, 1.0 / t.z0)
            _stamp_g(G_tl, idx(t.b), -1, 1.0 / t.z0)
            B_hist[idx(t.a), 2 * j] = 1.0
            B_hist[idx(t.b), 2 * j + 1] = 1.0
        self.G_tl_companion = G_tl
        self.B_hist = B_hist

    def switch_conductance(self, lo, t) -> np.ndarray:
        """Conductance of every switch at times ``t``; shape (n_switch, len(t))."""
        t = np.atleast_1d(t)
        out = np.empty((len(self.net.switches), len(t)))
        for k, sw in enumerate(self.net.switches):
            g_on, g_off = 1.0 / sw.r_on, 1.0 / sw.r_off
            if sw.forced is None:
                p = lo.pulse(t, sw.phase)
            else:
                p = np.full(len(t), 1.0 if sw.forced else 0.0)
            out[k] = g_off + (g_on - g_off) * p
        return out

    def switch_fourier(self, lo, n) -> np.ndarray:
        """Fourier coefficients of each switch conductance; shape (n_switch, len(n))."""
        n = np.atleast_1d(n)
        out = np.empty((len(self.net.switches), len(n)), dtype=complex)
        for k, sw in enumerate(self.net.switches):
            g_on, g_off = 1.0 / sw.r_on, 1.0 / sw.r_off
            if sw.forced is None:
                c = lo.fourier(n, sw.phase)
            else:
                c = (n == 0).astype(complex) * (1.0 if sw.forced else 0.0)
            out[k] = (g_on - g_off) * c + g_off * (n == 0)
        return out

    def admittance(self, omega: float) -> np.ndarray:
        """G0 + jwC plus exact transmission-line stamps (switches excluded)."""
        Y = self.G0 + 1j * omega * self.C
        idx = self.net.node
        for t in self.net.tlines:
            gl = -math.log(t.atten) + 1j * omega * t.delay
            sh = np.sinh(gl)
            if abs(sh) < 1e-14:
                raise np.linalg.LinAlgError("transmission line is a multiple of a half wavelength at DC")
            y11 = np.cosh(gl) / (t.z0 * sh)
            y12 = -1.0 / (t.z0 * sh)
            ia, ib = idx(t.a), idx(t.b)
            Y[ia, ia] += y11
            Y[ib, ib] += y11
            Y[ia, ib] += y12
            Y[ib, ia] += y12
        return Y


# --- receiver netlists -----------------------------------------------------

PHASE_NAMES = ("I+", "Q+", "I-", "Q-")


@dataclass
class SwitchedNetwork:
    """A receiver netlist with the handles the measurements need."""

    netlist: Netlist
    spec: ReceiverSpec
    rf_node: str
    switch_nodes: list  # (rf-side node, baseband node) per phase
    bb_nodes: list
    out_nodes: list
    source_amplitude: float = 1.0

    def mna(self) -> MnaSystem:
        return self.netlist.assemble()


def build_network(
    spec: ReceiverSpec,
    *,
    forced: tuple | None = None,
    source: bool = True,
    injections: dict | None = None,
    amp_tau: float = 0.0,
    c_pad: float = 0.0,
    source_amplitude: float = 1.0,
) -> SwitchedNetwork:
    """Build the time-varying netlist of the receiver described by ``spec``.

    The antenna is node ``rf``.  Direct architectures connect all four switches
    to ``rf`` (through a per-path resistor when requested); matched ones split
    into an I branch (node ``xi``, phases 0/180) and a Q branch (``xq``,
    phases 90/270).  Baseband node ``bb<p>`` carries ``c_bb`` and a feedback
    amplifier (``r_f``, gain ``-a_ol``) whose output is ``out<p>``.
    """
    net = Netlist()
    arch = spec.architecture
    if source:
        net.set_source("rf", spec.r_s)
    else:
        net.add_r("rf", GND, spec.r_s)
    if c_pad:
        net.add_c("rf", GND, c_pad)
    if arch is Architecture.SHUNT_RESISTOR:
        net.add_r("rf", GND, spec.r_shunt)

    if arch.split_iq:
        m = spec.match
        branch_nodes = {0: "xi", 1: "xq"}
        for side, x in branch_nodes.items():
            if m.kind is MatchKind.QUARTER_WAVE:
                atten = math.exp(-m.loss_db_per_mm * m.length_mm * NEPER_PER_DB)
                net.add_tline("rf", x, m.z0, 1.0 / (4.0 * m.f_design), atten)
            else:
                net.add_c("rf", GND, m.c_sh)
                tail = x
                if m.inductor_q is not None:
                    mid = f"{x}_r"
                    net.add_r(mid, x, 2 * math.pi * m.f_design * m.l_ser / m.inductor_q)
                    tail = mid
                if m.kind is MatchKind.TUNABLE_L_MATCH:
                    mid = f"{x}_c"
                    net.add_c(mid, tail, m.c_ser)
                    tail = mid
                net.add_l("rf", tail, m.l_ser, name=f"L{x}")
        rf_side = [branch_nodes[p % 2] for p in range(4)]
    else:
        rf_side = ["rf"] * 4

    forced = forced or (None,) * 4
    switch_nodes, bb_nodes, out_nodes = [], [], []
    for p in range(4):
        a = rf_side[p]
        if arch is Architecture.PER_PATH_RESISTOR:
            mid = f"p{p}"
            net.add_r(a, mid, spec.r_path)
            a = mid
        bb, out = f"bb{p}", f"out{p}"
        net.add_switch(a, bb, p, spec.r_sw, spec.r_off, forced[p])
        net.add_c(bb, GND, spec.c_bb)
        net.add_r(bb, out, spec.r_f)
        net.add_amp(bb, out, spec.a_ol, amp_tau)
        switch_nodes.append((a, bb))
        bb_nodes.append(bb)
        out_nodes.append(out)
    for name, weights in (injections or {}).items():
        net.add_injection(name, weights)
    return SwitchedNetwork(net, spec, "rf", switch_nodes, bb_nodes, out_nodes, source_amplitude)


def lo_for(spec: ReceiverSpec, rise_time: float | None = None, delay: float = 0.0) -> LoWaveform:
    """LO drive of ``spec``; ``rise_time=0`` gives ideal switches."""
    rt = spec.rise_frac / spec.f_lo if rise_time is None else rise_time
    return LoWaveform(spec.f_lo, spec.duty, spec.n_phases, rt, delay)
