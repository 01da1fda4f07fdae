"""Conversion-matrix (harmonic balance) solution of the switched network.

For an input at ``f_in`` the periodically switched linear network responds
only at ``f_in + k f_lo``.  Writing the switch conductances as Fourier series
couples those sidebands; truncating to ``|k| <= K`` gives one sparse linear
system whose unknowns are the sideband phasors of every MNA variable.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lo import LoWaveform
from .network import SwitchedNetwork
from .pss import SimulationError


class SingularHarmonicSystem(SimulationError):
    pass


@dataclass
class HarmonicResponse:
    """Sideband phasors ``X[k]`` at ``freqs[k] = f_in + k f_lo``."""

    freqs: np.ndarray
    X: np.ndarray  # (2K+1, n_vars)
    var_names: list
    f_lo: float
    f_rf: float
    source_amplitude: float
    r_s: float
    rf_node: str = "rf"

    @property
    def n_harmonics(self) -> int:
        return (len(self.freqs) - 1) // 2

    def phasor(self, name: str, f: float) -> complex:
        """Cosine-referenced phasor at ``f``; zero for frequencies not present."""
        if name == "0":
            return 0j
        i = self.var_names.index(name)
        tol = 1e-9 * self.f_lo
        hit = np.flatnonzero(np.abs(self.freqs - f) < tol)
        if hit.size:
            return complex(self.X[hit[0], i])
        hit = np.flatnonzero(np.abs(self.freqs + f) < tol)
        if hit.size:
            return complex(np.conj(self.X[hit[0], i]))
        return 0j

    def spectrum(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.freqs), self.X[:, self.var_names.index(name)]

    def power(self, name: str) -> float:
        """Mean-square value implied by the sideband phasors."""
        x = self.X[:, self.var_names.index(name)]
        return float(np.sum(np.abs(x) ** 2) / 2.0)


def harmonic_transfer(
    net: SwitchedNetwork,
    lo: LoWaveform,
    f_in: float,
    n_harmonics: int = 15,
    *,
    tones: dict | None = None,
) -> HarmonicResponse:
    """Solve the conversion-matrix system for inputs at ``f_in``.

    ``tones`` maps external inputs to complex amplitudes (all at ``f_in``);
    by default the source EMF carries ``net.source_amplitude``.
    """
    if n_harmonics < 5:
        raise ValueError("n_harmonics must be >= 5")
    mna = net.mna()
    if tones is None:
        tones = {"src": net.source_amplitude} if "src" in mna.ext_names else {}
    unknown = set(tones) - set(mna.ext_names)
    if unknown:
        raise ValueError(f"unknown inputs: {sorted(unknown)}")
    K = int(n_harmonics)
    ks = np.arange(-K, K + 1)
    freqs = f_in + ks * lo.f_lo
    r = f_in / lo.f_lo
    if abs(2 * r - round(2 * r)) < 1e-9:
        raise SimulationError(
            "f_in is a multiple of f_lo/2; positive and negative sidebands coincide"
        )
    n = mna.n
    nk = len(ks)

    tl = net.netlist.tlines
    idx = net.netlist.node
    nb = n + 2 * len(tl)
    blocks = []
    for f in freqs:
        w = 2 * math.pi * f
        Y = np.zeros((nb, nb), dtype=complex)
        Y[:n, :n] = mna.G0 + 1j * w * mna.C
        # each line adds the currents flowing into it at both ends and the
        # two travelling-wave relations between its terminals
        for j, t in enumerate(tl):
            ia, ib = idx(t.a), idx(t.b)
            ca, cb = n + 2 * j, n + 2 * j + 1
            e = t.atten * np.exp(-1j * w * t.delay)
            Y[ia, ca] += 1.0
            Y[ib, cb] += 1.0
            Y[ca, ia], Y[ca, ca], Y[ca, ib], Y[ca, cb] = 1.0, -t.z0, -e, -e * t.z0
            Y[cb, ib], Y[cb, cb], Y[cb, ia], Y[cb, ca] = 1.0, -t.z0, -e, -e * t.z0
        blocks.append(sp.csr_matrix(Y))
    A = sp.block_diag(blocks, format="csr")
    if mna.switch_stamps:
        coeff = mna.switch_fourier(lo, np.arange(-2 * K, 2 * K + 1))
        diff = ks[:, None] - ks[None, :] + 2 * K
        for j, S in enumerate(mna.switch_stamps):
            T = coeff[j][diff]
            Sb = sp.csr_matrix((S[S != 0], np.nonzero(S)), shape=(nb, nb))
            A = A + sp.kron(sp.csr_matrix(T), Sb, format="csr")

    rhs = np.zeros(nb * nk, dtype=complex)
    for name, amp in tones.items():
        col = mna.B_ext[:, mna.ext_names.index(name)]
        rhs[K * nb:K * nb + n] += amp * col

    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            x = spla.spsolve(A.tocsc(), rhs)
        except (spla.MatrixRankWarning, RuntimeError) as exc:
            raise SingularHarmonicSystem(f"singular harmonic system: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularHarmonicSystem("singular harmonic system: non-finite solution")
    src_amp = tones.get("src", 0.0)
    return HarmonicResponse(
        freqs=freqs,
        X=x.reshape(nk, nb)[:, :n],
        var_names=list(mna.var_names),
        f_lo=lo.f_lo,
        f_rf=f_in,
        source_amplitude=float(abs(src_amp)),
        r_s=net.spec.r_s,
        rf_node=net.rf_node,
    )
