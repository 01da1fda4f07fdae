"""Reference (pure NumPy) implementation of the time-stepping kernel.

Semantics are shared with the compiled ``_kernel`` extension; see
:func:`advance`.
"""
import numpy as np


def advance(P, Ea, Eb, ext, tl_a, tl_b, tl_z0, tl_k, tl_d, x, wbuf, n0, nsteps, out):
    """Advance ``x`` from global step ``n0`` by ``nsteps`` steps in place.

    ``x_{n+1} = P[k] x_n + Ea[k] s_n + Eb[k] s_{n+1}`` with ``k = n % len(P)``
    and ``s_n = [ext[n % len(ext)], line history injections at n]``.  The
    state at the start of each step is written to ``out[i]``.  ``wbuf`` holds
    the outgoing characteristic waves of every line in a ring buffer indexed
    by ``n % wbuf.shape[2]``; the entry for ``n0`` must already be present.
    """
    S = P.shape[0]
    ne = ext.shape[0]
    m_ext = ext.shape[1]
    nt = tl_a.shape[0]
    lb = wbuf.shape[2]
    s_now = np.empty(m_ext + 2 * nt)
    s_next = np.empty_like(s_now)

    def fill(s, n):
        s[:m_ext] = ext[n % ne]
        for j in range(nt):
            r = (n - tl_d[j]) % lb
            s[m_ext + 2 * j] = tl_k[j] * wbuf[j, 1, r] / tl_z0[j]
            s[m_ext + 2 * j + 1] = tl_k[j] * wbuf[j, 0, r] / tl_z0[j]

    fill(s_now, n0)
    for i in range(nsteps):
        n = n0 + i
        out[i] = x
        k = n % S
        fill(s_next, n + 1)
        x[:] = P[k] @ x + Ea[k] @ s_now + Eb[k] @ s_next
        r = (n + 1) % lb
        for j in range(nt):
            rd = (n + 1 - tl_d[j]) % lb
            w1 = 2.0 * x[tl_a[j]] - tl_k[j] * wbuf[j, 1, rd]
            w2 = 2.0 * x[tl_b[j]] - tl_k[j] * wbuf[j, 0, rd]
            wbuf[j, 0, r] = w1
            wbuf[j, 1, r] = w2
        s_now, s_next = s_next, s_now
    return x
