"""Pure Python/numpy mirror of the compiled kernel.

Every function here has the signature and bit-exact output of its
counterpart in ``_kernel.pyx``. The matrix sampler is vectorised over
trials with numpy; the generative sampler is scalar Python and is meant
for small problems and cross-checks.
"""
from __future__ import annotations

import numpy as np

M0, M1 = 0xD2511F53, 0xCD9E8D57
W0, W1 = 0x9E3779B9, 0xBB67AE85
MASK32 = 0xFFFFFFFF
BOTH = 12


def philox4x32(c0, c1, c2, c3, k0, k1):
    """Philox4x32-10 on Python ints."""
    for _ in range(10):
        p0 = M0 * c0
        p1 = M1 * c2
        c0, c1, c2, c3 = (p1 >> 32) ^ c1 ^ k0, p1 & MASK32, (p0 >> 32) ^ c3 ^ k1, p0 & MASK32
        k0 = (k0 + W0) & MASK32
        k1 = (k1 + W1) & MASK32
    return (c0, c1, c2, c3)


def _philox_vec(c0, c1, c2, c3, k0, k1):
    """Philox4x32-10 over uint64 arrays holding 32-bit words."""
    m32 = np.uint64(MASK32)
    s32 = np.uint64(32)
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    for _ in range(10):
        p0 = np.uint64(M0) * c0
        p1 = np.uint64(M1) * c2
        c0, c1, c2, c3 = (p1 >> s32) ^ c1 ^ k0, p1 & m32, (p0 >> s32) ^ c3 ^ k1, p0 & m32
        k0 = (k0 + np.uint64(W0)) & m32
        k1 = (k1 + np.uint64(W1)) & m32
    return c0, c1, c2, c3


def _key(seed):
    return seed & MASK32, (seed >> 32) & MASK32


def uniform_pair(gen, block, trial, seed):
    w = philox4x32(gen, block, trial & MASK32, trial >> 32, *_key(seed))
    return (((w[0] << 32) | w[1]) >> 1, ((w[2] << 32) | w[3]) >> 1)


def matrix_trials(thr, start, seed, first, ti, tj, cap):
    thr = np.ascontiguousarray(thr, dtype=np.uint64)
    if thr.shape != (17, 17):
        raise ValueError("threshold table must be 17 x 17")
    n = ti.shape[0]
    k0, k1 = _key(seed)
    trials = np.uint64(first) + np.arange(n, dtype=np.uint64)
    t_lo = trials & np.uint64(MASK32)
    t_hi = trials >> np.uint64(32)
    state = np.full(n, start, dtype=np.int64)
    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    idx = np.arange(n)
    pending = np.zeros(n, dtype=np.uint64)
    g = 0
    status = 0
    while idx.size:
        if g >= cap:
            status = 1
            break
        st = state[idx]
        live = st < 12
        a[idx] += live | (st == 13) | (st == 14)
        b[idx] += live | (st == 15) | (st == 16)
        if g % 2 == 0:
            gen = np.full(idx.size, g >> 1, dtype=np.uint64)
            w0, w1, w2, w3 = _philox_vec(gen, np.zeros(idx.size, np.uint64), t_lo[idx], t_hi[idx], k0, k1)
            x = ((w0 << np.uint64(32)) | w1) >> np.uint64(1)
            pending[idx] = ((w2 << np.uint64(32)) | w3) >> np.uint64(1)
        else:
            x = pending[idx]
        state[idx] = np.sum(x[:, None] >= thr[st], axis=1)
        idx = idx[state[idx] != BOTH]
        g += 1
    ti[:] = a
    tj[:] = b
    return status


def _classify(ind, ch, ai, aj):
    if not ai and not aj:
        return 12
    if not aj:
        return 14 if ind[0] == ind[1] else 13
    if not ai:
        return 16 if ind[2] == ind[3] else 15
    shared = [(x, y) for x in (0, 1) for y in (0, 1) if ind[x] == ind[2 + y] and ch[x] == ch[2 + y]]
    if len(shared) == 2:
        x, _ = shared[0]
        return 11 if ind[x] == ind[1 - x] else 10
    if len(shared) == 1:
        x, y = shared[0]
        home = ind[x]
        if ind[1 - x] == home:
            return 7
        if ind[3 - y] == home:
            return 8
        return 9 if ind[1 - x] == ind[3 - y] else 6
    if ind[0] == ind[1] and ind[2] == ind[3]:
        return 4
    if ind[0] == ind[1]:
        return 1
    if ind[2] == ind[3]:
        return 2
    mixed = sum(1 for x in (0, 1) for y in (0, 1) if ind[x] == ind[2 + y])
    return (0, 3, 5)[mixed]


def _generation(N, s_thr, r_thr, gen, trial, seed, ind, ch, alive):
    k0, k1 = _key(seed)
    t0, t1 = trial & MASK32, trial >> 32
    order = []
    for L in range(4):
        if alive[L] and ind[L] not in order:
            order.append(ind[L])
    par, rec_u, mend = [], [], []
    for k in range(len(order)):
        w = philox4x32(gen, 2 * k, t0, t1, k0, k1)
        pa = (w[2] * N) >> 32
        if (((w[0] << 32) | w[1]) >> 1) < s_thr:
            pb = pa
        else:
            pb = (w[3] * (N - 1)) >> 32
            if pb >= pa:
                pb += 1
        par += [pa, pb]
        w = philox4x32(gen, 2 * k + 1, t0, t1, k0, k1)
        for pair in ((w[0] << 32) | w[1], (w[2] << 32) | w[3]):
            rec_u.append(pair >> 1)
            mend.append(pair & 1)
    for L in range(4):
        if not alive[L]:
            continue
        slot = 2 * order.index(ind[L]) + ch[L]
        ind[L] = par[slot]
        ch[L] = 1 - mend[slot] if (L >= 2 and rec_u[slot] < r_thr) else mend[slot]


def generative_trials(N, s_thr, r_thr, ind0, ch0, seed, first, ti, tj, cap):
    N, s_thr, r_thr, seed, first = int(N), int(s_thr), int(r_thr), int(seed), int(first)
    status = 0
    for t in range(ti.shape[0]):
        ind = [int(x) for x in ind0]
        ch = [int(x) for x in ch0]
        alive = [True] * 4
        a = b = 0
        g = 0
        while alive[0] or alive[2]:
            if g >= cap:
                status = 1
                break
            _generation(N, s_thr, r_thr, g, first + t, seed, ind, ch, alive)
            g += 1
            if alive[0] and ind[0] == ind[1] and ch[0] == ch[1]:
                alive[0] = alive[1] = False
                a = g
            if alive[2] and ind[2] == ind[3] and ch[2] == ch[3]:
                alive[2] = alive[3] = False
                b = g
        ti[t] = a
        tj[t] = b
    return status


def generative_one_step(N, s_thr, r_thr, ind0, ch0, seed, first, out):
    N, s_thr, r_thr, seed, first = int(N), int(s_thr), int(r_thr), int(seed), int(first)
    for t in range(out.shape[0]):
        ind = [int(x) for x in ind0]
        ch = [int(x) for x in ch0]
        alive = [True] * 4
        _generation(N, s_thr, r_thr, 0, first + t, seed, ind, ch, alive)
        ai = not (ind[0] == ind[1] and ch[0] == ch[1])
        aj = not (ind[2] == ind[3] and ch[2] == ch[3])
        out[t] = _classify(ind, ch, ai, aj)
    return 0
