# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial loops for the two Monte Carlo samplers.

Randomness is Philox4x32-10 keyed by the 64-bit master seed. The counter
is (generation, block, trial_lo, trial_hi), so every draw is addressed by
where it is used rather than by how many draws came before it. The pure
Python fallback reproduces every draw bit for bit.
"""
from libc.stdint cimport int64_t, uint32_t, uint64_t

DEF NSTATES = 17
DEF BOTH = 12

cdef inline void _philox(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                         uint32_t k0, uint32_t k1, uint32_t* out) noexcept nogil:
    cdef uint64_t p0, p1
    cdef uint32_t y0, y2
    cdef int i
    for i in range(10):
        p0 = <uint64_t>0xD2511F53 * c0
        p1 = <uint64_t>0xCD9E8D57 * c2
        y0 = (<uint32_t>(p1 >> 32)) ^ c1 ^ k0
        y2 = (<uint32_t>(p0 >> 32)) ^ c3 ^ k1
        c1 = <uint32_t>p1
        c3 = <uint32_t>p0
        c0 = y0
        c2 = y2
        k0 = k0 + <uint32_t>0x9E3779B9
        k1 = k1 + <uint32_t>0xBB67AE85
    out[0] = c0
    out[1] = c1
    out[2] = c2
    out[3] = c3


cdef inline void _draw2(uint32_t gen, uint32_t block, uint64_t trial, uint64_t seed,
                        uint64_t* u) noexcept nogil:
    """Two 63-bit uniforms for one (generation, block, trial)."""
    cdef uint32_t w[4]
    _philox(gen, block, <uint32_t>trial, <uint32_t>(trial >> 32),
            <uint32_t>seed, <uint32_t>(seed >> 32), w)
    u[0] = ((<uint64_t>w[0] << 32) | w[1]) >> 1
    u[1] = ((<uint64_t>w[2] << 32) | w[3]) >> 1


def philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3, uint32_t k0, uint32_t k1):
    cdef uint32_t w[4]
    _philox(c0, c1, c2, c3, k0, k1, w)
    return (w[0], w[1], w[2], w[3])


def uniform_pair(uint32_t gen, uint32_t block, uint64_t trial, uint64_t seed):
    cdef uint64_t u[2]
    _draw2(gen, block, trial, seed, u)
    return (u[0], u[1])


def matrix_trials(const uint64_t[:, ::1] thr, int start, uint64_t seed, uint64_t first,
                  int64_t[::1] ti, int64_t[::1] tj, int64_t cap):
    """Walk the 17-state chain from ``start`` for trials first, first+1, ...

    Returns 0, or 1 if some trial hit the step cap.
    """
    cdef Py_ssize_t n = ti.shape[0], t
    cdef int state, col
    cdef int64_t g, a, b
    cdef uint64_t u[2]
    cdef uint64_t x
    cdef int status = 0
    if thr.shape[0] != NSTATES or thr.shape[1] != NSTATES:
        raise ValueError("threshold table must be 17 x 17")
    with nogil:
        for t in range(n):
            state = start
            g = 0
            a = 0
            b = 0
            while state != BOTH:
                if g >= cap:
                    status = 1
                    break
                if state < 12 or state == 13 or state == 14:
                    a += 1
                if state < 12 or state == 15 or state == 16:
                    b += 1
                if (g & 1) == 0:
                    _draw2(<uint32_t>(g >> 1), 0, first + t, seed, u)
                    x = u[0]
                else:
                    x = u[1]
                col = 0
                while x >= thr[state, col]:
                    col += 1
                state = col
                g += 1
            ti[t] = a
            tj[t] = b
    return status


cdef inline int _classify(int64_t* ind, int64_t* ch, int ai, int aj) noexcept nogil:
    cdef int x, y, sx = 0, sy = 0, nshared = 0, mixed = 0
    cdef int64_t home
    if not ai and not aj:
        return 12
    if not aj:
        return 14 if ind[0] == ind[1] else 13
    if not ai:
        return 16 if ind[2] == ind[3] else 15
    for x in range(2):
        for y in range(2):
            if ind[x] == ind[2 + y] and ch[x] == ch[2 + y]:
                if nshared == 0:
                    sx = x
                    sy = y
                nshared += 1
    if nshared == 2:
        return 11 if ind[sx] == ind[1 - sx] else 10
    if nshared == 1:
        home = ind[sx]
        if ind[1 - sx] == home:
            return 7
        if ind[3 - sy] == home:
            return 8
        return 9 if ind[1 - sx] == ind[3 - sy] else 6
    if ind[0] == ind[1] and ind[2] == ind[3]:
        return 4
    if ind[0] == ind[1]:
        return 1
    if ind[2] == ind[3]:
        return 2
    for x in range(2):
        for y in range(2):
            if ind[x] == ind[2 + y]:
                mixed += 1
    return 0 if mixed == 0 else (3 if mixed == 1 else 5)


cdef inline void _generation(int64_t N, uint64_t s_thr, uint64_t r_thr, uint32_t gen,
                             uint64_t trial, uint64_t seed,
                             int64_t* ind, int64_t* ch, int* alive) noexcept nogil:
    """Move every live lineage one generation back.

    Individuals are numbered k = 0, 1, ... in order of first appearance
    over the live lineages. Block 2k draws the selfing flag and the two
    parents of individual k; block 2k + 1 draws, per chromosome, the
    recombination flag (high 63 bits of a word pair) and the Mendelian
    parental chromosome (low bit of the same pair).
    """
    cdef int64_t order[4]
    cdef int64_t par[8]
    cdef uint64_t rec_u[8]
    cdef int64_t mend[8]
    cdef uint32_t w[4]
    cdef int nind = 0, k, L, slot
    cdef int64_t pa, pb
    cdef uint64_t pair
    cdef int64_t new_ind[4]
    cdef int64_t new_ch[4]
    cdef uint32_t k0 = <uint32_t>seed, k1 = <uint32_t>(seed >> 32)
    cdef uint32_t t0 = <uint32_t>trial, t1 = <uint32_t>(trial >> 32)
    for L in range(4):
        if not alive[L]:
            continue
        k = 0
        while k < nind and order[k] != ind[L]:
            k += 1
        if k == nind:
            order[nind] = ind[L]
            nind += 1
    for k in range(nind):
        _philox(gen, 2 * k, t0, t1, k0, k1, w)
        pa = <int64_t>((<uint64_t>w[2] * <uint64_t>N) >> 32)
        if (((<uint64_t>w[0] << 32) | w[1]) >> 1) < s_thr:
            pb = pa
        else:
            pb = <int64_t>((<uint64_t>w[3] * <uint64_t>(N - 1)) >> 32)
            if pb >= pa:
                pb += 1
        par[2 * k] = pa
        par[2 * k + 1] = pb
        _philox(gen, 2 * k + 1, t0, t1, k0, k1, w)
        pair = (<uint64_t>w[0] << 32) | w[1]
        rec_u[2 * k] = pair >> 1
        mend[2 * k] = <int64_t>(pair & 1)
        pair = (<uint64_t>w[2] << 32) | w[3]
        rec_u[2 * k + 1] = pair >> 1
        mend[2 * k + 1] = <int64_t>(pair & 1)
    for L in range(4):
        if not alive[L]:
            continue
        k = 0
        while order[k] != ind[L]:
            k += 1
        slot = 2 * k + <int>ch[L]
        new_ind[L] = par[slot]
        if L >= 2 and rec_u[slot] < r_thr:
            new_ch[L] = 1 - mend[slot]
        else:
            new_ch[L] = mend[slot]
    for L in range(4):
        if alive[L]:
            ind[L] = new_ind[L]
            ch[L] = new_ch[L]


def generative_trials(int64_t N, uint64_t s_thr, uint64_t r_thr,
                      const int64_t[::1] ind0, const int64_t[::1] ch0,
                      uint64_t seed, uint64_t first,
                      int64_t[::1] ti, int64_t[::1] tj, int64_t cap):
    """Trace four lineages through the population until both loci coalesce."""
    cdef Py_ssize_t n = ti.shape[0], t
    cdef int64_t ind[4]
    cdef int64_t ch[4]
    cdef int alive[4]
    cdef int L, status = 0
    cdef int64_t g
    with nogil:
        for t in range(n):
            for L in range(4):
                ind[L] = ind0[L]
                ch[L] = ch0[L]
                alive[L] = 1
            ti[t] = 0
            tj[t] = 0
            g = 0
            while alive[0] or alive[2]:
                if g >= cap:
                    status = 1
                    break
                _generation(N, s_thr, r_thr, <uint32_t>g, first + t, seed, ind, ch, alive)
                g += 1
                if alive[0] and ind[0] == ind[1] and ch[0] == ch[1]:
                    alive[0] = 0
                    alive[1] = 0
                    ti[t] = g
                if alive[2] and ind[2] == ind[3] and ch[2] == ch[3]:
                    alive[2] = 0
                    alive[3] = 0
                    tj[t] = g
    return status


def generative_one_step(int64_t N, uint64_t s_thr, uint64_t r_thr,
                        const int64_t[::1] ind0, const int64_t[::1] ch0,
                        uint64_t seed, uint64_t first, int64_t[::1] out):
    """State index (0..16) reached after one generation, per trial."""
    cdef Py_ssize_t n = out.shape[0], t
    cdef int64_t ind[4]
    cdef int64_t ch[4]
    cdef int alive[4]
    cdef int L
    with nogil:
        for t in range(n):
            for L in range(4):
                ind[L] = ind0[L]
                ch[L] = ch0[L]
                alive[L] = 1
            _generation(N, s_thr, r_thr, 0, first + t, seed, ind, ch, alive)
            if ind[0] == ind[1] and ch[0] == ch[1]:
                alive[0] = 0
            if ind[2] == ind[3] and ch[2] == ch[3]:
                alive[2] = 0
            out[t] = _classify(ind, ch, alive[0], alive[2])
    return 0
