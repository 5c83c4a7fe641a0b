# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory kernels. Semantics mirror ``_kernel_py`` exactly."""

import numpy as np

from libc.math cimport exp, log, sqrt, INFINITY, NAN
from libc.stdlib cimport malloc, free

cdef enum:
    ALG_DOUBLER = 0
    ALG_MULTISBM = 1
    ALG_SPARRING = 2

cdef enum:
    LINK_LINEAR = 0
    LINK_NATURAL = 1
    LINK_LOGIT = 2

_ALG_CODES = {"doubler": ALG_DOUBLER, "multisbm": ALG_MULTISBM, "sparring": ALG_SPARRING}


cdef struct Stream:
    const double* data
    Py_ssize_t n
    Py_ssize_t pos
    bint exhausted


cdef inline double draw(Stream* s) noexcept nogil:
    if s.pos >= s.n:
        s.exhausted = True
        return 0.0
    s.pos += 1
    return s.data[s.pos - 1]


cdef struct UcbBank:
    # m independent UCB machines over k arms, row-major
    Py_ssize_t m
    Py_ssize_t k
    double alpha
    long long* counts
    double* sums
    long long* t


cdef inline void ucb_reset(UcbBank* b, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t x
    for x in range(b.k):
        b.counts[i * b.k + x] = 0
        b.sums[i * b.k + x] = 0.0
    b.t[i] = 1


cdef inline Py_ssize_t ucb_advance(UcbBank* b, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t x, best = 0, off = i * b.k
    cdef long long n
    cdef double scale, val, best_val = -INFINITY
    for x in range(b.k):
        if b.counts[off + x] == 0:
            return x
    scale = (b.alpha + 2.0) * log(<double>b.t[i])
    for x in range(b.k):
        n = b.counts[off + x]
        val = b.sums[off + x] / <double>n + sqrt(scale / (2.0 * <double>n))
        if val > best_val:
            best = x
            best_val = val
    return best


cdef inline void ucb_feedback(UcbBank* b, Py_ssize_t i, Py_ssize_t arm, double r) noexcept nogil:
    b.counts[i * b.k + arm] += 1
    b.sums[i * b.k + arm] += r
    b.t[i] += 1


cdef inline double link_eval(int link, double u, double v) noexcept nogil:
    cdef double s
    if link == LINK_LINEAR:
        return (1.0 + u - v) / 2.0
    if link == LINK_NATURAL:
        s = u + v
        return u / s if s > 0.0 else 0.5
    return 1.0 / (1.0 + exp(v - u))


cdef int bank_alloc(UcbBank* b, Py_ssize_t m, Py_ssize_t k, double alpha):
    b.m = m
    b.k = k
    b.alpha = alpha
    b.counts = <long long*> malloc(m * k * sizeof(long long))
    b.sums = <double*> malloc(m * k * sizeof(double))
    b.t = <long long*> malloc(m * sizeof(long long))
    if b.counts == NULL or b.sums == NULL or b.t == NULL:
        bank_free(b)
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(m):
        ucb_reset(b, i)
    return 0


cdef void bank_free(UcbBank* b) noexcept:
    free(b.counts)
    free(b.sums)
    free(b.t)
    b.counts = NULL
    b.sums = NULL
    b.t = NULL


def simulate_duels(str algorithm, env, double alpha, Py_ssize_t horizon, uniforms):
    """Run one trajectory; returns cumulative (average, choice) regret arrays.

    For a preference-matrix environment the first array holds the matrix
    regret and the second is all NaN.
    """
    if algorithm not in _ALG_CODES:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {tuple(_ALG_CODES)}")
    cdef int alg = _ALG_CODES[algorithm]
    cdef bint matrix = hasattr(env, "epsilon")
    cdef Py_ssize_t k = env.n_arms
    cdef const double[::1] unif = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef double[::1] mu
    cdef double[:, ::1] eps
    cdef int link = 0
    cdef bint bern = False
    cdef double best_value = 0.0
    cdef Py_ssize_t best = 0
    if matrix:
        eps = np.ascontiguousarray(env.epsilon, dtype=np.float64)
        best = env.best_arm
        mu = np.zeros(k)
    else:
        mu = np.ascontiguousarray(env.mu, dtype=np.float64)
        eps = np.zeros((1, 1))
        link = int(env.link)
        bern = env.bernoulli
        best_value = env.best_value

    av_arr = np.empty(horizon)
    ch_arr = np.empty(horizon)
    cdef double[::1] av = av_arr
    cdef double[::1] ch = ch_arr

    cdef Py_ssize_t n_machines = 1 if alg == ALG_DOUBLER else (2 if alg == ALG_SPARRING else k)
    cdef UcbBank bank
    bank_alloc(&bank, n_machines, k, alpha)

    # Doubler's left multiset (this epoch) and right multiset (being built)
    cdef Py_ssize_t* pool = NULL
    cdef Py_ssize_t* next_pool = NULL
    cdef Py_ssize_t* swap
    if alg == ALG_DOUBLER:
        pool = <Py_ssize_t*> malloc((horizon + 2) * sizeof(Py_ssize_t))
        next_pool = <Py_ssize_t*> malloc((horizon + 2) * sizeof(Py_ssize_t))
        if pool == NULL or next_pool == NULL:
            free(pool)
            free(next_pool)
            bank_free(&bank)
            raise MemoryError()

    cdef Stream s
    s.data = &unif[0] if unif.shape[0] > 0 else NULL
    s.n = unif.shape[0]
    s.pos = 0
    s.exhausted = False

    cdef Py_ssize_t t, x = 0, y = 0, pool_len = 1, next_len = 0, machine = 0
    cdef long long steps_left = 2, epoch = 1
    cdef Py_ssize_t prev_right = 0
    cdef double u, v, p_left, acc_av = 0.0, acc_ch = 0.0
    cdef int b

    if alg == ALG_DOUBLER:
        pool[0] = 0

    with nogil:
        for t in range(horizon):
            # propose
            if alg == ALG_DOUBLER:
                x = pool[<Py_ssize_t>(draw(&s) * <double>pool_len)]
                y = ucb_advance(&bank, 0)
                machine = 0
            elif alg == ALG_MULTISBM:
                x = prev_right
                y = ucb_advance(&bank, x)
                machine = x
            else:
                x = ucb_advance(&bank, 0)
                y = ucb_advance(&bank, 1)

            # duel and regret
            if matrix:
                p_left = 0.5 + eps[x, y]
                b = 0 if draw(&s) < p_left else 1
                acc_av += (eps[best, x] + eps[best, y]) / 2.0
                av[t] = acc_av
                ch[t] = NAN
            else:
                if bern:
                    u = 1.0 if draw(&s) < mu[x] else 0.0
                    v = 1.0 if draw(&s) < mu[y] else 0.0
                else:
                    u = mu[x]
                    v = mu[y]
                p_left = link_eval(link, u, v)
                b = 0 if draw(&s) < p_left else 1
                acc_av += best_value - (u + v) / 2.0
                acc_ch += best_value - (u if b == 0 else v)
                av[t] = acc_av
                ch[t] = acc_ch
            if s.exhausted:
                break

            # absorb
            if alg == ALG_SPARRING:
                ucb_feedback(&bank, 0, x, 1.0 if b == 0 else 0.0)
                ucb_feedback(&bank, 1, y, 1.0 if b == 1 else 0.0)
            else:
                ucb_feedback(&bank, machine, y, <double>b)
            if alg == ALG_MULTISBM:
                prev_right = y
            elif alg == ALG_DOUBLER:
                next_pool[next_len] = y
                next_len += 1
                steps_left -= 1
                if steps_left == 0:
                    swap = pool
                    pool = next_pool
                    next_pool = swap
                    pool_len = next_len
                    next_len = 0
                    epoch += 1
                    steps_left = (<long long>1) << epoch
                    ucb_reset(&bank, 0)

    free(pool)
    free(next_pool)
    bank_free(&bank)
    if s.exhausted:
        raise RuntimeError("uniform stream exhausted")
    return av_arr, ch_arr


def simulate_mab_ucb(mu, double alpha, Py_ssize_t horizon, uniforms):
    """Plain UCB on a Bernoulli MAB; returns pull counts per arm."""
    cdef const double[::1] m = np.ascontiguousarray(mu, dtype=np.float64)
    cdef const double[::1] unif = np.ascontiguousarray(uniforms, dtype=np.float64)
    if unif.shape[0] < horizon:
        raise RuntimeError("uniform stream exhausted")
    cdef Py_ssize_t k = m.shape[0], t, arm
    cdef UcbBank bank
    bank_alloc(&bank, 1, k, alpha)
    with nogil:
        for t in range(horizon):
            arm = ucb_advance(&bank, 0)
            ucb_feedback(&bank, 0, arm, 1.0 if unif[t] < m[arm] else 0.0)
    out = np.empty(k, dtype=np.int64)
    cdef long long[::1] o = out
    for arm in range(k):
        o[arm] = bank.counts[arm]
    bank_free(&bank)
    return out
