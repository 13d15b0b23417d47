# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the query-scoring hot kernel.

Mirrors ``_pykernels.conditional_entropy_scores``; the greedy selection loop
evaluates this once per sequence for every candidate query, which dominates
simulation runtime.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log, pow

cnp.import_array()


def conditional_entropy_scores(
    double[::1] p,
    double[:, ::1] like_w,
    double[::1] ft,
    double[::1] fnt,
    double[::1] weights,
    double alpha,
):
    cdef Py_ssize_t c = like_w.shape[0]
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t m = ft.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(c, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef Py_ssize_t j, k, i, q
    cdef double w, mix, marg, post, g, num, den, acc, mx, t
    cdef int support
    cdef bint shannon = alpha == 1.0
    cdef bint min_entropy = alpha == INFINITY
    cdef bint zero_order = alpha == 0.0
    # repeated multiplication beats libm pow for small integer orders
    cdef int ia = <int>alpha if alpha == alpha and alpha < 64.0 else 0
    cdef bint int_alpha = (not shannon and not min_entropy and not zero_order
                           and alpha == <double>ia and 2 <= ia <= 16)

    with nogil:
        for j in range(c):
            num = 0.0
            den = 0.0
            for k in range(m):
                marg = 0.0
                for i in range(n):
                    w = like_w[j, i]
                    marg += p[i] * (w * ft[k] + (1.0 - w) * fnt[k])
                if shannon:
                    g = 0.0
                    for i in range(n):
                        w = like_w[j, i]
                        post = p[i] * (w * ft[k] + (1.0 - w) * fnt[k]) / marg
                        if post > 0.0:
                            g -= post * log(post)
                elif min_entropy:
                    mx = 0.0
                    for i in range(n):
                        w = like_w[j, i]
                        post = p[i] * (w * ft[k] + (1.0 - w) * fnt[k]) / marg
                        if post > mx:
                            mx = post
                    g = -log(mx)
                elif zero_order:
                    support = 0
                    for i in range(n):
                        w = like_w[j, i]
                        if p[i] * (w * ft[k] + (1.0 - w) * fnt[k]) > 0.0:
                            support += 1
                    g = log(<double>support)
                elif int_alpha:
                    acc = 0.0
                    for i in range(n):
                        w = like_w[j, i]
                        post = p[i] * (w * ft[k] + (1.0 - w) * fnt[k]) / marg
                        t = post
                        for q in range(ia - 1):
                            t *= post
                        acc += t
                    g = log(acc) / (1.0 - alpha)
                else:
                    acc = 0.0
                    for i in range(n):
                        w = like_w[j, i]
                        post = p[i] * (w * ft[k] + (1.0 - w) * fnt[k]) / marg
                        if post > 0.0:
                            acc += pow(post, alpha)
                    g = log(acc) / (1.0 - alpha)
                num += weights[k] * marg * g
                den += weights[k] * marg
            out_v[j] = num / den
    return out
