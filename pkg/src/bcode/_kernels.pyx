# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: bucket combine/eliminate and Pearl node messages."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, calloc, free
from libc.math cimport INFINITY

cnp.import_array()


def combine_reduce(list tables, cnp.int64_t[:, ::1] strides, cnp.int64_t[::1] out_cards,
                   Py_ssize_t elim_card, cnp.int64_t[::1] elim_strides,
                   bint log_domain, bint use_max):
    """Combine flat tables over the output axes plus one eliminated axis.

    ``strides[f, k]`` is the flat-index step of table ``f`` along output axis
    ``k`` (0 if the table lacks that variable). Log-domain tables are added,
    linear ones multiplied; the eliminated axis is reduced with max or sum.
    """
    cdef Py_ssize_t nf = len(tables)
    cdef Py_ssize_t nout = out_cards.shape[0]
    cdef Py_ssize_t total = 1
    cdef Py_ssize_t k, f, v, m
    for k in range(nout):
        total *= out_cards[k]
    out = np.empty(total, dtype=np.float64)
    cdef double[::1] res = out
    cdef const double **tab = <const double **> malloc(nf * sizeof(double *))
    cdef cnp.int64_t *off = <cnp.int64_t *> calloc(nf, sizeof(cnp.int64_t))
    cdef cnp.int64_t *idx = <cnp.int64_t *> calloc(nout if nout > 0 else 1, sizeof(cnp.int64_t))
    cdef const double[::1] view
    cdef double acc, best
    try:
        for f in range(nf):
            view = tables[f]
            tab[f] = &view[0]
        for m in range(total):
            if use_max:
                best = -INFINITY
            else:
                best = 0.0
            for v in range(elim_card):
                if log_domain:
                    acc = 0.0
                    for f in range(nf):
                        acc += tab[f][off[f] + v * elim_strides[f]]
                else:
                    acc = 1.0
                    for f in range(nf):
                        acc *= tab[f][off[f] + v * elim_strides[f]]
                if use_max:
                    if acc > best:
                        best = acc
                else:
                    best += acc
            res[m] = best
            k = nout - 1
            while k >= 0:
                idx[k] += 1
                for f in range(nf):
                    off[f] += strides[f, k]
                if idx[k] < out_cards[k]:
                    break
                for f in range(nf):
                    off[f] -= strides[f, k] * out_cards[k]
                idx[k] = 0
                k -= 1
    finally:
        free(tab)
        free(off)
        free(idx)
    return out


def pearl_messages(const double[::1] cpt, cnp.int64_t[::1] cards, list pis, const double[::1] lam_x):
    """Unnormalized lambda messages to every parent and the node's pi vector.

    ``cpt`` is the flat table over (parents..., child). Returns
    ``(lams, pi_x)`` where ``lams[i]`` is over parent i's domain.
    """
    cdef Py_ssize_t m = cards.shape[0] - 1
    cdef Py_ssize_t cx = cards[m]
    cdef Py_ssize_t i, x, c
    cdef Py_ssize_t nconf = 1
    cdef Py_ssize_t lam_size = 0
    for i in range(m):
        nconf *= cards[i]
        lam_size += cards[i]
    pi_arr = np.zeros(cx, dtype=np.float64)
    lam_arr = np.zeros(lam_size if lam_size > 0 else 1, dtype=np.float64)
    cdef double[::1] pi_x = pi_arr
    cdef double[::1] lam = lam_arr
    cdef const double **pin = <const double **> malloc((m if m > 0 else 1) * sizeof(double *))
    cdef Py_ssize_t *base = <Py_ssize_t *> malloc((m if m > 0 else 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *idx = <Py_ssize_t *> calloc(m if m > 0 else 1, sizeof(Py_ssize_t))
    cdef double *pre = <double *> malloc((m + 1) * sizeof(double))
    cdef double *suf = <double *> malloc((m + 1) * sizeof(double))
    cdef const double[::1] view
    cdef double w, s
    cdef Py_ssize_t acc = 0
    try:
        for i in range(m):
            view = pis[i]
            pin[i] = &view[0]
            base[i] = acc
            acc += cards[i]
        for c in range(nconf):
            pre[0] = 1.0
            for i in range(m):
                pre[i + 1] = pre[i] * pin[i][idx[i]]
            suf[m] = 1.0
            for i in range(m - 1, -1, -1):
                suf[i] = suf[i + 1] * pin[i][idx[i]]
            s = 0.0
            for x in range(cx):
                w = cpt[c * cx + x]
                if w != 0.0:
                    pi_x[x] += w * pre[m]
                    s += w * lam_x[x]
            if s != 0.0:
                for i in range(m):
                    lam[base[i] + idx[i]] += s * pre[i] * suf[i + 1]
            i = m - 1
            while i >= 0:
                idx[i] += 1
                if idx[i] < cards[i]:
                    break
                idx[i] = 0
                i -= 1
    finally:
        free(pin)
        free(base)
        free(idx)
        free(pre)
        free(suf)
    lams = []
    acc = 0
    for i in range(m):
        lams.append(lam_arr[acc:acc + cards[i]].copy())
        acc += cards[i]
    return lams, pi_arr
