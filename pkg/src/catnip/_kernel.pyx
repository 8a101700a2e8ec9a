# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pq-gram enumeration kernel.

Semantics match catnip.pqgram._profile_counts_py exactly: one gram per
(anchor, q-wide child window) over the dummy-extended tree, counted with
multiplicity. Works on the flattened-array tree produced by flatten_tree.
"""

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF


cdef inline object _make_gram(list slots, Py_ssize_t width):
    cdef object gram = PyTuple_New(width)
    cdef Py_ssize_t i
    cdef object item
    for i in range(width):
        item = slots[i]
        Py_INCREF(item)
        PyTuple_SET_ITEM(gram, i, item)
    return gram


def profile_counts(list labels, parents, child_start, child_index, int p, int q):
    """Return {gram tuple: multiplicity} for one flattened tree."""
    cdef int[::1] par = parents
    cdef int[::1] cstart = child_start
    cdef int[::1] cidx = child_index
    cdef Py_ssize_t n = len(labels)
    cdef int width = p + q
    cdef dict counts = {}
    cdef object dummy = "*"
    cdef list slots = [dummy] * width
    cdef list window = []
    cdef Py_ssize_t v, i, j, k, kids, depth, up
    cdef object gram, prev

    for v in range(n):
        # ancestor part: p-1 nearest ancestors (furthest first), then anchor
        depth = 0
        up = par[v]
        while up >= 0 and depth < p - 1:
            depth += 1
            up = par[up]
        for i in range(p - 1 - depth):
            slots[i] = dummy
        up = par[v]
        for i in range(depth):
            slots[p - 2 - i] = labels[up]
            up = par[up]
        slots[p - 1] = labels[v]

        kids = cstart[v + 1] - cstart[v]
        if kids == 0:
            for i in range(q):
                slots[p + i] = dummy
            gram = _make_gram(slots, width)
            prev = counts.get(gram)
            counts[gram] = 1 if prev is None else <object>prev + 1
            continue

        del window[:]
        for i in range(q - 1):
            window.append(dummy)
        for i in range(kids):
            window.append(labels[cidx[cstart[v] + i]])
        for i in range(q - 1):
            window.append(dummy)
        for j in range(kids + q - 1):
            for k in range(q):
                slots[p + k] = window[j + k]
            gram = _make_gram(slots, width)
            prev = counts.get(gram)
            counts[gram] = 1 if prev is None else <object>prev + 1
    return counts
