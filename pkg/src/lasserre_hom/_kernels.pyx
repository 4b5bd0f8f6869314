# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_fallback`` for the reference Python versions."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def hom_pinned(int n, const unsigned char[:, ::1] gadj, long long[::1] ptr, int[::1] idx,
               const unsigned char[::1] loops, int k, int npinned):
    """Count homomorphisms of a k-vertex pattern into a graph, grouped by the
    images of the first ``npinned`` pattern vertices.

    Pattern vertex ``i`` must be adjacent to ``idx[ptr[i]:ptr[i+1]]`` (all earlier
    vertices) and carries a loop iff ``loops[i]``.  Returns an int64 vector of
    length ``n**npinned`` indexed row-major by the pinned images.
    """
    cdef Py_ssize_t size = 1
    cdef int i
    for i in range(npinned):
        size *= n
    out_arr = np.zeros(size, dtype=np.int64)
    cdef long long[::1] out = out_arr
    if k == 0:
        out[0] = 1
        return out_arr
    img_arr = np.full(k, -1, dtype=np.int64)
    cdef long long[::1] img = img_arr
    cdef int depth = 0, x, ok
    cdef long long j, p
    cdef Py_ssize_t pos
    while depth >= 0:
        img[depth] += 1
        if img[depth] >= n:
            img[depth] = -1
            depth -= 1
            continue
        x = <int>img[depth]
        if loops[depth] and not gadj[x, x]:
            continue
        ok = 1
        for j in range(ptr[depth], ptr[depth + 1]):
            if not gadj[x, img[idx[j]]]:
                ok = 0
                break
        if not ok:
            continue
        if depth == k - 1:
            pos = 0
            for p in range(npinned):
                pos = pos * n + img[p]
            out[pos] += 1
        else:
            depth += 1
    return out_arr


cdef int _cmp(Py_ssize_t a, Py_ssize_t b, long long[::1] col, long long[::1] ptr, long long[::1] nbc):
    # lexicographic order of (col[v], sorted neighbour colours), as Python tuples compare
    cdef Py_ssize_t la, lb, j, m
    if col[a] != col[b]:
        return -1 if col[a] < col[b] else 1
    la = ptr[a + 1] - ptr[a]
    lb = ptr[b + 1] - ptr[b]
    m = la if la < lb else lb
    for j in range(m):
        if nbc[ptr[a] + j] != nbc[ptr[b] + j]:
            return -1 if nbc[ptr[a] + j] < nbc[ptr[b] + j] else 1
    if la != lb:
        return -1 if la < lb else 1
    return 0


cdef void _isort(long long[::1] arr, Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t i, j
    cdef long long x
    for i in range(lo + 1, hi):
        x = arr[i]
        j = i - 1
        while j >= lo and arr[j] > x:
            arr[j + 1] = arr[j]
            j -= 1
        arr[j + 1] = x


cdef long long _refine(Py_ssize_t n, long long[::1] ptr, int[::1] idx, long long[::1] col, long long ncls,
                       long long[::1] nbc, long long[::1] new, long long[::1] order):
    # in place; returns the final class count
    cdef Py_ssize_t v, j, m
    cdef long long newcls, x
    while True:
        for v in range(n):
            for j in range(ptr[v], ptr[v + 1]):
                nbc[j] = col[idx[j]]
            _isort(nbc, ptr[v], ptr[v + 1])
        for m in range(n):
            order[m] = m
        for m in range(1, n):
            x = order[m]
            j = m - 1
            while j >= 0 and _cmp(order[j], x, col, ptr, nbc) > 0:
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = x
        newcls = 0
        new[order[0]] = 0
        for m in range(1, n):
            if _cmp(order[m - 1], order[m], col, ptr, nbc) != 0:
                newcls += 1
            new[order[m]] = newcls
        newcls += 1
        for v in range(n):
            col[v] = new[v]
        if newcls == ncls:
            return newcls
        ncls = newcls


def refine_colours(long long[::1] ptr, int[::1] idx, long long[::1] col_in):
    """Coarsest equitable refinement of a vertex colouring (ranks preserve cell order).

    Adjacency in CSR form.  Each pass orders vertices by (colour, sorted
    neighbour colours) and assigns dense ranks, until the class count is stable.
    """
    cdef Py_ssize_t n = col_in.shape[0]
    col_arr = np.array(col_in, dtype=np.int64)
    if n == 0:
        return col_arr
    cdef long long ncls = len(set(col_arr.tolist()))
    _refine(n, ptr, idx, col_arr, ncls, np.zeros(ptr[n], dtype=np.int64),
            np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64))
    return col_arr


cdef bint _next_perm(long long[::1] a, Py_ssize_t lo, Py_ssize_t hi):
    # lexicographic successor of a[lo:hi]; False (and reset to sorted) after the last one
    cdef Py_ssize_t i = hi - 2, j, l, r
    cdef long long tmp
    while i >= lo and a[i] >= a[i + 1]:
        i -= 1
    if i < lo:
        l, r = lo, hi - 1
        while l < r:
            tmp = a[l]; a[l] = a[r]; a[r] = tmp
            l += 1; r -= 1
        return False
    j = hi - 1
    while a[j] <= a[i]:
        j -= 1
    tmp = a[i]; a[i] = a[j]; a[j] = tmp
    l, r = i + 1, hi - 1
    while l < r:
        tmp = a[l]; a[l] = a[r]; a[r] = tmp
        l += 1; r -= 1
    return True


# scratch space for graphs on at most 64 vertices (the GIL serialises callers)
_nbc_buf = np.zeros(64 * 64, dtype=np.int64)
_new_buf = np.zeros(64, dtype=np.int64)
_tmp_buf = np.zeros(64, dtype=np.int64)
_ord_buf = np.zeros(64, dtype=np.int64)
_start_buf = np.zeros(65, dtype=np.int64)
_pos_buf = np.zeros(64, dtype=np.int64)
_cur_buf = np.zeros(64, dtype=np.uint64)
cdef long long[::1] _nbc = _nbc_buf
cdef long long[::1] _newc = _new_buf
cdef long long[::1] _tmp = _tmp_buf
cdef long long[::1] _ord = _ord_buf
cdef long long[::1] _start = _start_buf
cdef long long[::1] _pos = _pos_buf
cdef unsigned long long[::1] _cur = _cur_buf


cdef bint _cell_core(Py_ssize_t n, long long[::1] ptr, int[::1] idx, const unsigned char[::1] loops,
                     long long[::1] col, long long cap, long long[::1] bord, unsigned long long[::1] best):
    # n <= 64; refines col in place, writes the best order and code; False when over cap
    cdef long long ncls = 0
    cdef Py_ssize_t c, m, v, j, k
    cdef long long total = 1, f
    cdef long long[::1] order = _ord, start = _start, pos = _pos
    cdef unsigned long long[::1] cur = _cur
    if n == 0:
        return True
    for v in range(n):
        if col[v] + 1 > ncls:
            ncls = col[v] + 1
    ncls = _refine(n, ptr, idx, col, ncls, _nbc, _newc, _tmp)
    # vertices sorted by (colour, id): cells are contiguous, each starts sorted
    for c in range(ncls + 1):
        start[c] = 0
    for m in range(n):
        start[col[m] + 1] += 1
    for c in range(ncls):
        start[c + 1] += start[c]
        f = 1
        for k in range(2, start[c + 1] - start[c] + 1):
            f *= k
            if f > cap:
                return False
        total *= f
        if total > cap:
            return False
    for c in range(ncls):
        _tmp[c] = start[c]
    for v in range(n):
        order[_tmp[col[v]]] = v
        _tmp[col[v]] += 1
    cdef bint have = False, better, more
    cdef unsigned long long row
    while True:
        for m in range(n):
            pos[order[m]] = m
        better = not have
        for m in range(n):
            v = order[m]
            row = (<unsigned long long>1) << pos[v] if loops[v] else 0
            for j in range(ptr[v], ptr[v + 1]):
                row |= (<unsigned long long>1) << pos[idx[j]]
            cur[m] = row
            if not better:
                if row < best[m]:
                    better = True
                elif row > best[m]:
                    break
        if better:
            for m in range(n):
                best[m] = cur[m]
                bord[m] = order[m]
            have = True
        # odometer over the cells, last cell fastest
        more = False
        for c in range(ncls - 1, -1, -1):
            if _next_perm(order, start[c], start[c + 1]):
                more = True
                break
        if not more:
            return True


def cell_code(long long[::1] ptr, int[::1] idx, const unsigned char[::1] loops, long long[::1] col_in,
              long long cap):
    """Refine ``col_in``, then minimise the adjacency code over all vertex orders
    that list the cells in colour order.

    The code of an order is the tuple of adjacency bitmasks (loop bit included)
    of the vertices in that order, renumbered by position.  Returns
    ``(refined colours, order, code)``, or ``None`` when the number of orders
    exceeds ``cap`` or ``n > 64``.
    """
    cdef Py_ssize_t n = col_in.shape[0]
    if n > 64:
        return None
    col_arr = np.array(col_in, dtype=np.int64)
    best_ord = np.zeros(n, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.uint64)
    if not _cell_core(n, ptr, idx, loops, col_arr, cap, best_ord, best_arr):
        return None
    return col_arr, best_ord, tuple(int(x) for x in best_arr)


cdef Py_ssize_t _find(long long[::1] parent, Py_ssize_t x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


_parent_buf = np.zeros(128, dtype=np.int64)
_ren_buf = np.zeros(128, dtype=np.int64)
_lab_buf = np.zeros(128, dtype=np.int64)
_mask_buf = np.zeros(64, dtype=np.uint64)
_ptr_buf = np.zeros(65, dtype=np.int64)
_idx_buf = np.zeros(64 * 64, dtype=np.int32)
_col_buf = np.zeros(64, dtype=np.int64)
_loops_buf = np.zeros(64, dtype=np.uint8)
_bord_buf = np.zeros(64, dtype=np.int64)
_best_buf = np.zeros(64, dtype=np.uint64)
cdef long long[::1] _parent = _parent_buf
cdef long long[::1] _ren = _ren_buf
cdef long long[::1] _lab = _lab_buf
cdef unsigned long long[::1] _mask = _mask_buf
cdef long long[::1] _ptr = _ptr_buf
cdef int[::1] _idx = _idx_buf
cdef long long[::1] _col = _col_buf
cdef unsigned char[::1] _loops = _loops_buf
cdef long long[::1] _bord = _bord_buf
cdef unsigned long long[::1] _best = _best_buf


def glue_code(int t, long long na, long long[::1] la, unsigned long long[::1] ma,
              long long nb, long long[::1] lb, unsigned long long[::1] mb,
              bint par, long long cap, long long max_n):
    """Series (``par`` false) or parallel composition of two bilabelled graphs
    given as label arrays (length ``2t``) and adjacency bitmasks, plus its key.

    Returns ``None`` when the result has a loop or more than ``max_n`` vertices
    (``max_n <= 64``); otherwise ``(n, labels, masks, key)`` where ``key`` is
    ``(n, canonical positions of the labels, code)`` or ``None`` when the cells
    allow more than ``cap`` orders.  The initial colour of a vertex is the
    bitmask of label positions it carries, ranked by value.
    """
    cdef Py_ssize_t total = na + nb, p, u, v, ru, rv, n = 0, m
    cdef int tt = 2 * t
    cdef long long[::1] parent = _parent, ren = _ren, lab = _lab, ptr = _ptr, col = _col, tmp = _tmp
    cdef unsigned long long[::1] mask = _mask
    cdef int[::1] idx = _idx
    cdef unsigned long long bits
    if max_n > 64:
        raise ValueError("glue_code handles at most 64 vertices")
    if total > 128 or tt > 64:
        raise ValueError("glue_code inputs too large")
    for u in range(total):
        parent[u] = u
    for p in range(tt):
        if par:
            ru, rv = _find(parent, la[p]), _find(parent, na + lb[p])
        elif p < t:
            ru, rv = _find(parent, la[t + p]), _find(parent, na + lb[p])
        else:
            continue
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    for u in range(total):
        if _find(parent, u) == u:
            if n == max_n:
                return None
            ren[u] = n
            n += 1
    for u in range(total):
        ren[u] = ren[_find(parent, u)]
    for p in range(tt):
        if par or p < t:
            lab[p] = ren[la[p]]
        else:
            lab[p] = ren[na + lb[p]]
    for u in range(n):
        mask[u] = 0
    for u in range(total):
        bits = ma[u] if u < na else mb[u - na]
        ru = ren[u]
        v = 0
        while bits:
            if bits & 1:
                rv = ren[v if u < na else v + na]
                if ru == rv:
                    return None
                mask[ru] |= (<unsigned long long>1) << rv
                mask[rv] |= (<unsigned long long>1) << ru
            bits >>= 1
            v += 1
    # CSR
    ptr[0] = 0
    m = 0
    for u in range(n):
        bits = mask[u]
        v = 0
        while bits:
            if bits & 1:
                idx[m] = v
                m += 1
            bits >>= 1
            v += 1
        ptr[u + 1] = m
    # label-position colours, then dense ranks of their values
    for u in range(n):
        col[u] = 0
        _loops[u] = 0
    for p in range(tt):
        col[lab[p]] |= (<long long>1) << p
    for u in range(n):
        tmp[u] = col[u]
    _isort(tmp, 0, n)
    for u in range(n):
        m = 0
        for v in range(1, n):
            if tmp[v] != tmp[v - 1] and tmp[v] <= col[u]:
                m += 1
        _newc[u] = m
    for u in range(n):
        col[u] = _newc[u]
    labels = tuple([lab[p] for p in range(tt)])
    masks = tuple([mask[u] for u in range(n)])
    if not _cell_core(n, ptr, idx, _loops, col, cap, _bord, _best):
        return n, labels, masks, None
    for m in range(n):
        tmp[_bord[m]] = m
    key = (n, tuple([tmp[lab[p]] for p in range(tt)]), tuple([_best[m] for m in range(n)]))
    return n, labels, masks, key
