"""Compiled inner loops. Tables are uint8 arrays indexed [x, y] -> x*y."""

import numpy as np
from numba import njit

# -- span bookkeeping (vectors are ints, reduced basis kept sorted descending) --


@njit(cache=True)
def _reduce(red, cnt, v):
    for i in range(cnt):
        w = v ^ red[i]
        if w < v:
            v = w
    return v


@njit(cache=True)
def _insert(red, cnt, r):
    # keeps red sorted by decreasing value so _reduce clears leading bits in order
    i = cnt
    while i > 0 and red[i - 1] < r:
        red[i] = red[i - 1]
        i -= 1
    red[i] = r
    return cnt + 1


@njit(cache=True)
def gen_basis(T, e, gens, d, B):
    """Deterministic basis grown from the identity and ``gens`` by products.

    Returns the number of independent elements reached (``d`` when the
    generators generate the whole algebra) or -1 when the generators are
    linearly dependent together with the identity.
    """
    red = np.zeros(d + 1, dtype=np.int64)
    cnt = 0
    B[0] = e
    cnt = _insert(red, cnt, e)
    n = 1
    for i in range(gens.shape[0]):
        v = gens[i]
        r = _reduce(red, cnt, v)
        if r == 0:
            return -1
        B[n] = v
        n += 1
        cnt = _insert(red, cnt, r)
    k = 1
    while k < n and n < d:
        for i in range(k + 1):
            for side in range(2):
                if side == 0:
                    p = np.int64(T[B[k], B[i]])
                else:
                    p = np.int64(T[B[i], B[k]])
                r = _reduce(red, cnt, p)
                if r != 0:
                    B[n] = p
                    n += 1
                    cnt = _insert(red, cnt, r)
                    if n == d:
                        return n
        k += 1
    return n


@njit(cache=True)
def coord_map(B, d, coord):
    """coord[x] = bitmask of x in basis B (B spans everything)."""
    q = 1 << d
    elem = np.zeros(q, dtype=np.int64)
    coord[0] = 0
    for s in range(1, q):
        low = s & (-s)
        idx = 0
        while (1 << idx) != low:
            idx += 1
        elem[s] = elem[s ^ low] ^ B[idx]
        coord[elem[s]] = s


@njit(cache=True)
def _form(T, B, d, coord, out):
    for i in range(d):
        for j in range(d):
            out[i * d + j] = coord[T[B[i], B[j]]]


@njit(cache=True)
def _cmp(a, b):
    for i in range(a.shape[0]):
        if a[i] < b[i]:
            return -1
        if a[i] > b[i]:
            return 1
    return 0


@njit(cache=True)
def _next_tuple(idx, q):
    # odometer over tuples with entries in 1..q-1
    i = idx.shape[0] - 1
    while i >= 0:
        idx[i] += 1
        if idx[i] < q:
            return True
        idx[i] = 1
        i -= 1
    return False


@njit(cache=True)
def canon(T, e, d):
    """Canonical form of a semifield table.

    Returns ``(k, form, gens)``: the minimal number of generators ``k``, the
    lexicographically smallest structure-constant array over all generating
    k-tuples, and every k-tuple attaining it (one row per automorphism).
    """
    q = 1 << d
    nn = d * d
    B = np.zeros(d, dtype=np.int64)
    coord = np.zeros(q, dtype=np.int64)
    best = np.zeros(nn, dtype=np.uint8)
    cur = np.zeros(nn, dtype=np.uint8)
    if d == 1:
        return 0, best, np.zeros((1, 0), dtype=np.int64)
    for k in range(1, d):
        cap = 1
        for _ in range(k):
            cap *= q - 1
        gens = np.zeros((cap, k), dtype=np.int64)
        count = 0
        idx = np.ones(k, dtype=np.int64)
        have = False
        while True:
            ok = True
            for i in range(k):
                if idx[i] == e:
                    ok = False
                    break
            if ok:
                n = gen_basis(T, e, idx, d, B)
                if n == d:
                    coord_map(B, d, coord)
                    _form(T, B, d, coord, cur)
                    c = 1 if not have else _cmp(cur, best)
                    if not have or c < 0:
                        best[:] = cur
                        have = True
                        count = 0
                        gens[count, :] = idx
                        count += 1
                    elif c == 0:
                        gens[count, :] = idx
                        count += 1
            if not _next_tuple(idx, q):
                break
        if have:
            return k, best, gens[:count].copy()
    return -1, best, np.zeros((0, 1), dtype=np.int64)


@njit(cache=True)
def isotope(T, a, b, out):
    """Principal isotope: x o y = r*s with r*b = x and a*s = y. Returns identity a*b."""
    q = T.shape[0]
    rinv = np.zeros(q, dtype=np.int64)
    linv = np.zeros(q, dtype=np.int64)
    for r in range(q):
        rinv[T[r, b]] = r
        linv[T[a, r]] = r
    for x in range(q):
        rx = rinv[x]
        for y in range(q):
            out[x, y] = T[rx, linv[y]]
    return np.int64(T[a, b])


@njit(cache=True)
def plane_scan(T, d):
    """Canonical data of every principal isotope, row index (a-1)*(q-1)+(b-1)."""
    q = 1 << d
    Q = q - 1
    ks = np.zeros(Q * Q, dtype=np.int64)
    forms = np.zeros((Q * Q, d * d), dtype=np.uint8)
    auts = np.zeros(Q * Q, dtype=np.int64)
    Tab = np.zeros((q, q), dtype=np.uint8)
    for a in range(1, q):
        for b in range(1, q):
            e = isotope(T, a, b, Tab)
            k, form, gens = canon(Tab, e, d)
            i = (a - 1) * Q + (b - 1)
            ks[i] = k
            forms[i, :] = form
            auts[i] = gens.shape[0]
    return ks, forms, auts


@njit(cache=True)
def iso_maps(T1, e1, T2, e2, d):
    """All isomorphisms T1 -> T2 as element permutations (one row each)."""
    q = 1 << d
    k1, f1, g1 = canon(T1, e1, d)
    k2, f2, g2 = canon(T2, e2, d)
    if k1 != k2 or _cmp(f1, f2) != 0:
        return np.zeros((0, q), dtype=np.int64)
    B0 = np.zeros(d, dtype=np.int64)
    gen_basis(T1, e1, g1[0], d, B0)
    coord0 = np.zeros(q, dtype=np.int64)
    coord_map(B0, d, coord0)
    out = np.zeros((g2.shape[0], q), dtype=np.int64)
    B1 = np.zeros(d, dtype=np.int64)
    for m in range(g2.shape[0]):
        gen_basis(T2, e2, g2[m], d, B1)
        for x in range(q):
            s = coord0[x]
            y = 0
            i = 0
            while s:
                if s & 1:
                    y ^= B1[i]
                s >>= 1
                i += 1
            out[m, x] = y
    return out


@njit(cache=True)
def orbit_labels(perms, q):
    """Connected components of {x ~ p[x]} over all rows p; label = smallest member."""
    parent = np.arange(q)
    for m in range(perms.shape[0]):
        for x in range(q):
            a = x
            while parent[a] != a:
                a = parent[a]
            b = perms[m, x]
            while parent[b] != b:
                b = parent[b]
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    out = np.zeros(q, dtype=np.int64)
    for x in range(q):
        a = x
        while parent[a] != a:
            a = parent[a]
        out[x] = a
    return out


@njit(cache=True)
def standard_bases(T, e, d):
    """Codes (A_2..A_d) of every standard basis of T, one row per ordered basis (e, x_2..x_d).

    A_i is right multiplication by x_i written in the chosen coordinates.
    """
    q = 1 << d
    total = 1
    span = 2
    for _ in range(1, d):
        total *= q - span
        span *= 2
    out = np.zeros((total, d - 1), dtype=np.int64)
    B = np.zeros(d, dtype=np.int64)
    B[0] = e
    red = np.zeros(d + 1, dtype=np.int64)
    coord = np.zeros(q, dtype=np.int64)
    # iterative DFS over x_2..x_d
    choice = np.zeros(d, dtype=np.int64)
    level = 1
    choice[1] = 0
    n = 0
    while level >= 1:
        choice[level] += 1
        if choice[level] >= q:
            choice[level] = 0
            level -= 1
            continue
        # rebuild reduced basis of B[0:level]
        cnt = 0
        for i in range(level):
            cnt = _insert(red, cnt, _reduce(red, cnt, B[i]))
        v = choice[level]
        if _reduce(red, cnt, v) == 0:
            continue
        B[level] = v
        if level < d - 1:
            level += 1
            choice[level] = 0
            continue
        coord_map(B, d, coord)
        for i in range(1, d):
            code = 0
            for c in range(2, d + 1):
                col = coord[T[B[c - 1], B[i]]]
                for r in range(1, d + 1):
                    if (col >> (r - 1)) & 1:
                        code |= 1 << (d * (d - c) + (d - r))
            out[n, i - 1] = code
        n += 1
    return out[:n]
