"""Compiled kernels for the standard-basis search.

Matrices here are column-packed: column c (0-based) of a d x d matrix sits in
bits [d*c, d*c + d) of one int64, with row r at bit r of its column.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def col(m, c, d):
    return (m >> (d * c)) & ((1 << d) - 1)


@njit(cache=True)
def mv(m, v, d):
    out = 0
    c = 0
    while v:
        if v & 1:
            out ^= col(m, c, d)
        v >>= 1
        c += 1
    return out


@njit(cache=True)
def mm(a, b, d):
    out = 0
    for c in range(d):
        out |= mv(a, col(b, c, d), d) << (d * c)
    return out


@njit(cache=True)
def identity(d):
    out = 0
    for c in range(d):
        out |= (1 << c) << (d * c)
    return out


@njit(cache=True)
def transpose(m, d):
    out = 0
    for c in range(d):
        v = col(m, c, d)
        for r in range(d):
            if (v >> r) & 1:
                out |= (1 << c) << (d * r)
    return out


@njit(cache=True)
def is_inv(m, d):
    red = np.zeros(d, dtype=np.int64)
    n = 0
    for c in range(d):
        v = col(m, c, d)
        for i in range(n):
            w = v ^ red[i]
            if w < v:
                v = w
        if v == 0:
            return False
        # keep red sorted descending
        i = n
        while i > 0 and red[i - 1] < v:
            red[i] = red[i - 1]
            i -= 1
        red[i] = v
        n += 1
    return True


@njit(cache=True)
def inverse(m, d):
    """Inverse of an invertible matrix (undefined result otherwise)."""
    rows = np.zeros(d, dtype=np.int64)
    for c in range(d):
        v = col(m, c, d)
        for r in range(d):
            if (v >> r) & 1:
                rows[r] |= 1 << c
    for r in range(d):
        rows[r] |= 1 << (d + r)
    for c in range(d):
        piv = -1
        for r in range(c, d):
            if (rows[r] >> c) & 1:
                piv = r
                break
        if piv < 0:
            return -1
        t = rows[c]
        rows[c] = rows[piv]
        rows[piv] = t
        for r in range(d):
            if r != c and (rows[r] >> c) & 1:
                rows[r] ^= rows[c]
    out = 0
    for r in range(d):
        inv_row = rows[r] >> d
        for c in range(d):
            if (inv_row >> c) & 1:
                out |= (1 << r) << (d * c)
    return out


@njit(cache=True)
def code_of(m, d):
    """Encoded integer of columns 2..d (bit d*(d-c) + (d-r), 1-based r, c)."""
    code = 0
    for c in range(2, d + 1):
        v = col(m, c - 1, d)
        for r in range(1, d + 1):
            if (v >> (r - 1)) & 1:
                code |= 1 << (d * (d - c) + (d - r))
    return code


@njit(cache=True)
def from_code(code, first, d):
    m = first
    j = 0
    while code:
        if code & 1:
            r = d - (j % d)
            c = d - j // d
            m |= (1 << (r - 1)) << (d * (c - 1))
        code >>= 1
        j += 1
    return m


@njit(cache=True)
def contains(arr, lo, hi, x):
    """Binary search for x in sorted arr[lo:hi]; returns index or -1."""
    while lo < hi:
        mid = (lo + hi) >> 1
        v = arr[mid]
        if v < x:
            lo = mid + 1
        elif v > x:
            hi = mid
        else:
            return mid
    return -1


# -- candidate lists -------------------------------------------------------


@njit(cache=True)
def _independent(red, n, v):
    for i in range(n):
        w = v ^ red[i]
        if w < v:
            v = w
    return v


@njit(cache=True)
def _push(red, n, v):
    i = n
    while i > 0 and red[i - 1] < v:
        red[i] = red[i - 1]
        i -= 1
    red[i] = v


@njit(cache=True)
def build_list(a2, first, d):
    """Sorted codes of all B with column 1 = ``first`` and B, B+I, B+A2, B+A2+I invertible.

    Depth-first over columns 2..d, pruning as soon as the chosen columns of
    any of the four matrices become dependent.
    """
    q = 1 << d
    eye = identity(d)
    shifts = np.array([0, eye, a2, a2 ^ eye], dtype=np.int64)
    # reduced bases per matrix per depth: red[depth, k, :]
    red = np.zeros((d + 1, 4, d), dtype=np.int64)
    cap = 1 << 16
    out = np.zeros(cap, dtype=np.int32)
    n_out = 0
    # depth 1 holds column 1
    for k in range(4):
        v = first ^ col(shifts[k], 0, d)
        if v == 0:
            return out[:0]
        red[1, k, 0] = v
    choice = np.zeros(d + 1, dtype=np.int64)
    cols = np.zeros(d + 1, dtype=np.int64)
    depth = 1  # number of columns fixed
    choice[1] = -1
    while depth >= 1:
        choice[depth] += 1
        if choice[depth] >= q:
            depth -= 1
            continue
        v = choice[depth]
        ok = True
        for k in range(4):
            w = v ^ col(shifts[k], depth, d)
            r = _independent(red[depth, k], depth, w)
            if r == 0:
                ok = False
                break
        if not ok:
            continue
        cols[depth] = v
        if depth == d - 1:
            m = first
            for c in range(1, d):
                m |= cols[c] << (d * c)
            if n_out == out.shape[0]:
                bigger = np.zeros(out.shape[0] * 2, dtype=np.int32)
                bigger[:n_out] = out[:n_out]
                out = bigger
            out[n_out] = code_of(m, d)
            n_out += 1
            continue
        for k in range(4):
            w = v ^ col(shifts[k], depth, d)
            r = _independent(red[depth, k], depth, w)
            red[depth + 1, k, :] = red[depth, k, :]
            _push(red[depth + 1, k], depth, r)
        depth += 1
        choice[depth] = -1
    res = out[:n_out].copy()
    res.sort()
    return res


@njit(cache=True)
def in_list(codes, offsets, sig, code):
    return contains(codes, offsets[sig], offsets[sig + 1], code) >= 0


@njit(cache=True)
def sieve(cands, span_codes, span_sigs, new_sig, codes, offsets):
    """Keep c in cands with c ^ s in the list of signature (s_sig ^ new_sig) for every s."""
    keep = np.zeros(cands.shape[0], dtype=np.bool_)
    for i in range(cands.shape[0]):
        c = cands[i]
        ok = True
        for k in range(span_codes.shape[0]):
            sig = span_sigs[k] ^ new_sig
            if not in_list(codes, offsets, sig, c ^ span_codes[k]):
                ok = False
                break
        keep[i] = ok
    return cands[keep]


# -- partial bases ---------------------------------------------------------


@njit(cache=True)
def prefix_orbit(c2, a3, d, allowed, out):
    """Standard prefixes (C', A3') equivalent to span(I, c2, a3).

    Moves: optional transpose, then W -> K^-1 X^-1 W K for X in W*, where K
    is a Krylov basis turning some N in X^-1 W into an allowed companion
    matrix. Writes rows (allowed index, A3' code) into ``out``; returns the
    count (rows may repeat).
    """
    eye = identity(d)
    q = 1 << d
    n = 0
    W = np.zeros(8, dtype=np.int64)
    V = np.zeros(8, dtype=np.int64)
    for t in range(2):
        g0 = eye
        g1 = c2 if t == 0 else transpose(c2, d)
        g2 = a3 if t == 0 else transpose(a3, d)
        for lam in range(8):
            m = 0
            if lam & 1:
                m ^= g0
            if lam & 2:
                m ^= g1
            if lam & 4:
                m ^= g2
            W[lam] = m
        for xi in range(1, 8):
            xinv = inverse(W[xi], d)
            for lam in range(8):
                V[lam] = mm(xinv, W[lam], d)
            for ni in range(8):
                N = V[ni]
                if N == 0 or N == eye:
                    continue
                # an element of V outside span(I, N)
                B = -1
                for bi in range(8):
                    v = V[bi]
                    if v != 0 and v != eye and v != N and v != (N ^ eye):
                        B = v
                        break
                for w in range(1, q):
                    K = 0
                    v = w
                    for c in range(d):
                        K |= v << (d * c)
                        v = mv(N, v, d)
                    if not is_inv(K, d):
                        continue
                    kinv = inverse(K, d)
                    last = mv(kinv, v, d)
                    which = -1
                    for j in range(allowed.shape[0]):
                        if col(allowed[j], d - 1, d) == last:
                            which = j
                            break
                    if which < 0:
                        continue
                    b = mv(kinv, mv(B, w, d), d)
                    if (b >> 2) != 1:
                        continue
                    bp = mm(kinv, mm(B, K, d), d)
                    if b & 1:
                        bp ^= eye
                    if b & 2:
                        bp ^= allowed[which]
                    if n < out.shape[0]:
                        out[n, 0] = which
                        out[n, 1] = code_of(bp, d)
                    n += 1
    return n


@njit(cache=True)
def enumerate_prefixes(allowed, a3_codes, a3_offsets, d):
    """Canonical prefix per class: first unseen (A2 index, A3 code) in list order.

    Returns (reps (n, 2), orbit sizes (n,)).
    """
    total = a3_offsets[-1]
    seen = np.zeros(total, dtype=np.bool_)
    reps = np.zeros((1024, 2), dtype=np.int64)
    sizes = np.zeros(1024, dtype=np.int64)
    nrep = 0
    buf = np.zeros((2 * 7 * 6 * (1 << d), 2), dtype=np.int64)
    e3 = 1 << 2
    for j in range(allowed.shape[0]):
        for idx in range(a3_offsets[j], a3_offsets[j + 1]):
            if seen[idx]:
                continue
            if nrep == reps.shape[0]:
                r2 = np.zeros((reps.shape[0] * 2, 2), dtype=np.int64)
                r2[:nrep] = reps[:nrep]
                reps = r2
                s2 = np.zeros(sizes.shape[0] * 2, dtype=np.int64)
                s2[:nrep] = sizes[:nrep]
                sizes = s2
            reps[nrep, 0] = j
            reps[nrep, 1] = a3_codes[idx]
            a3 = from_code(a3_codes[idx], e3, d)
            cnt = prefix_orbit(allowed[j], a3, d, allowed, buf)
            size = 0
            for k in range(min(cnt, buf.shape[0])):
                jj = buf[k, 0]
                pos = contains(a3_codes, a3_offsets[jj], a3_offsets[jj + 1], buf[k, 1])
                if pos >= 0 and not seen[pos]:
                    seen[pos] = True
                    size += 1
            seen[idx] = True
            sizes[nrep] = size
            nrep += 1
    return reps[:nrep].copy(), sizes[:nrep].copy()


# -- brute-force oracle ----------------------------------------------------


@njit(cache=True)
def inv_table(d):
    n = 1 << (d * d)
    out = np.zeros(n, dtype=np.bool_)
    for m in range(n):
        out[m] = is_inv(m, d)
    return out


@njit(cache=True)
def all_standard_bases(d, inv):
    """Every tuple (A2..Ad) satisfying the standard-basis conditions, as codes."""
    nfree = d * (d - 1)
    ncand = 1 << nfree
    eye = identity(d)
    cap = 1 << 12
    out = np.zeros((cap, d - 1), dtype=np.int64)
    n_out = 0
    span = np.zeros(1 << d, dtype=np.int64)
    span[0] = 0
    span[1] = eye
    cur = np.zeros(d, dtype=np.int64)
    choice = np.zeros(d + 1, dtype=np.int64)
    level = 1  # 0-based matrix index being chosen (A_{level+1})
    choice[1] = -1
    while level >= 1:
        choice[level] += 1
        if choice[level] >= ncand:
            level -= 1
            continue
        m = from_code(choice[level], 1 << level, d)
        ns = 1 << level
        ok = True
        for k in range(ns):
            if not inv[m ^ span[k]]:
                ok = False
                break
        if not ok:
            continue
        cur[level] = choice[level]
        for k in range(ns):
            span[ns + k] = span[k] ^ m
        if level == d - 1:
            if n_out == out.shape[0]:
                o2 = np.zeros((out.shape[0] * 2, d - 1), dtype=np.int64)
                o2[:n_out] = out[:n_out]
                out = o2
            for i in range(1, d):
                out[n_out, i - 1] = cur[i]
            n_out += 1
            continue
        level += 1
        choice[level] = -1
    return out[:n_out].copy()


@njit(cache=True)
def gl_elements(d, inv):
    n = 1 << (d * d)
    cnt = 0
    for m in range(n):
        if inv[m]:
            cnt += 1
    out = np.zeros(cnt, dtype=np.int64)
    k = 0
    for m in range(n):
        if inv[m]:
            out[k] = m
            k += 1
    return out


@njit(cache=True)
def brute_prefix_classes(allowed, a3_codes, a3_offsets, d, gl):
    """Union-find over all prefixes using every move P W Q (via Q in GL) and transpose."""
    total = a3_offsets[-1]
    parent = np.arange(total)
    eye = identity(d)
    e3 = 1 << 2
    W = np.zeros(8, dtype=np.int64)
    for j in range(allowed.shape[0]):
        for idx in range(a3_offsets[j], a3_offsets[j + 1]):
            a3 = from_code(a3_codes[idx], e3, d)
            for t in range(2):
                g1 = allowed[j] if t == 0 else transpose(allowed[j], d)
                g2 = a3 if t == 0 else transpose(a3, d)
                for lam in range(8):
                    m = 0
                    if lam & 1:
                        m ^= eye
                    if lam & 2:
                        m ^= g1
                    if lam & 4:
                        m ^= g2
                    W[lam] = m
                for xi in range(1, 8):
                    xinv = inverse(W[xi], d)
                    for qi in range(gl.shape[0]):
                        Q = gl[qi]
                        qinv = inverse(Q, d)
                        # image basis: Q^-1 X^-1 M Q; need some element equal to an allowed C
                        # and the e1-images to be span(e1, e2, e3)
                        img = np.zeros(8, dtype=np.int64)
                        for lam in range(8):
                            img[lam] = mm(qinv, mm(xinv, mm(W[lam], Q, d), d), d)
                        for lam in range(8):
                            v = img[lam]
                            for jj in range(allowed.shape[0]):
                                if v != allowed[jj]:
                                    continue
                                for mu in range(8):
                                    u = img[mu]
                                    if col(u, 0, d) == e3:
                                        pos = contains(a3_codes, a3_offsets[jj], a3_offsets[jj + 1], code_of(u, d))
                                        if pos >= 0:
                                            a = idx
                                            while parent[a] != a:
                                                a = parent[a]
                                            b = pos
                                            while parent[b] != b:
                                                b = parent[b]
                                            if a != b:
                                                if a < b:
                                                    parent[b] = a
                                                else:
                                                    parent[a] = b
    out = np.zeros(total, dtype=np.int64)
    for x in range(total):
        a = x
        while parent[a] != a:
            a = parent[a]
        out[x] = a
    return out


# -- completion ------------------------------------------------------------


@njit(cache=True)
def admissible_sets(a3, codes, offsets, d):
    """Q_sig = {B in L_sig : B + A3 in L_(sig + e3)} for every sig free of e1, e2, e3.

    Returns (qcodes, qoff) with Q_sig = qcodes[qoff[sig]:qoff[sig + 1]] (sorted).
    """
    nsig = 1 << d
    qoff = np.zeros(nsig + 1, dtype=np.int64)
    total = 0
    for sig in range(nsig):
        if sig != 0 and (sig & 7) == 0:
            total += offsets[sig + 1] - offsets[sig]
    buf = np.zeros(max(total, 1), dtype=np.int32)
    n = 0
    for sig in range(nsig):
        qoff[sig] = n
        if sig == 0 or (sig & 7) != 0:
            continue
        lo = offsets[sig | 4]
        hi = offsets[(sig | 4) + 1]
        for k in range(offsets[sig], offsets[sig + 1]):
            b = codes[k]
            if contains(codes, lo, hi, b ^ a3) >= 0:
                buf[n] = b
                n += 1
    qoff[nsig] = n
    return buf[:n].copy(), qoff


@njit(cache=True)
def bucket_offsets(qcodes, qoff, d, kbits):
    """boff[sig, h]: start of the entries of Q_sig whose top kbits equal h."""
    nsig = 1 << d
    nb = 1 << kbits
    shift = d * (d - 1) - kbits
    boff = np.zeros((nsig, nb + 1), dtype=np.int64)
    for sig in range(nsig):
        lo = qoff[sig]
        hi = qoff[sig + 1]
        k = lo
        for h in range(nb + 1):
            while k < hi and (qcodes[k] >> shift) < h:
                k += 1
            boff[sig, h] = k
    return boff


@njit(cache=True)
def _qhas(qcodes, boff, shift, sig, x):
    h = x >> shift
    for k in range(boff[sig, h], boff[sig, h + 1]):
        v = qcodes[k]
        if v == x:
            return True
        if v > x:
            return False
    return False


@njit(cache=True)
def complete(qcodes, qoff, boff, kbits, d):
    """All (A4..Ad) with every nonzero combination X in Q_sig(X). Rows of codes, lexicographic."""
    L = d - 3
    shift = d * (d - 1) - kbits
    cap = 0
    for j in range(L):
        s = 1 << (3 + j)
        cap = max(cap, qoff[s + 1] - qoff[s])
    pools = np.zeros((L + 1, L, max(cap, 1)), dtype=np.int32)
    psize = np.zeros((L + 1, L), dtype=np.int64)
    for j in range(L):
        s = 1 << (3 + j)
        m = qoff[s + 1] - qoff[s]
        pools[0, j, :m] = qcodes[qoff[s]:qoff[s + 1]]
        psize[0, j] = m
    span_c = np.zeros(1 << L, dtype=np.int64)
    span_s = np.zeros(1 << L, dtype=np.int64)
    chosen = np.zeros(L, dtype=np.int64)
    pos = np.zeros(L + 1, dtype=np.int64)
    out = np.zeros((1024, L), dtype=np.int64)
    n_out = 0
    depth = 0
    pos[0] = -1
    while depth >= 0:
        pos[depth] += 1
        if pos[depth] >= psize[depth, depth]:
            depth -= 1
            continue
        c = pools[depth, depth, pos[depth]]
        sig = 1 << (3 + depth)
        if depth == L - 1:
            if n_out == out.shape[0]:
                o2 = np.zeros((out.shape[0] * 2, L), dtype=np.int64)
                o2[:n_out] = out[:n_out]
                out = o2
            for j in range(depth):
                out[n_out, j] = chosen[j]
            out[n_out, depth] = c
            n_out += 1
            continue
        ns = 1 << depth
        ok = True
        for j in range(depth + 1, L):
            sj = 1 << (3 + j)
            m = 0
            for k in range(psize[depth, j]):
                b = pools[depth, j, k]
                good = True
                for t in range(ns):
                    if not _qhas(qcodes, boff, shift, sj ^ span_s[t] ^ sig, b ^ span_c[t] ^ c):
                        good = False
                        break
                if good:
                    pools[depth + 1, j, m] = b
                    m += 1
            psize[depth + 1, j] = m
            if m == 0:
                ok = False
                break
        if not ok:
            continue
        chosen[depth] = c
        for t in range(ns):
            span_c[ns + t] = span_c[t] ^ c
            span_s[ns + t] = span_s[t] ^ sig
        depth += 1
        pos[depth] = -1
    return out[:n_out].copy()
