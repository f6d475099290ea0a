"""Hot numeric kernels.

Everything here is plain-array code compiled with ``@njit`` (see
:mod:`crcp._accel`); with ``CRCP_DISABLE_NUMBA=1`` the same source runs
interpreted.  Conventions:

* coordinates are ``(n, d)`` float64, colors ``(n,)`` int32;
* a norm is the pair ``(w, p)``: per-axis weights and the exponent
  (``np.inf`` for the max norm);
* distances scale each coordinate by its weight *before* subtracting, so
  axis-normalized datasets reproduce original distances bit-for-bit;
* pair results are returned as ``(a, b, length)`` with ``a < b`` and
  ``a = -1`` meaning "no pair"; ties are broken by the smallest ``(a, b)``.
"""

import numpy as np

from ._accel import njit

INF = np.inf


# ---------------------------------------------------------------------------
# distances


@njit
def vec_norm(v, w, p):
    d = v.shape[0]
    if p == INF:
        m = 0.0
        for k in range(d):
            t = abs(w[k] * v[k])
            if t > m:
                m = t
        return m
    if p == 1.0:
        s = 0.0
        for k in range(d):
            s += abs(w[k] * v[k])
        return s
    if p == 2.0:
        s = 0.0
        for k in range(d):
            t = w[k] * v[k]
            s += t * t
        return np.sqrt(s)
    s = 0.0
    for k in range(d):
        s += abs(w[k] * v[k]) ** p
    return s ** (1.0 / p)


@njit
def point_dist(a, b, w, p):
    d = a.shape[0]
    if p == INF:
        m = 0.0
        for k in range(d):
            t = abs(w[k] * a[k] - w[k] * b[k])
            if t > m:
                m = t
        return m
    if p == 1.0:
        s = 0.0
        for k in range(d):
            s += abs(w[k] * a[k] - w[k] * b[k])
        return s
    if p == 2.0:
        s = 0.0
        for k in range(d):
            t = w[k] * a[k] - w[k] * b[k]
            s += t * t
        return np.sqrt(s)
    s = 0.0
    for k in range(d):
        s += abs(w[k] * a[k] - w[k] * b[k]) ** p
    return s ** (1.0 / p)


@njit
def pair_dist_idx(coords, i, j, w, p):
    return point_dist(coords[i], coords[j], w, p)


@njit
def pair_lengths(coords, pairs, w, p):
    m = pairs.shape[0]
    out = np.empty(m, dtype=np.float64)
    for t in range(m):
        out[t] = point_dist(coords[pairs[t, 0]], coords[pairs[t, 1]], w, p)
    return out


@njit
def _pair_better(l1, a1, b1, l2, a2, b2):
    # strictly better under (length, a, b)
    if l1 != l2:
        return l1 < l2
    if a1 != a2:
        return a1 < a2
    return b1 < b2


# ---------------------------------------------------------------------------
# pair materialization


@njit
def bich_pairs(colors):
    n = colors.shape[0]
    cnt = 0
    for i in range(n):
        for j in range(i + 1, n):
            if colors[i] != colors[j]:
                cnt += 1
    out = np.empty((cnt, 2), dtype=np.int32)
    t = 0
    for i in range(n):
        for j in range(i + 1, n):
            if colors[i] != colors[j]:
                out[t, 0] = i
                out[t, 1] = j
                t += 1
    return out


@njit
def pair_orient2(coords, pairs, ax0, ax1, s0, s1):
    """Diagonal class on sign-adjusted axes: 0 = NE-SW, 1 = NW-SE, 2 = both."""
    m = pairs.shape[0]
    out = np.empty(m, dtype=np.int8)
    for t in range(m):
        a = pairs[t, 0]
        b = pairs[t, 1]
        dx = s0 * (coords[b, ax0] - coords[a, ax0])
        dy = s1 * (coords[b, ax1] - coords[a, ax1])
        if dx == 0.0 or dy == 0.0:
            out[t] = 2
        elif (dx > 0.0) == (dy > 0.0):
            out[t] = 0
        else:
            out[t] = 1
    return out


# ---------------------------------------------------------------------------
# brute-force oracles


@njit
def brute_force_range(coords, colors, w, p, lo, hi):
    n = coords.shape[0]
    d = coords.shape[1]
    best_l = INF
    best_a = -1
    best_b = -1
    inside = np.empty(n, dtype=np.uint8)
    for i in range(n):
        ok = 1
        for k in range(d):
            if coords[i, k] < lo[k] or coords[i, k] > hi[k]:
                ok = 0
                break
        inside[i] = ok
    for i in range(n):
        if inside[i] == 0:
            continue
        for j in range(i + 1, n):
            if inside[j] == 0 or colors[i] == colors[j]:
                continue
            l = point_dist(coords[i], coords[j], w, p)
            if best_a < 0 or _pair_better(l, i, j, best_l, best_a, best_b):
                best_l = l
                best_a = i
                best_b = j
    return best_a, best_b, best_l


@njit
def brute_force_anchored(coords, colors, w, p, lo, hi, o):
    n = coords.shape[0]
    d = coords.shape[1]
    best_l = INF
    best_a = -1
    best_b = -1
    ok_o = True
    for k in range(d):
        if o[k] < lo[k] or o[k] > hi[k]:
            ok_o = False
    if not ok_o:
        return -1, -1, INF
    inside = np.empty(n, dtype=np.uint8)
    for i in range(n):
        ok = 1
        for k in range(d):
            if coords[i, k] < lo[k] or coords[i, k] > hi[k]:
                ok = 0
                break
        inside[i] = ok
    for i in range(n):
        if inside[i] == 0:
            continue
        for j in range(i + 1, n):
            if inside[j] == 0 or colors[i] == colors[j]:
                continue
            anch = True
            for k in range(d):
                cl = min(coords[i, k], coords[j, k])
                ch = max(coords[i, k], coords[j, k])
                if o[k] < cl or o[k] > ch:
                    anch = False
                    break
            if not anch:
                continue
            l = point_dist(coords[i], coords[j], w, p)
            if best_a < 0 or _pair_better(l, i, j, best_l, best_a, best_b):
                best_l = l
                best_a = i
                best_b = j
    return best_a, best_b, best_l


# ---------------------------------------------------------------------------
# window table: closest bichromatic pair of every contiguous rank window.
# order = point indices sorted by one coordinate.  L/A/B are (n, n) tables
# over inclusive rank windows [i..j]; window of a single point has no pair.


@njit
def window_cp_tables(coords, colors, w, p, order):
    n = order.shape[0]
    L = np.full((n, n), INF, dtype=np.float64)
    A = np.full((n, n), -1, dtype=np.int32)
    B = np.full((n, n), -1, dtype=np.int32)
    for span in range(1, n):
        for i in range(0, n - span):
            j = i + span
            bl = L[i + 1, j]
            ba = A[i + 1, j]
            bb = B[i + 1, j]
            if A[i, j - 1] >= 0 and (ba < 0 or _pair_better(L[i, j - 1], A[i, j - 1], B[i, j - 1], bl, ba, bb)):
                bl = L[i, j - 1]
                ba = A[i, j - 1]
                bb = B[i, j - 1]
            pi = order[i]
            pj = order[j]
            if colors[pi] != colors[pj]:
                a = min(pi, pj)
                b = max(pi, pj)
                l = point_dist(coords[pi], coords[pj], w, p)
                if ba < 0 or _pair_better(l, a, b, bl, ba, bb):
                    bl = l
                    ba = a
                    bb = b
            L[i, j] = bl
            A[i, j] = ba
            B[i, j] = bb
    return L, A, B


# ---------------------------------------------------------------------------
# corner tables: closest bichromatic pair of every grid quadrant.
# rx/ry are per-point ranks into the distinct sign-adjusted coordinate
# arrays (ascending).  Cell (i, j) covers points with rank >= (i, j), i.e.
# the quadrant whose corner is the (i, j)-th distinct coordinate pair.


@njit
def corner_cp_tables(coords, colors, w, p, rx, ry, nx, ny):
    n = coords.shape[0]
    L = np.full((nx + 1, ny + 1), INF, dtype=np.float64)
    A = np.full((nx + 1, ny + 1), -1, dtype=np.int32)
    B = np.full((nx + 1, ny + 1), -1, dtype=np.int32)
    for i in range(n):
        for j in range(i + 1, n):
            if colors[i] == colors[j]:
                continue
            cx = min(rx[i], rx[j])
            cy = min(ry[i], ry[j])
            l = point_dist(coords[i], coords[j], w, p)
            if A[cx, cy] < 0 or _pair_better(l, i, j, L[cx, cy], A[cx, cy], B[cx, cy]):
                L[cx, cy] = l
                A[cx, cy] = i
                B[cx, cy] = j
    for i in range(nx - 1, -1, -1):
        for j in range(ny - 1, -1, -1):
            bl = L[i, j]
            ba = A[i, j]
            bb = B[i, j]
            if A[i + 1, j] >= 0 and (ba < 0 or _pair_better(L[i + 1, j], A[i + 1, j], B[i + 1, j], bl, ba, bb)):
                bl = L[i + 1, j]
                ba = A[i + 1, j]
                bb = B[i + 1, j]
            if A[i, j + 1] >= 0 and (ba < 0 or _pair_better(L[i, j + 1], A[i, j + 1], B[i, j + 1], bl, ba, bb)):
                bl = L[i, j + 1]
                ba = A[i, j + 1]
                bb = B[i, j + 1]
            L[i, j] = bl
            A[i, j] = ba
            B[i, j] = bb
    return L, A, B


@njit
def dominance_cp_tables(coords, colors, w, p, rx, ry, rz, nx, ny, nz):
    n = coords.shape[0]
    L = np.full((nx + 1, ny + 1, nz + 1), INF, dtype=np.float64)
    A = np.full((nx + 1, ny + 1, nz + 1), -1, dtype=np.int32)
    B = np.full((nx + 1, ny + 1, nz + 1), -1, dtype=np.int32)
    for i in range(n):
        for j in range(i + 1, n):
            if colors[i] == colors[j]:
                continue
            cx = min(rx[i], rx[j])
            cy = min(ry[i], ry[j])
            cz = min(rz[i], rz[j])
            l = point_dist(coords[i], coords[j], w, p)
            if A[cx, cy, cz] < 0 or _pair_better(l, i, j, L[cx, cy, cz], A[cx, cy, cz], B[cx, cy, cz]):
                L[cx, cy, cz] = l
                A[cx, cy, cz] = i
                B[cx, cy, cz] = j
    for i in range(nx - 1, -1, -1):
        for j in range(ny - 1, -1, -1):
            for k in range(nz - 1, -1, -1):
                bl = L[i, j, k]
                ba = A[i, j, k]
                bb = B[i, j, k]
                if A[i + 1, j, k] >= 0 and (ba < 0 or _pair_better(L[i + 1, j, k], A[i + 1, j, k], B[i + 1, j, k], bl, ba, bb)):
                    bl = L[i + 1, j, k]
                    ba = A[i + 1, j, k]
                    bb = B[i + 1, j, k]
                if A[i, j + 1, k] >= 0 and (ba < 0 or _pair_better(L[i, j + 1, k], A[i, j + 1, k], B[i, j + 1, k], bl, ba, bb)):
                    bl = L[i, j + 1, k]
                    ba = A[i, j + 1, k]
                    bb = B[i, j + 1, k]
                if A[i, j, k + 1] >= 0 and (ba < 0 or _pair_better(L[i, j, k + 1], A[i, j, k + 1], B[i, j, k + 1], bl, ba, bb)):
                    bl = L[i, j, k + 1]
                    ba = A[i, j, k + 1]
                    bb = B[i, j, k + 1]
                L[i, j, k] = bl
                A[i, j, k] = ba
                B[i, j, k] = bb
    return L, A, B


# ---------------------------------------------------------------------------
# nearest differently-colored neighbor in the (projected) dominating quadrant


@njit
def nn_dominating(proj, coords, colors, w, p):
    """For each point a: nearest b (full-dim distance, color differs) with
    proj[b] strictly dominating proj[a] on both axes.  Returns (n,) int32
    neighbor ids, -1 where none exists; ties by lowest b."""
    n = proj.shape[0]
    out = np.full(n, -1, dtype=np.int32)
    for a in range(n):
        best_l = INF
        best_b = -1
        for b in range(n):
            if b == a or colors[b] == colors[a]:
                continue
            if proj[b, 0] > proj[a, 0] and proj[b, 1] > proj[a, 1]:
                l = point_dist(coords[a], coords[b], w, p)
                if best_b < 0 or l < best_l or (l == best_l and b < best_b):
                    best_l = l
                    best_b = b
        out[a] = best_b
    return out


# ---------------------------------------------------------------------------
# greedy coreset loop.
#
# Pairs arrive pre-sorted so that every group of equal smallest-ranges is
# contiguous and groups appear in a linear extension of range containment
# (strictly smaller ranges first); within a group pairs are sorted by
# (length, input index).  Containment queries against the kept set are
# prefix-minimum queries on a dense 2D Fenwick tree over coordinate ranks:
# pair (pu, pv) is contained in the query range of pair (qu, qv) iff
# pu <= qu and pv <= qv.


@njit
def _fen2_update(tree, nu, nv, iu, iv, val):
    i = iu + 1
    while i <= nu:
        j = iv + 1
        while j <= nv:
            if val < tree[i, j]:
                tree[i, j] = val
            j += j & (-j)
        i += i & (-i)


@njit
def _fen2_query(tree, nu, nv, iu, iv):
    best = INF
    i = iu + 1
    while i > 0:
        j = iv + 1
        while j > 0:
            if tree[i, j] < best:
                best = tree[i, j]
            j -= j & (-j)
        i -= i & (-i)
    return best


@njit
def coreset_greedy(order, pu, pv, lens, nu, nv, eps):
    """Run the keep/skip loop; returns a kept mask aligned with ``order``."""
    m = order.shape[0]
    kept = np.zeros(m, dtype=np.uint8)
    tree = np.full((nu + 1, nv + 1), INF, dtype=np.float64)
    for t in range(m):
        e = order[t]
        cur = _fen2_query(tree, nu, nv, pu[e], pv[e])
        if cur == INF or (1.0 + eps) * lens[e] < cur:
            kept[t] = 1
            _fen2_update(tree, nu, nv, pu[e], pv[e], lens[e])
    return kept


@njit
def pair_min_window_tables(plo, phi, lens, nc):
    """T[i, j] = min pair length over pairs with lo-rank >= i and hi-rank <= j."""
    T = np.full((nc + 1, nc + 1), INF, dtype=np.float64)
    m = plo.shape[0]
    for t in range(m):
        i = plo[t]
        j = phi[t]
        if lens[t] < T[i, j]:
            T[i, j] = lens[t]
    for i in range(nc - 1, -1, -1):
        for j in range(nc):
            v = T[i, j]
            if T[i + 1, j] < v:
                v = T[i + 1, j]
            if j > 0 and T[i, j - 1] < v:
                v = T[i, j - 1]
            T[i, j] = v
    return T


@njit
def pair_min_corner_tables(pcx, pcy, lens, nx, ny):
    """T[i, j] = min pair length over pairs with corner rank >= (i, j)."""
    T = np.full((nx + 1, ny + 1), INF, dtype=np.float64)
    m = pcx.shape[0]
    for t in range(m):
        if lens[t] < T[pcx[t], pcy[t]]:
            T[pcx[t], pcy[t]] = lens[t]
    for i in range(nx - 1, -1, -1):
        for j in range(ny - 1, -1, -1):
            v = T[i, j]
            if T[i + 1, j] < v:
                v = T[i + 1, j]
            if T[i, j + 1] < v:
                v = T[i, j + 1]
            T[i, j] = v
    return T


@njit
def min_len_window_scan(plo, phi, lens, qi, qj):
    best = INF
    for t in range(plo.shape[0]):
        if plo[t] >= qi and phi[t] <= qj and lens[t] < best:
            best = lens[t]
    return best


@njit
def min_len_corner_scan(pcx, pcy, lens, qi, qj):
    best = INF
    for t in range(pcx.shape[0]):
        if pcx[t] >= qi and pcy[t] >= qj and lens[t] < best:
            best = lens[t]
    return best


# ---------------------------------------------------------------------------
# pair locator: static containment-minimum structure.
#
# Pairs are reduced to 2D keys (u, v); the query asks for the minimum weight
# pair with u >= qa and v <= qb.  Layout: pairs sorted by u descending, a
# balanced segment tree over that order with bucket leaves; every node keeps
# its members sorted by v plus running prefix minima of (weight, index).

LOC_BUCKET = 8


@njit
def locator_layout(m, bucket):
    """Node ranges of the implicit segment tree; returns count and arrays."""
    cap = 1
    if m > bucket:
        cap = 4 * ((m + bucket - 1) // bucket)
    lo = np.empty(cap, dtype=np.int32)
    hi = np.empty(cap, dtype=np.int32)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    ent = np.empty(cap + 1, dtype=np.int64)
    ent[0] = 0
    if m == 0:
        return 0, lo[:0], hi[:0], left[:0], right[:0], ent[:1]
    # DFS with explicit stack; children are created after their parent so a
    # second pass fixes child links via a parallel stack of parent slots.
    stack = np.empty(cap, dtype=np.int32)
    par = np.empty(cap, dtype=np.int32)
    side = np.empty(cap, dtype=np.int8)
    top = 0
    stack[top] = 0
    par[top] = -1
    side[top] = 0
    bounds = np.empty((cap, 2), dtype=np.int32)
    bounds[0, 0] = 0
    bounds[0, 1] = m
    nxt = 1
    count = 0
    tot = 0
    while top >= 0:
        slot = stack[top]
        plo = bounds[slot, 0]
        phi = bounds[slot, 1]
        pslot = par[top]
        pside = side[top]
        top -= 1
        me = count
        count += 1
        lo[me] = plo
        hi[me] = phi
        ent[me] = tot
        tot += phi - plo
        if pslot >= 0:
            if pside == 0:
                left[pslot] = me
            else:
                right[pslot] = me
        if phi - plo > bucket:
            mid = (plo + phi) // 2
            # push right then left so left is processed first (preorder)
            top += 1
            stack[top] = nxt
            par[top] = me
            side[top] = 1
            bounds[nxt, 0] = mid
            bounds[nxt, 1] = phi
            nxt += 1
            top += 1
            stack[top] = nxt
            par[top] = me
            side[top] = 0
            bounds[nxt, 0] = plo
            bounds[nxt, 1] = mid
            nxt += 1
    ent[count] = tot
    return count, lo[:count], hi[:count], left[:count], right[:count], ent[: count + 1]


@njit
def locator_fill(count, lo, hi, left, right, ent, u_sorted, v_sorted, w_sorted, idx_sorted):
    """Fill per-node v-sorted entries with prefix minima (postorder merge)."""
    tot = ent[count]
    ev = np.empty(tot, dtype=np.float64)
    ew = np.empty(tot, dtype=np.float64)
    ei = np.empty(tot, dtype=np.int32)
    pmw = np.empty(tot, dtype=np.float64)
    pmi = np.empty(tot, dtype=np.int32)
    # nodes are in preorder; children have higher slots, so filling in
    # reverse slot order guarantees children are ready before parents.
    for nd in range(count - 1, -1, -1):
        base = ent[nd]
        ln = hi[nd] - lo[nd]
        if left[nd] < 0:
            for t in range(ln):
                ev[base + t] = v_sorted[lo[nd] + t]
                ew[base + t] = w_sorted[lo[nd] + t]
                ei[base + t] = idx_sorted[lo[nd] + t]
            # insertion sort by (v, idx); buckets are tiny
            for t in range(1, ln):
                cv = ev[base + t]
                cw = ew[base + t]
                ci = ei[base + t]
                s = t - 1
                while s >= 0 and (ev[base + s] > cv or (ev[base + s] == cv and ei[base + s] > ci)):
                    ev[base + s + 1] = ev[base + s]
                    ew[base + s + 1] = ew[base + s]
                    ei[base + s + 1] = ei[base + s]
                    s -= 1
                ev[base + s + 1] = cv
                ew[base + s + 1] = cw
                ei[base + s + 1] = ci
        else:
            lb = ent[left[nd]]
            ll = hi[left[nd]] - lo[left[nd]]
            rb = ent[right[nd]]
            rl = hi[right[nd]] - lo[right[nd]]
            a = 0
            b = 0
            t = 0
            while a < ll and b < rl:
                if ev[lb + a] < ev[rb + b] or (ev[lb + a] == ev[rb + b] and ei[lb + a] <= ei[rb + b]):
                    ev[base + t] = ev[lb + a]
                    ew[base + t] = ew[lb + a]
                    ei[base + t] = ei[lb + a]
                    a += 1
                else:
                    ev[base + t] = ev[rb + b]
                    ew[base + t] = ew[rb + b]
                    ei[base + t] = ei[rb + b]
                    b += 1
                t += 1
            while a < ll:
                ev[base + t] = ev[lb + a]
                ew[base + t] = ew[lb + a]
                ei[base + t] = ei[lb + a]
                a += 1
                t += 1
            while b < rl:
                ev[base + t] = ev[rb + b]
                ew[base + t] = ew[rb + b]
                ei[base + t] = ei[rb + b]
                b += 1
                t += 1
        bw = INF
        bi = -1
        for t in range(ln):
            if bi < 0 or ew[base + t] < bw or (ew[base + t] == bw and ei[base + t] < bi):
                bw = ew[base + t]
                bi = ei[base + t]
            pmw[base + t] = bw
            pmi[base + t] = bi
    return ev, ew, ei, pmw, pmi


@njit
def locator_query(count, lo, hi, left, right, ent, ev, pmw, pmi, u_sorted, v_sorted, w_sorted, idx_sorted, qa, qb):
    """Lightest pair with u >= qa and v <= qb; (-1, inf) when none."""
    m = u_sorted.shape[0]
    if m == 0 or count == 0:
        return -1, INF
    # u_sorted is descending: pos = number of entries with u >= qa
    a = 0
    b = m
    while a < b:
        mid = (a + b) // 2
        if u_sorted[mid] >= qa:
            a = mid + 1
        else:
            b = mid
    pos = a
    if pos == 0:
        return -1, INF
    best_w = INF
    best_i = -1
    stack = np.empty(64, dtype=np.int32)
    top = 0
    stack[top] = 0
    while top >= 0:
        nd = stack[top]
        top -= 1
        nlo = lo[nd]
        nhi = hi[nd]
        if nlo >= pos:
            continue
        if nhi <= pos:
            # fully inside the position prefix: prefix-min over v <= qb
            base = ent[nd]
            ln = nhi - nlo
            a2 = 0
            b2 = ln
            while a2 < b2:
                mid = (a2 + b2) // 2
                if ev[base + mid] <= qb:
                    a2 = mid + 1
                else:
                    b2 = mid
            if a2 > 0:
                cw = pmw[base + a2 - 1]
                ci = pmi[base + a2 - 1]
                if best_i < 0 or cw < best_w or (cw == best_w and ci < best_i):
                    best_w = cw
                    best_i = ci
            continue
        if left[nd] < 0:
            for t in range(nlo, min(nhi, pos)):
                if v_sorted[t] <= qb:
                    cw = w_sorted[t]
                    ci = idx_sorted[t]
                    if best_i < 0 or cw < best_w or (cw == best_w and ci < best_i):
                        best_w = cw
                        best_i = ci
            continue
        top += 1
        stack[top] = left[nd]
        top += 1
        stack[top] = right[nd]
    return best_i, best_w


# ---------------------------------------------------------------------------
# top-2 store (multilevel translate-intersection structure).
#
# A *family* is a set of stores over the same points that differ only in
# their direction vectors, so the structural layout (the template) is shared
# and contents live in per-store rows of pooled arrays.  A store for c
# directions is a tree on the scalar of direction 0 whose canonical nodes
# carry structures for directions 1..c-1; the last two directions form the
# base case: a tree on direction c-2 whose nodes keep members sorted by
# direction c-1 with suffix top-2 summaries and fractional-cascading bridge
# positions into each child.  Subsets of size <= t0 become scan buckets.

KIND_BUCKET = 0
KIND_BASE = 1
KIND_INTERNAL = 2


@njit
def _merge_cand(f, s, r, weights, colors):
    """Fold candidate row r into the (first, second) accumulator."""
    if r < 0:
        return f, s
    if f < 0:
        return r, s
    rb = weights[r] < weights[f] or (weights[r] == weights[f] and r < f)
    if rb:
        if colors[f] != colors[r]:
            return r, f
        return r, s
    if colors[r] != colors[f]:
        if s < 0 or weights[r] < weights[s] or (weights[r] == weights[s] and r < s):
            return f, r
    return f, s


@njit
def top2_scan_rows(scal, weights, colors, mus, rows):
    """Oracle: top-2 by linear scan over the given rows."""
    c = mus.shape[0]
    f = -1
    s = -1
    for t in range(rows.shape[0]):
        r = rows[t]
        ok = True
        for k in range(c):
            if scal[r, k] < mus[k]:
                ok = False
                break
        if ok:
            f, s = _merge_cand(f, s, r, weights, colors)
    return f, s


@njit
def top2_build_store(
    scal,
    t0,
    s_kind,
    s_level,
    s_off,
    s_size,
    s_src_struct,
    s_src_lo,
    s_src_hi,
    s_node_base,
    s_node_count,
    n_rel_lo,
    n_rel_hi,
    n_left,
    n_right,
    n_ent_off,
    n_bri_off,
    order,
    entp,
    t2f,
    t2s,
    briL,
    briR,
    weights,
    colors,
    inv,
):
    c = scal.shape[1]
    nstructs = s_kind.shape[0]
    for sid in range(nstructs):
        off = s_off[sid]
        size = s_size[sid]
        if size == 0:
            continue
        diridx = c - s_level[sid]
        # gather member rows
        src = s_src_struct[sid]
        members = np.empty(size, dtype=np.int32)
        if src < 0:
            for t in range(size):
                members[t] = t
        else:
            base = s_src_lo[sid]
            for t in range(size):
                members[t] = order[base + t]
        if s_kind[sid] == KIND_BUCKET:
            for t in range(size):
                order[off + t] = members[t]
            continue
        keys = np.empty(size, dtype=np.float64)
        for t in range(size):
            keys[t] = scal[members[t], diridx]
        perm = np.argsort(keys, kind="mergesort")
        for t in range(size):
            order[off + t] = members[perm[t]]
        if s_kind[sid] == KIND_INTERNAL:
            continue
        # base structure: entries per node sorted by the last direction
        d2 = c - 1
        for t in range(size):
            inv[order[off + t]] = t
        nb = s_node_base[sid]
        nc = s_node_count[sid]
        # root entries: members sorted by the last direction
        ek = np.empty(size, dtype=np.float64)
        for t in range(size):
            ek[t] = scal[members[t], d2]
        eperm = np.argsort(ek, kind="mergesort")
        rbase = n_ent_off[nb]
        for t in range(size):
            entp[rbase + t] = members[eperm[t]]
        for nd in range(nb, nb + nc):
            ebase = n_ent_off[nd]
            ln = n_rel_hi[nd] - n_rel_lo[nd]
            # suffix top-2
            f = -1
            s = -1
            for t in range(ln - 1, -1, -1):
                f, s = _merge_cand(f, s, entp[ebase + t], weights, colors)
                t2f[ebase + t] = f
                t2s[ebase + t] = s
            if n_left[nd] < 0:
                continue
            lch = n_left[nd]
            rch = n_right[nd]
            mid = (n_rel_lo[nd] + n_rel_hi[nd]) // 2
            lbase = n_ent_off[lch]
            rbase2 = n_ent_off[rch]
            bb = n_bri_off[nd]
            cl = 0
            cr = 0
            for t in range(ln):
                briL[bb + t] = cl
                briR[bb + t] = cr
                row = entp[ebase + t]
                if inv[row] < mid:
                    entp[lbase + cl] = row
                    cl += 1
                else:
                    entp[rbase2 + cr] = row
                    cr += 1
            briL[bb + ln] = cl
            briR[bb + ln] = cr
    return 0


@njit
def top2_build_family(
    scal3,
    t0,
    s_kind,
    s_level,
    s_off,
    s_size,
    s_src_struct,
    s_src_lo,
    s_src_hi,
    s_node_base,
    s_node_count,
    n_rel_lo,
    n_rel_hi,
    n_left,
    n_right,
    n_ent_off,
    n_bri_off,
    order3,
    entp3,
    t2f3,
    t2s3,
    briL3,
    briR3,
    weights,
    colors,
):
    S = scal3.shape[0]
    n = scal3.shape[1]
    inv = np.empty(n, dtype=np.int32)
    for s in range(S):
        top2_build_store(
            scal3[s],
            t0,
            s_kind,
            s_level,
            s_off,
            s_size,
            s_src_struct,
            s_src_lo,
            s_src_hi,
            s_node_base,
            s_node_count,
            n_rel_lo,
            n_rel_hi,
            n_left,
            n_right,
            n_ent_off,
            n_bri_off,
            order3[s],
            entp3[s],
            t2f3[s],
            t2s3[s],
            briL3[s],
            briR3[s],
            weights,
            colors,
            inv,
        )
    return 0


@njit
def _order_lower_bound(scal, order, off, size, diridx, mu):
    a = 0
    b = size
    while a < b:
        mid = (a + b) // 2
        if scal[order[off + mid], diridx] < mu:
            a = mid + 1
        else:
            b = mid
    return a


@njit
def _entry_lower_bound(scal, entp, ebase, ln, diridx, mu):
    a = 0
    b = ln
    while a < b:
        mid = (a + b) // 2
        if scal[entp[ebase + mid], diridx] < mu:
            a = mid + 1
        else:
            b = mid
    return a


@njit
def top2_query_store(
    scal,
    mus,
    use_fc,
    s_kind,
    s_level,
    s_off,
    s_size,
    s_node_base,
    s_node_count,
    n_rel_lo,
    n_rel_hi,
    n_left,
    n_right,
    n_ent_off,
    n_bri_off,
    order,
    entp,
    t2f,
    t2s,
    briL,
    briR,
    weights,
    colors,
):
    c = scal.shape[1]
    f = -1
    s = -1
    if s_kind.shape[0] == 0 or s_size[0] == 0:
        return f, s
    sstack = np.empty(1024, dtype=np.int32)
    stop = 0
    sstack[0] = 0
    nstack = np.empty(1024, dtype=np.int32)
    while stop >= 0:
        sid = sstack[stop]
        stop -= 1
        kind = s_kind[sid]
        off = s_off[sid]
        size = s_size[sid]
        lvl = s_level[sid]
        diridx = c - lvl
        if kind == KIND_BUCKET:
            for t in range(size):
                r = order[off + t]
                ok = True
                for k in range(diridx, c):
                    if scal[r, k] < mus[k]:
                        ok = False
                        break
                if ok:
                    f, s = _merge_cand(f, s, r, weights, colors)
            continue
        if kind == KIND_INTERNAL:
            pos = _order_lower_bound(scal, order, off, size, diridx, mus[diridx])
            if pos == size:
                continue
            ntop = 0
            nstack[0] = s_node_base[sid]
            while ntop >= 0:
                nd = nstack[ntop]
                ntop -= 1
                rlo = n_rel_lo[nd]
                rhi = n_rel_hi[nd]
                if rhi <= pos:
                    continue
                if rlo >= pos:
                    if n_left[nd] < 0:
                        for t in range(rlo, rhi):
                            r = order[off + t]
                            ok = True
                            for k in range(diridx + 1, c):
                                if scal[r, k] < mus[k]:
                                    ok = False
                                    break
                            if ok:
                                f, s = _merge_cand(f, s, r, weights, colors)
                    else:
                        stop += 1
                        sstack[stop] = n_child(nd, n_ent_off)
                    continue
                if n_left[nd] < 0:
                    for t in range(max(rlo, pos), rhi):
                        r = order[off + t]
                        ok = True
                        for k in range(diridx + 1, c):
                            if scal[r, k] < mus[k]:
                                ok = False
                                break
                        if ok:
                            f, s = _merge_cand(f, s, r, weights, colors)
                    continue
                ntop += 1
                nstack[ntop] = n_left[nd]
                ntop += 1
                nstack[ntop] = n_right[nd]
            continue
        # base structure
        d1 = c - 2
        d2 = c - 1
        pos = _order_lower_bound(scal, order, off, size, d1, mus[d1])
        if pos == size:
            continue
        nb = s_node_base[sid]
        cur = nb
        if use_fc:
            ep = _entry_lower_bound(scal, entp, n_ent_off[nb], size, d2, mus[d2])
        else:
            ep = 0
        while True:
            rlo = n_rel_lo[cur]
            rhi = n_rel_hi[cur]
            ln = rhi - rlo
            ebase = n_ent_off[cur]
            if n_left[cur] < 0:
                # bucket: entries sorted by d2; positions pos..rhi of the
                # d1-order are in range but the bucket straddles pos, so
                # test d1 explicitly and use the entry order for d2.
                if not use_fc:
                    ep = _entry_lower_bound(scal, entp, ebase, ln, d2, mus[d2])
                for t in range(ep, ln):
                    r = entp[ebase + t]
                    if scal[r, d1] >= mus[d1]:
                        f, s = _merge_cand(f, s, r, weights, colors)
                break
            lch = n_left[cur]
            rch = n_right[cur]
            mid = (rlo + rhi) // 2
            if pos < mid:
                # right child fully canonical
                if use_fc:
                    epr = briR[n_bri_off[cur] + ep]
                else:
                    epr = _entry_lower_bound(scal, entp, n_ent_off[rch], rhi - mid, d2, mus[d2])
                if epr < rhi - mid:
                    f, s = _merge_cand(f, s, t2f[n_ent_off[rch] + epr], weights, colors)
                    f, s = _merge_cand(f, s, t2s[n_ent_off[rch] + epr], weights, colors)
                if use_fc:
                    ep = briL[n_bri_off[cur] + ep]
                cur = lch
            else:
                if use_fc:
                    ep = briR[n_bri_off[cur] + ep]
                cur = rch
    return f, s


@njit
def n_child(nd, n_ent_off):
    # child struct id of an internal level>=3 node is stashed in n_ent_off
    return n_ent_off[nd]


@njit
def top2_query_selected(
    scal3,
    ids,
    mus2,
    use_fc,
    s_kind,
    s_level,
    s_off,
    s_size,
    s_node_base,
    s_node_count,
    n_rel_lo,
    n_rel_hi,
    n_left,
    n_right,
    n_ent_off,
    n_bri_off,
    order3,
    entp3,
    t2f3,
    t2s3,
    briL3,
    briR3,
    weights,
    colors,
    out_f,
    out_s,
):
    for t in range(ids.shape[0]):
        sid = ids[t]
        f, s = top2_query_store(
            scal3[sid],
            mus2[t],
            use_fc,
            s_kind,
            s_level,
            s_off,
            s_size,
            s_node_base,
            s_node_count,
            n_rel_lo,
            n_rel_hi,
            n_left,
            n_right,
            n_ent_off,
            n_bri_off,
            order3[sid],
            entp3[sid],
            t2f3[sid],
            t2s3[sid],
            briL3[sid],
            briR3[sid],
            weights,
            colors,
        )
        out_f[t] = f
        out_s[t] = s
    return 0


@njit
def anchored_best_pair(coords, colors, w, p, rows, o, lo, hi):
    """Closest bichromatic o-anchored pair within the candidate rows that is
    contained in the box; all membership tests closed."""
    d = coords.shape[1]
    m = rows.shape[0]
    best_l = INF
    best_a = -1
    best_b = -1
    for s in range(m):
        i = rows[s]
        for t in range(s + 1, m):
            j = rows[t]
            if j == i or colors[i] == colors[j]:
                continue
            ok = True
            for k in range(d):
                ci = coords[i, k]
                cj = coords[j, k]
                if ci < lo[k] or ci > hi[k] or cj < lo[k] or cj > hi[k]:
                    ok = False
                    break
                cl = min(ci, cj)
                ch = max(ci, cj)
                if o[k] < cl or o[k] > ch:
                    ok = False
                    break
            if not ok:
                continue
            a = min(i, j)
            b = max(i, j)
            l = point_dist(coords[i], coords[j], w, p)
            if best_a < 0 or _pair_better(l, a, b, best_l, best_a, best_b):
                best_l = l
                best_a = a
                best_b = b
    return best_a, best_b, best_l
