"""F4 with the normal selection strategy and work counters.

Each round selects every critical pair whose lcm has minimal degree (weighted
degree under a weighted ordering), builds the Macaulay-style matrix from the
pair halves plus reducers found by symbolic preprocessing, and reduces the
S-polynomial rows against the echelonised reducer block.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .poly import FpPolynomial, GroebnerBasis, PolyRing


class GBTimeout(RuntimeError):
    """Raised when a Groebner basis computation exceeds its deadline."""

    def __init__(self, stats: "F4Stats"):
        super().__init__("Groebner basis computation timed out")
        self.stats = stats


@dataclass
class F4Stats:
    iterations: int = 0
    max_pairs_selected: int = 0
    zero_reductions: int = 0
    matrix_dims: list[tuple[int, int]] = field(default_factory=list)
    total_spolys: int = 0
    pairs_per_round: list[int] = field(default_factory=list)
    basis_size: int = 0
    completed: bool = False

    def to_json(self) -> dict:
        return {
            "iterations": self.iterations,
            "max_pairs_selected": self.max_pairs_selected,
            "zero_reductions": self.zero_reductions,
            "matrix_dims": [list(d) for d in self.matrix_dims],
            "total_spolys": self.total_spolys,
            "pairs_per_round": list(self.pairs_per_round),
            "basis_size": self.basis_size,
            "completed": self.completed,
        }


@njit(cache=True)
def _inv(a, p):
    # Fermat inverse; p is prime
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


DEAD = np.iinfo(np.int64).max


@njit(cache=True)
def _bits(v):
    m = np.uint64(0)
    for t in range(v.size):
        if v[t] > 0:
            m |= np.uint64(1) << np.uint64(t % 64)
    return m


@njit(cache=True)
def _gm_update(GL, act, h, wvec, p_L, p_ij, p_mask, p_deg, pc):
    """Gebauer-Moeller step for a new element ``h``.

    Old pending pairs made redundant by ``h`` are marked dead in ``p_deg``.
    Returns the lcms, divmasks and degrees of the surviving new pairs, the
    positions (in ``act``) they pair with, and which active elements ``h`` retires.
    """
    k = act.size
    n = GL.shape[1]
    hv = GL[h]
    hm = _bits(hv)
    L = np.empty((k, n), np.int16)
    Lm = np.empty(k, np.uint64)
    Ld = np.empty(k, np.int64)
    cop = np.empty(k, np.bool_)
    retire = np.empty(k, np.bool_)
    for a in range(k):
        g = act[a]
        c = True
        r = True
        d = 0
        m = np.uint64(0)
        for t in range(n):
            x = GL[g, t]
            y = hv[t]
            if x > 0 and y > 0:
                c = False
            if x < y:
                r = False
            v = x if x > y else y
            L[a, t] = v
            d += v
            if v > 0:
                m |= np.uint64(1) << np.uint64(t % 64)
        cop[a] = c
        retire[a] = r
        Lm[a] = m
        Ld[a] = d
    # chain criterion among the new pairs; coprime pairs stay as witnesses only
    keep = np.zeros(k, np.bool_)
    for a in range(k):
        if cop[a]:
            keep[a] = True
            continue
        drop = False
        for b in range(k):
            if b == a or (b < a and not keep[b]):
                continue
            if Ld[b] > Ld[a] or (Lm[b] & ~Lm[a]) != 0:
                continue
            ok = True
            for t in range(n):
                if L[b, t] > L[a, t]:
                    ok = False
                    break
            if ok:
                drop = True
                break
        keep[a] = not drop
    # old pairs (i, j) whose lcm h divides strictly in both directions
    for q in range(pc):
        if p_deg[q] == DEAD or (hm & ~p_mask[q]) != 0:
            continue
        div = True
        for t in range(n):
            if hv[t] > p_L[q, t]:
                div = False
                break
        if not div:
            continue
        i = p_ij[q, 0]
        j = p_ij[q, 1]
        li = False
        lj = False
        for t in range(n):
            y = hv[t]
            xi = GL[i, t] if GL[i, t] > y else y
            xj = GL[j, t] if GL[j, t] > y else y
            if xi != p_L[q, t]:
                li = True
            if xj != p_L[q, t]:
                lj = True
        if li and lj:
            p_deg[q] = DEAD
    cnt = 0
    for a in range(k):
        if keep[a] and not cop[a]:
            cnt += 1
    sel = np.empty(cnt, np.int64)
    deg = np.empty(cnt, np.int64)
    cnt = 0
    for a in range(k):
        if keep[a] and not cop[a]:
            sel[cnt] = a
            w = 0
            for t in range(n):
                w += L[a, t] * wvec[t]
            deg[cnt] = w
            cnt += 1
    return L, Lm, sel, deg, retire


class _Monomials:
    """Hash table of exponent vectors; products are found by adding the additive hashes."""

    def __init__(self, n: int, cap: int = 1 << 14):
        self.n = n
        rng = np.random.default_rng(0x5EED)
        self.R = rng.integers(1, 2**63, size=max(n, 1), dtype=np.uint64) | np.uint64(1)
        self.E = np.zeros((cap, n), np.int16)
        self.HV = np.zeros(cap, np.uint64)
        self.DM = np.zeros(cap, np.uint64)
        self.T = np.full(2 * cap, -1, np.int64)
        self.cnt = np.zeros(1, np.int64)
        self.stamp = np.zeros(cap, np.int32)
        self.lead = np.zeros(cap, np.int32)

    @property
    def cap(self) -> int:
        return self.E.shape[0]

    def grow(self):
        cap = 2 * self.cap
        c = int(self.cnt[0])

        def bigger(a, fill=0):
            b = np.full((cap,) + a.shape[1:], fill, a.dtype)
            b[:c] = a[:c]
            return b

        self.E = bigger(self.E)
        self.HV = bigger(self.HV)
        self.DM = bigger(self.DM)
        self.stamp = bigger(self.stamp)
        self.lead = bigger(self.lead)
        self.T = np.full(2 * cap, -1, np.int64)
        _rehash(self.HV, self.T, c)

    def insert(self, vecs: np.ndarray) -> np.ndarray:
        vecs = np.ascontiguousarray(vecs, dtype=np.int16).reshape(-1, self.n)
        while int(self.cnt[0]) + vecs.shape[0] > self.cap:
            self.grow()
        return _insert_batch(self.E, self.HV, self.DM, self.T, self.cnt, self.R, vecs)


@njit(cache=True)
def _divmask(vec):
    m = np.uint64(0)
    for k in range(vec.size):
        if vec[k] > 0:
            m |= np.uint64(1) << np.uint64(k % 64)
    return m


@njit(cache=True)
def _find_or_insert(E, HV, DM, T, cnt, vec, h):
    mask = T.size - 1
    pos = np.int64(h & np.uint64(mask))
    n = vec.size
    while True:
        idx = T[pos]
        if idx < 0:
            i = cnt[0]
            for k in range(n):
                E[i, k] = vec[k]
            HV[i] = h
            DM[i] = _divmask(vec)
            T[pos] = i
            cnt[0] = i + 1
            return i
        if HV[idx] == h:
            same = True
            for k in range(n):
                if E[idx, k] != vec[k]:
                    same = False
                    break
            if same:
                return idx
        pos = (pos + 1) & mask


@njit(cache=True)
def _rehash(HV, T, c):
    mask = T.size - 1
    for i in range(c):
        pos = np.int64(HV[i] & np.uint64(mask))
        while T[pos] >= 0:
            pos = (pos + 1) & mask
        T[pos] = i


@njit(cache=True)
def _insert_batch(E, HV, DM, T, cnt, R, vecs):
    out = np.empty(vecs.shape[0], np.int64)
    for r in range(vecs.shape[0]):
        h = np.uint64(0)
        for k in range(vecs.shape[1]):
            h += np.uint64(vecs[r, k]) * R[k]
        out[r] = _find_or_insert(E, HV, DM, T, cnt, vecs[r], h)
    return out


@njit(cache=True)
def _symbolic(E, HV, DM, T, cnt, stamp, lead, rnd, bptr, bmon, act_g, act_lm,
              r_g, r_q, r_ptr, r_mon, state, cols):
    """Expand rows into monomial ids and add a reducer row for every reducible column.

    ``state`` holds [rows, expanded rows, stored monomials, columns, processed columns].
    Returns 0 when finished or a code asking the caller to grow a buffer and call again.
    """
    n = E.shape[1]
    vec = np.empty(n, np.int16)
    while True:
        while state[1] < state[0]:
            r = state[1]
            g = r_g[r]
            q = r_q[r]
            a = bptr[g]
            b = bptr[g + 1]
            ln = b - a
            if cnt[0] + ln > E.shape[0]:
                return 1
            if state[2] + ln > r_mon.size:
                return 3
            if state[3] + ln > cols.size:
                return 4
            for t in range(a, b):
                m = bmon[t]
                for k in range(n):
                    vec[k] = E[m, k] + E[q, k]
                idx = _find_or_insert(E, HV, DM, T, cnt, vec, HV[m] + HV[q])
                r_mon[state[2]] = idx
                state[2] += 1
                if stamp[idx] != rnd:
                    stamp[idx] = rnd
                    cols[state[3]] = idx
                    state[3] += 1
            r_ptr[r + 1] = state[2]
            state[1] += 1
        if state[4] >= state[3]:
            return 0
        c = cols[state[4]]
        if lead[c] == rnd:
            state[4] += 1
            continue
        if cnt[0] + 1 > E.shape[0]:
            return 1
        if state[0] + 1 > r_g.size:
            return 2
        dm = DM[c]
        for s in range(act_lm.size):
            lm = act_lm[s]
            if DM[lm] & ~dm:
                continue
            ok = True
            for k in range(n):
                if E[lm, k] > E[c, k]:
                    ok = False
                    break
            if ok:
                for k in range(n):
                    vec[k] = E[c, k] - E[lm, k]
                qi = _find_or_insert(E, HV, DM, T, cnt, vec, HV[c] - HV[lm])
                r_g[state[0]] = act_g[s]
                r_q[state[0]] = qi
                state[0] += 1
                lead[c] = rnd
                break
        state[4] += 1


@njit(cache=True)
def _gather(rows, r_g, r_ptr, r_mon, colpos, bptr, bcoef):
    total = 0
    for r in rows:
        total += r_ptr[r + 1] - r_ptr[r]
    ptr = np.zeros(rows.size + 1, np.int64)
    cols = np.empty(total, np.int64)
    vals = np.empty(total, np.int64)
    pos = 0
    for t in range(rows.size):
        r = rows[t]
        a = bptr[r_g[r]]
        for s in range(r_ptr[r], r_ptr[r + 1]):
            cols[pos] = colpos[r_mon[s]]
            vals[pos] = bcoef[a + s - r_ptr[r]]
            pos += 1
        ptr[t + 1] = pos
    return ptr, cols, vals


@njit(cache=True)
def _reduce_lower(up_ptr, up_cols, up_vals, piv, lo_ptr, lo_cols, lo_vals, r0, r1, p,
                  acc, newpiv, new_ptr, new_cols, new_vals, counts):
    """Fully reduce lower rows ``r0:r1`` by the upper pivots and by previously created new pivots.

    Upper rows are monic. Accumulator entries stay below ``p*p`` so a product can
    be added without an immediate modular reduction. New pivot rows are appended
    (monic, CSR) to ``new_*``; ``counts`` holds [new rows, stored entries, zero rows].
    Returns the possibly reallocated entry buffers.
    """
    ncols = acc.size
    p2 = p * p
    nnew = counts[0]
    nnz = counts[1]
    for r in range(r0, r1):
        a = lo_ptr[r]
        b = lo_ptr[r + 1]
        if a == b:
            counts[2] += 1
            continue
        for t in range(a, b):
            acc[lo_cols[t]] = lo_vals[t]
        lead = -1
        c = lo_cols[a]
        while c < ncols:
            v = acc[c]
            if v != 0:
                v %= p
                acc[c] = 0
                if v != 0:
                    pr = piv[c]
                    if pr >= 0:
                        f = p - v
                        for t in range(up_ptr[pr] + 1, up_ptr[pr + 1]):
                            cc = up_cols[t]
                            x = acc[cc] + f * up_vals[t]
                            acc[cc] = x - p2 if x >= p2 else x
                    else:
                        nr = newpiv[c]
                        if nr >= 0:
                            f = p - v
                            for t in range(new_ptr[nr] + 1, new_ptr[nr + 1]):
                                cc = new_cols[t]
                                x = acc[cc] + f * new_vals[t]
                                acc[cc] = x - p2 if x >= p2 else x
                        else:
                            # no pivot: keep the entry; the first such column is the lead
                            acc[c] = v
                            if lead < 0:
                                lead = c
            c += 1
        if lead < 0:
            counts[2] += 1
            continue
        count = 0
        for c2 in range(lead, ncols):
            if acc[c2] != 0:
                count += 1
        if nnz + count > new_cols.size:
            size = max(new_cols.size * 2, nnz + count)
            grown_c = np.empty(size, np.int64)
            grown_v = np.empty(size, np.int64)
            grown_c[:nnz] = new_cols[:nnz]
            grown_v[:nnz] = new_vals[:nnz]
            new_cols = grown_c
            new_vals = grown_v
        inv = _inv(acc[lead], p)
        for c2 in range(lead, ncols):
            if acc[c2] != 0:
                new_cols[nnz] = c2
                new_vals[nnz] = acc[c2] * inv % p
                nnz += 1
                acc[c2] = 0
        newpiv[lead] = nnew
        nnew += 1
        new_ptr[nnew] = nnz
    counts[0] = nnew
    counts[1] = nnz
    return new_cols, new_vals


@njit(cache=True)
def _reduce_tails(up_ptr, up_cols, up_vals, piv, lo_ptr, lo_cols, lo_vals, ncols, p):
    """Fully reduce every term but the leading one of each lower row."""
    nlow = lo_ptr.size - 1
    p2 = p * p
    acc = np.zeros(ncols, np.int64)
    out_ptr = np.zeros(nlow + 1, np.int64)
    out_cols = np.empty(0, np.int64)
    out_vals = np.empty(0, np.int64)
    nnz = 0
    for r in range(nlow):
        a = lo_ptr[r]
        b = lo_ptr[r + 1]
        for t in range(a, b):
            acc[lo_cols[t]] = lo_vals[t]
        lead = lo_cols[a]
        for c in range(lead + 1, ncols):
            v = acc[c]
            if v == 0:
                continue
            v %= p
            acc[c] = v
            if v == 0:
                continue
            pr = piv[c]
            if pr < 0:
                continue
            acc[c] = 0
            f = p - v
            for t in range(up_ptr[pr] + 1, up_ptr[pr + 1]):
                cc = up_cols[t]
                x = acc[cc] + f * up_vals[t]
                acc[cc] = x - p2 if x >= p2 else x
        count = 0
        for c in range(lead, ncols):
            if acc[c] != 0:
                count += 1
        if nnz + count > out_cols.size:
            size = max(out_cols.size * 2, nnz + count, 64)
            grown_c = np.empty(size, np.int64)
            grown_v = np.empty(size, np.int64)
            grown_c[:nnz] = out_cols[:nnz]
            grown_v[:nnz] = out_vals[:nnz]
            out_cols = grown_c
            out_vals = grown_v
        for c in range(lead, ncols):
            if acc[c] != 0:
                out_cols[nnz] = c
                out_vals[nnz] = acc[c]
                nnz += 1
                acc[c] = 0
        out_ptr[r + 1] = nnz
    return out_ptr, out_cols[:nnz], out_vals[:nnz]


class _Grow:
    """Append-only numpy buffer."""

    def __init__(self, dtype, cap=1024):
        self.a = np.zeros(cap, dtype)
        self.n = 0

    def extend(self, vals):
        k = len(vals)
        if self.n + k > self.a.size:
            b = np.zeros(max(2 * self.a.size, self.n + k), self.a.dtype)
            b[: self.n] = self.a[: self.n]
            self.a = b
        self.a[self.n : self.n + k] = vals
        self.n += k

    def view(self):
        return self.a[: self.n]


class _F4:
    def __init__(self, ring: PolyRing, deadline: float | None):
        self.ring = ring
        self.n = ring.n
        self.p = ring.prime
        self.o = ring.ordering
        self.deadline = deadline
        self.mons = _Monomials(ring.n)
        self.one = int(self.mons.insert(np.zeros((1, ring.n), np.int16))[0])
        # basis storage: element g owns terms bptr[g]:bptr[g+1]
        self.bptr = _Grow(np.int64)
        self.bptr.extend([0])
        self.bmon = _Grow(np.int64)
        self.bcoef = _Grow(np.int64)
        self.lm: list[int] = []
        self.GL = np.zeros((16, ring.n), np.int16)
        self.active: list[int] = []
        # pending pairs: parallel python lists and numpy arrays
        self.pc = 0
        self.p_deg = np.zeros(256, np.int64)
        self.p_L = np.zeros((256, ring.n), np.int16)
        self.p_ij = np.zeros((256, 2), np.int64)
        self.p_mask = np.zeros(256, np.uint64)
        self.stats = F4Stats()
        self.rnd = 0
        w = self.o.weights
        self.wvec = None if w is None else np.array(w, np.int64)
        self.gvec = self.wvec if w is not None else np.ones(ring.n, np.int64)
        scan = self.o._revlex_scan
        self.scan_rev = list(reversed(scan))

    # -------------------------------------------------------------- helpers

    def check_time(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise GBTimeout(self.stats)

    def order_desc(self, ids: np.ndarray) -> np.ndarray:
        """Permutation sorting monomial ids from largest to smallest."""
        E = self.mons.E[ids].astype(np.int64)
        keys = [E[:, i] for i in self.scan_rev]
        keys.append(-E.sum(axis=1))
        if self.wvec is not None:
            keys.append(-(E @ self.wvec))
        return np.lexsort(keys)

    def compact(self):
        """Drop dead pairs from the pending store."""
        pc = self.pc
        alive = self.p_deg[:pc] != DEAD
        if alive.all():
            return
        k = int(alive.sum())
        self.p_deg[:k] = self.p_deg[:pc][alive]
        self.p_L[:k] = self.p_L[:pc][alive]
        self.p_ij[:k] = self.p_ij[:pc][alive]
        self.p_mask[:k] = self.p_mask[:pc][alive]
        self.pc = k

    def pending(self) -> bool:
        self.compact()
        return self.pc > 0

    def push_pairs(self, L, masks, deg, ij):
        k = deg.size
        need = self.pc + k
        if need > self.p_deg.size:
            cap = max(2 * self.p_deg.size, need)
            for name in ("p_deg", "p_L", "p_ij", "p_mask"):
                old = getattr(self, name)
                new = np.zeros((cap,) + old.shape[1:], old.dtype)
                new[: self.pc] = old[: self.pc]
                setattr(self, name, new)
        a, b = self.pc, need
        self.p_deg[a:b] = deg
        self.p_L[a:b] = L
        self.p_ij[a:b] = ij
        self.p_mask[a:b] = masks
        self.pc = need

    def element(self, g: int):
        a, b = int(self.bptr.a[g]), int(self.bptr.a[g + 1])
        return self.bmon.a[a:b], self.bcoef.a[a:b]

    # -------------------------------------------------------------- pair update

    def update(self, h_idx: int):
        """Gebauer-Moeller installation of a new basis element."""
        act = np.array(self.active, np.int64)
        L, Lm, sel, deg, retire = _gm_update(
            self.GL, act, h_idx, self.gvec, self.p_L, self.p_ij, self.p_mask, self.p_deg, self.pc
        )
        if sel.size:
            ij = np.empty((sel.size, 2), np.int64)
            ij[:, 0] = act[sel]
            ij[:, 1] = h_idx
            self.push_pairs(L[sel], Lm[sel], deg, ij)
        if retire.any():
            self.active = act[~retire].tolist()
        self.active.append(h_idx)

    def add(self, mon_ids: np.ndarray, coeffs: np.ndarray) -> int:
        idx = len(self.lm)
        self.bmon.extend(mon_ids)
        self.bcoef.extend(coeffs)
        self.bptr.extend([self.bmon.n])
        self.lm.append(int(mon_ids[0]))
        if idx >= self.GL.shape[0]:
            grown = np.zeros((2 * self.GL.shape[0], self.n), np.int16)
            grown[: self.GL.shape[0]] = self.GL
            self.GL = grown
        self.GL[idx] = self.mons.E[mon_ids[0]]
        self.update(idx)
        return idx

    # -------------------------------------------------------------- matrices

    def preprocess(self, rows_g: list[int], rows_q: list[int], leads: np.ndarray):
        """Symbolic preprocessing; returns the row table and the round's columns."""
        mons = self.mons
        self.rnd += 1
        rnd = self.rnd
        mons.lead[leads] = rnd
        nr = len(rows_g)
        cap_r = max(1024, 4 * nr)
        r_g = np.zeros(cap_r, np.int64)
        r_q = np.zeros(cap_r, np.int64)
        r_g[:nr] = rows_g
        r_q[:nr] = rows_q
        r_ptr = np.zeros(cap_r + 1, np.int64)
        r_mon = np.zeros(1 << 16, np.int64)
        cols = np.zeros(1 << 14, np.int64)
        state = np.array([nr, 0, 0, 0, 0], np.int64)
        act_g = np.array(self.active, np.int64)
        act_lm = np.array([self.lm[g] for g in self.active], np.int64)
        bptr, bmon = self.bptr.view(), self.bmon.view()
        while True:
            code = _symbolic(mons.E, mons.HV, mons.DM, mons.T, mons.cnt, mons.stamp, mons.lead, rnd,
                             bptr, bmon, act_g, act_lm, r_g, r_q, r_ptr, r_mon, state, cols)
            if code == 0:
                break
            if code == 1:
                mons.grow()
            elif code == 2:
                r_g = np.concatenate([r_g, np.zeros_like(r_g)])
                r_q = np.concatenate([r_q, np.zeros_like(r_q)])
                r_ptr = np.concatenate([r_ptr, np.zeros(r_g.size + 1 - r_ptr.size, np.int64)])
            elif code == 3:
                r_mon = np.concatenate([r_mon, np.zeros_like(r_mon)])
            else:
                cols = np.concatenate([cols, np.zeros_like(cols)])
            self.check_time()
        nrows = int(state[0])
        col_ids = cols[: int(state[3])]
        col_ids = col_ids[self.order_desc(col_ids)]
        colpos = np.empty(mons.cap, np.int64)
        colpos[col_ids] = np.arange(col_ids.size)
        return r_g[:nrows], r_ptr[: nrows + 1], r_mon, col_ids, colpos

    def rows_csr(self, rows, r_g, r_ptr, r_mon, colpos):
        return _gather(np.asarray(rows, np.int64), r_g, r_ptr, r_mon, colpos, self.bptr.view(), self.bcoef.view())

    # -------------------------------------------------------------- main loop

    def round(self):
        self.check_time()
        st = self.stats
        self.compact()
        pc = self.pc
        deg = self.p_deg[:pc]
        dmin = deg.min()
        idx = np.flatnonzero(deg == dmin)
        key = self.o.key
        cand = [(key(v), i, j, t) for t, (v, (i, j)) in zip(idx.tolist(), zip(self.p_L[idx].tolist(), self.p_ij[idx].tolist()))]
        cand.sort()
        chosen_idx = np.array([c[3] for c in cand], np.int64)
        chosen_L = self.p_L[chosen_idx]
        chosen_ij = self.p_ij[chosen_idx]
        chosen_key = [c[0] for c in cand]
        self.p_deg[chosen_idx] = DEAD
        st.iterations += 1
        st.pairs_per_round.append(len(chosen_idx))
        st.max_pairs_selected = max(st.max_pairs_selected, len(chosen_idx))
        st.total_spolys += len(chosen_idx)

        # half rows (element, multiplier), deduplicated; the first half for each
        # lcm becomes the pivot row and the others are reduced against it
        g_all = chosen_ij.reshape(-1)
        Q = np.repeat(chosen_L, 2, axis=0) - self.GL[g_all]
        q_ids = self.mons.insert(Q)
        lcm_ids = self.mons.insert(chosen_L)
        order = sorted(range(g_all.size), key=lambda t: (-chosen_key[t // 2], int(g_all[t]), int(q_ids[t])))
        seen_half = set()
        seen_lcm = set()
        upper_g, upper_q, lower_g, lower_q = [], [], [], []
        for t in order:
            g, q = int(g_all[t]), int(q_ids[t])
            if (g, q) in seen_half:
                continue
            seen_half.add((g, q))
            lk = chosen_key[t // 2]
            if lk in seen_lcm:
                lower_g.append(g)
                lower_q.append(q)
            else:
                seen_lcm.add(lk)
                upper_g.append(g)
                upper_q.append(q)
        nu, nl = len(upper_g), len(lower_g)
        r_g, r_ptr, r_mon, col_ids, colpos = self.preprocess(
            upper_g + lower_g, upper_q + lower_q, np.unique(lcm_ids)
        )
        nrows = r_g.size
        ncols = col_ids.size
        st.matrix_dims.append((nrows, ncols))
        up_rows = list(range(nu)) + list(range(nu + nl, nrows))
        lo_rows = list(range(nu, nu + nl))
        up_ptr, up_cols, up_vals = self.rows_csr(up_rows, r_g, r_ptr, r_mon, colpos)
        lo_ptr, lo_cols, lo_vals = self.rows_csr(lo_rows, r_g, r_ptr, r_mon, colpos)
        piv = np.full(ncols, -1, np.int64)
        piv[up_cols[up_ptr[:-1]]] = np.arange(len(up_rows))
        self.check_time()
        nlow = lo_ptr.size - 1
        acc = np.zeros(ncols, np.int64)
        newpiv = np.full(ncols, -1, np.int64)
        new_ptr = np.zeros(nlow + 1, np.int64)
        new_cols = np.empty(max(64, lo_cols.size), np.int64)
        new_vals = np.empty(max(64, lo_cols.size), np.int64)
        counts = np.zeros(3, np.int64)
        step = 64
        for r0 in range(0, nlow, step):
            new_cols, new_vals = _reduce_lower(
                up_ptr, up_cols, up_vals, piv, lo_ptr, lo_cols, lo_vals, r0, min(r0 + step, nlow), self.p,
                acc, newpiv, new_ptr, new_cols, new_vals, counts,
            )
            self.check_time()
        st.zero_reductions += int(counts[2])
        new_ptr = new_ptr[: int(counts[0]) + 1]
        if new_ptr.size > 2:
            # reduced echelon form among the new rows
            new_ptr, new_cols, new_vals = _reduce_tails(
                new_ptr, new_cols, new_vals, newpiv, new_ptr, new_cols, new_vals, ncols, self.p
            )
        created = []
        for t in range(new_ptr.size - 1):
            a, b = int(new_ptr[t]), int(new_ptr[t + 1])
            created.append((int(new_cols[a]), col_ids[new_cols[a:b]], new_vals[a:b].copy()))
        # largest first, so that a later element retires any it divides
        created.sort(key=lambda el: el[0])
        for _, ids, coeffs in created:
            if ids[0] == self.one:
                raise _UnitIdeal()
            self.add(ids, coeffs)

    def interreduce(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Minimal basis with every tail fully reduced, largest leading monomial first."""
        act = sorted(self.active, key=lambda g: self.o.key(self.GL[g].tolist()), reverse=True)
        r_g, r_ptr, r_mon, col_ids, colpos = self.preprocess(act, [self.one] * len(act), np.zeros(0, np.int64))
        nb = len(act)
        up_rows = list(range(nb, r_g.size))
        up_ptr, up_cols, up_vals = self.rows_csr(up_rows, r_g, r_ptr, r_mon, colpos)
        lo_ptr, lo_cols, lo_vals = self.rows_csr(list(range(nb)), r_g, r_ptr, r_mon, colpos)
        piv = np.full(col_ids.size, -1, np.int64)
        if up_rows:
            piv[up_cols[up_ptr[:-1]]] = np.arange(len(up_rows))
        out_ptr, out_cols, out_vals = _reduce_tails(
            up_ptr, up_cols, up_vals, piv, lo_ptr, lo_cols, lo_vals, col_ids.size, self.p
        )
        return [
            (col_ids[out_cols[out_ptr[t] : out_ptr[t + 1]]], out_vals[out_ptr[t] : out_ptr[t + 1]])
            for t in range(nb)
        ]


class _UnitIdeal(Exception):
    pass


def f4(
    system: list[FpPolynomial],
    ring: PolyRing | None = None,
    strategy: str = "normal",
    timeout: float | None = None,
) -> tuple[GroebnerBasis, F4Stats]:
    """Reduced Groebner basis of ``system`` together with F4 work counters."""
    if strategy != "normal":
        raise ValueError("only the normal selection strategy is implemented")
    polys = [f for f in system if f]
    if ring is None:
        if not system:
            raise ValueError("empty system")
        ring = system[0].ring
    for f in polys:
        if f.ring != ring:
            raise ValueError("system mixes polynomial rings")
    deadline = None if timeout is None else time.monotonic() + timeout
    eng = _F4(ring, deadline)
    if not polys:
        eng.stats.completed = True
        return GroebnerBasis([], ring, True), eng.stats
    try:
        seen = set()
        for f in sorted(polys, key=lambda f: f.lead_key, reverse=True):
            f = f.monic()
            if f.is_constant():
                raise _UnitIdeal()
            if f.raw_terms in seen:
                continue
            seen.add(f.raw_terms)
            ids = eng.mons.insert(np.array([ring.unpack(e) for _, e, _ in f.raw_terms], np.int16))
            eng.add(ids, np.array([c for _, _, c in f.raw_terms], dtype=np.int64))
        while eng.pending():
            eng.round()
        eng.check_time()
        reduced = eng.interreduce()
    except _UnitIdeal:
        eng.stats.completed = True
        eng.stats.basis_size = 1
        return GroebnerBasis([ring.constant(1)], ring, True), eng.stats
    E = eng.mons.E
    pack = ring.pack
    key = eng.o.key
    out = []
    for ids, coeffs in reduced:
        terms = []
        for m, c in zip(ids.tolist(), coeffs.tolist()):
            v = E[m].tolist()
            terms.append((key(v), pack(v), c))
        out.append(FpPolynomial(ring, terms))
    eng.stats.completed = True
    eng.stats.basis_size = len(out)
    return GroebnerBasis(out, ring, True), eng.stats
