"""Buchberger engine for ideals and submodules of graded free modules.

Vectors are dicts {(position, monomial_key): coeff}.  Orders are realized
as integer sort keys, so the max of a dict's transformed keys is the lead
term.  Schreyer orders compose: the induced order at syzygy level k+1
reuses the integer shift of level k.

The engine is split in two phases: `buchberger` computes a reduced GB
(Gebauer-Moeller pruned, no bookkeeping), and `syzygies_from_gb` runs the
pair reductions against the finished GB, recording quotients; by
Schreyer's theorem the recorded syzygies are a GB in the induced order.
The product criterion is applied only when an element is concentrated in
a single position (it is invalid for general module elements).
"""

from __future__ import annotations

import heapq

from .rings import PolyRing, Poly

_POS_BITS = 24
_POS_MAX = (1 << _POS_BITS) - 1


class ModuleOrder:
    """Per-position (shift, tail) data; sortkey(pos, key) is an int whose
    natural order is the module order.  twists hold generator degrees for
    degree bookkeeping (ints, or tuples for multigradings)."""

    __slots__ = ("ring", "shifts", "tails", "tailbits", "twists")

    def __init__(self, ring, shifts, tails, tailbits, twists):
        self.ring = ring
        self.shifts = shifts
        self.tails = tails
        self.tailbits = tailbits
        self.twists = twists

    def sortkey(self, pos, key):
        return ((key + self.shifts[pos]) << self.tailbits) | self.tails[pos]

    def degree(self, pos, key):
        tw = self.twists[pos]
        d = self.ring.total_deg(key)
        return d + (tw if isinstance(tw, int) else sum(tw))


def top_order(ring: PolyRing, twists) -> ModuleOrder:
    """Degree-compatible term-over-position order for a free module with
    the given generator degrees (twists)."""
    twists = list(twists)
    npos = len(twists)
    if npos - 1 > _POS_MAX:
        raise OverflowError("too many positions")
    if len(ring.blocks) != 1:
        raise ValueError("module orders need a single-block (grevlex) ring")
    shifts = []
    for tw in twists:
        t = tw if isinstance(tw, int) else sum(tw)
        shifts.append((t + 64) << ring._total_shift)
    tails = [(_POS_MAX - i) for i in range(npos)]
    return ModuleOrder(ring, shifts, tails, _POS_BITS, twists)


def schreyer_order(prev_order: ModuleOrder, gb) -> ModuleOrder:
    """Order induced on syzygies of gb (elements ordered as given)."""
    ring = prev_order.ring
    shifts, tails, twists = [], [], []
    for i, g in enumerate(gb):
        lp, lk = g.lead
        shifts.append(lk - ring._offset + prev_order.shifts[lp])
        tails.append((prev_order.tails[lp] << _POS_BITS) | (_POS_MAX - i))
        twists.append(prev_order.degree(lp, lk))
    return ModuleOrder(ring, shifts, tails, prev_order.tailbits + _POS_BITS, twists)


class GBElem:
    __slots__ = ("terms", "lead", "single_pos", "index")

    def __init__(self, terms, lead):
        self.terms = terms  # {(pos, key): coeff}, monic at lead
        self.lead = lead  # (pos, key)
        self.single_pos = all(pk[0] == lead[0] for pk in terms)
        self.index = -1


def _make_elem(terms, order, ring):
    if not terms:
        return None
    sk = order.sortkey
    lead = max(terms, key=lambda pk: sk(pk[0], pk[1]))
    c = terms[lead]
    if c != 1:
        inv = pow(c, -1, ring.p)
        terms = {pk: v * inv % ring.p for pk, v in terms.items()}
    return GBElem(terms, lead)


def normal_form(vec, by_pos, order, ring, quotients=None):
    """Full normal form of vec against basis elements indexed by lead
    position.  by_pos: {pos: [(lead_key, elem), ...]}.  If quotients is a
    dict it receives {elem_index: {mon_key: coeff}} accumulation."""
    p = ring.p
    off = ring._offset
    div = ring.div
    sk = order.sortkey
    h = dict(vec)
    rem = {}
    heap = [(-sk(pos, key), pos, key) for (pos, key) in h]
    heapq.heapify(heap)
    push = heapq.heappush
    while heap:
        _, pos, key = heapq.heappop(heap)
        c = h.get((pos, key))
        if not c:
            continue
        red = None
        for lk, g in by_pos.get(pos, ()):
            q = div(key, lk)
            if q is not None:
                red = (q, g)
                break
        if red is None:
            rem[(pos, key)] = c
            del h[(pos, key)]
            continue
        q, g = red
        del h[(pos, key)]
        base = q - off
        lead = g.lead
        for (gp, gk), gc in g.terms.items():
            if gp == lead[0] and gk == lead[1]:
                continue
            kk = gk + base
            tk = (gp, kk)
            old = h.get(tk)
            if old is None:
                v = (-c * gc) % p
                if v:
                    h[tk] = v
                    push(heap, (-sk(gp, kk), gp, kk))
            else:
                v = (old - c * gc) % p
                if v:
                    h[tk] = v
                else:
                    del h[tk]
        if quotients is not None:
            qd = quotients.setdefault(g.index, {})
            qd[q] = (qd.get(q, 0) + c) % p
    return rem


def _pair_key(ring, order, gi, gj):
    lp = gi.lead[0]
    lcm = ring.lcm_key(gi.lead[1], gj.lead[1])
    return lcm, order.degree(lp, lcm)


def buchberger(vectors, order, ring, full_reduce=True):
    """Reduced Groebner basis of the submodule generated by vectors.

    vectors: iterable of term dicts.  Returns list of GBElem with .index
    set; elements are monic and (if full_reduce) tail-reduced.
    """
    G = []
    by_pos = {}

    def add_to_index(g):
        by_pos.setdefault(g.lead[0], []).append((g.lead[1], g))

    pairs = []  # heap of (deg, lcm, i, j)
    pair_set = {}

    def push_pair(i, j, lcm, deg):
        heapq.heappush(pairs, (deg, lcm, i, j))
        pair_set[(i, j)] = lcm

    def update(h):
        """Gebauer-Moeller update with new element h (already in G)."""
        t = len(G) - 1
        lead_pos, lead_key = h.lead
        cand = {}
        for i, g in enumerate(G[:-1]):
            if g is None or g.lead[0] != lead_pos:
                continue
            cand[i] = ring.lcm_key(g.lead[1], lead_key)
        # criterion M: drop (i,t) when another new pair's lcm properly divides
        drop = set()
        items = sorted(cand.items(), key=lambda kv: ring.total_deg(kv[1]))
        for a in range(len(items)):
            i, li = items[a]
            if i in drop:
                continue
            for b in range(len(items)):
                j, lj = items[b]
                if j == i or j in drop:
                    continue
                if lj != li and ring.divides(lj, li):
                    drop.add(i)
                    break
        # criterion F: one pair per lcm value; B: coprime pairs dropped
        seen = {}
        for i, li in items:
            if i in drop:
                continue
            if li in seen:
                drop.add(i)
                continue
            seen[li] = i
            g = G[i]
            if (
                g.single_pos
                and h.single_pos
                and ring.gcd_key(g.lead[1], lead_key) == ring.one_key
            ):
                drop.add(i)
        # old-pair criterion
        for (i, j), lcm in list(pair_set.items()):
            gi, gj = G[i], G[j]
            if gi is None or gj is None:
                continue
            if gi.lead[0] != lead_pos:
                continue
            if ring.divides(lead_key, lcm):
                if (
                    ring.lcm_key(gi.lead[1], lead_key) != lcm
                    and ring.lcm_key(gj.lead[1], lead_key) != lcm
                ):
                    del pair_set[(i, j)]
        for i, li in cand.items():
            if i not in drop:
                push_pair(i, t, li, order.degree(lead_pos, li))

    for v in vectors:
        g = _make_elem(dict(v), order, ring)
        if g is None:
            continue
        g.index = len(G)
        G.append(g)
        add_to_index(g)
        update(g)

    p = ring.p
    off = ring._offset
    while pairs:
        deg, lcm, i, j = heapq.heappop(pairs)
        if pair_set.get((i, j)) != lcm:
            continue
        del pair_set[(i, j)]
        gi, gj = G[i], G[j]
        if gi is None or gj is None:
            continue
        spoly = _spair(gi, gj, lcm, ring)
        rem = normal_form(spoly, by_pos, order, ring)
        g = _make_elem(rem, order, ring)
        if g is None:
            continue
        g.index = len(G)
        G.append(g)
        add_to_index(g)
        update(g)

    # minimal basis: drop elements whose lead is divisible by another lead
    alive = [g for g in G if g is not None]
    alive.sort(key=lambda g: order.sortkey(*g.lead))
    keep = []
    for g in alive:
        lp, lk = g.lead
        if any(h.lead[0] == lp and ring.divides(h.lead[1], lk) for h in keep):
            continue
        keep.append(g)
    if full_reduce:
        keep = interreduce(keep, order, ring)
    for idx, g in enumerate(keep):
        g.index = idx
    return keep


def _spair(gi, gj, lcm, ring):
    p = ring.p
    off = ring.one_key
    qi = lcm - gi.lead[1] + off
    qj = lcm - gj.lead[1] + off
    basei = qi - ring._offset
    basej = qj - ring._offset
    s = {}
    for (gp, gk), gc in gi.terms.items():
        s[(gp, gk + basei)] = gc
    for (gp, gk), gc in gj.terms.items():
        tk = (gp, gk + basej)
        v = (s.get(tk, 0) - gc) % p
        if v:
            s[tk] = v
        else:
            s.pop(tk, None)
    return s


def interreduce(gb, order, ring):
    """Tail-reduce every element against the others (leads are minimal)."""
    out = []
    for k, g in enumerate(gb):
        by_pos = {}
        for h in gb:
            if h is g:
                continue
            by_pos.setdefault(h.lead[0], []).append((h.lead[1], h))
        rem = normal_form(g.terms, by_pos, order, ring)
        e = _make_elem(rem, order, ring)
        assert e is not None and e.lead == g.lead
        out.append(e)
    for idx, g in enumerate(out):
        g.index = idx
    return out


def reduce_vector(vec, gb, order, ring, quotients=None):
    by_pos = {}
    for g in gb:
        by_pos.setdefault(g.lead[0], []).append((g.lead[1], g))
    return normal_form(vec, by_pos, order, ring, quotients=quotients)


def syzygies_from_gb(gb, order, ring):
    """Generators of the syzygy module of gb (a GB), as term dicts over
    positions 0..len(gb)-1, together with the induced Schreyer order.
    The output is a Groebner basis in that order."""
    ring_off = ring._offset
    p = ring.p
    by_pos = {}
    for g in gb:
        by_pos.setdefault(g.lead[0], []).append((g.lead[1], g))
    n = len(gb)
    sorder = schreyer_order(order, gb)

    for idx, g in enumerate(gb):
        g.index = idx
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if gb[i].lead[0] != gb[j].lead[0]:
                continue
            lcm = ring.lcm_key(gb[i].lead[1], gb[j].lead[1])
            pairs.append((ring.total_deg(lcm), lcm, i, j))
    pairs.sort()
    syzygies = []
    leads = [g.lead[1] for g in gb]
    # The Schreyer lead of the syzygy of pair (i, j), i < j, is
    # (lcm_ij / lm_i) e_i.  A pair is redundant once a kept pair (i, k)
    # has lcm_ik dividing lcm_ij: the kept leads then generate the full
    # lead module, so the kept syzygies are a GB of the syzygy module.
    kept_lcms_by_i = {}

    for deg, lcm, i, j in pairs:
        cover = kept_lcms_by_i.get(i)
        if cover is not None and any(ring.divides(l, lcm) for l in cover):
            continue
        kept_lcms_by_i.setdefault(i, []).append(lcm)
        qi = lcm - leads[i] + ring.one_key
        qj = lcm - leads[j] + ring.one_key
        if (
            gb[i].single_pos
            and gb[j].single_pos
            and ring.gcd_key(leads[i], leads[j]) == ring.one_key
        ):
            # Koszul syzygy g_j e_i - g_i e_j has the S-pair's lead
            syz = {}
            for (gp, gk), gc in gb[j].terms.items():
                syz[(i, gk)] = gc
            for (gp, gk), gc in gb[i].terms.items():
                tk = (j, gk)
                v = (syz.get(tk, 0) - gc) % p
                if v:
                    syz[tk] = v
                else:
                    syz.pop(tk, None)
            syzygies.append(syz)
            continue
        spoly = _spair(gb[i], gb[j], lcm, ring)
        quots = {}
        rem = normal_form(spoly, by_pos, order, ring, quotients=quots)
        if rem:
            raise ValueError("input to syzygies_from_gb is not a Groebner basis")
        syz = {(i, qi): 1, (j, qj): (p - 1) % p}
        for idx, qd in quots.items():
            for qk, qc in qd.items():
                tk = (idx, qk)
                v = (syz.get(tk, 0) - qc) % p
                if v:
                    syz[tk] = v
                else:
                    syz.pop(tk, None)
        syzygies.append(syz)
    return syzygies, sorder


def gb_polys(gb, ring):
    """GB elements at position 0 as Poly objects (rank-1 case)."""
    out = []
    for g in gb:
        d = {}
        for (pos, key), c in g.terms.items():
            assert pos == 0
            d[key] = c
        out.append(Poly(ring, d))
    return out


# ---------------------------------------------------------------------------
# Tracked computations: GB with representations over the input generators.
# Needed for syzygies of arbitrary generator lists, lifts through
# submodules, and everything over a hypersurface quotient ring.
# ---------------------------------------------------------------------------


def _combine_rep(parts, p):
    """parts: list of (mon_key_or_None, coeff, rep_dict); returns the
    accumulated rep dict Σ coeff * x^mon * rep."""
    out = {}
    for mk, c, rep in parts:
        if not rep:
            continue
        for (j, key), rc in rep.items():
            if mk is None:
                kk = key
            else:
                kk = key + mk  # caller pre-subtracts offset
            v = (out.get((j, kk), 0) + c * rc) % p
            if v:
                out[(j, kk)] = v
            else:
                out.pop((j, kk), None)
    return out


class TrackedGB:
    """Groebner basis of a list of vectors with representation tracking.

    If modulus is given (a homogeneous Poly f), the computation happens
    over S/(f): vectors f*e_pos are appended internally and stripped from
    all reported syzygies and lifts.
    """

    def __init__(self, vectors, order, ring, modulus=None):
        self.ring = ring
        self.order = order
        self.modulus = modulus
        self.n_inputs = len(vectors)
        inputs = [dict(v) for v in vectors]
        npos = len(order.twists)
        if modulus is not None:
            fd = modulus.d
            for i in range(npos):
                inputs.append({(i, k): c for k, c in fd.items()})
        self.inputs = inputs
        self.gb, self.reps = self._buchberger_tracked(inputs)
        self.by_pos = {}
        for g in self.gb:
            self.by_pos.setdefault(g.lead[0], []).append((g.lead[1], g))

    # -- internals ----------------------------------------------------

    def _buchberger_tracked(self, inputs):
        ring, order = self.ring, self.order
        p = ring.p
        G, reps = [], []
        by_pos = {}
        pairs = []
        pair_set = {}

        def push_pair(i, j, lcm, deg):
            heapq.heappush(pairs, (deg, lcm, i, j))
            pair_set[(i, j)] = lcm

        def update(h, t):
            lead_pos, lead_key = h.lead
            cand = {}
            for i, g in enumerate(G[:t]):
                if g is None or g.lead[0] != lead_pos:
                    continue
                cand[i] = ring.lcm_key(g.lead[1], lead_key)
            drop = set()
            items = sorted(cand.items(), key=lambda kv: ring.total_deg(kv[1]))
            for a in range(len(items)):
                i, li = items[a]
                if i in drop:
                    continue
                for b in range(len(items)):
                    j, lj = items[b]
                    if j == i or j in drop:
                        continue
                    if lj != li and ring.divides(lj, li):
                        drop.add(i)
                        break
            seen = {}
            for i, li in items:
                if i in drop:
                    continue
                if li in seen:
                    drop.add(i)
                    continue
                seen[li] = i
                g = G[i]
                if (
                    g.single_pos
                    and h.single_pos
                    and ring.gcd_key(g.lead[1], lead_key) == ring.one_key
                ):
                    drop.add(i)
            for (i, j), lcm in list(pair_set.items()):
                gi, gj = G[i], G[j]
                if gi is None or gj is None or gi.lead[0] != lead_pos:
                    continue
                if ring.divides(lead_key, lcm):
                    if (
                        ring.lcm_key(gi.lead[1], lead_key) != lcm
                        and ring.lcm_key(gj.lead[1], lead_key) != lcm
                    ):
                        del pair_set[(i, j)]
            for i, li in cand.items():
                if i not in drop:
                    push_pair(i, t, li, order.degree(lead_pos, li))

        def insert(terms, rep):
            sk = order.sortkey
            lead = max(terms, key=lambda pk: sk(pk[0], pk[1]))
            c = terms[lead]
            if c != 1:
                inv = pow(c, -1, p)
                terms = {pk: v * inv % p for pk, v in terms.items()}
                rep = {pk: v * inv % p for pk, v in rep.items()}
            g = GBElem(terms, lead)
            g.index = len(G)
            G.append(g)
            reps.append(rep)
            by_pos.setdefault(lead[0], []).append((lead[1], g))
            update(g, g.index)

        for j, v in enumerate(inputs):
            if not v:
                continue
            insert(dict(v), {(j, ring.one_key): 1})

        one = ring.one_key
        off = ring._offset
        while pairs:
            deg, lcm, i, j = heapq.heappop(pairs)
            if pair_set.get((i, j)) != lcm:
                continue
            del pair_set[(i, j)]
            gi, gj = G[i], G[j]
            if gi is None or gj is None:
                continue
            spoly = _spair(gi, gj, lcm, ring)
            quots = {}
            rem = normal_form(spoly, by_pos, order, ring, quotients=quots)
            if rem:
                qi = lcm - gi.lead[1] + one - off
                qj = lcm - gj.lead[1] + one - off
                parts = [(qi, 1, reps[i]), (qj, p - 1, reps[j])]
                for k, qd in quots.items():
                    rk = reps[k]
                    for qk, qc in qd.items():
                        parts.append((qk - off, p - qc, rk))
                insert(rem, _combine_rep(parts, p))

        alive = [g for g in G if g is not None]
        alive.sort(key=lambda g: order.sortkey(*g.lead))
        keep, keep_reps = [], []
        for g in alive:
            lp, lk = g.lead
            if any(h.lead[0] == lp and ring.divides(h.lead[1], lk) for h in keep):
                continue
            keep.append(g)
            keep_reps.append(reps[g.index])
        # tail-reduction with rep updates
        out, out_reps = [], []
        for g, rep in zip(keep, keep_reps):
            bp = {}
            for h in keep:
                if h is not g:
                    bp.setdefault(h.lead[0], []).append((h.lead[1], h))
            quots = {}
            rem = normal_form(g.terms, bp, order, ring, quotients=quots)
            parts = [(None, 1, rep)]
            if quots:
                idx_map = {h.index: pos for pos, h in enumerate(keep)}
                for k, qd in quots.items():
                    rk = keep_reps[idx_map[k]]
                    for qk, qc in qd.items():
                        parts.append((qk - ring._offset, p - qc, rk))
            rep2 = _combine_rep(parts, p)
            e = _make_elem(rem, order, ring)
            assert e is not None and e.lead == g.lead
            out.append(e)
            out_reps.append(rep2)
        for idx, g in enumerate(out):
            g.index = idx
        return out, out_reps

    # -- queries --------------------------------------------------------

    def normal_form_vec(self, vec, quotients=None):
        return normal_form(vec, self.by_pos, self.order, self.ring, quotients=quotients)

    def lift(self, vec):
        """Coefficients over the original inputs (list of term dicts over
        input indices), or None if vec is not in the submodule."""
        p = self.ring.p
        quots = {}
        rem = self.normal_form_vec(dict(vec), quotients=quots)
        if rem:
            return None
        parts = []
        for k, qd in quots.items():
            rk = self.reps[k]
            for qk, qc in qd.items():
                parts.append((qk - self.ring._offset, qc, rk))
        rep = _combine_rep(parts, p)
        return self._strip(rep)

    def _strip(self, rep):
        """Drop modulus coordinates; f-reduce coefficients."""
        n = self.n_inputs
        out = {}
        for (j, key), c in rep.items():
            if j < n:
                out[(j, key)] = c
        if self.modulus is not None and out:
            out = _freduce_vec(out, self.modulus, self.ring)
        return out

    def syzygies(self):
        """Generators of the syzygy module of the original inputs
        (over S/(f) when a modulus was given)."""
        ring, order, p = self.ring, self.order, self.ring.p
        Z, _ = syzygies_from_gb(self.gb, order, ring)
        out = []
        for z in Z:
            parts = []
            for (k, qk), c in z.items():
                parts.append((qk - ring._offset, c, self.reps[k]))
            rep = self._strip(_combine_rep(parts, p))
            if rep:
                out.append(rep)
        # identity-minus-lift syzygies for inputs not needed: inputs are
        # among the module generators, and every input reduces to zero
        # against the GB, producing the (Id - UV) syzygy below.
        for j, v in enumerate(self.inputs):
            if not v:
                continue
            quots = {}
            rem = self.normal_form_vec(dict(v), quotients=quots)
            assert not rem, "input does not reduce to zero against own GB"
            parts = [(None, p - 1, {(j, ring.one_key): 1})]
            for k, qd in quots.items():
                rk = self.reps[k]
                for qk, qc in qd.items():
                    parts.append((qk - ring._offset, qc, rk))
            rep = self._strip(_combine_rep(parts, p))
            if rep:
                out.append(rep)
        return out


def _freduce_vec(vec, f, ring):
    """Reduce each positional coefficient of vec modulo the single
    polynomial f (hypersurface quotient normal form)."""
    from collections import defaultdict

    p = ring.p
    flk = f.lead_key()
    fd = f.d
    by_pos = defaultdict(dict)
    for (pos, key), c in vec.items():
        by_pos[pos][key] = c
    out = {}
    for pos, h in by_pos.items():
        while h:
            k = max(h)
            c = h.pop(k)
            q = ring.div(k, flk)
            if q is None:
                out[(pos, k)] = c
                continue
            base = q - ring._offset
            for fk, fc in fd.items():
                kk = fk + base
                if kk == k:
                    continue
                v = (h.get(kk, 0) - c * fc) % p
                if v:
                    h[kk] = v
                else:
                    h.pop(kk, None)
    return out
