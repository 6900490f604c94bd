"""Graded homological algebra over S and over hypersurface rings S/(f).

Conventions: a graded free module is a tuple of generator degrees
(F = + S(-t_i) has generator degrees t_i; degrees are ints for rank-1
gradings, tuples otherwise).  A GradedMatrix d: F <- G presents maps by
columns; entry (i, j) is homogeneous of degree src[j] - tgt[i].
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import linalg
from .groebner import (
    TrackedGB,
    buchberger,
    syzygies_from_gb,
    top_order,
    _make_elem,
)
from .ideals import Ideal, _monomial_numerator, _numerator_to_hp, _series_mul
from .rings import Poly, PolyRing, QuotientRing


def _deg_add(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return a + b
    return tuple(x + y for x, y in zip(a, b))


def _deg_sub(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return a - b
    return tuple(x - y for x, y in zip(a, b))


def _deg_tot(a):
    return a if isinstance(a, int) else sum(a)


class GradedMatrix:
    """Homogeneous map between graded free modules, entries by (row, col)."""

    def __init__(self, ring, tgt, src, entries, quotient=None, check=True):
        self.ring = ring
        self.tgt = tuple(tgt)
        self.src = tuple(src)
        self.entries = {k: v for k, v in entries.items() if v and not v.is_zero()}
        self.quotient = quotient
        if check:
            self._validate()

    def _validate(self):
        for (i, j), e in self.entries.items():
            if not (0 <= i < len(self.tgt) and 0 <= j < len(self.src)):
                raise ValueError("entry out of range")
            md = e.multidegree()
            want = _deg_sub(self.src[j], self.tgt[i])
            got = md[0] if (isinstance(want, int) and len(md) == 1) else md
            if got != want:
                raise ValueError(
                    f"entry ({i},{j}) has degree {got}, expected {want}"
                )

    @property
    def nrows(self):
        return len(self.tgt)

    @property
    def ncols(self):
        return len(self.src)

    def entry(self, i, j) -> Poly:
        return self.entries.get((i, j), self.ring.zero())

    def column_vec(self, j):
        out = {}
        for (i, jj), e in self.entries.items():
            if jj == j:
                for k, c in e.d.items():
                    out[(i, k)] = c
        return out

    def columns_as_vectors(self):
        return [self.column_vec(j) for j in range(self.ncols)]

    def compose(self, other: "GradedMatrix") -> "GradedMatrix":
        """self . other (matrix product), reduced mod f in quotient mode."""
        if self.src != other.tgt:
            raise ValueError("module mismatch in composition")
        entries = {}
        for (i, k), a in self.entries.items():
            for (kk, j), b in other.entries.items():
                if kk != k:
                    continue
                prod = a * b
                cur = entries.get((i, j))
                entries[(i, j)] = prod if cur is None else cur + prod
        q = self.quotient or other.quotient
        if q is not None:
            entries = {k: q.reduce(v) for k, v in entries.items()}
        return GradedMatrix(self.ring, self.tgt, other.src, entries, quotient=q, check=False)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries.values())

    def transpose_into(self, a) -> "GradedMatrix":
        """Hom(-, S(-a)) applied to the map: transposed matrix with
        dualized degrees (gen degree t becomes a - t)."""
        tgt = tuple(_deg_sub(a, s) for s in self.src)
        src = tuple(_deg_sub(a, t) for t in self.tgt)
        entries = {(j, i): e for (i, j), e in self.entries.items()}
        return GradedMatrix(self.ring, tgt, src, entries, quotient=self.quotient, check=False)

    def twist(self, a) -> "GradedMatrix":
        tgt = tuple(_deg_add(t, a) for t in self.tgt)
        src = tuple(_deg_add(s, a) for s in self.src)
        return GradedMatrix(self.ring, tgt, src, dict(self.entries), quotient=self.quotient, check=False)

    def submatrix(self, rows, cols) -> "GradedMatrix":
        rmap = {r: i for i, r in enumerate(rows)}
        cmap = {c: j for j, c in enumerate(cols)}
        entries = {
            (rmap[i], cmap[j]): e
            for (i, j), e in self.entries.items()
            if i in rmap and j in cmap
        }
        return GradedMatrix(
            self.ring,
            tuple(self.tgt[r] for r in rows),
            tuple(self.src[c] for c in cols),
            entries,
            quotient=self.quotient,
            check=False,
        )

    def has_unit_entry(self) -> bool:
        for (i, j), e in self.entries.items():
            if self.src[j] == self.tgt[i] and not e.is_zero():
                return True
        return False

    def __repr__(self):
        return f"GradedMatrix({self.nrows}x{self.ncols}, tgt={self.tgt}, src={self.src})"


def identity_matrix(ring, degrees, quotient=None) -> GradedMatrix:
    entries = {(i, i): ring.const(1) for i in range(len(degrees))}
    return GradedMatrix(ring, degrees, degrees, entries, quotient=quotient, check=False)


def matrix_from_vectors(ring, tgt, vectors, quotient=None) -> GradedMatrix:
    """Columns from term-dict vectors over the target positions."""
    src = []
    entries = {}
    for j, v in enumerate(vectors):
        deg = None
        cols = {}
        for (pos, key), c in v.items():
            cols.setdefault(pos, {})[key] = c
            d = ring.multideg(key)
            d = d[0] if len(ring.grading) == 1 else d
            dd = _deg_add(d, tgt[pos])
            if deg is None:
                deg = dd
            elif deg != dd:
                raise ValueError("inhomogeneous column vector")
        src.append(deg)
        for pos, dd in cols.items():
            entries[(pos, j)] = Poly(ring, dd)
    return GradedMatrix(ring, tgt, tuple(src), entries, quotient=quotient, check=False)


class ChainComplex:
    """F_0 <- F_1 <- ... , modules as degree tuples, diffs[k]: F_k <- F_{k+1}."""

    def __init__(self, ring, modules, diffs, quotient=None, truncated=False):
        self.ring = ring
        self.modules = [tuple(m) for m in modules]
        self.diffs = list(diffs)
        self.quotient = quotient
        self.truncated = truncated

    def __len__(self):
        return len(self.modules)

    def differential(self, k) -> GradedMatrix:
        """d_k: F_{k-1} <- F_k (1-based)."""
        return self.diffs[k - 1]

    def check_complex(self):
        for k in range(len(self.diffs) - 1):
            comp = self.diffs[k].compose(self.diffs[k + 1])
            if not comp.is_zero():
                raise AssertionError(f"d_{k+1} . d_{k+2} != 0")
        return True

    def is_minimal(self) -> bool:
        return not any(d.has_unit_entry() for d in self.diffs)

    def betti(self) -> "BettiTable":
        if not self.is_minimal():
            raise ValueError("Betti table requires a minimal complex; minimalize first")
        t = BettiTable()
        for i, mod in enumerate(self.modules):
            for d in mod:
                t.add(i, _deg_tot(d))
        return t


class BettiTable:
    """Graded Betti numbers beta_{i,j}, printed with rows indexed by j-i."""

    def __init__(self, data=None):
        self.data = dict(data) if data else {}

    def add(self, i, j, count=1):
        self.data[(i, j)] = self.data.get((i, j), 0) + count

    def get(self, i, j) -> int:
        return self.data.get((i, j), 0)

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        a = {k: v for k, v in self.data.items() if v}
        b = {k: v for k, v in other.data.items() if v}
        return a == b

    def __hash__(self):
        return hash(frozenset((k, v) for k, v in self.data.items() if v))

    @classmethod
    def from_rows(cls, rows):
        """rows: {row_index: {col: count}} in the j-i row convention."""
        t = cls()
        for r, cols in rows.items():
            for i, c in cols.items():
                if c:
                    t.add(i, i + r, c)
        return t

    def max_col(self):
        return max((i for (i, _), v in self.data.items() if v), default=0)

    def rows(self):
        return sorted({j - i for (i, j), v in self.data.items() if v})

    def total(self, i):
        return sum(v for (ii, _), v in self.data.items() if ii == i)

    def render(self) -> str:
        if not any(self.data.values()):
            return "(zero)"
        cmax = self.max_col()
        rws = self.rows()
        rlo, rhi = min(rws), max(rws)
        cells = []
        for r in range(rlo, rhi + 1):
            row = [str(self.get(i, i + r) or ".") if self.get(i, i + r) else "."
                   for i in range(cmax + 1)]
            cells.append(row)
        width = max(2, max(len(x) for row in cells for x in row),
                    *(len(str(i)) for i in range(cmax + 1)))
        head = "    " + " ".join(str(i).rjust(width) for i in range(cmax + 1))
        lines = [head]
        for r, row in zip(range(rlo, rhi + 1), cells):
            lines.append(str(r).rjust(3) + ": " + " ".join(x.rjust(width) for x in row))
        return "\n".join(lines)

    def __repr__(self):
        return self.render()


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------


def resolve(pres: GradedMatrix, length: int, quotient: QuotientRing = None) -> ChainComplex:
    """Free resolution of coker(pres), length differentials at most.

    Over S the Schreyer tower is used; over S/(f) each step recomputes a
    tracked GB modulo f.  The output is generally non-minimal.
    """
    if length < 1:
        raise ValueError("length bound must be at least 1")
    ring = pres.ring
    modules = [pres.tgt]
    diffs = []
    truncated = False
    if quotient is None:
        cols = pres.columns_as_vectors()
        cols = [c for c in cols if c]
        if cols:
            order = top_order(ring, list(pres.tgt))
            gb = buchberger(cols, order, ring)
            d1 = matrix_from_vectors(ring, pres.tgt, [g.terms for g in gb])
            diffs.append(d1)
            modules.append(d1.src)
            cur_gb, cur_order = gb, order
            for k in range(2, length + 1):
                Z, sord = syzygies_from_gb(cur_gb, cur_order, ring)
                if not Z:
                    break
                dk = matrix_from_vectors(ring, modules[-1], Z)
                diffs.append(dk)
                modules.append(dk.src)
                elems = [_make_elem(dict(z), sord, ring) for z in Z]
                for idx, e in enumerate(elems):
                    e.index = idx
                cur_gb, cur_order = elems, sord
            else:
                Z, _ = syzygies_from_gb(cur_gb, cur_order, ring)
                truncated = bool(Z)
    else:
        f = quotient.f
        cur_cols = [c for c in pres.columns_as_vectors() if c]
        if cur_cols:
            d = matrix_from_vectors(ring, pres.tgt, cur_cols, quotient=quotient)
            diffs.append(d)
            modules.append(d.src)
            for k in range(2, length + 2):
                t = TrackedGB(
                    diffs[-1].columns_as_vectors(),
                    top_order(ring, list(diffs[-1].tgt)),
                    ring,
                    modulus=f,
                )
                Z = [z for z in t.syzygies() if z]
                if not Z:
                    break
                if k == length + 1:
                    truncated = True
                    break
                dk = matrix_from_vectors(ring, diffs[-1].src, Z, quotient=quotient)
                dk = GradedMatrix(
                    ring,
                    dk.tgt,
                    dk.src,
                    {k2: quotient.reduce(v) for k2, v in dk.entries.items()},
                    quotient=quotient,
                    check=False,
                )
                diffs.append(dk)
                modules.append(dk.src)
    return ChainComplex(pres.ring, modules, diffs, quotient=quotient, truncated=truncated)


def minimalize(cx: ChainComplex) -> ChainComplex:
    """Remove unit entries by change of bases (homotopy equivalence)."""
    ring = cx.ring
    q = cx.quotient
    mats = [
        [[d.entry(i, j) for j in range(d.ncols)] for i in range(d.nrows)]
        for d in cx.diffs
    ]
    mods = [list(m) for m in cx.modules]

    def reduce_entry(e):
        return q.reduce(e) if q is not None else e

    changed = True
    while changed:
        changed = False
        for k in range(len(mats)):
            M = mats[k]
            tgt, src = mods[k], mods[k + 1]
            pivot = None
            best = None
            for i in range(len(tgt)):
                for j in range(len(src)):
                    e = M[i][j]
                    if e.is_zero() or src[j] != tgt[i]:
                        continue
                    key = (_deg_tot(tgt[i]), i, j)
                    if best is None or key < best:
                        best = key
                        pivot = (i, j)
            if pivot is None:
                continue
            changed = True
            r, c = pivot
            a = M[r][c].lead_coeff()
            ainv = pow(a, -1, ring.p)
            rowr = M[r]
            colc = [M[i][c] for i in range(len(tgt))]
            # full pivot elimination inside M
            for i in range(len(tgt)):
                if i == r or colc[i].is_zero():
                    continue
                factor = colc[i].scale(ainv)
                for j in range(len(src)):
                    if j == c or rowr[j].is_zero():
                        continue
                    M[i][j] = reduce_entry(M[i][j] - factor * rowr[j])
            # neighbours: d_{k+1} rows (source basis change), d_{k-1} cols
            if k + 1 < len(mats):
                N = mats[k + 1]
                for j in range(len(src)):
                    if j == c or rowr[j].is_zero():
                        continue
                    factor = rowr[j].scale(ainv)
                    for t2 in range(len(mods[k + 2])):
                        if not N[j][t2].is_zero():
                            N[c][t2] = reduce_entry(N[c][t2] + factor * N[j][t2])
            if k - 1 >= 0:
                P = mats[k - 1]
                for i in range(len(tgt)):
                    if i == r or colc[i].is_zero():
                        continue
                    factor = colc[i].scale(ainv)
                    for t2 in range(len(mods[k - 1])):
                        if not P[t2][i].is_zero():
                            P[t2][r] = reduce_entry(P[t2][r] + factor * P[t2][i])
            # delete row r, col c of M; row c of next; col r of prev
            del mods[k][r]
            del mods[k + 1][c]
            for row in M:
                del row[c]
            del M[r]
            if k + 1 < len(mats):
                del mats[k + 1][c]
            if k - 1 >= 0:
                for row in mats[k - 1]:
                    del row[r]
    # drop trailing zero modules
    while mods and len(mods[-1]) == 0:
        mods.pop()
        if mats:
            mats.pop()
    diffs = []
    for k, M in enumerate(mats):
        entries = {}
        for i, row in enumerate(M):
            for j, e in enumerate(row):
                if not e.is_zero():
                    entries[(i, j)] = e
        diffs.append(
            GradedMatrix(ring, tuple(mods[k]), tuple(mods[k + 1]), entries, quotient=q, check=False)
        )
    return ChainComplex(ring, [tuple(m) for m in mods], diffs, quotient=q, truncated=cx.truncated)


def free_resolution(pres: GradedMatrix, length: int, quotient=None, minimal=True) -> ChainComplex:
    cx = resolve(pres, length, quotient=quotient)
    if minimal:
        cx = minimalize(cx)
        for k in range(len(cx.diffs) - 1):
            if not cx.diffs[k].compose(cx.diffs[k + 1]).is_zero():
                raise AssertionError("minimalization broke the complex")
    return cx


def ideal_presentation(I: Ideal) -> GradedMatrix:
    """Presentation of S/I: S <- +S(-deg g)."""
    ring = I.ring
    entries = {}
    src = []
    for j, g in enumerate(I.gens):
        md = g.multidegree()
        src.append(md[0] if len(ring.grading) == 1 else md)
        entries[(0, j)] = g
    tgt = (0,) if len(ring.grading) == 1 else ((0,) * len(ring.grading),)
    return GradedMatrix(ring, tgt, tuple(src), entries, check=False)


def betti_of_ideal(I: Ideal, length=6) -> BettiTable:
    return free_resolution(ideal_presentation(I), length).betti()


# ---------------------------------------------------------------------------
# Kernels, homology, subquotients
# ---------------------------------------------------------------------------


def kernel_generators(A: GradedMatrix, quotient=None):
    """Vectors generating ker(A) (over S/(f) in quotient mode)."""
    ring = A.ring
    cols = A.columns_as_vectors()
    order = top_order(ring, list(A.tgt))
    # kernel of the free-module map: syzygies of the columns, but the
    # coordinates must track zero columns too
    nz = [j for j, c in enumerate(cols) if c]
    t = TrackedGB([cols[j] for j in nz], order, ring,
                  modulus=quotient.f if quotient else None)
    out = []
    for z in t.syzygies():
        v = {}
        for (jj, key), c in z.items():
            v[(nz[jj], key)] = c
        out.append(v)
    # zero columns of A contribute free kernel generators
    for j, c in enumerate(cols):
        if not c:
            out.append({(j, ring.one_key): 1})
    return out


def kernel_matrix(A: GradedMatrix, quotient=None) -> GradedMatrix:
    return matrix_from_vectors(A.ring, A.src, kernel_generators(A, quotient), quotient=quotient)


def lift_columns(B: GradedMatrix, K: GradedMatrix, quotient=None) -> GradedMatrix:
    """L with K . L = B (columns of B lifted through the columns of K)."""
    ring = K.ring
    order = top_order(ring, list(K.tgt))
    t = TrackedGB(K.columns_as_vectors(), order, ring,
                  modulus=quotient.f if quotient else None)
    entries = {}
    for j in range(B.ncols):
        vec = B.column_vec(j)
        if not vec:
            continue
        rep = t.lift(vec)
        if rep is None:
            raise ValueError("column does not lift: not in the submodule")
        cols = {}
        for (i, key), c in rep.items():
            cols.setdefault(i, {})[key] = c
        for i, dd in cols.items():
            entries[(i, j)] = Poly(ring, dd)
    return GradedMatrix(ring, K.src, B.src, entries, quotient=quotient, check=False)


def subquotient_presentation(A: GradedMatrix, B: GradedMatrix, quotient=None) -> GradedMatrix:
    """Presentation of ker(A)/im(B), where A.src == B.tgt and A.B = 0."""
    if A.src != B.tgt:
        raise ValueError("middle modules disagree")
    K = kernel_matrix(A, quotient=quotient)
    L = lift_columns(B, K, quotient=quotient)
    KZ = matrix_from_vectors(
        K.ring, K.tgt,
        kernel_generators(K, quotient=quotient), quotient=quotient,
    )
    # relations on the kernel generators: lifted B columns + syzygies of K
    entries = dict(L.entries)
    off = L.ncols
    syz_src = []
    # KZ columns are vectors over K's source positions
    for j in range(KZ.ncols):
        syz_src.append(KZ.src[j])
        for (i, jj), e in KZ.entries.items():
            if jj == j:
                entries[(i, off + j)] = e
    return GradedMatrix(
        K.ring, K.src, tuple(L.src) + tuple(syz_src), entries, quotient=quotient, check=False
    )


def prune_presentation(pres: GradedMatrix, quotient=None) -> GradedMatrix:
    """Minimal presentation (drop unit relations)."""
    cx = ChainComplex(pres.ring, [pres.tgt, pres.src], [pres], quotient=quotient)
    mcx = minimalize(cx)
    if not mcx.diffs:
        tgt = mcx.modules[0] if mcx.modules else ()
        return GradedMatrix(pres.ring, tgt, (), {}, quotient=quotient, check=False)
    return mcx.diffs[0]


def homology(cx: ChainComplex, i: int) -> GradedMatrix:
    """Presentation of H_i = ker(d_i)/im(d_{i+1})."""
    if i < 0 or i >= len(cx.modules):
        raise IndexError("homology position out of range")
    q = cx.quotient
    if i == 0:
        incoming = cx.diffs[0] if cx.diffs else GradedMatrix(
            cx.ring, cx.modules[0], (), {}, quotient=q, check=False)
        return prune_presentation(incoming, quotient=q)
    A = cx.diffs[i - 1]
    if i < len(cx.diffs):
        B = cx.diffs[i]
    else:
        B = GradedMatrix(cx.ring, cx.modules[i], (), {}, quotient=q, check=False)
    return prune_presentation(subquotient_presentation(A, B, quotient=q), quotient=q)


def ext_module(pres: GradedMatrix, i: int, dualizing_twist, length=None) -> GradedMatrix:
    """Presentation of Ext^i(coker pres, S(-a)) for a = dualizing_twist."""
    a = dualizing_twist
    L = length if length is not None else i + 1
    cx = free_resolution(pres, max(L, i + 1), minimal=True)
    if i > len(cx.diffs):
        raise IndexError("Ext index exceeds resolution length")
    # dual complex: D_k = Hom(F_k, S(-a)); maps D_{k-1} -> D_k
    if i < len(cx.diffs):
        A = cx.diffs[i].transpose_into(a)          # F_i* -> F_{i+1}*
    else:
        A = GradedMatrix(cx.ring, (), tuple(_deg_sub(a, t) for t in cx.modules[i]), {}, check=False)
    if i >= 1:
        B = cx.diffs[i - 1].transpose_into(a)      # F_{i-1}* -> F_i*
    else:
        B = GradedMatrix(cx.ring, tuple(_deg_sub(a, t) for t in cx.modules[0]), (), {}, check=False)
    return prune_presentation(subquotient_presentation(A, B))


def module_gb(pres: GradedMatrix, quotient=None):
    """GB data of the relation submodule: (gb elems, order)."""
    ring = pres.ring
    order = top_order(ring, list(pres.tgt))
    cols = [c for c in pres.columns_as_vectors() if c]
    vecs = list(cols)
    if quotient is not None:
        for i in range(pres.nrows):
            vecs.append({(i, k): c for k, c in quotient.f.d.items()})
    gb = buchberger(vecs, order, ring) if vecs else []
    return gb, order


def graded_dim(pres: GradedMatrix, degvec, quotient=None, _gbcache=None) -> int:
    """dim_K of coker(pres) in the given degree."""
    ring = pres.ring
    if isinstance(degvec, int):
        degvec = (degvec,)
    if _gbcache is not None and "gb" in _gbcache:
        gb, order = _gbcache["gb"]
    else:
        gb, order = module_gb(pres, quotient=quotient)
        if _gbcache is not None:
            _gbcache["gb"] = (gb, order)
    leads = {}
    for g in gb:
        leads.setdefault(g.lead[0], []).append(g.lead[1])
    total = 0
    for pos, t in enumerate(pres.tgt):
        tv = (t,) if isinstance(t, int) else t
        rem = tuple(d - tt for d, tt in zip(degvec, tv))
        if any(r < 0 for r in rem):
            continue
        lead = leads.get(pos, [])
        for k in ring.monomials_of_multidegree(rem):
            if not any(ring.divides(l, k) for l in lead):
                total += 1
    return total


def module_hilbert_numerator(pres: GradedMatrix, quotient=None) -> dict:
    """Numerator of the Hilbert series of coker(pres) over (1-t)^n."""
    ring = pres.ring
    if len(ring.grading) != 1:
        raise ValueError("numerator only supported for rank-1 grading")
    gb, order = module_gb(pres, quotient=quotient)
    leads = {}
    for g in gb:
        leads.setdefault(g.lead[0], []).append(ring.decode(g.lead[1]))
    out = {}
    for pos, t in enumerate(pres.tgt):
        lead = tuple(sorted(map(tuple, leads.get(pos, []))))
        num = dict(_monomial_numerator(lead))
        for k, c in num.items():
            kk = k + t
            out[kk] = out.get(kk, 0) + c
            if out[kk] == 0:
                del out[kk]
    return out


def module_hilbert_polynomial(pres: GradedMatrix, quotient=None):
    num = module_hilbert_numerator(pres, quotient=quotient)
    return _numerator_to_hp(num, pres.ring.n)


# ---------------------------------------------------------------------------
# Hom in degree zero, section module, ideal identification
# ---------------------------------------------------------------------------


def hom_degree_component(Mpres: GradedMatrix, Npres: GradedMatrix, shift=0, quotient=None):
    """Basis of Hom(M, N)_shift as a list of GradedMatrix (maps F0^M -> N
    descending to M), where M = coker Mpres, N = coker Npres."""
    ring = Mpres.ring
    p = ring.p
    ncache = {}
    ngb, norder = module_gb(Npres, quotient=quotient)
    nleads = {}
    for g in ngb:
        nleads.setdefault(g.lead[0], []).append((g.lead[1], g))

    if len(ring.grading) != 1:
        raise ValueError("hom_degree_component needs a rank-1 grading")

    def n_basis(deg):
        """Standard monomial basis of N in the given degree."""
        if deg in ncache:
            return ncache[deg]
        out = []
        for pos, t in enumerate(Npres.tgt):
            rem = deg - _deg_tot(t)
            if rem < 0:
                continue
            lead = [lk for lk, _ in nleads.get(pos, [])]
            for k in ring.monomials_of_multidegree((rem,)):
                if not any(ring.divides(l, k) for l in lead):
                    out.append((pos, k))
        ncache[deg] = out
        return out

    def n_reduce(vec):
        from .groebner import normal_form
        return normal_form(vec, nleads, norder, ring)

    # unknowns: for each generator g_i of M (degree d_i), an element of
    # N_{d_i + shift}
    unknowns = []
    slot = {}
    for i, d in enumerate(Mpres.tgt):
        basis = n_basis(_deg_tot(d) + shift)
        for b in basis:
            slot[(i, b)] = len(unknowns)
            unknowns.append((i, b))
    if not unknowns:
        return []
    # conditions: for each relation column of M, sum_i phi(g_i) r_{ik} = 0 in N
    rows = []
    for k in range(Mpres.ncols):
        col = {i: Mpres.entry(i, k) for i in range(Mpres.nrows)}
        col = {i: e for i, e in col.items() if not e.is_zero()}
        if not col:
            continue
        edeg = _deg_tot(Mpres.src[k]) + shift
        tbasis = n_basis(edeg)
        tindex = {b: t for t, b in enumerate(tbasis)}
        cond = {}
        for i, e in col.items():
            for (ii, b) in unknowns:
                if ii != i:
                    continue
                pos, key = b
                prod = {}
                for mk, mc in e.d.items():
                    kk = ring.mul(mk, key)
                    prod[(pos, kk)] = (prod.get((pos, kk), 0) + mc) % p
                red = n_reduce(prod)
                for (pp, kk), c in red.items():
                    t = tindex.get((pp, kk))
                    if t is None:
                        raise AssertionError("reduced term outside standard basis")
                    cond[(t, slot[(ii, b)])] = (cond.get((t, slot[(ii, b)]), 0) + c) % p
        nrows = len(tbasis)
        mat = np.zeros((nrows, len(unknowns)), dtype=np.int64)
        for (t, s), c in cond.items():
            mat[t, s] = c
        rows.append(mat)
    if rows:
        big = np.concatenate(rows, axis=0)
    else:
        big = np.zeros((0, len(unknowns)), dtype=np.int64)
    null = linalg.nullspace_modp(big, p)
    out = []
    for r in null:
        entries = {}
        for (i, (pos, key)), s in slot.items():
            c = int(r[s])
            if c:
                cur = entries.get((i, pos), {})
                cur[key] = c
                entries[(i, pos)] = cur
        out.append({k: Poly(ring, v) for k, v in entries.items()})
    return out


def section_module(I: Ideal, dualizing_twist=5, codim=3) -> GradedMatrix:
    """Presentation of the section module of a curve: the S2-ification
    Ext^c(Ext^c(S/I, S(-n-1)), S(-n-1)) with c = codim."""
    pres = ideal_presentation(I)
    omega = ext_module(pres, codim, dualizing_twist, length=I.ring.n)
    return ext_module(omega, codim, dualizing_twist, length=I.ring.n)


class AmbiguousEmbeddingError(RuntimeError):
    pass


def identify_ideal(H: GradedMatrix, quotient: QuotientRing) -> Ideal:
    """Realize a rank-1 torsion-free module over S_X as a saturated ideal
    of S: a degree-0 generator of Hom(H, S_X) embeds H, and the output is
    the saturation of its image together with f."""
    ring = H.ring
    f = quotient.f
    spres = GradedMatrix(ring, (0,), (f.total_degree(),), {(0, 0): f}, check=False)
    homs = hom_degree_component(H, spres, shift=0)
    if len(homs) != 1:
        raise AmbiguousEmbeddingError(
            f"degree-0 Hom piece has dimension {len(homs)}, expected 1"
        )
    phi = homs[0]
    gens = []
    for (i, pos), poly in phi.items():
        assert pos == 0
        gens.append(poly)
    gens.append(f)
    return Ideal(ring, gens).saturate()


# ---------------------------------------------------------------------------
# Truncated dense linear-algebra oracles (independent of the GB engine)
# ---------------------------------------------------------------------------


def _monomial_list(ring, d):
    return ring.monomials_of_multidegree((d,) * len(ring.grading))


def hf_oracle(ring, gens, dmax):
    """Hilbert function of S/(gens) in degrees 0..dmax by row reduction of
    generator multiples.  No Groebner machinery."""
    out = []
    for d in range(dmax + 1):
        mons = _monomial_list(ring, d)
        idx = {k: i for i, k in enumerate(mons)}
        rows = []
        for g in gens:
            gd = g.total_degree()
            if gd > d:
                continue
            for mk in _monomial_list(ring, d - gd):
                prod = g.mul_monomial(mk)
                row = [0] * len(mons)
                for k, c in prod.d.items():
                    row[idx[k]] = c
                rows.append(row)
        rank = linalg.rank_modp(linalg.as_matrix(rows, len(mons)), ring.p) if rows else 0
        out.append(len(mons) - rank)
    return out


def koszul_betti_oracle(ring, gens, dmax):
    """Graded Betti numbers beta_{i,j}(S/I) for j <= dmax via Koszul
    strand ranks over exact quotient bases.  Independent oracle."""
    p = ring.p
    n = ring.n
    # quotient bases per degree: RREF of generator multiples
    basis = {}
    red = {}
    mons = {}
    for d in range(dmax + 2):
        ml = _monomial_list(ring, d)
        mons[d] = ml
        idx = {k: i for i, k in enumerate(ml)}
        rows = []
        for g in gens:
            gd = g.total_degree()
            if gd > d:
                continue
            for mk in _monomial_list(ring, d - gd):
                prod = g.mul_monomial(mk)
                row = [0] * len(ml)
                for k, c in prod.d.items():
                    row[idx[k]] = c
                rows.append(row)
        R, piv = linalg.rref_modp(linalg.as_matrix(rows, len(ml)), p) if rows else (
            np.zeros((0, len(ml)), dtype=np.int64), [])
        free = [c for c in range(len(ml)) if c not in piv]
        basis[d] = free
        red[d] = (R[: len(piv)], piv, idx)

    def reduce_mono(d, key):
        """Coordinates of a monomial in the quotient basis of degree d."""
        R, piv, idx = red[d]
        v = np.zeros(len(mons[d]), dtype=np.int64)
        v[idx[key]] = 1
        for ri, c in enumerate(piv):
            if v[c]:
                v = (v - v[c] * R[ri]) % p
        return [int(v[c]) for c in basis[d]]

    out = {}
    subsets = {i: list(itertools.combinations(range(n), i)) for i in range(n + 2)}
    for j in range(0, dmax + 1):
        for i in range(0, min(n, j) + 1):
            d_mid = j - i
            if d_mid < 0:
                continue
            def strand_matrix(ii):
                """Koszul map M_{j-ii} (x) L^ii -> M_{j-ii+1} (x) L^(ii-1)."""
                dd = j - ii
                if ii < 1 or dd < 0 or dd + 1 > dmax + 1:
                    return None
                rows_b = [(S, b) for S in subsets[ii - 1] for b in range(len(basis[dd + 1]))]
                rindex = {t: a for a, t in enumerate(rows_b)}
                cols_b = [(S, b) for S in subsets[ii] for b in range(len(basis[dd]))]
                mat = np.zeros((len(rows_b), len(cols_b)), dtype=np.int64)
                for cidx, (S, b) in enumerate(cols_b):
                    key = mons[dd][basis[dd][b]] if basis[dd] else None
                    if key is None:
                        continue
                    for t, var in enumerate(S):
                        S2 = S[:t] + S[t + 1:]
                        sign = (-1) ** t
                        kk = ring.mul(key, ring.var_keys[var])
                        coords = reduce_mono(dd + 1, kk)
                        for b2, c in enumerate(coords):
                            if c:
                                r = rindex[(S2, b2)]
                                mat[r, cidx] = (mat[r, cidx] + sign * c) % p
                return mat
            Ai = strand_matrix(i)       # C_i -> C_{i-1}
            Ai1 = strand_matrix(i + 1)  # C_{i+1} -> C_i
            dim_mid = len(subsets[i]) * len(basis[d_mid])
            r1 = linalg.rank_modp(Ai, p) if Ai is not None and Ai.size else 0
            r2 = linalg.rank_modp(Ai1, p) if Ai1 is not None and Ai1.size else 0
            b = dim_mid - r1 - r2
            if b:
                out[(i, j)] = b
    return out
