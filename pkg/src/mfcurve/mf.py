"""Matrix factorizations of hypersurfaces.

A factorization of a degree-s form f is a pair of square graded matrices
(phi, psi) with psi.phi = f*id and phi(s).psi = f*id exactly over S.  The
pair arises as the 2-periodic tail of a minimal S/(f)-resolution, with
psi the even-to-odd differential.
"""

from __future__ import annotations

from .homalg import (
    ChainComplex,
    GradedMatrix,
    BettiTable,
    free_resolution,
    identity_matrix,
    ideal_presentation,
    _deg_tot,
)
from .groebner import TrackedGB, top_order
from .ideals import Ideal
from .rings import Poly, PolyRing, QuotientRing


class Shape:
    """Twist-slice counts of psi: rows r = (targets at t0+r, sources at
    t0+r+1), the paper's two-column display."""

    def __init__(self, rows, s):
        self.rows = [tuple(r) for r in rows]
        self.s = s

    @classmethod
    def from_psi(cls, psi: GradedMatrix, s: int) -> "Shape":
        tgt = sorted(_deg_tot(t) for t in psi.tgt)
        src = sorted(_deg_tot(t) for t in psi.src)
        t0 = tgt[0]
        hi = max(tgt[-1], src[-1] - 1)
        rows = []
        for r in range(hi - t0 + 1):
            rows.append((tgt.count(t0 + r), src.count(t0 + r + 1)))
        while rows and rows[-1] == (0, 0):
            rows.pop()
        return cls(rows, s)

    def size(self):
        return sum(a for a, _ in self.rows)

    def __eq__(self, other):
        return isinstance(other, Shape) and self.rows == other.rows and self.s == other.s

    def __hash__(self):
        return hash((tuple(self.rows), self.s))

    def render(self) -> str:
        return " / ".join(
            f"{a if a else '.'} {b if b else '.'}" for a, b in self.rows
        )

    def __repr__(self):
        return f"Shape({self.render()}, s={self.s})"


class MatrixFactorization:
    """(phi, psi) with the exact composite identities over S."""

    def __init__(self, f: Poly, psi: GradedMatrix, phi: GradedMatrix, trivial=False):
        self.f = f
        self.s = f.total_degree()
        self.psi = psi
        self.phi = phi
        self.ring = f.ring
        self.quotient = QuotientRing(f.ring, f)
        self.trivial = trivial

    def size(self):
        return self.psi.nrows

    def verify(self) -> bool:
        """Both composite identities, exactly over S."""
        n = self.size()
        if self.psi.ncols != n or self.phi.nrows != n or self.phi.ncols != n:
            return False
        comp1 = _strip_quotient(self.psi).compose(_strip_quotient(self.phi))
        if not _is_f_identity(comp1, self.f):
            return False
        comp2 = _strip_quotient(self.phi).compose(_strip_quotient(self.psi).twist(self.s))
        return _is_f_identity(comp2, self.f)

    def shape(self) -> Shape:
        if not self.trivial and (self.psi.has_unit_entry() or self.phi.has_unit_entry()):
            raise ValueError("shape of a non-minimal factorization")
        return Shape.from_psi(self.psi, self.s)

    def transpose(self) -> "MatrixFactorization":
        """(psi^t, phi^t), again a factorization of f."""
        psi_t = self.phi.transpose_into(0)
        phi_t = self.psi.transpose_into(0)
        mf = MatrixFactorization(self.f, psi_t, phi_t, trivial=self.trivial)
        return mf.normalize()

    def normalize(self) -> "MatrixFactorization":
        """Shift twists so the lowest psi target degree is 0."""
        base = min(_deg_tot(t) for t in self.psi.tgt)
        if base == 0:
            return self
        return MatrixFactorization(
            self.f, self.psi.twist(-base), self.phi.twist(-base), trivial=self.trivial
        )

    def coker_phi_presentation(self) -> GradedMatrix:
        """Presentation of the MCM module im(psi) = coker(phi) over S_X."""
        return GradedMatrix(
            self.ring,
            self.psi.src,
            self.phi.src,
            dict(self.phi.entries),
            quotient=self.quotient,
            check=False,
        )

    def __repr__(self):
        return f"MatrixFactorization(size={self.size()}, s={self.s})"


def _strip_quotient(m: GradedMatrix) -> GradedMatrix:
    if m.quotient is None:
        return m
    return GradedMatrix(m.ring, m.tgt, m.src, dict(m.entries), quotient=None, check=False)


def _is_f_identity(m: GradedMatrix, f: Poly) -> bool:
    n = m.nrows
    if m.ncols != n:
        return False
    for i in range(n):
        for j in range(n):
            e = m.entry(i, j)
            if i == j:
                if not (e - f).is_zero():
                    return False
            elif not e.is_zero():
                return False
    return True


class PeriodicityError(RuntimeError):
    pass


def invert_degree_zero(H: GradedMatrix) -> GradedMatrix:
    """Inverse of a degree-0 graded endomorphism (block triangular over
    the twist slices with constant diagonal blocks)."""
    import numpy as np

    from . import linalg

    ring = H.ring
    p = ring.p
    n = H.nrows
    order = sorted(range(n), key=lambda i: _deg_tot(H.tgt[i]))
    slices = {}
    for i in order:
        slices.setdefault(_deg_tot(H.tgt[i]), []).append(i)
    degset = sorted(slices)
    # X = H^{-1}: X_aa = (H_aa)^{-1}; X_ab = -X_aa sum_{a<c<=b} H_ac X_cb
    X = {}
    inv_diag = {}
    for d in degset:
        idx = slices[d]
        blk = np.zeros((len(idx), len(idx)), dtype=np.int64)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                e = H.entry(i, j)
                blk[a, b] = e.lead_coeff() if not e.is_zero() else 0
        m = len(idx)
        aug = np.concatenate([blk, np.eye(m, dtype=np.int64)], axis=1)
        R, piv = linalg.rref_modp(aug, p)
        if piv != list(range(m)):
            raise PeriodicityError("twist-slice block is singular")
        inv_diag[d] = R[:, m:]
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                c = int(inv_diag[d][a, b])
                if c:
                    X[(i, j)] = ring.const(c)
    for da_i, da in enumerate(degset):
        for db in degset[da_i + 1:]:
            # X_ab = -X_aa * sum_{c in (a, b]} H_ac X_cb
            A = slices[da]
            B = slices[db]
            acc = {}
            for dc in degset:
                if dc <= da or dc > db:
                    continue
                C = slices[dc]
                for i in A:
                    for j in B:
                        s = ring.zero()
                        for k in C:
                            h = H.entry(i, k)
                            xkj = X.get((k, j))
                            if xkj is not None and not h.is_zero():
                                s = s + h * xkj
                        if not s.is_zero():
                            acc[(i, j)] = acc.get((i, j), ring.zero()) + s
            for i in A:
                for j in B:
                    s = ring.zero()
                    for i2 in A:
                        xai = X.get((i, i2))
                        t = acc.get((i2, j))
                        if xai is not None and t is not None:
                            s = s + xai * t
                    if not s.is_zero():
                        X[(i, j)] = -s
    return GradedMatrix(ring, H.tgt, H.src, X, check=False)


def mf_from_module(pres: GradedMatrix, f: Poly, step_bound=None) -> MatrixFactorization:
    """Certified periodic pair from the minimal S/(f)-resolution of the
    module coker(pres).  f must annihilate the module."""
    ring = pres.ring
    s = f.total_degree()
    # annihilation check: f * e_i lies in the relation submodule over S
    cols = [c for c in pres.columns_as_vectors() if c]
    order = top_order(ring, list(pres.tgt))
    t = TrackedGB(cols, order, ring) if cols else None
    for i in range(pres.nrows):
        fv = {(i, k): c for k, c in f.d.items()}
        if t is None or t.lift(fv) is None:
            raise ValueError("form does not annihilate the module")
    quotient = QuotientRing(ring, f)
    # projective dimension over S for the step bound
    if step_bound is None:
        cx_s = free_resolution(pres, ring.n + 1)
        step_bound = 3 + len(cx_s.diffs)
    cx = free_resolution(pres, step_bound, quotient=quotient)
    diffs = cx.diffs
    mods = cx.modules
    # periodic window: twists of F_{k+1} equal twists of F_{k-1} shifted
    # by s; then psi = d_k, phi = d_{k+1}, certified by the composites.
    for k in range(1, len(diffs)):
        tw_a = sorted(_deg_tot(d) for d in mods[k - 1])
        tw_c = sorted(_deg_tot(d) - s for d in mods[k + 1])
        if tw_a != tw_c or not tw_a:
            continue
        try:
            return _certify_pair(diffs[k - 1], diffs[k], f)
        except PeriodicityError:
            continue
    # free module over S_X: the trivial factorization (1) . (f)
    if not diffs or all(len(m) == 0 for m in mods[1:]):
        one = identity_matrix(ring, (s,))
        psi = GradedMatrix(ring, (0,), (s,), {(0, 0): f}, check=False)
        phi = GradedMatrix(ring, (s,), (s,), {(0, 0): ring.const(1)}, check=False)
        return MatrixFactorization(f, psi, phi, trivial=True)
    raise PeriodicityError(
        f"no certified periodic pair within {step_bound} steps"
    )


def _certify_pair(psi: GradedMatrix, phi: GradedMatrix, f: Poly) -> MatrixFactorization:
    """psi.phi = f*H with H a degree-0 automorphism; rebase phi by H^{-1}."""
    ring = psi.ring
    s = f.total_degree()
    if psi.ncols != phi.nrows or psi.nrows != phi.ncols:
        raise PeriodicityError("pair is not square")
    comp = _strip_quotient(psi).compose(_strip_quotient(phi))
    entries = {}
    for (i, j), e in comp.entries.items():
        q = _exact_divide(e, f)
        if q is None:
            raise PeriodicityError("composite is not a multiple of f")
        entries[(i, j)] = q
    H = GradedMatrix(ring, psi.tgt, tuple(_deg_sub_int(d, s) for d in phi.src), entries, check=False)
    Hinv = invert_degree_zero(H)
    phi2 = _strip_quotient(phi).compose(Hinv.twist(s))
    mf = MatrixFactorization(f, _strip_quotient(psi), phi2)
    if not mf.verify():
        raise PeriodicityError("composite identities failed after rebase")
    return mf.normalize()


def _deg_sub_int(d, s):
    return d - s if isinstance(d, int) else tuple(x - y for x, y in zip(d, (s,) * len(d)))


def _exact_divide(e: Poly, f: Poly):
    """e / f if f divides e exactly, else None."""
    ring = e.ring
    p = ring.p
    rem = dict(e.d)
    out = {}
    flk = f.lead_key()
    flc = f.lead_coeff()
    finv = pow(flc, -1, p)
    while rem:
        k = max(rem)
        q = ring.div(k, flk)
        if q is None:
            return None
        c = rem[k] * finv % p
        out[q] = c
        base = q - ring._offset
        for fk, fc in f.d.items():
            kk = fk + base
            v = (rem.get(kk, 0) - c * fc) % p
            if v:
                rem[kk] = v
            else:
                rem.pop(kk, None)
    return Poly(ring, out)


def predict_shape(betti: BettiTable, s: int) -> tuple:
    """Expected factorization shape from the Betti table of N over S:
    stack the resolution with period-s twist shifts, apply the forced
    cancellation of the hypersurface equation, return (Shape, flags).

    flags counts twist slices where further (unforced) cancellation is
    possible; those entries are reported, never resolved.
    """
    data = {k: v for k, v in betti.data.items() if v}
    if not data:
        raise ValueError("empty Betti table")
    pd = max(i for i, _ in data)

    def stack(k):
        out = {}
        m = 0
        while k - 2 * m >= 0:
            i = k - 2 * m
            for (ii, j), v in data.items():
                if ii == i:
                    t = j + m * s
                    out[t] = out.get(t, 0) + v
            m += 1
        return out

    if pd == 0:
        # free module: the only factorization is the hypersurface itself
        T, S = {0: 1}, {s: 1}
        ncancel = 0
    else:
        # the tail is periodic from step pd-1 on; psi: G_{pd-1} <- G_pd
        T = stack(pd - 1)
        S = stack(pd)
        # forced cancellation: the equation f is a minimal relation of
        # degree s on the degree-0 generator; one pair cancels per period
        ncancel = min(data.get((0, 0), 0), data.get((1, s), 0))

    def cancel_twist(k):
        # F_0 copy sits at (k/2)s in even steps, the F_1 copy at
        # ((k+1)/2)s in odd steps; both land on the same unit of d_k
        return (k // 2) * s if k % 2 == 0 else ((k + 1) // 2) * s

    for _ in range(ncancel):
        t_t = cancel_twist(pd - 1)
        s_t = cancel_twist(pd)
        if T.get(t_t, 0) > 0 and S.get(s_t, 0) > 0:
            T[t_t] -= 1
            S[s_t] -= 1
            if not T[t_t]:
                del T[t_t]
            if not S[s_t]:
                del S[s_t]
    t0 = min(T)
    hi = max(max(T), max(S) - 1)
    rows = []
    for r in range(hi - t0 + 1):
        rows.append((T.get(t0 + r, 0), S.get(t0 + r + 1, 0)))
    while rows and rows[-1] == (0, 0):
        rows.pop()
    flags = {}
    for tt in set(T) | set(S):
        extra = min(T.get(tt, 0), S.get(tt, 0))
        if extra:
            flags[tt - t0] = extra
    return Shape(rows, s), flags


def mf_from_curve_ideal(I: Ideal, f: Poly, use_section_module=False, step_bound=None):
    """Factorization induced by S/I (or by its section module) on V(f)."""
    if use_section_module:
        from .homalg import section_module

        pres = section_module(I)
    else:
        pres = ideal_presentation(I)
    return mf_from_module(pres, f, step_bound=step_bound)
