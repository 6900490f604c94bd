"""Monads from matrix factorizations and the reconstruction of curves.

The monad of a factorization (phi, psi) on X = V(f) has target the top
twist slice of psi's target, and source the low source slices together
with a constant subbundle of the bottom source slice chosen inside the
kernel of the linear block delta.  Its middle homology is the ideal
sheaf of a curve on X, realized as a saturated ideal by identify_ideal.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .curves import CurveRecord, invariants, is_smooth
from .groebner import TrackedGB, top_order
from .homalg import (
    GradedMatrix,
    free_resolution,
    graded_dim,
    hom_degree_component,
    ideal_presentation,
    identify_ideal,
    lift_columns,
    kernel_generators,
    matrix_from_vectors,
    module_hilbert_polynomial,
    prune_presentation,
    section_module,
    subquotient_presentation,
    _deg_tot,
)
from .ideals import Ideal, hp_eval
from .mf import MatrixFactorization, Shape
from .rings import Poly, QuotientRing


class ReconstructionError(RuntimeError):
    """Recoverable failure; caller may retry with a fresh random choice."""


TABLE2_SHAPES = {
    (12, 14): [(15, 2), (2, 15)],
    (13, 15): [(18, 3), (3, 18)],
    (16, 17): [(19, 1), (0, 3), (4, 19)],
    (17, 18): [(22, 2), (0, 3), (5, 22)],
    (18, 19): [(25, 3), (0, 3), (6, 25)],
    (19, 20): [(28, 4), (0, 3), (7, 28)],
    (20, 20): [(22, 0), (0, 4), (6, 24)],
}

KERNEL_DIMS = {(12, 14): 5, (13, 15): 3}


def _slices(degrees):
    out = {}
    for i, d in enumerate(degrees):
        out.setdefault(_deg_tot(d), []).append(i)
    return out


class MonadData:
    def __init__(self, mf, A, B, proj_rows, fixed_cols, chosen):
        self.mf = mf
        self.A = A            # alpha . (generators of F): rows of psi
        self.B = B            # columns into the source free module
        self.proj_rows = proj_rows
        self.fixed_cols = fixed_cols
        self.chosen = chosen  # constant matrix of kernel columns or None
        self.alpha_surjective = None
        self.beta_injective = None


def delta_block(mf: MatrixFactorization):
    """(delta, top target rows, bottom source cols): the linear block of
    psi from the bottom source slice to the top target slice."""
    psi = mf.psi
    tslices = _slices(psi.tgt)
    sslices = _slices(psi.src)
    top_t = max(tslices)
    bot_s = max(sslices)
    rows = tslices[top_t]
    cols = sslices[bot_s]
    if bot_s - top_t != 1:
        raise ReconstructionError("unexpected twist layout for the delta block")
    return psi.submatrix(rows, cols), rows, cols


def constant_kernel(mf: MatrixFactorization, target=None):
    """Basis of the constant kernel of delta, as rows of an int matrix."""
    delta, rows, cols = delta_block(mf)
    ring = mf.ring
    p = ring.p
    mons = sorted({k for e in delta.entries.values() for k in e.d})
    midx = {k: i for i, k in enumerate(mons)}
    mat = np.zeros((len(rows) * len(mons), len(cols)), dtype=np.int64)
    for (i, j), e in delta.entries.items():
        for k, c in e.d.items():
            mat[i * len(mons) + midx[k], j] = c
    null = linalg.nullspace_modp(mat, p)
    if target is not None:
        want = KERNEL_DIMS.get(tuple(target))
        if want is not None and null.shape[0] < want:
            raise ReconstructionError(
                f"kernel dimension {null.shape[0]} below the expected {want}"
            )
    return null


def expected_shape(target) -> Shape:
    rows = TABLE2_SHAPES.get(tuple(target))
    if rows is None:
        raise ValueError(f"unsupported (g, d) {target}; not in the Table 2 range")
    return rows


def assemble_monad(mf: MatrixFactorization, target, choice=None, seed=None) -> MonadData:
    """Monad terms from twist bookkeeping; for cubic targets a rank-2
    constant subspace of ker(delta) is required (drawn from seed if not
    given)."""
    g, d = target
    want = expected_shape(target)
    if mf.shape().rows != want:
        raise ReconstructionError(
            f"shape {mf.shape().rows} does not match Table 2 entry {want}"
        )
    psi = mf.psi
    ring = mf.ring
    p = ring.p
    tslices = _slices(psi.tgt)
    ssl = _slices(psi.src)
    top_t = max(tslices)
    bot_s = max(ssl)
    proj_rows = tslices[top_t]
    fixed_cols = [j for t, js in sorted(ssl.items()) if t != bot_s for j in js]
    chosen = None
    if mf.s == 3:
        kern = constant_kernel(mf, target)
        kdim = kern.shape[0]
        if choice is None:
            if seed is None:
                raise ReconstructionError("cubic case needs a kernel choice or a seed")
            rng = seed.stream("kernel-choice")
            while True:
                combo = np.array(
                    [[rng.field_elt(p) for _ in range(kdim)] for _ in range(2)],
                    dtype=np.int64,
                )
                if linalg.rank_modp(combo, p) == 2:
                    break
            chosen = combo % p @ kern % p
        else:
            chosen = np.array(choice, dtype=np.int64) % p
            if chosen.shape[0] != 2:
                raise ReconstructionError("kernel choice must have rank 2")
            # verify the choice really kills delta
            delta, _, cols = delta_block(mf)
            for r in range(2):
                for i in proj_rows:
                    acc = {}
                    for jj, j in enumerate(cols):
                        e = psi.entry(i, j)
                        if e.is_zero():
                            continue
                        c = int(chosen[r, jj])
                        for k, cc in e.d.items():
                            acc[k] = (acc.get(k, 0) + c * cc) % p
                    if any(acc.values()):
                        raise ReconstructionError("choice does not lie in ker(delta)")
    # A: the top-slice rows of psi
    A = psi.submatrix(proj_rows, list(range(psi.ncols)))
    # B: unit columns for the fixed slices, constant combinations for the
    # chosen kernel columns
    entries = {}
    src = []
    for jj, j in enumerate(fixed_cols):
        entries[(j, jj)] = ring.const(1)
        src.append(psi.src[j])
    if chosen is not None:
        bot_cols = ssl[bot_s]
        for r in range(chosen.shape[0]):
            col_idx = len(src)
            for jj, j in enumerate(bot_cols):
                c = int(chosen[r, jj])
                if c % p:
                    entries[(j, col_idx)] = ring.const(c)
            src.append(bot_s)
    B = GradedMatrix(ring, psi.src, tuple(src), entries, quotient=mf.quotient, check=False)
    monad = MonadData(mf, A, B, proj_rows, fixed_cols, chosen)
    comp = A.compose(B)
    if not all(mf.quotient.reduce(e).is_zero() for e in comp.entries.values()):
        raise ReconstructionError("alpha . beta is not zero")
    return monad


def certify_monad(monad: MonadData) -> None:
    """alpha surjective (cokernel of A vanishes) and beta injective
    (kernel of psi.B vanishes), both over S_X."""
    mf = monad.mf
    q = mf.quotient
    Apres = GradedMatrix(
        mf.ring,
        tuple(mf.psi.tgt[i] for i in monad.proj_rows),
        monad.A.src,
        dict(monad.A.entries),
        quotient=q,
        check=False,
    )
    pruned = prune_presentation(Apres, quotient=q)
    monad.alpha_surjective = len(pruned.tgt) == 0
    if not monad.alpha_surjective:
        raise ReconstructionError("alpha is not surjective")
    full_beta = mf.psi.compose(monad.B)
    kg = kernel_generators(full_beta, quotient=q)
    monad.beta_injective = not kg
    if not monad.beta_injective:
        raise ReconstructionError("beta is not injective")


def monad_homology_ideal(monad: MonadData, expect=None) -> Ideal:
    """ker(alpha)/im(beta) realized as a saturated ideal of S."""
    mf = monad.mf
    q = mf.quotient
    # relations of F on the psi source generators are the phi columns
    rel = GradedMatrix(
        mf.ring, mf.psi.src, mf.phi.src,
        {k: q.reduce(v) for k, v in mf.phi.entries.items()},
        quotient=q, check=False,
    )
    ncols = monad.B.ncols + rel.ncols
    entries = {}
    for (i, j), e in monad.B.entries.items():
        entries[(i, j)] = e
    for (i, j), e in rel.entries.items():
        entries[(i, monad.B.ncols + j)] = e
    bfull = GradedMatrix(
        mf.ring, mf.psi.src, tuple(monad.B.src) + tuple(rel.src), entries,
        quotient=q, check=False,
    )
    Amat = GradedMatrix(
        mf.ring,
        tuple(mf.psi.tgt[i] for i in monad.proj_rows),
        mf.psi.src,
        dict(monad.A.entries),
        quotient=q,
        check=False,
    )
    H = prune_presentation(subquotient_presentation(Amat, bfull, quotient=q), quotient=q)
    if expect is not None:
        g, d = expect
        hp = module_hilbert_polynomial(H, quotient=q)
        want = _ideal_sheaf_hp(mf, d, g)
        if [x for x in hp] != [x for x in want]:
            raise ReconstructionError(
                f"homology Hilbert polynomial {hp} != expected {want}"
            )
    return identify_ideal(H, q)


def _ideal_sheaf_hp(mf, d, g):
    """HP of I_{C/X} = HP(S_X) - (d t + 1 - g), normalized to the monad's
    twist base (the identify step works with the untwisted module)."""
    from fractions import Fraction

    from .ideals import _numerator_to_hp

    s = mf.s
    n = mf.ring.n
    num_sx = {0: 1, s: -1}
    hp_sx = _numerator_to_hp(num_sx, n)
    want = list(hp_sx) + [Fraction(0)] * 0
    want[0] -= 1 - g
    want[1] -= d
    return want


def _twist_base(monad):
    """Minimal target degree of A (the monad is built in psi's twists)."""
    return min(_deg_tot(t) for t in monad.A.tgt)


def curve_from_mf(mf: MatrixFactorization, target, choice=None, seed=None,
                  retries=5, smooth_check=True) -> CurveRecord:
    """Assemble the Table 2 monad, take homology, identify the saturated
    curve ideal, and certify (g, d) and smoothness."""
    g, d = target
    last = None
    for attempt in range(max(1, retries)):
        try:
            sub = seed.stream(f"attempt{attempt}") if seed is not None else None
            monad = assemble_monad(mf, target, choice=choice, seed=sub)
            certify_monad(monad)
            I = monad_homology_ideal(monad)
            dd, gg = invariants(I)
            if (gg, dd) != (g, d):
                raise ReconstructionError(f"got (g,d)=({gg},{dd}), want ({g},{d})")
            smooth = is_smooth(I, seed=sub) if smooth_check else False
            if smooth_check and not smooth:
                raise ReconstructionError("output curve is singular")
            prov = (f"curve_from_mf(g={g},d={d},attempt={attempt})",)
            return CurveRecord(I, "P4", dd, gg, smooth, seed=seed, provenance=prov)
        except ReconstructionError as e:
            last = e
            if choice is not None:
                break
    raise ReconstructionError(f"reconstruction failed after retries: {last}")


def recover_auxiliary(mf: MatrixFactorization, seed, q_matrix=None,
                      retries=5, smooth_check=True) -> CurveRecord:
    """From a shape-(15 2 / 2 15) factorization, a general constant
    quotient q: O^4 <- O^15 composing to zero with the linear block
    psi_11 yields a locally free resolution of a (13, 10) curve ideal."""
    if mf.shape().rows != TABLE2_SHAPES[(12, 14)]:
        raise ReconstructionError("recover_auxiliary needs shape 15 2 / 2 15")
    ring = mf.ring
    p = ring.p
    psi = mf.psi
    tsl = _slices(psi.tgt)
    ssl = _slices(psi.src)
    low_t = min(tsl)
    rows15 = tsl[low_t]
    rows2 = tsl[low_t + 1]
    cols2 = ssl[min(ssl)]
    # psi_11: the 15 x 2 linear block
    mons = sorted({k for i in rows15 for j in cols2
                   for k in psi.entry(i, j).d})
    midx = {k: t for t, k in enumerate(mons)}
    mat = np.zeros((len(cols2) * len(mons), len(rows15)), dtype=np.int64)
    for jj, j in enumerate(cols2):
        for ii, i in enumerate(rows15):
            e = psi.entry(i, j)
            for k, c in e.d.items():
                mat[jj * len(mons) + midx[k], ii] = c
    null = linalg.nullspace_modp(mat, p)  # vectors v with v . psi_11 = 0
    if null.shape[0] < 4:
        raise ReconstructionError(
            f"left kernel of psi_11 has dimension {null.shape[0]} < 4")
    last = None
    for attempt in range(max(1, retries)):
        rng = seed.stream(f"recover{attempt}")
        if q_matrix is None:
            while True:
                combo = np.array(
                    [[rng.field_elt(p) for _ in range(null.shape[0])] for _ in range(4)],
                    dtype=np.int64)
                if linalg.rank_modp(combo, p) == 4:
                    break
            qm = combo @ null % p
        else:
            qm = np.array(q_matrix, dtype=np.int64) % p
        try:
            return _recover_with_quotient(mf, qm, rows15, rows2, seed,
                                          smooth_check=smooth_check)
        except ReconstructionError as e:
            last = e
            if q_matrix is not None:
                break
    raise ReconstructionError(f"recovery failed after retries: {last}")


def _recover_with_quotient(mf, qm, rows15, rows2, seed, smooth_check=True):
    ring = mf.ring
    p = ring.p
    q = mf.quotient
    psi = mf.psi
    low_t = min(_deg_tot(t) for t in psi.tgt)
    # A = [q . psi_15-rows ; psi_2-rows]: target O^4(t0) + O^2(t0+1)
    entries = {}
    for r in range(4):
        for j in range(psi.ncols):
            acc = ring.zero()
            for ii, i in enumerate(rows15):
                c = int(qm[r, ii])
                if c:
                    e = psi.entry(i, j)
                    if not e.is_zero():
                        acc = acc + e.scale(c)
            if not acc.is_zero():
                entries[(r, j)] = acc
    for rr, i in enumerate(rows2):
        for j in range(psi.ncols):
            e = psi.entry(i, j)
            if not e.is_zero():
                entries[(4 + rr, j)] = e
    tgt = tuple([low_t] * 4 + [low_t + 1] * len(rows2))
    A = GradedMatrix(ring, tgt, psi.src, entries, quotient=q, check=False)
    H = prune_presentation(A, quotient=q)
    I = identify_ideal(H, q)
    dd, gg = invariants(I)
    if (gg, dd) != (10, 13):
        raise ReconstructionError(f"recovered (g,d)=({gg},{dd}), want (10,13)")
    smooth = is_smooth(I, seed=seed) if smooth_check else False
    if smooth_check and not smooth:
        raise ReconstructionError("recovered curve is singular")
    return CurveRecord(I, "P4", dd, gg, smooth, seed=seed,
                       provenance=("recover_auxiliary",))


# ---------------------------------------------------------------------------
# The curve-aligned monad (Reconstruction Theorem for a known curve)
# ---------------------------------------------------------------------------


def _homotopy(cx, f):
    """sigma_k: F_k -> F_{k+1} with d_{k+1} sigma_k = f id - sigma_{k-1} d_k."""
    ring = cx.ring
    sigmas = []
    prev = None
    for k in range(len(cx.diffs)):
        dk1 = cx.diffs[k]
        # rhs: f*id on F_k minus sigma_{k-1} d_k
        nrows = len(cx.modules[k])
        entries = {(i, i): f for i in range(nrows)}
        rhs = GradedMatrix(ring, cx.modules[k],
                           tuple(_deg_tot(t) + f.total_degree() for t in cx.modules[k]),
                           entries, check=False)
        if prev is not None:
            corr = prev.compose(cx.diffs[k - 1].twist(f.total_degree()))
            ent = dict(rhs.entries)
            for (i, j), e in corr.entries.items():
                cur = ent.get((i, j))
                ent[(i, j)] = (cur - e) if cur is not None else -e
            rhs = GradedMatrix(ring, rhs.tgt, rhs.src, ent, check=False)
        sigma = lift_columns(rhs, dk1)
        sigmas.append(sigma)
        prev = sigma
        if k == 2:
            break
    return sigmas


def monad_from_curve(I: Ideal, f: Poly, gamma_pres=None):
    """Theorem-style monad for a known curve on X = V(f): terms read off
    the resolutions of the section module, maps via the Shamash blocks.

    Returns (MonadData-like dict, homology ideal); the homology equals
    the original saturated ideal extended by f."""
    ring = I.ring
    s = f.total_degree()
    if not I.contains(f):
        raise ValueError("f is not in the curve ideal")
    quotient = QuotientRing(ring, f)
    if gamma_pres is None:
        gamma_pres = section_module(I)
    cx = free_resolution(gamma_pres, 4)
    bt = cx.betti()
    rows = set(bt.rows())
    if not rows <= {0, 2, 3} or bt.get(0, 0) != 1:
        raise ReconstructionError("Betti pattern violation")
    if any(bt.get(i, i) for i in range(1, 6)) and bt.get(1, 1):
        raise ReconstructionError("Betti pattern violation")
    F = cx.modules
    d = cx.diffs
    if len(F) < 4:
        raise ReconstructionError("Betti pattern violation")
    sig = _homotopy(cx, f)
    # Shamash step 3: G_3 = F_3 + F_1(-s) -> G_2 = F_2 + F_0(-s)
    n2, n0 = len(F[2]), len(F[0])
    n3, n1 = len(F[3]), len(F[1])
    tgt = tuple(list(F[2]) + [t + s for t in F[0]])
    src = tuple(list(F[3]) + [t + s for t in F[1]])
    entries = {}
    for (i, j), e in d[2].entries.items():          # d_3: F_2 <- F_3
        entries[(i, j)] = e
    for (i, j), e in sig[1].entries.items():        # sigma_1: F_2 <- F_1(-s)
        entries[(j, n3 + i)] = e                    # sigma_1: F_1 -> F_2
    for (i, j), e in d[0].entries.items():          # d_1: F_0 <- F_1, twisted
        entries[(n2 + i, n3 + j)] = e
    sham3 = GradedMatrix(ring, tgt, src, entries, quotient=quotient, check=False)
    # monad in the twists of G_3(s)... keep raw twists; alpha rows are the
    # F_0-part minus the rank-1 free summand S
    s_row = None
    for i, t in enumerate(F[0]):
        if _deg_tot(t) == 0:
            s_row = i
            break
    if s_row is None:
        raise ReconstructionError("Betti pattern violation")
    proj_rows = [n2 + i for i in range(n0) if i != s_row]
    A = sham3.submatrix(proj_rows, list(range(sham3.ncols)))
    Amat = GradedMatrix(ring, tuple(tgt[i] for i in proj_rows), src,
                        dict(A.entries), quotient=quotient, check=False)
    # beta: the F_3 block columns
    bcols = list(range(n3))
    bentries = {(j, jj): ring.const(1) for jj, j in enumerate(bcols)}
    B = GradedMatrix(ring, src, tuple(src[j] for j in bcols), bentries,
                     quotient=quotient, check=False)
    # relations of F = ker(sham3) over S_X
    relvecs = kernel_generators(sham3, quotient=quotient)
    rel = matrix_from_vectors(ring, src, relvecs, quotient=quotient) if relvecs else \
        GradedMatrix(ring, src, (), {}, quotient=quotient, check=False)
    entries = {}
    for (i, j), e in B.entries.items():
        entries[(i, j)] = e
    for (i, j), e in rel.entries.items():
        entries[(i, B.ncols + j)] = e
    bfull = GradedMatrix(ring, src, tuple(B.src) + tuple(rel.src), entries,
                         quotient=quotient, check=False)
    H = prune_presentation(subquotient_presentation(Amat, bfull, quotient=quotient),
                           quotient=quotient)
    ideal = identify_ideal(H, quotient)
    return {"terms": (tuple(tgt[i] for i in proj_rows), src, tuple(B.src)),
            "sham3": sham3, "A": Amat, "B": B}, ideal
