"""Curve records, numerical invariants, and the smoothness test."""

from __future__ import annotations

from fractions import Fraction

from .homalg import (
    GradedMatrix,
    hom_degree_component,
    ideal_presentation,
    section_module,
)
from .groebner import TrackedGB, top_order
from .ideals import Ideal, hp_eval
from .rings import Poly, QuotientRing


def rho(g: int, r: int, d: int) -> int:
    """Brill-Noether number g - (r+1)(g + r - d)."""
    return g - (r + 1) * (g + r - d)


class CurveRecord:
    """Saturated curve ideal with ambient tag, invariants and provenance."""

    def __init__(self, ideal: Ideal, ambient: str, degree: int, genus: int,
                 smooth: bool, seed=None, provenance=()):
        self.ideal = ideal
        self.ambient = ambient
        self.degree = degree
        self.genus = genus
        self.smooth = smooth
        self.seed = seed
        self.provenance = tuple(provenance)

    def __repr__(self):
        tag = "smooth" if self.smooth else "singular"
        return (f"CurveRecord(g={self.genus}, d={self.degree}, {tag}, "
                f"ambient={self.ambient})")


def invariants(I: Ideal):
    """(degree, genus) of a saturated curve ideal in P^4 from its Hilbert
    polynomial d*t + 1 - g."""
    num, hp, degree, genus = I.hilbert_data()
    if len(hp) - 1 != 1:
        raise ValueError(f"not a curve: Hilbert polynomial has degree {len(hp)-1}")
    return degree, genus


def partial_derivative(f: Poly, j: int) -> Poly:
    ring = f.ring
    p = ring.p
    d = {}
    for k, c in f.d.items():
        exps = list(ring.decode(k))
        if exps[j] == 0:
            continue
        cc = c * exps[j] % p
        if not cc:
            continue
        exps[j] -= 1
        kk = ring.encode(tuple(exps))
        v = (d.get(kk, 0) + cc) % p
        if v:
            d[kk] = v
        else:
            d.pop(kk, None)
    return Poly(ring, d)


def jacobian_minors(gens, codim, subsets=None, seed=None):
    """Size-codim minors of the Jacobian of gens, lazily in random order."""
    import itertools

    ring = gens[0].ring
    n = ring.n
    jac = [[partial_derivative(g, j) for j in range(n)] for g in gens]
    row_sets = list(itertools.combinations(range(len(gens)), codim))
    col_sets = list(itertools.combinations(range(n), codim))
    pairs = [(r, c) for r in row_sets for c in col_sets]
    if seed is not None:
        pairs = seed.stream("minors").shuffle(pairs)
    for rows, cols in pairs:
        m = _det([[jac[i][j] for j in cols] for i in rows], ring)
        if not m.is_zero():
            yield m


def _det(m, ring):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    out = ring.zero()
    for j in range(n):
        if m[0][j].is_zero():
            continue
        sub = [[row[k] for k in range(n) if k != j] for row in m[1:]]
        term = m[0][j] * _det(sub, ring)
        out = out + term if j % 2 == 0 else out - term
    return out


def _empty_in_some_degree(J: Ideal, dmax: int) -> bool:
    for d in range(max(1, min(g.total_degree() for g in J.gens)), dmax + 1):
        if J.hilbert_function(d) == 0:
            return True
    return False


def is_smooth(I: Ideal, codim=3, seed=None, batch=12, dmax=None) -> bool:
    """Jacobian criterion: the singular locus ideal I + (codim-minors)
    must be irrelevant.  Minors are added in random batches with an early
    exit; the unconditional full-minor saturation decides the rest."""
    gens = I.gens
    if not gens:
        return False
    ring = I.ring
    if dmax is None:
        dmax = max(g.total_degree() for g in gens) * codim + 4
    acc = list(gens)
    minors = jacobian_minors(gens, codim, seed=seed)
    exhausted = False
    while not exhausted:
        new = []
        for m in minors:
            new.append(m)
            if len(new) >= batch:
                break
        else:
            exhausted = True
        if not new and not exhausted:
            break
        acc = acc + new
        J = Ideal(ring, acc)
        if _empty_in_some_degree(J, dmax):
            return True
        if exhausted:
            break
        batch *= 2
    sing = Ideal(ring, acc).saturate()
    return sing.is_unit()


def normal_bundle_data(I: Ideal, f: Poly, degree: int, genus: int,
                       gamma_pres: GradedMatrix = None):
    """(h0, h1, chi) for the normal bundle of the curve inside V(f):
    chi from the closed Euler-characteristic formula in P^4, h0 from the
    degree-0 Hom module Hom_{S_X}(I_{C/X}, Gamma_*(O_C))."""
    if not I.contains(f):
        raise ValueError("curve does not lie on the hypersurface")
    s = f.total_degree()
    chi = degree * (5 - s)
    quotient = QuotientRing(I.ring, f)
    # presentation of I_{C/X} over S_X: generators of I_C, relations the
    # S_X-syzygies
    ring = I.ring
    gens = [g for g in I.gens]
    tgt = tuple(g.total_degree() for g in gens)
    vecs = [{(0, k): c for k, c in g.d.items()} for g in gens]
    t = TrackedGB(vecs, top_order(ring, [0]), ring, modulus=f)
    syz = t.syzygies()
    # rewrite syzygies as a presentation matrix over the generators
    entries = {}
    src = []
    for j, z in enumerate(syz):
        cols = {}
        deg = None
        for (i, key), c in z.items():
            cols.setdefault(i, {})[key] = c
            deg = ring.total_deg(key) + tgt[i]
        src.append(deg)
        for i, dd in cols.items():
            entries[(i, j)] = Poly(ring, dd)
    ipres = GradedMatrix(ring, tgt, tuple(src), entries, quotient=quotient, check=False)
    if gamma_pres is None:
        gamma_pres = section_module(I)
    homs = hom_degree_component(ipres, gamma_pres, shift=0, quotient=quotient)
    h0 = len(homs)
    return h0, h0 - chi, chi
