"""Homogeneous ideals: Groebner bases, colon ideals, saturation,
elimination, ring-map kernels, and Hilbert data."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import linalg
from .groebner import (
    TrackedGB,
    buchberger,
    gb_polys,
    reduce_vector,
    syzygies_from_gb,
    top_order,
)
from .rings import Poly, PolyRing, map_poly


def _vec(f: Poly):
    return {(0, k): c for k, c in f.d.items()}


def _poly_of_vec(v, ring):
    return Poly(ring, {k: c for (pos, k), c in v.items()})


class Ideal:
    """Homogeneous ideal with a cached reduced Groebner basis."""

    def __init__(self, ring: PolyRing, gens, saturated=None):
        self.ring = ring
        gens = [g for g in gens if not g.is_zero()]
        for g in gens:
            if not g.ring.same_ring(ring):
                raise ValueError("ring mismatch in ideal generators")
            if not g.is_homogeneous():
                raise ValueError("ideal generators must be homogeneous")
        self.gens = gens
        self._gb = None
        self._saturated = saturated
        self._hilbert = None

    # -- basics ---------------------------------------------------------

    def gb(self):
        """Reduced Groebner basis (monic, auto-reduced, sorted)."""
        if self._gb is None:
            if not self.gens:
                self._gb = []
            else:
                order = top_order(self.ring, [0])
                basis = buchberger([_vec(g) for g in self.gens], order, self.ring)
                self._gb = gb_polys(basis, self.ring)
        return self._gb

    def _gb_elems(self):
        order = top_order(self.ring, [0])
        return buchberger([_vec(g) for g in self.gens], order, self.ring), order

    def normal_form(self, f: Poly) -> Poly:
        if not f.ring.same_ring(self.ring):
            raise ValueError("ring mismatch")
        basis, order = self._gb_cache()
        rem = reduce_vector(_vec(f), basis, order, self.ring)
        return _poly_of_vec(rem, self.ring)

    def _gb_cache(self):
        if not hasattr(self, "_gbe") or self._gbe is None:
            self._gbe = self._gb_elems()
        return self._gbe

    def contains(self, f: Poly) -> bool:
        return self.normal_form(f).is_zero()

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.gens)

    def __eq__(self, other):
        if not isinstance(other, Ideal) or not self.ring.same_ring(other.ring):
            return False
        a = sorted(frozenset(g.monic().d.items()) for g in self.gb())
        b = sorted(frozenset(g.monic().d.items()) for g in other.gb())
        return a == b

    def __hash__(self):
        return hash(tuple(sorted(frozenset(g.monic().d.items()) for g in self.gb())))

    def is_zero(self) -> bool:
        return not self.gb()

    def is_unit(self) -> bool:
        g = self.gb()
        return len(g) == 1 and g[0].total_degree() == 0

    def min_gens_degrees(self):
        return sorted(g.total_degree() for g in self.gens)

    # -- constructions ----------------------------------------------------

    def __add__(self, other: "Ideal") -> "Ideal":
        if not self.ring.same_ring(other.ring):
            raise ValueError("ring mismatch")
        return Ideal(self.ring, self.gens + other.gens)

    def product(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [a * b for a in self.gens for b in other.gens])

    def intersect(self, other: "Ideal") -> "Ideal":
        """I cap J via syzygies of [(1,1), (g_i,0), (0,h_j)]."""
        if not self.ring.same_ring(other.ring):
            raise ValueError("ring mismatch")
        ring = self.ring
        vecs = []
        # the diagonal element is inhomogeneous unless we track twists:
        # positions 0,1 both twist 0, diagonal entry degree 0: fine.
        diag = {(0, ring.one_key): 1, (1, ring.one_key): 1}
        vecs.append(diag)
        for g in self.gb() or self.gens:
            vecs.append({(0, k): c for k, c in g.d.items()})
        for h in other.gb() or other.gens:
            vecs.append({(1, k): c for k, c in h.d.items()})
        order = top_order(ring, [0, 0])
        t = TrackedGB(vecs, order, ring)
        out = []
        for z in t.syzygies():
            a = {k: c for (j, k), c in z.items() if j == 0}
            if a:
                out.append(Poly(ring, a))
        return Ideal(ring, out)

    def quotient_elem(self, g: Poly) -> "Ideal":
        """(I : g) via syzygies of [gens(I), g]: last coordinates."""
        if g.is_zero():
            raise ValueError("colon by zero")
        ring = self.ring
        base = self.gb() or self.gens
        vecs = [_vec(h) for h in base] + [_vec(g)]
        order = top_order(ring, [0])
        t = TrackedGB(vecs, order, ring)
        n = len(base)
        out = []
        for z in t.syzygies():
            v = {k: c for (j, k), c in z.items() if j == n}
            if v:
                out.append(Poly(ring, v))
        if not out:
            return Ideal(ring, list(self.gens))
        return Ideal(ring, out)

    def quotient(self, other: "Ideal") -> "Ideal":
        """(I : J), intersected over generators of J."""
        if not self.ring.same_ring(other.ring):
            raise ValueError("ring mismatch")
        gens = [g for g in other.gens if not g.is_zero()]
        if not gens:
            raise ValueError("colon by the zero ideal")
        out = None
        for g in gens:
            q = self.quotient_elem(g)
            out = q if out is None else out.intersect(q)
        return out

    def grading_blocks(self):
        """Variable groups by grading column (factors of the ambient)."""
        groups = {}
        for j in range(self.ring.n):
            col = tuple(row[j] for row in self.ring.grading)
            groups.setdefault(col, []).append(j)
        return list(groups.values())

    def saturate(self, other: "Ideal" = None, seed=None) -> "Ideal":
        """Stable value of I : J^infinity.

        With no J: projective saturation, i.e. saturation with respect to
        the variable ideal of every factor of the ambient in turn.
        """
        if other is None:
            cur = self
            for block in self.grading_blocks():
                J = Ideal(self.ring, [self.ring.var(j) for j in block])
                cur = cur._saturate_by(J, seed)
            cur._saturated = True
            return cur
        return self._saturate_by(other, seed)

    def _saturate_by(self, J: "Ideal", seed=None) -> "Ideal":
        gens = [g for g in J.gens if not g.is_zero()]
        if not gens:
            raise ValueError("saturation by the zero ideal")
        # fast path: iterated colon by one random combination of the
        # generators, then a verification colon by the full ideal
        degs = {g.multidegree() for g in gens}
        if len(degs) == 1 and len(gens) > 1:
            from .rand import Seed

            rng = (seed or Seed(0x5A7)).stream("saturate")
            ell = self.ring.zero()
            for g in gens:
                ell = ell + g.scale(rng.nonzero_field_elt(self.ring.p))
            cur = self
            while True:
                nxt = cur.quotient_elem(ell)
                if nxt == cur:
                    break
                cur = nxt
            if cur.quotient(J) == cur:
                cur._saturated = None
                return cur
        # unconditional: iterate the full colon
        cur = self
        while True:
            nxt = cur.quotient(J)
            if nxt == cur:
                return nxt
            cur = nxt

    def is_saturated(self) -> bool:
        if self._saturated is None:
            self._saturated = self.saturate() == self
        return self._saturated

    def eliminate(self, var_indices) -> "Ideal":
        """Generators of I cap K[remaining vars], inside the same ring."""
        ring = self.ring
        elim = sorted(var_indices)
        keep = [j for j in range(ring.n) if j not in elim]
        block_ring = PolyRing(
            ring.p,
            ring.names,
            grading=ring.grading,
            blocks=[elim, keep],
        )
        ident = list(range(ring.n))
        vecs = []
        for g in self.gens:
            gg = map_poly(g, block_ring, ident)
            vecs.append({(0, k): c for k, c in gg.d.items()})
        order = top_order_block(block_ring)
        basis = buchberger(vecs, order, block_ring)
        out = []
        for g in basis:
            poly = Poly(block_ring, {k: c for (pos, k), c in g.terms.items()})
            exps = [block_ring.decode(k) for k in poly.d]
            if all(all(e[j] == 0 for j in elim) for e in exps):
                out.append(map_poly(poly, ring, ident))
        return Ideal(ring, out)

    # -- Hilbert data ----------------------------------------------------

    def lead_term_exponents(self):
        return [self.ring.decode(g.lead_key()) for g in self.gb()]

    def hilbert_numerator(self):
        """Numerator of the Hilbert series of S/I over (1-t)^n (Z-graded)."""
        if len(self.ring.grading) != 1:
            raise ValueError("numerator only supported for rank-1 grading")
        if self._hilbert is None:
            lead = tuple(sorted(self.lead_term_exponents()))
            self._hilbert = _monomial_numerator(lead)
        return dict(self._hilbert)

    def hilbert_data(self):
        """(numerator dict, Hilbert polynomial, degree, arithmetic genus).

        The Hilbert polynomial refers to S/I; for a saturated curve ideal
        in P^4 it is d*t + 1 - g.
        """
        num = self.hilbert_numerator()
        n = self.ring.n
        hp = _numerator_to_hp(num, n)
        dim_proj = len(hp) - 1  # degree of the Hilbert polynomial
        if not any(hp):
            return num, hp, 0, 0
        lead = hp[-1]
        degree = int(lead * _factorial(dim_proj))
        genus = None
        if dim_proj == 1:
            genus = int(1 - hp[0])
        return num, hp, degree, genus

    def hilbert_function(self, d: int) -> int:
        """dim_K (S/I)_d via the staircase of the lead term ideal."""
        ring = self.ring
        lead = [g.lead_key() for g in self.gb()]
        keys = ring.monomials_of_multidegree((d,) * len(ring.grading)) \
            if len(ring.grading) == 1 else None
        if keys is None:
            raise ValueError("use graded_piece_dim for multigradings")
        cnt = 0
        for k in keys:
            if not any(ring.divides(l, k) for l in lead):
                cnt += 1
        return cnt

    def graded_piece_dim(self, degvec) -> int:
        """dim_K (S/I)_degvec for arbitrary gradings."""
        ring = self.ring
        lead = [g.lead_key() for g in self.gb()]
        if isinstance(degvec, int):
            degvec = (degvec,)
        cnt = 0
        for k in ring.monomials_of_multidegree(degvec):
            if not any(ring.divides(l, k) for l in lead):
                cnt += 1
        return cnt

    def ideal_piece_basis(self, degvec):
        """Basis (as Poly list) of the degree piece I_degvec."""
        ring = self.ring
        if isinstance(degvec, int):
            degvec = (degvec,)
        keys = ring.monomials_of_multidegree(degvec)
        idx = {k: i for i, k in enumerate(keys)}
        rows = []
        for g in self.gb():
            gdeg = g.multidegree()
            shift = tuple(a - b for a, b in zip(degvec, gdeg))
            if any(s < 0 for s in shift):
                continue
            for mk in ring.monomials_of_multidegree(shift):
                prod = g.mul_monomial(mk)
                row = [0] * len(keys)
                for k, c in prod.d.items():
                    row[idx[k]] = c
                rows.append(row)
        if not rows:
            return [], keys
        basis = linalg.row_space_basis(linalg.as_matrix(rows, len(keys)), ring.p)
        polys = []
        for r in basis:
            d = {keys[i]: int(r[i]) for i in range(len(keys)) if r[i]}
            polys.append(Poly(ring, d))
        return polys, keys

    def __repr__(self):
        degs = [g.total_degree() for g in self.gens]
        return f"Ideal({len(self.gens)} gens, degrees {degs})"


def top_order_block(block_ring):
    """Degree-compatible order is unavailable for block rings; plain
    term-over-position on the block encoding (already a well-order)."""
    from .groebner import ModuleOrder, _POS_BITS, _POS_MAX

    return ModuleOrder(block_ring, [0], [_POS_MAX], _POS_BITS, [0])


# -- monomial Hilbert numerator recursion ------------------------------


@lru_cache(maxsize=None)
def _monomial_numerator(gens: tuple):
    """Numerator dict of S/(monomial ideal); gens: sorted exponent tuples."""
    gens = _minimalize_monomials(gens)
    if not gens:
        return _frozen({0: 1})
    if any(sum(g) == 0 for g in gens):
        return _frozen({})
    # coprime splitting: product over connected components of supports
    comps = _support_components(gens)
    if len(comps) > 1:
        acc = {0: 1}
        for comp in comps:
            acc = _series_mul(acc, dict(_monomial_numerator(tuple(sorted(comp)))))
        return _frozen(acc)
    if len(gens) == 1:
        return _frozen({0: 1, sum(gens[0]): -1})
    # pivot on the most shared variable
    n = len(gens[0])
    counts = [sum(1 for g in gens if g[j] > 0) for j in range(n)]
    j = max(range(n), key=lambda t: counts[t])
    piv = tuple(1 if t == j else 0 for t in range(n))
    plus = tuple(sorted(set(g for g in gens if g[j] == 0) | {piv}))
    colon = tuple(
        sorted(set(tuple(max(g[t] - piv[t], 0) for t in range(n)) for g in gens))
    )
    a = dict(_monomial_numerator(plus))
    b = dict(_monomial_numerator(colon))
    out = dict(a)
    for k, c in b.items():
        out[k + 1] = out.get(k + 1, 0) + c
        if out[k + 1] == 0:
            del out[k + 1]
    return _frozen(out)


def _minimalize_monomials(gens):
    out = []
    for g in sorted(gens, key=sum):
        if not any(all(a <= b for a, b in zip(h, g)) for h in out):
            out.append(g)
    return tuple(out)


def _support_components(gens):
    supports = [frozenset(j for j, e in enumerate(g) if e) for g in gens]
    comps = []
    for g, s in zip(gens, supports):
        merged = [c for c in comps if c[1] & s]
        rest = [c for c in comps if not (c[1] & s)]
        newg, news = [g], set(s)
        for cg, cs in merged:
            newg += cg
            news |= cs
        comps = rest + [(newg, news)]
    return [c[0] for c in comps]


def _series_mul(a: dict, b: dict) -> dict:
    out = {}
    for i, c in a.items():
        for j, d in b.items():
            out[i + j] = out.get(i + j, 0) + c * d
            if out[i + j] == 0:
                del out[i + j]
    return out


def _frozen(d: dict):
    return tuple(sorted(d.items()))


def _binomial_poly(shift: int, m: int):
    """Coefficients (Fraction list, degree m) of d -> C(d + shift, m)."""
    coeffs = [Fraction(1)]
    for i in range(m):
        # multiply by (d + shift - i)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] += c * (shift - i)
        coeffs = nxt
    fact = _factorial(m)
    return [c / fact for c in coeffs]


@lru_cache(maxsize=None)
def _factorial(m: int) -> int:
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def _numerator_to_hp(num: dict, nvars: int):
    """Hilbert polynomial coefficients (Fractions, trailing zeros cut)."""
    m = nvars - 1
    acc = [Fraction(0)] * (m + 1)
    for k, c in num.items():
        bp = _binomial_poly(nvars - 1 - k, m)
        for i, b in enumerate(bp):
            acc[i] += c * b
    while len(acc) > 1 and acc[-1] == 0:
        acc.pop()
    return acc


def hp_eval(hp, t: int) -> Fraction:
    return sum(c * t**i for i, c in enumerate(hp))


def hilbert_series_values(num: dict, nvars: int, dmax: int):
    """Hilbert function values H(0..dmax) from the numerator."""
    from math import comb

    out = []
    for d in range(dmax + 1):
        v = sum(c * comb(d - k + nvars - 1, nvars - 1) for k, c in num.items() if d - k >= 0)
        out.append(int(v))
    return out
