"""Prime fields, graded polynomial rings and quotient rings.

Monomials are packed into a single Python int so that integer comparison
equals the monomial order.  Layout, most significant first, one 16-bit
field each:

    [deg(block_0)] [CAP - e_i : i in block_0, reversed] [deg(block_1)] ...

With a single block this is graded reverse lexicographic; with several
blocks it is the corresponding elimination (block) order, each block
ordered by grevlex.  Complement encoding makes multiplication a single
integer add (minus a constant) and divisibility a mask test.
"""

from __future__ import annotations

from functools import lru_cache

FIELD_BITS = 16
CAP = (1 << (FIELD_BITS - 1)) - 1  # max exponent: keeps the top bit free
HI_BIT = 1 << (FIELD_BITS - 1)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field F_p for a word-size prime p."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, -1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


class PolyRing:
    """Graded polynomial ring over F_p with a block monomial order.

    grading: tuple of rows, each row one degree component per variable.
    blocks: partition of variable indices; earlier blocks dominate
    (elimination order).  Default: one block = grevlex.
    """

    def __init__(self, p, names, grading=None, blocks=None, tag=None):
        self.field = p if isinstance(p, PrimeField) else PrimeField(p)
        self.p = self.field.p
        self.names = tuple(names)
        self.n = len(self.names)
        if grading is None:
            grading = ((1,) * self.n,)
        self.grading = tuple(tuple(row) for row in grading)
        for j in range(self.n):
            if all(row[j] == 0 for row in self.grading):
                raise ValueError(f"variable {self.names[j]} has zero degree vector")
        if blocks is None:
            blocks = [list(range(self.n))]
        self.blocks = [list(b) for b in blocks]
        self.tag = tag
        # field index of each variable and of each block-degree slot
        nfields = self.n + len(self.blocks)
        self._nfields = nfields
        self._varslot = [0] * self.n
        self._degslot = []
        slot = nfields
        for b in self.blocks:
            slot -= 1
            self._degslot.append(slot)
            # reversed so the *last* variable of the block is most significant
            for j in reversed(b):
                slot -= 1
                self._varslot[j] = slot
        assert slot == 0
        self._offset = 0
        for b in self.blocks:
            for j in b:
                self._offset += CAP << (FIELD_BITS * self._varslot[j])
        self._himask = 0
        for j in range(self.n):
            self._himask |= HI_BIT << (FIELD_BITS * self._varslot[j])
        self.one_key = self.encode((0,) * self.n)
        self.var_keys = tuple(
            self.encode(tuple(1 if i == j else 0 for i in range(self.n)))
            for j in range(self.n)
        )
        self._total_shift = FIELD_BITS * self._degslot[-1] if len(self.blocks) == 1 else None

    # -- monomial keys -------------------------------------------------

    def encode(self, exps) -> int:
        if len(exps) != self.n:
            raise ValueError("exponent length mismatch")
        key = 0
        for bi, b in enumerate(self.blocks):
            d = 0
            for j in b:
                e = exps[j]
                if e < 0 or e > CAP:
                    raise OverflowError(f"exponent {e} out of range")
                d += e
                key += (CAP - e) << (FIELD_BITS * self._varslot[j])
            key += d << (FIELD_BITS * self._degslot[bi])
        return key

    def decode(self, key: int):
        return tuple(
            CAP - ((key >> (FIELD_BITS * self._varslot[j])) & (HI_BIT - 1))
            for j in range(self.n)
        )

    def mul(self, k1: int, k2: int) -> int:
        return k1 + k2 - self._offset

    def div(self, k1: int, k2: int):
        """Key of k1/k2, or None if k2 does not divide k1."""
        t = k1 - k2 + self._offset
        if t >= 0 and not (t & self._himask):
            return t
        return None

    def divides(self, k2: int, k1: int) -> bool:
        t = k1 - k2 + self._offset
        return t >= 0 and not (t & self._himask)

    def lcm_key(self, k1: int, k2: int) -> int:
        e1, e2 = self.decode(k1), self.decode(k2)
        return self.encode(tuple(max(a, b) for a, b in zip(e1, e2)))

    def gcd_key(self, k1: int, k2: int) -> int:
        e1, e2 = self.decode(k1), self.decode(k2)
        return self.encode(tuple(min(a, b) for a, b in zip(e1, e2)))

    def total_deg(self, key: int) -> int:
        if self._total_shift is not None:
            return key >> self._total_shift
        return sum(
            (key >> (FIELD_BITS * s)) & (HI_BIT - 1) for s in self._degslot
        )

    def multideg(self, key: int):
        e = self.decode(key)
        return tuple(sum(g * x for g, x in zip(row, e)) for row in self.grading)

    # -- polynomials as raw dicts --------------------------------------

    def poly(self, d=None) -> "Poly":
        return Poly(self, dict(d) if d else {})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def const(self, c) -> "Poly":
        c %= self.p
        return Poly(self, {self.one_key: c} if c else {})

    def var(self, j) -> "Poly":
        if isinstance(j, str):
            j = self.names.index(j)
        return Poly(self, {self.var_keys[j]: 1})

    def monomial(self, exps, c=1) -> "Poly":
        c %= self.p
        return Poly(self, {self.encode(exps): c} if c else {})

    def from_terms(self, terms) -> "Poly":
        d = {}
        p = self.p
        for exps, c in terms:
            k = self.encode(exps)
            c = (d.get(k, 0) + c) % p
            if c:
                d[k] = c
            else:
                d.pop(k, None)
        return Poly(self, d)

    def monomials_of_multidegree(self, degvec):
        """All exponent keys of the given (multi)degree, None if unbounded."""
        degvec = tuple(degvec)
        if len(degvec) != len(self.grading):
            raise ValueError("degree vector has wrong rank")
        out = []
        exps = [0] * self.n

        def rec(j, rem):
            if j == self.n:
                if all(r == 0 for r in rem):
                    out.append(self.encode(tuple(exps)))
                return
            col = [row[j] for row in self.grading]
            emax = None
            for c, r in zip(col, rem):
                if c > 0:
                    m = r // c
                    emax = m if emax is None else min(emax, m)
                elif r < 0:
                    return
            if emax is None:
                raise ValueError("grading does not bound exponents")
            for e in range(emax + 1):
                exps[j] = e
                rec(j + 1, tuple(r - e * c for r, c in zip(rem, col)))
            exps[j] = 0

        rec(0, degvec)
        out.sort(reverse=True)
        return out

    def same_ring(self, other: "PolyRing") -> bool:
        return (
            self is other
            or (
                self.p == other.p
                and self.names == other.names
                and self.grading == other.grading
                and self.blocks == other.blocks
            )
        )

    def __repr__(self):
        g = "std" if self.grading == ((1,) * self.n,) else str(self.grading)
        return f"PolyRing(F_{self.p}[{','.join(self.names)}], grading={g})"


class Poly:
    """Sparse polynomial: dict of packed monomial key -> coefficient in [1, p)."""

    __slots__ = ("ring", "d")

    def __init__(self, ring: PolyRing, d: dict):
        self.ring = ring
        self.d = d

    # -- structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.d

    def __bool__(self):
        return bool(self.d)

    def __len__(self):
        return len(self.d)

    def lead_key(self) -> int:
        if not self.d:
            raise ValueError("zero polynomial has no lead term")
        return max(self.d)

    def lead_coeff(self) -> int:
        return self.d[self.lead_key()]

    def terms_sorted(self):
        return sorted(self.d.items(), reverse=True)

    def total_degree(self) -> int:
        if not self.d:
            return -1
        return max(self.ring.total_deg(k) for k in self.d)

    def multidegree(self):
        """Common multidegree of all terms; raises if inhomogeneous."""
        if not self.d:
            return None
        it = iter(self.d)
        md = self.ring.multideg(next(it))
        for k in it:
            if self.ring.multideg(k) != md:
                raise ValueError("polynomial is not homogeneous")
        return md

    def is_homogeneous(self) -> bool:
        if not self.d:
            return True
        try:
            self.multidegree()
            return True
        except ValueError:
            return False

    # -- arithmetic -----------------------------------------------------

    def _chk(self, other):
        if not self.ring.same_ring(other.ring):
            raise ValueError("ring mismatch")

    def __add__(self, other):
        self._chk(other)
        p = self.ring.p
        d = dict(self.d)
        for k, c in other.d.items():
            c2 = (d.get(k, 0) + c) % p
            if c2:
                d[k] = c2
            else:
                d.pop(k, None)
        return Poly(self.ring, d)

    def __sub__(self, other):
        self._chk(other)
        p = self.ring.p
        d = dict(self.d)
        for k, c in other.d.items():
            c2 = (d.get(k, 0) - c) % p
            if c2:
                d[k] = c2
            else:
                d.pop(k, None)
        return Poly(self.ring, d)

    def __neg__(self):
        p = self.ring.p
        return Poly(self.ring, {k: p - c for k, c in self.d.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._chk(other)
        ring = self.ring
        p = ring.p
        off = ring._offset
        d = {}
        a, b = self.d, other.d
        if len(a) > len(b):
            a, b = b, a
        for k1, c1 in a.items():
            base = k1 - off
            for k2, c2 in b.items():
                k = base + k2
                c = (d.get(k, 0) + c1 * c2) % p
                if c:
                    d[k] = c
                else:
                    d.pop(k, None)
        return Poly(ring, d)

    __rmul__ = __mul__

    def scale(self, c: int):
        c %= self.ring.p
        if c == 0:
            return Poly(self.ring, {})
        p = self.ring.p
        return Poly(self.ring, {k: (v * c) % p for k, v in self.d.items()})

    def monic(self):
        if not self.d:
            return self
        return self.scale(self.ring.field.inv(self.lead_coeff()))

    def mul_monomial(self, key: int, c: int = 1):
        p = self.ring.p
        base = key - self.ring._offset
        c %= p
        if c == 0:
            return Poly(self.ring, {})
        return Poly(self.ring, {k + base: (v * c) % p for k, v in self.d.items()})

    def __pow__(self, e: int):
        r = self.ring.const(1)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.ring.same_ring(other.ring)
            and self.d == other.d
        )

    def __hash__(self):
        return hash((self.ring.p, self.ring.names, frozenset(self.d.items())))

    # -- evaluation and printing ----------------------------------------

    def evaluate(self, point):
        if len(point) != self.ring.n:
            raise ValueError(
                f"point has length {len(point)}, ring has {self.ring.n} variables"
            )
        p = self.ring.p
        pt = [c % p for c in point]
        total = 0
        for k, c in self.d.items():
            exps = self.ring.decode(k)
            v = c
            for x, e in zip(pt, exps):
                if e:
                    v = v * pow(x, e, p) % p
            total = (total + v) % p
        return total

    def __repr__(self):
        if not self.d:
            return "0"
        names = self.ring.names
        parts = []
        for k, c in self.terms_sorted():
            exps = self.ring.decode(k)
            factors = [str(c)]
            factors += [f"{names[j]}^{e}" for j, e in enumerate(exps) if e]
            parts.append("*".join(factors))
        return " + ".join(parts)


class QuotientRing:
    """S/(f) for a homogeneous f; arithmetic is ambient arithmetic + reduction."""

    __slots__ = ("ambient", "f", "_flk", "_fli")

    def __init__(self, ambient: PolyRing, f: Poly):
        if f.is_zero():
            raise ValueError("modulus is zero")
        if not f.is_homogeneous():
            raise ValueError("modulus must be homogeneous")
        self.ambient = ambient
        self.f = f.monic()
        self._flk = self.f.lead_key()
        self._fli = 1

    @property
    def p(self):
        return self.ambient.p

    def reduce(self, g: Poly) -> Poly:
        """Normal form of g modulo f (single-polynomial division)."""
        ring = self.ambient
        p = ring.p
        h = dict(g.d)
        out = {}
        flk = self._flk
        fd = self.f.d
        while h:
            k = max(h)
            c = h.pop(k)
            q = ring.div(k, flk)
            if q is None:
                out[k] = c
                continue
            base = q - ring._offset
            for fk, fc in fd.items():
                kk = fk + base
                if kk == k:
                    continue
                c2 = (h.get(kk, 0) - c * fc) % p
                if c2:
                    h[kk] = c2
                else:
                    h.pop(kk, None)
        return Poly(ring, out)

    def is_zero(self, g: Poly) -> bool:
        return self.reduce(g).is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, QuotientRing)
            and self.ambient.same_ring(other.ambient)
            and self.f == other.f
        )

    def __hash__(self):
        return hash((self.ambient.p, self.ambient.names, frozenset(self.f.d.items())))

    def __repr__(self):
        return f"{self.ambient!r} / (f), deg f = {self.f.total_degree()}"


@lru_cache(maxsize=None)
def ring_p4(p: int) -> PolyRing:
    """Coordinate ring of P^4: F_p[x0..x4], standard grading, grevlex."""
    return PolyRing(p, [f"x{i}" for i in range(5)], tag="P4")


@lru_cache(maxsize=None)
def ring_p1xp2(p: int) -> PolyRing:
    """Cox ring of P^1 x P^2: F_p[s,t,x,y,z] with rank-2 grading."""
    return PolyRing(
        p,
        ["s", "t", "x", "y", "z"],
        grading=((1, 1, 0, 0, 0), (0, 0, 1, 1, 1)),
        tag="P1xP2",
    )


@lru_cache(maxsize=None)
def ring_p2(p: int) -> PolyRing:
    """Coordinate ring of P^2: F_p[u,v,w]."""
    return PolyRing(p, ["u", "v", "w"], tag="P2")


def graph_ring(source: PolyRing, target_names, target_grading_rank=1):
    """Ring for a graph ideal: source variables in the dominant block,
    new target variables in the second block (elimination order)."""
    names = list(source.names) + list(target_names)
    k = len(target_names)
    grading = []
    for row in source.grading:
        grading.append(tuple(row) + (0,) * k)
    for r in range(target_grading_rank):
        grading.append((0,) * source.n + (1,) * k)
    blocks = [list(range(source.n)), list(range(source.n, source.n + k))]
    return PolyRing(source.p, names, grading=grading, blocks=blocks)


def map_poly(poly: Poly, target: PolyRing, var_map):
    """Reinterpret poly in target, var_map[j] = target index of source var j."""
    d = {}
    p = target.p
    for k, c in poly.d.items():
        exps = poly.ring.decode(k)
        te = [0] * target.n
        for j, e in enumerate(exps):
            te[var_map[j]] += e
        kk = target.encode(tuple(te))
        c2 = (d.get(kk, 0) + c) % p
        if c2:
            d[kk] = c2
        else:
            d.pop(kk, None)
    return Poly(target, d)
