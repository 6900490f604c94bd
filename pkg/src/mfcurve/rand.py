"""Deterministic counter-based randomness.

Every random draw in the library goes through a Seed.  A Seed is a 64-bit
master seed plus a path of stream names; child streams are independent and
the whole tree is reproducible bit-for-bit from (seed, path, counter).
Draws are produced by hashing (seed, path, counter) with BLAKE2b, so the
output is platform independent.
"""

from __future__ import annotations

import hashlib


class Seed:
    __slots__ = ("seed", "path", "counter")

    def __init__(self, seed: int, path=(), counter: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.path = tuple(path)
        self.counter = counter

    def stream(self, name: str) -> "Seed":
        """Child stream; disjoint from this one and from its siblings."""
        return Seed(self.seed, self.path + (str(name),), 0)

    def _raw(self) -> int:
        h = hashlib.blake2b(digest_size=16)
        h.update(self.seed.to_bytes(8, "little"))
        for part in self.path:
            b = part.encode()
            h.update(len(b).to_bytes(2, "little"))
            h.update(b)
        h.update(self.counter.to_bytes(8, "little"))
        self.counter += 1
        return int.from_bytes(h.digest(), "little")

    def randint(self, n: int) -> int:
        """Uniform in [0, n), by rejection."""
        if n <= 0:
            raise ValueError("empty range")
        span = (1 << 128) - (1 << 128) % n
        while True:
            r = self._raw()
            if r < span:
                return r % n

    def field_elt(self, p: int) -> int:
        return self.randint(p)

    def nonzero_field_elt(self, p: int) -> int:
        return 1 + self.randint(p - 1)

    def shuffle(self, items: list) -> list:
        items = list(items)
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def __repr__(self):
        return f"Seed({self.seed}, path={'/'.join(self.path)}, counter={self.counter})"


def random_form(ring, degvec, seed: Seed):
    """Random homogeneous form of the given (multi)degree, dense with
    uniform coefficients; redrawn in the measure-zero all-zero case."""
    if isinstance(degvec, int):
        degvec = (degvec,)
    keys = ring.monomials_of_multidegree(degvec)
    if not keys:
        raise ValueError(f"empty linear system: no monomials of degree {degvec}")
    p = ring.p
    while True:
        d = {}
        for k in keys:
            c = seed.field_elt(p)
            if c:
                d[k] = c
        if d:
            return ring.poly(d)


def random_point(ring, seed: Seed, projective_blocks=None):
    """Random point, one coordinate list per variable.  For product
    ambients pass projective_blocks to normalize one coordinate per block."""
    p = ring.p
    pt = [seed.field_elt(p) for _ in range(ring.n)]
    blocks = projective_blocks if projective_blocks is not None else [list(range(ring.n))]
    for b in blocks:
        while all(pt[j] == 0 for j in b):
            for j in b:
                pt[j] = seed.field_elt(p)
    return pt
