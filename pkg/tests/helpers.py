"""Shared test utilities: pseudorandom GL(n,Z) elements and tiny oracles.

Everything here is deterministic (seeded) and independent of the library's
own search machinery, so it can serve as a cross-check.
"""

from __future__ import annotations

import itertools
import random

from congrusep.exactlin import IntegerMatrix


def elementary_generators(n: int) -> list[IntegerMatrix]:
    """E_ij(±1) for i != j, plus one sign flip for det -1 coverage."""
    gens = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for sign in (1, -1):
                rows = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
                rows[i][j] = sign
                gens.append(IntegerMatrix(rows))
    flip = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    flip[0][0] = -1
    gens.append(IntegerMatrix(flip))
    return gens


def random_gl_element(rng: random.Random, n: int, word_len: int = 6) -> IntegerMatrix:
    """A pseudorandom element of GL(n,Z): a bounded word in elementaries."""
    gens = elementary_generators(n)
    out = IntegerMatrix.identity(n)
    for _ in range(word_len):
        out = out * rng.choice(gens)
    return out


def gl2_box(bound: int) -> list[IntegerMatrix]:
    """All of GL(2,Z) with entries in [-bound, bound]."""
    out = []
    values = range(-bound, bound + 1)
    for a, b, c, d in itertools.product(values, repeat=4):
        if a * d - b * c in (1, -1):
            out.append(IntegerMatrix([[a, b], [c, d]]))
    return out


def mat_mul_mod(a: tuple, b: tuple, n: int, m: int) -> tuple:
    """Independent mod-m multiply on flat tuples (oracle-side arithmetic)."""
    return tuple(
        sum(a[i * n + k] * b[k * n + j] for k in range(n)) % m
        for i in range(n)
        for j in range(n)
    )


def brute_force_gl(n: int, m: int) -> list[tuple]:
    """Every element of GL(n, Z/m) as a flat tuple, by full enumeration."""
    out = []
    for flat in itertools.product(range(m), repeat=n * n):
        if n == 2:
            det = flat[0] * flat[3] - flat[1] * flat[2]
        else:
            raise NotImplementedError("oracle enumeration only needed for n = 2")
        ok = False
        for k in range(1, m):
            if (det * k) % m == 1:
                ok = True
                break
        if ok:
            out.append(flat)
    return out


def brute_force_closure(gens: list[tuple], n: int, m: int) -> set[tuple]:
    """Subgroup closure by repeated multiplication until stable (oracle)."""
    identity = tuple(1 if i == j else 0 for i in range(n) for j in range(n))
    elements = {identity} | set(gens)
    while True:
        new = set()
        for a in elements:
            for b in elements:
                c = mat_mul_mod(a, b, n, m)
                if c not in elements:
                    new.add(c)
        if not new:
            return elements
        elements |= new
