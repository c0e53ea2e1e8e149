"""Finite matrix groups over Z/m: reduction, closure, conjugacy classes.

The reduction homomorphism r_m : GL(n,Z) -> GL(n,Z/m) realizes finite-level
images of infinite matrix groups.  Images of p-adic closures are represented
here only through their finite quotients mod p^K; the tower of such images
is all the downstream separation searches ever touch.

Conjugacy classes mod m are full GL(n,Z/m)-orbits.  The integral conjugacy
class of a matrix reduces *into* (possibly properly inside) its mod-m class,
so disjointness from the mod-m class is a sound, if occasionally
conservative, witness of disjointness from the integral class.

Canonical encodings: an element of GL(n,Z/m) is encoded as the ASCII bytes
``b"n:m:e00,e01,...,e(n-1)(n-1)"`` with entries row-major in [0, m).  A set
of elements is digested as SHA-256 over the newline-joined *sorted* list of
encodings, making digests order-independent and certificates bit-checkable
by any independent implementation.
"""

from __future__ import annotations

import hashlib
from math import gcd
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatchError,
    InputError,
    PreconditionError,
    ResourceError,
)
from .exactlin import IntegerMatrix, RationalMatrix

#: Default element budget for closures and orbits.  Exceeding a budget is an
#: explicit ResourceError, never silent truncation.
DEFAULT_CAP = 10**7


class DenominatorNotUnitError(PreconditionError):
    """A rational entry's denominator is not invertible mod m.

    This failure is itself meaningful: the offending prime divides the
    denominator, so the matrix cannot lie in the corresponding congruence
    image at any level of that prime.
    """

    def __init__(self, denominator: int, modulus: int):
        super().__init__(
            f"denominator {denominator} is not a unit modulo {modulus}"
        )
        self.denominator = denominator
        self.modulus = modulus


class ModMatrix:
    """An element of GL(n, Z/m): residue entries with unit determinant."""

    __slots__ = ("n", "m", "entries", "_hash")

    def __init__(self, n: int, m: int, entries: Sequence[int]):
        if m < 2:
            raise InputError(f"modulus must be >= 2, got {m}")
        flat = tuple(int(x) % m for x in entries)
        if len(flat) != n * n:
            raise InputError(f"expected {n * n} entries, got {len(flat)}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "entries", flat)
        object.__setattr__(self, "_hash", None)
        d = self.det()
        if gcd(d, m) != 1:
            raise PreconditionError(
                f"matrix is not invertible mod {m}: det = {d}"
            )

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ModMatrix is immutable")

    @classmethod
    def _raw(cls, n: int, m: int, entries: tuple[int, ...]) -> "ModMatrix":
        # fast path for internal products: entries already reduced, and
        # invertibility is inherited (products of units are units)
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "entries", entries)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def identity(cls, n: int, m: int) -> "ModMatrix":
        return cls(n, m, [1 if i == j else 0 for i in range(n) for j in range(n)])

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        return self.entries[i * self.n + j]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModMatrix)
            and self.n == other.n
            and self.m == other.m
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.n, self.m, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"ModMatrix(n={self.n}, m={self.m}, entries={list(self.entries)})"

    def __mul__(self, other: "ModMatrix") -> "ModMatrix":
        if not isinstance(other, ModMatrix):
            return NotImplemented
        if self.n != other.n or self.m != other.m:
            raise DimensionMismatchError("mod-matrix dimension or modulus mismatch")
        n, m = self.n, self.m
        a, b = self.entries, other.entries
        out = [0] * (n * n)
        for i in range(n):
            base = i * n
            for k in range(n):
                aik = a[base + k]
                if aik:
                    kb = k * n
                    for j in range(n):
                        out[base + j] += aik * b[kb + j]
        return ModMatrix._raw(n, m, tuple(x % m for x in out))

    def det(self) -> int:
        """Determinant mod m (via exact integer Bareiss, then reduced)."""
        d = IntegerMatrix(self.to_lists()).det()
        return d % self.m

    def inverse(self) -> "ModMatrix":
        """Inverse mod m via the integral adjugate and the det's unit inverse."""
        n, m = self.n, self.m
        mat = IntegerMatrix(self.to_lists())
        d = mat.det()
        d_inv = pow(d % m, -1, m)
        adj = _adjugate(mat)
        return ModMatrix(n, m, [d_inv * x for row in adj.entries for x in row])

    def __pow__(self, exponent: int) -> "ModMatrix":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ModMatrix.identity(self.n, self.m)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def to_lists(self) -> list[list[int]]:
        n = self.n
        return [list(self.entries[i * n : (i + 1) * n]) for i in range(n)]

    def canonical_bytes(self) -> bytes:
        body = ",".join(str(x) for x in self.entries)
        return f"{self.n}:{self.m}:{body}".encode("ascii")

    def project(self, m_new: int) -> "ModMatrix":
        """Natural projection Z/m -> Z/m_new for m_new dividing m."""
        if self.m % m_new != 0:
            raise InputError(f"{m_new} does not divide modulus {self.m}")
        return ModMatrix(self.n, m_new, self.entries)


def _adjugate(a: IntegerMatrix) -> IntegerMatrix:
    n = a.n
    if n == 1:
        return IntegerMatrix([[1]])
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [a.entries[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            sign = -1 if (i + j) % 2 else 1
            cof[j][i] = sign * IntegerMatrix(minor).det()
    return IntegerMatrix(cof)


def elements_digest(elements: Iterable[ModMatrix]) -> str:
    """Order-independent SHA-256 digest of a set of elements."""
    encodings = sorted(e.canonical_bytes() for e in elements)
    return hashlib.sha256(b"\n".join(encodings)).hexdigest()


# ---------------------------------------------------------------------------
# reduction homomorphism
# ---------------------------------------------------------------------------


def reduce(g: IntegerMatrix | RationalMatrix, m: int) -> ModMatrix:
    """The reduction homomorphism: entrywise residues mod m.

    Rational entries p/q are mapped to p * q^(-1) mod m; a denominator that
    is not a unit mod m raises DenominatorNotUnitError.
    """
    n = g.n
    if isinstance(g, IntegerMatrix):
        return ModMatrix(n, m, [x % m for row in g.entries for x in row])
    flat = []
    for row in g.entries:
        for x in row:
            q = x.denominator
            if q == 1:
                flat.append(x.numerator % m)
                continue
            try:
                q_inv = pow(q % m, -1, m)
            except ValueError:
                raise DenominatorNotUnitError(q, m) from None
            flat.append((x.numerator % m) * q_inv % m)
    return ModMatrix(n, m, flat)


# ---------------------------------------------------------------------------
# generated subgroups
# ---------------------------------------------------------------------------


class ModMatrixGroup:
    """The subgroup of GL(n, Z/m) generated by a finite set of elements.

    Carries the complete element set; membership is a hash lookup.
    """

    __slots__ = ("n", "m", "generators", "elements", "_digest")

    def __init__(self, n: int, m: int, generators: tuple[ModMatrix, ...], elements: frozenset[ModMatrix]):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_digest", None)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ModMatrixGroup is immutable")

    @property
    def size(self) -> int:
        return len(self.elements)

    def __contains__(self, x: ModMatrix) -> bool:
        return x in self.elements

    def __iter__(self):
        return iter(self.elements)

    def digest(self) -> str:
        d = self._digest
        if d is None:
            d = elements_digest(self.elements)
            object.__setattr__(self, "_digest", d)
        return d

    def to_json_dict(self, full: bool = False) -> dict:
        data = {
            "n": self.n,
            "m": self.m,
            "generators": [g.to_lists() for g in self.generators],
            "size": self.size,
            "elements_digest": self.digest(),
        }
        if full:
            data["elements"] = sorted(e.to_lists() for e in self.elements)
        return data


def generate(
    gens: Sequence[ModMatrix],
    cap: int = DEFAULT_CAP,
    *,
    n: int | None = None,
    m: int | None = None,
) -> ModMatrixGroup:
    """Breadth-first closure of gens under products with gens and inverses.

    ``n`` and ``m`` are required only when gens is empty (trivial group).
    Exceeding ``cap`` elements raises ResourceError carrying the partial size.
    """
    gens = tuple(gens)
    if not gens:
        if n is None or m is None:
            raise InputError("generating the trivial group needs explicit n and m")
        identity = ModMatrix.identity(n, m)
        return ModMatrixGroup(n, m, (), frozenset([identity]))
    n0, m0 = gens[0].n, gens[0].m
    if any(g.n != n0 or g.m != m0 for g in gens):
        raise DimensionMismatchError("generators must share dimension and modulus")
    multipliers = []
    for g in gens:
        for cand in (g, g.inverse()):
            if cand not in multipliers:
                multipliers.append(cand)
    identity = ModMatrix.identity(n0, m0)
    elements = {identity}
    frontier = [identity]
    while frontier:
        new_frontier = []
        for x in frontier:
            for t in multipliers:
                y = x * t
                if y not in elements:
                    elements.add(y)
                    if len(elements) > cap:
                        raise ResourceError(
                            f"element budget {cap} exceeded while generating subgroup",
                            partial_size=len(elements),
                        )
                    new_frontier.append(y)
        frontier = new_frontier
    return ModMatrixGroup(n0, m0, gens, frozenset(elements))


# ---------------------------------------------------------------------------
# GL(n, Z/m) generators and conjugacy classes
# ---------------------------------------------------------------------------


def _prime_power_factorization(m: int) -> list[tuple[int, int]]:
    out = []
    x = m
    p = 2
    while p * p <= x:
        if x % p == 0:
            e = 0
            while x % p == 0:
                x //= p
                e += 1
            out.append((p, e))
        p += 1
    if x > 1:
        out.append((x, 1))
    return out


def _multiplicative_order(a: int, modulus: int, group_order: int) -> int:
    order = group_order
    for p, _ in _prime_power_factorization(group_order):
        while order % p == 0 and pow(a, order // p, modulus) == 1:
            order //= p
    return order


def _local_unit_generators(p: int, e: int) -> list[int]:
    """Generators of (Z/p^e)^*, one per cyclic factor."""
    q = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [3]
        return [q - 1, 5]  # {-1} x <5>
    phi = q - q // p
    for g in range(2, q):
        if gcd(g, q) == 1 and _multiplicative_order(g, q, phi) == phi:
            return [g]
    raise AssertionError("primitive root must exist for odd prime powers")


def unit_group_generators(m: int) -> list[int]:
    """Generators of (Z/m)^*, one per cyclic factor, lifted by CRT."""
    out = []
    for p, e in _prime_power_factorization(m):
        q = p**e
        rest = m // q
        for g in _local_unit_generators(p, e):
            if rest == 1:
                out.append(g % m)
            else:
                # u = g mod q, u = 1 mod rest
                inv = pow(q % rest, -1, rest)
                u = (g + q * ((1 - g) * inv % rest)) % m
                out.append(u)
    return out


def gl_generators(n: int, m: int) -> list[ModMatrix]:
    """A generating set of GL(n, Z/m): elementary transvections E_ij(1) plus
    diag(u,1,...,1) for one unit u per cyclic factor of (Z/m)^*.
    """
    if n < 1:
        raise InputError("dimension must be positive")
    gens: list[ModMatrix] = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            entries = [1 if a == b else 0 for a in range(n) for b in range(n)]
            entries[i * n + j] = 1
            gens.append(ModMatrix(n, m, entries))
    for u in unit_group_generators(m):
        entries = [1 if a == b else 0 for a in range(n) for b in range(n)]
        entries[0] = u
        gens.append(ModMatrix(n, m, entries))
    return gens


def gl_order(n: int, m: int) -> int:
    """|GL(n, Z/m)| by the standard prime-power formula."""
    total = 1
    for p, e in _prime_power_factorization(m):
        local = 1
        for i in range(n):
            local *= p**n - p**i
        total *= local * p ** (n * n * (e - 1))
    return total


class ConjClass:
    """The full GL(n, Z/m)-conjugacy orbit of a representative."""

    __slots__ = ("n", "m", "representative", "orbit", "_digest")

    def __init__(self, representative: ModMatrix, orbit: frozenset[ModMatrix]):
        object.__setattr__(self, "n", representative.n)
        object.__setattr__(self, "m", representative.m)
        object.__setattr__(self, "representative", representative)
        object.__setattr__(self, "orbit", orbit)
        object.__setattr__(self, "_digest", None)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ConjClass is immutable")

    @property
    def size(self) -> int:
        return len(self.orbit)

    def __contains__(self, x: ModMatrix) -> bool:
        return x in self.orbit

    def __iter__(self):
        return iter(self.orbit)

    def digest(self) -> str:
        d = self._digest
        if d is None:
            d = elements_digest(self.orbit)
            object.__setattr__(self, "_digest", d)
        return d

    def to_json_dict(self, full: bool = False) -> dict:
        data = {
            "n": self.n,
            "m": self.m,
            "representative": self.representative.to_lists(),
            "size": self.size,
            "elements_digest": self.digest(),
        }
        if full:
            data["elements"] = sorted(e.to_lists() for e in self.orbit)
        return data


def _conjugator_pairs(n: int, m: int) -> list[tuple[ModMatrix, ModMatrix]]:
    conjugators = []
    for t in gl_generators(n, m):
        for cand in (t, t.inverse()):
            if cand not in conjugators:
                conjugators.append(cand)
    return [(t.inverse(), t) for t in conjugators]


def _orbit_expand(
    rep: ModMatrix, cap: int, stop_inside: frozenset[ModMatrix] | None = None
) -> tuple[frozenset[ModMatrix], bool]:
    """BFS conjugation orbit of rep.  With ``stop_inside`` given, aborts as
    soon as an orbit element lies in that set, returning (partial, True)."""
    pairs = _conjugator_pairs(rep.n, rep.m)
    orbit = {rep}
    if stop_inside is not None and rep in stop_inside:
        return frozenset(orbit), True
    frontier = [rep]
    while frontier:
        new_frontier = []
        for x in frontier:
            for t_inv, t in pairs:
                y = t_inv * x * t
                if y not in orbit:
                    orbit.add(y)
                    if stop_inside is not None and y in stop_inside:
                        return frozenset(orbit), True
                    if len(orbit) > cap:
                        raise ResourceError(
                            f"element budget {cap} exceeded while expanding orbit",
                            partial_size=len(orbit),
                        )
                    new_frontier.append(y)
        frontier = new_frontier
    return frozenset(orbit), False


def conj_class(rep: ModMatrix, cap: int = DEFAULT_CAP) -> ConjClass:
    """Orbit of ``rep`` under conjugation by all of GL(n, Z/m).

    Computed as the closure under conjugation by a fixed generating set of
    GL(n, Z/m); exceeding ``cap`` raises ResourceError.
    """
    orbit, _ = _orbit_expand(rep, cap)
    return ConjClass(rep, orbit)


def char_coeffs_mod(x: ModMatrix) -> tuple[int, ...]:
    """Characteristic polynomial coefficients mod m (via principal minors).

    Returns (e_1, ..., e_n) mod m where e_k is the sum of the principal k×k
    minors, a cheap conjugation invariant used to screen intersections.
    """
    import itertools

    n, m = x.n, x.m
    rows = x.to_lists()
    out = []
    for k in range(1, n + 1):
        total = 0
        for subset in itertools.combinations(range(n), k):
            minor = [[rows[i][j] for j in subset] for i in subset]
            total += _det_int(minor)
        out.append(total % m)
    return tuple(out)


# ---------------------------------------------------------------------------
# finite-level images of p-adic closures
# ---------------------------------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def padic_level_image(
    gens: Sequence[IntegerMatrix],
    p: int,
    level: int,
    cap: int = DEFAULT_CAP,
    *,
    n: int | None = None,
) -> ModMatrixGroup:
    """The image of the generated group in GL(n, Z/p^level).

    These finite quotients are the computable stand-ins for the closure of
    the group in GL(n, Z_p): the level-(K+1) image always projects onto the
    level-K image.
    """
    if not _is_prime(p):
        raise InputError(f"{p} is not prime")
    if level < 1:
        raise InputError(f"level must be >= 1, got {level}")
    m = p**level
    if not gens:
        if n is None:
            raise InputError("empty generating set needs an explicit dimension n")
        return generate([], cap, n=n, m=m)
    return generate([reduce(g, m) for g in gens], cap)


def semisimple_elements_mod(
    group: ModMatrixGroup, torsion_reps: Sequence[IntegerMatrix]
) -> list[ModMatrix]:
    """Elements of ``group`` lying in some mod-m class of the given
    semisimple representatives: group ∩ ⋃_j class(reduce(rep_j, m)).

    Returned in canonical sorted order.
    """
    from .jordan import is_semisimple

    found: set[ModMatrix] = set()
    for rep in torsion_reps:
        if not is_semisimple(rep.to_rational()):
            raise PreconditionError("torsion representatives must be semisimple")
        cls = conj_class(reduce(rep, group.m))
        found.update(group.elements & cls.orbit)
    return sorted(found, key=lambda x: x.canonical_bytes())


# ---------------------------------------------------------------------------
# exact mod-m conjugacy decision
# ---------------------------------------------------------------------------


def _det_int(rows: list[list[int]]) -> int:
    """Exact determinant of a small integer matrix (Bareiss on lists)."""
    n = len(rows)
    a = [row[:] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _fp_row_basis(vectors: list[list[int]], p: int) -> list[list[int]]:
    """Row-reduce vectors over F_p, returning a basis of their span."""
    rows = [[x % p for x in v] for v in vectors]
    basis: list[list[int]] = []
    width = len(rows[0]) if rows else 0
    pivot_cols: list[int] = []
    for row in rows:
        cur = row[:]
        for b, c in zip(basis, pivot_cols):
            if cur[c]:
                f = cur[c]
                cur = [(x - f * y) % p for x, y in zip(cur, b)]
        lead = next((c for c in range(width) if cur[c]), None)
        if lead is None:
            continue
        inv = pow(cur[lead], -1, p)
        cur = [x * inv % p for x in cur]
        basis.append(cur)
        pivot_cols.append(lead)
    return basis


def _conjugate_mod_prime_power(
    a: IntegerMatrix, b: IntegerMatrix, p: int, e: int, budget: int
) -> bool:
    """Exact conjugacy decision in GL(n, Z/p^e).

    The X with X a = b X mod p^e form a module S computable from the Smith
    normal form of the integral operator X -> X a - b X.  X in S is a unit
    mod p^e iff its reduction mod p is a unit, and S's reduction mod p is an
    F_p-subspace: the decision reduces to scanning that subspace (projective
    representatives, early exit) for a nonsingular matrix.
    """
    from .exactlin import smith_normal_form

    n = a.n
    q = p**e
    nn = n * n
    cols = []
    for i in range(n):
        for j in range(n):
            basis = [[0] * n for _ in range(n)]
            basis[i][j] = 1
            mat = IntegerMatrix(basis)
            t = mat * a - b * mat
            cols.append([t.entries[r][c] for r in range(n) for c in range(n)])
    op = IntegerMatrix([[cols[j][i] for j in range(nn)] for i in range(nn)])
    snf = smith_normal_form(op)
    v = snf.V.entries
    module_gens = []
    for i in range(nn):
        d = snf.D.entries[i][i]
        g = gcd(d, q) if d != 0 else q
        if g == 1:
            continue  # only the zero coset, contributes nothing mod p
        step = q // g
        module_gens.append([v[r][i] * step % q for r in range(nn)])
    if not module_gens:
        return False
    span = _fp_row_basis(module_gens, p)
    r = len(span)
    if r == 0:
        return False
    combos = (p**r - 1) // (p - 1)
    if combos > budget:
        raise ResourceError(
            f"conjugacy scan needs {combos} combinations mod {p}, budget is {budget}"
        )
    # scan projective representatives: first nonzero coefficient equals 1
    import itertools as _it

    for lead in range(r):
        for tail in _it.product(range(p), repeat=r - lead - 1):
            vec = [0] * nn
            coeffs = (1,) + tail
            for c, basis_vec in zip(coeffs, span[lead:]):
                if c:
                    for idx in range(nn):
                        vec[idx] = (vec[idx] + c * basis_vec[idx]) % p
            rows = [vec[i * n : (i + 1) * n] for i in range(n)]
            if _det_int(rows) % p != 0:
                return True
    return False


def is_conjugate_mod(
    a: IntegerMatrix, b: IntegerMatrix, m: int, budget: int = 2 * 10**6
) -> bool:
    """Decide whether a and b are conjugate in GL(n, Z/m), exactly.

    Decomposes m into prime powers (conjugacy mod m holds iff it holds mod
    every prime-power factor) and decides each factor via the solution module
    of X a = b X.  Raises ResourceError when a scan would exceed ``budget``
    candidate combinations; never returns a wrong answer.
    """
    n = a.n
    if b.n != n:
        raise DimensionMismatchError("conjugacy candidates must share dimension")
    if m < 2:
        raise InputError(f"modulus must be >= 2, got {m}")
    if a == b:
        return True
    for p, e in _prime_power_factorization(m):
        if not _conjugate_mod_prime_power(a, b, p, e, budget):
            return False
    return True
