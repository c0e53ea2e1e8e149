"""Crystallographic groups: affine Jordan decomposition and the finite
enumeration of semisimple factors.

A crystallographic group here is given by affine generators (t, S), a
rational translation t with a finite-order integral holonomy part S, plus a
declared translation lattice.  The group's actual translation lattice is
recomputed from bounded words and must coincide with the declared one; every
quotient below depends on the lattice being the full translation subgroup.

For a holonomy element S the ambient space splits as the image of (S - I)
plus its kernel (the moving and fixed subspaces).  An element (t, S) factors
as the commuting product of a semisimple part (t_s, S), t_s in the moving
subspace, and a pure translation (t_u, I), t_u in the fixed subspace.  Up to
conjugation by translations, the possible t_s for a fixed S form a finite
quotient computed exactly through the Smith normal form; representatives are
enumerated together with witnessing group elements.

Everything embeds into GL(m+1, Z) by the usual affine trick after a change
to lattice coordinates and clearing one global denominator, which hands the
group (and its semisimple factors) to the congruence-separation machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DimensionMismatchError, InputError, ResourceError
from .exactlin import (
    IntegerMatrix,
    RationalMatrix,
    _solve_exact,
    integer_kernel_basis,
    kernel_and_image,
    lattice_basis,
    mat_vec,
    smith_normal_form,
    solve_integer_linear,
)
from .jordan import torsion_order

#: Closure budget for the holonomy group; far above any finite
#: crystallographic holonomy in small dimension.
HOLONOMY_BUDGET = 10**4

#: Word length used to recover the translation lattice from group elements.
DEFAULT_LATTICE_WORDLEN = 6

_SCAN_ELEMENT_BUDGET = 10**5


@dataclass(frozen=True)
class AffineElement:
    """An affine map x -> S x + t with rational t and integral S."""

    t: tuple[Fraction, ...]
    S: IntegerMatrix

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(Fraction(x) for x in self.t))
        if len(self.t) != self.S.n:
            raise DimensionMismatchError("translation length disagrees with holonomy size")

    @property
    def dim(self) -> int:
        return self.S.n

    @classmethod
    def identity(cls, m: int) -> "AffineElement":
        return cls(t=(Fraction(0),) * m, S=IntegerMatrix.identity(m))

    @classmethod
    def translation(cls, t: Sequence) -> "AffineElement":
        t = tuple(Fraction(x) for x in t)
        return cls(t=t, S=IntegerMatrix.identity(len(t)))

    def compose(self, other: "AffineElement") -> "AffineElement":
        """(t1, S1)(t2, S2) = (t1 + S1 t2, S1 S2)."""
        if self.dim != other.dim:
            raise DimensionMismatchError("affine elements of different dimension")
        moved = mat_vec(self.S.to_rational(), other.t)
        return AffineElement(
            t=tuple(a + b for a, b in zip(self.t, moved)), S=self.S * other.S
        )

    def inverse(self) -> "AffineElement":
        s_inv = self.S.unimodular_inverse()
        t_inv = mat_vec(s_inv.to_rational(), self.t)
        return AffineElement(t=tuple(-x for x in t_inv), S=s_inv)

    @property
    def is_translation(self) -> bool:
        return self.S == IntegerMatrix.identity(self.dim)

    def to_json_dict(self) -> dict:
        return {
            "t": [str(x) for x in self.t],
            "S": [list(row) for row in self.S.entries],
        }

    @classmethod
    def from_json_dict(cls, data) -> "AffineElement":
        if not isinstance(data, dict) or "t" not in data or "S" not in data:
            raise InputError("affine element JSON needs 't' and 'S'")
        t = [_parse_fraction(x) for x in data["t"]]
        s_rows = data["S"]
        if not isinstance(s_rows, list):
            raise InputError("'S' must be an integer matrix")
        try:
            s = IntegerMatrix(s_rows)
        except (TypeError, InputError) as exc:
            raise InputError(f"bad holonomy matrix: {exc}") from exc
        return cls(t=tuple(t), S=s)


def _parse_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise InputError("translation entries must be exact numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse exact entry {x!r}") from exc
    raise InputError(f"translation entries must be ints or strings, got {type(x).__name__}")


class CrystGroup:
    """A crystallographic group with validated lattice and finite holonomy.

    Construction enumerates the holonomy group, finds a shortest witness
    element for each holonomy matrix, recovers the translation lattice from
    words up to ``lattice_wordlen``, and checks it matches the declared one.
    """

    def __init__(
        self,
        m: int,
        generators: Sequence[AffineElement],
        lattice: Sequence[Sequence],
        lattice_wordlen: int = DEFAULT_LATTICE_WORDLEN,
    ):
        if m < 1:
            raise InputError("dimension must be positive")
        gens = tuple(generators)
        for g in gens:
            if g.dim != m:
                raise DimensionMismatchError("generator dimension disagrees with m")
        declared = tuple(tuple(Fraction(x) for x in row) for row in lattice)
        if len(declared) != m or any(len(row) != m for row in declared):
            raise InputError("lattice must be an m x m basis (rows are basis vectors)")
        basis_matrix = RationalMatrix([list(row) for row in zip(*declared)])
        if basis_matrix.det() == 0:
            raise InputError("declared lattice basis is singular")

        for g in gens:
            if torsion_order(g.S) is None:
                raise InputError(
                    "holonomy has infinite order: only the abelian-translation"
                    " (crystallographic) base case is supported"
                )

        self.m = m
        self.generators = gens
        self.declared_lattice = declared
        self.holonomy = self._close_holonomy()
        self._witnesses = {}
        translations = self._scan_words(lattice_wordlen)
        basis = lattice_basis(translations, m)
        if len(basis) != m:
            raise InputError(
                f"translations found in words up to length {lattice_wordlen} span"
                f" rank {len(basis)} < {m}; increase the word length or fix the input"
            )
        self.lattice = tuple(basis)
        self._lattice_matrix = RationalMatrix([list(row) for row in zip(*basis)])
        self._lattice_inverse = self._lattice_matrix.inverse()
        self._validate_lattice()

    # -- construction helpers ---------------------------------------------

    def _close_holonomy(self) -> tuple[IntegerMatrix, ...]:
        eye = IntegerMatrix.identity(self.m)
        elements = {eye}
        frontier = [eye]
        gens = [g.S for g in self.generators]
        while frontier:
            new_frontier = []
            for x in frontier:
                for s in gens:
                    y = x * s
                    if y not in elements:
                        elements.add(y)
                        if len(elements) > HOLONOMY_BUDGET:
                            raise InputError(
                                "holonomy closure exceeded budget: holonomy is"
                                " not finite, input is not crystallographic"
                            )
                        new_frontier.append(y)
            frontier = new_frontier
        return tuple(sorted(elements, key=lambda s: s.entries))

    def _scan_words(self, wordlen: int) -> list[tuple[Fraction, ...]]:
        """BFS over words; records translation vectors (depth <= wordlen) and
        a first witness element per holonomy matrix (any depth needed)."""
        identity = AffineElement.identity(self.m)
        letters = []
        for g in self.generators:
            for cand in (g, g.inverse()):
                if cand not in letters:
                    letters.append(cand)
        seen = {identity}
        self._witnesses = {identity.S: identity}
        translations = [identity.t]
        frontier = [identity]
        needed = set(self.holonomy)
        depth = 0
        while True:
            depth += 1
            new_frontier = []
            for w in frontier:
                for a in letters:
                    wa = w.compose(a)
                    if wa in seen:
                        continue
                    seen.add(wa)
                    if len(seen) > _SCAN_ELEMENT_BUDGET:
                        raise ResourceError(
                            "word scan exceeded element budget", partial_size=len(seen)
                        )
                    new_frontier.append(wa)
                    if wa.S not in self._witnesses:
                        self._witnesses[wa.S] = wa
                    if depth <= wordlen and wa.is_translation:
                        translations.append(wa.t)
            frontier = new_frontier
            have_all = needed <= set(self._witnesses)
            if depth >= wordlen and have_all:
                break
            if not frontier:
                if not have_all:
                    raise AssertionError("word scan ended before covering holonomy")
                break
            if depth > wordlen + len(self.holonomy) + 1:
                raise AssertionError("word scan failed to cover holonomy")
        return translations

    def _validate_lattice(self) -> None:
        # computed lattice must be stable under every holonomy matrix
        for s in self.holonomy:
            conj = self._lattice_inverse * s.to_rational() * self._lattice_matrix
            if not conj.is_integral:
                raise InputError("translation lattice is not holonomy-invariant")
        # declared and computed lattices must agree as Z-modules
        declared_matrix = RationalMatrix(
            [list(row) for row in zip(*self.declared_lattice)]
        )
        decl_in_computed = self._lattice_inverse * declared_matrix
        computed_in_decl = declared_matrix.inverse() * self._lattice_matrix
        if not decl_in_computed.is_integral:
            raise InputError(
                "declared lattice contains vectors that are not group translations"
            )
        if not computed_in_decl.is_integral:
            raise InputError(
                "group contains translations outside the declared lattice;"
                " declare the full translation lattice"
            )

    # -- accessors ----------------------------------------------------------

    def witness(self, s: IntegerMatrix) -> AffineElement:
        """A group element with holonomy part s."""
        try:
            return self._witnesses[s]
        except KeyError:
            raise InputError("matrix is not in the holonomy group") from None

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "lattice": [[str(x) for x in row] for row in self.declared_lattice],
            "generators": [g.to_json_dict() for g in self.generators],
        }

    @classmethod
    def from_json_dict(cls, data, lattice_wordlen: int = DEFAULT_LATTICE_WORDLEN) -> "CrystGroup":
        if not isinstance(data, dict):
            raise InputError("crystallographic group JSON must be an object")
        try:
            m = data["m"]
            lattice = data["lattice"]
            gens = data["generators"]
        except KeyError as exc:
            raise InputError(f"crystallographic group JSON missing key {exc}") from exc
        if not isinstance(m, int) or m < 1:
            raise InputError("m must be a positive integer")
        if not isinstance(lattice, list) or not isinstance(gens, list):
            raise InputError("'lattice' and 'generators' must be arrays")
        parsed_lattice = [[_parse_fraction(x) for x in row] for row in lattice]
        generators = [AffineElement.from_json_dict(g) for g in gens]
        return cls(m=m, generators=generators, lattice=parsed_lattice,
                   lattice_wordlen=lattice_wordlen)


# ---------------------------------------------------------------------------
# splitting and affine Jordan decomposition
# ---------------------------------------------------------------------------


def splitting(s: IntegerMatrix) -> tuple[list[tuple[Fraction, ...]], list[tuple[Fraction, ...]]]:
    """Split Q^m into the moving and fixed subspaces of a finite-order s.

    Returns (moving, fixed) = (image of s - I, kernel of s - I); for
    finite-order s these are complementary.
    """
    if torsion_order(s) is None:
        raise InputError("holonomy has infinite order")
    m = s.n
    diff = s.to_rational() - RationalMatrix.identity(m)
    kernel, image = kernel_and_image(diff)
    if len(kernel) + len(image) != m:
        raise AssertionError("rank-nullity violated")
    return image, kernel


def _split_translation(
    s: IntegerMatrix, t: Sequence[Fraction]
) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Write t = t_s + t_u with t_s in the moving and t_u in the fixed
    subspace of s."""
    moving, fixed = splitting(s)
    m = s.n
    columns = [tuple(v) for v in moving + fixed]
    coords = _solve_exact(list(columns), tuple(Fraction(x) for x in t))
    if coords is None:
        raise AssertionError("direct sum decomposition failed")
    t_s = [Fraction(0)] * m
    for c, vec in zip(coords[: len(moving)], moving):
        for i in range(m):
            t_s[i] += c * vec[i]
    t_s_tuple = tuple(t_s)
    t_u = tuple(Fraction(x) - y for x, y in zip(t, t_s_tuple))
    return t_s_tuple, t_u


def affine_jordan(e: AffineElement) -> tuple[AffineElement, AffineElement]:
    """The commuting factorization (t, S) = (t_s, S)(t_u, I).

    t_u is the projection of t onto the fixed subspace of S along the moving
    subspace and t_s = t - t_u; the parts commute, the first is conjugate
    (by a rational translation) to the linear part S, the second is a pure
    translation.
    """
    t_s, t_u = _split_translation(e.S, e.t)
    semisimple = AffineElement(t=t_s, S=e.S)
    unipotent = AffineElement.translation(t_u)
    return semisimple, unipotent


# ---------------------------------------------------------------------------
# semisimple factor enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SemiFactorComponent:
    """Semisimple factor data for one holonomy matrix.

    ``invariant_factors`` describe the quotient of the moving-subspace
    lattice by its image under (S - I); ``representatives`` lists one
    canonical semisimple factor per realized coset together with a group
    element witnessing it.
    """

    S: IntegerMatrix
    invariant_factors: tuple[int, ...]
    representatives: tuple[tuple[tuple[Fraction, ...], AffineElement], ...]

    @property
    def count(self) -> int:
        return len(self.representatives)

    def to_json_dict(self) -> dict:
        return {
            "S": [list(row) for row in self.S.entries],
            "invariant_factors": list(self.invariant_factors),
            "quotient_order": _product(self.invariant_factors),
            "representatives": [
                {"t_s": [str(x) for x in t_s], "witness": w.to_json_dict()}
                for t_s, w in self.representatives
            ],
        }


def _product(xs: Sequence[int]) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


@dataclass(frozen=True)
class SemiFactorSet:
    """All semisimple factors of a crystallographic group up to conjugation
    by translations: finitely many per holonomy matrix."""

    m: int
    lattice: tuple[tuple[Fraction, ...], ...]
    components: tuple[SemiFactorComponent, ...]

    @property
    def total(self) -> int:
        return sum(c.count for c in self.components)

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "lattice": [[str(x) for x in row] for row in self.lattice],
            "components": [c.to_json_dict() for c in self.components],
            "total": self.total,
        }


def semifactor_representatives(group: CrystGroup) -> SemiFactorSet:
    """Enumerate semisimple factors per holonomy matrix, with witnesses.

    Works in lattice coordinates.  For each holonomy S the realized factors
    form a torsor over proj(L) / (S - I) proj(L) (proj = projection onto the
    moving subspace): enumeration walks a Smith-adapted basis, canonical
    representatives have adapted coordinates in [0, d_i).
    """
    m = group.m
    w = group._lattice_matrix
    w_inv = group._lattice_inverse
    components = []
    for s_ambient in group.holonomy:
        s_local = (w_inv * s_ambient.to_rational() * w).to_integer()
        witness = group.witness(s_ambient)
        t_local = mat_vec(w_inv, witness.t)
        moving, fixed = splitting(s_local)
        d = len(moving)
        if d == 0:
            zero = (Fraction(0),) * m
            components.append(
                SemiFactorComponent(
                    S=s_ambient,
                    invariant_factors=(),
                    representatives=((zero, group.witness(IntegerMatrix.identity(m))),),
                )
            )
            continue

        diff = s_local.to_rational() - RationalMatrix.identity(m)
        # projection onto the moving subspace along the fixed one
        basis_cols = [list(v) for v in moving] + [list(v) for v in fixed]
        basis_mat = RationalMatrix([list(col) for col in zip(*basis_cols)])
        basis_inv = basis_mat.inverse()
        proj_rows = []
        for i in range(m):
            row = []
            for j in range(m):
                acc = Fraction(0)
                for k in range(d):
                    acc += basis_mat.entries[i][k] * basis_inv.entries[k][j]
                row.append(acc)
            proj_rows.append(row)
        proj = RationalMatrix(proj_rows)

        # lattice of the moving subspace: SNF-reported quotient uses the
        # saturated sublattice L ∩ moving; the torsor uses proj(L)
        sat_basis = integer_kernel_basis(RationalMatrix.identity(m) - proj)
        sat_mat_cols = [list(v) for v in sat_basis]
        m_sat = _matrix_in_basis(diff, sat_mat_cols)
        invariant_factors = smith_normal_form(m_sat).invariant_factors

        proj_gens = []
        for i in range(m):
            e_i = [Fraction(0)] * m
            e_i[i] = Fraction(1)
            proj_gens.append(mat_vec(proj, e_i))
        pi_basis = lattice_basis(proj_gens, m)
        if len(pi_basis) != d:
            raise AssertionError("projected lattice rank mismatch")
        m_pi = _matrix_in_basis(diff, [list(v) for v in pi_basis])
        snf = smith_normal_form(m_pi)
        u_inv = snf.U.unimodular_inverse().to_rational()
        # adapted basis columns: (pi_basis as columns) * U^{-1}
        pi_cols = RationalMatrix([list(col) for col in zip(*pi_basis)])
        adapted = pi_cols * u_inv
        diag = [snf.D.entries[i][i] for i in range(d)]
        if any(x <= 0 for x in diag):
            raise AssertionError("moving-subspace quotient must be finite")

        shift = mat_vec(proj, t_local)
        shift_coords = _solve_exact(
            [tuple(adapted.entries[i][j] for i in range(m)) for j in range(d)],
            tuple(shift),
        )
        if shift_coords is None:
            raise AssertionError("projection landed outside the moving subspace")
        canonical = [a - di * math.floor(a / di) for a, di in zip(shift_coords, diag)]

        reps = []
        for combo in _mixed_radix(diag):
            coords = [
                c + k if c + k < di else c + k - di
                for c, k, di in zip(canonical, combo, diag)
            ]
            t_s_local = tuple(
                sum(adapted.entries[i][j] * coords[j] for j in range(d))
                for i in range(m)
            )
            # witness: translate the holonomy witness by a lattice vector
            # whose projection moves the factor onto this representative
            target = tuple(a - b for a, b in zip(t_s_local, shift))
            translation = solve_integer_linear(proj, target)
            if translation is None:
                raise AssertionError("representative has no lattice witness")
            lam_local = tuple(Fraction(x) for x in translation)
            lam_ambient = mat_vec(w, lam_local)
            elem = AffineElement.translation(lam_ambient).compose(witness)
            t_s_ambient = mat_vec(w, t_s_local)
            check_s, _ = affine_jordan(elem)
            if check_s.t != t_s_ambient or check_s.S != s_ambient:
                raise AssertionError("witness does not realize its representative")
            reps.append((t_s_ambient, elem))
        components.append(
            SemiFactorComponent(
                S=s_ambient,
                invariant_factors=invariant_factors,
                representatives=tuple(reps),
            )
        )
    return SemiFactorSet(m=m, lattice=group.lattice, components=tuple(components))


def _matrix_in_basis(op: RationalMatrix, basis_cols: list[list]) -> IntegerMatrix:
    """Matrix of ``op`` restricted to the integer lattice spanned by the
    basis columns (must be op-invariant)."""
    dim = len(basis_cols)
    images = []
    for col in basis_cols:
        images.append(mat_vec(op, [Fraction(x) for x in col]))
    cols = [tuple(Fraction(x) for x in col) for col in basis_cols]
    out_cols = []
    for img in images:
        coords = _solve_exact(list(cols), tuple(img))
        if coords is None or any(c.denominator != 1 for c in coords):
            raise AssertionError("lattice is not invariant under the operator")
        out_cols.append([int(c) for c in coords])
    return IntegerMatrix([[out_cols[j][i] for j in range(dim)] for i in range(dim)])


def _mixed_radix(radii: Sequence[int]):
    """Yield tuples c with 0 <= c_i < radii[i], lexicographically."""
    import itertools

    yield from itertools.product(*(range(r) for r in radii))


# ---------------------------------------------------------------------------
# integral affine embedding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GLEmbedding:
    """The integral (m+1)-dimensional affine embedding of a group.

    (t, S) maps to the block matrix [[S', D t'], [0, 1]] in lattice
    coordinates (primes) with one global denominator D, so generators and
    all stored semisimple factor representatives land in GL(m+1, Z).
    """

    n: int
    denominator: int
    generators: tuple[IntegerMatrix, ...]
    semifactors: tuple[IntegerMatrix, ...]
    embed: Callable[[AffineElement], IntegerMatrix]


def _embedding_for(group: CrystGroup, elements: Sequence[AffineElement]):
    w_inv = group._lattice_inverse
    locals_ = [
        ((w_inv * e.S.to_rational() * group._lattice_matrix), mat_vec(w_inv, e.t))
        for e in elements
    ]
    for s_local, _ in locals_:
        if not s_local.is_integral:
            raise AssertionError("holonomy not integral in lattice coordinates")
    denom = 1
    for _, t_local in locals_:
        denom = math.lcm(denom, *(x.denominator for x in t_local))
    return denom


def _embed_element(group: CrystGroup, e: AffineElement, denom: int) -> IntegerMatrix:
    w_inv = group._lattice_inverse
    s_local = (w_inv * e.S.to_rational() * group._lattice_matrix).to_integer()
    t_local = mat_vec(w_inv, e.t)
    m = group.m
    rows = []
    for i in range(m):
        scaled = Fraction(denom) * t_local[i]
        if scaled.denominator != 1:
            raise InputError(
                "element translation does not clear the embedding denominator"
            )
        rows.append(list(s_local.entries[i]) + [int(scaled)])
    rows.append([0] * m + [1])
    return IntegerMatrix(rows)


def embed_affine(group: CrystGroup) -> list[IntegerMatrix]:
    """Embed the generators into GL(m+1, Z).

    Lattice coordinates first, then the smallest D >= 1 clearing every
    generator translation.  The embedding is a homomorphism (verified on all
    generator pairs) and each image has determinant ±1.
    """
    denom = _embedding_for(group, group.generators)
    images = [_embed_element(group, g, denom) for g in group.generators]
    for g1, img1 in zip(group.generators, images):
        for g2, img2 in zip(group.generators, images):
            if img1 * img2 != _embed_element(group, g1.compose(g2), denom):
                raise AssertionError("affine embedding is not a homomorphism")
    for img in images:
        if img.det() not in (1, -1):
            raise AssertionError("embedded generator is not unimodular")
    return images


def lift_to_gl(group: CrystGroup, op: Callable[[GLEmbedding], object] | None = None):
    """Embed the group together with all its semisimple factor
    representatives into one GL(m+1, Z), sharing a single denominator.

    With ``op`` given, delegates: returns ``op(embedding)``.  Otherwise
    returns the GLEmbedding for the caller to feed into the separation
    searches.
    """
    factors = semifactor_representatives(group)
    factor_elements = [
        AffineElement(t=t_s, S=comp.S)
        for comp in factors.components
        for t_s, _ in comp.representatives
    ]
    denom = _embedding_for(group, list(group.generators) + factor_elements)
    gen_images = tuple(_embed_element(group, g, denom) for g in group.generators)
    factor_images = tuple(_embed_element(group, e, denom) for e in factor_elements)
    for img in gen_images + factor_images:
        if img.det() not in (1, -1):
            raise AssertionError("embedded element is not unimodular")
    embedding = GLEmbedding(
        n=group.m + 1,
        denominator=denom,
        generators=gen_images,
        semifactors=factor_images,
        embed=lambda e: _embed_element(group, e, denom),
    )
    if op is not None:
        return op(embedding)
    return embedding
