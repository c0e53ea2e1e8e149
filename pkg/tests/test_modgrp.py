import random
from fractions import Fraction

import pytest

from congrusep.errors import (
    DimensionMismatchError,
    InputError,
    PreconditionError,
    ResourceError,
)
from congrusep.exactlin import IntegerMatrix, RationalMatrix
from congrusep.modgrp import (
    DenominatorNotUnitError,
    ModMatrix,
    char_coeffs_mod,
    conj_class,
    elements_digest,
    generate,
    gl_generators,
    gl_order,
    is_conjugate_mod,
    padic_level_image,
    reduce,
    semisimple_elements_mod,
    unit_group_generators,
)
from helpers import brute_force_closure, brute_force_gl, random_gl_element

U = IntegerMatrix([[1, 1], [0, 1]])
L = IntegerMatrix([[1, 0], [1, 1]])
NEG_I = IntegerMatrix([[-1, 0], [0, -1]])


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------


def test_reduce_negative_identity():
    assert reduce(NEG_I, 3).to_lists() == [[2, 0], [0, 2]]


def test_reduce_unipotent_mod_two():
    assert reduce(U, 2).to_lists() == [[1, 1], [0, 1]]


def test_reduce_rational_denominator_error():
    bad = RationalMatrix([[Fraction(1, 2), 0], [0, 2]])
    with pytest.raises(DenominatorNotUnitError) as info:
        reduce(bad, 2)
    assert info.value.denominator == 2


def test_reduce_rational_with_unit_denominator():
    mat = RationalMatrix([[Fraction(1, 2), 0], [0, 2]])
    reduced = reduce(mat, 3)
    # 1/2 = 2 mod 3 since 2*2 = 4 = 1
    assert reduced.to_lists() == [[2, 0], [0, 2]]


def test_reduce_homomorphism_random():
    rng = random.Random(0xBEEF)
    for _ in range(50):
        m = rng.randint(2, 12)
        a = random_gl_element(rng, 2)
        b = random_gl_element(rng, 2)
        assert reduce(a * b, m) == reduce(a, m) * reduce(b, m)


def test_mod_matrix_requires_unit_det():
    with pytest.raises(PreconditionError):
        ModMatrix(2, 4, [2, 0, 0, 1])


def test_mod_matrix_inverse():
    x = reduce(U, 9)
    assert x * x.inverse() == ModMatrix.identity(2, 9)
    y = reduce(IntegerMatrix([[2, 3], [3, 2]]), 6)  # det = -5, unit mod 6
    assert y * y.inverse() == ModMatrix.identity(2, 6)


# ---------------------------------------------------------------------------
# generated subgroups
# ---------------------------------------------------------------------------


def test_generate_trivial():
    grp = generate([reduce(IntegerMatrix.identity(2), 5)])
    assert grp.size == 1


def test_generate_empty_needs_dims():
    grp = generate([], n=2, m=7)
    assert grp.size == 1
    with pytest.raises(InputError):
        generate([])


def test_generate_unipotent_mod3():
    grp = generate([reduce(U, 3)])
    assert grp.size == 3


def test_generate_sl2_mod2():
    grp = generate([reduce(U, 2), reduce(L, 2)])
    assert grp.size == 6
    # oracle: brute-force closure over flat tuples
    oracle = brute_force_closure([tuple(reduce(U, 2).entries), tuple(reduce(L, 2).entries)], 2, 2)
    assert {g.entries for g in grp.elements} == oracle


def test_generate_budget():
    with pytest.raises(ResourceError) as info:
        generate([reduce(U, 101)], cap=10)
    assert info.value.partial_size is not None


def test_generate_order_independent():
    gens = [reduce(U, 4), reduce(L, 4), reduce(NEG_I, 4)]
    elements = generate(gens).elements
    assert generate(list(reversed(gens))).elements == elements
    assert generate([gens[1], gens[0], gens[2]]).elements == elements


def test_generate_mixed_moduli_rejected():
    with pytest.raises(DimensionMismatchError):
        generate([reduce(U, 2), reduce(U, 3)])


def test_group_digest_deterministic():
    a = generate([reduce(U, 5)])
    b = generate([reduce(U, 5)])
    assert a.digest() == b.digest()
    assert a.to_json_dict()["elements_digest"] == b.digest()
    assert elements_digest(a.elements) == a.digest()


def test_group_and_class_json_shapes():
    grp = generate([reduce(U, 5)])
    assert set(grp.to_json_dict()) == {"n", "m", "generators", "size", "elements_digest"}
    full = grp.to_json_dict(full=True)
    assert len(full["elements"]) == grp.size
    cls = conj_class(reduce(U, 2))
    assert set(cls.to_json_dict()) == {"n", "m", "representative", "size", "elements_digest"}


# ---------------------------------------------------------------------------
# GL(n, Z/m) generators, orders, conjugacy classes
# ---------------------------------------------------------------------------


def test_unit_group_generators_prime():
    assert unit_group_generators(5) == [2]


def test_unit_group_generators_two_power():
    gens = set(unit_group_generators(8))
    closure = {1}
    frontier = [1]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x * g % 8
                if y not in closure:
                    closure.add(y)
                    new.append(y)
        frontier = new
    assert closure == {1, 3, 5, 7}


def test_gl_generators_dim1():
    gens = gl_generators(1, 5)
    assert [g.to_lists() for g in gens] == [[[2]]]


def test_gl_generators_generate_full_group_small():
    for n, m in [(2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2)]:
        grp = generate(gl_generators(n, m))
        assert grp.size == gl_order(n, m), (n, m)


def test_gl_order_against_enumeration():
    for m in (2, 3, 4, 5):
        assert gl_order(2, m) == len(brute_force_gl(2, m))


def test_conj_class_identity_is_central():
    cls = conj_class(ModMatrix.identity(2, 3))
    assert cls.size == 1


def test_conj_class_scalar_is_central():
    cls = conj_class(reduce(NEG_I, 3))
    assert cls.orbit == frozenset([reduce(NEG_I, 3)])


def test_conj_class_transvections_mod2():
    cls = conj_class(reduce(U, 2))
    expected = {
        ((1, 1), (0, 1)),
        ((1, 0), (1, 1)),
        ((0, 1), (1, 0)),
    }
    assert {tuple(map(tuple, x.to_lists())) for x in cls.orbit} == expected


def test_orbit_sizes_divide_group_order():
    rng = random.Random(0x0B17)
    for m in (2, 3, 4, 5):
        order = gl_order(2, m)
        for _ in range(5):
            rep = reduce(random_gl_element(rng, 2), m)
            cls = conj_class(rep)
            assert order % cls.size == 0


def test_conjugate_reduction_lands_in_class():
    rng = random.Random(0x50FD)
    eta = IntegerMatrix([[0, -1], [1, 0]])
    for m in (2, 3, 4, 5, 6):
        cls = conj_class(reduce(eta, m))
        for _ in range(10):
            h = random_gl_element(rng, 2)
            conj = h.unimodular_inverse() * eta * h
            assert reduce(conj, m) in cls


def test_char_coeffs_mod_is_conjugation_invariant():
    rng = random.Random(0xCC)
    for _ in range(20):
        g = random_gl_element(rng, 3)
        h = random_gl_element(rng, 3)
        conj = h.unimodular_inverse() * g * h
        for m in (4, 9):
            assert char_coeffs_mod(reduce(g, m)) == char_coeffs_mod(reduce(conj, m))


# ---------------------------------------------------------------------------
# finite-level images of p-adic closures
# ---------------------------------------------------------------------------


def test_padic_levels_of_unipotent():
    sizes = [padic_level_image([U], 2, k).size for k in range(1, 5)]
    assert sizes == [2, 4, 8, 16]


def test_padic_level_requires_prime():
    with pytest.raises(InputError):
        padic_level_image([U], 4, 1)


def test_padic_empty_generators():
    grp = padic_level_image([], 5, 2, n=2)
    assert grp.size == 1


def test_tower_projection_is_onto():
    for k in range(1, 4):
        higher = padic_level_image([U, L], 2, k + 1)
        lower = padic_level_image([U, L], 2, k)
        projected = {x.project(2**k) for x in higher.elements}
        assert projected == set(lower.elements)


def test_crt_consistency():
    grp12 = generate([reduce(U, 12)])
    grp4 = generate([reduce(U, 4)])
    grp3 = generate([reduce(U, 3)])
    pairs = {(x.project(4), x.project(3)) for x in grp12.elements}
    assert len(pairs) == grp12.size  # the CRT map is injective
    assert grp12.size <= grp4.size * grp3.size
    assert {p for p, _ in pairs} == set(grp4.elements)
    assert {q for _, q in pairs} == set(grp3.elements)


# ---------------------------------------------------------------------------
# semisimple elements of an image
# ---------------------------------------------------------------------------


def test_semisimple_elements_mod_disjoint_case():
    grp = generate([reduce(U, 3)])
    assert semisimple_elements_mod(grp, [NEG_I]) == []


def test_semisimple_elements_mod_trivial_group():
    grp = generate([], n=2, m=5)
    found = semisimple_elements_mod(grp, [IntegerMatrix.identity(2)])
    assert found == [ModMatrix.identity(2, 5)]


def test_semisimple_elements_mod_reduction_collision():
    grp = generate([reduce(U, 2)])
    found = semisimple_elements_mod(grp, [NEG_I])
    assert found == [ModMatrix.identity(2, 2)]


def test_semisimple_elements_mod_requires_semisimple():
    grp = generate([reduce(U, 3)])
    with pytest.raises(PreconditionError):
        semisimple_elements_mod(grp, [U])


# ---------------------------------------------------------------------------
# exact conjugacy decision
# ---------------------------------------------------------------------------


def test_is_conjugate_mod_agrees_with_orbits():
    rng = random.Random(0xC09)
    mats = [random_gl_element(rng, 2) for _ in range(6)]
    for m in (2, 3, 4, 5):
        for a in mats[:3]:
            cls = conj_class(reduce(a, m))
            for b in mats:
                assert is_conjugate_mod(a, b, m) == (reduce(b, m) in cls)


def test_is_conjugate_mod_reflections():
    refl1 = IntegerMatrix([[1, 0], [0, -1]])
    refl2 = IntegerMatrix([[0, 1], [1, 0]])
    assert is_conjugate_mod(refl1, refl2, 5)
    assert is_conjugate_mod(refl1, refl2, 9)
    assert not is_conjugate_mod(refl1, refl2, 8)
