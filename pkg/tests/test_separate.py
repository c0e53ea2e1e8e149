import json
from fractions import Fraction

import pytest

from congrusep.errors import (
    InputError,
    MalformedCertificateError,
    PreconditionError,
    ScheduleExhaustedError,
)
from congrusep.exactlin import IntegerMatrix, RationalMatrix
from congrusep import modgrp
from congrusep.separate import (
    SeparationCertificate,
    TorsionFreeCertificate,
    avoid_conjugacy,
    default_moduli_schedule,
    dump_certificate,
    parse_certificate,
    torsion_class_table,
    torsion_free_overgroup,
    validate_torsion_table,
    verify_certificate,
    witness_prime,
)
from congrusep.jordan import torsion_order
from helpers import brute_force_closure, brute_force_gl, gl2_box, mat_mul_mod

U = IntegerMatrix([[1, 1], [0, 1]])
U2 = IntegerMatrix([[1, 2], [0, 1]])
NEG_I = IntegerMatrix([[-1, 0], [0, -1]])
ROT4 = IntegerMatrix([[0, -1], [1, 0]])
ANOSOV = IntegerMatrix([[2, 1], [1, 1]])


def test_default_schedule_shape():
    sched = default_moduli_schedule()
    assert sched[0] == 2
    assert sched == sorted(sched)
    assert 3 in sched and 8 in sched and 27 in sched
    assert 23**4 in sched


# ---------------------------------------------------------------------------
# avoid_conjugacy
# ---------------------------------------------------------------------------


def test_flagship_instance_modulus_three():
    cert = avoid_conjugacy([U], NEG_I)
    assert cert.m == 3
    assert cert.image_size == 3
    assert cert.class_size == 1
    assert cert.disjoint


def test_flagship_oracle_full_enumeration():
    """Independent check by full enumeration of GL(2, Z/3)."""
    gl = brute_force_gl(2, 3)
    assert len(gl) == 48
    u_mod = (1, 1, 0, 1)
    image = {u_mod}
    while True:
        new = {mat_mul_mod(a, u_mod, 2, 3) for a in image} - image
        if not new:
            break
        image |= new
    assert len(image) == 3
    eta_mod = (2, 0, 0, 2)

    def inv2(flat):
        a, b, c, d = flat
        det = (a * d - b * c) % 3
        det_inv = [x for x in range(3) if det * x % 3 == 1][0]
        return tuple(v * det_inv % 3 for v in (d, -b % 3, -c % 3, a))

    orbit = {mat_mul_mod(mat_mul_mod(inv2(h), eta_mod, 2, 3), h, 2, 3) for h in gl}
    assert orbit == {eta_mod}
    assert not (image & orbit)
    cert = avoid_conjugacy([U], NEG_I)
    assert cert.image_size == len(image)
    assert cert.class_size == len(orbit)


def test_flagship_fails_mod_two():
    with pytest.raises(ScheduleExhaustedError):
        avoid_conjugacy([U], NEG_I, [2])
    assert modgrp.reduce(NEG_I, 2) in modgrp.generate([modgrp.reduce(U, 2)])


def test_trivial_group():
    cert = avoid_conjugacy([], NEG_I)
    assert cert.m == 3
    assert cert.image_size == 1


def test_second_instance_first_scheduled_success():
    cert = avoid_conjugacy([U2], ROT4)
    assert cert.m == 2  # image mod 2 is trivial, class of order-4 misses it
    assert verify_certificate(cert)


def test_eta_must_be_semisimple():
    with pytest.raises(PreconditionError):
        avoid_conjugacy([U], U2)


def test_eta_must_be_unimodular():
    with pytest.raises(PreconditionError):
        avoid_conjugacy([U], IntegerMatrix([[2, 0], [0, 1]]))


def test_schedule_validation():
    with pytest.raises(InputError):
        avoid_conjugacy([U], NEG_I, [3, 3])
    with pytest.raises(InputError):
        avoid_conjugacy([U], NEG_I, [])
    with pytest.raises(InputError):
        avoid_conjugacy([U], NEG_I, [1, 2])


def test_exhaustion_for_non_virtually_unipotent_generator():
    """A group generated by an infinite-order semisimple element that
    contains the target: no congruence level can ever separate."""
    with pytest.raises(ScheduleExhaustedError) as info:
        avoid_conjugacy([ANOSOV], ANOSOV, [2, 3, 4, 5, 7, 8, 9])
    assert info.value.largest_tried == 9


def test_soundness_sampling_box():
    cert = avoid_conjugacy([U], NEG_I)
    image = modgrp.generate([modgrp.reduce(g, cert.m) for g in cert.gamma_gens])
    for h in gl2_box(2):
        conj = h.unimodular_inverse() * cert.eta * h
        assert modgrp.reduce(conj, cert.m) not in image


def test_containment_of_group_words():
    cert = avoid_conjugacy([U2], ROT4)
    image = modgrp.generate(
        [modgrp.reduce(g, cert.m) for g in cert.gamma_gens],
        n=cert.n,
        m=cert.m,
    )
    from congrusep.jordan import bounded_words

    for w in bounded_words(list(cert.gamma_gens), 6):
        assert modgrp.reduce(w, cert.m) in image


def test_search_agrees_with_brute_force_on_small_moduli():
    """Replay the first-success search with a fully independent oracle:
    brute-force subgroup closure and conjugation over all of GL(2, Z/m)."""
    instances = [
        ([U], NEG_I),
        ([U2], ROT4),
        ([U], IntegerMatrix([[1, 0], [0, -1]])),
        ([], ROT4),
    ]
    schedule = [2, 3, 4, 5]
    for gens, eta in instances:
        oracle_m = None
        for m in schedule:
            gl = brute_force_gl(2, m)
            reduced = [tuple(x % m for row in g.entries for x in row) for g in gens]
            image = brute_force_closure(reduced, 2, m)
            eta_flat = tuple(x % m for row in eta.entries for x in row)

            def inv(flat):
                a, b, c, d = flat
                det = (a * d - b * c) % m
                det_inv = next(k for k in range(1, m) if det * k % m == 1)
                return tuple(v * det_inv % m for v in (d, -b % m, -c % m, a))

            orbit = {
                mat_mul_mod(mat_mul_mod(inv(h), eta_flat, 2, m), h, 2, m) for h in gl
            }
            if not (image & orbit):
                oracle_m = m
                break
        cert = avoid_conjugacy(gens, eta, schedule)
        assert cert.m == oracle_m
        assert cert.image_size == len(image)
        assert cert.class_size == len(orbit)


def test_certificate_disjointness_by_independent_conjugacy_route():
    """Second route: image ∩ class = ∅ iff no image element is conjugate to
    the representative, decided by the Smith-form conjugacy procedure
    rather than orbit enumeration."""
    from congrusep.modgrp import is_conjugate_mod

    cert = torsion_free_overgroup([U], torsion_class_table(2))
    for evidence in cert.per_rep:
        image = modgrp.generate(
            [modgrp.reduce(g, evidence.modulus) for g in cert.gamma_gens]
        )
        for x in image.elements:
            lifted = IntegerMatrix(x.to_lists())
            assert not is_conjugate_mod(lifted, evidence.rep, evidence.modulus)


def test_monotonicity_to_multiples():
    cert = avoid_conjugacy([U], NEG_I)
    for multiple in (2 * cert.m, 3 * cert.m):
        image = modgrp.generate([modgrp.reduce(U, multiple)])
        cls = modgrp.conj_class(modgrp.reduce(NEG_I, multiple))
        assert image.elements.isdisjoint(cls.orbit)


# ---------------------------------------------------------------------------
# witness_prime
# ---------------------------------------------------------------------------


def test_witness_prime_denominator():
    factor = RationalMatrix([[Fraction(1, 2), 0], [0, 2]])
    w = witness_prime(factor, [U])
    assert (w.prime, w.level, w.reason) == (2, 0, "denominator")


def test_witness_prime_image_escape():
    w = witness_prime(NEG_I.to_rational(), [U])
    assert (w.prime, w.level, w.reason) == (3, 1, "image-escape")


def test_witness_prime_agrees_with_avoidance_modulus():
    cert = avoid_conjugacy([U], NEG_I)
    w = witness_prime(NEG_I.to_rational(), [U])
    assert w.prime**w.level == cert.m


def test_witness_prime_identity_exhausts():
    with pytest.raises(ScheduleExhaustedError):
        witness_prime(RationalMatrix.identity(2), [U], [2, 3], 2)


def test_witness_prime_requires_semisimple():
    with pytest.raises(PreconditionError):
        witness_prime(U.to_rational(), [U])


# ---------------------------------------------------------------------------
# torsion tables
# ---------------------------------------------------------------------------


def test_table_n1():
    table = torsion_class_table(1)
    assert [e.entries for e in table.entries] == [((1,),), ((-1,),)]


def test_table_n2_contents():
    table = torsion_class_table(2)
    orders = sorted(torsion_order(e) for e in table.entries)
    assert orders == [1, 2, 2, 2, 3, 4, 6]
    assert NEG_I in table.entries
    assert ROT4 in table.entries


def test_table_n3_loads():
    table = torsion_class_table(3)
    assert len(table.entries) == 16
    orders = sorted(torsion_order(e) for e in table.entries)
    assert orders == [1, 2, 2, 2, 2, 2, 3, 3, 4, 4, 4, 4, 6, 6, 6, 6]


def test_table_unsupported_dimension():
    with pytest.raises(InputError):
        torsion_class_table(4)


def test_table_screen_n1():
    assert validate_torsion_table(1, bound=3) == []


def test_table_screen_n2_full_default_bound():
    assert validate_torsion_table(2, bound=3) == []


def test_table_screen_n3_small_bound():
    assert validate_torsion_table(3, bound=1) == []


@pytest.mark.slow
def test_table_screen_n3_bound_two():
    assert validate_torsion_table(3, bound=2) == []


def test_table_with_infinite_order_entry_rejected():
    bad = separate_table_with(ANOSOV)
    with pytest.raises(InputError):
        validate_torsion_table(2, bound=1, table=bad)


def separate_table_with(extra):
    base = torsion_class_table(2)
    return type(base)(n=2, version="bad", entries=base.entries + (extra,))


def test_table_screen_catches_removed_class():
    table = torsion_class_table(2)
    crippled = type(table)(
        n=2, version="crippled", entries=tuple(e for e in table.entries if e != ROT4)
    )
    missing = validate_torsion_table(2, bound=1, table=crippled)
    assert any(torsion_order(g) == 4 for g in missing)


# ---------------------------------------------------------------------------
# torsion_free_overgroup
# ---------------------------------------------------------------------------


def test_torsion_free_unipotent_group():
    cert = torsion_free_overgroup([U], torsion_class_table(2))
    assert cert.table_version == "builtin-n2-v1"
    assert len(cert.per_rep) == 6  # identity carries no evidence
    assert all(e.disjoint for e in cert.per_rep)
    assert all(cert.m % e.modulus == 0 for e in cert.per_rep)
    assert verify_certificate(cert)


def test_torsion_free_trivial_group():
    cert = torsion_free_overgroup([], [NEG_I], n=2)
    assert cert.m == 3


def test_torsion_free_empty_reps():
    cert = torsion_free_overgroup([U], [], n=2)
    assert cert.m == 2
    assert cert.per_rep == ()


def test_torsion_free_rejects_infinite_order_rep():
    with pytest.raises(PreconditionError):
        torsion_free_overgroup([U], [ANOSOV])


def test_torsion_free_certificate_excludes_torsion_box():
    cert = torsion_free_overgroup([U], torsion_class_table(2))
    image = modgrp.generate([modgrp.reduce(g, cert.m) for g in cert.gamma_gens])
    for g in gl2_box(3):
        order = torsion_order(g)
        if order is not None and order > 1:
            assert modgrp.reduce(g, cert.m) not in image


# ---------------------------------------------------------------------------
# certificates: serialization and verification
# ---------------------------------------------------------------------------


def test_roundtrip_separation():
    cert = avoid_conjugacy([U], NEG_I)
    text = dump_certificate(cert)
    parsed = parse_certificate(text)
    assert isinstance(parsed, SeparationCertificate)
    assert parsed == cert
    assert verify_certificate(text)


def test_roundtrip_torsion_free():
    cert = torsion_free_overgroup([U], torsion_class_table(2))
    text = dump_certificate(cert)
    parsed = parse_certificate(text)
    assert isinstance(parsed, TorsionFreeCertificate)
    assert parsed == cert
    assert verify_certificate(text)


def test_dump_deterministic():
    a = dump_certificate(avoid_conjugacy([U], NEG_I))
    b = dump_certificate(avoid_conjugacy([U], NEG_I))
    assert a == b


def test_verify_rejects_corrupted_digest():
    data = json.loads(dump_certificate(avoid_conjugacy([U], NEG_I)))
    data["image_digest"] = "0" * 64
    assert not verify_certificate(json.dumps(data))


def test_verify_rejects_wrong_modulus():
    data = json.loads(dump_certificate(avoid_conjugacy([U], NEG_I)))
    data["m"] = 2  # mod 2 the target is the identity, inside the image
    assert not verify_certificate(json.dumps(data))


def test_verify_rejects_wrong_sizes():
    data = json.loads(dump_certificate(avoid_conjugacy([U], NEG_I)))
    data["image_size"] += 1
    assert not verify_certificate(json.dumps(data))


def test_verify_rejects_tampered_per_rep():
    data = json.loads(dump_certificate(torsion_free_overgroup([U], torsion_class_table(2))))
    data["per_rep"][0]["class_digest"] = "f" * 64
    assert not verify_certificate(json.dumps(data))


def test_verify_rejects_per_rep_modulus_not_dividing():
    data = json.loads(dump_certificate(torsion_free_overgroup([U], torsion_class_table(2))))
    data["per_rep"][0]["modulus"] = 5
    assert not verify_certificate(json.dumps(data))


def test_malformed_certificate_distinguished():
    with pytest.raises(MalformedCertificateError):
        parse_certificate("{not json")
    with pytest.raises(MalformedCertificateError):
        parse_certificate(json.dumps({"version": 1, "kind": "separation"}))
    with pytest.raises(MalformedCertificateError):
        parse_certificate(json.dumps({"version": 99, "kind": "separation"}))


def test_verify_unknown_keys_tolerated():
    data = json.loads(dump_certificate(avoid_conjugacy([U], NEG_I)))
    data["comment"] = "extra annotations do not carry claims"
    assert verify_certificate(json.dumps(data))


def test_verify_resists_field_mutations():
    """Every single-field mutation of a valid certificate must fail closed:
    verification returns False or the parser rejects the schema."""
    base = json.loads(dump_certificate(avoid_conjugacy([U], NEG_I)))
    mutations = [
        ("m", 4),
        ("m", 9),
        ("n", 3),
        ("image_size", 2),
        ("class_size", 5),
        ("image_digest", "ab" * 32),
        ("class_digest", "cd" * 32),
        ("disjoint", False),
        ("eta", {"n": 2, "entries": [["1", "0"], ["0", "1"]]}),
        ("gamma_gens", []),
        ("kind", "torsion-free"),
        ("version", 2),
    ]
    for key, value in mutations:
        data = dict(base)
        data[key] = value
        try:
            assert verify_certificate(json.dumps(data)) is False, (key, value)
        except MalformedCertificateError:
            pass
