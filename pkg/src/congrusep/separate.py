"""Certificate-producing separation searches.

Three constructions, each returning a finite, independently re-checkable
witness instead of a bare existence claim:

* ``avoid_conjugacy``: a modulus m such that the congruence image of the
  generated group is disjoint from the full mod-m conjugacy class of a
  semisimple target.  The congruence subgroup (preimage of the image) then
  contains the group and misses the target's integral conjugacy class.
* ``witness_prime``: for a semisimple factor, a prime p (and level K) at
  which the factor provably escapes the group's image: either a prime from a
  denominator of the factor, or a finite-level image-escape.
* ``torsion_free_overgroup``: a constructive Selberg-type statement: one
  modulus whose congruence subgroup contains the group and avoids every
  nontrivial torsion class from a representative table, hence is torsion
  free (relative to the table's coverage, which is recorded).

Certificate JSON is stable and versioned; ``verify_certificate`` recomputes
every field from scratch.  Searches never claim impossibility: groups
violating the virtual-unipotency hypothesis (e.g. generated by an
infinite-order semisimple element) can legitimately exhaust any schedule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import lcm
from typing import Iterable, Sequence

from . import modgrp
from .errors import (
    InputError,
    MalformedCertificateError,
    PreconditionError,
    ScheduleExhaustedError,
)
from .exactlin import IntegerMatrix, RationalMatrix
from .jordan import is_semisimple, torsion_order

CERT_VERSION = 1

_SCHEDULE_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23)
_SCHEDULE_MAX_LEVEL = 4


def default_moduli_schedule() -> list[int]:
    """Prime powers p^K (p <= 23, K <= 4) and products of two distinct
    schedule primes, merged in ascending order.

    The two-prime products matter: congruence images at a composite level
    are only subdirect in the product of their prime-power parts, so a
    composite modulus can separate when no single prime power does.
    """
    moduli = {
        p**k for p in _SCHEDULE_PRIMES for k in range(1, _SCHEDULE_MAX_LEVEL + 1)
    }
    for i, p in enumerate(_SCHEDULE_PRIMES):
        for q in _SCHEDULE_PRIMES[i + 1 :]:
            moduli.add(p * q)
    return sorted(moduli)


def default_prime_schedule() -> list[int]:
    return list(_SCHEDULE_PRIMES)


def _validate_schedule(schedule: Sequence[int]) -> list[int]:
    sched = list(schedule)
    if not sched:
        raise InputError("modulus schedule is empty")
    if any(m < 2 for m in sched):
        raise InputError("schedule moduli must be >= 2")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise InputError("schedule must be strictly increasing")
    return sched


def _check_gl_generators(gens: Sequence[IntegerMatrix], n: int | None) -> int:
    for g in gens:
        if g.det() not in (1, -1):
            raise PreconditionError(f"generator has det {g.det()}, not in GL(n,Z)")
        if n is None:
            n = g.n
        elif g.n != n:
            raise InputError("generators of mixed dimension")
    if n is None:
        raise InputError("cannot infer dimension: no generators and no target")
    return n


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationCertificate:
    """Witness that the mod-m image of <gamma_gens> misses the mod-m class
    of eta, so the congruence subgroup at m contains the group and is
    disjoint from eta's integral conjugacy class."""

    n: int
    m: int
    gamma_gens: tuple[IntegerMatrix, ...]
    eta: IntegerMatrix
    image_size: int
    class_size: int
    image_digest: str
    class_digest: str
    disjoint: bool = True

    def to_json_dict(self) -> dict:
        return {
            "version": CERT_VERSION,
            "kind": "separation",
            "n": self.n,
            "m": self.m,
            "gamma_gens": [g.to_json_dict() for g in self.gamma_gens],
            "eta": self.eta.to_json_dict(),
            "image_size": self.image_size,
            "class_size": self.class_size,
            "image_digest": self.image_digest,
            "class_digest": self.class_digest,
            "disjoint": self.disjoint,
        }


@dataclass(frozen=True)
class RepEvidence:
    """Per-representative disjointness record inside a torsion-free
    certificate.

    The class data is recorded at the representative's own modulus, a
    divisor of the certificate's joint modulus: disjointness at a divisor
    forces disjointness at every multiple, because reduction mod ``modulus``
    factors through reduction mod the joint level and maps image onto image,
    class into class.
    """

    rep: IntegerMatrix
    order: int
    modulus: int
    class_size: int
    class_digest: str
    disjoint: bool = True

    def to_json_dict(self) -> dict:
        return {
            "rep": self.rep.to_json_dict(),
            "order": self.order,
            "modulus": self.modulus,
            "class_size": self.class_size,
            "class_digest": self.class_digest,
            "disjoint": self.disjoint,
        }


@dataclass(frozen=True)
class TorsionFreeCertificate:
    """Witness that the congruence subgroup at m contains <gamma_gens> and
    avoids every nontrivial torsion class of the recorded table.

    Completeness of the table up to conjugacy is a recorded *assumption*
    (``table_version`` names the data asset); order-1 representatives are
    listed but carry no evidence, since the trivial class lies in every
    congruence image and does not obstruct torsion-freeness.
    """

    n: int
    m: int
    gamma_gens: tuple[IntegerMatrix, ...]
    torsion_reps: tuple[IntegerMatrix, ...]
    image_size: int
    image_digest: str
    per_rep: tuple[RepEvidence, ...]
    table_version: str

    def to_json_dict(self) -> dict:
        return {
            "version": CERT_VERSION,
            "kind": "torsion-free",
            "n": self.n,
            "m": self.m,
            "gamma_gens": [g.to_json_dict() for g in self.gamma_gens],
            "torsion_reps": [r.to_json_dict() for r in self.torsion_reps],
            "image_size": self.image_size,
            "image_digest": self.image_digest,
            "per_rep": [e.to_json_dict() for e in self.per_rep],
            "table_version": self.table_version,
        }


@dataclass(frozen=True)
class WitnessPrime:
    """A prime at which a semisimple factor escapes the group's closure.

    ``reason`` is "denominator" (p divides an entry denominator; level is 0,
    no finite level is involved) or "image-escape" (the factor's reduction
    mod p^level lies outside the finite-level image).
    """

    factor: RationalMatrix
    prime: int
    level: int
    reason: str

    def to_json_dict(self) -> dict:
        return {
            "factor": self.factor.to_json_dict(),
            "prime": self.prime,
            "level": self.level,
            "reason": self.reason,
        }


def dump_certificate(cert: SeparationCertificate | TorsionFreeCertificate) -> str:
    """Canonical JSON text (sorted keys, no whitespace, trailing newline)."""
    return json.dumps(cert.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# searches
# ---------------------------------------------------------------------------


def _cc_index(image: modgrp.ModMatrixGroup) -> dict[tuple, frozenset]:
    """Image elements bucketed by char-poly coefficients mod m (a cheap
    conjugation invariant): the only candidates for meeting a class."""
    index: dict[tuple, list] = {}
    for x in image.elements:
        index.setdefault(modgrp.char_coeffs_mod(x), []).append(x)
    return {key: frozenset(vals) for key, vals in index.items()}


def _probe_disjoint(
    image: modgrp.ModMatrixGroup,
    cc_index: dict[tuple, frozenset],
    rep_mod: modgrp.ModMatrix,
    cap: int,
) -> tuple[bool, modgrp.ConjClass | None]:
    """Decide image ∩ class(rep_mod) = ∅ without always enumerating the
    orbit: membership first, then the char-poly screen, then a fail-fast
    orbit expansion that aborts on the first hit.

    Returns (disjoint, class) where the class is included only when the
    probe happened to complete the full orbit.
    """
    if rep_mod in image.elements:
        return False, None
    stop = cc_index.get(modgrp.char_coeffs_mod(rep_mod))
    if not stop:
        return True, None
    orbit, hit = modgrp._orbit_expand(rep_mod, cap, stop_inside=stop)
    if hit:
        return False, None
    return True, modgrp.ConjClass(rep_mod, orbit)


def avoid_conjugacy(
    gamma_gens: Sequence[IntegerMatrix],
    eta: IntegerMatrix,
    moduli_schedule: Iterable[int] | None = None,
    *,
    cap: int = modgrp.DEFAULT_CAP,
) -> SeparationCertificate:
    """First modulus in the schedule whose congruence image of the group is
    disjoint from the mod-m conjugacy class of ``eta``, as a certificate.

    ``eta`` must be semisimple.  The caller asserts the generated group is
    torsion free and virtually unipotent; without that the search may
    exhaust every scheduled modulus (reported as ScheduleExhaustedError,
    never as impossibility).
    """
    n = _check_gl_generators(gamma_gens, eta.n)
    if eta.det() not in (1, -1):
        raise PreconditionError(f"eta has det {eta.det()}, not in GL(n,Z)")
    if not is_semisimple(eta.to_rational()):
        raise PreconditionError("eta is not semisimple")
    schedule = _validate_schedule(
        default_moduli_schedule() if moduli_schedule is None else moduli_schedule
    )
    for m in schedule:
        image = modgrp.generate([modgrp.reduce(g, m) for g in gamma_gens], cap, n=n, m=m)
        eta_mod = modgrp.reduce(eta, m)
        disjoint, cls = _probe_disjoint(image, _cc_index(image), eta_mod, cap)
        if disjoint:
            if cls is None:
                cls = modgrp.conj_class(eta_mod, cap)
            return SeparationCertificate(
                n=n,
                m=m,
                gamma_gens=tuple(gamma_gens),
                eta=eta,
                image_size=image.size,
                class_size=cls.size,
                image_digest=image.digest(),
                class_digest=cls.digest(),
            )
    raise ScheduleExhaustedError(
        f"no separating modulus found in schedule (largest tried: {schedule[-1]})",
        largest_tried=schedule[-1],
    )


def witness_prime(
    factor: RationalMatrix,
    gamma_gens: Sequence[IntegerMatrix],
    prime_schedule: Iterable[int] | None = None,
    level_budget: int = _SCHEDULE_MAX_LEVEL,
    *,
    cap: int = modgrp.DEFAULT_CAP,
) -> WitnessPrime:
    """A prime p (and level) at which ``factor`` escapes the group's image.

    A non-integral factor is witnessed by any prime dividing an entry
    denominator (the reduction does not even exist there); an integral one
    by a finite-level image-escape search over prime powers in ascending
    modulus order, consistent with the modulus schedule of the separation
    search.
    """
    if not is_semisimple(factor):
        raise PreconditionError("factor is not semisimple")
    primes = list(default_prime_schedule() if prime_schedule is None else prime_schedule)
    if not primes:
        raise InputError("prime schedule is empty")
    denom = factor.denominator_lcm()
    if denom > 1:
        p = min(p for p, _ in _factorize(denom))
        return WitnessPrime(factor=factor, prime=p, level=0, reason="denominator")
    n = factor.n
    _check_gl_generators(gamma_gens, n)
    levels = sorted(
        ((p**k, p, k) for p in primes for k in range(1, level_budget + 1))
    )
    for modulus, p, level in levels:
        image = modgrp.padic_level_image(gamma_gens, p, level, cap, n=n)
        if modgrp.reduce(factor, modulus) not in image:
            return WitnessPrime(
                factor=factor, prime=p, level=level, reason="image-escape"
            )
    raise ScheduleExhaustedError(
        f"no witness prime at levels <= {level_budget} for primes {primes}",
        largest_tried=levels[-1][0],
    )


def _factorize(x: int) -> list[tuple[int, int]]:
    out = []
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


def torsion_free_overgroup(
    gamma_gens: Sequence[IntegerMatrix],
    torsion_reps: Sequence[IntegerMatrix] | "TorsionTable",
    moduli_schedule: Iterable[int] | None = None,
    *,
    cap: int = modgrp.DEFAULT_CAP,
    n: int | None = None,
) -> TorsionFreeCertificate:
    """One modulus covering every torsion representative, as a certificate.

    Runs the per-representative separation search and combines the
    successes into their lcm, the joint modulus.  The congruence image is
    regenerated from scratch at the joint level; each representative's
    class evidence is recorded at its own success modulus (a divisor of the
    joint one), where disjointness is recomputed in full; classes at a
    composite joint level grow as the product over its prime-power parts
    and quickly become unenumerable, while divisor-level disjointness
    already forces joint-level disjointness.  Order-1 reps are recorded and
    skipped.
    """
    table_version = "custom"
    if isinstance(torsion_reps, TorsionTable):
        table_version = torsion_reps.version
        reps = list(torsion_reps.entries)
    else:
        reps = list(torsion_reps)
    if reps:
        n = _check_gl_generators(reps, n)
    n = _check_gl_generators(gamma_gens, n)
    orders = []
    for rep in reps:
        order = torsion_order(rep)
        if order is None:
            raise PreconditionError("torsion representative has infinite order")
        orders.append(order)
    schedule = _validate_schedule(
        default_moduli_schedule() if moduli_schedule is None else moduli_schedule
    )

    nontrivial = [(rep, order) for rep, order in zip(reps, orders) if order > 1]
    if not nontrivial:
        m = schedule[0]
        image = modgrp.generate([modgrp.reduce(g, m) for g in gamma_gens], cap, n=n, m=m)
        return TorsionFreeCertificate(
            n=n,
            m=m,
            gamma_gens=tuple(gamma_gens),
            torsion_reps=tuple(reps),
            image_size=image.size,
            image_digest=image.digest(),
            per_rep=(),
            table_version=table_version,
        )

    images: dict[int, modgrp.ModMatrixGroup] = {}
    indexes: dict[int, dict] = {}

    def image_at(m: int) -> modgrp.ModMatrixGroup:
        if m not in images:
            images[m] = modgrp.generate(
                [modgrp.reduce(g, m) for g in gamma_gens], cap, n=n, m=m
            )
            indexes[m] = _cc_index(images[m])
        return images[m]

    per_rep_moduli = []
    for rep, order in nontrivial:
        for m in schedule:
            image = image_at(m)
            rep_mod = modgrp.reduce(rep, m)
            disjoint, _ = _probe_disjoint(image, indexes[m], rep_mod, cap)
            if disjoint:
                per_rep_moduli.append(m)
                break
        else:
            raise ScheduleExhaustedError(
                f"no modulus in schedule separates a representative of order {order}"
                f" (largest tried: {schedule[-1]})",
                largest_tried=schedule[-1],
            )

    joint = lcm(*per_rep_moduli)
    image = image_at(joint)
    evidence = []
    for (rep, order), m_rep in zip(nontrivial, per_rep_moduli):
        cls = modgrp.conj_class(modgrp.reduce(rep, m_rep), cap)
        if not image_at(m_rep).elements.isdisjoint(cls.orbit):
            raise AssertionError(
                "per-representative modulus failed re-verification; the"
                " fail-fast probe and the full orbit disagree"
            )
        evidence.append(
            RepEvidence(
                rep=rep,
                order=order,
                modulus=m_rep,
                class_size=cls.size,
                class_digest=cls.digest(),
            )
        )
    return TorsionFreeCertificate(
        n=n,
        m=joint,
        gamma_gens=tuple(gamma_gens),
        torsion_reps=tuple(reps),
        image_size=image.size,
        image_digest=image.digest(),
        per_rep=tuple(evidence),
        table_version=table_version,
    )


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise MalformedCertificateError(message)


def parse_certificate(data: dict | str) -> SeparationCertificate | TorsionFreeCertificate:
    """Parse certificate JSON (dict or text) into its dataclass.

    Raises MalformedCertificateError on schema violations; unknown extra
    keys are tolerated (the schema fields alone carry the claims).
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedCertificateError(f"certificate is not valid JSON: {exc}") from exc
    _require(isinstance(data, dict), "certificate must be a JSON object")
    _require(data.get("version") == CERT_VERSION, "unsupported certificate version")
    kind = data.get("kind")
    _require(kind in ("separation", "torsion-free"), f"unknown certificate kind {kind!r}")
    try:
        n = data["n"]
        m = data["m"]
        gens = tuple(IntegerMatrix.from_json_dict(g) for g in data["gamma_gens"])
        _require(isinstance(n, int) and n >= 1, "n must be a positive integer")
        _require(isinstance(m, int) and m >= 2, "m must be an integer >= 2")
        if kind == "separation":
            cert: SeparationCertificate | TorsionFreeCertificate = SeparationCertificate(
                n=n,
                m=m,
                gamma_gens=gens,
                eta=IntegerMatrix.from_json_dict(data["eta"]),
                image_size=data["image_size"],
                class_size=data["class_size"],
                image_digest=data["image_digest"],
                class_digest=data["class_digest"],
                disjoint=data.get("disjoint", True),
            )
        else:
            per_rep = tuple(
                RepEvidence(
                    rep=IntegerMatrix.from_json_dict(e["rep"]),
                    order=e["order"],
                    modulus=e["modulus"],
                    class_size=e["class_size"],
                    class_digest=e["class_digest"],
                    disjoint=e.get("disjoint", True),
                )
                for e in data["per_rep"]
            )
            cert = TorsionFreeCertificate(
                n=n,
                m=m,
                gamma_gens=gens,
                torsion_reps=tuple(
                    IntegerMatrix.from_json_dict(r) for r in data["torsion_reps"]
                ),
                image_size=data["image_size"],
                image_digest=data["image_digest"],
                per_rep=per_rep,
                table_version=data["table_version"],
            )
    except (KeyError, TypeError, InputError) as exc:
        raise MalformedCertificateError(f"certificate schema violation: {exc}") from exc
    for g in cert.gamma_gens:
        _require(g.n == n, "generator dimension disagrees with n")
    if isinstance(cert, SeparationCertificate):
        _require(cert.eta.n == n, "target dimension disagrees with n")
    else:
        for rep in cert.torsion_reps:
            _require(rep.n == n, "representative dimension disagrees with n")
        for e in cert.per_rep:
            _require(e.rep.n == n, "evidence dimension disagrees with n")
            _require(
                isinstance(e.modulus, int) and e.modulus >= 2,
                "evidence modulus must be an integer >= 2",
            )
    return cert


def verify_certificate(
    cert: SeparationCertificate | TorsionFreeCertificate | dict | str,
    *,
    cap: int = modgrp.DEFAULT_CAP,
) -> bool:
    """Recompute every certificate field from scratch; True iff all match.

    Raises MalformedCertificateError for schema-level problems (as opposed
    to well-formed certificates that fail recomputation, which return
    False).
    """
    if isinstance(cert, (dict, str)):
        cert = parse_certificate(cert)
    n, m = cert.n, cert.m
    for g in cert.gamma_gens:
        if g.det() not in (1, -1):
            return False
    image = modgrp.generate(
        [modgrp.reduce(g, m) for g in cert.gamma_gens], cap, n=n, m=m
    )
    if image.size != cert.image_size or image.digest() != cert.image_digest:
        return False
    if isinstance(cert, SeparationCertificate):
        if not cert.disjoint:
            return False
        if cert.eta.n != n or cert.eta.det() not in (1, -1):
            return False
        if not is_semisimple(cert.eta.to_rational()):
            return False
        cls = modgrp.conj_class(modgrp.reduce(cert.eta, m), cap)
        if cls.size != cert.class_size or cls.digest() != cert.class_digest:
            return False
        return image.elements.isdisjoint(cls.orbit)
    recorded = {e.rep: e for e in cert.per_rep}
    divisor_images: dict[int, modgrp.ModMatrixGroup] = {}
    for rep in cert.torsion_reps:
        order = torsion_order(rep)
        if order is None:
            return False
        if order == 1:
            continue
        evidence = recorded.get(rep)
        if evidence is None or evidence.order != order or not evidence.disjoint:
            return False
        m_rep = evidence.modulus
        # divisor-level disjointness forces joint-level disjointness
        if m_rep < 2 or m % m_rep != 0:
            return False
        if m_rep not in divisor_images:
            divisor_images[m_rep] = modgrp.generate(
                [modgrp.reduce(g, m_rep) for g in cert.gamma_gens], cap, n=n, m=m_rep
            )
        cls = modgrp.conj_class(modgrp.reduce(rep, m_rep), cap)
        if cls.size != evidence.class_size or cls.digest() != evidence.class_digest:
            return False
        if not divisor_images[m_rep].elements.isdisjoint(cls.orbit):
            return False
    # evidence for reps not in the table would be meaningless
    return all(e.rep in cert.torsion_reps for e in cert.per_rep)


# ---------------------------------------------------------------------------
# torsion class tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionTable:
    """A complete set of torsion conjugacy class representatives.

    Completeness is a validated data asset, not a theorem in code: the
    representatives below were found by exhaustive bounded-entry enumeration
    and are screened by ``validate_torsion_table`` (every bounded-entry
    torsion element must be conjugate mod several moduli to some entry).
    """

    n: int
    version: str
    entries: tuple[IntegerMatrix, ...]


_TABLE_N1 = ((1,),), ((-1,),)

_TABLE_N2 = (
    ((1, 0), (0, 1)),          # identity
    ((-1, 0), (0, -1)),        # central involution
    ((1, 0), (0, -1)),         # reflection fixing an axis
    ((0, 1), (1, 0)),          # reflection swapping the axes
    ((0, -1), (1, -1)),        # order 3
    ((0, -1), (1, 0)),         # order 4
    ((0, -1), (1, 1)),         # order 6
)

_TABLE_N3 = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),        # identity
    ((-1, 0, 0), (0, -1, 0), (0, 0, -1)),     # central involution
    ((1, 0, 0), (0, 1, 0), (0, 0, -1)),       # order 2, fixed plane
    ((1, 0, 0), (0, -1, 0), (0, 0, -1)),      # order 2, fixed line
    ((1, 0, 0), (0, 0, 1), (0, 1, 0)),        # order 2, swap + fixed line
    ((-1, 0, 0), (0, 0, 1), (0, 1, 0)),       # order 2, swap + flipped line
    ((1, 0, 0), (0, 0, -1), (0, 1, -1)),      # order 3, split
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),        # order 3, cyclic coordinate shift
    ((1, 0, 0), (0, 0, -1), (0, 1, 0)),       # order 4, split, det 1
    ((-1, 0, 0), (0, 0, -1), (0, 1, 0)),      # order 4, split, det -1
    ((-1, -1, -1), (1, 1, 0), (1, 0, 1)),     # order 4, nonsplit, det 1
    ((-1, -1, -1), (0, 0, 1), (1, 0, 0)),     # order 4, nonsplit, det -1
    ((1, 0, 0), (0, 0, -1), (0, 1, 1)),       # order 6, split, det 1
    ((-1, 0, 0), (0, 0, -1), (0, 1, 1)),      # order 6, det -1
    ((-1, 0, 0), (0, 0, -1), (0, 1, -1)),     # order 6 (negated order-3 split)
    ((0, 0, -1), (-1, 0, 0), (0, -1, 0)),     # order 6 (negated coordinate shift)
)

_BUILTIN_TABLES = {
    1: ("builtin-n1-v1", _TABLE_N1),
    2: ("builtin-n2-v1", _TABLE_N2),
    3: ("builtin-n3-v1", _TABLE_N3),
}


def torsion_class_table(n: int) -> TorsionTable:
    """Built-in torsion class representatives for GL(n,Z), n in {1, 2, 3}.

    Each entry's finite order is re-verified at load time.
    """
    if n not in _BUILTIN_TABLES:
        raise InputError(f"no builtin torsion table for dimension {n}")
    version, raw = _BUILTIN_TABLES[n]
    entries = []
    for rows in raw:
        mat = IntegerMatrix(rows)
        if torsion_order(mat) is None:
            raise AssertionError("builtin table entry has infinite order")
        entries.append(mat)
    return TorsionTable(n=n, version=version, entries=tuple(entries))


def validate_torsion_table(
    n: int,
    bound: int = 3,
    moduli: Sequence[int] = (5, 7, 8, 9),
    table: TorsionTable | None = None,
) -> list[IntegerMatrix]:
    """Necessary-condition completeness screen for a torsion table.

    Enumerates every torsion element of GL(n,Z) with entries in
    [-bound, bound] and returns those NOT conjugate mod every listed modulus
    to some same-order table entry.  An empty list is a pass.  The screen is
    necessary, not sufficient: it can expose a missing class but cannot prove
    completeness.
    """
    import itertools

    from .exactlin import char_poly

    if table is None:
        table = torsion_class_table(n)
    buckets: dict[tuple, list[IntegerMatrix]] = {}
    for entry in table.entries:
        order = torsion_order(entry)
        if order is None:
            raise InputError("table entry has infinite order")
        buckets.setdefault((order, char_poly(entry)), []).append(entry)

    unmatched = []
    values = range(-bound, bound + 1)
    for flat in itertools.product(values, repeat=n * n):
        rows = [flat[i * n : (i + 1) * n] for i in range(n)]
        if _det_rows(rows) not in (1, -1):
            continue
        # torsion forces every eigenvalue onto the unit circle: |tr g^k| <= n
        trace = sum(rows[i][i] for i in range(n))
        if abs(trace) > n:
            continue
        sq_trace = sum(
            sum(rows[i][k] * rows[k][i] for k in range(n)) for i in range(n)
        )
        if abs(sq_trace) > n:
            continue
        g = IntegerMatrix(rows)
        order = torsion_order(g)
        if order is None:
            continue
        candidates = buckets.get((order, char_poly(g)), [])
        if not any(
            all(modgrp.is_conjugate_mod(g, t, m) for m in moduli) for t in candidates
        ):
            unmatched.append(g)
    return unmatched


def _det_rows(rows: Sequence[Sequence[int]]) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return IntegerMatrix(rows).det()
