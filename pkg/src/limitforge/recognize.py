"""Recognition procedures: is the presented group a limit group, or free?

Two semi-decisions race under a shared step budget.  The positive
branch walks the recursive enumeration of limit-group presentations,
Tietze-expanding candidates and matching the input up to renaming.
The negative branch hunts for a finite witness set whose defining
universal sentence holds over free groups, so that no homomorphism to
a free group can keep every witness element alive.  Either branch can
win; exhausting the budget yields Unknown.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .freegroup import FreeGroup
from .ice import LimitEnumeration, LimitGroupEmission, ice_oracle
from .oracles import WordOracle, pinched_oracle
from .presentation import (
    NormalizeCapError,
    Presentation,
    abelianization,
    enumerate_presentations,
    normalize_key,
    serialize,
    substitute,
    tietze_simplify,
)
from .words import Word, commutator, validate_word, words_of_length, words_upto

_QUANTUM = 128
_CROSSCHECK_BOUND = 2


# ---------------------------------------------------------------------------
# Universal sentences and their bounded refutation


@dataclass(frozen=True)
class Sentence:
    """A universal sentence over free groups: whenever every equation
    word evaluates to 1, at least one inequation word must too."""

    variables: tuple[str, ...]
    equations: tuple[Word, ...]
    inequations: tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "inequations", tuple(self.inequations))
        n = len(self.variables)
        for w in self.equations + self.inequations:
            validate_word(w, n)


def refute_sentence(s: Sentence, bound: int, target_rank: int = 2):
    """Exhaustively try assignments of reduced words of length <= bound
    to the variables, into a free group of target_rank.

    Returns the first assignment (a Word per variable) sending every
    equation to 1 and no inequation to 1, or None when no assignment
    within the bound does.  A returned assignment disproves the
    sentence; None is only a bounded guarantee.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    pool = list(words_upto(target_rank, bound))
    for assign in itertools.product(pool, repeat=len(s.variables)):
        ok = True
        for g in s.inequations:
            if not substitute(g, assign).ints:
                ok = False
                break
        if not ok:
            continue
        for e in s.equations:
            if substitute(e, assign).ints:
                ok = False
                break
        if ok:
            return assign
    return None


# ---------------------------------------------------------------------------
# Witnesses


_SCHEMAS = ("torsion", "inversion", "commutation-transitivity")


@dataclass(frozen=True)
class Witness:
    """Finitely many wp-nontrivial elements that cannot all survive a
    homomorphism to a free group, given the presented relations.

    `data` holds the certificate backing the kind: a, b, c for
    commutation transitivity, g and the exponent n for torsion, g and
    the conjugator h for inversion.  External witnesses carry a
    "schema" entry naming which of the three shapes justifies them.
    """

    elements: tuple[Word, ...]
    kind: str
    data: dict = field(default_factory=dict)


def _witness_checks(w: Witness):
    """The (must-be-trivial, must-be-nontrivial) word lists for a witness."""
    kind = w.kind
    data = w.data
    if kind == "external":
        kind = data.get("schema")
    if kind == "torsion":
        g, n = data["g"], data["n"]
        if n < 2:
            raise ValueError("torsion certificate needs an exponent >= 2")
        return (g**n,), (g,)
    if kind == "inversion":
        g, h = data["g"], data["h"]
        return (h * g * h.inv() * g,), (g,)
    if kind == "commutation-transitivity":
        a, b, c = data["a"], data["b"], data["c"]
        return (commutator(a, b), commutator(b, c)), (b, commutator(a, c))
    raise ValueError(f"unknown witness kind {w.kind!r}")


def witness_sentence(p: Presentation, w: Witness) -> Sentence:
    """The sentence a witness claims: the relators force some element of
    the witness set to die in every free image."""
    return Sentence(p.names, p.relators, w.elements)


def check_witness(p: Presentation, wp: WordOracle, w: Witness):
    """Re-verify a witness against the oracle.  True when the schema's
    premises are trivial and the elements nontrivial; None if the
    oracle cannot decide some check."""
    triv, nontriv = _witness_checks(w)
    if {x.ints for x in w.elements} != {x.ints for x in nontriv}:
        return False
    for x in triv + nontriv:
        validate_word(x, p.rank)
    out = True
    for x in triv:
        v = wp(x)
        if v is None:
            out = None
        elif v is not True:
            return False
    for x in nontriv:
        v = wp(x)
        if v is None:
            out = None
        elif v is not False:
            return False
    return out


def external_witness(p: Presentation, wp: WordOracle, schema: str, **data) -> Witness:
    """Wrap user-supplied certificate data as a witness.

    The justification must fit one of the shipped schemas; the premises
    are checked against wp and the claim is cross-checked by bounded
    refutation before the witness is accepted.
    """
    if schema not in _SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}")
    probe = Witness((), "external", {"schema": schema, **data})
    _, nontriv = _witness_checks(probe)
    w = Witness(tuple(nontriv), "external", {"schema": schema, **data})
    if check_witness(p, wp, w) is not True:
        raise ValueError("certificate data fails its word-problem checks")
    if refute_sentence(witness_sentence(p, w), _CROSSCHECK_BOUND) is not None:
        raise ValueError("certificate is refuted over the free group")
    return w


class CertifySearch:
    """Resumable fair hunt for a witness.

    Candidates are ordered by total certificate length and charged that
    length in budget units, so deep tiers cannot starve a competing
    branch running under the same budget.
    """

    def __init__(self, p: Presentation, wp: WordOracle):
        self.p = p
        self.wp = wp
        self.spent = 0
        self.candidates = 0
        self.max_cost = 0
        self.found: Witness | None = None
        self._gen = self._stream()

    def run(self, units: int) -> Witness | None:
        """Spend up to `units` cost units; returns the witness if found."""
        if self.found is not None:
            return self.found
        stop = self.spent + units
        while self.spent < stop:
            w = next(self._gen)
            if w is not None:
                self.found = w
                return w
        return None

    def _stream(self):
        rank = self.p.rank
        if rank == 0:
            while True:
                self.spent += 1
                yield None
        for cost in itertools.count(2):
            self.max_cost = cost
            for lg in range(1, cost):
                n = cost - lg + 1
                for g in words_of_length(rank, lg):
                    self.spent += cost
                    self.candidates += 1
                    yield self._torsion(g, n)
            for la in range(1, cost - 1):
                for lb in range(1, cost - la):
                    lc = cost - la - lb
                    for a in words_of_length(rank, la):
                        for b in words_of_length(rank, lb):
                            for c in words_of_length(rank, lc):
                                self.spent += cost
                                self.candidates += 1
                                yield self._ct(a, b, c)
            for lg in range(1, cost):
                lh = cost - lg
                for g in words_of_length(rank, lg):
                    for h in words_of_length(rank, lh):
                        self.spent += cost
                        self.candidates += 1
                        yield self._inversion(g, h)

    def _torsion(self, g: Word, n: int):
        wp = self.wp
        if wp(g) is not False or wp(g**n) is not True:
            return None
        return self._accept(Witness((g,), "torsion", {"g": g, "n": n}))

    def _ct(self, a: Word, b: Word, c: Word):
        wp = self.wp
        if wp(b) is not False:
            return None
        if wp(commutator(a, b)) is not True or wp(commutator(b, c)) is not True:
            return None
        gac = commutator(a, c)
        if wp(gac) is not False:
            return None
        witness = Witness(
            (b, gac), "commutation-transitivity", {"a": a, "b": b, "c": c}
        )
        return self._accept(witness)

    def _inversion(self, g: Word, h: Word):
        wp = self.wp
        if wp(g) is not False or wp(h * g * h.inv() * g) is not True:
            return None
        return self._accept(Witness((g,), "inversion", {"g": g, "h": h}))

    def _accept(self, w: Witness) -> Witness:
        bad = refute_sentence(witness_sentence(self.p, w), _CROSSCHECK_BOUND)
        if bad is not None:
            raise RuntimeError(
                f"unsound {w.kind} witness: assignment {bad} survives the relators"
            )
        return w


def certify_witness(p: Presentation, wp: WordOracle, budget: int = 10**6):
    """Bounded witness hunt; None means nothing within the budget."""
    return CertifySearch(p, wp).run(budget)


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Limit:
    """Positive verdict: the input matches an enumerated limit-group
    presentation.  `matched` is the Tietze variant of the emission that
    equals the simplified input up to renaming."""

    presentation: Presentation
    matched: Presentation
    emission: LimitGroupEmission
    report: dict

    def reverify(self) -> bool:
        """Re-check the witness chain: the retraction equations against a
        fresh tower oracle, the torsion-free abelianization, and the
        renaming match against the simplified input."""
        em = self.emission
        if em.result.witness.verify(ice_oracle(em.tower)) is not True:
            return False
        if abelianization(em.presentation)[1]:
            return False
        target, _ = tietze_simplify(self.presentation)
        try:
            return normalize_key(self.matched) == normalize_key(target)
        except NormalizeCapError:
            return False


@dataclass(frozen=True)
class NotLimit:
    """Negative verdict, backed by a witness."""

    presentation: Presentation
    witness: Witness
    report: dict

    def reverify(self, wp: WordOracle) -> bool:
        if check_witness(self.presentation, wp, self.witness) is not True:
            return False
        s = witness_sentence(self.presentation, self.witness)
        return refute_sentence(s, _CROSSCHECK_BOUND) is None


@dataclass(frozen=True)
class Unknown:
    """The budget ran out before either branch reached a verdict."""

    presentation: Presentation
    report: dict


@dataclass(frozen=True)
class Free:
    """The input Tietze-reduces to a presentation with no relators."""

    presentation: Presentation
    free_presentation: Presentation
    report: dict


@dataclass(frozen=True)
class NotFree:
    """A certificate rules freeness out; `witness` is set when the
    certificate is a recognition witness rather than an abelian one."""

    presentation: Presentation
    reason: str
    witness: Witness | None
    report: dict


# ---------------------------------------------------------------------------
# The positive branch


class _MatchBranch:
    """Walks the limit-group enumeration hunting the target presentation.

    Every emission is checked directly for a renaming match; emissions
    whose abelianization invariants agree with the target also spawn a
    Tietze expander, and the expanders are advanced round-robin with
    the leftover allowance of each slice.
    """

    EXPAND_WEIGHT = 8  # one presentation-enumeration node ~ this many steps

    def __init__(self, target: Presentation):
        self.target = target
        try:
            self._key = normalize_key(target)
        except NormalizeCapError:
            self._key = None
        self._ab = abelianization(target)
        self.enum = LimitEnumeration()
        self._expanders: list[tuple[LimitGroupEmission, object]] = []
        self._seen: set[str] = set()
        self._cursor = 0
        self.emissions = 0
        self.expanded = 0

    @property
    def matchable(self) -> bool:
        return self._key is not None

    def run(self, allowance: int):
        """One enumeration round plus expander work; returns
        (units used, hit or None) where a hit is (emission, matched)."""
        if self._key is None:
            return 0, None
        before = self.enum.steps
        for em in self.enum.next_round():
            self.emissions += 1
            hit = self._admit(em)
            if hit is not None:
                return self.enum.steps - before, hit
        used = self.enum.steps - before
        while used < allowance and self._expanders:
            used += self.EXPAND_WEIGHT
            hit = self._advance_one()
            if hit is not None:
                return used, hit
        return used, None

    def _admit(self, em: LimitGroupEmission):
        pres = em.presentation
        if pres.rank <= 6 and normalize_key(pres) == self._key:
            return (em, pres)
        if abelianization(pres) == self._ab:
            text = serialize(pres)
            if text not in self._seen:
                self._seen.add(text)
                gen = enumerate_presentations(pres)
                next(gen)  # the first yield is pres itself, checked above
                self._expanders.append((em, gen))
        return None

    def _advance_one(self):
        i = self._cursor % len(self._expanders)
        self._cursor += 1
        em, gen = self._expanders[i]
        v = next(gen)
        self.expanded += 1
        if v.rank <= 6 and normalize_key(v) == self._key:
            return (em, v)
        return None


def _report(budget, used: int, a: _MatchBranch | None, b: CertifySearch) -> dict:
    out = {
        "budget": budget,
        "used": used,
        "certify": {
            "spent": b.spent,
            "candidates": b.candidates,
            "max_cost": b.max_cost,
        },
    }
    if a is not None:
        out["enumeration"] = {
            "rounds": a.enum.round,
            "steps": a.enum.steps,
            "emissions": a.emissions,
            "expanders": len(a._expanders),
            "expanded": a.expanded,
            "matchable": a.matchable,
        }
    return out


# ---------------------------------------------------------------------------
# Recognition drivers


def _require_total(wp: WordOracle, caller: str) -> None:
    if not isinstance(wp, WordOracle) or not wp.total:
        raise ValueError(f"{caller} requires a total word-problem oracle")


def recognize_limit(p: Presentation, wp: WordOracle, budget: int | None = 10**7):
    """Decide whether p presents a limit group, within a step budget.

    The enumeration branch and the witness branch alternate in strict
    round-robin slices of matched size.  A match in the enumeration
    yields Limit with its construction chain; a witness yields
    NotLimit.  budget=None runs until one branch halts, which on a
    group that is neither enumerable-early nor witnessed never happens.
    """
    _require_total(wp, "recognize_limit")
    target, _ = tietze_simplify(p)
    a = _MatchBranch(target)
    b = CertifySearch(p, wp)
    used = 0
    while budget is None or used < budget:
        used_a, hit = a.run(_QUANTUM)
        used += used_a
        if hit is not None:
            em, matched = hit
            return Limit(p, matched, em, _report(budget, used, a, b))
        if budget is not None and used >= budget:
            break
        quantum = max(used_a, _QUANTUM)
        if budget is not None:
            quantum = min(quantum, budget - used)
        before = b.spent
        w = b.run(quantum)
        used += b.spent - before
        if w is not None:
            return NotLimit(p, w, _report(budget, used, a, b))
    return Unknown(p, _report(budget, used, a, b))


def recognize_free(p: Presentation, wp: WordOracle, budget: int | None = 10**6):
    """Decide whether p presents a free group, desk scale.

    Instant certificates first: relator-free after simplification means
    Free; torsion in the abelianization, or commuting generators with
    abelianization rank at least 2, mean NotFree.  Otherwise a hunt for
    a relator-free Tietze variant races the witness search.
    """
    _require_total(wp, "recognize_free")
    simplified, _ = tietze_simplify(p)
    if not simplified.relators:
        report = {"budget": budget, "used": 0, "certificate": "tietze"}
        return Free(p, simplified, report)
    ab_rank, torsion = abelianization(p)
    if torsion:
        report = {"budget": budget, "used": 0, "certificate": "abelianization"}
        return NotFree(p, "torsion in abelianization", None, report)
    if ab_rank >= 2 and _generators_commute(p, wp):
        report = {"budget": budget, "used": 0, "certificate": "abelian"}
        return NotFree(p, "abelian and noncyclic", None, report)
    stream = enumerate_presentations(simplified)
    b = CertifySearch(p, wp)
    weight = _MatchBranch.EXPAND_WEIGHT
    used = 0
    while budget is None or used < budget:
        for _ in range(max(1, _QUANTUM // weight)):
            v = next(stream)
            used += weight
            if not v.relators:
                report = {"budget": budget, "used": used, "certificate": "tietze"}
                return Free(p, v, report)
        if budget is not None and used >= budget:
            break
        quantum = _QUANTUM
        if budget is not None:
            quantum = min(quantum, budget - used)
        before = b.spent
        w = b.run(quantum)
        used += b.spent - before
        if w is not None:
            return NotFree(p, f"witness: {w.kind}", w, _report(budget, used, None, b))
    return Unknown(p, _report(budget, used, None, b))


def _generators_commute(p: Presentation, wp: WordOracle) -> bool:
    for i in range(1, p.rank + 1):
        for j in range(i + 1, p.rank + 1):
            if wp(commutator(Word((i,)), Word((j,)))) is not True:
                return False
    return True


def recognize_cyclically_pinched(
    rank1: int,
    rank2: int,
    u: Word,
    v: Word,
    budget: int | None = 10**7,
):
    """Recognition for an amalgam of two free groups over cyclic
    subgroups generated by u and v.

    Builds the one-relator presentation gluing u to v, equips it with
    the built-in amalgam oracle, and runs recognize_limit.
    """
    if rank1 < 1 or rank2 < 1:
        raise ValueError("both free factors need positive rank")
    validate_word(u, rank1)
    validate_word(v, rank2)
    if not u.ints or not v.ints:
        raise ValueError("edge words must be nontrivial")
    names = FreeGroup.standard(rank1 + rank2).names
    shifted = Word(tuple(x + rank1 if x > 0 else x - rank1 for x in v.ints))
    p = Presentation(names, (u * shifted.inv(),))
    wp = pinched_oracle(rank1, rank2, u, shifted)
    return recognize_limit(p, wp, budget)
