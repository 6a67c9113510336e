"""Iterated centralizer extensions over free groups.

A tower records a base free group and a sequence of extension steps;
step k adjoins a free abelian factor commuting with the centralizer of
a chosen element.  Because each level is an amalgam over that
centralizer, words reduce by pinching edge-group syllables through the
abelian side, which yields a total word problem, an element
classification (conjugate into a noncyclic maximal abelian subgroup or
not), and centralizer bases.  On top of those sit two fair streams:
all towers, and presentations of all finitely generated subgroups of
tower groups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .freegroup import FreeGroup, primitive_root
from .oracles import WordOracle
from .presentation import Presentation
from .retracts import (
    RetractionSearch,
    SubgroupPresentationResult,
    present_from_retraction,
    subgroup_presentation_lr,
)
from .words import (
    EMPTY,
    Word,
    commutator,
    parse_word,
    validate_word,
    words_of_length,
    words_upto,
)

_EXT_POOL = "tuvwxyz"

# caps for the two bounded searches (conjugators into a cyclic edge
# group, and edge corrections during root extraction)
_RESIDUAL_LEN = 3
_ROOT_GRID = 2


@dataclass(frozen=True)
class ExtensionStep:
    """One centralizer extension: adjoin Z^n commuting with Z(g)."""

    g: Word
    n: int
    names: tuple[str, ...]
    basis: tuple[Word, ...]


@dataclass(frozen=True)
class IceTower:
    base_rank: int
    steps: tuple[ExtensionStep, ...] = ()

    def __post_init__(self):
        if self.base_rank < 1:
            raise ValueError("base rank must be positive")
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def rank(self) -> int:
        return self.base_rank + sum(s.n for s in self.steps)

    def lower(self) -> "IceTower":
        if not self.steps:
            raise ValueError("the base tower has no lower level")
        return IceTower(self.base_rank, self.steps[:-1])


def _fresh_ext_names(used: set, n: int) -> tuple[str, ...]:
    out: list[str] = []
    i = 0
    while len(out) < n:
        name = _EXT_POOL[i] if i < len(_EXT_POOL) else f"t{i - len(_EXT_POOL) + 1}"
        i += 1
        if name not in used:
            used.add(name)
            out.append(name)
    return tuple(out)


@lru_cache(maxsize=None)
def tower_names(t: IceTower) -> tuple[str, ...]:
    names = list(FreeGroup.standard(t.base_rank).names)
    for step in t.steps:
        names.extend(step.names)
    return tuple(names)


@lru_cache(maxsize=None)
def presentation_of(t: IceTower) -> Presentation:
    """Amalgam presentation: new generators commute with the step basis."""
    relators = []
    offset = t.base_rank
    for step in t.steps:
        tees = [Word((offset + i + 1,)) for i in range(step.n)]
        for tee in tees:
            for c in step.basis:
                relators.append(commutator(tee, c))
        for i in range(step.n):
            for j in range(i + 1, step.n):
                relators.append(commutator(tees[i], tees[j]))
        offset += step.n
    return Presentation(tower_names(t), relators)


# ---------------------------------------------------------------------------
# Syllable pinching over the top amalgam

_LOW, _BEE = 0, 1


class _Syl:
    __slots__ = ("kind", "word", "vec")

    def __init__(self, kind: int, word: Word, vec):
        self.kind = kind
        self.word = word  # for _BEE: the edge-group part, in order
        self.vec = vec  # _BEE only: exponents of the step generators


def _split_syllables(ints, lo: int, n: int) -> list[_Syl]:
    syls: list[_Syl] = []
    for x in ints:
        if abs(x) <= lo:
            if syls and syls[-1].kind == _LOW:
                syls[-1].word = syls[-1].word * Word((x,))
            else:
                syls.append(_Syl(_LOW, Word((x,)), None))
        else:
            if not syls or syls[-1].kind != _BEE:
                syls.append(_Syl(_BEE, EMPTY, [0] * n))
            i = abs(x) - lo - 1
            syls[-1].vec[i] += 1 if x > 0 else -1
    return syls


def _tee_word(vec, lo: int) -> Word:
    out: list[int] = []
    for i, e in enumerate(vec):
        letter = lo + i + 1
        out.extend([letter if e > 0 else -letter] * abs(e))
    return Word.make(out)


def _syl_word(s: _Syl, lo: int) -> Word:
    if s.kind == _LOW:
        return s.word
    return s.word * _tee_word(s.vec, lo)


def _pinch(t: IceTower, w: Word, cyclic: bool):
    """Reduce w to an alternating normal form over the top amalgam.

    Returns (syllables, conjugator); with cyclic=True the form is also
    cyclically reduced and conj^-1 * w * conj equals the returned word.
    """
    top = t.steps[-1]
    lo = t.rank - top.n
    low = t.lower()

    def in_edge(u: Word) -> bool:
        return _wp(low, commutator(u, top.g).ints)

    syls = _split_syllables(w.ints, lo, top.n)
    conj = EMPTY
    while True:
        changed = True
        while changed:
            changed = False
            i = 0
            while i < len(syls):
                s = syls[i]
                if s.kind == _BEE and not any(s.vec):
                    s.kind = _LOW
                    s.vec = None
                    changed = True
                    continue
                if s.kind == _LOW and not s.word.ints:
                    del syls[i]
                    changed = True
                    continue
                if i + 1 < len(syls) and syls[i + 1].kind == s.kind:
                    nxt = syls[i + 1]
                    if s.kind == _LOW:
                        s.word = s.word * nxt.word
                    else:
                        s.word = s.word * nxt.word
                        s.vec = [a + b for a, b in zip(s.vec, nxt.vec)]
                    del syls[i + 1]
                    changed = True
                    continue
                i += 1
            if changed:
                continue
            for i, s in enumerate(syls):
                if s.kind != _LOW:
                    continue
                left = i > 0 and syls[i - 1].kind == _BEE
                right = i + 1 < len(syls) and syls[i + 1].kind == _BEE
                if (left or right) and in_edge(s.word):
                    # edge elements commute with the step generators
                    if left:
                        syls[i - 1].word = syls[i - 1].word * s.word
                    else:
                        syls[i + 1].word = s.word * syls[i + 1].word
                    del syls[i]
                    changed = True
                    break
        if not cyclic or len(syls) < 2:
            break
        first, last = syls[0], syls[-1]
        if first.kind == last.kind:
            conj = conj * _syl_word(first, lo)
            syls.append(syls.pop(0))
            continue
        if first.kind == _LOW and in_edge(first.word):
            conj = conj * first.word
            syls.append(syls.pop(0))
            continue
        if last.kind == _LOW and in_edge(last.word):
            conj = conj * last.word.inv()
            syls.insert(0, syls.pop())
            continue
        break
    return syls, conj


@lru_cache(maxsize=None)
def _wp(t: IceTower, ints: tuple[int, ...]) -> bool:
    if not t.steps:
        return not Word.make(ints).ints
    top = t.steps[-1]
    lo = t.rank - top.n
    if all(abs(x) <= lo for x in ints):
        return _wp(t.lower(), ints)
    syls, _ = _pinch(t, Word.make(ints), cyclic=False)
    if not syls:
        return True
    if len(syls) > 1:
        return False
    s = syls[0]
    if s.kind == _BEE:
        return False
    return _wp(t.lower(), s.word.ints)


def wp_ice(t: IceTower, w: Word) -> bool:
    """Total word-problem decision; True means w is trivial in the tower."""
    validate_word(w, t.rank)
    return _wp(t, w.ints)


def ice_oracle(t: IceTower) -> WordOracle:
    return WordOracle(lambda w: wp_ice(t, w), True, "ice")


# ---------------------------------------------------------------------------
# Classification and centralizers


@dataclass(frozen=True)
class Classification:
    kind: str  # "parabolic" | "hyperbolic"
    level: int | None = None  # 1-based step index of the abelian subgroup
    conjugator: Word | None = None  # h with h^-1 g h inside that subgroup


@lru_cache(maxsize=None)
def _edge_class(t: IceTower) -> Classification:
    return _classify(t.lower(), t.steps[-1].g)


def _classify(t: IceTower, w: Word) -> Classification:
    if not t.steps:
        return Classification("hyperbolic")
    top = t.steps[-1]
    lo = t.rank - top.n
    if all(abs(x) <= lo for x in w.ints):
        return _under_top(t, w, EMPTY)
    syls, conj = _pinch(t, w, cyclic=True)
    if len(syls) >= 2:
        return Classification("hyperbolic")
    s = syls[0]
    if s.kind == _BEE:
        return Classification("parabolic", len(t.steps), conj)
    return _under_top(t, s.word, conj)


def _under_top(t: IceTower, u: Word, conj: Word) -> Classification:
    """Classify a word from the level below inside the extended tower."""
    top = t.steps[-1]
    low = t.lower()
    k = len(t.steps)
    if _wp(low, commutator(u, top.g).ints):
        # u centralizes g, so it sits inside the extended subgroup itself
        return Classification("parabolic", k, conj)
    sub = _classify(low, u)
    if sub.kind == "parabolic":
        edge = _edge_class(t)
        if edge.kind == "parabolic" and edge.level == sub.level:
            # same maximal abelian iff the conjugators differ by a member
            x = edge.conjugator.inv() * sub.conjugator
            probe = low.steps[sub.level - 1].basis[0]
            if _wp(low, commutator(x, probe).ints):
                h = conj * sub.conjugator * edge.conjugator.inv()
                return Classification("parabolic", k, h)
        return Classification("parabolic", sub.level, conj * sub.conjugator)
    if len(top.basis) == 1:
        for c in words_upto(t.rank - top.n, _RESIDUAL_LEN):
            if _wp(low, commutator(c.inv() * u * c, top.g).ints):
                return Classification("parabolic", k, conj * c)
    return Classification("hyperbolic")


def classify_element(t: IceTower, w: Word) -> Classification:
    """Parabolic (conjugate into a noncyclic maximal abelian) or hyperbolic."""
    validate_word(w, t.rank)
    if _wp(t, w.ints):
        raise ValueError("cannot classify the identity")
    return _classify(t, w)


def _edge_corrections(t: IceTower):
    """Small edge-group elements, identity first, for root candidates."""
    basis = t.steps[-1].basis[:3]
    vecs = sorted(
        itertools.product(range(-_ROOT_GRID, _ROOT_GRID + 1), repeat=len(basis)),
        key=lambda v: (max(map(abs, v), default=0), v),
    )
    for v in vecs:
        w = EMPTY
        for b, e in zip(basis, v):
            w = w * b**e
        yield w


def _max_root(t: IceTower, w: Word) -> tuple[Word, int]:
    """Maximal root of a hyperbolic word: (r, e) with r^e = w."""
    if not t.steps:
        return primitive_root(w)
    top = t.steps[-1]
    lo = t.rank - top.n
    if all(abs(x) <= lo for x in w.ints):
        return _max_root(t.lower(), w)
    syls, conj = _pinch(t, w, cyclic=True)
    if len(syls) == 1:
        if syls[0].kind == _BEE:
            raise ValueError("root extraction expects a hyperbolic word")
        root, e = _max_root(t.lower(), syls[0].word)
        return conj * root * conj.inv(), e
    core = EMPTY
    for s in syls:
        core = core * _syl_word(s, lo)
    count = len(syls)
    for d in range(2, count, 2):
        if count % d:
            continue
        e = count // d
        prefix = EMPTY
        for s in syls[:d]:
            prefix = prefix * _syl_word(s, lo)
        for delta in _edge_corrections(t):
            cands = [prefix * delta]
            if delta.ints:
                cands.append(delta * prefix)
            for cand in cands:
                if cand.ints and _wp(t, (cand**e * core.inv()).ints):
                    root, e2 = _max_root(t, cand)
                    return conj * root * conj.inv(), e * e2
    return conj * core * conj.inv(), 1


def centralizer_ice(t: IceTower, w: Word) -> tuple[Word, ...]:
    """Free abelian basis of the centralizer of a nontrivial word."""
    validate_word(w, t.rank)
    if _wp(t, w.ints):
        raise ValueError("the identity centralizes everything")
    cls = _classify(t, w)
    if cls.kind == "hyperbolic":
        root, _ = _max_root(t, w)
        return (root,)
    step = t.steps[cls.level - 1]
    start = t.base_rank + sum(s.n for s in t.steps[: cls.level - 1])
    h = cls.conjugator
    members = list(step.basis)
    members += [Word((start + i + 1,)) for i in range(step.n)]
    return tuple(h * m * h.inv() for m in members)


def extend_centralizer(t: IceTower, g: Word, n: int) -> IceTower:
    validate_word(g, t.rank)
    if n < 1:
        raise ValueError("the abelian factor needs positive rank")
    if _wp(t, g.ints):
        raise ValueError("cannot extend the centralizer of the identity")
    basis = centralizer_ice(t, g)
    used = set(tower_names(t))
    names = _fresh_ext_names(used, n)
    return IceTower(t.base_rank, t.steps + (ExtensionStep(g, n, names, basis),))


# ---------------------------------------------------------------------------
# Tower file format


def tower_to_json(t: IceTower) -> dict:
    steps = []
    partial = IceTower(t.base_rank)
    from .words import format_word

    for step in t.steps:
        steps.append({"g": format_word(step.g, tower_names(partial)), "n": step.n})
        partial = extend_centralizer(partial, step.g, step.n)
    return {"base_rank": t.base_rank, "steps": steps}


def tower_from_json(data: dict) -> IceTower:
    t = IceTower(int(data["base_rank"]))
    for item in data.get("steps", ()):
        g = parse_word(item["g"], tower_names(t))
        t = extend_centralizer(t, g, int(item["n"]))
    return t


# ---------------------------------------------------------------------------
# Enumeration of towers and of limit-group presentations


def enumerate_ice():
    """Fair stream of (tower, presentation).

    Order: ascending total size (base rank plus, per step, the rank of
    the abelian factor plus the length of the centralized word), ties by
    base rank, then by step shape with shorter centralized words first.
    """
    cost = 0
    while True:
        cost += 1
        for base in range(1, cost + 1):
            yield from _towers_rec(IceTower(base), cost - base)


def _towers_rec(t: IceTower, rem: int):
    if rem == 0:
        yield (t, presentation_of(t))
        return
    for s in range(2, rem + 1):
        if rem - s == 1:
            continue  # no step costs 1, the branch cannot finish
        for glen in range(1, s):
            n = s - glen
            for g in words_of_length(t.rank, glen):
                if _wp(t, g.ints):
                    continue
                yield from _towers_rec(extend_centralizer(t, g, n), rem - s)


def subgroup_presentation_limit(
    t: IceTower,
    s_words,
    budget: int = 200_000,
    conformance_tietze: bool = False,
):
    """Presentation of the subgroup of a tower generated by S."""
    return subgroup_presentation_lr(
        presentation_of(t),
        s_words,
        budget,
        oracle=ice_oracle(t),
        conformance_tietze=conformance_tietze,
    )


def _subset_stream(rank: int):
    """All finite sets of nonempty words, by total length, then count
    descending (many short generators before few long ones), then pool
    order."""
    yield ()
    total = 0
    while True:
        total += 1
        pool = [w for w in words_upto(rank, total) if w.ints]
        for count in range(total, 0, -1):
            yield from _pick_words(pool, 0, count, total)


def _pick_words(pool, start: int, count: int, total: int):
    if count == 0:
        if total == 0:
            yield ()
        return
    for i in range(start, len(pool)):
        w = pool[i]
        if len(w.ints) > total - (count - 1):
            break  # pool is sorted by length; nothing later fits
        for rest in _pick_words(pool, i + 1, count - 1, total - len(w.ints)):
            yield (w,) + rest


@dataclass(frozen=True)
class LimitGroupEmission:
    presentation: Presentation
    tower: IceTower
    s_words: tuple[Word, ...]
    result: SubgroupPresentationResult


class LimitEnumeration:
    """Dovetail towers against generating sets, emitting presentations.

    Pair (i, j) enters in the round numbered i + ceil(j / 8).  A fresh
    pair's retraction search gets `fresh_steps`; unfinished pairs get
    `round_steps` more each later round, so every pair eventually
    receives an unbounded budget while rounds stay linear in the number
    of pending pairs.
    """

    S_PER_UNIT = 8

    def __init__(self, fresh_steps: int = 256, round_steps: int = 64):
        self._ice = enumerate_ice()
        self._towers: list[IceTower] = []
        self._oracles: list[WordOracle] = []
        self._streams: list = []
        self._subsets: list[list] = []
        self._pairs: list[dict] = []
        self.round = 0
        self.steps = 0
        self.fresh_steps = fresh_steps
        self.round_steps = round_steps

    def _tower(self, i: int) -> IceTower:
        while len(self._towers) < i:
            t, _ = next(self._ice)
            self._towers.append(t)
            self._oracles.append(ice_oracle(t))
            self._streams.append(_subset_stream(t.rank))
            self._subsets.append([])
        return self._towers[i - 1]

    def _subset(self, i: int, j: int):
        subs = self._subsets[i - 1]
        while len(subs) <= j:
            subs.append(next(self._streams[i - 1]))
        return subs[j]

    def next_round(self) -> list[LimitGroupEmission]:
        self.round += 1
        for i in range(1, self.round + 1):
            q = self.round - i
            if q == 0:
                js = [0]
            else:
                per = self.S_PER_UNIT
                js = range(per * (q - 1) + 1, per * q + 1)
            for j in js:
                tower = self._tower(i)
                s = self._subset(i, j)
                self._pairs.append(
                    {
                        "tower": tower,
                        "oracle": self._oracles[i - 1],
                        "s": s,
                        "search": RetractionSearch(
                            presentation_of(tower), s, self._oracles[i - 1]
                        ),
                        "fresh": True,
                    }
                )
        out: list[LimitGroupEmission] = []
        keep: list[dict] = []
        for pair in self._pairs:
            steps = self.fresh_steps if pair["fresh"] else self.round_steps
            pair["fresh"] = False
            before = pair["search"].steps
            found = pair["search"].run(steps)
            self.steps += pair["search"].steps - before
            if found is None:
                keep.append(pair)
                continue
            res = present_from_retraction(pair["s"], found, pair["oracle"])
            if isinstance(res, SubgroupPresentationResult):
                out.append(
                    LimitGroupEmission(
                        res.presentation, pair["tower"], tuple(pair["s"]), res
                    )
                )
        self._pairs = keep
        return out


def enumerate_limit_groups():
    """Fair stream of limit-group presentations, each from a verified
    (tower, generating set, retraction) witness."""
    enum = LimitEnumeration()
    while True:
        for emission in enum.next_round():
            yield emission.presentation
