"""Retraction search onto finitely generated subgroups.

Given an ambient presentation and a generating set S, the search looks
for a finite-index subgroup K containing S together with a retraction
of K onto the subgroup generated by S.  Composing with the subgroup
presentation of K and eliminating the kernel generators then yields a
presentation of that subgroup.  All verification goes through a word
oracle for the ambient group, so the pipeline works for any group whose
word problem the caller can decide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .abelian import exponent_vector, solve
from .coset import CosetTable, RSResult, low_index, rs_presentation
from .freegroup import FreeGroup
from .oracles import WordOracle, dovetail_oracle
from .presentation import (
    Presentation,
    TietzeError,
    enumerate_presentations,
    normalize_key,
    substitute,
    tietze_simplify,
)
from .words import EMPTY, Word, words_of_length


class RetractError(ValueError):
    pass


@dataclass(frozen=True)
class Retraction:
    """A verified retraction of K onto the subgroup generated by S.

    k_pres: presentation of K on generators X;
    y_words[j]: image of X_j as a word over the abstract S alphabet;
    s_exprs[i]: the i-th element of S expressed as a word over X.
    """

    k_pres: Presentation
    y_words: tuple[Word, ...]
    s_exprs: tuple[Word, ...]

    def rho_images(self) -> tuple[Word, ...]:
        """Images of K's generators under the retraction, as words over X."""
        return tuple(substitute(y, self.s_exprs) for y in self.y_words)

    def check_words(self) -> tuple[Word, ...]:
        """Words over X that must be trivial in K for this to be a retraction.

        One word per relator (well-definedness) and one per element of S
        (the retraction fixes S pointwise).
        """
        rho = self.rho_images()
        eqs = [substitute(r, rho) for r in self.k_pres.relators]
        eqs += [substitute(e, rho) * e.inv() for e in self.s_exprs]
        return tuple(eqs)


@dataclass(frozen=True)
class RetractionFound:
    """Search result: the subgroup table, its presentation, the retraction."""

    table: CosetTable
    rs: RSResult
    retraction: Retraction
    cost: int

    def verify(self, oracle: WordOracle):
        """Re-check every defining equation through the ambient oracle."""
        out = True
        for w in self.retraction.check_words():
            v = oracle(self.rs.embed(w))
            if v is False:
                return False
            if v is None:
                out = None
        return out


@dataclass(frozen=True)
class SearchExhausted:
    steps: int


@lru_cache(maxsize=None)
def _word_pool(rank: int, length: int) -> tuple[Word, ...]:
    return tuple(words_of_length(rank, length))


def _weak_compositions(total: int, parts: int):
    """Tuples of `parts` nonnegative ints summing to `total`, first part high."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _weak_compositions(total - head, parts - 1):
            yield (head,) + rest


class _Branch:
    """One finite-index subgroup admitted into the dovetail."""

    def __init__(self, rs: RSResult, s_exprs: tuple[Word, ...]):
        self.rs = rs
        self.s_exprs = s_exprs
        self.index = rs.table.index
        pres = rs.presentation
        self.rank = pres.rank
        self._rel_rows = [exponent_vector(r, pres.rank) for r in pres.relators]
        # columns of the transposed relator matrix, for lattice membership
        self._cols = [[row[i] for row in self._rel_rows] for i in range(pres.rank)]
        self._lat_memo: dict[tuple[int, ...], bool] = {}

    def lattice_contains(self, vec) -> bool:
        """Is vec in the integer span of the relator exponent vectors?"""
        key = tuple(vec)
        got = self._lat_memo.get(key)
        if got is None:
            if not self._rel_rows:
                got = not any(vec)
            else:
                got = solve(self._cols, list(vec), ncols=len(self._rel_rows)) is not None
            self._lat_memo[key] = got
        return got


class RetractionSearch:
    """Resumable dovetailed search for a retraction onto the span of S.

    Candidates are ordered by total cost, the subgroup index plus the
    total length of the image tuple Y over the abstract S alphabet.
    Each run() step examines one coset table or one Y candidate.
    """

    def __init__(self, p: Presentation, s_words, oracle: WordOracle | None = None):
        self.p = p
        self.s_words = tuple(s_words)
        self.oracle = oracle if oracle is not None else dovetail_oracle(p)
        self.steps = 0
        self.cost = 0
        self.result: RetractionFound | None = None
        self._gen = self._search()

    def run(self, nsteps: int) -> RetractionFound | None:
        if self.result is not None:
            return self.result
        for _ in range(nsteps):
            item = next(self._gen)
            self.steps += 1
            if item is not None:
                self.result = item
                return item
        return None

    # -- dovetail internals

    def _tables(self, index: int):
        return [t for t in low_index(self.p, index) if t.index == index]

    def _make_branch(self, t: CosetTable) -> _Branch | None:
        rs = rs_presentation(self.p, t)
        exprs = []
        for s in self.s_words:
            e = rs.rewrite(s)
            if e is None:
                return None  # S is not inside this subgroup
            exprs.append(e)
        return _Branch(rs, tuple(exprs))

    def _y_tuples(self, branch: _Branch, total: int):
        r = branch.rank
        m = len(self.s_words)
        if r == 0:
            if total == 0:
                yield ()
            return
        if m == 0:
            if total == 0:
                yield tuple(EMPTY for _ in range(r))
            return
        # balanced splits first: spread length evenly before piling it up
        for comp in sorted(_weak_compositions(total, r), key=lambda c: (max(c), c)):
            pools = [_word_pool(m, length) for length in comp]
            yield from itertools.product(*pools)

    def _admit(self, branch: _Branch, y: tuple[Word, ...]) -> RetractionFound | None:
        retraction = Retraction(branch.rs.presentation, y, branch.s_exprs)
        checks = retraction.check_words()
        for w in checks:
            if not branch.lattice_contains(exponent_vector(w, branch.rank)):
                return None
        for w in checks:
            if w.ints and self.oracle(branch.rs.embed(w)) is not True:
                return None
        return RetractionFound(branch.rs.table, branch.rs, retraction, self.cost)

    def _search(self):
        branches: list[_Branch] = []
        while True:
            self.cost += 1
            # image tuples on subgroups found at earlier costs come first;
            # enumerating the new cost's coset tables is the expensive tail
            for br in branches:
                for y in self._y_tuples(br, self.cost - br.index):
                    found = self._admit(br, y)
                    if found is not None:
                        yield found
                    yield None
            for t in self._tables(self.cost):
                br = self._make_branch(t)
                yield None
                if br is None:
                    continue
                branches.append(br)
                for y in self._y_tuples(br, 0):
                    found = self._admit(br, y)
                    if found is not None:
                        yield found
                    yield None


def find_retraction(
    p: Presentation,
    s_words,
    budget: int = 200_000,
    oracle: WordOracle | None = None,
):
    """First verified (subgroup, retraction) pair in dovetail order.

    Returns a RetractionFound, or SearchExhausted after `budget` steps.
    """
    search = RetractionSearch(p, s_words, oracle)
    found = search.run(budget)
    if found is None:
        return SearchExhausted(search.steps)
    return found


@dataclass(frozen=True)
class RetractResult:
    """Presentation of a retract, with its generators expressed in the input.

    gen_exprs[j]: output generator j as a word over the input generators;
    kept[j]: the input generator whose image class output generator j names.
    """

    presentation: Presentation
    gen_exprs: tuple[Word, ...]
    kept: tuple[int, ...]


@dataclass(frozen=True)
class IncompleteResult:
    reason: str


def retract_presentation(
    p: Presentation,
    images,
    wp: WordOracle,
    conformance_tietze: bool = False,
):
    """Presentation of the image of an idempotent endomorphism.

    The image of a retraction is the quotient of p by the relators
    x * rho(x)^-1, so those are appended and the kernel generators are
    eliminated.  Idempotence is checked through the oracle first; a
    failed check raises, an unknown returns IncompleteResult.
    """
    images = tuple(images)
    if len(images) != p.rank:
        raise RetractError("one image word per generator required")
    for j, w in enumerate(images):
        fix = substitute(w, images) * w.inv()
        v = wp(fix)
        if v is False:
            raise RetractError(f"images are not idempotent at generator {j}")
        if v is None:
            return IncompleteResult("oracle could not confirm idempotence")
    extra = [Word((j + 1,)).inv() * images[j] for j in range(p.rank)]
    quotient = Presentation(p.names, list(p.relators) + extra)
    simplified, trace = tietze_simplify(quotient)
    out = Presentation(FreeGroup.standard(simplified.rank).names, simplified.relators)
    result = RetractResult(
        out,
        tuple(images[k] for k in trace.kept),
        trace.kept,
    )
    if conformance_tietze:
        _conformance_search(quotient, out)
    return result


def _conformance_search(start: Presentation, goal: Presentation, limit: int = 4000):
    """Blind Tietze-move search that must rediscover the directed output."""
    want = normalize_key(goal)
    for i, q in enumerate(enumerate_presentations(start)):
        if i >= limit:
            raise TietzeError("conformance search budget exhausted")
        if q.rank <= 6 and normalize_key(q) == want:
            return


@dataclass(frozen=True)
class SubgroupPresentationResult:
    """Presentation of the subgroup generated by S, with correspondences.

    gens_in_s[j]: output generator j over the abstract S alphabet;
    gens_ambient[j]: the same generator as an ambient word.
    """

    presentation: Presentation
    gens_in_s: tuple[Word, ...]
    gens_ambient: tuple[Word, ...]
    witness: RetractionFound


def subgroup_presentation_lr(
    p: Presentation,
    s_words,
    budget: int = 200_000,
    oracle: WordOracle | None = None,
    conformance_tietze: bool = False,
):
    """Presentation of the subgroup generated by S via local retractions.

    Pipeline: find a finite-index overgroup with a retraction onto the
    span of S, present the overgroup, then eliminate the retraction's
    kernel generators.  Returns SearchExhausted or IncompleteResult when
    the search or the oracle runs out.
    """
    s_words = tuple(s_words)
    if oracle is None:
        oracle = dovetail_oracle(p)
    found = find_retraction(p, s_words, budget, oracle)
    if isinstance(found, SearchExhausted):
        return found
    return present_from_retraction(s_words, found, oracle, conformance_tietze)


def present_from_retraction(
    s_words,
    found: RetractionFound,
    oracle: WordOracle,
    conformance_tietze: bool = False,
):
    """Turn a verified retraction into a presentation of the span of S."""
    s_words = tuple(s_words)
    rs = found.rs
    wp_sub = WordOracle(
        lambda w: oracle(rs.embed(w)), oracle.total, f"{oracle.name}|subgroup"
    )
    rr = retract_presentation(
        rs.presentation,
        found.retraction.rho_images(),
        wp_sub,
        conformance_tietze=conformance_tietze,
    )
    if isinstance(rr, IncompleteResult):
        return rr
    gens_in_s = tuple(found.retraction.y_words[k] for k in rr.kept)
    gens_ambient = tuple(substitute(y, s_words) for y in gens_in_s)
    return SubgroupPresentationResult(rr.presentation, gens_in_s, gens_ambient, found)
