"""Finitely presented groups as data.

Parsing and printing, Tietze moves with validity certificates, a fair
enumeration of Tietze-equivalent presentations, canonicalization up to
renaming, consequence enumeration, and homomorphism checks.

Relators are stored in a fixed normal form: each is cyclically reduced and
replaced by the slot-lex least rotation of itself or its inverse; the relator
list is sorted and deduplicated. Construction applies this normal form, so
two presentations compare equal iff they have the same generator names and
the same relator set up to rotation and inversion. Canonicalization across
generator renamings is the separate normalize() pass.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass

from .abelian import abelian_invariants as _abelian_invariants
from .freegroup import FreeGroup, eval_hom
from .words import (
    EMPTY,
    Word,
    format_word,
    invert_ints,
    parse_word,
    reduce_ints,
    unslot,
    words_of_length,
    words_upto,
)

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class PresentationError(ValueError):
    pass


class TietzeError(ValueError):
    pass


class NormalizeCapError(ValueError):
    pass


class _Unknown:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNKNOWN"

    def __bool__(self):
        raise TypeError("UNKNOWN has no truth value; compare with `is`")


UNKNOWN = _Unknown()


class _ConfirmedOnly:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CONFIRMED_ONLY"


CONFIRMED_ONLY = _ConfirmedOnly()


def canonical_relator(w: Word) -> Word:
    """Slot-lex least word among cyclic rotations of w and of its inverse."""
    core = w.ints
    i, j = 0, len(core)
    while j - i >= 2 and core[i] == -core[j - 1]:
        i += 1
        j -= 1
    core = core[i:j]
    if not core:
        return EMPTY
    best = None
    for seq in (core, invert_ints(core)):
        for k in range(len(seq)):
            rot = seq[k:] + seq[:k]
            key = Word(rot).slots()
            if best is None or key < best[0]:
                best = (key, rot)
    return Word(best[1])


@dataclass(frozen=True)
class Presentation:
    names: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        seen = set()
        for n in names:
            if not _IDENT_RE.match(n):
                raise PresentationError(f"bad generator name {n!r}")
            if n in seen:
                raise PresentationError(f"duplicate generator {n!r}")
            seen.add(n)
        rels = []
        seen_rel = set()
        for r in self.relators:
            if r.max_index() > len(names):
                raise PresentationError(
                    f"relator {r.ints} uses a generator beyond rank {len(names)}"
                )
            c = canonical_relator(r)
            if c.ints and c.ints not in seen_rel:
                seen_rel.add(c.ints)
                rels.append(c)
        rels.sort(key=lambda w: (len(w), w.slots()))
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "relators", tuple(rels))

    @property
    def rank(self) -> int:
        return len(self.names)

    def word(self, text: str) -> Word:
        return parse_word(text, self.names)

    def format(self, w: Word) -> str:
        return format_word(w, self.names)

    def __repr__(self):
        return f"Presentation({serialize(self)!r})"


def parse(text: str) -> Presentation:
    s = text.strip()
    if not s.startswith("<") or not s.endswith(">"):
        raise PresentationError("presentation must be wrapped in < ... >")
    body = s[1:-1]
    if "|" not in body:
        raise PresentationError("missing | between generators and relators")
    left, _, right = body.partition("|")
    if left.strip():
        names = tuple(t.strip() for t in left.split(","))
        if any(not t for t in names):
            raise PresentationError("empty generator name")
    else:
        names = ()
    relators = [parse_word(t, names) for t in _split_top(right)]
    return Presentation(names, relators)


def _split_top(text: str) -> list[str]:
    """Split on commas outside [ ] commutator brackets."""
    parts, cur, depth = [], [], 0
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (q.strip() for q in parts) if p]


def serialize(p: Presentation) -> str:
    gens = ", ".join(p.names)
    rels = ", ".join(format_word(r, p.names) for r in p.relators)
    if rels:
        return f"< {gens} | {rels} >"
    return f"< {gens} | >"


# ---------------------------------------------------------------------------
# Tietze moves


@dataclass(frozen=True)
class AddRelator:
    """Add a redundant relator, certified as a product of conjugated relators.

    derivation: tuple of (relator index, conjugator Word, sign) triples whose
    product conj * r^sign * conj^-1, left to right, freely reduces to word.
    """

    word: Word
    derivation: tuple


@dataclass(frozen=True)
class RemoveRelator:
    index: int
    derivation: tuple  # certificate over the remaining relators


@dataclass(frozen=True)
class AddGenerator:
    name: str
    word: Word  # defining word over the existing generators


@dataclass(frozen=True)
class RemoveGenerator:
    name: str


def _derived_word(relators, derivation) -> Word:
    out = EMPTY
    for idx, conj, sign in derivation:
        if not (0 <= idx < len(relators)):
            raise TietzeError(f"derivation index {idx} out of range")
        r = relators[idx] if sign > 0 else relators[idx].inv()
        out = out * (conj * r * conj.inv())
    return out


def substitute(w: Word, images) -> Word:
    """Apply the letter substitution generator k -> images[k] to w."""
    return eval_hom(tuple(images), w)


def _single_occurrence_pairs(p: Presentation):
    """(relator index, generator index) pairs where the relator uses the
    generator exactly once."""
    out = []
    for i, r in enumerate(p.relators):
        counts: dict[int, int] = {}
        for x in r.ints:
            counts[abs(x) - 1] = counts.get(abs(x) - 1, 0) + 1
        for g, c in sorted(counts.items()):
            if c == 1:
                out.append((i, g))
    return out


def _remove_generator(p: Presentation, gidx: int):
    """Eliminate generator gidx using a defining relator.

    Returns (new presentation, images: old generator -> Word over new gens).
    """
    lv = gidx + 1
    cands = [i for i, g in _single_occurrence_pairs(p) if g == gidx]
    if not cands:
        raise TietzeError(f"generator {p.names[gidx]!r} has no defining relator")
    i = min(cands, key=lambda k: (len(p.relators[k]), k))
    r = p.relators[i].ints
    pos = next(k for k, x in enumerate(r) if abs(x) == lv)
    if r[pos] < 0:
        r = invert_ints(r)
        pos = next(k for k, x in enumerate(r) if abs(x) == lv)
    # r = u g v is trivial, so g = (v u)^-1 over the old alphabet
    g_word = invert_ints(reduce_ints(r[pos + 1 :] + r[:pos]))

    def renum(x: int) -> int:
        k = abs(x)
        nk = k if k < lv else k - 1
        return nk if x > 0 else -nk

    images = []
    for k in range(1, p.rank + 1):
        if k == lv:
            images.append(Word(tuple(renum(x) for x in g_word)))
        else:
            images.append(Word((renum(k),)))
    new_rels = [
        substitute(p.relators[j], images) for j in range(len(p.relators)) if j != i
    ]
    q = Presentation(p.names[:gidx] + p.names[gidx + 1 :], new_rels)
    return q, tuple(images)


def tietze_step(p: Presentation, move) -> Presentation:
    """Apply one certified Tietze move."""
    if isinstance(move, AddRelator):
        if not canonical_relator(move.word).ints:
            raise TietzeError("cannot add a trivial relator")
        if _derived_word(p.relators, move.derivation) != move.word:
            raise TietzeError("derivation does not produce the added relator")
        return Presentation(p.names, p.relators + (move.word,))
    if isinstance(move, RemoveRelator):
        if not (0 <= move.index < len(p.relators)):
            raise TietzeError(f"no relator at index {move.index}")
        rest = p.relators[: move.index] + p.relators[move.index + 1 :]
        for idx, _, _ in move.derivation:
            if idx == move.index:
                raise TietzeError("derivation may not use the removed relator")
        # certificate indices refer to the original relator list
        if _derived_word(p.relators, move.derivation) != p.relators[move.index]:
            raise TietzeError("derivation does not produce the removed relator")
        return Presentation(p.names, rest)
    if isinstance(move, AddGenerator):
        if move.name in p.names:
            raise TietzeError(f"generator {move.name!r} already present")
        if move.word.max_index() > p.rank:
            raise TietzeError("defining word uses an unknown generator")
        names = p.names + (move.name,)
        rel = Word(reduce_ints((-len(names),) + move.word.ints))
        return Presentation(names, p.relators + (rel,))
    if isinstance(move, RemoveGenerator):
        if move.name not in p.names:
            raise TietzeError(f"no generator {move.name!r}")
        q, _ = _remove_generator(p, p.names.index(move.name))
        return q
    raise TietzeError(f"unknown move {move!r}")


@dataclass(frozen=True)
class SimplifyTrace:
    moves: tuple
    gen_images: tuple[Word, ...]  # original generator -> word over result gens
    kept: tuple[int, ...]  # result generator -> original generator index


def tietze_simplify(p: Presentation) -> tuple[Presentation, SimplifyTrace]:
    """Eliminate generators with single-occurrence defining relators.

    Trivial and duplicate relators disappear on construction; this pass adds
    deterministic generator elimination, cheapest defining relator first.
    """
    cur = p
    moves: list = []
    images = [Word((k,)) for k in range(1, p.rank + 1)]
    kept = list(range(p.rank))
    while True:
        pairs = _single_occurrence_pairs(cur)
        if not pairs:
            break
        _, g = min(pairs, key=lambda ig: (len(cur.relators[ig[0]]), ig[0], ig[1]))
        moves.append(RemoveGenerator(cur.names[g]))
        cur, subst = _remove_generator(cur, g)
        images = [substitute(w, subst) for w in images]
        kept.pop(g)
    return cur, SimplifyTrace(tuple(moves), tuple(images), tuple(kept))


# ---------------------------------------------------------------------------
# Fair enumeration of Tietze-equivalent presentations

# Per-round caps: every reachable presentation appears once the round bound
# outgrows its move sizes and depth, so the caps only shape the order.
_NODE_CAP = 48
_NODE_GROWTH = 4
_CHILD_CAP = 6
_CONSEQ_CAP = 12


def _fresh_name(names) -> str:
    k = 0
    while f"g{k}" in names:
        k += 1
    return f"g{k}"


def _addable_relators(q: Presentation, bound: int):
    """Candidate redundant relators: products of at most two conjugated
    relators with total conjugator length < bound."""
    singles = []
    for conj in words_upto(q.rank, bound - 1):
        for j in range(len(q.relators)):
            for s in (1, -1):
                r = q.relators[j] if s > 0 else q.relators[j].inv()
                singles.append((len(conj), conj * r * conj.inv()))
    for _, w in singles:
        yield w
    for (c1, w1), (c2, w2) in itertools.product(singles, repeat=2):
        if c1 + c2 <= bound - 1:
            yield w1 * w2


def _children(q: Presentation, images, bound: int):
    out = []
    # drop a relator derivable from the others within a bounded search
    for j in range(len(q.relators)):
        rest = Presentation(q.names, q.relators[:j] + q.relators[j + 1 :])
        target = q.relators[j]
        stream = consequence_stream(rest)
        if any(
            w == target
            for w in itertools.islice(stream, _CONSEQ_CAP * bound)
        ):
            out.append((rest, images))
    # eliminate a generator with a defining relator
    for g in sorted({g for _, g in _single_occurrence_pairs(q)}):
        child, subst = _remove_generator(q, g)
        out.append((child, tuple(substitute(w, subst) for w in images)))
    # add a redundant relator
    added = 0
    for w in _addable_relators(q, bound):
        if added >= _CHILD_CAP * bound:
            break
        c = canonical_relator(w)
        if not c.ints or c in q.relators:
            continue
        out.append((Presentation(q.names, q.relators + (c,)), images))
        added += 1
    # define a fresh generator
    name = _fresh_name(q.names)
    added = 0
    for w in words_upto(q.rank, bound):
        if added >= _CHILD_CAP * bound:
            break
        names = q.names + (name,)
        rel = Word(reduce_ints((-len(names),) + w.ints))
        out.append((Presentation(names, q.relators + (rel,)), images))
        added += 1
    return out


def enumerate_presentations(p: Presentation, with_trace: bool = False):
    """Fair stream of presentations Tietze-equivalent to p, starting at p.

    Never terminates; consume with a budget. With with_trace, yields
    (presentation, images) where images express p's generators over the
    emitted presentation's generators.
    """
    emitted: set[str] = set()
    start_images = tuple(Word((k,)) for k in range(1, p.rank + 1))
    node_cap = _NODE_CAP
    for bound in itertools.count(1):
        seen = {serialize(p)}
        queue = deque([(p, start_images, 0)])
        nodes = 0
        while queue and nodes < node_cap:
            q, imgs, depth = queue.popleft()
            nodes += 1
            key = serialize(q)
            if key not in emitted:
                emitted.add(key)
                yield (q, imgs) if with_trace else q
            if depth >= bound:
                continue
            for child, cimgs in _children(q, imgs, bound):
                ck = serialize(child)
                if ck not in seen:
                    seen.add(ck)
                    queue.append((child, cimgs, depth + 1))
        node_cap *= _NODE_GROWTH


# ---------------------------------------------------------------------------
# Canonical form under renaming


def normalize_key(p: Presentation):
    """Canonical key invariant under generator renaming, relator order,
    rotation, and inversion. Capped at 6 generators."""
    if p.rank > 6:
        raise NormalizeCapError("normalize is capped at 6 generators")
    best = None
    for perm in itertools.permutations(range(p.rank)):
        rels = []
        for r in p.relators:
            w = Word(
                tuple(
                    (perm[abs(x) - 1] + 1) * (1 if x > 0 else -1) for x in r.ints
                )
            )
            c = canonical_relator(w)
            rels.append((len(c), c.slots()))
        cand = tuple(sorted(rels))
        if best is None or cand < best:
            best = cand
    return (p.rank, best)


def normalize(p: Presentation) -> Presentation:
    rank, rel_keys = normalize_key(p)
    names = FreeGroup.standard(rank).names
    rels = [Word(tuple(unslot(s) for s in slots)) for _, slots in rel_keys]
    return Presentation(names, rels)


# ---------------------------------------------------------------------------
# Consequence enumeration


def _compositions(total: int, k: int):
    if k == 1:
        yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _rotation_certs(relators):
    """All cyclic rotations of each relator and its inverse, with the
    conjugation certificate: rotation = conj * r^sign * conj^-1."""
    out = []
    seen = set()
    for j, r in enumerate(relators):
        for sign in (1, -1):
            base = r.ints if sign > 0 else invert_ints(r.ints)
            for k in range(len(base)):
                rot = base[k:] + base[:k]
                if rot in seen:
                    continue
                seen.add(rot)
                out.append((rot, j, Word(base[:k]).inv(), sign))
    return out


def consequence_stream(p: Presentation):
    """Fair stream of exactly the words trivial in the presented group.

    Emits the empty word, then freely reduced products of conjugated
    relators by increasing total cost (cost of one factor c r c^-1 is
    |c| + 1, with cyclic rotations of relators available at cost 1).
    Deduplicated. Terminates only for relator-free presentations.
    """
    yield EMPTY
    if not p.relators:
        return
    seen: set[tuple[int, ...]] = {()}
    rotations = [rot for rot, _, _, _ in _rotation_certs(p.relators)]
    factor_cache: dict[int, list[tuple[int, ...]]] = {}

    def factors(cost: int):
        if cost not in factor_cache:
            fs = []
            for conj in words_of_length(p.rank, cost - 1):
                for rot in rotations:
                    fs.append(
                        reduce_ints(conj.ints + rot + invert_ints(conj.ints))
                    )
            factor_cache[cost] = fs
        return factor_cache[cost]

    def products(comp):
        if len(comp) == 1:
            yield from factors(comp[0])
            return
        for head in factors(comp[0]):
            for tail in products(comp[1:]):
                yield reduce_ints(head + tail)

    for total in itertools.count(1):
        for k in range(1, total + 1):
            for comp in _compositions(total, k):
                for prod in products(comp):
                    if prod not in seen:
                        seen.add(prod)
                        yield Word(prod)


def consequences_with_certificates(p: Presentation):
    """Like consequence_stream but yields (word, derivation) pairs usable as
    AddRelator / RemoveRelator certificates."""
    if not p.relators:
        return
    seen: set[tuple[int, ...]] = {()}
    rotations = _rotation_certs(p.relators)

    def factors(cost: int):
        for conj in words_of_length(p.rank, cost - 1):
            for rot, j, rconj, s in rotations:
                w = reduce_ints(conj.ints + rot + invert_ints(conj.ints))
                yield w, (j, conj * rconj, s)

    def products(comp):
        if len(comp) == 1:
            for w, cert in factors(comp[0]):
                yield w, (cert,)
            return
        for head, hc in factors(comp[0]):
            for tail, tc in products(comp[1:]):
                yield reduce_ints(head + tail), (hc,) + tc

    for total in itertools.count(1):
        for k in range(1, total + 1):
            for comp in _compositions(total, k):
                for prod, cert in products(comp):
                    if prod not in seen:
                        seen.add(prod)
                        yield Word(prod), cert


# ---------------------------------------------------------------------------
# Homomorphisms


class HomError(ValueError):
    pass


@dataclass(frozen=True)
class GroupHom:
    """Map out of a finitely presented group, given by generator images.

    target is duck-typed: anything whose alphabet the image words live over.
    """

    source: Presentation
    target: object
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise HomError("one image per source generator required")

    def __call__(self, w: Word) -> Word:
        return eval_hom(self.images, w)

    @classmethod
    def checked(cls, source, target, images, oracle) -> "GroupHom":
        h = cls(source, target, tuple(images))
        v = check_hom(h, oracle)
        if v is UNKNOWN:
            raise HomError("could not verify relator images (oracle unknown)")
        if not v:
            raise HomError("some relator image is nontrivial in the target")
        return h


def check_hom(h: GroupHom, oracle):
    """True / False / UNKNOWN: does every source relator die in the target?"""
    unknown = False
    for r in h.source.relators:
        v = oracle(h(r))
        if v is None or v is UNKNOWN:
            unknown = True
        elif not v:
            return False
    return UNKNOWN if unknown else True


@dataclass(frozen=True)
class ImageExpressions:
    """Generator correspondences for an image presentation.

    gens_in_source: image generator j is f(gens_in_source[j]).
    source_in_image: f(source generator i) written over the image generators;
    derived by bounded search when omitted (free targets only).
    """

    gens_in_source: tuple[Word, ...]
    source_in_image: tuple[Word, ...] | None = None


def _derive_source_in_image(f: GroupHom, exprs: ImageExpressions, depth: int):
    target = f.target
    free_rank = None
    if isinstance(target, FreeGroup):
        free_rank = target.rank
    elif isinstance(target, Presentation) and not target.relators:
        free_rank = target.rank
    if free_rank is None:
        raise HomError("source_in_image required for non-free targets")
    values = [eval_hom(f.images, e) for e in exprs.gens_in_source]
    out = []
    for i in range(f.source.rank):
        goal = f.images[i]
        found = None
        for cand in words_upto(len(values), depth):
            if eval_hom(values, cand) == goal:
                found = cand
                break
        if found is None:
            raise HomError(
                f"no expression of image generator within search depth {depth}"
            )
        out.append(found)
    return tuple(out)


def is_injective(
    f: GroupHom,
    wp_source,
    image_pres: Presentation,
    exprs: ImageExpressions,
    *,
    derive_depth: int = 6,
):
    """Decide injectivity via the unique candidate inverse on the image.

    Total source oracle: returns True or False. Semi-decision oracle:
    returns CONFIRMED_ONLY when every required identity is confirmed, else
    UNKNOWN; never False.
    """
    e = exprs.gens_in_source
    if len(e) != image_pres.rank:
        raise HomError("one source expression per image generator required")
    checks = [eval_hom(e, rho) for rho in image_pres.relators]
    sin = exprs.source_in_image
    if sin is None:
        sin = _derive_source_in_image(f, exprs, derive_depth)
    for i in range(f.source.rank):
        w = eval_hom(e, sin[i])
        checks.append(w * Word((i + 1,)).inv())
    if wp_source.total:
        for w in checks:
            v = wp_source(w)
            if v is None:
                return UNKNOWN
            if not v:
                return False
        return True
    for w in checks:
        if wp_source(w) is not True:
            return UNKNOWN
    return CONFIRMED_ONLY


def abelianization(p: Presentation) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion invariant factors) of the abelianized group."""
    return _abelian_invariants(p.rank, p.relators)
