"""Independent oracles for the test suite.

Everything here computes expected values by brute force over explicit
finite objects (permutations, product closures, integer recursions,
specializing homomorphisms).  None of it calls the algorithms under
test, so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import math
import random

from limitforge.freegroup import eval_hom
from limitforge.words import Word, commutator


# ---------------------------------------------------------------------------
# Subgroup counts in free groups, by the standard recursion: the number
# of index-n subgroups of a rank-r free group satisfies
#   N(n) = n * (n!)^(r-1) - sum_{i=1}^{n-1} ((n-i)!)^(r-1) * N(i)


def hall_counts(rank: int, nmax: int) -> list[int]:
    counts: list[int] = []
    for n in range(1, nmax + 1):
        total = n * math.factorial(n) ** (rank - 1)
        for i in range(1, n):
            total -= math.factorial(n - i) ** (rank - 1) * counts[i - 1]
        counts.append(total)
    return counts


# ---------------------------------------------------------------------------
# Permutations as tuples, composed left to right: (p * q)(x) = q(p(x)).
# A word evaluates by applying its letters in reading order, which matches
# composing right actions.


def perm_mul(p: tuple, q: tuple) -> tuple:
    return tuple(q[p[i]] for i in range(len(p)))


def perm_inv(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def perm_eval(ints, gens) -> tuple:
    deg = len(gens[0])
    acc = tuple(range(deg))
    for x in ints:
        g = gens[x - 1] if x > 0 else perm_inv(gens[-x - 1])
        acc = perm_mul(acc, g)
    return acc


def perm_group_order(gens) -> int:
    deg = len(gens[0])
    ident = tuple(range(deg))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = perm_mul(p, g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return len(seen)


def perms_satisfy(relators, gens) -> bool:
    deg = len(gens[0])
    ident = tuple(range(deg))
    return all(perm_eval(r.ints, gens) == ident for r in relators)


# Ten finite groups given twice over: a presentation, and explicit
# permutations its generators map to.  The permutation side is the
# ground truth; the order comes from closure, never from coset counting.
# Each entry: (label, presentation text, generator permutations).

FINITE_CORPUS = (
    ("cyclic 5", "< a | a^5 >", ((1, 2, 3, 4, 0),)),
    (
        "klein four",
        "< a, b | a^2, b^2, [a,b] >",
        ((1, 0, 3, 2), (2, 3, 0, 1)),
    ),
    (
        "alternating 4",
        "< s, t | s^2, t^3, s*t*s*t*s*t >",
        ((1, 0, 3, 2), (1, 2, 0, 3)),
    ),
    (
        "symmetric 4",
        "< s, t | s^4, t^2, s*t*s*t*s*t >",
        ((1, 2, 3, 0), (1, 0, 2, 3)),
    ),
    (
        "dihedral 8",
        "< r, f | r^4, f^2, r*f*r*f >",
        ((1, 2, 3, 0), (0, 3, 2, 1)),
    ),
    (
        "quaternion 8",
        "< a, b | a^4, a^2*b^-2, b^-1*a*b*a >",
        ((1, 4, 7, 2, 5, 0, 3, 6), (2, 3, 4, 5, 6, 7, 0, 1)),
    ),
    (
        "elementary 9",
        "< a, b | a^3, b^3, [a,b] >",
        ((1, 2, 0, 3, 4, 5), (0, 1, 2, 4, 5, 3)),
    ),
    (
        "frobenius 21",
        "< a, b | a^7, b^3, b^-1*a*b*a^-2 >",
        ((1, 2, 3, 4, 5, 6, 0), (0, 2, 4, 6, 1, 3, 5)),
    ),
    (
        "dihedral 12",
        "< r, f | r^6, f^2, r*f*r*f >",
        ((1, 2, 3, 4, 5, 0), (0, 5, 4, 3, 2, 1)),
    ),
    (
        "symmetric 3",
        "< s, t | s^2, t^2, s*t*s*t*s*t >",
        ((1, 0, 2), (0, 2, 1)),
    ),
)


# ---------------------------------------------------------------------------
# Brute-force subgroup membership: the set of all products of at most
# max_factors elements of S union S^-1, as reduced letter tuples.


def product_closure(s_words, max_factors: int) -> set:
    factors = [w for w in s_words] + [w.inv() for w in s_words]
    seen = {()}
    frontier = [Word(())]
    for _ in range(max_factors):
        nxt = []
        for p in frontier:
            for f in factors:
                q = p * f
                if q.ints not in seen:
                    seen.add(q.ints)
                    nxt.append(q)
        frontier = nxt
    return seen


def random_reduced_word(rng: random.Random, rank: int, length: int) -> Word:
    out: list[int] = []
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    while len(out) < length:
        x = rng.choice(letters)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return Word(tuple(out))


# ---------------------------------------------------------------------------
# Specializations of the height-one tower on <a, b> extended along a.
# Sending t to a^k retracts the tower onto its base; a word trivial in
# the tower dies under every k, and a nontrivial one survives some k
# not much larger than its length.


def t1_specialize(w: Word, k: int) -> Word:
    images = (Word((1,)), Word((2,)), Word(tuple([1] * k)))
    return eval_hom(images, w)


def t1_nontrivial_witness(w: Word, kmax: int) -> int | None:
    for k in range(kmax + 1):
        if t1_specialize(w, k).ints:
            return k
    return None


def t1_relator() -> Word:
    return commutator(Word((1,)), Word((3,)))


def t1_corpus(seed: int = 20260817, n_random: int = 250, n_consequence: int = 250):
    """Fixed word corpus over the alphabet a, b, t.

    Returns (word, expected) pairs where expected is True for words built
    as products of conjugated relators and None where triviality is not
    known in advance.
    """
    rng = random.Random(seed)
    rel = t1_relator()
    out = []
    for _ in range(n_random):
        w = random_reduced_word(rng, 3, rng.randint(1, 16))
        out.append((w, None))
    for _ in range(n_consequence):
        acc = Word(())
        for _ in range(rng.randint(1, 3)):
            c = random_reduced_word(rng, 3, rng.randint(0, 4))
            f = rel if rng.random() < 0.5 else rel.inv()
            acc = acc * f.conjugated_by(c)
        out.append((acc, True))
    return out
