"""Word-problem oracles: exact engines, subprocess protocol, dovetail fallback.

An oracle answers trivial/nontrivial for words over a fixed presentation's
alphabet. Exact engines are total; the dovetail oracle is a budgeted
semi-decision (None = unknown) pairing consequence enumeration against
finite-quotient actions.
"""

from __future__ import annotations

import itertools
import subprocess

from .coset import Overflow, low_index, todd_coxeter
from .freegroup import is_power_of
from .presentation import (
    UNKNOWN,
    Presentation,
    canonical_relator,
    consequence_stream,
)
from .words import Word, commutator, format_word, invert_ints

__all__ = [
    "WordOracle",
    "OracleProtocolError",
    "oracle_from",
    "free_oracle",
    "free_abelian_oracle",
    "finite_oracle",
    "klein_oracle",
    "product_oracle",
    "auto_oracle",
    "dovetail_oracle",
    "subprocess_oracle",
    "pinched_oracle",
    "UNKNOWN",
]


class OracleProtocolError(RuntimeError):
    pass


class WordOracle:
    """Memoizing word-problem decision. Calls return True/False, or None
    for "unknown" when the oracle is a budgeted semi-decision."""

    def __init__(self, fn, total: bool, name: str):
        self.fn = fn
        self.total = total
        self.name = name
        self._memo: dict[tuple[int, ...], bool] = {}

    def __call__(self, w: Word):
        got = self._memo.get(w.ints)
        if got is not None:
            return got
        v = self.fn(w)
        if v is not None:
            self._memo[w.ints] = v
        return v

    def __repr__(self):
        return f"WordOracle({self.name}, total={self.total})"


def free_oracle(p: Presentation | int) -> WordOracle:
    if isinstance(p, Presentation):
        if p.relators:
            raise ValueError("free oracle needs a relator-free presentation")
    return WordOracle(lambda w: len(w.ints) == 0, True, "free")


def _exponents(w: Word, rank: int) -> tuple[int, ...]:
    v = [0] * rank
    for x in w.ints:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


def _is_standard_abelian(p: Presentation) -> bool:
    want = {
        canonical_relator(commutator(Word((i + 1,)), Word((j + 1,)))).ints
        for i in range(p.rank)
        for j in range(i + 1, p.rank)
    }
    return {r.ints for r in p.relators} == want


def free_abelian_oracle(p: Presentation) -> WordOracle:
    if not _is_standard_abelian(p):
        raise ValueError("not the standard free-abelian presentation")
    rank = p.rank
    return WordOracle(
        lambda w: all(e == 0 for e in _exponents(w, rank)), True, "abelian"
    )


def finite_oracle(p: Presentation, max_cosets: int = 100000) -> WordOracle:
    t = todd_coxeter(p, (), max_cosets=max_cosets)
    if isinstance(t, Overflow):
        raise ValueError(
            f"group not confirmed finite within {max_cosets} cosets"
        )
    return WordOracle(lambda w: t.trace(0, w) == 0, True, f"finite:{t.index}")


def _klein_roles(p: Presentation):
    """(fiber, base) generator indices if p is the twisted Z-by-Z surface
    presentation, else None."""
    if p.rank != 2 or len(p.relators) != 1:
        return None
    r = p.relators[0]
    for fiber, base in ((0, 1), (1, 0)):
        pattern = Word((base + 1, fiber + 1, -(base + 1), fiber + 1))
        if r == canonical_relator(pattern):
            return fiber, base
    return None


def klein_oracle(p: Presentation) -> WordOracle:
    roles = _klein_roles(p)
    if roles is None:
        raise ValueError("not a Klein-bottle presentation")
    fiber, base = roles

    def fn(w: Word) -> bool:
        s = t = 0
        for x in w.ints:
            e = 1 if x > 0 else -1
            if abs(x) - 1 == fiber:
                s += e if t % 2 == 0 else -e
            else:
                t += e
        return s == 0 and t == 0

    return WordOracle(fn, True, "klein")


def _as_commutator_pair(r: Word):
    x = r.ints
    if len(x) == 4 and x[0] > 0 and x[1] > 0 and x[2] == -x[0] and x[3] == -x[1]:
        return x[0] - 1, x[1] - 1
    return None


def _product_split(p: Presentation):
    """Direct-product decomposition, or None.

    Generators that lack a pairwise commutation relator are forced into one
    factor, as is the support of every non-commutator relator.
    """
    comm_pairs = set()
    others = []
    for r in p.relators:
        pair = _as_commutator_pair(r)
        if pair is not None:
            comm_pairs.add(pair)
        else:
            others.append(r)
    parent = list(range(p.rank))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        i, j = find(i), find(j)
        if i != j:
            parent[max(i, j)] = min(i, j)

    for i in range(p.rank):
        for j in range(i + 1, p.rank):
            if (i, j) not in comm_pairs:
                union(i, j)
    for r in others:
        support = sorted({abs(x) - 1 for x in r.ints})
        for g in support[1:]:
            union(support[0], g)
    comps: dict[int, list[int]] = {}
    for g in range(p.rank):
        comps.setdefault(find(g), []).append(g)
    if len(comps) < 2:
        return None
    factors = []
    for root in sorted(comps):
        gens = comps[root]
        renum = {g: k + 1 for k, g in enumerate(gens)}
        rels = []
        for r in p.relators:
            support = {abs(x) - 1 for x in r.ints}
            if support <= set(gens):
                rels.append(
                    Word(
                        tuple(
                            renum[abs(x) - 1] * (1 if x > 0 else -1)
                            for x in r.ints
                        )
                    )
                )
        factors.append(
            (tuple(gens), Presentation(tuple(p.names[g] for g in gens), rels))
        )
    return factors


def product_oracle(p: Presentation) -> WordOracle:
    factors = _product_split(p)
    if factors is None:
        raise ValueError("no direct-product decomposition found")
    parts = []
    for gens, fp in factors:
        renum = {g: k + 1 for k, g in enumerate(gens)}
        sub = auto_oracle(fp)
        parts.append((set(gens), renum, sub))

    def fn(w: Word) -> bool:
        for gens, renum, sub in parts:
            proj = Word.make(
                renum[abs(x) - 1] * (1 if x > 0 else -1)
                for x in w.ints
                if abs(x) - 1 in gens
            )
            if not sub(proj):
                return False
        return True

    name = "product(" + ",".join(s.name for _, _, s in parts) + ")"
    return WordOracle(fn, True, name)


def auto_oracle(p: Presentation, max_cosets: int = 50000) -> WordOracle:
    """First exact engine that applies: free, free abelian, Klein, direct
    product, finite. Raises when none does."""
    if not p.relators:
        return free_oracle(p)
    if _is_standard_abelian(p):
        return free_abelian_oracle(p)
    if _klein_roles(p) is not None:
        return klein_oracle(p)
    if _product_split(p) is not None:
        return product_oracle(p)
    try:
        return finite_oracle(p, max_cosets=max_cosets)
    except ValueError:
        raise ValueError(
            "no built-in exact engine applies; use dovetail or cmd:"
        ) from None


# ---------------------------------------------------------------------------
# Cyclically pinched one-relator groups (free amalgam over a cyclic subgroup)


def pinched_oracle(rank1: int, rank2: int, u: Word, v: Word) -> WordOracle:
    """Total engine for < F(rank1) * F(rank2) | u = v >.

    u lives over the first block, v over the second (as letters of the
    combined alphabet, shifted by rank1); both must be nontrivial.
    """
    if not u.ints or not v.ints:
        raise ValueError("pinched relator halves must be nontrivial")
    if u.max_index() > rank1:
        raise ValueError("u must use only the first generator block")
    if any(abs(x) <= rank1 for x in v.ints):
        raise ValueError("v must use only the second generator block")

    def block(letter: int) -> int:
        return 0 if abs(letter) <= rank1 else 1

    sides = (u, v)

    def fn(w: Word) -> bool:
        syllables: list[tuple[int, tuple[int, ...]]] = []
        for x in w.ints:
            b = block(x)
            if syllables and syllables[-1][0] == b:
                prev = syllables[-1][1]
                merged = Word.make(prev + (x,)).ints
                syllables[-1] = (b, merged)
            else:
                syllables.append((b, (x,)))
        syllables = [s for s in syllables if s[1]]
        while True:
            # re-merge adjacent same-block syllables after a pinch
            merged: list[tuple[int, tuple[int, ...]]] = []
            for b, body in syllables:
                if merged and merged[-1][0] == b:
                    merged[-1] = (b, Word.make(merged[-1][1] + body).ints)
                else:
                    merged.append((b, body))
            syllables = [s for s in merged if s[1]]
            if len(syllables) == 0:
                return True
            if len(syllables) == 1:
                return False  # free factors embed
            pinched = False
            for idx, (b, body) in enumerate(syllables):
                k = is_power_of(Word(body), sides[b])
                if k is not None:
                    other = sides[1 - b] ** k
                    syllables[idx : idx + 1] = (
                        [(1 - b, other.ints)] if other.ints else []
                    )
                    pinched = True
                    break
            if not pinched:
                return False  # amalgam normal form with >= 2 syllables

    return WordOracle(fn, True, "pinched")


def _detect_pinched(p: Presentation):
    """Split a one-relator presentation as <A * B | u = v> if possible.

    Returns (rank1, u, v) with v over the shifted second block.
    """
    if len(p.relators) != 1 or p.rank < 2:
        return None
    r = p.relators[0]
    for rank1 in range(1, p.rank):
        for seq in (r.ints, invert_ints(r.ints)):
            for k in range(len(seq)):
                rot = seq[k:] + seq[:k]
                # look for rot = u * w with u over block A, w over block B
                split = None
                for pos in range(1, len(rot)):
                    if all(abs(x) <= rank1 for x in rot[:pos]) and all(
                        abs(x) > rank1 for x in rot[pos:]
                    ):
                        split = pos
                        break
                if split is not None:
                    u = Word(rot[:split])
                    v = Word(invert_ints(rot[split:]))
                    return rank1, u, v
    return None


# ---------------------------------------------------------------------------
# Dovetailed semi-decision


class _Dovetail:
    """Consequence enumeration against finite-quotient actions."""

    def __init__(self, p: Presentation, budget: int):
        self.p = p
        self.budget = budget
        self.conseq = consequence_stream(p)
        self.conseq_dead = False
        self.trivial_seen: set[tuple[int, ...]] = set()
        self.tables: list = []
        self.li_bound = 1
        self.li_iter = low_index(p, 1)

    def _pull_consequence(self):
        if self.conseq_dead:
            return None
        try:
            c = next(self.conseq)
        except StopIteration:
            self.conseq_dead = True
            return None
        self.trivial_seen.add(c.ints)
        return c

    def _pull_table(self):
        try:
            t = next(self.li_iter)
        except StopIteration:
            self.li_bound += 1
            self.li_iter = low_index(self.p, self.li_bound)
            return None
        if t.index == self.li_bound:
            self.tables.append(t)
            return t
        return None

    @staticmethod
    def _acts_nontrivially(t, w: Word) -> bool:
        return any(t.trace(c, w) != c for c in range(t.index))

    def query(self, w: Word):
        if w.ints in self.trivial_seen:
            return True
        for t in self.tables:
            if self._acts_nontrivially(t, w):
                return False
        spent = 0
        while spent < self.budget:
            c = self._pull_consequence()
            spent += 1
            if c is not None and c == w:
                return True
            t = self._pull_table()
            spent += 1
            if t is not None and self._acts_nontrivially(t, w):
                return False
        return None


def dovetail_oracle(p: Presentation, budget: int = 10**6) -> WordOracle:
    engine = _Dovetail(p, budget)
    return WordOracle(engine.query, False, f"dovetail:{budget}")


# ---------------------------------------------------------------------------
# External subprocess protocol


class _Subprocess:
    def __init__(self, path: str, names):
        self.path = path
        self.names = names
        self.proc = None

    def _ensure(self):
        if self.proc is None:
            try:
                self.proc = subprocess.Popen(
                    [self.path],
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
            except OSError as e:
                raise OracleProtocolError(f"cannot start oracle: {e}") from e

    def __call__(self, w: Word) -> bool:
        self._ensure()
        try:
            self.proc.stdin.write(format_word(w, self.names) + "\n")
            self.proc.stdin.flush()
            line = self.proc.stdout.readline()
        except (BrokenPipeError, OSError) as e:
            raise OracleProtocolError(f"oracle pipe failed: {e}") from e
        reply = line.strip()
        if reply == "1":
            return True
        if reply == "0":
            return False
        raise OracleProtocolError(f"bad oracle reply {line!r}")


def subprocess_oracle(path: str, p: Presentation) -> WordOracle:
    return WordOracle(_Subprocess(path, p.names), True, f"cmd:{path}")


# ---------------------------------------------------------------------------
# Strategy dispatch


def oracle_from(
    p: Presentation,
    strategy: str = "builtin:auto",
    *,
    tower=None,
    budget: int | None = None,
) -> WordOracle:
    """Build a word oracle for p from a named strategy.

    Strategies: builtin:free, builtin:abelian, builtin:finite, builtin:klein,
    builtin:product, builtin:pinched, builtin:ice (needs tower=),
    builtin:auto, dovetail, cmd:<path>.
    """
    if strategy.startswith("cmd:"):
        return subprocess_oracle(strategy[4:], p)
    if strategy == "dovetail":
        return dovetail_oracle(p, budget if budget is not None else 10**6)
    if not strategy.startswith("builtin:"):
        raise ValueError(f"unknown oracle strategy {strategy!r}")
    kind = strategy[8:]
    if kind == "free":
        return free_oracle(p)
    if kind == "abelian":
        return free_abelian_oracle(p)
    if kind == "finite":
        return finite_oracle(p)
    if kind == "klein":
        return klein_oracle(p)
    if kind == "product":
        return product_oracle(p)
    if kind == "auto":
        return auto_oracle(p)
    if kind == "pinched":
        found = _detect_pinched(p)
        if found is None:
            raise ValueError("presentation is not visibly cyclically pinched")
        rank1, u, v = found
        return pinched_oracle(rank1, p.rank - rank1, u, v)
    if kind == "ice":
        if tower is None:
            raise ValueError("builtin:ice needs a tower")
        from .ice import ice_oracle, presentation_of

        if presentation_of(tower).relators != p.relators or presentation_of(
            tower
        ).rank != p.rank:
            raise ValueError("presentation does not match the tower")
        return ice_oracle(tower)
    raise ValueError(f"unknown oracle strategy {strategy!r}")
