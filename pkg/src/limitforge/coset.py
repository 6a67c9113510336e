"""Coset enumeration and subgroup presentations.

Todd-Coxeter (HLT with coincidence handling), low-index subgroup
enumeration by backtracking over standardized partial tables, and the
Reidemeister-Schreier rewriting process with Tietze cleanup.

Tables use slot columns (slot 2k = generator k, 2k+1 = its inverse) and are
standardized: cosets numbered in breadth-first order from the base coset 0
scanning slots ascending.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .presentation import Presentation, SimplifyTrace, substitute, tietze_simplify
from .words import Word, slot, unslot

def _inv(s: int) -> int:
    return s ^ 1


@dataclass(frozen=True)
class Overflow:
    """Coset limit hit; the index may still be finite or infinite."""

    allocated: int


@dataclass(frozen=True)
class CosetTable:
    ngens: int
    rows: tuple[tuple[int, ...], ...]
    subgens: tuple[Word, ...] = ()

    @property
    def index(self) -> int:
        return len(self.rows)

    def step(self, c: int, s: int) -> int:
        return self.rows[c][s]

    def trace(self, c: int, w: Word) -> int:
        for x in w.ints:
            c = self.rows[c][slot(x)]
        return c

    def is_complete(self) -> bool:
        return all(e is not None for row in self.rows for e in row)

    def to_json_dict(self, names) -> dict:
        return {
            "index": self.index,
            "rows": {
                names[k]: [self.rows[c][2 * k] for c in range(self.index)]
                for k in range(self.ngens)
            },
        }


def _standardize(ngens: int, rows) -> tuple[tuple[int, ...], ...]:
    """Renumber cosets in BFS order from 0, slots ascending."""
    n2 = 2 * ngens
    order = {0: 0}
    bfs = deque([0])
    while bfs:
        c = bfs.popleft()
        for s in range(n2):
            d = rows[c][s]
            if d is not None and d not in order:
                order[d] = len(order)
                bfs.append(d)
    out = [[None] * n2 for _ in order]
    for c, row in enumerate(rows):
        for s in range(n2):
            if row[s] is not None:
                out[order[c]][s] = order[row[s]]
    return tuple(tuple(r) for r in out)


class _OverflowSignal(Exception):
    pass


class _Enumerator:
    """HLT machine with lazy union-find coincidence handling."""

    def __init__(self, ngens: int, max_cosets: int):
        self.n2 = 2 * ngens
        self.max = max_cosets
        self.table: list[list[int | None]] = [[None] * self.n2]
        self.parent = [0]
        self.pending: deque[tuple[int, int]] = deque()
        self.dirty: deque[int] = deque([0])

    def find(self, c: int) -> int:
        while self.parent[c] != c:
            self.parent[c] = self.parent[self.parent[c]]
            c = self.parent[c]
        return c

    def get(self, c: int, s: int):
        d = self.table[c][s]
        return None if d is None else self.find(d)

    def define(self, c: int, s: int) -> int:
        if len(self.table) >= self.max:
            raise _OverflowSignal
        d = len(self.table)
        self.table.append([None] * self.n2)
        self.parent.append(d)
        self.table[c][s] = d
        self.table[d][_inv(s)] = c
        self.dirty.append(d)
        return d

    def _set(self, c: int, s: int, d: int):
        # install c --s--> d on representatives, queueing any clash
        cur = self.get(c, s)
        if cur is None:
            self.table[c][s] = d
            self.dirty.append(c)
        elif cur != d:
            self.pending.append((cur, d))
            return
        rcur = self.get(d, _inv(s))
        if rcur is None:
            self.table[d][_inv(s)] = c
            self.dirty.append(d)
        elif rcur != c:
            self.pending.append((rcur, c))

    def process_coincidences(self):
        while self.pending:
            x, y = self.pending.popleft()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x
            # the smaller index survives, keeping the base coset alive
            self.parent[y] = x
            row = self.table[y]
            self.table[y] = [None] * self.n2
            for s in range(self.n2):
                if row[s] is not None:
                    self._set(x, s, self.find(row[s]))
            self.dirty.append(x)

    def scan(self, alpha: int, slots, fill: bool):
        """Trace one relator from alpha, deducing or defining as needed."""
        while True:
            alpha = self.find(alpha)
            f, i = alpha, 0
            b, j = alpha, len(slots) - 1
            while i <= j:
                nxt = self.get(f, slots[i])
                if nxt is None:
                    break
                f, i = nxt, i + 1
            if i > j:
                if f != b:
                    self.pending.append((f, b))
                return
            while j >= i:
                prv = self.get(b, _inv(slots[j]))
                if prv is None:
                    break
                b, j = prv, j - 1
            if j < i:
                if f != b:
                    self.pending.append((f, b))
                return
            if j == i:
                self.table[f][slots[i]] = b
                self.table[b][_inv(slots[i])] = f
                self.dirty.append(f)
                self.dirty.append(b)
                return
            if not fill:
                return
            self.define(f, slots[i])
            # loop: the forward scan can now continue


def todd_coxeter(
    p: Presentation,
    subgens,
    max_cosets: int = 100000,
    lookahead: bool = False,
):
    """Enumerate cosets of <subgens> in the presented group.

    Returns a complete standardized CosetTable, or Overflow when more than
    max_cosets cosets would be needed before closing.
    """
    subgens = tuple(subgens)
    for w in subgens:
        if w.max_index() > p.rank:
            raise ValueError("subgroup generator uses an unknown generator")
    eng = _Enumerator(p.rank, max_cosets)
    rel_slots = [r.slots() for r in p.relators]
    sub_slots = [w.slots() for w in subgens if w.ints]

    def drain():
        try:
            for ws in sub_slots:
                eng.scan(0, ws, fill=True)
                eng.process_coincidences()
            while eng.dirty:
                c = eng.dirty.popleft()
                if eng.find(c) != c:
                    continue
                for ws in rel_slots:
                    eng.scan(c, ws, fill=True)
                    eng.process_coincidences()
                    if eng.find(c) != c:
                        break
                c = eng.find(c)
                for s in range(eng.n2):
                    if eng.get(c, s) is None:
                        eng.define(c, s)
                eng.process_coincidences()
        except _OverflowSignal:
            return False
        return True

    if not drain():
        if lookahead:
            # coincidence-only sweep, then one retry with the freed space
            for c in range(len(eng.table)):
                if eng.find(c) != c:
                    continue
                for ws in rel_slots:
                    eng.scan(c, ws, fill=False)
                    eng.process_coincidences()
            eng.dirty.extend(
                c for c in range(len(eng.table)) if eng.find(c) == c
            )
            if not drain():
                return Overflow(len(eng.table))
        else:
            return Overflow(len(eng.table))

    live = [c for c in range(len(eng.table)) if eng.find(c) == c]
    renum = {c: i for i, c in enumerate(live)}
    rows = [
        [renum[eng.get(c, s)] for s in range(eng.n2)] for c in live
    ]
    rows = _standardize(p.rank, rows)
    table = CosetTable(p.rank, rows, subgens)
    _assert_valid(p, table)
    return table


def _assert_valid(p: Presentation, t: CosetTable):
    n = t.index
    for k in range(p.rank):
        col = [t.rows[c][2 * k] for c in range(n)]
        assert sorted(col) == list(range(n)), "generator column is not a permutation"
        for c in range(n):
            assert t.rows[col[c]][2 * k + 1] == c, "inverse column mismatch"
    for r in p.relators:
        for c in range(n):
            assert t.trace(c, r) == c, "relator does not act trivially"
    for w in t.subgens:
        assert t.trace(0, w) == 0, "subgroup generator moves the base coset"


def low_index(p: Presentation, n: int):
    """All subgroups of index <= n, one standardized complete table each."""
    if n < 1:
        raise ValueError("index bound must be at least 1")
    n2 = 2 * p.rank
    rel_slots = [r.slots() for r in p.relators]
    rows: list[list[int | None]] = [[None] * n2]

    def set_entry(c: int, s: int, d: int) -> bool:
        if rows[c][s] is not None:
            return rows[c][s] == d
        rows[c][s] = d
        r = rows[d][_inv(s)]
        if r is None:
            rows[d][_inv(s)] = c
            return True
        return r == c

    def scan_once(alpha: int, slots) -> str:
        f, i = alpha, 0
        b, j = alpha, len(slots) - 1
        while i <= j and rows[f][slots[i]] is not None:
            f, i = rows[f][slots[i]], i + 1
        if i > j:
            return "ok" if f == b else "fail"
        while j >= i and rows[b][_inv(slots[j])] is not None:
            b, j = rows[b][_inv(slots[j])], j - 1
        if j < i:
            return "ok" if f == b else "fail"
        if j == i:
            if not set_entry(f, slots[i], b):
                return "fail"
            return "set"
        return "ok"

    def propagate() -> bool:
        changed = True
        while changed:
            changed = False
            for c in range(len(rows)):
                for ws in rel_slots:
                    r = scan_once(c, ws)
                    if r == "fail":
                        return False
                    if r == "set":
                        changed = True
        return True

    def first_undefined():
        for c in range(len(rows)):
            for s in range(n2):
                if rows[c][s] is None:
                    return c, s
        return None

    def dfs():
        spot = first_undefined()
        if spot is None:
            yield CosetTable(p.rank, tuple(tuple(r) for r in rows))
            return
        c, s = spot
        limit = len(rows) + (1 if len(rows) < n else 0)
        for d in range(limit):
            saved = [row[:] for row in rows]
            if d == len(rows):
                rows.append([None] * n2)
            if set_entry(c, s, d) and propagate():
                yield from dfs()
            del rows[:]
            rows.extend(saved)

    if propagate():
        yield from dfs()


# ---------------------------------------------------------------------------
# Reidemeister-Schreier


@lru_cache(maxsize=None)
def _schreier_data(t: CosetTable):
    """BFS transversal and raw Schreier generators of a complete table.

    Returns (reps, tree, raw_pairs, raw_words, pair_index) where raw pairs
    are the non-tree (coset, positive slot) edges ordered by (slot, coset).
    """
    n2 = 2 * t.ngens
    reps: list[tuple[int, ...] | None] = [None] * t.index
    reps[0] = ()
    tree: set[tuple[int, int]] = set()
    bfs = deque([0])
    while bfs:
        c = bfs.popleft()
        for s in range(n2):
            d = t.rows[c][s]
            if reps[d] is None:
                reps[d] = reps[c] + (unslot(s),)
                tree.add((c, s))
                tree.add((d, _inv(s)))
                bfs.append(d)
    raw_pairs = []
    for s in range(0, n2, 2):
        for c in range(t.index):
            if (c, s) not in tree:
                raw_pairs.append((c, s))
    raw_words = []
    for c, s in raw_pairs:
        d = t.rows[c][s]
        raw_words.append(Word.make(reps[c] + (unslot(s),)) * Word(reps[d]).inv())
    pair_index = {pair: i for i, pair in enumerate(raw_pairs)}
    return (
        tuple(Word(r) for r in reps),
        frozenset(tree),
        tuple(raw_pairs),
        tuple(raw_words),
        pair_index,
    )


def rewrite_in_subgroup(t: CosetTable, w: Word) -> Word | None:
    """Express w over the raw Schreier generators, or None if w moves the
    base coset."""
    if not t.is_complete():
        raise ValueError("rewriting needs a complete table")
    _, tree, _, _, pair_index = _schreier_data(t)
    c = 0
    out: list[int] = []
    for x in w.ints:
        s = slot(x)
        d = t.rows[c][s]
        if (c, s) not in tree:
            if s % 2 == 0:
                out.append(pair_index[(c, s)] + 1)
            else:
                out.append(-(pair_index[(d, _inv(s))] + 1))
        c = d
    if c != 0:
        return None
    return Word.make(out)


@dataclass(frozen=True)
class RSResult:
    """Subgroup presentation with its generator correspondence.

    presentation: simplified presentation of the subgroup;
    gens_ambient[j]: the ambient word presenting generator j;
    raw_gens_ambient[i]: ambient word of raw Schreier generator i;
    trace: the Tietze cleanup trace (raw generators -> final words).
    """

    table: CosetTable
    presentation: Presentation
    gens_ambient: tuple[Word, ...]
    raw_gens_ambient: tuple[Word, ...]
    trace: SimplifyTrace

    def embed(self, w: Word) -> Word:
        """Ambient word of a subgroup word over the final generators."""
        return substitute(w, self.gens_ambient)

    def rewrite(self, w: Word) -> Word | None:
        """Subgroup expression of an ambient word, or None outside."""
        raw = rewrite_in_subgroup(self.table, w)
        if raw is None:
            return None
        return substitute(raw, self.trace.gen_images)


def rs_presentation(p: Presentation, t: CosetTable) -> RSResult:
    """Reidemeister-Schreier presentation of the subgroup of a table."""
    if t.ngens != p.rank:
        raise ValueError("table and presentation have different ranks")
    if not t.is_complete():
        raise ValueError("rs_presentation needs a complete table")
    _, tree, raw_pairs, raw_words, pair_index = _schreier_data(t)
    names = tuple(f"s{i + 1}" for i in range(len(raw_pairs)))
    relators = []
    for c in range(t.index):
        for r in p.relators:
            cur = c
            out: list[int] = []
            for x in r.ints:
                s = slot(x)
                d = t.rows[cur][s]
                if (cur, s) not in tree:
                    if s % 2 == 0:
                        out.append(pair_index[(cur, s)] + 1)
                    else:
                        out.append(-(pair_index[(d, _inv(s))] + 1))
                cur = d
            relators.append(Word.make(out))
    raw_pres = Presentation(names, relators)
    simplified, trace = tietze_simplify(raw_pres)
    gens_ambient = tuple(raw_words[trace.kept[j]] for j in range(simplified.rank))
    return RSResult(t, simplified, gens_ambient, raw_words, trace)
