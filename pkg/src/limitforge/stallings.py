"""Folded subgroup graphs for free groups.

A finitely generated subgroup of a free group is stored as a folded labeled
graph: vertex 0 is the base point, and trans[v][s] gives the endpoint of the
edge at v in slot s (slot 2k = generator k, slot 2k+1 = its inverse), or None.
Membership, rank, and index all read straight off the graph.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .words import Word, invert_ints, slot, unslot


def inv_slot(s: int) -> int:
    return s ^ 1


@dataclass(frozen=True)
class SubgroupGraph:
    rank: int
    trans: tuple[tuple[int | None, ...], ...]
    words: tuple[Word, ...]

    @property
    def nvertices(self) -> int:
        return len(self.trans)


def fold(rank: int, words) -> SubgroupGraph:
    """Fold the bouquet of the given subgroup generators."""
    words = tuple(words)
    for w in words:
        if w.max_index() > rank:
            raise ValueError(f"generator word exceeds ambient rank {rank}")

    parent = [0]
    adj: list[dict[int, int]] = [dict()]

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    merges: deque[tuple[int, int]] = deque()

    def add_half(a: int, s: int, b: int):
        a, b = find(a), find(b)
        cur = adj[a].get(s)
        if cur is None:
            adj[a][s] = b
            return
        cur = find(cur)
        adj[a][s] = cur
        if cur != b:
            merges.append((cur, b))

    def add_edge(u: int, s: int, v: int):
        add_half(u, s, v)
        add_half(v, inv_slot(s), u)

    for w in words:
        cur = 0
        n = len(w.ints)
        for i, x in enumerate(w.ints):
            if i == n - 1:
                nxt = 0
            else:
                parent.append(len(parent))
                adj.append(dict())
                nxt = len(parent) - 1
            add_edge(cur, slot(x), nxt)
            cur = nxt
        while merges:
            x, y = merges.popleft()
            x, y = find(x), find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x
            # smaller id survives, which keeps the base point at 0
            parent[y] = x
            edges = adj[y]
            adj[y] = dict()
            for s, t in edges.items():
                add_half(x, s, t)

    live = {v: dict() for v in range(len(parent)) if find(v) == v}
    for v in live:
        for s, t in adj[v].items():
            live[v][s] = find(t)
    base = find(0)

    # trim: repeatedly drop non-base vertices of degree <= 1
    while True:
        victim = None
        for v in live:
            if v != base and len(live[v]) <= 1:
                victim = v
                break
        if victim is None:
            break
        for s, t in live[victim].items():
            if t in live and live[t].get(inv_slot(s)) == victim:
                del live[t][inv_slot(s)]
        del live[victim]

    # canonical BFS renumber from the base, slots ascending
    order = {base: 0}
    bfs = deque([base])
    while bfs:
        v = bfs.popleft()
        for s in sorted(live[v]):
            t = live[v][s]
            if t not in order:
                order[t] = len(order)
                bfs.append(t)
    table: list[list[int | None]] = [[None] * (2 * rank) for _ in order]
    for v, row in live.items():
        for s, t in row.items():
            table[order[v]][s] = order[t]

    return SubgroupGraph(rank, tuple(tuple(r) for r in table), words)


@lru_cache(maxsize=None)
def _tree_data(g: SubgroupGraph):
    """Spanning tree, vertex words, and the ordered free basis of the graph."""
    nv = g.nvertices
    treeword: list[tuple[int, ...] | None] = [None] * nv
    treeword[0] = ()
    bfs = deque([0])
    tree_edges = set()
    while bfs:
        v = bfs.popleft()
        for s in range(2 * g.rank):
            t = g.trans[v][s]
            if t is not None and treeword[t] is None:
                treeword[t] = treeword[v] + (unslot(s),)
                tree_edges.add((v, s, t))
                tree_edges.add((t, inv_slot(s), v))
                bfs.append(t)

    basis = []
    for v in range(nv):
        for s in range(0, 2 * g.rank, 2):  # positive slots once each
            t = g.trans[v][s]
            if t is None or (v, s, t) in tree_edges:
                continue
            # tree words are geodesic paths, so this concatenation is reduced
            w = Word(tuple(treeword[v]) + (unslot(s),) + invert_ints(tuple(treeword[t])))
            basis.append(((v, s), w))
    # non-tree edges ordered by (generator slot, origin vertex)
    basis.sort(key=lambda pair: (pair[0][1], pair[0][0]))
    edge_index = {edge: i for i, (edge, _) in enumerate(basis)}
    words = tuple(w for _, w in basis)
    return tuple(treeword), edge_index, words, tree_edges


def basis_of(g: SubgroupGraph) -> tuple[Word, ...]:
    """Free basis of the subgroup, as ambient words, in a fixed order."""
    return _tree_data(g)[2]


def member(g: SubgroupGraph, w: Word) -> Word | None:
    """Express w in the graph's basis, or None if w is not in the subgroup.

    The result is a word over a fresh alphabet with one generator per basis
    element, in basis_of order.
    """
    _, edge_index, _, tree_edges = _tree_data(g)
    v = 0
    expr: list[int] = []
    for x in w.ints:
        s = slot(x)
        t = g.trans[v][s]
        if t is None:
            return None
        if (v, s, t) not in tree_edges:
            if s % 2 == 0:
                expr.append(edge_index[(v, s)] + 1)
            else:
                expr.append(-(edge_index[(t, inv_slot(s))] + 1))
        v = t
    if v != 0:
        return None
    return Word.make(expr)


def graph_rank_index(g: SubgroupGraph) -> tuple[int, float]:
    """(free rank of the subgroup, index in the ambient group or math.inf)."""
    nv = g.nvertices
    ne = sum(
        1 for v in range(nv) for s in range(0, 2 * g.rank, 2) if g.trans[v][s] is not None
    )
    rank = ne - nv + 1
    full = all(g.trans[v][s] is not None for v in range(nv) for s in range(2 * g.rank))
    return rank, (nv if full else math.inf)
