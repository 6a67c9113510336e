"""Free groups: cyclic reduction, primitive roots, centralizers, homomorphisms."""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, invert_ints, reduce_ints, validate_word

_STANDARD = "abcdefghijklmnopqrs"


@dataclass(frozen=True)
class FreeGroup:
    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator name")

    @property
    def rank(self) -> int:
        return len(self.names)

    @classmethod
    def standard(cls, rank: int) -> "FreeGroup":
        if rank <= len(_STANDARD):
            return cls(tuple(_STANDARD[:rank]))
        return cls(tuple(_STANDARD) + tuple(f"x{i}" for i in range(len(_STANDARD), rank)))


class WholeGroup:
    """Sentinel: the centralizer of the identity is the whole group."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "WHOLE_GROUP"


WHOLE_GROUP = WholeGroup()


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split w = c * core * c^-1 with core cyclically reduced.

    Returns (core, c).
    """
    ints = w.ints
    i, j = 0, len(ints)
    while j - i >= 2 and ints[i] == -ints[j - 1]:
        i += 1
        j -= 1
    return Word(ints[i:j]), Word(ints[:i])


def primitive_root(w: Word) -> tuple[Word, int]:
    """Return (r, n) with w = r^n, n maximal. Identity maps to (identity, 0)."""
    core, c = cyclic_reduce(w)
    m = len(core)
    if m == 0:
        return Word(), 0
    for d in range(1, m + 1):
        if m % d != 0:
            continue
        piece = core.ints[:d]
        if piece * (m // d) == core.ints:
            # the tile concatenates with itself without cancellation, so
            # conjugating it back gives an honest root of w
            root = Word(reduce_ints(c.ints + piece + invert_ints(c.ints)))
            return root, m // d
    raise AssertionError("unreachable: d = m always tiles")


def centralizer_free(w: Word):
    """Centralizer of w in the ambient free group.

    Nontrivial w: the cyclic group on the primitive root, returned as that
    single Word. Identity: the WHOLE_GROUP sentinel.
    """
    if not w:
        return WHOLE_GROUP
    root, _ = primitive_root(w)
    return root


def is_power_of(w: Word, r: Word) -> int | None:
    """Exponent e with w = r^e, or None. Requires r nontrivial."""
    if not r:
        return 0 if not w else None
    if not w:
        return 0
    for sign in (1, -1):
        base = r if sign > 0 else r.inv()
        acc = base
        e = 1
        while len(acc) <= len(w) + 2 * len(r):
            if acc == w:
                return sign * e
            acc = acc * base
            e += 1
    return None


@dataclass(frozen=True)
class FreeHom:
    """Homomorphism from a free group, given by generator images."""

    source_rank: int
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.source_rank:
            raise ValueError("one image per generator required")

    def __call__(self, w: Word) -> Word:
        return eval_hom(self.images, w)


def eval_hom(images, w: Word) -> Word:
    """Apply the substitution generator -> images[k] to w."""
    out: list[int] = []
    for x in w.ints:
        k = abs(x) - 1
        if k >= len(images):
            raise ValueError(f"word uses generator index {k} beyond the image list")
        img = images[k].ints if x > 0 else invert_ints(images[k].ints)
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(tuple(out))


__all__ = [
    "FreeGroup",
    "WHOLE_GROUP",
    "WholeGroup",
    "cyclic_reduce",
    "primitive_root",
    "centralizer_free",
    "is_power_of",
    "FreeHom",
    "eval_hom",
    "validate_word",
]
