#!/usr/bin/env python3
"""Regenerate the golden enumeration prefixes under tests/golden/.

The enumeration order is part of the library's contract: towers stream
by total extension weight and then lexicographically (see enumerate_ice),
and limit-group presentations stream by dovetail rounds over
(tower, generating set) pairs.  These files freeze the first slice of
both streams so any reordering shows up as a test failure rather than
as silent drift.

Run from the repository root:

    python3 scripts/make_goldens.py
"""

import itertools
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from limitforge.ice import LimitEnumeration, enumerate_ice, tower_to_json
from limitforge.presentation import serialize
from limitforge.words import format_word
from limitforge.ice import tower_names

ICE_PREFIX = 30
LIMIT_PREFIX = 15

GOLDEN_DIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"


def ice_prefix():
    out = []
    for tower, pres in itertools.islice(enumerate_ice(), ICE_PREFIX):
        out.append({"tower": tower_to_json(tower), "presentation": serialize(pres)})
    return out


def limit_prefix():
    enum = LimitEnumeration()
    emissions = []
    while len(emissions) < LIMIT_PREFIX:
        emissions.extend(enum.next_round())
    out = []
    for e in emissions[:LIMIT_PREFIX]:
        names = tower_names(e.tower)
        out.append(
            {
                "presentation": serialize(e.presentation),
                "tower": tower_to_json(e.tower),
                "s_words": [format_word(w, names) for w in e.s_words],
            }
        )
    return out


def main():
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    ice = ice_prefix()
    limit = limit_prefix()
    (GOLDEN_DIR / "ice_prefix.json").write_text(json.dumps(ice, indent=2) + "\n")
    (GOLDEN_DIR / "limit_prefix.json").write_text(json.dumps(limit, indent=2) + "\n")
    print(f"wrote {ICE_PREFIX} towers and {LIMIT_PREFIX} emissions to {GOLDEN_DIR}")


if __name__ == "__main__":
    main()
