"""Finite pair-neighborhood models.

Each world carries a set of pairs (X, Y) of world-sets; an implication
A -> B holds at w exactly when the pair of truth sets of A and B is a
neighborhood of w.  Two structural invariants do all the work:

  * base condition — every pair with X a subset of Y belongs to every
    world's neighborhood set, which makes subset-entailed implications
    true everywhere;
  * omniscient root — the root carries exactly the base, so an implication
    holds at the root precisely when the antecedent's truth set is included
    in the consequent's.

World-sets are bitmasks in the canonical world order internally; the JSON
interchange format lists world names.  Truth sets are memoized per model.
Frame enumeration is exhaustive over the non-base pairs of non-root worlds
for up to two worlds (128 frames at n=2) and seeded sampling with closure
saturation beyond that.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from subint.formula import And, Atom, Formula, Imp, Or, _Const, bot, top

__all__ = [
    "NbhdFrame", "NbhdModel", "NbhdProperty",
    "truth", "truth_set", "valid_on_model", "has_property",
    "base_pairs", "complete_base", "enumerate_frames", "sample_frames",
    "model_to_json", "model_from_json", "make_model",
]


class NbhdProperty(Enum):
    INTERSECTION = "intersection"
    UNION = "union"
    TRANSITIVE = "transitive"
    UPSET = "upset"
    DOWNSET = "downset"
    EQUIVALENCE = "equivalence"
    SUPERSET_EQUIVALENCE = "superset_equivalence"
    NB_CONDITION = "nb_condition"
    WEAK_INTERSECTION = "weak_intersection"


Pair = tuple[int, int]


def base_pairs(n: int) -> frozenset[Pair]:
    """All pairs (X, Y) with X a subset of Y, as bitmasks over n worlds."""
    full = (1 << n) - 1
    return frozenset((x, y) for x in range(full + 1)
                     for y in range(full + 1) if x & ~y == 0)


@dataclass(frozen=True)
class NbhdFrame:
    worlds: tuple[str, ...]
    root: str
    nb: tuple[frozenset[Pair], ...]   # indexed like ``worlds``

    def __post_init__(self):
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("duplicate world labels")
        if self.root not in self.worlds:
            raise ValueError("root is not a world")
        if len(self.nb) != len(self.worlds):
            raise ValueError("need one neighborhood set per world")
        n = len(self.worlds)
        base = base_pairs(n)
        full = (1 << n) - 1
        for w, pairs in zip(self.worlds, self.nb):
            for x, y in pairs:
                if x > full or y > full or x < 0 or y < 0:
                    raise ValueError(f"pair ({x},{y}) at {w} out of range")
            if not base <= pairs:
                raise ValueError(
                    f"world {w} is missing base pairs (X subset of Y); "
                    "apply complete_base to repair")
        if self.nb[self.worlds.index(self.root)] != base:
            raise ValueError(
                f"root {self.root} must carry exactly the subset pairs")

    @property
    def n(self) -> int:
        return len(self.worlds)

    def index(self, w: str) -> int:
        try:
            return self.worlds.index(w)
        except ValueError:
            raise ValueError(f"unknown world {w!r}") from None

    def mask_of(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index(name)
        return m

    def names_of(self, mask: int) -> list[str]:
        return [w for i, w in enumerate(self.worlds) if mask >> i & 1]


class NbhdModel:
    """Frame plus valuation, with a per-model truth-set cache."""

    def __init__(self, frame: NbhdFrame,
                 valuation: Mapping[str, Iterable[str]]):
        self.frame = frame
        self.valuation = {p: frozenset(ws) for p, ws in valuation.items()}
        for p, ws in self.valuation.items():
            for w in ws:
                if w not in frame.worlds:
                    raise ValueError(f"valuation of {p} uses unknown world {w}")
        self._masks = {p: frame.mask_of(ws)
                       for p, ws in self.valuation.items()}
        self._tsets: dict[Formula, int] = {}

    @property
    def worlds(self) -> tuple[str, ...]:
        return self.frame.worlds

    @property
    def root(self) -> str:
        return self.frame.root


def make_model(worlds: Sequence[str], root: str,
               nb: Mapping[str, Iterable[tuple[Iterable[str], Iterable[str]]]],
               valuation: Mapping[str, Iterable[str]],
               strict: bool = False) -> NbhdModel:
    """Build a model from name-level data; unless ``strict``, the base pairs
    are added to every world first."""
    worlds = tuple(worlds)
    order = {w: i for i, w in enumerate(worlds)}

    def mask(names: Iterable[str]) -> int:
        m = 0
        for nm in names:
            if nm not in order:
                raise ValueError(f"unknown world {nm!r}")
            m |= 1 << order[nm]
        return m

    raw = {w: frozenset((mask(x), mask(y)) for x, y in nb.get(w, ()))
           for w in worlds}
    if not strict:
        raw = complete_base(worlds, root, raw)
    frame = NbhdFrame(worlds, root, tuple(raw[w] for w in worlds))
    return NbhdModel(frame, valuation)


def complete_base(worlds: Sequence[str], root: str,
                  nb: Mapping[str, frozenset[Pair]]) -> dict[str, frozenset[Pair]]:
    """Add the forced subset pairs everywhere; the root gets exactly those.

    A non-base pair at the root is rejected rather than dropped.
    """
    base = base_pairs(len(worlds))
    out = {}
    for w in worlds:
        pairs = frozenset(nb.get(w, frozenset()))
        if w == root:
            stray = pairs - base
            if stray:
                raise ValueError(
                    f"omniscient root {root} cannot carry non-subset pairs "
                    f"{sorted(stray)}")
            out[w] = base
        else:
            out[w] = pairs | base
    return out


# ---------------------------------------------------------------------------
# Truth
# ---------------------------------------------------------------------------

def truth_set(model: NbhdModel, f: Formula) -> int:
    """Bitmask of the worlds where f holds (memoized per model)."""
    got = model._tsets.get(f)
    if got is not None:
        return got
    frame = model.frame
    full = (1 << frame.n) - 1
    if isinstance(f, Atom):
        out = model._masks.get(f.name, 0)
    elif f is top:
        out = full
    elif f is bot:
        out = 0
    elif isinstance(f, And):
        out = truth_set(model, f.left) & truth_set(model, f.right)
    elif isinstance(f, Or):
        out = truth_set(model, f.left) | truth_set(model, f.right)
    elif isinstance(f, Imp):
        pair = (truth_set(model, f.left), truth_set(model, f.right))
        out = 0
        for i, pairs in enumerate(frame.nb):
            if pair in pairs:
                out |= 1 << i
    else:
        raise TypeError(f"cannot evaluate {f!r}")
    model._tsets[f] = out
    return out


def truth(model: NbhdModel, world: str, f: Formula) -> bool:
    return truth_set(model, f) >> model.frame.index(world) & 1 == 1


def valid_on_model(model: NbhdModel, f: Formula) -> bool:
    return truth_set(model, f) == (1 << model.frame.n) - 1


# ---------------------------------------------------------------------------
# Frame properties
# ---------------------------------------------------------------------------

def _required(pairs: frozenset[Pair], prop: NbhdProperty,
              n: int) -> Iterator[Pair]:
    """Pairs the property forces to be present, given the current ones."""
    full = (1 << n) - 1
    univ = range(full + 1)
    if prop is NbhdProperty.INTERSECTION:
        for x, y in pairs:
            for x2, z in pairs:
                if x2 == x:
                    yield (x, y & z)
    elif prop is NbhdProperty.UNION:
        for x, y in pairs:
            for z, y2 in pairs:
                if y2 == y:
                    yield (x | z, y)
    elif prop is NbhdProperty.TRANSITIVE:
        for x, y in pairs:
            for y2, z in pairs:
                if y2 == y:
                    yield (x, z)
    elif prop is NbhdProperty.UPSET:
        for x, y in pairs:
            for z in univ:
                if y & ~z == 0:
                    yield (x, z)
    elif prop is NbhdProperty.DOWNSET:
        for x, y in pairs:
            for z in univ:
                if z & ~x == 0:
                    yield (z, y)
    elif prop is NbhdProperty.EQUIVALENCE:
        for x, y in pairs:
            t = (~x | y) & full
            for x2 in univ:
                for y2 in univ:
                    if (~x2 | y2) & full == t:
                        yield (x2, y2)
    elif prop is NbhdProperty.SUPERSET_EQUIVALENCE:
        for x, y in pairs:
            t = (~x | y) & full
            for x2 in univ:
                for y2 in univ:
                    if t & ~((~x2 | y2) & full) == 0:
                        yield (x2, y2)
    elif prop is NbhdProperty.NB_CONDITION:
        for x, y in pairs:
            yield (x, x & y)
            for y2 in univ:
                if x & y2 == y:
                    yield (x, y2)
    elif prop is NbhdProperty.WEAK_INTERSECTION:
        for x, y in pairs:
            for z in univ:
                yield (x & z, y & z)
    else:
        raise TypeError(f"unknown property {prop!r}")


def has_property(frame: NbhdFrame, prop: NbhdProperty) -> bool:
    return all(p in pairs
               for pairs in frame.nb
               for p in _required(pairs, prop, frame.n))


def close_under(pairs: frozenset[Pair], props: Sequence[NbhdProperty],
                n: int) -> frozenset[Pair]:
    """Least superset of ``pairs`` closed under all the given properties."""
    current = set(pairs)
    while True:
        added = False
        for prop in props:
            for p in list(_required(frozenset(current), prop, n)):
                if p not in current:
                    current.add(p)
                    added = True
        if not added:
            return frozenset(current)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def world_labels(n: int) -> tuple[str, ...]:
    return ("g",) + tuple(f"w{i}" for i in range(1, n))


EXHAUSTIVE_WORLDS = 2


def enumerate_frames(n: int,
                     required: Sequence[NbhdProperty] = ()) -> Iterator[NbhdFrame]:
    """Exhaustive frame enumeration for n <= 2 (1 and 128 frames).

    The root always carries exactly the base; every non-root world ranges
    over all supersets of the base (7 free non-base pairs per world at
    n = 2).  Frames failing a required property are filtered out.
    """
    if n < 1:
        raise ValueError("need at least one world")
    if n > EXHAUSTIVE_WORLDS:
        raise ValueError(
            f"exhaustive enumeration is limited to {EXHAUSTIVE_WORLDS} "
            "worlds; use sample_frames beyond that")
    worlds = world_labels(n)
    base = base_pairs(n)
    full = (1 << n) - 1
    non_base = sorted((x, y) for x in range(full + 1)
                      for y in range(full + 1) if x & ~y != 0)
    k = len(non_base)
    free_worlds = len(worlds) - 1
    for bits in range(1 << (k * free_worlds)):
        nb = [base]
        for wi in range(free_worlds):
            chunk = bits >> (wi * k)
            extra = frozenset(p for i, p in enumerate(non_base)
                              if chunk >> i & 1)
            nb.append(base | extra)
        frame = NbhdFrame(worlds, "g", tuple(nb))
        if all(has_property(frame, p) for p in required):
            yield frame


def sample_frames(n: int, required: Sequence[NbhdProperty], count: int,
                  seed: int) -> Iterator[NbhdFrame]:
    """Seeded sampling for n > 2: random non-base pairs per non-root world,
    saturated under the required closure properties before emission.

    Every emitted frame genuinely has the required properties; the sample is
    not exhaustive and is deterministic for a fixed seed.
    """
    rng = random.Random(seed)
    worlds = world_labels(n)
    base = base_pairs(n)
    full = (1 << n) - 1
    non_base = sorted((x, y) for x in range(full + 1)
                      for y in range(full + 1) if x & ~y != 0)
    seen = set()
    emitted = 0
    attempts = 0
    while emitted < count and attempts < 50 * count:
        attempts += 1
        nb = [base]
        for _ in range(len(worlds) - 1):
            extra = frozenset(p for p in non_base
                              if rng.random() < 0.08)
            pairs = base | extra
            if required:
                pairs = close_under(pairs, required, n)
            nb.append(pairs)
        frame = NbhdFrame(worlds, "g", tuple(nb))
        key = tuple(frame.nb)
        if key in seen:
            continue
        seen.add(key)
        # closure can only add pairs, so required properties now hold; the
        # assertion below is a cheap invariant re-check
        assert all(has_property(frame, p) for p in required)
        yield frame
        emitted += 1


# ---------------------------------------------------------------------------
# JSON model files
# ---------------------------------------------------------------------------

def model_to_json(model: NbhdModel) -> dict:
    frame = model.frame
    return {
        "semantics": "nbhd",
        "worlds": list(frame.worlds),
        "root": frame.root,
        "NB": {w: sorted([sorted(frame.names_of(x)), sorted(frame.names_of(y))]
                         for x, y in pairs)
               for w, pairs in zip(frame.worlds, frame.nb)},
        "V": {p: sorted(ws) for p, ws in sorted(model.valuation.items())},
    }


def model_from_json(doc: Union[str, dict]) -> NbhdModel:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("semantics") != "nbhd":
        raise ValueError("not a neighborhood model document")
    strict = bool(doc.get("strict", False))
    nb = {w: [(x, y) for x, y in pairs]
          for w, pairs in doc.get("NB", {}).items()}
    return make_model(doc["worlds"], doc["root"], nb, doc.get("V", {}),
                      strict=strict)
