"""Finite rooted Kripke models with a non-reflexive implication clause.

A frame has a distinguished root related to every world (itself included);
nothing else is assumed about the relation.  Implication quantifies over
successors only, so a world need not satisfy the consequents of the
implications it forces — detachment is a property of reflexive points.

Frames and models are immutable; forcing is pure.  Frame enumeration is
exhaustive over the free relation pairs (the root's row is forced) and does
not quotient by isomorphism: counts are raw, duplicates only cost time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from subint.formula import And, Atom, Formula, Imp, Or, _Const, bot, top

__all__ = [
    "KripkeFrame", "KripkeModel", "KripkeProperty",
    "forces", "valid_on_model", "valid_consequence", "has_property",
    "enumerate_frames", "enumerate_valuations",
    "model_to_json", "model_from_json",
]


class KripkeProperty(Enum):
    REFLEXIVE = "reflexive"
    TRANSITIVE = "transitive"
    PERSISTENT_VALUATION = "persistent_valuation"


@dataclass(frozen=True)
class KripkeFrame:
    """Worlds with a binary relation and an omniscient root."""

    worlds: tuple[str, ...]
    root: str
    rel: frozenset[tuple[str, str]]

    def __post_init__(self):
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("duplicate world labels")
        if self.root not in self.worlds:
            raise ValueError("root is not a world")
        missing = [w for w in self.worlds if (self.root, w) not in self.rel]
        if missing:
            raise ValueError(
                f"root must relate to every world; add "
                f"{[(self.root, w) for w in missing]} to repair")
        for v, w in self.rel:
            if v not in self.worlds or w not in self.worlds:
                raise ValueError(f"relation pair ({v},{w}) uses unknown world")

    def successors(self, w: str) -> tuple[str, ...]:
        return tuple(v for v in self.worlds if (w, v) in self.rel)


@dataclass(frozen=True)
class KripkeModel:
    frame: KripkeFrame
    valuation: Mapping[str, frozenset[str]]

    def __post_init__(self):
        for p, ws in self.valuation.items():
            for w in ws:
                if w not in self.frame.worlds:
                    raise ValueError(f"valuation of {p} uses unknown world {w}")

    @property
    def worlds(self) -> tuple[str, ...]:
        return self.frame.worlds

    @property
    def root(self) -> str:
        return self.frame.root

    def truth_set(self, p: str) -> frozenset[str]:
        # unknown atoms are false everywhere (closed-world evaluation)
        return self.valuation.get(p, frozenset())


def make_model(worlds: Sequence[str], root: str,
               rel: Iterable[tuple[str, str]],
               valuation: Mapping[str, Iterable[str]]) -> KripkeModel:
    frame = KripkeFrame(tuple(worlds), root, frozenset(rel))
    return KripkeModel(frame, {p: frozenset(ws)
                               for p, ws in valuation.items()})


def forces(model: KripkeModel, world: str, f: Formula) -> bool:
    """Inductive truth; implication ranges over the world's successors."""
    if world not in model.frame.worlds:
        raise ValueError(f"unknown world {world!r}")
    return _forces(model, world, f)


def _forces(model: KripkeModel, w: str, f: Formula) -> bool:
    if isinstance(f, Atom):
        return w in model.truth_set(f.name)
    if f is top:
        return True
    if f is bot:
        return False
    if isinstance(f, And):
        return _forces(model, w, f.left) and _forces(model, w, f.right)
    if isinstance(f, Or):
        return _forces(model, w, f.left) or _forces(model, w, f.right)
    if isinstance(f, Imp):
        for v in model.frame.successors(w):
            if _forces(model, v, f.left) and not _forces(model, v, f.right):
                return False
        return True
    raise TypeError(f"cannot evaluate {f!r}")


def valid_on_model(model: KripkeModel, f: Formula) -> bool:
    return all(_forces(model, w, f) for w in model.frame.worlds)


def valid_consequence(model: KripkeModel, gamma: Sequence[Formula],
                      f: Formula) -> bool:
    """At every world forcing all of gamma, f is forced."""
    for w in model.frame.worlds:
        if all(_forces(model, w, g) for g in gamma) \
                and not _forces(model, w, f):
            return False
    return True


def has_property(obj: Union[KripkeFrame, KripkeModel],
                 prop: KripkeProperty) -> bool:
    if prop is KripkeProperty.PERSISTENT_VALUATION:
        if not isinstance(obj, KripkeModel):
            raise TypeError("valuation persistence is a model property")
        frame = obj.frame
        for p, ws in obj.valuation.items():
            for w in ws:
                for v in frame.successors(w):
                    if v not in ws:
                        return False
        return True
    frame = obj.frame if isinstance(obj, KripkeModel) else obj
    if not isinstance(frame, KripkeFrame):
        raise TypeError(f"expected a frame or model, got {type(obj).__name__}")
    rel = frame.rel
    if prop is KripkeProperty.REFLEXIVE:
        return all((w, w) in rel for w in frame.worlds)
    if prop is KripkeProperty.TRANSITIVE:
        return all((w, s) in rel
                   for w, v in rel for v2, s in rel if v2 == v)
    raise TypeError(f"unknown property {prop!r}")


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def world_labels(n: int) -> tuple[str, ...]:
    return ("g",) + tuple(f"w{i}" for i in range(1, n))


def enumerate_frames(n: int) -> Iterator[KripkeFrame]:
    """All rooted frames on n canonically labeled worlds.

    The root's row is forced by omniscience, so exactly n^2 - n relation
    pairs are free: 1 frame for n=1, 4 for n=2, 64 for n=3.
    """
    if n < 1:
        raise ValueError("need at least one world")
    worlds = world_labels(n)
    forced = [("g", w) for w in worlds]
    free = [(v, w) for v in worlds[1:] for w in worlds]
    for bits in range(1 << len(free)):
        rel = list(forced)
        for i, pair in enumerate(free):
            if bits >> i & 1:
                rel.append(pair)
        yield KripkeFrame(worlds, "g", frozenset(rel))


def enumerate_valuations(frame: KripkeFrame,
                         atoms: Sequence[str]) -> Iterator[KripkeModel]:
    """All valuations of the given atoms: (2^n)^k models."""
    worlds = frame.worlds
    n = len(worlds)
    k = len(atoms)
    for bits in range(1 << (n * k)):
        val = {}
        for i, p in enumerate(atoms):
            chunk = bits >> (i * n)
            val[p] = frozenset(w for j, w in enumerate(worlds)
                               if chunk >> j & 1)
        yield KripkeModel(frame, val)


# ---------------------------------------------------------------------------
# JSON model files
# ---------------------------------------------------------------------------

def model_to_json(model: KripkeModel) -> dict:
    return {
        "semantics": "kripke",
        "worlds": list(model.frame.worlds),
        "root": model.frame.root,
        "R": sorted([list(p) for p in model.frame.rel]),
        "V": {p: sorted(ws) for p, ws in sorted(model.valuation.items())},
    }


def model_from_json(doc: Union[str, dict]) -> KripkeModel:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("semantics") != "kripke":
        raise ValueError("not a kripke model document")
    worlds = tuple(doc["worlds"])
    root = doc["root"]
    rel = frozenset((v, w) for v, w in doc["R"])
    missing = [w for w in worlds if (root, w) not in rel]
    if missing:
        raise ValueError(
            f"root {root!r} must relate to every world (omniscience); "
            f"add pairs {[[root, w] for w in missing]} to R")
    return make_model(worlds, root, rel,
                      {p: ws for p, ws in doc.get("V", {}).items()})
