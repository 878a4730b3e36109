"""Countermodel search, correspondence sweeps and logic separation.

Everything here is finite and reproducible: exhaustive enumeration up to the
per-semantics thresholds (three worlds for Kripke frames, two for
neighborhood frames), seeded sampling beyond, and canonical formula
enumeration that names atoms by first occurrence so alpha-variants are
generated once.  Negative answers are always budget-relative; a found
countermodel is re-verified by the evaluator before it is reported.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from subint import kripke as K
from subint import nbhd as N
from subint.formula import (
    And, Formula, Fragment, Imp, and_, atom, imp, or_, print_formula,
)
from subint.registry import AXIOMS, LogicSpec, get_logic
from subint.kernel.saturate import Budget, saturate
from subint.kernel.proof import (
    NotWithinBudget, Proved, ProofScript, derives, format_script,
)

__all__ = [
    "SearchBudget", "Countermodel", "find_countermodel",
    "CorrespondenceReport", "correspondence_sweep", "CORRESPONDENCES",
    "SeparationReport", "separate", "canonical_formulas",
    "CONJECTURE_PRESETS",
]

KRIPKE_EXHAUSTIVE = 3
NBHD_EXHAUSTIVE = 2
_CANON_ATOMS = ("p", "q", "r", "s", "t", "u")


@dataclass(frozen=True)
class SearchBudget:
    max_worlds: int = 3
    max_formula_size: int = 9
    max_rounds: int = 12
    sample_count: int = 200
    seed: int = 0

    def __post_init__(self):
        if min(self.max_worlds, self.max_formula_size, self.max_rounds,
               self.sample_count) < 1:
            raise ValueError("search budget dimensions must be positive")


# ---------------------------------------------------------------------------
# Canonical formula enumeration
# ---------------------------------------------------------------------------

def canonical_formulas(max_size: int, fragment: Fragment,
                       max_atoms: int = 3) -> Iterator[Formula]:
    """All formulas up to ``max_size`` connectives, atoms named by first
    occurrence (p before q before r ...), sizes ascending.  Constants are
    not enumerated: schema-closed logics lose nothing by renaming."""
    names = [atom(n) for n in _CANON_ATOMS[:max_atoms]]
    ops = {Fragment.IMP: (imp,), Fragment.IMP_AND: (imp, and_),
           Fragment.FULL: (imp, and_, or_)}[fragment]

    def rec(size: int, used: int):
        if size == 0:
            for i in range(min(used + 1, len(names))):
                yield names[i], max(used, i + 1)
            return
        for op in ops:
            for i in range(size):
                for lf, u1 in rec(i, used):
                    for rf, u2 in rec(size - 1 - i, u1):
                        yield op(lf, rf), u2

    for size in range(max_size + 1):
        for f, _ in rec(size, 0):
            yield f


# ---------------------------------------------------------------------------
# Countermodels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Countermodel:
    semantics: str                   # "kripke" | "nbhd"
    model: Union[K.KripkeModel, N.NbhdModel]
    world: str
    formula: Formula

    def to_json(self) -> dict:
        doc = (K.model_to_json(self.model) if self.semantics == "kripke"
               else N.model_to_json(self.model))
        return {"model": doc, "world": self.world,
                "formula": print_formula(self.formula)}


def _verify_countermodel(cm: Countermodel) -> bool:
    # rebuild the model from its serialized form and re-evaluate
    if cm.semantics == "kripke":
        model = K.model_from_json(K.model_to_json(cm.model))
        return not K.forces(model, cm.world, cm.formula)
    model = N.model_from_json(N.model_to_json(cm.model))
    return not N.truth(model, cm.world, cm.formula)


def _kripke_frames(n: int, budget: SearchBudget) -> Iterator[K.KripkeFrame]:
    if n <= KRIPKE_EXHAUSTIVE:
        yield from K.enumerate_frames(n)
        return
    rng = random.Random(budget.seed + n)
    worlds = K.world_labels(n)
    free = [(v, w) for v in worlds[1:] for w in worlds]
    forced = [("g", w) for w in worlds]
    seen = set()
    for _ in range(budget.sample_count):
        rel = frozenset(forced) | frozenset(
            p for p in free if rng.random() < 0.4)
        if rel in seen:
            continue
        seen.add(rel)
        yield K.KripkeFrame(worlds, "g", rel)


def _kripke_property_set(properties: Sequence[str]) -> list[K.KripkeProperty]:
    return [K.KripkeProperty(p) for p in properties]


def _nbhd_property_set(properties: Sequence[str]) -> list[N.NbhdProperty]:
    return [N.NbhdProperty(p) for p in properties]


def find_countermodel(semantics: str, properties: Sequence[str],
                      formula: Formula,
                      budget: SearchBudget) -> Optional[Countermodel]:
    """A model of the given class falsifying ``formula`` at some world, or
    None within budget (never a validity claim beyond the exhaustive
    thresholds).  Any returned model is re-verified by the evaluator."""
    atoms = sorted(formula.atoms()) or ["p"]
    if semantics == "kripke":
        props = _kripke_property_set(properties)
        frame_props = [p for p in props
                       if p is not K.KripkeProperty.PERSISTENT_VALUATION]
        want_persistent = K.KripkeProperty.PERSISTENT_VALUATION in props
        for n in range(1, budget.max_worlds + 1):
            for frame in _kripke_frames(n, budget):
                if not all(K.has_property(frame, p) for p in frame_props):
                    continue
                for model in K.enumerate_valuations(frame, atoms):
                    if want_persistent and not K.has_property(
                            model, K.KripkeProperty.PERSISTENT_VALUATION):
                        continue
                    for w in frame.worlds:
                        if not K.forces(model, w, formula):
                            cm = Countermodel("kripke", model, w, formula)
                            if _verify_countermodel(cm):
                                return cm
        return None
    if semantics == "nbhd":
        props = _nbhd_property_set(properties)
        for n in range(1, budget.max_worlds + 1):
            if n <= NBHD_EXHAUSTIVE:
                frames: Iterator[N.NbhdFrame] = N.enumerate_frames(n, props)
            else:
                frames = N.sample_frames(n, props, budget.sample_count,
                                         budget.seed + n)
            for frame in frames:
                for assignment in itertools.product(
                        range(1 << n), repeat=len(atoms)):
                    val = {a: frozenset(frame.names_of(m))
                           for a, m in zip(atoms, assignment)}
                    model = N.NbhdModel(frame, val)
                    ts = N.truth_set(model, formula)
                    if ts != (1 << n) - 1:
                        for i, w in enumerate(frame.worlds):
                            if not ts >> i & 1:
                                cm = Countermodel("nbhd", model, w, formula)
                                if _verify_countermodel(cm):
                                    return cm
        return None
    raise ValueError(f"unknown semantics {semantics!r}")


# ---------------------------------------------------------------------------
# Correspondence sweeps
# ---------------------------------------------------------------------------

# scheme name -> (semantics, kind, property, payload)
#   axiom payload: schema names whose fresh-atom instances must all be valid
#   rule payload:  (premise schemas, conclusion schemas) as registry rules
CORRESPONDENCES: dict[str, tuple] = {
    "consequent_meet": ("nbhd", "axiom", "intersection",
                        ("consequent_meet",)),
    "antecedent_join": ("nbhd", "axiom", "union", ("antecedent_join",)),
    "trans_conj": ("nbhd", "axiom", "transitive", ("trans_conj",)),
    "consequent_meet_split": ("nbhd", "axiom", "upset",
                              ("consequent_meet_split",)),
    "antecedent_join_split": ("nbhd", "axiom", "downset",
                              ("antecedent_join_split",)),
    "absorption": ("nbhd", "axiom", "nb_condition",
                   ("absorption_fwd", "absorption_bwd")),
    "meet_mono": ("nbhd", "axiom", "weak_intersection", ("meet_mono",)),
    "pair_equiv": ("nbhd", "rule", "equivalence", "pair_equiv"),
    "pair_superset": ("nbhd", "rule", "superset_equivalence",
                      "pair_superset"),
    "conj_mp": ("kripke", "axiom", "reflexive", ("conj_mp",)),
    "imp_persist": ("kripke", "axiom", "transitive", ("imp_persist",)),
    "suffixing": ("kripke", "axiom", "transitive", ("suffixing",)),
    "atom_persist": ("kripke", "axiom", "persistent_valuation",
                     ("atom_persist",)),
}

_FRESH = ("a", "b", "c", "d", "e")


def _fresh_instance(schema_names: Sequence[str]) -> list[Formula]:
    """Instances over fresh atoms, one atom per metavariable, shared across
    the listed schemas (they come from one scheme)."""
    metavars = sorted(set().union(
        *(AXIOMS[n].metavars for n in schema_names)))
    binding = {v: atom(_FRESH[i]) for i, v in enumerate(metavars)}
    from subint.formula import _subst
    return [_subst(AXIOMS[n].template, binding) for n in schema_names]


def _rule_instances(rule_name: str) -> tuple[list[Formula], list[Formula]]:
    spec = get_logic("WF_N" if rule_name.startswith("pair_equiv")
                     else "WF_N2")
    rules = [r for r in spec.rules if r.name.startswith(rule_name)]
    metavars = sorted(set().union(*(set().union(
        *(p.metavars for p in r.premises)) for r in rules)))
    binding = {v: atom(_FRESH[i]) for i, v in enumerate(metavars)}
    from subint.formula import _subst
    premises = [_subst(p.template, binding) for p in rules[0].premises]
    conclusions = [_subst(r.conclusion.template, binding) for r in rules]
    return premises, conclusions


@dataclass(frozen=True)
class CorrespondenceReport:
    scheme: str
    semantics: str
    property: str
    worlds: int
    checked: int
    with_property: int
    valid: int
    mismatches: tuple[dict, ...]

    @property
    def exact(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme, "semantics": self.semantics,
            "property": self.property, "worlds": self.worlds,
            "checked": self.checked, "with_property": self.with_property,
            "valid": self.valid, "mismatches": list(self.mismatches),
            "exact": self.exact,
        }


def _nbhd_frame_doc(frame: N.NbhdFrame) -> dict:
    base = N.base_pairs(frame.n)
    return {w: sorted([sorted(frame.names_of(x)), sorted(frame.names_of(y))]
                      for x, y in pairs - base)
            for w, pairs in zip(frame.worlds, frame.nb)}


def correspondence_sweep(scheme: str, property_name: Optional[str] = None,
                         worlds: int = 2) -> CorrespondenceReport:
    """Exhaustively compare frame validity of a scheme against its frame
    property: one row per frame (per model for valuation-level properties),
    the mismatch list expected empty."""
    if scheme not in CORRESPONDENCES:
        raise ValueError(
            f"no correspondence registered for {scheme!r}; known: "
            f"{', '.join(sorted(CORRESPONDENCES))}")
    semantics, kind, prop, payload = CORRESPONDENCES[scheme]
    if property_name is not None and property_name != prop:
        raise ValueError(f"{scheme} corresponds to {prop}, not "
                         f"{property_name}")
    mismatches: list[dict] = []
    checked = with_property = valid_count = 0

    if semantics == "nbhd":
        if worlds > NBHD_EXHAUSTIVE:
            raise ValueError("exactness is only guaranteed for exhaustive "
                             f"sweeps (up to {NBHD_EXHAUSTIVE} worlds)")
        nprop = N.NbhdProperty(prop)
        if kind == "axiom":
            instances = _fresh_instance(payload)
            instance = instances[0] if len(instances) == 1 \
                else and_(instances[0], instances[1])
            atoms = sorted(instance.atoms())
            for frame in N.enumerate_frames(worlds):
                checked += 1
                has = N.has_property(frame, nprop)
                ok = all(
                    N.valid_on_model(N.NbhdModel(frame, {
                        a: frozenset(frame.names_of(m))
                        for a, m in zip(atoms, assignment)}), instance)
                    for assignment in itertools.product(
                        range(1 << worlds), repeat=len(atoms)))
                with_property += has
                valid_count += ok
                if has != ok:
                    mismatches.append({"frame": _nbhd_frame_doc(frame),
                                       "has_property": has, "valid": ok})
        else:
            premises, conclusions = _rule_instances(payload)
            atoms = sorted(set().union(*(f.atoms() for f in premises))
                           | set().union(*(f.atoms() for f in conclusions)))
            for frame in N.enumerate_frames(worlds):
                checked += 1
                has = N.has_property(frame, nprop)
                preserves = True
                for assignment in itertools.product(
                        range(1 << worlds), repeat=len(atoms)):
                    val = {a: frozenset(frame.names_of(m))
                           for a, m in zip(atoms, assignment)}
                    model = N.NbhdModel(frame, val)
                    if all(N.valid_on_model(model, p) for p in premises) \
                            and not all(N.valid_on_model(model, c)
                                        for c in conclusions):
                        preserves = False
                        break
                with_property += has
                valid_count += preserves
                if has != preserves:
                    mismatches.append({"frame": _nbhd_frame_doc(frame),
                                       "has_property": has,
                                       "preserves": preserves})
    else:
        if worlds > KRIPKE_EXHAUSTIVE:
            raise ValueError("exactness is only guaranteed for exhaustive "
                             f"sweeps (up to {KRIPKE_EXHAUSTIVE} worlds)")
        instance = _fresh_instance(payload)[0]
        atoms = sorted(instance.atoms())
        kprop = K.KripkeProperty(prop)
        model_level = kprop is K.KripkeProperty.PERSISTENT_VALUATION
        for frame in K.enumerate_frames(worlds):
            if model_level:
                for model in K.enumerate_valuations(frame, atoms):
                    checked += 1
                    has = K.has_property(model, kprop)
                    ok = K.valid_on_model(model, instance)
                    with_property += has
                    valid_count += ok
                    if has != ok:
                        mismatches.append({
                            "frame": sorted(map(list, frame.rel)),
                            "valuation": {p: sorted(ws) for p, ws in
                                          model.valuation.items()},
                            "has_property": has, "valid": ok})
            else:
                checked += 1
                has = K.has_property(frame, kprop)
                ok = all(K.valid_on_model(m, instance)
                         for m in K.enumerate_valuations(frame, atoms))
                with_property += has
                valid_count += ok
                if has != ok:
                    mismatches.append({
                        "frame": sorted(map(list, frame.rel)),
                        "has_property": has, "valid": ok})
    return CorrespondenceReport(scheme, semantics, prop, worlds, checked,
                                with_property, valid_count,
                                tuple(mismatches))


# ---------------------------------------------------------------------------
# Separation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    weaker: str
    stronger: str
    witness: Optional[Formula]
    script: Optional[ProofScript]          # proof in the stronger logic
    countermodel: Optional[Countermodel]   # for the weaker class
    not_derived_in_weaker: Optional[bool]  # at the matched budget
    unconfirmed: tuple[Formula, ...]       # derivation gap, no countermodel
    exhaustive_up_to: int
    budget: SearchBudget

    def to_json(self) -> dict:
        return {
            "weaker": self.weaker,
            "stronger": self.stronger,
            "witness": print_formula(self.witness) if self.witness else None,
            "script": format_script(self.script) if self.script else None,
            "countermodel": (self.countermodel.to_json()
                             if self.countermodel else None),
            "not_derived_in_weaker": self.not_derived_in_weaker,
            "unconfirmed": [print_formula(f) for f in self.unconfirmed],
            "exhaustive_up_to": self.exhaustive_up_to,
            "seed": self.budget.seed,
            "budget": {
                "max_worlds": self.budget.max_worlds,
                "max_formula_size": self.budget.max_formula_size,
                "max_rounds": self.budget.max_rounds,
                "sample_count": self.budget.sample_count,
            },
        }


def _saturation_budget(budget: SearchBudget,
                       atoms: tuple[str, ...]) -> Budget:
    return Budget(budget.max_formula_size, budget.max_rounds,
                  gen_size=min(3, budget.max_formula_size),
                  atoms=atoms)


def separate(weaker: Union[LogicSpec, str], stronger: Union[LogicSpec, str],
             budget: SearchBudget) -> SeparationReport:
    """Hunt for a formula derivable in ``stronger`` with a countermodel in
    ``weaker``'s model class.

    Candidates are canonical formulas of the shared fragment, smallest
    first; both logics are saturated at the same budget.  A witness needs a
    *verified* countermodel; candidates that are merely underivable in the
    weaker logic at this budget are reported separately as unconfirmed —
    saturation gaps are not evidence.
    """
    if isinstance(weaker, str):
        weaker = get_logic(weaker)
    if isinstance(stronger, str):
        stronger = get_logic(stronger)
    frag = weaker.fragment if stronger.fragment.admits(weaker.fragment) \
        else stronger.fragment
    atoms = _CANON_ATOMS[:3]
    sat_budget = _saturation_budget(budget, atoms)
    strong_closure = saturate(stronger, (), sat_budget)
    weak_closure = saturate(weaker, (), sat_budget)
    sem = weaker.semantics
    unconfirmed: list[Formula] = []
    for candidate in canonical_formulas(budget.max_formula_size, frag,
                                        max_atoms=3):
        if candidate not in strong_closure.theorems:
            continue
        if candidate in weak_closure.theorems:
            continue
        cm = None
        if sem.kind in ("kripke", "nbhd"):
            cm = find_countermodel(sem.kind, sorted(sem.properties),
                                   candidate, budget)
        if cm is None:
            unconfirmed.append(candidate)
            continue
        proof = derives(stronger, (), candidate, sat_budget)
        assert isinstance(proof, Proved)
        return SeparationReport(
            weaker.name, stronger.name, candidate, proof.script, cm,
            not_derived_in_weaker=True, unconfirmed=tuple(unconfirmed),
            exhaustive_up_to=budget.max_formula_size, budget=budget)
    return SeparationReport(
        weaker.name, stronger.name, None, None, None,
        not_derived_in_weaker=None, unconfirmed=tuple(unconfirmed),
        exhaustive_up_to=budget.max_formula_size, budget=budget)


# separation targets worth mining, in the implicational fragment
CONJECTURE_PRESETS: tuple[tuple[str, str], ...] = (
    ("WF_imp", "WF_N"),
    ("WF_imp", "WFI_imp"),
    ("WF_imp", "WFChat_imp"),
    ("WFChatDhat_imp", "WF_N2"),
)
