"""Catalog of subintuitionistic Hilbert systems.

Each logic is a `LogicSpec`: a language fragment, named axiom schemas, and
inference rules tagged with an application mode.  The modes encode the
restricted disciplines these systems need:

  * UNRESTRICTED   — usable anywhere in a derivation from assumptions;
  * THEOREM_ONLY   — premises must be assumption-free (theorems);
  * weak_major(i)  — premise ``i`` (an implication) must be assumption-free,
                     the other premises may depend on assumptions.  Applied to
                     modus ponens this is "weak MP".

The catalog covers the implicational fragments (``*_imp``), the
implication-conjunction fragments (``*_impand``) and the full-language
systems (``*_full`` and the named extensions), for both the Kripke-complete
family based on F and the neighborhood-complete family based on WF.

Biconditional axioms and rule conclusions are expanded at load time into
implication pairs; no logic here has a primitive <->.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from subint.formula import (
    Formula, Fragment, Schema, fragment_violation, parse_schema,
)

__all__ = [
    "Mode", "UNRESTRICTED", "THEOREM_ONLY", "weak_major",
    "RuleSpec", "SemanticsClass", "LogicSpec",
    "get_logic", "list_logics", "extend", "canonical_name", "UnknownLogic",
    "KRIPKE_PROPERTIES", "NBHD_PROPERTIES",
]


# ---------------------------------------------------------------------------
# Rule modes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mode:
    kind: str                 # "unrestricted" | "theorem_only" | "weak_major"
    major: Optional[int] = None   # premise index for weak_major

    def __str__(self):
        if self.kind == "weak_major":
            return f"weak_major({self.major})"
        return self.kind


UNRESTRICTED = Mode("unrestricted")
THEOREM_ONLY = Mode("theorem_only")


def weak_major(index: int) -> Mode:
    return Mode("weak_major", index)


@dataclass(frozen=True)
class RuleSpec:
    """An inference rule: premise schemas, a conclusion schema, and a mode.

    ``free_metavars`` lists conclusion metavariables not bound by any
    premise (the checker and the saturator enumerate those).  A telescoped
    rule shares one implication prefix across all its schemas.
    """

    name: str
    premises: tuple[Schema, ...]
    conclusion: Schema
    mode: Mode
    free_metavars: frozenset[str] = frozenset()

    @property
    def telescoped(self) -> bool:
        return self.conclusion.telescoped

    def validate(self) -> None:
        bound = frozenset().union(*(p.metavars for p in self.premises)) \
            if self.premises else frozenset()
        dangling = self.conclusion.metavars - bound - self.free_metavars
        if dangling:
            raise ValueError(
                f"rule {self.name}: conclusion metavariables {sorted(dangling)} "
                "neither bound by a premise nor declared free")
        if self.mode.kind == "weak_major":
            i = self.mode.major
            if i is None or not 0 <= i < len(self.premises):
                raise ValueError(f"rule {self.name}: bad major premise index")
            from subint.formula import Imp
            if not isinstance(self.premises[i].template, Imp):
                raise ValueError(
                    f"rule {self.name}: weak-major premise must be an implication")
        tele = {s.telescoped for s in self.premises} | {self.conclusion.telescoped}
        if len(tele) > 1:
            raise ValueError(
                f"rule {self.name}: telescope must cover all schemas or none")


KRIPKE_PROPERTIES = ("reflexive", "transitive", "persistent_valuation")
NBHD_PROPERTIES = (
    "intersection", "union", "transitive", "upset", "downset",
    "equivalence", "superset_equivalence", "nb_condition", "weak_intersection",
)


@dataclass(frozen=True)
class SemanticsClass:
    """Model class a logic is sound for: a semantics kind plus frame (or
    valuation) properties from the fixed vocabulary of that semantics."""

    kind: str                      # "kripke" | "nbhd" | "none"
    properties: frozenset[str] = frozenset()

    def describe(self) -> str:
        if self.kind == "none":
            return "none"
        props = sorted(self.properties)
        if self.kind == "kripke":
            props = ["rooted"] + props
        return f"{self.kind}{{{','.join(props)}}}"


NO_SEMANTICS = SemanticsClass("none")


@dataclass(frozen=True)
class LogicSpec:
    name: str
    fragment: Fragment
    axioms: tuple[tuple[str, Schema], ...]
    rules: tuple[RuleSpec, ...]
    semantics: SemanticsClass = NO_SEMANTICS
    # rule names that close theories in addition to the unrestricted ones
    extra_theory_rules: tuple[str, ...] = ()

    def axiom(self, name: str) -> Schema:
        for n, s in self.axioms:
            if n == name:
                return s
        raise KeyError(f"logic {self.name} has no axiom {name!r}")

    def rule(self, name: str) -> RuleSpec:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(f"logic {self.name} has no rule {name!r}")

    def theory_rule_names(self) -> tuple[str, ...]:
        names = [r.name for r in self.rules if r.mode.kind == "unrestricted"]
        for n in self.extra_theory_rules:
            if n not in names:
                names.append(n)
        return tuple(names)

    def validate(self) -> None:
        for n, s in self.axioms:
            bad = fragment_violation(s.template, self.fragment)
            if bad is not None:
                raise ValueError(
                    f"logic {self.name}: axiom {n} uses {bad!r} outside "
                    f"fragment {self.fragment.value}")
        seen_rules = set()
        for r in self.rules:
            r.validate()
            if r.name in seen_rules:
                raise ValueError(f"logic {self.name}: duplicate rule {r.name}")
            seen_rules.add(r.name)
            for s in r.premises + (r.conclusion,):
                bad = fragment_violation(s.template, self.fragment)
                if bad is not None:
                    raise ValueError(
                        f"logic {self.name}: rule {r.name} uses {bad!r} outside "
                        f"fragment {self.fragment.value}")
        if self.semantics.kind == "kripke":
            vocab = set(KRIPKE_PROPERTIES)
        elif self.semantics.kind == "nbhd":
            vocab = set(NBHD_PROPERTIES)
        else:
            vocab = set()
        unknown = self.semantics.properties - vocab
        if unknown:
            raise ValueError(
                f"logic {self.name}: unknown semantic properties {sorted(unknown)}")


# ---------------------------------------------------------------------------
# Schema and rule table
# ---------------------------------------------------------------------------

def _sch(text: str, telescoped: bool = False,
         letters: Iterable[str] = ()) -> Schema:
    return Schema(parse_schema(text), telescoped=telescoped,
                  letter_vars=frozenset(letters))


AXIOMS: dict[str, Schema] = {
    # shared across families
    "id": _sch("A -> A"),
    # transitivity-flavored axioms
    "suffixing": _sch("(A -> B) -> (B -> C) -> (A -> C)"),
    "imp_persist": _sch("(A -> B) -> C -> (A -> B)"),
    "trans_conj": _sch("(A -> B) & (B -> C) -> (A -> C)"),
    # persistence-flavored axioms
    "atom_persist": _sch("P -> top -> P", letters=("P",)),
    "a_fortiori": _sch("A -> B -> A"),
    # reflexivity-flavored axioms
    "conj_mp": _sch("A & (A -> B) -> B"),
    "contraction": _sch("(A -> (A -> B)) -> (A -> B)"),
    # lattice axioms
    "and_left": _sch("A & B -> A"),
    "and_right": _sch("A & B -> B"),
    "or_inl": _sch("A -> A | B"),
    "or_inr": _sch("B -> A | B"),
    "distrib": _sch("A & (B | C) -> (A & B) | (A & C)"),
    "exfalso": _sch("bot -> A"),
    # neighborhood closure axioms
    "consequent_meet": _sch("(A -> B) & (A -> C) -> (A -> B & C)"),
    "antecedent_join": _sch("(A -> C) & (B -> C) -> (A | B -> C)"),
    "consequent_meet_split": _sch("(A -> B & C) -> (A -> B) & (A -> C)"),
    "antecedent_join_split": _sch("(A | B -> C) -> (A -> C) & (B -> C)"),
    "absorption_fwd": _sch("(A -> B) -> (A -> A & B)"),
    "absorption_bwd": _sch("(A -> A & B) -> (A -> B)"),
    "meet_mono": _sch("(A -> B) -> (C & A -> C & B)"),
}


def _rule(name: str, premises: list[str], conclusion: str, mode: Mode,
          telescoped: bool = False, free: Iterable[str] = ()) -> RuleSpec:
    r = RuleSpec(
        name=name,
        premises=tuple(_sch(p, telescoped) for p in premises),
        conclusion=_sch(conclusion, telescoped),
        mode=mode,
        free_metavars=frozenset(free))
    r.validate()
    return r


def _mp(mode: Mode = weak_major(1)) -> RuleSpec:
    return _rule("mp", ["A", "A -> B"], "B", mode)


def _weaken() -> RuleSpec:
    return _rule("weaken", ["A"], "B -> A", THEOREM_ONLY, free=("B",))


def _chain() -> RuleSpec:
    # composition under a shared implication prefix of any length
    return _rule("chain", ["B -> C", "C -> D"], "B -> D", THEOREM_ONLY,
                 telescoped=True)


def _trans(mode: Mode = THEOREM_ONLY) -> RuleSpec:
    return _rule("trans", ["A -> B", "B -> C"], "A -> C", mode)


def _congr() -> RuleSpec:
    return _rule("congr",
                 ["A -> B", "B -> A", "C -> D", "D -> C"],
                 "(A -> C) -> (B -> D)", THEOREM_ONLY)


def _prefix_mp(mode: Mode = UNRESTRICTED) -> RuleSpec:
    # detachment under a shared implication prefix; at prefix length 0 this
    # is full modus ponens
    return _rule("prefix_mp", ["B", "B -> C"], "C", mode, telescoped=True)


def _guarded_chain() -> RuleSpec:
    return _rule("guarded_chain",
                 ["A -> (B -> C)", "A -> (C -> D)"], "A -> (B -> D)",
                 THEOREM_ONLY)


def _right_mono() -> RuleSpec:
    return _rule("right_mono", ["A -> B"], "(C -> A) -> (C -> B)",
                 THEOREM_ONLY, free=("C",))


def _left_anti() -> RuleSpec:
    return _rule("left_anti", ["A -> B"], "(B -> C) -> (A -> C)",
                 THEOREM_ONLY, free=("C",))


def _arrow_mono() -> RuleSpec:
    return _rule("arrow_mono", ["A -> B", "C -> D"], "(B -> C) -> (A -> D)",
                 THEOREM_ONLY)


def _conj(mode: Mode) -> RuleSpec:
    return _rule("conj", ["A", "B"], "A & B", mode)


def _conj_under() -> RuleSpec:
    return _rule("conj_under", ["A -> B", "A -> C"], "A -> B & C",
                 THEOREM_ONLY)


def _disj_under() -> RuleSpec:
    return _rule("disj_under", ["A -> C", "B -> C"], "A | B -> C",
                 THEOREM_ONLY)


_N_PREMISES = ["A -> B | C", "C -> A | D", "A & C & D -> B", "A & C & B -> D"]
_N_ALT_PREMISES = ["A -> B | C", "C -> A | D", "A & D -> B", "C & B -> D"]


def _pair_rules(prefix: str, premises: list[str]) -> list[RuleSpec]:
    # biconditional conclusion expanded into the two directions
    return [
        _rule(prefix + "_fwd", premises, "(A -> B) -> (C -> D)", THEOREM_ONLY),
        _rule(prefix + "_bwd", premises, "(C -> D) -> (A -> B)", THEOREM_ONLY),
    ]


def _pair_superset(name: str, premises: list[str]) -> RuleSpec:
    return _rule(name, premises, "(A -> B) -> (C -> D)", THEOREM_ONLY)


# ---------------------------------------------------------------------------
# The catalog
# ---------------------------------------------------------------------------

def _ax(*names: str) -> tuple[tuple[str, Schema], ...]:
    return tuple((n, AXIOMS[n]) for n in names)


def _kripke(*props: str) -> SemanticsClass:
    return SemanticsClass("kripke", frozenset(props))


def _nbhd(*props: str) -> SemanticsClass:
    return SemanticsClass("nbhd", frozenset(props))


def _build_catalog() -> dict[str, LogicSpec]:
    cat: dict[str, LogicSpec] = {}

    def add(spec: LogicSpec) -> LogicSpec:
        spec.validate()
        if spec.name in cat:
            raise ValueError(f"duplicate logic {spec.name}")
        cat[spec.name] = spec
        return spec

    # -- Kripke family, implicational fragment --
    f_imp = add(LogicSpec(
        "F_imp", Fragment.IMP, _ax("id"),
        (_mp(), _weaken(), _chain()),
        _kripke(), extra_theory_rules=("chain",)))

    def f_imp_plus(name, axioms=(), rules=(), semantics=NO_SEMANTICS):
        return add(LogicSpec(
            name, Fragment.IMP, f_imp.axioms + _ax(*axioms),
            f_imp.rules + tuple(rules), semantics,
            extra_theory_rules=f_imp.extra_theory_rules))

    f_imp_plus("FT_imp", ("suffixing",), semantics=_kripke("transitive"))
    f_imp_plus("FT1_imp", ("imp_persist",), semantics=_kripke("transitive"))
    f_imp_plus("FT2_imp", ("suffixing",), semantics=_kripke("transitive"))
    f_imp_plus("FP_imp", ("atom_persist",),
               semantics=_kripke("persistent_valuation"))
    f_imp_plus("FPT_imp", ("a_fortiori",),
               semantics=_kripke("transitive", "persistent_valuation"))
    fr_imp = f_imp_plus("FR_imp", rules=[_prefix_mp()],
                        semantics=_kripke("reflexive"))
    add(LogicSpec(
        "FRT_imp", Fragment.IMP, fr_imp.axioms + _ax("suffixing"),
        fr_imp.rules, _kripke("reflexive", "transitive"),
        extra_theory_rules=fr_imp.extra_theory_rules))
    add(LogicSpec(
        "FRP_imp", Fragment.IMP, fr_imp.axioms + _ax("atom_persist"),
        fr_imp.rules, _kripke("reflexive", "persistent_valuation"),
        extra_theory_rules=fr_imp.extra_theory_rules))

    # -- Kripke family, implication-conjunction fragment --
    add(LogicSpec(
        "F_impand", Fragment.IMP_AND,
        _ax("id", "and_left", "and_right", "consequent_meet", "trans_conj"),
        (_mp(), _weaken(), _conj(UNRESTRICTED)),
        _kripke()))

    # -- Kripke family, full language --
    f_full = add(LogicSpec(
        "F_full", Fragment.FULL,
        _ax("or_inl", "or_inr", "and_left", "and_right", "distrib",
            "trans_conj", "consequent_meet", "id", "antecedent_join"),
        (_conj(UNRESTRICTED), _mp(), _weaken()),
        _kripke()))

    def f_full_plus(name, axioms, semantics):
        return add(LogicSpec(
            name, Fragment.FULL, f_full.axioms + _ax(*axioms), f_full.rules,
            semantics))

    f_full_plus("FT_full", ("suffixing",), _kripke("transitive"))
    f_full_plus("FP_full", ("atom_persist",), _kripke("persistent_valuation"))
    f_full_plus("FPT_full", ("a_fortiori",),
                _kripke("transitive", "persistent_valuation"))
    f_full_plus("FR_full", ("conj_mp",), _kripke("reflexive"))
    f_full_plus("FRT_full", ("conj_mp", "suffixing"),
                _kripke("reflexive", "transitive"))
    f_full_plus("FRP_full", ("conj_mp", "atom_persist"),
                _kripke("reflexive", "persistent_valuation"))
    # contraction is interderivable with conjunctive detachment over F, so
    # the reflexive class is sound for it
    f_full_plus("FRE_full", ("contraction",), _kripke("reflexive"))

    # -- WF family, implicational fragment --
    wf_imp = add(LogicSpec(
        "WF_imp", Fragment.IMP, _ax("id"),
        (_mp(), _weaken(), _trans(), _congr()),
        _nbhd()))
    add(LogicSpec(
        "WF_imp_minus", Fragment.IMP, _ax("id"),
        (_mp(), _weaken(), _trans()),
        _nbhd()))
    add(LogicSpec(
        "WFI_imp", Fragment.IMP, _ax("id"),
        (_mp(), _weaken(), _trans(UNRESTRICTED), _congr(), _guarded_chain()),
        _nbhd("transitive")))

    def wf_imp_plus(name, rules, semantics):
        return add(LogicSpec(
            name, Fragment.IMP, wf_imp.axioms, wf_imp.rules + tuple(rules),
            semantics))

    wf_imp_plus("WFChat_imp", [_right_mono()], _nbhd("upset"))
    wf_imp_plus("WFDhat_imp", [_left_anti()], _nbhd("downset"))
    wf_imp_plus("WFChatDhat_imp", [_arrow_mono()], _nbhd("upset", "downset"))

    # -- WF family, implication-conjunction fragment --
    wf_impand = add(LogicSpec(
        "WF_impand", Fragment.IMP_AND,
        _ax("id", "and_left", "and_right"),
        (_mp(), _weaken(), _trans(), _congr(), _conj(UNRESTRICTED),
         _conj_under()),
        _nbhd()))

    def wf_impand_plus(name, axioms, semantics):
        return add(LogicSpec(
            name, Fragment.IMP_AND, wf_impand.axioms + _ax(*axioms),
            wf_impand.rules, semantics))

    wf_impand_plus("WFC_impand", ("consequent_meet",), _nbhd("intersection"))
    wf_impand_plus("WFCW_impand", ("meet_mono",), _nbhd("weak_intersection"))
    wf_impand_plus("WFNb_impand", ("absorption_fwd", "absorption_bwd"),
                   _nbhd("nb_condition"))

    # -- WF family, full language --
    wf_full = add(LogicSpec(
        "WF_full", Fragment.FULL,
        _ax("or_inl", "or_inr", "and_left", "and_right", "distrib",
            "exfalso", "id"),
        (_conj_under(), _disj_under(), _mp(), _conj(THEOREM_ONLY),
         _weaken(), _trans(), _congr()),
        _nbhd()))

    def wf_full_plus(name, axioms=(), rules=(), props=()):
        return add(LogicSpec(
            name, Fragment.FULL, wf_full.axioms + _ax(*axioms),
            wf_full.rules + tuple(rules), _nbhd(*props)))

    wf_full_plus("WF_N", rules=_pair_rules("pair_equiv", _N_PREMISES),
                 props=("equivalence",))
    wf_full_plus("WF_N2",
                 rules=[_pair_superset("pair_superset",
                                       ["C -> A | D", "A & C & B -> D"])],
                 props=("superset_equivalence",))
    wf_full_plus("WF_Nprime", rules=_pair_rules("pair_equiv_alt",
                                                _N_ALT_PREMISES),
                 props=("equivalence",))
    wf_full_plus("WF_N2prime",
                 rules=[_pair_superset("pair_superset_alt",
                                       ["C -> A | D", "C & B -> D"])],
                 props=("superset_equivalence",))
    wf_full_plus("WFI_full", axioms=("trans_conj",), props=("transitive",))
    wf_full_plus("WFC_full", axioms=("consequent_meet",),
                 props=("intersection",))
    wf_full_plus("WFD_full", axioms=("antecedent_join",), props=("union",))
    wf_full_plus("WFChat_full", axioms=("consequent_meet_split",),
                 props=("upset",))
    wf_full_plus("WFDhat_full", axioms=("antecedent_join_split",),
                 props=("downset",))
    wf_full_plus("WFChatDhat_full",
                 axioms=("consequent_meet_split", "antecedent_join_split"),
                 props=("upset", "downset"))
    wf_full_plus("WFNb_full", axioms=("absorption_fwd", "absorption_bwd"),
                 props=("nb_condition",))
    wf_full_plus("WFCW_full", axioms=("meet_mono",),
                 props=("weak_intersection",))
    wf_full_plus("WF_NC", axioms=("consequent_meet",),
                 rules=_pair_rules("pair_equiv", _N_PREMISES),
                 props=("equivalence", "intersection"))
    wf_full_plus("WFChatC_full",
                 axioms=("consequent_meet_split", "consequent_meet"),
                 props=("upset", "intersection"))

    return cat


_CATALOG = _build_catalog()

_ALIASES = {
    "f": "F_full",
    "wf": "WF_full",
    "ft": "FT_imp",
    "ft1": "FT1_imp",
    "ft2": "FT2_imp",
    "bpc": "FPT_full",
    "ftp": "FPT_full",
    "fptfull": "FPT_full",
    "wfchat": "WFChat_full",
    "wfdhat": "WFDhat_full",
    "wfchatdhat": "WFChatDhat_full",
    "wfhat": "WFChat_full",
    "wfnb": "WFNb_full",
    "wfcw": "WFCW_full",
    "wfc": "WFC_full",
    "wfd": "WFD_full",
    "wfi": "WFI_full",
    "wfnc": "WF_NC",
    "wfchatc": "WFChatC_full",
    "wfminus": "WF_imp_minus",
    "wfimpminus": "WF_imp_minus",
}


class UnknownLogic(KeyError):
    def __init__(self, name: str):
        super().__init__(
            f"unknown logic {name!r}; catalog: {', '.join(sorted(_CATALOG))}")
        self.name = name


def _norm(name: str) -> str:
    s = name.strip().lower()
    for frm, to in (("ĉ", "chat"), ("ĥ", "dhat"),  # ĉ, ĥ just in case
                    ("ĉ", "chat"), ("d̂", "dhat"),
                    ("^c", "chat"), ("^d", "dhat"),
                    ("₂", "2"), ("ₙ", "n"),
                    ("′", "prime"), ("'", "prime")):
        s = s.replace(frm, to)
    return "".join(ch for ch in s if ch.isalnum())


_NORMALIZED = {_norm(k): k for k in _CATALOG}


def canonical_name(name: str) -> str:
    if name in _CATALOG:
        return name
    key = _norm(name)
    if key in _ALIASES:
        return _ALIASES[key]
    if key in _NORMALIZED:
        return _NORMALIZED[key]
    raise UnknownLogic(name)


def get_logic(name: str, *, schematic_p: bool = False,
              full_mp_unrestricted: bool = False) -> LogicSpec:
    """Look up a logic.

    ``schematic_p`` lifts the propositional-letter restriction on the
    persistence axiom, letting it instantiate at compound formulas.
    ``full_mp_unrestricted`` switches modus ponens in the full Kripke
    systems from weak MP to fully unrestricted (both readings of the base
    system exist in the literature; weak MP is the default here).
    """
    spec = _CATALOG[canonical_name(name)]
    if schematic_p:
        axioms = tuple(
            (n, replace(s, letter_vars=frozenset()) if s.letter_vars else s)
            for n, s in spec.axioms)
        if axioms != spec.axioms:
            spec = replace(spec, axioms=axioms)
    if full_mp_unrestricted and spec.name.startswith("F") \
            and spec.fragment is Fragment.FULL:
        rules = tuple(
            replace(r, mode=UNRESTRICTED) if r.name == "mp" else r
            for r in spec.rules)
        spec = replace(spec, rules=rules)
    return spec


def list_logics() -> list[tuple[str, Fragment, str]]:
    """The full catalog as (name, fragment, semantics description) rows."""
    return [(n, s.fragment, s.semantics.describe())
            for n, s in sorted(_CATALOG.items())]


def extend(base: LogicSpec | str,
           axioms: Iterable[tuple[str, Schema]] = (),
           rules: Iterable[RuleSpec] = (),
           name: Optional[str] = None,
           fragment: Optional[Fragment] = None,
           semantics: SemanticsClass = NO_SEMANTICS) -> LogicSpec:
    """A new in-memory logic: ``base`` plus extra axioms and rules.

    Additions must fit the base fragment unless a wider ``fragment`` is given
    explicitly.  The extension's semantics class is not inherited (added
    axioms need not be sound for the base class); pass one if known.
    """
    if isinstance(base, str):
        base = get_logic(base)
    axioms = tuple(axioms)
    rules = tuple(rules)
    frag = fragment or base.fragment
    if not frag.admits(base.fragment):
        raise ValueError(f"fragment {frag.value} does not include the base "
                         f"fragment {base.fragment.value}")
    derived = name or (base.name + "+" + "+".join(
        [n for n, _ in axioms] + [r.name for r in rules]))
    spec = LogicSpec(
        derived, frag, base.axioms + axioms, base.rules + rules,
        semantics, extra_theory_rules=base.extra_theory_rules)
    spec.validate()
    return spec
