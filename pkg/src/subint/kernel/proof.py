"""Explicit Hilbert-style proof scripts and their checker.

A script names a logic, lists assumptions and optional hypothetical-theorem
premises, and gives numbered lines, each justified as an axiom instance, an
assumption, a premise, or a rule application over earlier lines.  The checker
enforces the logic's rule modes: a theorem-only rule needs assumption-free
premise lines, a weak-major rule needs its designated implication premise
assumption-free, and assumption-freeness propagates transitively through the
justification DAG (premises count as assumption-free: they stand for formulas
already proved elsewhere).

The text format, one step per line after the headers::

    logic: F_imp
    assume: p
    premise: p -> q
    1. p -> q ; premise
    2. (q -> r) -> p -> q ; rule weaken 1 [B = q -> r]
    3. (q -> r) -> q -> r ; axiom id
    4. (q -> r) -> p -> r ; rule chain 2,3

Bindings in ``[...]`` are optional; the checker infers them by matching when
absent.  ``#`` starts a comment line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from subint.formula import (
    Formula, Fragment, Imp, Schema, fragment_violation, in_fragment,
    match_template, parse, print_formula, telescope, telescope_split, _subst,
)
from subint.registry import LogicSpec, RuleSpec, get_logic
from subint.kernel.saturate import (
    Budget, ClosureSet, J_ASSUME, J_AXIOM, J_MP_AXIOM, J_RULE, saturate,
)

__all__ = [
    "Axiom", "Assumption", "Premise", "RuleApp", "Line", "ProofScript",
    "Verdict", "check_proof", "parse_script", "format_script",
    "extract_script", "derives", "Proved", "NotWithinBudget",
]


# ---------------------------------------------------------------------------
# Script data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    name: str
    binding: Optional[dict[str, Formula]] = None


@dataclass(frozen=True)
class Assumption:
    pass


@dataclass(frozen=True)
class Premise:
    pass


@dataclass(frozen=True)
class RuleApp:
    name: str
    premises: tuple[int, ...]
    binding: Optional[dict[str, Formula]] = None


Justification = Union[Axiom, Assumption, Premise, RuleApp]


@dataclass(frozen=True)
class Line:
    index: int
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class ProofScript:
    """Numbered derivation; the last line is the conclusion."""

    logic: str
    lines: tuple[Line, ...]
    assumptions: tuple[Formula, ...] = ()
    premises: tuple[Formula, ...] = ()

    @property
    def conclusion(self) -> Optional[Formula]:
        return self.lines[-1].formula if self.lines else None


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    conclusion: Optional[Formula] = None
    line: Optional[int] = None
    reason: Optional[str] = None

    def __str__(self):
        if self.accepted:
            return f"Accepted: {print_formula(self.conclusion)}"
        return f"Rejected at line {self.line}: {self.reason}"


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

def _strip_prefix(f: Formula, prefix: Sequence[Formula]) -> Optional[Formula]:
    for a in prefix:
        if not isinstance(f, Imp) or f.left is not a:
            return None
        f = f.right
    return f


def _match_with_prefix(schema: Schema, f: Formula, binding: dict,
                       prefix: Optional[tuple]) -> Iterable[tuple]:
    """Yield (binding, prefix) extensions matching ``f`` against ``schema``.

    The binding dict is copied per solution; ``prefix`` constrains a
    telescoped match when already fixed by an earlier premise.
    """
    if not schema.telescoped:
        b = dict(binding)
        if match_template(schema.template, f, b, schema.letter_vars):
            yield b, prefix
        return
    if prefix is not None:
        rest = _strip_prefix(f, prefix)
        if rest is None:
            return
        b = dict(binding)
        if match_template(schema.template, rest, b, schema.letter_vars):
            yield b, prefix
        return
    for pfx, rest in telescope_split(f):
        b = dict(binding)
        if match_template(schema.template, rest, b, schema.letter_vars):
            yield b, pfx


def _rule_application_ok(rule: RuleSpec, premise_formulas: Sequence[Formula],
                         conclusion: Formula,
                         given: Optional[dict[str, Formula]]) -> bool:
    """Does some assignment instantiate the rule's premises and conclusion to
    the given formulas?  Explicit bindings, when supplied, are honored."""

    def rec(i: int, binding: dict, prefix) -> bool:
        if i == len(rule.premises):
            for b, pfx in _match_with_prefix(rule.conclusion, conclusion,
                                             binding, prefix):
                missing = rule.conclusion.metavars - set(b)
                if not missing:
                    return True
            return False
        for b, pfx in _match_with_prefix(rule.premises[i],
                                         premise_formulas[i], binding,
                                         prefix):
            if rec(i + 1, b, pfx):
                return True
        return False

    start = dict(given) if given else {}
    # a telescoped rule with no premises fixes the prefix at the conclusion
    return rec(0, start, None if rule.telescoped else ())


def check_proof(script: ProofScript, *, schematic_p: bool = False,
                full_mp_unrestricted: bool = False) -> Verdict:
    """Check every line; Rejected carries the earliest failure."""
    try:
        logic = get_logic(script.logic, schematic_p=schematic_p,
                          full_mp_unrestricted=full_mp_unrestricted)
    except KeyError as e:
        return Verdict(False, line=0, reason=str(e))
    for f in script.assumptions + script.premises:
        bad = fragment_violation(f, logic.fragment)
        if bad is not None:
            return Verdict(False, line=0,
                           reason=f"header formula {print_formula(f)} uses "
                                  f"{bad!r} outside the logic's fragment")
    if not script.lines:
        return Verdict(False, line=0, reason="empty script")

    assumption_free: dict[int, bool] = {}
    formulas: dict[int, Formula] = {}
    for line in script.lines:
        i, f, just = line.index, line.formula, line.justification
        bad = fragment_violation(f, logic.fragment)
        if bad is not None:
            return Verdict(False, line=i,
                           reason=f"formula uses {bad!r} outside the "
                                  "logic's fragment")
        if isinstance(just, Axiom):
            try:
                schema = logic.axiom(just.name)
            except KeyError:
                return Verdict(False, line=i,
                               reason=f"unknown axiom {just.name!r}")
            binding = dict(just.binding) if just.binding else {}
            if not match_template(schema.template, f, binding,
                                  schema.letter_vars):
                return Verdict(False, line=i,
                               reason=f"not an instance of axiom {just.name}")
            assumption_free[i] = True
        elif isinstance(just, Assumption):
            if f not in script.assumptions:
                return Verdict(False, line=i,
                               reason="formula is not among the assumptions")
            assumption_free[i] = False
        elif isinstance(just, Premise):
            if f not in script.premises:
                return Verdict(False, line=i,
                               reason="formula is not among the premises")
            assumption_free[i] = True
        elif isinstance(just, RuleApp):
            try:
                rule = logic.rule(just.name)
            except KeyError:
                return Verdict(False, line=i,
                               reason=f"unknown rule {just.name!r}")
            if len(just.premises) != len(rule.premises):
                return Verdict(False, line=i,
                               reason=f"rule {just.name} takes "
                                      f"{len(rule.premises)} premises")
            for j in just.premises:
                if j not in formulas:
                    return Verdict(False, line=i,
                                   reason=f"premise line {j} does not precede "
                                          f"line {i}")
            prem = [formulas[j] for j in just.premises]
            if not _rule_application_ok(rule, prem, f, just.binding):
                return Verdict(False, line=i,
                               reason=f"no instantiation of rule {just.name} "
                                      "matches these premises and conclusion")
            mode = rule.mode
            if mode.kind == "theorem_only":
                for j in just.premises:
                    if not assumption_free[j]:
                        return Verdict(
                            False, line=i,
                            reason=f"rule {just.name} applies to theorems "
                                   f"only, but line {j} depends on an "
                                   "assumption")
            elif mode.kind == "weak_major":
                j = just.premises[mode.major]
                if not assumption_free[j]:
                    return Verdict(
                        False, line=i,
                        reason=f"weak {just.name}: major premise line {j} "
                               "depends on an assumption")
            assumption_free[i] = all(assumption_free[j]
                                     for j in just.premises)
        else:
            return Verdict(False, line=i, reason="unknown justification")
        formulas[i] = f
    return Verdict(True, conclusion=script.lines[-1].formula)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_LINE_RE = re.compile(r"(\d+)\.\s*(.*?)\s*;\s*(.*)\Z")
_BINDING_RE = re.compile(r"\[(.*)\]\s*\Z")


def _parse_binding(text: str) -> dict[str, Formula]:
    binding = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, value = part.partition("=")
        binding[name.strip()] = parse(value.strip())
    return binding


def parse_script(text: str) -> ProofScript:
    logic = None
    assumptions: list[Formula] = []
    premises: list[Formula] = []
    lines: list[Line] = []
    for raw in text.splitlines():
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("logic:"):
            logic = stripped[len("logic:"):].strip()
            continue
        if stripped.startswith("assume:"):
            assumptions.append(parse(stripped[len("assume:"):]))
            continue
        if stripped.startswith("premise:"):
            premises.append(parse(stripped[len("premise:"):]))
            continue
        m = _LINE_RE.match(stripped)
        if not m:
            raise ValueError(f"bad proof line: {raw!r}")
        index = int(m.group(1))
        formula = parse(m.group(2))
        just_text = m.group(3).strip()
        binding = None
        bm = _BINDING_RE.search(just_text)
        if bm:
            binding = _parse_binding(bm.group(1))
            just_text = just_text[:bm.start()].strip()
        parts = just_text.split()
        if not parts:
            raise ValueError(f"missing justification on line {index}")
        kind = parts[0]
        if kind == "axiom":
            just: Justification = Axiom(parts[1], binding)
        elif kind == "assume":
            just = Assumption()
        elif kind == "premise":
            just = Premise()
        elif kind == "rule":
            idxs = tuple(int(s) for s in parts[2].split(",")) \
                if len(parts) > 2 else ()
            just = RuleApp(parts[1], idxs, binding)
        else:
            raise ValueError(f"unknown justification {kind!r} on line {index}")
        lines.append(Line(index, formula, just))
    if logic is None:
        raise ValueError("script is missing a 'logic:' header")
    return ProofScript(logic, tuple(lines), tuple(assumptions),
                       tuple(premises))


def _format_binding(binding: dict[str, Formula]) -> str:
    inner = ", ".join(f"{k} = {print_formula(v)}"
                      for k, v in sorted(binding.items()))
    return f" [{inner}]"


def format_script(script: ProofScript) -> str:
    out = [f"logic: {script.logic}"]
    out += [f"assume: {print_formula(f)}" for f in script.assumptions]
    out += [f"premise: {print_formula(f)}" for f in script.premises]
    for line in script.lines:
        j = line.justification
        if isinstance(j, Axiom):
            text = f"axiom {j.name}"
            if j.binding:
                text += _format_binding(j.binding)
        elif isinstance(j, Assumption):
            text = "assume"
        elif isinstance(j, Premise):
            text = "premise"
        else:
            text = f"rule {j.name} {','.join(map(str, j.premises))}"
            if j.binding:
                text += _format_binding(j.binding)
        out.append(f"{line.index}. {print_formula(line.formula)} ; {text}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Extraction from a closure
# ---------------------------------------------------------------------------

def extract_script(closure: ClosureSet, goal: Formula) -> ProofScript:
    """A checkable script for a formula of a closure, walking the recorded
    justifications (premise lines before conclusions, duplicates shared)."""
    if goal not in closure.derived:
        raise ValueError(f"{print_formula(goal)} is not in the closure")
    logic = closure.logic
    lines: list[Line] = []
    line_of: dict[Formula, int] = {}
    af: dict[int, bool] = {}  # assumption-free flags, mirrors the checker

    def axiom_major(name: str, binding: dict[str, Formula]) -> Formula:
        return _subst(logic.axiom(name).template, binding)

    def emit(formula: Formula, just: Justification, free: bool) -> int:
        idx = len(lines) + 1
        lines.append(Line(idx, formula, just))
        line_of.setdefault(formula, idx)
        af[idx] = free
        return idx

    def visit(f: Formula) -> int:
        got = line_of.get(f)
        if got is not None:
            return got
        j = closure.justification[f]
        kind = j[0]
        if kind == J_AXIOM:
            return emit(f, Axiom(j[1], dict(j[2])), True)
        if kind == J_ASSUME:
            return emit(f, Assumption(), False)
        if kind == J_MP_AXIOM:
            _, rule_name, ax_name, binding, minor = j
            p_minor = visit(minor)
            major = axiom_major(ax_name, binding)
            p_major = line_of.get(major)
            if p_major is None or not af[p_major]:
                p_major = emit(major, Axiom(ax_name, dict(binding)), True)
            return emit(f, RuleApp(rule_name, (p_minor, p_major)),
                        af[p_minor])
        if kind == J_RULE:
            _, rule_name, premises, binding, _prefix = j
            idxs = tuple(visit(p) for p in premises)
            return emit(f, RuleApp(rule_name, idxs, dict(binding)),
                        all(af[i] for i in idxs))
        raise AssertionError(f"bad justification {j!r}")

    # iterative expansion to keep deep derivations off the Python stack
    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 100_000))
    try:
        visit(goal)
    finally:
        sys.setrecursionlimit(old)
    return ProofScript(logic.name, tuple(lines),
                       assumptions=closure.assumptions)


# ---------------------------------------------------------------------------
# derives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Proved:
    script: ProofScript


@dataclass(frozen=True)
class NotWithinBudget:
    """Explicitly budget-relative: never a claim of underivability."""

    budget: Budget
    saturated: bool

    def __bool__(self):
        return False


def _budget_ladder(budget: Budget, gamma: Sequence[Formula],
                   goal: Formula) -> list[Budget]:
    """Cheap-first schedule of sub-budgets ending at the full budget.

    Derivability is monotone in the budget, so success at any rung proves
    success at the full budget; the rungs only save work.
    """
    need = max([goal.size] + [f.size for f in gamma] + [3])
    sizes = sorted({min(budget.max_size, need + 2),
                    min(budget.max_size, 2 * need + 6),
                    budget.max_size})
    rounds = sorted({min(budget.max_rounds, 8), budget.max_rounds})
    ladder = []
    for s in sizes:
        for r in rounds:
            ladder.append(Budget(s, r, budget.gen_size, budget.max_formulas,
                                 budget.atoms, budget.axiom_size))
    return ladder


def derives(logic: LogicSpec | str, gamma: Sequence[Formula], goal: Formula,
            budget: Budget) -> Union[Proved, NotWithinBudget]:
    """Forward-saturation derivability with proof extraction.

    Proved scripts are re-checked by ``check_proof`` before being returned.
    A negative answer is always relative to the budget.
    """
    if isinstance(logic, str):
        logic = get_logic(logic)
    if not in_fragment(goal, logic.fragment):
        raise ValueError(f"goal {print_formula(goal)} outside fragment "
                         f"{logic.fragment.value}")
    last = None
    for sub in _budget_ladder(budget, gamma, goal):
        closure = saturate(logic, gamma, sub, goal=goal)
        last = closure
        if goal in closure.derived:
            script = extract_script(closure, goal)
            verdict = check_proof(script)
            if not verdict.accepted:
                raise AssertionError(
                    f"extracted script failed its own check: {verdict}")
            return Proved(script)
    return NotWithinBudget(budget, last.saturated if last else False)
