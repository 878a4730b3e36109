"""Bounded forward saturation for the catalog logics.

Derivability is approximated by a two-stratum fixpoint under an explicit
budget:

  * the theorem stratum closes the axiom instances under *every* rule —
    with no assumptions in sight all modes collapse;
  * the derived stratum closes assumptions plus theorems under the
    unrestricted rules and under weak-major rules whose designated premise
    is drawn from the theorem stratum.

Everything is generated, never searched backwards: rule premises are matched
against the current strata, axiom schemas are instantiated over a size-capped
formula pool, and metavariables that appear only in a rule's conclusion range
over that pool.  Modus ponens additionally consumes axiom instances on
demand: a minor premise is matched against the antecedent of each axiom
schema, which keeps large axiom instances reachable without enumerating them.

All budgets are hard bounds, and exhausting one is not an error: the result
then carries ``saturated=False`` and is a budget-relative under-approximation.
The closure is deterministic for a given budget — rules fire in name order,
formulas in insertion order, and each round is merged synchronously.

Rule schemas are compiled to closures once per run; the inner join loops are
tuned deliberately, closure sets in the hundreds of thousands are routine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from subint.formula import (
    And, Atom, Formula, Fragment, Imp, MetaVar, Or, Schema, _Const,
    and_, atom, bot, imp, in_fragment, match_template, or_, subformulas,
    telescope, telescope_split, top, _subst,
)
from subint.registry import LogicSpec, RuleSpec, get_logic

__all__ = ["Budget", "ClosureSet", "saturate", "shape_wfminus",
           "theory_violations", "formula_pool"]

_DEFAULT_ATOMS = ("p", "q")
_DEFAULT_MAX_FORMULAS = 2_000_000


@dataclass(frozen=True)
class Budget:
    """Saturation budget.

    ``max_size`` caps the connective count of every rule-derived formula and
    ``max_rounds`` the number of closure rounds per stratum; both are
    required.  The optional knobs trade completeness for tractability, and
    every one of them keeps the result a sound under-approximation:

      * ``gen_size``: size cap for the instantiation pool that axiom
        metavariables and conclusion-only rule metavariables range over
        (default: ``max_size``, the exact budget semantics);
      * ``max_formulas``: total cap on generated formulas;
      * ``atoms``: extra alphabet atoms (assumption and goal atoms are always
        included; without any, p and q are used);
      * ``axiom_size``: size cap for eagerly generated axiom instances
        (default ``max_size``; may exceed it, which admits big axiom
        instances without widening the rule-derived universe).
    """

    max_size: int
    max_rounds: int
    gen_size: Optional[int] = None
    max_formulas: Optional[int] = None
    atoms: Optional[tuple[str, ...]] = None
    axiom_size: Optional[int] = None

    def __post_init__(self):
        if self.max_size < 1 or self.max_rounds < 1:
            raise ValueError("budget dimensions must be positive")

    @property
    def pool_size(self) -> int:
        return self.max_size if self.gen_size is None else self.gen_size

    @property
    def formula_cap(self) -> int:
        return self.max_formulas or _DEFAULT_MAX_FORMULAS

    @property
    def instance_size(self) -> int:
        return self.max_size if self.axiom_size is None else self.axiom_size

    def scaled(self, factor: int, offset: int) -> "Budget":
        return Budget(self.max_size * factor + offset,
                      self.max_rounds * factor + offset,
                      self.gen_size, self.max_formulas, self.atoms,
                      self.axiom_size)


# justification tags
J_AXIOM = "axiom"          # (J_AXIOM, axiom_name, binding)
J_MP_AXIOM = "mp_axiom"    # (J_MP_AXIOM, rule_name, axiom_name, binding, minor)
J_RULE = "rule"            # (J_RULE, rule_name, premises, binding, prefix)
J_ASSUME = "assume"        # (J_ASSUME,)


@dataclass
class ClosureSet:
    """Budgeted derivability closure with reconstructible justifications."""

    logic: LogicSpec
    assumptions: tuple[Formula, ...]
    budget: Budget
    theorems: set[Formula]
    derived: set[Formula]
    saturated: bool
    theorem_order: list[Formula] = field(repr=False, default_factory=list)
    derived_order: list[Formula] = field(repr=False, default_factory=list)
    justification: dict[Formula, tuple] = field(repr=False,
                                                default_factory=dict)

    def __contains__(self, f: Formula) -> bool:
        return f in self.derived

    def is_theorem(self, f: Formula) -> bool:
        return f in self.theorems


# ---------------------------------------------------------------------------
# Formula pools
# ---------------------------------------------------------------------------

_FRAGMENT_OPS = {
    Fragment.IMP: (imp,),
    Fragment.IMP_AND: (imp, and_),
    Fragment.FULL: (imp, and_, or_),
}


def formula_pool(leaves: Sequence[Formula], max_size: int,
                 fragment: Fragment) -> list[list[Formula]]:
    """All formulas over ``leaves`` grouped by connective count."""
    pool = _LazyPool(list(leaves), max_size, fragment)
    return [pool.level(k) for k in range(max_size + 1)]


class _LazyPool:
    """Formulas over a leaf alphabet, by connective count, built on demand.

    Levels near the size cap are enormous and usually dead weight (a free
    metavariable of a conclusion never gets the whole size budget), so they
    are only materialized when actually enumerated.
    """

    def __init__(self, leaves: list[Formula], max_size: int,
                 fragment: Fragment):
        self.ops = _FRAGMENT_OPS[fragment]
        self.max = max_size
        self.levels: list[Optional[list[Formula]]] = \
            [None] * (max_size + 1)
        self.extra: list[list[Formula]] = [[] for _ in range(max_size + 1)]
        self.levels[0] = list(leaves)

    def level(self, k: int) -> list[Formula]:
        if k > self.max:
            return []
        got = self.levels[k]
        if got is None:
            out: list[Formula] = []
            for op in self.ops:
                for i in range(k):
                    for a in self.level(i):
                        for b in self.level(k - 1 - i):
                            out.append(op(a, b))
            out.extend(self.extra[k])
            self.levels[k] = out
            got = out
        return got

    def add_extra(self, f: Formula) -> None:
        if f.size <= self.max:
            if self.levels[f.size] is None:
                self.extra[f.size].append(f)
            elif f not in self.levels[f.size]:
                self.levels[f.size].append(f)


def _alphabet(logic: LogicSpec, budget: Budget,
              seeds: Iterable[Formula]) -> list[Formula]:
    names = set(budget.atoms or ())
    consts: set[Formula] = set()
    seeds = list(seeds)
    for f in seeds:
        names |= f.atoms()
        for g in subformulas(f):
            if isinstance(g, _Const):
                consts.add(g)
    for _, sch in logic.axioms:
        for g in subformulas(sch.template):
            if isinstance(g, _Const):
                consts.add(g)
    if not names and budget.atoms is None:
        names = set(_DEFAULT_ATOMS)
    leaves: list[Formula] = [atom(n) for n in sorted(names)]
    leaves += [c for c in (top, bot) if c in consts]
    return leaves


# ---------------------------------------------------------------------------
# Template compilation
# ---------------------------------------------------------------------------

_PREFIX = "@prefix"
_OP_OF = {Imp: imp, And: and_, Or: or_}


def _template_stats(template: Formula) -> tuple[int, dict[str, int]]:
    """Skeleton connective count and per-metavar occurrence counts; an
    instance has size  base + sum occ[v] * size(v)."""
    base = 0
    occ: dict[str, int] = {}
    stack = [template]
    while stack:
        f = stack.pop()
        if isinstance(f, MetaVar):
            occ[f.name] = occ.get(f.name, 0) + 1
        elif isinstance(f, (Imp, And, Or)):
            base += 1
            stack.append(f.left)
            stack.append(f.right)
    return base, occ


def _compile_matcher(template: Formula, letter_vars: frozenset[str],
                     seen: Optional[set] = None) -> Callable:
    """Compile a template into  fn(f, out: dict) -> bool  extending ``out``."""
    if seen is None:
        seen = set()
    if isinstance(template, MetaVar):
        name = template.name
        if name in seen:
            def check(f, out):
                return out[name] is f
            return check
        seen.add(name)
        if name in letter_vars:
            def bind_letter(f, out):
                if type(f) is Atom:
                    out[name] = f
                    return True
                return False
            return bind_letter

        def bind(f, out):
            out[name] = f
            return True
        return bind
    if isinstance(template, (Atom, _Const)):
        def leaf(f, out):
            return f is template
        return leaf
    cls = type(template)
    lm = _compile_matcher(template.left, letter_vars, seen)
    rm = _compile_matcher(template.right, letter_vars, seen)

    def node(f, out):
        return type(f) is cls and lm(f.left, out) and rm(f.right, out)
    return node


def _compile_builder(template: Formula) -> Callable:
    """Compile a template into  fn(binding: dict) -> Formula."""
    if isinstance(template, MetaVar):
        name = template.name

        def var(b):
            return b[name]
        return var
    if isinstance(template, (Atom, _Const)):
        def leaf(b):
            return template
        return leaf
    op = _OP_OF[type(template)]
    lb = _compile_builder(template.left)
    rb = _compile_builder(template.right)

    def node(b):
        return op(lb(b), rb(b))
    return node


class _CompiledSchema:
    __slots__ = ("schema", "matcher", "builder", "telescoped", "vars")

    def __init__(self, schema: Schema):
        self.schema = schema
        self.matcher = _compile_matcher(schema.template, schema.letter_vars)
        self.builder = _compile_builder(schema.template)
        self.telescoped = schema.telescoped
        vs = sorted(schema.metavars)
        if schema.telescoped:
            vs = [_PREFIX] + vs
        self.vars = tuple(vs)

    def match(self, f: Formula) -> list[dict]:
        out = []
        if self.telescoped:
            prefix: list[Formula] = []
            while True:
                b: dict = {}
                if self.matcher(f, b):
                    b[_PREFIX] = tuple(prefix)
                    out.append(b)
                if not isinstance(f, Imp):
                    break
                prefix.append(f.left)
                f = f.right
        else:
            b = {}
            if self.matcher(f, b):
                out.append(b)
        return out

    def build(self, binding: dict) -> Formula:
        f = self.builder(binding)
        if self.telescoped:
            pfx = binding[_PREFIX]
            for a in reversed(pfx):
                f = imp(a, f)
        return f


class _CompiledRule:
    """Join plans, compiled schemas and size bookkeeping for one rule."""

    def __init__(self, rule: RuleSpec):
        self.rule = rule
        self.name = rule.name
        self.mode = rule.mode
        self.premises = tuple(_CompiledSchema(s) for s in rule.premises)
        self.conclusion = _CompiledSchema(rule.conclusion)
        self.premise_vars = tuple(p.vars for p in self.premises)
        self.conc_base, self.conc_occ = _template_stats(
            rule.conclusion.template)
        self.free_vars = tuple(sorted(rule.free_metavars))
        self.is_mp_like = (
            len(rule.premises) == 2
            and isinstance(rule.premises[0].template, MetaVar)
            and isinstance(rule.premises[1].template, Imp)
            and not rule.conclusion.telescoped
            and isinstance(rule.premises[1].template.left, MetaVar)
            and rule.premises[1].template.left.name
            == rule.premises[0].template.name)
        self.plans = tuple(self._make_plan(i)
                           for i in range(len(self.premises)))

    def weight_of(self, binding: dict, vars_: Iterable[str]) -> int:
        """Conclusion-size contribution of the given binding variables."""
        occ = self.conc_occ
        w = 0
        for v in vars_:
            if v == _PREFIX:
                for a in binding[v]:
                    w += a.size + 1
            else:
                w += occ.get(v, 0) * binding[v].size
        return w

    def _make_plan(self, start: int) -> tuple:
        bound = set(self.premise_vars[start])
        remaining = [j for j in range(len(self.premises)) if j != start]
        plan: list[tuple] = []
        while remaining:
            best, best_step, best_rank = None, None, None
            for j in remaining:
                vs = set(self.premise_vars[j])
                shared = tuple(sorted(vs & bound))
                new = tuple(sorted(vs - bound))
                if not new:
                    step, rank = ("check", j), (0, 0)
                else:
                    step, rank = ("probe", j, shared, new), (1, -len(shared))
                if best_rank is None or rank < best_rank:
                    best, best_step, best_rank = j, step, rank
            plan.append(best_step)
            bound |= set(self.premise_vars[best])
            remaining.remove(best)
        return tuple(plan)


# ---------------------------------------------------------------------------
# The engine
# ---------------------------------------------------------------------------

class _Stratum:
    __slots__ = ("members", "order")

    def __init__(self):
        self.members: set[Formula] = set()
        self.order: list[Formula] = []

    def add(self, f: Formula) -> None:
        self.members.add(f)
        self.order.append(f)


# Specialized appliers for the three rule shapes that dominate closures.
# They reproduce exactly what the generic join machinery would do, minus
# its bookkeeping.

class _FastWrap:
    """premise A  =>  conclusion  FREE -> A   (a fortiori / weakening)."""

    __slots__ = ("name", "pvar", "fvar")

    @staticmethod
    def accepts(cr: _CompiledRule) -> bool:
        if len(cr.premises) != 1 or cr.conclusion.telescoped \
                or cr.premises[0].telescoped or len(cr.free_vars) != 1:
            return False
        p = cr.premises[0].schema.template
        c = cr.conclusion.schema.template
        return (isinstance(p, MetaVar) and isinstance(c, Imp)
                and isinstance(c.left, MetaVar)
                and c.left.name == cr.free_vars[0]
                and c.right is p)

    def __init__(self, cr: _CompiledRule):
        self.name = cr.name
        self.pvar = cr.premises[0].schema.template.name
        self.fvar = cr.free_vars[0]

    def index(self, f: Formula, eng: "_Engine") -> None:
        pass

    def trigger(self, f: Formula, eng: "_Engine") -> None:
        emit = eng.emit_fast
        pool = eng.pool
        name, pvar, fvar = self.name, self.pvar, self.fvar
        for size in range(min(pool.max, eng.max_size - 1 - f.size) + 1):
            for b in pool.level(size):
                g = imp(b, f)
                if emit(g):
                    eng.just.setdefault(
                        g, (J_RULE, name, (f,), {pvar: f, fvar: b}, ()))


class _FastChain2:
    """premises  A -> B,  B -> C  =>  conclusion  A -> C."""

    __slots__ = ("name", "va", "vb", "vc", "lefts", "rights")

    @staticmethod
    def accepts(cr: _CompiledRule) -> bool:
        if len(cr.premises) != 2 or cr.conclusion.telescoped or cr.free_vars:
            return False
        p0 = cr.premises[0].schema.template
        p1 = cr.premises[1].schema.template
        c = cr.conclusion.schema.template
        if not all(isinstance(t, Imp) for t in (p0, p1, c)):
            return False
        parts = [p0.left, p0.right, p1.left, p1.right, c.left, c.right]
        if not all(isinstance(t, MetaVar) for t in parts):
            return False
        a, b, b2, c2, ca, cc = [t.name for t in parts]
        return (b == b2 and a == ca and c2 == cc
                and len({a, b, c2}) == 3)

    def __init__(self, cr: _CompiledRule):
        self.name = cr.name
        p0 = cr.premises[0].schema.template
        p1 = cr.premises[1].schema.template
        self.va, self.vb, self.vc = (p0.left.name, p0.right.name,
                                     p1.right.name)
        # lefts[m][size] = [a: a -> m in stratum]; rights[m][size] likewise
        self.lefts: dict[Formula, list] = {}
        self.rights: dict[Formula, list] = {}

    @staticmethod
    def _put(table: dict, key: Formula, value: Formula, nsizes: int) -> None:
        buckets = table.get(key)
        if buckets is None:
            buckets = [None] * nsizes
            table[key] = buckets
        lst = buckets[value.size]
        if lst is None:
            buckets[value.size] = [value]
        else:
            lst.append(value)

    def index(self, f: Formula, eng: "_Engine") -> None:
        if type(f) is Imp:
            n = eng.max_size + 1
            self._put(self.lefts, f.right, f.left, n)
            self._put(self.rights, f.left, f.right, n)

    def trigger(self, f: Formula, eng: "_Engine") -> None:
        if type(f) is not Imp:
            return
        emit = eng.emit_fast
        just = eng.just
        name, va, vb, vc = self.name, self.va, self.vb, self.vc
        x, y = f.left, f.right
        # as first premise: partners y -> c
        buckets = self.rights.get(y)
        if buckets is not None:
            for size in range(min(len(buckets), eng.max_size - x.size)):
                lst = buckets[size]
                if lst:
                    for c in lst:
                        g = imp(x, c)
                        if emit(g):
                            just.setdefault(
                                g, (J_RULE, name, (f, imp(y, c)),
                                    {va: x, vb: y, vc: c}, ()))
        # as second premise: partners a -> x
        buckets = self.lefts.get(x)
        if buckets is not None:
            for size in range(min(len(buckets), eng.max_size - y.size)):
                lst = buckets[size]
                if lst:
                    for a in lst:
                        g = imp(a, y)
                        if emit(g):
                            just.setdefault(
                                g, (J_RULE, name, (imp(a, x), f),
                                    {va: a, vb: x, vc: y}, ()))


class _FastMP:
    """premises  A,  A -> B  =>  B, with the major possibly frozen."""

    __slots__ = ("cr", "name", "va", "vb", "majors", "major_frozen")

    @staticmethod
    def accepts(cr: _CompiledRule) -> bool:
        return cr.is_mp_like and isinstance(
            cr.conclusion.schema.template, MetaVar)

    def __init__(self, cr: _CompiledRule, eng: "_Engine"):
        self.cr = cr
        self.name = cr.name
        t = cr.premises[1].schema.template
        self.va, self.vb = t.left.name, t.right.name
        self.majors: dict[Formula, list[Formula]] = {}
        self.major_frozen = (eng.major_from is not None
                             and cr.mode.kind == "weak_major"
                             and cr.mode.major == 1)
        if self.major_frozen:
            for g in eng.major_from.order:
                if type(g) is Imp:
                    self.majors.setdefault(g.left, []).append(g.right)

    def index(self, f: Formula, eng: "_Engine") -> None:
        if not self.major_frozen and type(f) is Imp:
            self.majors.setdefault(f.left, []).append(f.right)

    def trigger(self, f: Formula, eng: "_Engine") -> None:
        emit = eng.emit_fast
        just = eng.just
        name, va, vb = self.name, self.va, self.vb
        rights = self.majors.get(f)
        if rights is not None:
            for r in rights:
                if emit(r):
                    just.setdefault(
                        r, (J_RULE, name, (f, imp(f, r)), {va: f, vb: r}, ()))
        if not self.major_frozen and type(f) is Imp \
                and f.left in eng.s.members:
            r = f.right
            if emit(r):
                just.setdefault(
                    r, (J_RULE, name, (f.left, f), {va: f.left, vb: r}, ()))
        eng._fire_axiom_majors(self.cr, f)


class _Engine:
    """One closure phase.  ``major_from`` (when set) is a frozen stratum that
    weak-major premises must come from; triggers run over ``self.s``."""

    def __init__(self, logic: LogicSpec, budget: Budget,
                 rules: Sequence[RuleSpec],
                 pool: _LazyPool,
                 justification: dict[Formula, tuple],
                 major_from: Optional[_Stratum] = None,
                 counter: Optional[list[int]] = None):
        self.logic = logic
        self.budget = budget
        self.max_size = budget.max_size
        self.pool = pool
        self.just = justification
        self.major_from = major_from
        self.s = _Stratum()
        self.buffer: list[Formula] = []
        self.buffer_set: set[Formula] = set()
        self.budget_cut = False
        self.counter = counter if counter is not None else [0]
        self.axiom_schemas = [
            (name, sch, _compile_matcher(sch.template.left, sch.letter_vars),
             _compile_builder(sch.template.right),
             _template_stats(sch.template.right))
            for name, sch in logic.axioms
            if isinstance(sch.template, Imp)]
        # specialized appliers for the hot rule shapes; the generic join
        # machinery handles the rest
        self.fast: list = []
        generic: list[_CompiledRule] = []
        for r in sorted(rules, key=lambda r: r.name):
            cr = _CompiledRule(r)
            if _FastMP.accepts(cr):
                self.fast.append(_FastMP(cr, self))
            elif _FastChain2.accepts(cr):
                self.fast.append(_FastChain2(cr))
            elif _FastWrap.accepts(cr):
                self.fast.append(_FastWrap(cr))
            else:
                generic.append(cr)
        self.crules = generic
        # skip trigger/indexing for weak-major premise positions: those
        # premises come from the frozen stratum
        self.skip_pos: set[tuple[int, int]] = set()
        if major_from is not None:
            for ri, cr in enumerate(self.crules):
                if cr.mode.kind == "weak_major":
                    self.skip_pos.add((ri, cr.mode.major))
        # indexes[(rule_idx, pos, keyvars)] = {key: {weight: [binding,...]}}
        self.indexes: dict[tuple, dict] = {}
        self.pos_indexes: dict[tuple[int, int], list[tuple]] = {}
        for ri, cr in enumerate(self.crules):
            for plan in cr.plans:
                for step in plan:
                    if step[0] == "probe":
                        _, j, shared, new = step
                        key = (ri, j, shared)
                        if key not in self.indexes:
                            self.indexes[key] = {}
                            self.pos_indexes.setdefault((ri, j), []).append(
                                (key, shared, new))

    # -- emission ------------------------------------------------------------

    def emit(self, f: Formula, just: Callable[[], tuple]) -> None:
        """Admit a conclusion; ``just`` is only evaluated when it is new."""
        if f in self.s.members or f in self.buffer_set:
            return
        if self.counter[0] >= self.budget.formula_cap:
            self.budget_cut = True
            return
        self.counter[0] += 1
        self.buffer_set.add(f)
        self.buffer.append(f)
        self.just.setdefault(f, just())

    def emit_fast(self, f: Formula) -> bool:
        """Admission check for the specialized appliers: True when ``f`` is
        newly buffered (the caller then records the justification)."""
        if f in self.s.members or f in self.buffer_set:
            return False
        if self.counter[0] >= self.budget.formula_cap:
            self.budget_cut = True
            return False
        self.counter[0] += 1
        self.buffer_set.add(f)
        self.buffer.append(f)
        return True

    def seed(self, formulas: Iterable[tuple[Formula, tuple]],
             count: bool = True) -> None:
        for f, just in formulas:
            if f in self.s.members or f in self.buffer_set:
                continue
            if count and self.counter[0] >= self.budget.formula_cap:
                self.budget_cut = True
                break
            if count:
                self.counter[0] += 1
            self.buffer_set.add(f)
            self.buffer.append(f)
            self.just.setdefault(f, just)

    def preload(self, formulas: Iterable[Formula]) -> None:
        """Install formulas without triggering joins (theorems inside the
        derived phase: their mutual consequences are already theorems)."""
        for f in formulas:
            if f not in self.s.members:
                self.s.add(f)
                self._index(f)

    # -- index maintenance -----------------------------------------------

    def _index(self, f: Formula) -> None:
        for h in self.fast:
            h.index(f, self)
        for ri, cr in enumerate(self.crules):
            for pos in range(len(cr.premises)):
                if (ri, pos) in self.skip_pos:
                    continue
                lists = self.pos_indexes.get((ri, pos))
                if not lists:
                    continue
                for b in cr.premises[pos].match(f):
                    for key3, shared, new in lists:
                        idx = self.indexes[key3]
                        k = tuple(b[v] for v in shared)
                        w = cr.weight_of(b, new)
                        bucket = idx.get(k)
                        if bucket is None:
                            bucket = {}
                            idx[k] = bucket
                        bucket.setdefault(w, []).append(b)

    # -- joins -----------------------------------------------------------

    def _trigger(self, f: Formula) -> None:
        for h in self.fast:
            h.trigger(f, self)
        for ri, cr in enumerate(self.crules):
            for pos in range(len(cr.premises)):
                if (ri, pos) in self.skip_pos:
                    continue
                for b in cr.premises[pos].match(f):
                    lower = cr.conc_base + cr.weight_of(b, b.keys())
                    if lower <= self.max_size:
                        self._join(ri, cr, cr.plans[pos], 0, b, lower)
            if cr.is_mp_like:
                self._fire_axiom_majors(cr, f)

    def _source_members(self, ri: int, cr: _CompiledRule, pos: int):
        if (ri, pos) in self.skip_pos:
            return self.major_from.members
        return self.s.members

    def _join(self, ri: int, cr: _CompiledRule, plan: tuple, step_i: int,
              binding: dict, lower: int) -> None:
        if step_i == len(plan):
            self._conclude(cr, binding, lower)
            return
        step = plan[step_i]
        j = step[1]
        if step[0] == "check":
            inst = cr.premises[j].build(binding)
            if inst in self._source_members(ri, cr, j):
                self._join(ri, cr, plan, step_i + 1, binding, lower)
            return
        _, j, shared, new = step
        if (ri, j) in self.skip_pos:
            candidates = self._major_bindings(ri, cr, j, shared, binding)
        else:
            candidates = self.indexes[(ri, j, shared)].get(
                tuple(binding[v] for v in shared))
        if not candidates:
            return
        allow = self.max_size - lower
        join = self._join
        next_i = step_i + 1
        for w in range(allow + 1):
            for cand in candidates.get(w, ()):
                nb = dict(binding)
                for v in new:
                    nb[v] = cand[v]
                join(ri, cr, plan, next_i, nb, lower + w)

    def _major_bindings(self, ri: int, cr: _CompiledRule, j: int,
                        shared: tuple, binding: dict) -> Optional[dict]:
        # weak-major premises from the frozen theorem stratum, indexed lazily
        key = ("major", ri, j, shared)
        table = self.indexes.get(key)
        if table is None:
            table = {}
            self.indexes[key] = table
            newvars = tuple(v for v in cr.premise_vars[j] if v not in shared)
            for f in self.major_from.order:
                for b in cr.premises[j].match(f):
                    k = tuple(b[v] for v in shared)
                    w = cr.weight_of(b, newvars)
                    table.setdefault(k, {}).setdefault(w, []).append(b)
        return table.get(tuple(binding[v] for v in shared))

    # -- conclusions -------------------------------------------------------

    def _conclude(self, cr: _CompiledRule, binding: dict, lower: int) -> None:
        free = cr.free_vars
        if free and any(v not in binding for v in free):
            self._enum_free(cr, binding,
                            [v for v in free if v not in binding], 0,
                            self.max_size - lower)
            return
        self._emit_conclusion(cr, binding)

    def _enum_free(self, cr: _CompiledRule, binding: dict, free: list,
                   i: int, allow: int) -> None:
        v = free[i]
        occ = max(cr.conc_occ.get(v, 0), 1)
        pool_max = min(self.pool.max, allow // occ)
        last = i + 1 == len(free)
        for size in range(pool_max + 1):
            for val in self.pool.level(size):
                binding[v] = val
                if last:
                    self._emit_conclusion(cr, binding)
                else:
                    self._enum_free(cr, binding, free, i + 1,
                                    allow - occ * size)
        binding.pop(v, None)

    def _emit_conclusion(self, cr: _CompiledRule, binding: dict) -> None:
        f = cr.conclusion.build(binding)
        if f in self.s.members or f in self.buffer_set:
            return
        if self.counter[0] >= self.budget.formula_cap:
            self.budget_cut = True
            return
        self.counter[0] += 1
        self.buffer_set.add(f)
        self.buffer.append(f)
        if f not in self.just:
            premises = tuple(p.build(binding) for p in cr.premises)
            clean = {k: v for k, v in binding.items() if k != _PREFIX}
            self.just[f] = (J_RULE, cr.name, premises, clean,
                            binding.get(_PREFIX, ()))

    # -- axiom majors for modus ponens --------------------------------------

    def _fire_axiom_majors(self, cr: _CompiledRule, minor: Formula) -> None:
        for ax_name, sch, left_match, right_build, (base, occ) \
                in self.axiom_schemas:
            b: dict = {}
            if not left_match(minor, b):
                continue
            allow = self.max_size - base - sum(
                occ.get(v, 0) * f.size for v, f in b.items())
            if allow < 0:
                continue
            unbound = [v for v in sorted(occ) if v not in b]
            self._enum_axiom_right(cr, ax_name, sch, right_build, occ, b,
                                   unbound, 0, allow, minor)

    def _enum_axiom_right(self, cr, ax_name, sch, right_build, occ, binding,
                          unbound, i, allow, minor):
        if i == len(unbound):
            conclusion = right_build(binding)
            if conclusion.size <= self.max_size:
                self.emit(conclusion,
                          lambda: (J_MP_AXIOM, cr.name, ax_name,
                                   dict(binding), minor))
            return
        v = unbound[i]
        letters = v in sch.letter_vars
        w = max(occ.get(v, 1), 1)
        limit = min(self.pool.max, allow // w)
        for size in range(limit + 1):
            for val in self.pool.level(size):
                if letters and not isinstance(val, Atom):
                    continue
                binding[v] = val
                self._enum_axiom_right(cr, ax_name, sch, right_build, occ,
                                       binding, unbound, i + 1,
                                       allow - w * size, minor)
        binding.pop(v, None)

    # -- driving ---------------------------------------------------------

    def run(self) -> bool:
        """Close the stratum; True when a fixpoint was reached in budget."""
        rounds = 0
        while self.buffer:
            if rounds >= self.budget.max_rounds:
                return False
            rounds += 1
            frontier = self.buffer
            self.buffer = []
            self.buffer_set = set()
            for f in frontier:
                self.s.add(f)
                self._index(f)
            for f in frontier:
                self._trigger(f)
        return not self.budget_cut


# ---------------------------------------------------------------------------
# Axiom instantiation
# ---------------------------------------------------------------------------

def _axiom_instances(logic: LogicSpec, pool: _LazyPool, size_cap: int):
    """Eagerly instantiate each axiom schema over the pool, capped by the
    instance size.  Deterministic: axioms in catalog order, assignments in
    pool order, sizes ascending."""
    for name, sch in logic.axioms:
        base, occ = _template_stats(sch.template)
        build = _compile_builder(sch.template)
        metavars = sorted(occ)
        binding: dict[str, Formula] = {}

        def rec(i: int, allow: int):
            if i == len(metavars):
                yield (build(binding), (J_AXIOM, name, dict(binding)))
                return
            v = metavars[i]
            w = occ[v]
            if v in sch.letter_vars:
                for val in pool.level(0):
                    if isinstance(val, Atom):
                        binding[v] = val
                        yield from rec(i + 1, allow)
                binding.pop(v, None)
                return
            limit = min(pool.max, allow // w)
            for size in range(limit + 1):
                for val in pool.level(size):
                    binding[v] = val
                    yield from rec(i + 1, allow - w * size)
            binding.pop(v, None)

        yield from rec(0, size_cap - base)


# ---------------------------------------------------------------------------
# saturate
# ---------------------------------------------------------------------------

def saturate(logic: LogicSpec | str, gamma: Sequence[Formula],
             budget: Budget, *, goal: Optional[Formula] = None) -> ClosureSet:
    """Two-stratum budgeted closure of ``gamma`` under ``logic``.

    The theorem stratum is independent of ``gamma``.  ``goal`` (used by
    ``derives``) only widens the instantiation pool with its subformulas;
    it never steers the closure.
    """
    if isinstance(logic, str):
        logic = get_logic(logic)
    gamma = tuple(gamma)
    for f in gamma:
        if not in_fragment(f, logic.fragment):
            raise ValueError(f"assumption {f} outside fragment "
                             f"{logic.fragment.value}")
        if f.size > budget.max_size:
            raise ValueError(f"assumption {f} exceeds the size budget")

    seeds_for_alphabet = list(gamma) + ([goal] if goal is not None else [])
    leaves = _alphabet(logic, budget, seeds_for_alphabet)
    pool = _LazyPool(leaves, min(budget.pool_size, budget.max_size),
                     logic.fragment)
    # assumption/goal subformulas are always available as instantiands
    extra: set[Formula] = set()
    for f in seeds_for_alphabet:
        extra |= subformulas(f)
    for g in sorted(extra, key=lambda x: (x.size, str(x))):
        if in_fragment(g, logic.fragment):
            pool.add_extra(g)

    justification: dict[Formula, tuple] = {}
    counter = [0]

    # phase 1: theorems under every rule
    eng_t = _Engine(logic, budget, logic.rules, pool, justification,
                    counter=counter)
    eng_t.seed(_axiom_instances(logic, pool, budget.instance_size))
    t_saturated = eng_t.run()
    theorems = eng_t.s.members
    theorem_order = eng_t.s.order

    # phase 2: assumptions + theorems under unrestricted/weak-major rules
    d_rules = [r for r in logic.rules if r.mode.kind != "theorem_only"]
    eng_d = _Engine(logic, budget, d_rules, pool, justification,
                    major_from=eng_t.s, counter=counter)
    eng_d.preload(theorem_order)
    eng_d.seed(((f, (J_ASSUME,)) for f in gamma), count=False)
    d_saturated = eng_d.run()

    derived = eng_d.s.members
    cut = eng_t.budget_cut or eng_d.budget_cut
    return ClosureSet(
        logic=logic, assumptions=gamma, budget=budget,
        theorems=theorems, derived=derived,
        saturated=t_saturated and d_saturated and not cut,
        theorem_order=theorem_order, derived_order=eng_d.s.order,
        justification=justification)


# ---------------------------------------------------------------------------
# Shape of the weak system's theorems
# ---------------------------------------------------------------------------

def shape_wfminus(f: Formula) -> bool:
    """True iff ``f`` is  b1 -> ... -> bn -> (a -> a)  for some n >= 0.

    Such formulas are exactly the theorems of the equivalence-rule-free
    implicational base system (cross-checked exhaustively by the test
    suite against saturation).
    """
    if not in_fragment(f, Fragment.IMP):
        raise ValueError("shape check is defined on the implicational fragment")
    while isinstance(f, Imp):
        if f.left is f.right:
            return True
        f = f.right
    return False


# ---------------------------------------------------------------------------
# Theory diagnostics
# ---------------------------------------------------------------------------

def theory_violations(logic: LogicSpec | str, candidate: Iterable[Formula],
                      budget: Budget, limit: int = 20) -> list[dict]:
    """Closure-condition failures of a finite candidate theory, within budget.

    Checks, against the theorem stratum at ``budget``:
      (a) closure under the logic's theory rules (the unrestricted ones plus
          the family's designated closure rules),
      (b) detachment along proved implications: if A is in the candidate and
          A -> B is a theorem, B must be in the candidate,
      (c) the theorems themselves belong to the candidate.

    Returns at most ``limit`` violation records; an empty list means no
    failure is witnessed within this budget.
    """
    if isinstance(logic, str):
        logic = get_logic(logic)
    cand = set(candidate)
    closure = saturate(logic, (), budget)
    out: list[dict] = []

    def report(kind: str, **info):
        if len(out) < limit:
            out.append({"kind": kind, **info})

    for t in closure.theorem_order:
        if t not in cand:
            report("missing_theorem", formula=t)
            break
    for t in closure.theorem_order:
        if isinstance(t, Imp) and t.left in cand and t.right not in cand:
            report("detachment", implication=t, member=t.left,
                   missing=t.right)
            if len(out) >= limit:
                return out
    theory_rules = [logic.rule(n) for n in logic.theory_rule_names()]
    cand_list = sorted(cand, key=lambda f: (f.size, str(f)))
    for rule in theory_rules:
        cr = _CompiledRule(rule)
        for combo in itertools.product(cand_list, repeat=len(rule.premises)):
            binding: dict = {}
            if not _match_combo(cr, combo, binding):
                continue
            if any(v not in binding for v in cr.free_vars):
                continue  # free-variable conclusions are not closure conditions
            conclusion = cr.conclusion.build(binding)
            if conclusion.size <= budget.max_size and conclusion not in cand:
                report("rule_closure", rule=rule.name, premises=list(combo),
                       missing=conclusion)
                if len(out) >= limit:
                    return out
    return out


def _match_combo(cr: _CompiledRule, combo: Sequence[Formula],
                 binding: dict) -> bool:
    def rec(i: int, b: dict) -> Optional[dict]:
        if i == len(combo):
            return b
        for m in cr.premises[i].match(combo[i]):
            nb = dict(b)
            ok = True
            for k, v in m.items():
                if k in nb:
                    if nb[k] != v:
                        ok = False
                        break
                else:
                    nb[k] = v
            if ok:
                got = rec(i + 1, nb)
                if got is not None:
                    return got
        return None

    got = rec(0, {})
    if got is None:
        return False
    binding.update(got)
    return True
