"""Propositional formulas over ->, &, | with the constants top and bot.

Formulas are immutable and hash-consed: building the same shape twice yields
the *same* object, so equality is pointer equality and every formula carries
its connective count precomputed.  The derivability kernel leans on this —
closure sets routinely hold a million formulas.

Besides the plain AST this module owns:

  * the text grammar (precedence & > | > ->, with -> right-associative) and
    the minimal-parenthesis printer, mutual inverses;
  * language fragments (implication-only, implication-conjunction, full) and
    membership checks;
  * schemas: formula-shaped templates whose leaves may be metavariables,
    optionally prefixed by an unbounded chain of implication antecedents
    ("telescope"), with instantiation and complete matching.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

__all__ = [
    "Formula", "Atom", "Top", "Bot", "Imp", "And", "Or", "MetaVar",
    "atom", "imp", "and_", "or_", "top", "bot", "metavar",
    "Fragment", "in_fragment", "fragment_violation",
    "ParseError", "FragmentError", "parse", "parse_schema", "print_formula",
    "telescope", "telescope_split", "subformulas",
    "Schema", "Assignment", "instantiate", "match_schema", "match_template",
]

# ---------------------------------------------------------------------------
# AST with hash-consing
# ---------------------------------------------------------------------------

_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_META_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


class Formula:
    """Base class; construct through the factory functions only."""

    __slots__ = ("size", "_hash")

    def __eq__(self, other):  # interning makes identity canonical
        return self is other

    def __ne__(self, other):
        return self is not other

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<{print_formula(self)}>"

    def __str__(self):
        return print_formula(self)

    def atoms(self) -> frozenset[str]:
        return _atoms(self)

    def is_schematic(self) -> bool:
        return _has_metavar(self)


class Atom(Formula):
    __slots__ = ("name",)

    def __reduce__(self):
        return (atom, (self.name,))


class _Const(Formula):
    __slots__ = ("name",)

    def __reduce__(self):
        return (_const, (self.name,))


class Imp(Formula):
    __slots__ = ("left", "right")

    def __reduce__(self):
        return (imp, (self.left, self.right))


class And(Formula):
    __slots__ = ("left", "right")

    def __reduce__(self):
        return (and_, (self.left, self.right))


class Or(Formula):
    __slots__ = ("left", "right")

    def __reduce__(self):
        return (or_, (self.left, self.right))


class MetaVar(Formula):
    """Schema-only leaf.  Never occurs in a concrete formula."""

    __slots__ = ("name",)

    def __reduce__(self):
        return (metavar, (self.name,))


_interned: dict[tuple, Formula] = {}


def _intern_leaf(cls, name: str, key: tuple) -> Formula:
    f = _interned.get(key)
    if f is None:
        f = cls.__new__(cls)
        f.name = name
        f.size = 0
        f._hash = hash(key)
        _interned[key] = f
    return f


def atom(name: str) -> Atom:
    if not _ATOM_RE.match(name):
        raise ValueError(f"bad atom name {name!r}: want [a-z][a-z0-9_]*")
    return _intern_leaf(Atom, name, ("at", name))


def metavar(name: str) -> MetaVar:
    if not _META_RE.match(name):
        raise ValueError(f"bad metavariable name {name!r}")
    return _intern_leaf(MetaVar, name, ("mv", name))


def _const(name: str) -> _Const:
    return _intern_leaf(_Const, name, ("ct", name))


top = _const("top")
bot = _const("bot")


def _intern_bin(cls, tag: str, left: Formula, right: Formula) -> Formula:
    key = (tag, left, right)
    f = _interned.get(key)
    if f is None:
        f = cls.__new__(cls)
        f.left = left
        f.right = right
        f.size = left.size + right.size + 1
        f._hash = hash(key)
        _interned[key] = f
    return f


def imp(left: Formula, right: Formula) -> Imp:
    return _intern_bin(Imp, "->", left, right)


def and_(left: Formula, right: Formula) -> And:
    return _intern_bin(And, "&", left, right)


def or_(left: Formula, right: Formula) -> Or:
    return _intern_bin(Or, "|", left, right)


_atoms_cache: dict[Formula, frozenset[str]] = {}


def _atoms(f: Formula) -> frozenset[str]:
    got = _atoms_cache.get(f)
    if got is not None:
        return got
    if isinstance(f, Atom):
        out = frozenset((f.name,))
    elif isinstance(f, (_Const, MetaVar)):
        out = frozenset()
    else:
        out = _atoms(f.left) | _atoms(f.right)
    _atoms_cache[f] = out
    return out


def _has_metavar(f: Formula) -> bool:
    if isinstance(f, MetaVar):
        return True
    if isinstance(f, (Atom, _Const)):
        return False
    return _has_metavar(f.left) or _has_metavar(f.right)


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (Imp, And, Or)):
            stack.append(g.left)
            stack.append(g.right)
    return out


# ---------------------------------------------------------------------------
# Fragments
# ---------------------------------------------------------------------------

class Fragment(Enum):
    """Language fragments, ordered by inclusion.

    IMP admits atoms, top and ->; IMP_AND adds &; FULL adds | and bot.
    bot belongs to the full language only.
    """

    IMP = "imp"
    IMP_AND = "impand"
    FULL = "full"

    def admits(self, other: "Fragment") -> bool:
        order = {Fragment.IMP: 0, Fragment.IMP_AND: 1, Fragment.FULL: 2}
        return order[other] <= order[self]


def fragment_violation(f: Formula, fr: Fragment) -> Optional[str]:
    """Name of the first constructor of ``f`` that ``fr`` does not admit."""
    if isinstance(f, (Atom, MetaVar)):
        return None
    if f is top:
        return None
    if f is bot:
        return None if fr is Fragment.FULL else "bot"
    if isinstance(f, Or) and fr is not Fragment.FULL:
        return "|"
    if isinstance(f, And) and fr is Fragment.IMP:
        return "&"
    return fragment_violation(f.left, fr) or fragment_violation(f.right, fr)


def in_fragment(f: Formula, fr: Fragment) -> bool:
    return fragment_violation(f, fr) is None


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class FragmentError(ValueError):
    def __init__(self, connective: str, fr: Fragment):
        super().__init__(
            f"connective {connective!r} is not part of the {fr.value} fragment")
        self.connective = connective


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->|→)|(?P<and>&|∧)|(?P<or>\||∨)"
    r"|(?P<lpar>\()|(?P<rpar>\))"
    r"|(?P<top>⊤)|(?P<bot>⊥)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "name":
            if value == "top":
                kind = "top"
            elif value == "bot":
                kind = "bot"
        tokens.append((kind, value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], schema: bool):
        self.tokens = tokens
        self.i = 0
        self.schema = schema

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def parse_imp(self) -> Formula:
        left = self.parse_or()
        if self.peek()[0] == "arrow":
            self.next()
            right = self.parse_imp()
            return imp(left, right)
        return left

    def parse_or(self) -> Formula:
        f = self.parse_and()
        while self.peek()[0] == "or":
            self.next()
            f = or_(f, self.parse_and())
        return f

    def parse_and(self) -> Formula:
        f = self.parse_unit()
        while self.peek()[0] == "and":
            self.next()
            f = and_(f, self.parse_unit())
        return f

    def parse_unit(self) -> Formula:
        kind, value, pos = self.next()
        if kind == "lpar":
            f = self.parse_imp()
            kind, _, pos = self.next()
            if kind != "rpar":
                raise ParseError("expected ')'", pos)
            return f
        if kind == "top":
            return top
        if kind == "bot":
            return bot
        if kind == "name":
            if value[0].isupper():
                if self.schema:
                    return metavar(value)
                raise ParseError(
                    f"uppercase name {value!r} (metavariables are only legal "
                    "in schemas)", pos)
            if not _ATOM_RE.match(value):
                raise ParseError(f"bad atom name {value!r}", pos)
            return atom(value)
        raise ParseError(f"expected a formula, found {value or kind!r}", pos)


def _parse(text: str, fragment: Fragment, schema: bool) -> Formula:
    p = _Parser(_tokenize(text), schema)
    f = p.parse_imp()
    kind, value, pos = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {value!r}", pos)
    bad = fragment_violation(f, fragment)
    if bad is not None:
        raise FragmentError(bad, fragment)
    return f


def parse(text: str, fragment: Fragment = Fragment.FULL) -> Formula:
    """Parse concrete formula text; the result must lie in ``fragment``."""
    return _parse(text, fragment, schema=False)


def parse_schema(text: str, fragment: Fragment = Fragment.FULL) -> Formula:
    """Parse a template; uppercase names become metavariables."""
    return _parse(text, fragment, schema=True)


# ---------------------------------------------------------------------------
# Printing (minimal parentheses; inverse of parse)
# ---------------------------------------------------------------------------

_PREC = {Imp: 1, Or: 2, And: 3}


def _print(f: Formula, out: list[str], prec: int) -> None:
    if isinstance(f, (Atom, MetaVar, _Const)):
        out.append(f.name)
        return
    mine = _PREC[type(f)]
    wrap = mine < prec
    if wrap:
        out.append("(")
    if isinstance(f, Imp):
        # right-associative: left child needs strictly higher binding
        _print(f.left, out, mine + 1)
        out.append(" -> ")
        _print(f.right, out, mine)
    else:
        op = " & " if isinstance(f, And) else " | "
        # left-associative: right child needs strictly higher binding
        _print(f.left, out, mine)
        out.append(op)
        _print(f.right, out, mine + 1)
    if wrap:
        out.append(")")


def print_formula(f: Formula) -> str:
    out: list[str] = []
    _print(f, out, 0)
    return "".join(out)


# ---------------------------------------------------------------------------
# Telescoped implications
# ---------------------------------------------------------------------------

def telescope(args: list[Formula] | tuple[Formula, ...], body: Formula) -> Formula:
    """args [a1..an] and body b give a1 -> (a2 -> ... (an -> b)); no args, b."""
    f = body
    for a in reversed(args):
        f = imp(a, f)
    return f


def telescope_split(f: Formula) -> Iterator[tuple[tuple[Formula, ...], Formula]]:
    """All ways to read ``f`` as prefix -> rest, shortest prefix first."""
    prefix: list[Formula] = []
    while True:
        yield tuple(prefix), f
        if not isinstance(f, Imp):
            return
        prefix.append(f.left)
        f = f.right


# ---------------------------------------------------------------------------
# Schemas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Assignment:
    """Bindings for a schema: metavariable map plus telescope arguments."""

    map: tuple[tuple[str, Formula], ...] = ()
    telescope: tuple[Formula, ...] = ()

    @staticmethod
    def of(mapping: dict[str, Formula],
           telescope: tuple[Formula, ...] = ()) -> "Assignment":
        return Assignment(tuple(sorted(mapping.items())), telescope)

    def as_dict(self) -> dict[str, Formula]:
        return dict(self.map)


@dataclass(frozen=True)
class Schema:
    """A formula template.

    ``template`` may contain MetaVar leaves.  When ``telescoped`` is set the
    schema stands for the family  a1 -> ... -> an -> template  (n >= 0) and an
    instantiation supplies the prefix arguments.  Metavariables listed in
    ``letter_vars`` only match propositional atoms.
    """

    template: Formula
    telescoped: bool = False
    letter_vars: frozenset[str] = frozenset()

    @property
    def metavars(self) -> frozenset[str]:
        return _metavars_of(self.template)

    def __str__(self):
        body = print_formula(self.template)
        return f"An... -> {body}" if self.telescoped else body


_metavar_cache: dict[Formula, frozenset[str]] = {}


def _metavars_of(f: Formula) -> frozenset[str]:
    got = _metavar_cache.get(f)
    if got is not None:
        return got
    if isinstance(f, MetaVar):
        out = frozenset((f.name,))
    elif isinstance(f, (Atom, _Const)):
        out = frozenset()
    else:
        out = _metavars_of(f.left) | _metavars_of(f.right)
    _metavar_cache[f] = out
    return out


def _subst(f: Formula, binding: dict[str, Formula]) -> Formula:
    if isinstance(f, MetaVar):
        try:
            return binding[f.name]
        except KeyError:
            raise KeyError(f"metavariable {f.name} is unbound") from None
    if isinstance(f, (Atom, _Const)):
        return f
    left = _subst(f.left, binding)
    right = _subst(f.right, binding)
    if left is f.left and right is f.right:
        return f
    if isinstance(f, Imp):
        return imp(left, right)
    if isinstance(f, And):
        return and_(left, right)
    return or_(left, right)


def instantiate(schema: Schema, assignment: Assignment) -> Formula:
    """Replace metavariables and expand the telescope prefix."""
    binding = assignment.as_dict()
    for name in schema.letter_vars:
        bound = binding.get(name)
        if bound is not None and not isinstance(bound, Atom):
            raise ValueError(
                f"metavariable {name} only takes propositional atoms, "
                f"got {print_formula(bound)}")
    body = _subst(schema.template, binding)
    return telescope(assignment.telescope, body)


def match_template(pattern: Formula, f: Formula,
                   binding: dict[str, Formula],
                   letter_vars: frozenset[str] = frozenset()) -> bool:
    """First-order match of ``f`` against ``pattern``, extending ``binding``
    in place.  Returns False (binding possibly dirty) when there is no match.
    """
    if isinstance(pattern, MetaVar):
        if pattern.name in letter_vars and not isinstance(f, Atom):
            return False
        seen = binding.get(pattern.name)
        if seen is None:
            binding[pattern.name] = f
            return True
        return seen is f
    if type(pattern) is not type(f):
        return False
    if isinstance(pattern, (Atom, _Const)):
        return pattern is f
    return (match_template(pattern.left, f.left, binding, letter_vars)
            and match_template(pattern.right, f.right, binding, letter_vars))


def match_schema(schema: Schema, f: Formula) -> list[Assignment]:
    """Every assignment a with instantiate(schema, a) == f.

    A telescoped schema can match one formula at several prefix lengths; all
    of them are returned, shortest prefix first.
    """
    out: list[Assignment] = []
    if schema.telescoped:
        splits: Iterator[tuple[tuple[Formula, ...], Formula]] = telescope_split(f)
    else:
        splits = iter([((), f)])
    for prefix, rest in splits:
        binding: dict[str, Formula] = {}
        if match_template(schema.template, rest, binding, schema.letter_vars):
            out.append(Assignment.of(binding, prefix))
    return out
