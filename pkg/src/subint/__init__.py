"""subint: a workbench for subintuitionistic propositional logics.

Subpackages cover the formula language, the catalog of axiom systems with
their restricted rule disciplines, a proof checker and bounded saturation
kernel, finite Kripke and pair-neighborhood semantics, and search tooling
for correspondence sweeps, countermodels and logic separation.
"""

from subint.formula import (  # noqa: F401
    Formula, Fragment, atom, imp, and_, or_, top, bot,
    parse, print_formula, telescope, in_fragment,
    Schema, Assignment, instantiate, match_schema,
)

__version__ = "0.1.0"
