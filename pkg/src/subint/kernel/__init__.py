"""Proof kernel: script checking and bounded saturation."""

from subint.kernel.saturate import (  # noqa: F401
    Budget, ClosureSet, saturate, shape_wfminus, theory_violations,
)
from subint.kernel.proof import (  # noqa: F401
    Axiom, Assumption, Premise, RuleApp, Line, ProofScript, Verdict,
    check_proof, parse_script, format_script, extract_script,
    derives, Proved, NotWithinBudget,
)
