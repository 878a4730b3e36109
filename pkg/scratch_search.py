import time
from subint.formula import parse, print_formula as pf
from subint.search import (SearchBudget, find_countermodel,
                           correspondence_sweep, separate,
                           canonical_formulas, CORRESPONDENCES)
from subint.formula import Fragment

t0 = time.time()
# countermodel for conjunctive detachment on plain Kripke frames
cm = find_countermodel("kripke", [], parse("p & (p -> q) -> q"),
                       SearchBudget(max_worlds=2))
assert cm is not None
print("kripke countermodel:", cm.to_json()["model"]["R"], "at", cm.world)

# countermodel for the separating formula on plain neighborhood frames
cm2 = find_countermodel("nbhd", [], parse("((p->p)->r)->(q->r)"),
                        SearchBudget(max_worlds=2))
assert cm2 is not None
print("nbhd countermodel worlds:", cm2.to_json()["model"]["worlds"],
      "at", cm2.world, round(time.time() - t0, 2), "s")

# none on downset-closed frames at 2 worlds (the formula is valid there)
cm3 = find_countermodel("nbhd", ["downset"], parse("((p->p)->r)->(q->r)"),
                        SearchBudget(max_worlds=2))
assert cm3 is None
print("downset frames validate it: ok", round(time.time() - t0, 2), "s")

# one nbhd axiom sweep and one kripke sweep
t0 = time.time()
r = correspondence_sweep("consequent_meet", worlds=2)
print("consequent_meet sweep:", r.checked, "frames,",
      len(r.mismatches), "mismatches", round(time.time() - t0, 1), "s")
assert r.exact

t0 = time.time()
r2 = correspondence_sweep("conj_mp", worlds=3)
print("conj_mp sweep:", r2.checked, "frames,", len(r2.mismatches),
      "mismatches", round(time.time() - t0, 1), "s")
assert r2.exact

t0 = time.time()
r3 = correspondence_sweep("pair_equiv", worlds=2)
print("pair_equiv sweep:", r3.checked, "frames,", len(r3.mismatches),
      "mismatches", round(time.time() - t0, 1), "s")
assert r3.exact

# canonical enumeration sanity
forms = list(canonical_formulas(2, Fragment.IMP))
print("canonical imp formulas to size 2:", [pf(f) for f in forms])

# separation: WFDhat vs WF in the implicational fragment
t0 = time.time()
rep = separate("WF_imp", "WFDhat_imp", SearchBudget(
    max_worlds=2, max_formula_size=6, max_rounds=10))
print("separate witness:", pf(rep.witness) if rep.witness else None,
      round(time.time() - t0, 1), "s")
print("unconfirmed:", [pf(f) for f in rep.unconfirmed])
