from subint.formula import parse
from subint import kripke as K
from subint import nbhd as N

# Kripke basics
m = K.make_model(["g"], "g", [("g", "g")], {"p": ["g"]})
assert K.forces(m, "g", parse("p->p"))
m2 = K.make_model(["g", "w"], "g", [("g", "g"), ("g", "w")],
                  {"p": ["w"], "q": []})
assert not K.forces(m2, "g", parse("p->q"))
assert K.forces(m2, "w", parse("p->q"))  # w has no successors
# w forces p and (vacuously) p->q but not q: not a consequence on m2
assert not K.valid_consequence(m2, [parse("p"), parse("p->q")], parse("q"))
m2b = K.make_model(["g", "w"], "g", [("g", "g"), ("g", "w"), ("w", "w")],
                   {"p": ["w"], "q": []})
assert K.valid_consequence(m2b, [parse("p"), parse("p->q")], parse("q"))
assert K.valid_on_model(m2, parse("q->(p->p)"))
assert len(list(K.enumerate_frames(1))) == 1
assert len(list(K.enumerate_frames(2))) == 4
assert len(list(K.enumerate_frames(3))) == 64
fr = m2.frame
assert not K.has_property(fr, K.KripkeProperty.REFLEXIVE)
assert K.has_property(m2, K.KripkeProperty.PERSISTENT_VALUATION)
m2c = K.make_model(["g", "w"], "g", [("g", "g"), ("g", "w")], {"p": ["g"]})
assert not K.has_property(m2c, K.KripkeProperty.PERSISTENT_VALUATION)
m3 = K.model_from_json(K.model_to_json(m2))
assert m3 == m2
print("kripke ok")

# Nbhd basics
mm = N.make_model(["g", "w"], "g", {}, {"p": ["g"], "q": ["w"]})
assert len(mm.frame.nb[0]) == 9 and len(mm.frame.nb[1]) == 9
assert N.truth(mm, "w", parse("p->p"))
assert not N.truth(mm, "w", parse("p->q"))
assert N.truth(mm, "g", parse("bot->p"))
for prop in N.NbhdProperty:
    assert N.has_property(mm.frame, prop), prop
assert len(list(N.enumerate_frames(1))) == 1
frames = list(N.enumerate_frames(2))
assert len(frames) == 128

# hand-built countermodel for ((p->p)->r)->(q->r): NB(w1) has (W, {g}) extra
cm = N.make_model(["g", "w1"], "g",
                  {"w1": [(["g", "w1"], ["g"])]},
                  {"q": ["w1"], "r": ["g"]})
f = parse("((p->p)->r)->(q->r)")
assert not N.truth(cm, "g", f)
print("countermodel at root confirmed")

# root law: truth(g, A->B) iff tset(A) subset of tset(B)
import itertools
for frame in frames[:16]:
    model = N.NbhdModel(frame, {"p": ["g"], "q": ["w1"]})
    for a, b in itertools.product([parse("p"), parse("q"), parse("p->q")],
                                  repeat=2):
        lhs = N.truth(model, "g", __import__("subint.formula",
                      fromlist=["imp"]).imp(a, b))
        ts_a, ts_b = N.truth_set(model, a), N.truth_set(model, b)
        assert lhs == (ts_a & ~ts_b == 0)
print("root law ok")

# json roundtrip
doc = N.model_to_json(cm)
cm2 = N.model_from_json(doc)
assert N.model_to_json(cm2) == doc
assert not N.truth(cm2, "g", f)

# strict loading rejects missing base
try:
    N.make_model(["g", "w1"], "g", {"w1": []}, {}, strict=True)
    raise SystemExit("strict should have failed")
except ValueError as e:
    assert "base" in str(e)

# root cannot carry non-base pairs
try:
    N.make_model(["g", "w1"], "g", {"g": [(["g"], [])]}, {})
    raise SystemExit("root violation should have failed")
except ValueError as e:
    assert "root" in str(e)
print("nbhd ok")

# sampled frames at n=3 with closure
fs = list(N.sample_frames(3, [N.NbhdProperty.UPSET], 5, seed=7))
assert len(fs) == 5
assert all(N.has_property(fr, N.NbhdProperty.UPSET) for fr in fs)
fs2 = list(N.sample_frames(3, [N.NbhdProperty.UPSET], 5, seed=7))
assert [f.nb for f in fs] == [f.nb for f in fs2]
print("sampling deterministic ok")
