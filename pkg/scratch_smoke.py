import time
from subint.formula import parse, print_formula as pf
from subint.kernel import (Budget, saturate, derives, Proved, check_proof,
                           parse_script, format_script, shape_wfminus)

t0 = time.time()
c = saturate('F_imp', [], Budget(5, 6))
print('F_imp size5:', len(c.theorems), 'theorems, saturated:', c.saturated,
      round(time.time() - t0, 2), 's')
assert parse('p->p') in c.theorems
assert parse('q->(p->p)') in c.theorems

# FR: detachment from assumptions via prefix_mp at prefix length 0
c2 = saturate('FR_imp', [parse('p'), parse('p->q')], Budget(6, 8))
assert parse('q') in c2.derived, 'full MP in FR'
assert parse('q') not in c2.theorems
print('FR derived q: ok;', len(c2.derived) - len(c2.theorems), 'gamma-extra')

# weak MP in F_imp must NOT detach from assumptions
c3 = saturate('F_imp', [parse('p'), parse('p->q')], Budget(6, 8))
assert parse('q') not in c3.derived, 'weak MP must not fire'
print('F_imp weak MP respected: ok')

# WFDhat derives the separating formula
t0 = time.time()
goal = parse('((p->p)->r)->(q->r)')
res = derives('WFDhat_imp', [], goal, Budget(9, 12))
assert isinstance(res, Proved), res
print('WFDhat proof lines:', len(res.script.lines),
      round(time.time() - t0, 2), 's')
print(format_script(res.script))

# script checking: composition under a prefix, with a hypothetical theorem
script = parse_script('''
logic: F_imp
premise: p -> q
1. p -> q ; premise
2. (q -> r) -> p -> q ; rule weaken 1
3. (q -> r) -> q -> r ; axiom id
4. (q -> r) -> p -> r ; rule chain 2,3
''')
v = check_proof(script)
print('lemma-style script:', v)
assert v.accepted

# weak MP violation
bad = parse_script('''
logic: F_imp
assume: p
assume: p -> q
1. p ; assume
2. p -> q ; assume
3. q ; rule mp 1,2
''')
v2 = check_proof(bad)
print('weak MP violation:', v2)
assert not v2.accepted and v2.line == 3

# WF_imp_minus shapes at small scale
c4 = saturate('WF_imp_minus', [], Budget(5, 8))
assert all(shape_wfminus(f) for f in c4.theorems)
print('WF_minus small theorems all shaped:', len(c4.theorems))
print('total', round(time.time() - t0, 2), 's')
