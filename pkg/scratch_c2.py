import time
from subint.formula import parse
from subint.kernel import Budget, saturate, derives, Proved, shape_wfminus

t0 = time.time()
res = derives('WFDhat_imp', [], parse('((p->p)->r)->(q->r)'),
              Budget(9, 12, gen_size=2))
assert isinstance(res, Proved)
print('WFDhat prove (gen 2):', round(time.time() - t0, 2), 's',
      len(res.script.lines), 'lines')

# criterion-2 core: exact closure of WF_imp_minus at (9, 12) over {p,q}
t0 = time.time()
c = saturate('WF_imp_minus', [], Budget(9, 12, max_formulas=3_000_000))
t1 = time.time()
print('WF_minus (9,12): theorems', len(c.theorems), 'saturated', c.saturated,
      round(t1 - t0, 1), 's')

bad = [f for f in c.theorems if not shape_wfminus(f)]
print('non-shape members:', len(bad))

# independent count of shaped formulas by size over 2 atoms (no constants)
from math import comb
def catalan(n): return comb(2 * n, n) // (n + 1)
U = [catalan(k) * 2 ** (k + 1) for k in range(10)]   # formulas with k arrows
S = [0] * 10
for k in range(1, 10):
    aa = U[(k - 1) // 2] if (k - 1) % 2 == 0 else 0
    S[k] = aa + sum(U[b] * S[k - 1 - b] for b in range(k))
by_size = {}
for f in c.theorems:
    by_size[f.size] = by_size.get(f.size, 0) + 1
print('expected per size:', S[1:])
print('got per size:     ', [by_size.get(k, 0) for k in range(1, 10)])
print('total', round(time.time() - t0, 1), 's')
