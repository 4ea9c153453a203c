import sys
from imagenet_overrides import OVERRIDES

synsets = {}
with open('dict/data.noun', encoding='latin-1') as f:
    for line in f:
        if line.startswith('  '): continue
        head, _, gloss = line.partition(' | ')
        parts = head.split()
        off = int(parts[0]); w_cnt = int(parts[3], 16)
        words = []
        i = 4
        for k in range(w_cnt):
            words.append(parts[i]); i += 2
        p_cnt = int(parts[i]); i += 1
        hypers = []
        for k in range(p_cnt):
            sym, tgt, pos = parts[i], parts[i+1], parts[i+2]; i += 4
            if sym == '@' and pos == 'n':
                hypers.append(int(tgt))
        synsets[off] = (words, hypers, gloss.strip())
print("noun synsets:", len(synsets))

def norm(s): return s.lower().replace('-', '_').replace(' ', '_')
lemma2off = {}
for off,(ws,h,g) in synsets.items():
    for w in ws:
        lemma2off.setdefault(norm(w), []).append(off)

from torchvision.models._meta import _IMAGENET_CATEGORIES as CATS

def candidates(name):
    n = norm(name)
    if n in lemma2off: return sorted(set(lemma2off[n]))
    toks = n.split('_')
    cands = set()
    for a in range(len(toks)):
        for b in range(a+1, len(toks)+1):
            sub = '_'.join(toks[a:b])
            if sub != n and sub in lemma2off and len(sub) > 3:
                cands.update(lemma2off[sub])
    return sorted(cands)

cand = [candidates(nm) for nm in CATS]
INF = 10**9
fmin = [0]*1000; lo = -1
for i in range(1000):
    opts = [o for o in cand[i] if o > lo]
    assert opts, (i, CATS[i])
    fmin[i] = min(opts); lo = fmin[i]
fmax = [0]*1000; hi = INF
for i in range(999, -1, -1):
    opts = [o for o in cand[i] if o < hi]
    assert opts, i
    fmax[i] = max(opts); hi = fmax[i]

final = [None]*1000
t1_log, fb_log = [], []
for i in range(1000):
    feas = [o for o in cand[i] if (fmin[i-1] if i>0 else -1) < o < (fmax[i+1] if i<999 else INF)]
    assert feas, (i, CATS[i])
    if i in OVERRIDES:
        assert OVERRIDES[i] in feas, (i, CATS[i], OVERRIDES[i], feas)
        final[i] = OVERRIDES[i]; continue
    if len(feas) == 1:
        final[i] = feas[0]
        if norm(CATS[i]) not in lemma2off: fb_log.append((i, CATS[i], feas[0]))
        continue
    n = norm(CATS[i])
    first = [o for o in feas if norm(synsets[o][0][0]) == n]
    if len(first) == 1:
        final[i] = first[0]; t1_log.append((i, CATS[i], first[0], [o for o in feas if o != first[0]]))
    else:
        print("UNRESOLVED", i, CATS[i], feas); sys.exit(1)

# strict ascent + anchors
for i in range(999): assert final[i] < final[i+1], i
assert final[0] == 1440764 and final[999] == 15075141
assert final[CATS.index('great white shark')] == 1484850
print("chain OK;", len(t1_log), "first-lemma resolutions:")
for i, nm, o, alts in t1_log:
    print(f"  {i:4d} {nm:22s} -> n{o:08d}  (over {['n%08d'%a for a in alts]})  {{{', '.join(synsets[o][0][:4])}}}")
print("fallback-name resolutions:", [(i, nm, 'n%08d'%o) for i,nm,o in fb_log])

leaves = set(final)
# hypernym closure
closure = set()
stack = list(leaves)
while stack:
    o = stack.pop()
    if o in closure: continue
    closure.add(o)
    for h in synsets[o][1]:
        stack.append(h)
print("closure size:", len(closure), " internal:", len(closure)-1000)

# DAG checks
roots = [o for o in closure if not synsets[o][1]]
print("roots:", [( 'n%08d'%o, synsets[o][0][0]) for o in roots])
assert roots == [1740]
# no leaf is ancestor of another leaf
anc_cache = {}
def ancestors(o):
    if o in anc_cache: return anc_cache[o]
    res = set()
    for h in synsets[o][1]:
        res.add(h); res |= ancestors(h)
    anc_cache[o] = res
    return res
sys.setrecursionlimit(10000)
bad = [o for o in leaves if ancestors(o) & leaves]
assert not bad, [( 'n%08d'%o, synsets[o][0][0]) for o in bad]
print("mutual non-ancestry OK")
multi = sum(1 for o in closure if len([h for h in synsets[o][1] if h in closure]) > 1)
print("multi-parent nodes in closure:", multi)

# subtree leaf sets for eval synsets
import math
down = {}  # synset -> set of leaf class indices
idx_of = {o: i for i, o in enumerate(final)}
children = {o: [] for o in closure}
for o in closure:
    for h in synsets[o][1]:
        if h in closure: children[h].append(o)
order = []
seen = set()
def topo(o):
    if o in seen: return
    seen.add(o)
    for c in children[o]: topo(c)
    order.append(o)
topo(1740)
assert len(order) == len(closure)
for o in order:  # children before parents
    s = set()
    if o in idx_of: s.add(idx_of[o])
    for c in children[o]: s |= down[c]
    down[o] = s
evals = [o for o in closure if o not in leaves]
print("eval synsets:", len(evals))
sizes = [len(down[o]) for o in evals]
singles = sum(1 for z in sizes if z == 1)
print("singleton eval synsets:", singles)
vals = [math.log(min(32, z)) for z in sizes if z > 1]
print("normalizer n=32:", sum(vals)/len(vals))
for n in (4, 8, 16):
    print(f"  ln(min({n},|A|)) mean:", sum(math.log(min(n, z)) for z in sizes if z > 1)/len(vals))
assert len(down[1740]) == 1000

# emit fixtures
def wnid(o): return 'n%08d' % o
with open('edges.txt', 'w') as f:
    f.write("# ImageNet-1k noun hypernym edges (child parent), WordNet 3.0.\n")
    f.write("# WordNet 3.0 Copyright 2006 by Princeton University. All rights reserved.\n")
    lines = []
    for o in closure:
        for h in synsets[o][1]:
            if h in closure: lines.append((wnid(o), wnid(h)))
    for c, p in sorted(lines):
        f.write(f"{c} {p}\n")
    print("edges:", len(lines))
with open('leaf_map.txt', 'w') as f:
    f.write("# ImageNet-1k class index -> WordNet 3.0 synset and lemmas.\n")
    f.write("# Lines starting with '-' carry lemmas for internal (non-class) synsets.\n")
    for i, o in enumerate(final):
        f.write(f"{i} {wnid(o)} {'|'.join(synsets[o][0])}\n")
    for o in sorted(closure - leaves):
        f.write(f"- {wnid(o)} {'|'.join(synsets[o][0])}\n")
with open('imagenet1000_wnids.txt', 'w') as f:
    for i, o in enumerate(final):
        f.write(f"{i} {wnid(o)}\n")
print("wrote edges.txt leaf_map.txt imagenet1000_wnids.txt")
