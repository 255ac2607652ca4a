"""The ten acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.  ``python3 tests/test_acceptance.py`` does the
same without pytest's reporting.
"""

import json
import random
import time
from importlib import resources
from itertools import product

from support import a_stop, corpus, criterion, end_states, tau_a

from ltscong import (
    BLG,
    CATALOGUE,
    DLG,
    LLG,
    Lts,
    RenameRelation,
    bisimilar,
    hide,
    implies,
    internal_choice,
    minimal_distinguishing,
    normalize,
    parallel,
    parse_lts,
    pd,
    prefix,
    rename,
    una,
    verdict_table,
)
from ltscong.congruences import (
    ALL_DIFFERENT,
    DL_IS_BL,
    DL_IS_LL,
    LL_IS_BL,
    canonical_key,
    equal_ids,
    hasse_edges,
    lookup,
    maximal_elements,
)
from ltscong.lts import bisim_quotient
from ltscong.normalform import determinize
from ltscong.oracle import (
    BIT_COMPONENTS,
    GenParams,
    bisimilar_mutation,
    crosscheck,
    enumerate_bounded,
    random_lts,
)
from ltscong.testers import tester_sf

CORPUS_SIZE = 500
DEPTH = 6

_corpus_cache = []


def acceptance_corpus():
    if not _corpus_cache:
        _corpus_cache.extend(corpus(CORPUS_SIZE, seed=2024))
    return _corpus_cache


def _confirm_unequal(witness, l1, l2):
    """The oracle sees the reported difference at the reported trace."""
    if witness.component == "SIGMA":
        return l1.alphabet != l2.alphabet
    k = len(witness.trace)
    s1, s2 = enumerate_bounded(l1, k), enumerate_bounded(l2, k)
    name = str(witness.component)
    if name in BIT_COMPONENTS:
        return s1.bit(name, witness.trace) != s2.bit(name, witness.trace)
    return s1.family(name, witness.trace) != s2.family(name, witness.trace)


def _confirm_equal(c, l1, l2, depth):
    """No difference on the components of ``c`` up to ``depth``."""
    if not c.signature:
        return True
    if l1.alphabet != l2.alphabet:
        return False
    s1, s2 = enumerate_bounded(l1, depth), enumerate_bounded(l2, depth)
    for n in range(depth + 1):
        for t in product(sorted(l1.alphabet), repeat=n):
            for comp in c.signature:
                name = str(comp)
                if name == "SIGMA":
                    continue
                if name in BIT_COMPONENTS:
                    if s1.bit(name, t) != s2.bit(name, t):
                        return False
                elif s1.family(name, t) != s2.family(name, t):
                    return False
    return True


@criterion(1, "twenty distinct congruences, every Hasse edge strict by a stored witness")
def test_catalogue_and_witnesses():
    assert len(CATALOGUE) == 20
    assert len({c.signature for c in CATALOGUE}) == 20
    data = json.loads(
        resources.files("ltscong").joinpath("data/witnesses.json").read_text()
    )
    pairs = {}
    for entry in data:
        pairs[(entry["weak"], entry["strong"])] = (
            parse_lts(entry["left"]),
            parse_lts(entry["right"]),
        )
    edges = hasse_edges()
    for strong, weak in edges:
        assert (weak, strong) in pairs, f"no witness for edge {strong} -> {weak}"
    failures = []
    for (weak, strong), (l1, l2) in pairs.items():
        table = verdict_table(l1, l2)
        v_weak, v_strong = table[weak - 1], table[strong - 1]
        if not v_weak.equal or v_strong.equal:
            failures.append((weak, strong, "verdicts"))
        elif not _confirm_unequal(v_strong.witness, l1, l2):
            failures.append((weak, strong, "oracle does not see the difference"))
        elif not _confirm_equal(lookup(weak), l1, l2, 4):
            failures.append((weak, strong, "oracle sees a difference under the weak one"))
    assert not failures, failures[:5]
    # distinctness: every ordered pair is either implied or separated
    for c1 in CATALOGUE:
        for c2 in CATALOGUE:
            if c1 != c2:
                assert implies(c1, c2) or (c1.index, c2.index) in pairs
    return f"{len(edges)} Hasse edges, {len(pairs)} witness pairs replayed"


@criterion(2, "region classification of DLG/LLG/BLG is 3/2/3/12")
def test_regions():
    dl_ll = set(equal_ids(verdict_table(DLG, LLG)))
    dl_bl = set(equal_ids(verdict_table(DLG, BLG)))
    ll_bl = set(equal_ids(verdict_table(LLG, BLG)))
    all_ids = set(range(1, 21))
    regions = {
        DL_IS_LL: dl_ll,
        DL_IS_BL: dl_bl - dl_ll,
        ALL_DIFFERENT: all_ids - dl_bl - ll_bl,
        LL_IS_BL: ll_bl - dl_ll,
    }
    assert dl_ll == {1, 2, 3}
    assert dl_bl == {1, 2, 3, 4, 5}
    assert ll_bl == {1, 2, 3} | set(range(9, 21))
    counts = [len(regions[r]) for r in (DL_IS_LL, DL_IS_BL, ALL_DIFFERENT, LL_IS_BL)]
    assert counts == [3, 2, 3, 12]
    for region, ids in regions.items():
        assert {c.index for c in CATALOGUE if c.region == region} == ids
    return "counts " + "/".join(map(str, counts))


@criterion(3, "two minimal distinguishing congruences")
def test_two_minimal_distinguishers():
    ids = minimal_distinguishing(a_stop(), tau_a())
    names = {lookup(i).name for i in ids}
    assert names == {"sf", "sanf-mind"}
    return ", ".join(sorted(names))


@criterion(4, "oracle agrees with every component view on 500 LTSs at depth 6")
def test_oracle_equivalence():
    checked = 0
    for i, l in enumerate(acceptance_corpus()):
        report = crosscheck(l, DEPTH)
        assert report.passed, (i, report.mismatch)
        checked += report.checked
    return f"{CORPUS_SIZE} LTSs, {checked} observations"


def _sf_traces(sem):
    return {t for t, _ in sem.sf}


def _inf_member(l, stem, cycle):
    """Whether stem.cycle^omega is an infinite trace: all prefixes executable."""
    seen = set()
    cur = end_states(l, stem)
    while cur and cur not in seen:
        seen.add(cur)
        for a in cycle:
            cur = l.tau_closure({t for s in cur for b, t in l.succ[s] if b == a})
            if not cur:
                return False
        cur = frozenset(cur)
    return bool(cur)


def widen(l, alphabet):
    return Lts(l.names, frozenset(alphabet), l.transitions, l.initial)


def _lassos(alphabet, size):
    for n in range(1, size + 1):
        for word in product(sorted(alphabet), repeat=n):
            for split in range(n):
                yield word[:split], word[split:]


@criterion(5, "component identities and internal-choice equations on the corpus")
def test_identities():
    rng = random.Random(5)
    ls = acceptance_corpus()
    for l in ls:
        sem = enumerate_bounded(l, DEPTH)
        sigma = l.alphabet
        assert sem.tr == sem.div | _sf_traces(sem)
        assert sem.dl == {t for t, a in sem.sf if a == sigma}
        assert {t for t, _ in sem.nf} == {t for t, _ in sem.snf} == sem.tr - sem.div
        assert {t for t, _ in sem.anf} == {t for t, _ in sem.sanf} == sem.ant
    for _ in range(CORPUS_SIZE):
        l1, l2 = rng.choice(ls), rng.choice(ls)
        both = internal_choice(l1, l2)
        assert both.alphabet == l1.alphabet | l2.alphabet
        # refusals range over the joint alphabet on both sides
        w1, w2 = widen(l1, both.alphabet), widen(l2, both.alphabet)
        s, s1, s2 = (enumerate_bounded(x, 4) for x in (both, w1, w2))
        assert s.sf == s1.sf | s2.sf
        assert s.div == s1.div | s2.div
        for stem, cycle in _lassos(both.alphabet, 3):
            assert _inf_member(both, stem, cycle) == (
                _inf_member(l1, stem, cycle) or _inf_member(l2, stem, cycle)
            )
    return f"{len(ls)} LTSs, {CORPUS_SIZE} internal choices"


@criterion(6, "unambiguation and pre/post properties, determinization language")
def test_unambiguation_properties():
    for l in acceptance_corpus():
        u, p = una(l), pd(l)
        assert bisimilar(u, l)
        assert bisimilar(p, l)
        sem = enumerate_bounded(l, DEPTH)
        det = determinize(l)
        by_u, by_p = {}, {}
        for n in range(DEPTH + 1):
            for t in product(sorted(l.alphabet), repeat=n):
                assert (det.run(t) is not None) == (t in sem.tr)
                if t not in sem.tr:
                    continue
                for s in end_states(u, t):
                    by_u.setdefault(s, set()).add(t in sem.div)
                for s in end_states(p, t):
                    by_p.setdefault(s, set()).add(t in sem.ant)
        # every Una state is reached by divergence traces only or by none
        assert all(len(v) == 1 for v in by_u.values())
        for s, v in by_p.items():
            assert v == ({True} if p.names[s].endswith("_pre") else {False})
        for src, _, dst in p.transitions:
            assert not (p.names[src].endswith("_post") and p.names[dst].endswith("_pre"))
    return f"{CORPUS_SIZE} LTSs at depth {DEPTH}"


# congruence fuzz --------------------------------------------------------------

PAIRS_PER_CONGRUENCE = 200
MUTATION_PAIRS = 100
CONTEXTS_PER_PAIR = 100
POOL_SIZE = 8000
TIGHT_PAIRS = 50


def _random_context(rng, alphabet):
    letters = sorted(alphabet | {"a", "b", "c"})
    kind = rng.choice(("prefix", "hide", "rename", "par_left", "par_right"))
    if kind == "prefix":
        a = rng.choice(letters)
        return lambda l: prefix(a, l)
    if kind == "hide":
        acts = frozenset(x for x in letters if rng.random() < 0.5)
        return lambda l: hide(acts, l)
    if kind == "rename":
        pairs = {
            (x, rng.choice(letters + ["d"]))
            for x in letters
            for _ in range(rng.randint(0, 2))
        }
        phi = RenameRelation(pairs)
        return lambda l: rename(phi, l)
    partner = random_lts(
        GenParams(
            states=rng.randint(1, 3),
            actions=rng.randint(0, 3),
            density=1.5,
            tau=0.3,
            seed=rng.randrange(2**32),
        )
    )
    if kind == "par_left":
        return lambda l: parallel(l, partner)
    return lambda l: parallel(partner, l)


def _fuzz_pairs(rng):
    """Pairs with the congruences each one is equal under.

    Bisimilar mutations are equal under everything.  The rest come from
    random LTSs bucketed by canonical key.  Every congruence first gets
    ``TIGHT_PAIRS`` pairs for which it is the strongest congruence equating
    them; the remaining quota is filled with any equal pair.
    """
    pairs = []
    for l in corpus(MUTATION_PAIRS, seed=77, max_states=5):
        pairs.append((l, bisimilar_mutation(l, rng), frozenset(range(1, 21))))
    counts = {i: MUTATION_PAIRS for i in range(1, 21)}
    pool = []
    for l in corpus(POOL_SIZE, seed=78, max_states=4, max_actions=2):
        q = bisim_quotient(l)
        nf = normalize(q)
        pool.append((q, tuple(canonical_key(c, nf) for c in CATALOGUE)))
    seen = set()
    for tight in (True, False):
        for c in CATALOGUE:
            buckets = {}
            for i, (_, keys) in enumerate(pool):
                buckets.setdefault(keys[c.index - 1], []).append(i)
            groups = [g for g in buckets.values() if len(g) > 1]
            rng.shuffle(groups)
            taken = 0
            quota = TIGHT_PAIRS if tight else PAIRS_PER_CONGRUENCE - counts[c.index]
            for g in groups:
                for i, j in zip(g, g[1:]):
                    if taken >= quota or (i, j) in seen:
                        continue
                    (l1, k1), (l2, k2) = pool[i], pool[j]
                    eq = frozenset(
                        d.index for d in CATALOGUE if k1[d.index - 1] == k2[d.index - 1]
                    )
                    if tight and maximal_elements(eq) != [c.index]:
                        continue
                    seen.add((i, j))
                    pairs.append((l1, l2, eq))
                    taken += 1
                    for k in eq:
                        counts[k] += 1
    return pairs, counts


@criterion(7, "each congruence survives 100 contexts on 200 equal pairs")
def test_congruence_fuzz():
    rng = random.Random(7)
    pairs, counts = _fuzz_pairs(rng)
    assert min(counts.values()) >= PAIRS_PER_CONGRUENCE, counts
    violations = []
    for l1, l2, eq in pairs:
        assert set(eq) <= set(equal_ids(verdict_table(l1, l2)))
        alphabet = l1.alphabet | l2.alphabet
        for _ in range(CONTEXTS_PER_PAIR):
            ctx = _random_context(rng, alphabet)
            table = verdict_table(ctx(l1), ctx(l2))
            for i in eq:
                if not table[i - 1].equal:
                    violations.append((i, l1, l2))
    assert not violations, violations[:3]
    return f"{len(pairs)} pairs, min {min(counts.values())} per congruence"


@criterion(8, "no implication violated on 1000 random pairs; tr and sf incomparable")
def test_lattice_soundness():
    rng = random.Random(8)
    ls = corpus(400, seed=88, max_states=4, max_actions=2)
    edges = [(c1, c2) for c1 in CATALOGUE for c2 in CATALOGUE if c1 != c2 and implies(c1, c2)]
    for _ in range(1000):
        l1, l2 = rng.choice(ls), rng.choice(ls)
        eq = set(equal_ids(verdict_table(l1, l2)))
        for c1, c2 in edges:
            assert c1.index not in eq or c2.index in eq, (c1.name, c2.name)
    assert not implies(lookup("tr"), lookup("sf"))
    assert not implies(lookup("sf"), lookup("tr"))
    return f"{len(edges)} implications checked"


@criterion(9, "stable-failure tester detects exactly the stable failures")
def test_tester_contract():
    rng = random.Random(9)
    samples = 0
    while samples < 200:
        l = random_lts(
            GenParams(
                states=rng.randint(1, 6),
                actions=rng.randint(1, 3),
                density=rng.choice((1.0, 1.5, 2.0)),
                tau=rng.choice((0.15, 0.3, 0.5)),
                seed=rng.randrange(2**32),
            )
        )
        sigma = sorted(l.alphabet)
        trace = tuple(rng.choice(sigma) for _ in range(rng.randint(0, 3)))
        refusal = frozenset(a for a in sigma if rng.random() < 0.5)
        tester = tester_sf(trace, refusal, l.alphabet)
        has_failure = refusal in enumerate_bounded(l, len(trace)).family("SF", trace)
        deadlocks = trace in enumerate_bounded(parallel(l, tester), len(trace)).dl
        assert has_failure == deadlocks, (trace, refusal)
        samples += 1
    return f"{samples} samples"


@criterion(10, "normalize and all twenty verdicts on 12-state pairs under a second")
def test_performance():
    worst = 0.0
    for seed in range(5):
        p = GenParams(states=12, actions=4, density=2.0, tau=0.3, seed=seed)
        l1 = random_lts(p)
        l2 = random_lts(GenParams(12, 4, 2.0, 0.3, seed + 100))
        start = time.perf_counter()
        nfs = (normalize(l1), normalize(l2))
        verdict_table(l1, l2, nfs)
        worst = max(worst, time.perf_counter() - start)
    assert worst < 1.0
    return f"worst {worst * 1000:.1f} ms"


if __name__ == "__main__":
    import support

    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except Exception:
                pass
    print("\n".join(support.summary_lines()))
