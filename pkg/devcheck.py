"""Dev-only convention sweep: graph calculus vs oracle on random cases."""
import itertools
import random
import sys

sys.path.insert(0, "src")

from ghznet import clifford as cl
from ghznet.graphstate import GraphState, GraphError, OutcomeError
from ghznet.ids import qid
from ghznet.oracle import realize, equal_up_to_phase


def random_graph(rng, n, frames="any"):
    vs = [qid("t", i) for i in range(n)]
    g = GraphState(vs, seed=rng.randrange(10**9))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                g._adj[vs[i]].add(vs[j])
                g._adj[vs[j]].add(vs[i])
    for v in vs:
        if frames == "any":
            g._frames[v] = cl.ALL[rng.randrange(24)]
        elif frames == "diag":
            g._frames[v] = cl.DIAGONAL[rng.randrange(4)]
    return g, vs


def check_lc(ntrials=300, seed=1):
    rng = random.Random(seed)
    bad = 0
    for _ in range(ntrials):
        n = rng.randrange(2, 7)
        g, vs = random_graph(rng, n)
        before = realize(g)
        v = vs[rng.randrange(n)]
        g.local_complement(v)
        after = realize(g)
        if not equal_up_to_phase(before, after):
            bad += 1
    return bad


def check_measure(basis, ntrials=400, seed=2, frames="any"):
    rng = random.Random(seed)
    bad = 0
    for _ in range(ntrials):
        n = rng.randrange(2, 7)
        g, vs = random_graph(rng, n, frames)
        v = vs[rng.randrange(n)]
        forced = rng.randrange(2)
        before = realize(g)
        try:
            rec = g.measure(v, basis, forced)
        except OutcomeError:
            # deterministic case, flip
            rec = g.measure(v, basis, 1 - forced)
            forced = 1 - forced
        try:
            post, p = before.project(v, basis, forced)
        except Exception as exc:
            print("oracle reject:", exc); bad += 1; continue
        if abs(p - rec.probability) > 1e-9:
            bad += 1
            continue
        rest = post.drop_qubit(v, basis, forced)
        after = realize(g)
        if not equal_up_to_phase(rest, after):
            bad += 1
    return bad


def check_cz(ntrials=300, seed=3):
    rng = random.Random(seed)
    bad = 0
    for _ in range(ntrials):
        n = rng.randrange(2, 7)
        g, vs = random_graph(rng, n, frames="diag")
        a, b = rng.sample(vs, 2)
        before = realize(g).apply_cz(a, b)
        g.apply_cz(a, b)
        if not equal_up_to_phase(before, realize(g)):
            bad += 1
    return bad


def check_cnot(ntrials=400, seed=4):
    rng = random.Random(seed)
    bad = tried = 0
    for _ in range(ntrials):
        n = rng.randrange(2, 8)
        g, vs = random_graph(rng, n, frames="diag")
        # random Pauli frames on some vertices
        pairs = [
            (s, t)
            for s, t in itertools.permutations(vs, 2)
            if not g.has_edge(s, t) and not (g.neighbors(s) & g.neighbors(t))
        ]
        if not pairs:
            continue
        s, t = pairs[rng.randrange(len(pairs))]
        g._frames[t] = cl.PAULIS[rng.randrange(4)]
        tried += 1
        before = realize(g).apply_cnot(s, t)
        g.cnot_merge(s, t)
        if not equal_up_to_phase(before, realize(g)):
            bad += 1
    return bad, tried


if __name__ == "__main__":
    print("lc:", check_lc())
    print("cz:", check_cz())
    print("cnot:", check_cnot())
    for b in "ZYX":
        print("measure", b, ":", check_measure(b))
