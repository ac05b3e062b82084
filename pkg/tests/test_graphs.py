import itertools

import pytest

from stratalg.graphs import (
    InvalidGraph,
    StableGraph,
    automorphism_order,
    canonical_key,
    common_degenerations,
    enumerate_stable_graphs,
    one_edge_graphs,
    trivial_graph,
)


# ----------------------------------------------------------------------
# independent brute-force enumerator (the oracle; deliberately naive)
# ----------------------------------------------------------------------


def brute_force_count(g, n):
    """Count isomorphism classes of stable graphs of type (g, n) by generating
    all labelled candidates and bucketing by canonical key."""
    keys = set()
    max_e = 3 * g - 3 + n
    for V in range(1, max_e + 2):
        for genera in itertools.product(range(g + 1), repeat=V):
            loops_budget = g - sum(genera)
            if loops_budget < 0:
                continue
            for legs in itertools.product(range(V), repeat=n):
                # edge multiset: choose multiplicity for each vertex pair
                pairs = [(i, j) for i in range(V) for j in range(i, V)]
                for mults in _mult_vectors(pairs, max_e):
                    E = sum(mults)
                    if E > max_e:
                        continue
                    if sum(genera) + E - V + 1 != g:
                        continue
                    edges = []
                    slot = [0] * V
                    for (i, j), m in zip(pairs, mults):
                        for _ in range(m):
                            edges.append(((i, slot[i]), (j, slot[j] + (1 if i == j else 0))))
                            if i == j:
                                a = slot[i]
                                edges[-1] = ((i, a), (i, a + 1))
                                slot[i] += 2
                            else:
                                edges[-1] = ((i, slot[i]), (j, slot[j]))
                                slot[i] += 1
                                slot[j] += 1
                    try:
                        G = StableGraph(genera, legs, edges)
                    except InvalidGraph:
                        continue
                    keys.add(G.key())
    return len(keys)


def _mult_vectors(pairs, max_total):
    if not pairs:
        yield ()
        return
    for m in range(max_total + 1):
        for rest in _mult_vectors(pairs[1:], max_total - m):
            yield (m,) + rest


def sep_divisor(g1, part, g, n):
    legs = [0 if m in part else 1 for m in range(1, n + 1)]
    return StableGraph([g1, g - g1], legs, [((0, 0), (1, 0))])


# ----------------------------------------------------------------------


def test_enumerate_small_counts():
    assert len(enumerate_stable_graphs(0, 3)) == 1
    assert len(enumerate_stable_graphs(0, 4)) == 4
    assert len(enumerate_stable_graphs(1, 1)) == 2


@pytest.mark.parametrize("g,n", [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (0, 6), (1, 3), (2, 0), (2, 1)])
def test_enumerate_matches_brute_force(g, n):
    if 3 * g - 3 + n > 4:
        pytest.skip("outside the oracle window")
    assert len(enumerate_stable_graphs(g, n)) == brute_force_count(g, n)


def test_enumerate_unstable_pair():
    with pytest.raises(InvalidGraph, match="unstable pair"):
        enumerate_stable_graphs(0, 2)


def test_enumeration_deterministic_and_sorted():
    a = enumerate_stable_graphs(1, 2)
    b = enumerate_stable_graphs(1, 2)
    assert [G.key() for G in a] == [G.key() for G in b]
    marks = [(G.num_edges, G.key()) for G in a]
    assert marks == sorted(marks)


def test_canonical_key_relabelling_invariance():
    # a two-vertex graph and a vertex-permuted copy
    G1 = StableGraph([1, 0], [0, 1, 1], [((0, 0), (1, 0))])
    G2 = StableGraph([0, 1], [1, 0, 0], [((0, 0), (1, 0))])
    assert canonical_key(G1) == canonical_key(G2)


def test_canonical_key_separates_leg_partitions():
    ks = {canonical_key(sep_divisor(0, {1, a}, 0, 4)) for a in (2, 3, 4)}
    assert len(ks) == 3


def test_canonical_key_edge_count_separation():
    t = trivial_graph(2, 0)
    for G in one_edge_graphs(2, 0):
        assert canonical_key(G) != canonical_key(t)


def test_one_edge_counts():
    assert len(one_edge_graphs(0, 4)) == 3
    assert len(one_edge_graphs(1, 1)) == 1
    assert len(one_edge_graphs(2, 0)) == 2


def test_automorphism_orders():
    assert automorphism_order(trivial_graph(3, 2)) == 1
    loop = StableGraph([0], [0], [((0, 0), (0, 1))])
    assert automorphism_order(loop) == 2
    sep = StableGraph([1, 1], [], [((0, 0), (1, 0))])
    assert automorphism_order(sep) == 2
    banana = StableGraph([0, 0], [0, 1], [((0, 0), (1, 0)), ((0, 1), (1, 1))])
    assert automorphism_order(banana) == 2
    two_loops = StableGraph([0], [], [((0, 0), (0, 1)), ((0, 2), (0, 3))])
    # swap within each loop (2*2) times swapping the loops
    assert automorphism_order(two_loops) == 8


def brute_force_aut(G):
    """Count flag bijections preserving all structure, via raw search."""
    flags = [f for v in range(G.num_vertices) for f in G.flags_at(v)]
    if len(flags) > 6:
        pytest.skip("flag brute force capped at 6 flags")
    edge_set = set()
    for (a, b) in G.edges:
        edge_set.add(frozenset({("h",) + a, ("h",) + b}))
    count = 0
    for img in itertools.permutations(flags):
        m = dict(zip(flags, img))
        if any(m[("l", k)] != ("l", k) for k in range(1, G.n + 1)):
            continue
        ok = True
        # flags of one vertex go to flags of one vertex, preserving genus
        for v in range(G.num_vertices):
            if not G.flags_at(v):
                continue
            vs = {G.flag_vertex(m[f]) for f in G.flags_at(v)}
            if len(vs) != 1 or G.genera[vs.pop()] != G.genera[v]:
                ok = False
                break
        if not ok:
            continue
        for e in edge_set:
            if frozenset(m[f] for f in e) not in edge_set:
                ok = False
                break
        if ok:
            count += 1
    return count


@pytest.mark.parametrize("g,n", [(1, 1), (1, 2), (2, 0), (0, 4), (0, 5)])
def test_aut_matches_flag_brute_force(g, n):
    for G in enumerate_stable_graphs(g, n):
        flags = sum(G.valence(v) for v in range(G.num_vertices))
        if flags > 6:
            continue
        assert automorphism_order(G) == brute_force_aut(G)


def test_json_round_trip():
    for G in enumerate_stable_graphs(1, 2):
        H = StableGraph.from_json(G.to_json())
        assert canonical_key(H) == canonical_key(G)


def test_common_degenerations_trivial_cases():
    t = trivial_graph(0, 5)
    B = sep_divisor(0, {1, 2}, 0, 5)
    assert len(common_degenerations(t, t)) == 1
    (G, fA, fB) = common_degenerations(t, B)[0]
    assert G.key() == B.key()
    assert fB.kept == (0,)


def test_common_degenerations_two_divisors():
    A = sep_divisor(0, {1, 2}, 0, 5)
    B = sep_divisor(0, {3, 4}, 0, 5)
    trips = common_degenerations(A, B)
    assert len(trips) == 1
    G = trips[0][0]
    assert G.num_edges == 2 and G.num_vertices == 3


def test_common_degenerations_symmetric():
    A = sep_divisor(0, {1, 2}, 0, 5)
    B = sep_divisor(0, {1, 3}, 0, 5)
    ab = common_degenerations(A, B)
    ba = common_degenerations(B, A)
    assert len(ab) == len(ba)
    ka = sorted(G.key() for (G, _, _) in ab)
    kb = sorted(G.key() for (G, _, _) in ba)
    assert ka == kb


def test_contract_loop_raises_genus():
    loop = StableGraph([0], [0], [((0, 0), (0, 1))])
    H, _, _ = loop.contract([0])
    assert H.genera == (1,) and H.num_edges == 0


def test_orbit_stabilizer():
    # number of labelled copies x |Aut| = number of flag labelings of the shape
    for G in enumerate_stable_graphs(1, 2):
        flags = sum(G.valence(v) for v in range(G.num_vertices))
        if flags > 6:
            continue
        labelled = brute_force_labelled_copies(G)
        assert labelled * automorphism_order(G) == brute_force_labelled_shapes(G)


def brute_force_labelled_copies(G):
    """Distinct labelled graphs isomorphic to G on the same vertex set."""
    seen = set()
    V = G.num_vertices
    for perm in itertools.permutations(range(V)):
        genera = [0] * V
        for v in range(V):
            genera[perm[v]] = G.genera[v]
        legs = [perm[v] for v in G.legs]
        slot = [0] * V
        edges = []
        for (a, b) in G.edges:
            u, w = perm[a[0]], perm[b[0]]
            edges.append(((u, slot[u]), (w, slot[w] + (1 if u == w else 0))))
            if u == w:
                s = slot[u]
                edges[-1] = ((u, s), (u, s + 1))
                slot[u] += 2
            else:
                edges[-1] = ((u, slot[u]), (w, slot[w]))
                slot[u] += 1
                slot[w] += 1
        H = StableGraph(genera, legs, edges)
        if H.key() == G.key():
            shape = tuple(sorted(tuple(sorted((a[0], b[0]))) for (a, b) in H.edges))
            seen.add((H.genera, H.legs, shape))
    return len(seen)


def brute_force_labelled_shapes(G):
    """Flag labelings consistent with the abstract shape: choices of vertex
    labels times slot assignments of parallel edges and loop orientations."""
    import math

    V = G.num_vertices
    count = math.factorial(V)
    for u in range(V):
        L = G.loops_at(u)
        count *= math.factorial(L) * 2 ** L
        for v in range(u + 1, V):
            count *= math.factorial(G.multiplicity(u, v))
    return count
