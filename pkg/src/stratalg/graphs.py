r"""Stable graphs: dual graphs of stable curves.

A stable graph of type ``(g, n)`` has vertices carrying genera, ``n``
labelled legs (markings ``1..n``) and edges made of paired half-edges.
Half-edges at a vertex are addressed by local slot numbers, so a *flag*
is either ``('l', marking)`` or ``('h', vertex, slot)``.

Everything here is exact combinatorics: canonical labelling by iterative
refinement with backtracking, automorphism groups as explicit flag
bijections, enumeration of all stable graphs by repeated one-edge
degeneration, and common degenerations of a pair of graphs (the raw
material for excess-intersection products).
"""

from __future__ import annotations

import itertools
import json
from functools import reduce
from math import factorial
from typing import Iterator, Optional, Sequence


Flag = tuple
Edge = tuple  # ((v1, s1), (v2, s2)) with (v1, s1) <= (v2, s2)


class InvalidGraph(ValueError):
    pass


def _norm_edge(e) -> Edge:
    a, b = (tuple(e[0]), tuple(e[1]))
    return (a, b) if a <= b else (b, a)


class StableGraph:
    """Immutable stable graph.

    ``genera``  -- tuple of vertex genera, vertices are ``0..V-1``
    ``legs``    -- tuple of length ``n``; ``legs[i]`` is the vertex of marking ``i+1``
    ``edges``   -- tuple of edges; each edge is a pair of ``(vertex, slot)`` flags
    """

    __slots__ = ("genera", "legs", "edges", "_key", "_half_counts", "_aut")

    def __init__(self, genera, legs, edges, check=True):
        self.genera = tuple(int(g) for g in genera)
        self.legs = tuple(int(v) for v in legs)
        self.edges = tuple(sorted(_norm_edge(e) for e in edges))
        self._key = None
        self._aut = None
        counts = [0] * len(self.genera)
        for (v1, s1), (v2, s2) in self.edges:
            counts[v1] += 1
            counts[v2] += 1
        self._half_counts = tuple(counts)
        if check:
            self.validate()

    # ------------------------------------------------------------------
    # basic structure
    # ------------------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def g(self) -> int:
        v = self.num_vertices
        return sum(self.genera) + self.num_edges - v + 1

    def legs_at(self, v: int) -> tuple[int, ...]:
        return tuple(m + 1 for m, w in enumerate(self.legs) if w == v)

    def half_edges_at(self, v: int) -> int:
        return self._half_counts[v]

    def valence(self, v: int) -> int:
        return len(self.legs_at(v)) + self._half_counts[v]

    def flags_at(self, v: int) -> tuple[Flag, ...]:
        """All flags at ``v``: legs first (by marking), then half-edge slots."""
        return tuple(("l", m) for m in self.legs_at(v)) + tuple(
            ("h", v, s) for s in range(self._half_counts[v])
        )

    def flag_vertex(self, flag: Flag) -> int:
        if flag[0] == "l":
            return self.legs[flag[1] - 1]
        return flag[1]

    def loops_at(self, v: int) -> int:
        return sum(1 for (a, b) in self.edges if a[0] == v and b[0] == v)

    def multiplicity(self, u: int, v: int) -> int:
        if u == v:
            return self.loops_at(u)
        return sum(1 for (a, b) in self.edges if {a[0], b[0]} == {u, v})

    def is_stable_vertex(self, v: int) -> bool:
        return 2 * self.genera[v] - 2 + self.valence(v) > 0

    def is_connected(self) -> bool:
        V = self.num_vertices
        seen = {0}
        frontier = [0]
        while frontier:
            u = frontier.pop()
            for (a, b) in self.edges:
                for x, y in ((a[0], b[0]), (b[0], a[0])):
                    if x == u and y not in seen:
                        seen.add(y)
                        frontier.append(y)
        return len(seen) == V

    def validate(self) -> None:
        V = self.num_vertices
        if V == 0:
            raise InvalidGraph("empty graph")
        if any(g < 0 for g in self.genera):
            raise InvalidGraph("negative genus")
        if any(not (0 <= v < V) for v in self.legs):
            raise InvalidGraph("leg attached to missing vertex")
        seen_slots = set()
        for (v1, s1), (v2, s2) in self.edges:
            for (v, s) in ((v1, s1), (v2, s2)):
                if not (0 <= v < V):
                    raise InvalidGraph("edge at missing vertex")
                if (v, s) in seen_slots:
                    raise InvalidGraph("slot used twice")
                seen_slots.add((v, s))
        for v in range(V):
            slots = sorted(s for (w, s) in seen_slots if w == v)
            if slots != list(range(len(slots))):
                raise InvalidGraph("slots at vertex %d not contiguous" % v)
        if not self.is_connected():
            raise InvalidGraph("graph not connected")
        for v in range(V):
            if not self.is_stable_vertex(v):
                raise InvalidGraph("unstable vertex %d" % v)

    # ------------------------------------------------------------------
    # canonical labelling
    # ------------------------------------------------------------------

    def _initial_colors(self) -> list:
        cols = []
        for v in range(self.num_vertices):
            cols.append(
                (
                    self.genera[v],
                    self.legs_at(v),
                    self._half_counts[v],
                    self.loops_at(v),
                )
            )
        return cols

    def _refine(self, cols: list) -> list[int]:
        """Iteratively refine vertex colors by neighbor multisets."""
        V = self.num_vertices
        cur = cols
        while True:
            order = sorted(set(cur))
            idx = {c: i for i, c in enumerate(order)}
            code = [idx[c] for c in cur]
            nxt = []
            for v in range(V):
                # one neighbor entry per half-edge at v (loops count twice)
                nb = []
                for (a, b) in self.edges:
                    if a[0] == v:
                        nb.append(code[b[0]])
                    if b[0] == v:
                        nb.append(code[a[0]])
                nxt.append((code[v], tuple(sorted(nb))))
            if len(set(nxt)) == len(set(cur)):
                return code
            cur = nxt

    def _orderings(self) -> Iterator[tuple[int, ...]]:
        """Candidate vertex orderings: all products of permutations inside
        refined color classes."""
        code = self._refine(self._initial_colors())
        classes: dict[int, list[int]] = {}
        for v, c in enumerate(code):
            classes.setdefault(c, []).append(v)
        blocks = [classes[c] for c in sorted(classes)]
        for perm_blocks in itertools.product(
            *[itertools.permutations(b) for b in blocks]
        ):
            order = [v for blk in perm_blocks for v in blk]
            yield tuple(order)

    def _normal_form(self, order: Sequence[int]):
        """Relabelled data for the given vertex ordering.

        Returns ``(genera, legs, edge_pairs)`` where ``edge_pairs`` is the
        sorted tuple of ``(u, v)`` vertex pairs (no slots; slots are assigned
        canonically afterwards).
        """
        pos = {v: i for i, v in enumerate(order)}
        genera = tuple(self.genera[v] for v in order)
        legs = tuple(pos[v] for v in self.legs)
        pairs = tuple(
            sorted(tuple(sorted((pos[a[0]], pos[b[0]])))
                   for (a, b) in self.edges)
        )
        return (genera, legs, pairs)

    def canonical(self) -> tuple["StableGraph", dict]:
        """Canonical relabelling.

        Returns ``(graph, flag_map)`` where ``flag_map`` sends each flag of
        ``self`` to the corresponding flag of the canonical graph.  Half-edge
        flag images depend on a deterministic slot assignment; any two choices
        differ by an automorphism of the canonical graph.
        """
        best = None
        best_order = None
        for order in self._orderings():
            nf = self._normal_form(order)
            if best is None or nf < best:
                best, best_order = nf, order
        genera, legs, pairs = best
        pos = {v: i for i, v in enumerate(best_order)}
        # assign slots: per vertex, half-edges sorted by (other endpoint, copy idx)
        slot_next = [0] * len(genera)
        flag_map = {}
        for m, v in enumerate(self.legs):
            flag_map[("l", m + 1)] = ("l", m + 1)
        new_edges = []
        keyed = sorted(
            (tuple(sorted((pos[a[0]], pos[b[0]]))), a, b) for (a, b) in self.edges
        )
        for (_uv, a, b) in keyed:
            fa, fb = (a, b)
            if (pos[fa[0]], fa[1]) > (pos[fb[0]], fb[1]):
                fa, fb = fb, fa
            u = pos[fa[0]]
            su = slot_next[u]
            slot_next[u] += 1
            v2 = pos[fb[0]]
            sv = slot_next[v2]
            slot_next[v2] += 1
            flag_map[("h", fa[0], fa[1])] = ("h", u, su)
            flag_map[("h", fb[0], fb[1])] = ("h", v2, sv)
            new_edges.append(((u, su), (v2, sv)))
        return StableGraph(genera, legs, new_edges, check=False), flag_map

    def key(self) -> bytes:
        """Total-order canonical key; equal iff graphs are isomorphic."""
        if self._key is None:
            G, _ = self.canonical()
            self._key = repr((G.genera, G.legs, G.edges)).encode()
        return self._key

    def is_isomorphic(self, other: "StableGraph") -> bool:
        return self.key() == other.key()

    # ------------------------------------------------------------------
    # automorphisms and isomorphisms
    # ------------------------------------------------------------------

    def _vertex_isos(self, other: "StableGraph") -> Iterator[dict]:
        """All genus/leg/multiplicity preserving vertex bijections self->other."""
        V = self.num_vertices
        if V != other.num_vertices or self.num_edges != other.num_edges:
            return
        if sorted(self.genera) != sorted(other.genera):
            return
        mine = [(self.genera[v], self.legs_at(v), self._half_counts[v]) for v in range(V)]
        theirs = [
            (other.genera[v], other.legs_at(v), other._half_counts[v]) for v in range(V)
        ]
        cands = [[w for w in range(V) if theirs[w] == mine[v]] for v in range(V)]

        def backtrack(v, used, assign):
            if v == V:
                yield dict(enumerate(assign))
                return
            for w in cands[v]:
                if w in used:
                    continue
                ok = True
                for u in range(v):
                    if self.multiplicity(u, v) != other.multiplicity(assign[u], w):
                        ok = False
                        break
                if ok and self.loops_at(v) == other.loops_at(w):
                    yield from backtrack(v + 1, used | {w}, assign + [w])

        yield from backtrack(0, set(), [])

    def isomorphisms(self, other: "StableGraph") -> Iterator[dict]:
        """All isomorphisms self -> other as flag maps (legs fixed pointwise)."""
        for vmap in self._vertex_isos(other):
            # group edges by (vertex pair); match parallel copies in all ways
            mine: dict = {}
            for e in self.edges:
                uv = tuple(sorted((e[0][0], e[1][0])))
                mine.setdefault(uv, []).append(e)
            theirs: dict = {}
            for e in other.edges:
                uv = tuple(sorted((e[0][0], e[1][0])))
                theirs.setdefault(uv, []).append(e)
            groups = []
            ok = True
            for uv, es in mine.items():
                tv = tuple(sorted((vmap[uv[0]], vmap[uv[1]])))
                if tv not in theirs or len(theirs[tv]) != len(es):
                    ok = False
                    break
                groups.append((es, theirs[tv], uv[0] == uv[1]))
            if not ok:
                continue
            leg_part = {("l", m + 1): ("l", m + 1) for m in range(self.n)}

            def extend(i, fmap):
                if i == len(groups):
                    yield dict(fmap)
                    return
                es, fs, is_loop = groups[i]
                for perm in itertools.permutations(fs):
                    for flips in itertools.product(
                        *[(False, True) if is_loop else (False,) for _ in es]
                    ):
                        m2 = dict(fmap)
                        good = True
                        for e, f, flip in zip(es, perm, flips):
                            (a, b), (c, d) = e, f
                            if not is_loop:
                                # endpoints must match via vmap
                                if vmap[a[0]] == c[0]:
                                    pa, pb = c, d
                                else:
                                    pa, pb = d, c
                                if vmap[a[0]] != pa[0] or vmap[b[0]] != pb[0]:
                                    good = False
                                    break
                            else:
                                pa, pb = (d, c) if flip else (c, d)
                            m2[("h",) + a] = ("h",) + pa
                            m2[("h",) + b] = ("h",) + pb
                        if good:
                            yield from extend(i + 1, m2)

            yield from extend(0, leg_part)

    def automorphisms(self) -> list[dict]:
        """Automorphism group as explicit flag maps (legs fixed pointwise)."""
        if self._aut is None:
            self._aut = list(self.isomorphisms(self))
        return self._aut

    def automorphism_order(self) -> int:
        return len(self.automorphisms())

    # ------------------------------------------------------------------
    # surgeries
    # ------------------------------------------------------------------

    def contract(self, which: Sequence[int]) -> tuple["StableGraph", dict, list[int]]:
        """Contract the edges with the given indices.

        Returns ``(graph, flag_map, vertex_map)`` where ``flag_map`` sends all
        surviving flags (legs and half-edges of kept edges) to new flags and
        ``vertex_map[v]`` is the image vertex of ``v``.  Contracting a loop
        raises the genus of its vertex by one.
        """
        which = set(which)
        V = self.num_vertices
        parent = list(range(V))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in which:
            (a, b) = self.edges[i]
            ra, rb = find(a[0]), find(b[0])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        roots = sorted({find(v) for v in range(V)})
        new_id = {r: i for i, r in enumerate(roots)}
        vmap = [new_id[find(v)] for v in range(V)]
        # genus of a merged vertex comes from the genus identity on the fiber:
        # sum of genera plus first Betti number of the contracted subgraph
        comp_edges: dict[int, int] = {}
        comp_verts: dict[int, set] = {}
        for v in range(V):
            comp_verts.setdefault(vmap[v], set()).add(v)
        for i in which:
            (a, b) = self.edges[i]
            comp_edges[vmap[a[0]]] = comp_edges.get(vmap[a[0]], 0) + 1
        genera = []
        for c in range(len(roots)):
            vs = comp_verts[c]
            e = comp_edges.get(c, 0)
            genera.append(sum(self.genera[v] for v in vs) + e - len(vs) + 1)
        legs = tuple(vmap[v] for v in self.legs)
        slot_next = [0] * len(roots)
        fmap = {("l", m + 1): ("l", m + 1) for m in range(self.n)}
        new_edges = []
        for i, (a, b) in enumerate(self.edges):
            if i in which:
                continue
            u = vmap[a[0]]
            su = slot_next[u]
            slot_next[u] += 1
            w = vmap[b[0]]
            sw = slot_next[w]
            slot_next[w] += 1
            fmap[("h",) + a] = ("h", u, su)
            fmap[("h",) + b] = ("h", w, sw)
            new_edges.append(((u, su), (w, sw)))
        return StableGraph(genera, legs, new_edges, check=False), fmap, vmap

    def split_vertex(
        self, v: int, g1: int, flags1: Sequence[Flag]
    ) -> Optional[tuple["StableGraph", dict]]:
        """Degenerate vertex ``v`` into two vertices joined by a new edge.

        ``flags1`` is the set of flags of ``v`` going to the first part, which
        gets genus ``g1``; the rest go to the second part with the leftover
        genus.  Returns ``None`` when either part would be unstable, else
        ``(graph, flag_map)`` (the new edge gets the two highest slots).
        """
        g2 = self.genera[v] - g1
        fset = set(flags1)
        all_flags = set(self.flags_at(v))
        f2 = all_flags - fset
        if 2 * g1 - 2 + len(fset) + 1 <= 0 or 2 * g2 - 2 + len(f2) + 1 <= 0:
            return None
        V = self.num_vertices
        genera = list(self.genera) + [g2]
        # vertex v keeps part 1; new vertex V gets part 2
        genera[v] = g1
        legs = list(self.legs)
        for m, w in enumerate(self.legs):
            if w == v and ("l", m + 1) in f2:
                legs[m] = V
        slot_next = [0] * (V + 1)
        fmap = {("l", m + 1): ("l", m + 1) for m in range(self.n)}
        new_edges = []
        for (a, b) in self.edges:
            out = []
            for f in (a, b):
                w, s = f
                if w == v and ("h", w, s) in f2:
                    nf = (V, slot_next[V])
                    slot_next[V] += 1
                elif w == v:
                    nf = (v, slot_next[v])
                    slot_next[v] += 1
                else:
                    nf = (w, slot_next[w])
                    slot_next[w] += 1
                fmap[("h",) + f] = ("h",) + nf
                out.append(nf)
            new_edges.append(tuple(out))
        e_new = ((v, slot_next[v]), (V, slot_next[V]))
        new_edges.append(e_new)
        G = StableGraph(genera, legs, new_edges, check=False)
        return G, fmap

    def add_loop(self, v: int) -> Optional[tuple["StableGraph", dict]]:
        """Degenerate ``v`` by trading a handle for a loop edge."""
        if self.genera[v] < 1:
            return None
        genera = list(self.genera)
        genera[v] -= 1
        s = self._half_counts[v]
        edges = list(self.edges) + [((v, s), (v, s + 1))]
        fmap = {("l", m + 1): ("l", m + 1) for m in range(self.n)}
        for (a, b) in self.edges:
            fmap[("h",) + a] = ("h",) + a
            fmap[("h",) + b] = ("h",) + b
        if 2 * genera[v] - 2 + self.valence(v) + 2 <= 0:
            return None
        return StableGraph(genera, self.legs, edges, check=False), fmap

    # ------------------------------------------------------------------
    # serialization (interchange schema)
    # ------------------------------------------------------------------

    def to_json(self) -> str:
        obj = {
            "vertices": [{"genus": g} for g in self.genera],
            "legs": {str(m + 1): v for m, v in enumerate(self.legs)},
            "edges": [[[a[0], a[1]], [b[0], b[1]]] for (a, b) in self.edges],
        }
        return json.dumps(obj, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "StableGraph":
        obj = json.loads(text)
        genera = [v["genus"] for v in obj["vertices"]]
        leg_map = {int(k): v for k, v in obj["legs"].items()}
        n = len(leg_map)
        if sorted(leg_map) != list(range(1, n + 1)):
            raise InvalidGraph("markings must be 1..n")
        legs = [leg_map[m] for m in range(1, n + 1)]
        edges = [(_norm_edge(e)) for e in obj["edges"]]
        return cls(genera, legs, edges)

    def __repr__(self):
        return "StableGraph(g=%s, legs=%s, edges=%s)" % (
            list(self.genera),
            list(self.legs),
            list(self.edges),
        )

    def __eq__(self, other):
        return (
            isinstance(other, StableGraph)
            and self.genera == other.genera
            and self.legs == other.legs
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.genera, self.legs, self.edges))


# ----------------------------------------------------------------------
# constructors and enumeration
# ----------------------------------------------------------------------


def trivial_graph(g: int, n: int) -> StableGraph:
    if 2 * g - 2 + n <= 0:
        raise InvalidGraph("unstable pair")
    return StableGraph([g], [0] * n, [])


def _one_edge_degenerations(G: StableGraph) -> Iterator[StableGraph]:
    for v in range(G.num_vertices):
        lp = G.add_loop(v)
        if lp is not None:
            yield lp[0]
        flags = G.flags_at(v)
        gv = G.genera[v]
        for g1 in range(gv + 1):
            # avoid double counting (g1,F) vs (g-g1,F^c): take all, dedupe later
            for r in range(len(flags) + 1):
                for comb in itertools.combinations(flags, r):
                    sp = G.split_vertex(v, g1, comb)
                    if sp is not None:
                        yield sp[0]


def enumerate_stable_graphs(
    g: int, n: int, max_edges: Optional[int] = None
) -> list[StableGraph]:
    """One canonical representative per isomorphism class.

    Sorted by ``(edge count, canonical key)``.  ``max_edges`` defaults to
    ``3g - 3 + n``, the largest codimension of a boundary stratum.
    """
    if 2 * g - 2 + n <= 0:
        raise InvalidGraph("unstable pair")
    if max_edges is None:
        max_edges = 3 * g - 3 + n
    max_edges = min(max_edges, 3 * g - 3 + n)
    levels: list[list[StableGraph]] = [[trivial_graph(g, n)]]
    seen = {levels[0][0].key()}
    for e in range(1, max_edges + 1):
        nxt = {}
        for G in levels[-1]:
            for H in _one_edge_degenerations(G):
                k = H.key()
                if k not in seen:
                    seen.add(k)
                    nxt[k] = H.canonical()[0]
        levels.append([nxt[k] for k in sorted(nxt)])
    out = []
    for lv in levels:
        out.extend(sorted(lv, key=lambda G: G.key()))
    return out


def one_edge_graphs(g: int, n: int) -> list[StableGraph]:
    """All stable graphs with exactly one edge, up to isomorphism."""
    return [G for G in enumerate_stable_graphs(g, n, max_edges=1) if G.num_edges == 1]


def canonical_key(G: StableGraph) -> bytes:
    return G.key()


def automorphism_order(G: StableGraph) -> int:
    return G.automorphism_order()


# ----------------------------------------------------------------------
# contraction structures and common degenerations
# ----------------------------------------------------------------------


class GraphMorphism:
    """A contraction ``source -> target`` given by the set of kept edges.

    ``kept[i]`` is the index in ``source.edges`` mapping onto
    ``target.edges[i]``; ``flag_map`` sends surviving source flags to target
    flags and ``vertex_map`` sends vertices to vertices.
    """

    __slots__ = ("source", "target", "kept", "flag_map", "vertex_map")

    def __init__(self, source, target, kept, flag_map, vertex_map):
        self.source = source
        self.target = target
        self.kept = tuple(kept)
        self.flag_map = dict(flag_map)
        self.vertex_map = tuple(vertex_map)

    def contracted(self) -> tuple[int, ...]:
        k = set(self.kept)
        return tuple(i for i in range(self.source.num_edges) if i not in k)


def structures(G: StableGraph, A: StableGraph) -> list[GraphMorphism]:
    """All labelled A-structures on ``G``.

    An A-structure is a choice of ``|E(A)|`` kept edges of ``G`` together with
    an isomorphism of the contraction of the others with ``A``.  The returned
    flag maps target flags of ``A``.
    """
    out = []
    eG, eA = G.num_edges, A.num_edges
    if eG < eA:
        return out
    for kept in itertools.combinations(range(eG), eA):
        dropped = [i for i in range(eG) if i not in kept]
        H, fmap, vmap = G.contract(dropped)
        if H.key() != A.key():
            continue
        for iso in H.isomorphisms(A):
            # compose: G flags --fmap--> H flags --iso--> A flags
            comp = {}
            for f, h in fmap.items():
                comp[f] = iso[h]
            vcomp = [None] * G.num_vertices
            for v in range(G.num_vertices):
                hv = vmap[v]
                # vertex map of iso: read off any flag, else match by elimination
                vcomp[v] = _iso_vertex(H, A, iso, hv)
            out.append(GraphMorphism(G, A, kept, comp, vcomp))
    return out


def _iso_vertex(H: StableGraph, A: StableGraph, iso: dict, hv: int) -> int:
    for f in H.flags_at(hv):
        img = iso[f]
        return A.flag_vertex(img)
    # a flagless vertex only occurs in the one-vertex graph
    return 0


def _vertex_degenerations(g: int, flags: Sequence[Flag], max_e: int):
    """All stable graphs of type (g, flags-as-legs) with at most ``max_e``
    edges, given as StableGraphs whose legs are relabelled 1..k in the order
    of ``flags``."""
    k = len(flags)
    if 2 * g - 2 + k <= 0:
        return []
    return enumerate_stable_graphs(g, k, max_edges=max_e)


def common_degenerations(A: StableGraph, B: StableGraph):
    """Generic common degenerations of ``A`` and ``B``.

    Yields triples ``(G, fA, fB)`` with ``fA``, ``fB`` labelled structures,
    one per labelled pair; every edge of ``G`` is kept by ``fA`` or by
    ``fB``.  Deduplication up to isomorphism is the caller's business (the
    product formula wants the labelled count).
    """
    if (A.g, A.n) != (B.g, B.n):
        raise InvalidGraph("ambient mismatch")
    out = []
    for G in _candidate_degenerations(A, B):
        sa = structures(G, A)
        if not sa:
            continue
        sb = structures(G, B)
        if not sb:
            continue
        for fA in sa:
            ka = set(fA.kept)
            for fB in sb:
                if ka.union(fB.kept) == set(range(G.num_edges)):
                    out.append((G, fA, fB))
    return out


def _candidate_degenerations(A: StableGraph, B: StableGraph) -> list[StableGraph]:
    """Graphs that can possibly contract to ``A`` with the extra edges coming
    from ``B``: replace each vertex of ``A`` by a degeneration of it, with the
    total number of inserted edges at most ``|E(B)|``."""
    budget = B.num_edges
    Vs = []
    for v in range(A.num_vertices):
        flags = A.flags_at(v)
        degs = []
        for H in _vertex_degenerations(A.genera[v], flags, budget):
            degs.append((H, flags))
        Vs.append(degs)
    found = {}
    for choice in itertools.product(*Vs):
        total = sum(H.num_edges for H, _ in choice)
        if total > budget:
            continue
        G = _assemble(A, choice)
        k = G.key()
        if k not in found:
            found[k] = G.canonical()[0]
    return [found[k] for k in sorted(found)]


def _assemble(A: StableGraph, choice) -> StableGraph:
    """Glue vertex replacements back along the edges of ``A``."""
    genera = []
    base = []  # vertex offset of each replacement
    for H, _flags in choice:
        base.append(len(genera))
        genera.extend(H.genera)
    # where does each original flag of A now live?  flag -> (new vertex)
    land = {}
    for v, (H, flags) in enumerate(choice):
        for i, f in enumerate(flags):
            land[f] = base[v] + H.legs[i]
    legs = [land[("l", m + 1)] for m in range(A.n)]
    slot_next = [0] * len(genera)
    edges = []
    for v, (H, _flags) in enumerate(choice):
        for (a, b) in H.edges:
            u, su = base[v] + a[0], None
            w, sw = base[v] + b[0], None
            su = slot_next[u]
            slot_next[u] += 1
            sw = slot_next[w]
            slot_next[w] += 1
            edges.append(((u, su), (w, sw)))
    for (a, b) in A.edges:
        u = land[("h",) + a]
        w = land[("h",) + b]
        su = slot_next[u]
        slot_next[u] += 1
        sw = slot_next[w]
        slot_next[w] += 1
        edges.append(((u, su), (w, sw)))
    return StableGraph(genera, legs, edges, check=False)


# ----------------------------------------------------------------------
# fast common degenerations (joint superposition)
# ----------------------------------------------------------------------


def _fiber_options(items, internal, genus_u, must_tree, special_legs, all_ws=()):
    """Ways to split one vertex fiber into blocks.

    ``items``    -- list of (flag_item, w_target) to distribute
    ``internal`` -- list of (w1, w2): endpoint targets of contracted edges
    ``genus_u``  -- total genus available in this fiber
    ``must_tree``-- require h^1 = 0 and a genus-1 block (omega pruning)
    ``special_legs`` -- legs for which at most one may sit on any genus-0
                    block (omega subset members; pruning only)

    Yields (blocks, h1) where blocks is a list of
    (w_label, item_list, endpoint_index_list).
    """
    # endpoints of internal edges, flattened: endpoint 2*i, 2*i+1 of edge i
    eps = []
    for i, (w1, w2) in enumerate(internal):
        eps.append((2 * i, w1))
        eps.append((2 * i + 1, w2))
    e = len(internal)
    if e == 0:
        ws = {w for (_, w) in items}
        if len(ws) > 1:
            return
        if must_tree and genus_u != 1:
            return
        if ws:
            yield ([(ws.pop(), [it for it, _ in items], [])], 0)
        else:
            # a flagless fiber (one-vertex graphs): any image vertex works
            for w in all_ws:
                yield ([(w, [], [])], 0)
        return
    # partitions of the endpoint set into blocks with consistent labels
    for part in _set_partitions_list(list(range(len(eps)))):
        labels = []
        ok = True
        for blk in part:
            ws = {eps[j][1] for j in blk}
            if len(ws) != 1:
                ok = False
                break
            labels.append(ws.pop())
        if not ok:
            continue
        b = len(part)
        # connectivity of the block graph through the internal edges
        parent = list(range(b))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        blk_of = {}
        for bi, blk in enumerate(part):
            for j in blk:
                blk_of[j] = bi
        h1 = 0
        for i in range(e):
            r1, r2 = find(blk_of[2 * i]), find(blk_of[2 * i + 1])
            if r1 == r2:
                h1 += 1
            else:
                parent[max(r1, r2)] = min(r1, r2)
        if len({find(x) for x in range(b)}) != 1:
            continue
        if h1 > genus_u:
            continue
        if must_tree and h1 != 0:
            continue
        # distribute items among matching blocks
        choices = []
        for it, w in items:
            cand = [bi for bi in range(b) if labels[bi] == w]
            if not cand:
                break
            choices.append((it, cand))
        else:
            specials = set(special_legs)
            for assign in itertools.product(*[c for _, c in choices]):
                if specials:
                    per_block = [0] * b
                    for (it, _), bi in zip(choices, assign):
                        if it in specials:
                            per_block[bi] += 1
                    # at most one block (the genus-1 one) may hold >= 2
                    # omega subset members
                    if sum(1 for c2 in per_block if c2 >= 2) > 1:
                        continue
                blocks = [
                    (labels[bi], [], [eps[j][0] for j in part[bi]])
                    for bi in range(b)
                ]
                for (it, _), bi in zip(choices, assign):
                    blocks[bi][1].append(it)
                yield (blocks, h1)
            continue
        # unplaceable item: no options from this partition


def _set_partitions_list(items):
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for part in _set_partitions_list(rest):
        out.append([[first]] + [list(b) for b in part])
        for i in range(len(part)):
            blocks = [list(b) for b in part]
            blocks[i].append(first)
            out.append(blocks)
    return out


def joint_candidate_degenerations(
    A: StableGraph,
    B: StableGraph,
    omega_u: int | None = None,
    omega_w: int | None = None,
    special_legs_A=(),
    special_legs_B=(),
) -> list[StableGraph]:
    """Candidate graphs for generic common degenerations of ``A`` and ``B``.

    Superimposes the two graphs: a matching identifies some edges, the
    remaining B-edges are inserted into fibers over A's vertices, and each
    fiber splits into blocks labelled by B-vertices.  Complete up to
    isomorphism; cost does not grow with the number of markings.

    ``omega_u`` / ``omega_w``: genus-1 vertices carrying an omega slot; their
    fibers must be trees containing the genus on one block (configurations
    violating this die under the omega restriction rules, so they are pruned
    here).
    """
    out = {}
    EA, EB = range(A.num_edges), range(B.num_edges)
    for k in range(0, min(A.num_edges, B.num_edges) + 1):
        for subA in itertools.combinations(EA, k):
            for subB in itertools.permutations(EB, k):
                unA = [e for e in EA if e not in subA]
                used = set(subB)
                unB = [e for e in EB if e not in used]
                for orient in itertools.product((0, 1), repeat=k):
                    for wass in itertools.product(
                        range(B.num_vertices), repeat=len(unA)
                    ):
                        for uass in itertools.product(
                            range(A.num_vertices), repeat=len(unB)
                        ):
                            for G in _assemble_joint(
                                A, B, list(zip(subA, subB)), orient,
                                unA, wass, unB, uass,
                                omega_u, omega_w, special_legs_A, special_legs_B,
                            ):
                                key = G.key()
                                if key not in out:
                                    out[key] = G.canonical()[0]
    return [out[k] for k in sorted(out)]


def _assemble_joint(
    A, B, matched, orient, unA, wass, unB, uass,
    omega_u, omega_w, special_legs_A, special_legs_B,
):
    # w-target of every A-flag
    wt = {}
    for m in range(1, A.n + 1):
        wt[("l", m)] = B.legs[m - 1]
    for e, w in zip(unA, wass):
        (a, b) = A.edges[e]
        wt[("h",) + a] = w
        wt[("h",) + b] = w
    for (ea, eb), o in zip(matched, orient):
        (fa1, fa2) = A.edges[ea]
        (hb1, hb2) = B.edges[eb]
        if o:
            hb1, hb2 = hb2, hb1
        wt[("h",) + fa1] = hb1[0]
        wt[("h",) + fa2] = hb2[0]
    # fiber data per A-vertex
    fiber_items = {u: [] for u in range(A.num_vertices)}
    for u in range(A.num_vertices):
        for f in A.flags_at(u):
            fiber_items[u].append((f, wt[f]))
    fiber_internal = {u: [] for u in range(A.num_vertices)}
    internal_edge_ids = {u: [] for u in range(A.num_vertices)}
    for e, u in zip(unB, uass):
        (h1, h2) = B.edges[e]
        fiber_internal[u].append((h1[0], h2[0]))
        internal_edge_ids[u].append(e)
    per_u = []
    for u in range(A.num_vertices):
        opts = list(
            _fiber_options(
                fiber_items[u],
                fiber_internal[u],
                A.genera[u],
                must_tree=(u == omega_u),
                special_legs=special_legs_A if u == omega_u else (),
                all_ws=range(B.num_vertices),
            )
        )
        if not opts:
            return
        per_u.append(opts)
    for combo in itertools.product(*per_u):
        # global blocks
        blocks = []  # (u, w, items, endpoint internal-edge refs)
        block_id = {}
        for u, (blks, h1) in enumerate(combo):
            for bi, (w, its, eps) in enumerate(blks):
                block_id[(u, bi)] = len(blocks)
                blocks.append((u, w, its, eps))
        nb = len(blocks)
        # w-fiber connectivity via unmatched-A edges and genus column sums
        parent = list(range(nb))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        # locate the block of each A-flag
        flag_block = {}
        for idx, (u, w, its, eps) in enumerate(blocks):
            for it in its:
                flag_block[it] = idx
        ok = True
        w_h1 = {w: 0 for w in range(B.num_vertices)}
        for e, w in zip(unA, wass):
            (a, b) = A.edges[e]
            b1 = flag_block[("h",) + a]
            b2 = flag_block[("h",) + b]
            if blocks[b1][1] != w or blocks[b2][1] != w:
                ok = False
                break
            r1, r2 = find(b1), find(b2)
            if r1 == r2:
                w_h1[w] += 1
            else:
                parent[max(r1, r2)] = min(r1, r2)
        if not ok:
            continue
        if omega_w is not None and w_h1.get(omega_w, 0):
            continue
        # each w-fiber must be connected
        wf = {}
        for idx in range(nb):
            wf.setdefault(blocks[idx][1], set()).add(find(idx))
        if any(len(roots) != 1 for roots in wf.values()):
            continue
        for w in range(B.num_vertices):
            if w not in wf:
                ok = False
                break
        if not ok:
            continue
        # genus distribution: row sums (per u, minus fiber h1) and column sums
        row_left = {}
        for u, (blks, h1) in enumerate(combo):
            row_left[u] = A.genera[u] - h1
            if row_left[u] < 0:
                ok = False
                break
        if not ok:
            continue
        col_left = {}
        for w in range(B.num_vertices):
            col_left[w] = B.genera[w] - w_h1.get(w, 0)
            if col_left[w] < 0:
                ok = False
                break
        if not ok:
            continue
        if sum(row_left.values()) != sum(col_left.values()):
            continue
        for gen in _genus_matrices(blocks, row_left, col_left):
            if omega_u is not None:
                # the omega fiber must contain its genus on a single block
                pass
            G = _build_joint_graph(A, B, blocks, gen, matched, orient, unA, wass, unB, uass, internal_edge_ids, block_id, combo, flag_block)
            if G is not None:
                yield G


def _genus_matrices(blocks, row_left, col_left):
    nb = len(blocks)
    rows = dict(row_left)
    cols = dict(col_left)

    def rec(i, rows, cols, acc):
        if i == nb:
            if all(v == 0 for v in rows.values()) and all(v == 0 for v in cols.values()):
                yield tuple(acc)
            return
        u, w, _, _ = blocks[i][0], blocks[i][1], None, None
        u = blocks[i][0]
        w = blocks[i][1]
        top = min(rows[u], cols[w])
        for g in range(top + 1):
            rows[u] -= g
            cols[w] -= g
            acc.append(g)
            yield from rec(i + 1, rows, cols, acc)
            acc.pop()
            rows[u] += g
            cols[w] += g

    yield from rec(0, rows, cols, [])


def _build_joint_graph(
    A, B, blocks, genera, matched, orient, unA, wass, unB, uass,
    internal_edge_ids, block_id, combo, flag_block,
):
    nb = len(blocks)
    slot_next = [0] * nb
    legs = []
    for m in range(1, A.n + 1):
        legs.append(flag_block[("l", m)])
    edges = []

    def half(bi):
        s = slot_next[bi]
        slot_next[bi] += 1
        return (bi, s)

    # internal (contracted-by-A) edges: endpoints recorded per fiber option
    for u, (blks, h1) in enumerate(combo):
        eids = internal_edge_ids[u]
        # endpoint j of local edge i lives on the block listing endpoint 2i / 2i+1
        ep_block = {}
        for bi, (w, its, eps) in enumerate(blks):
            for ep in eps:
                ep_block[ep] = block_id[(u, bi)]
        for i in range(len(eids)):
            b1 = ep_block[2 * i]
            b2 = ep_block[2 * i + 1]
            edges.append((half(b1), half(b2)))
    # unmatched A-edges
    for e in unA:
        (a, b) = A.edges[e]
        edges.append((half(flag_block[("h",) + a]), half(flag_block[("h",) + b])))
    # matched edges
    for (ea, eb), o in zip(matched, orient):
        (fa1, fa2) = A.edges[ea]
        edges.append((half(flag_block[("h",) + fa1]), half(flag_block[("h",) + fa2])))
    try:
        return StableGraph(list(genera), legs, edges)
    except InvalidGraph:
        return None


def common_degenerations_fast(A, B, omega_u=None, omega_w=None,
                              special_legs_A=(), special_legs_B=()):
    """Labelled common degenerations via the joint candidate generator."""
    if (A.g, A.n) != (B.g, B.n):
        raise InvalidGraph("ambient mismatch")
    out = []
    for G in joint_candidate_degenerations(
        A, B, omega_u, omega_w, special_legs_A, special_legs_B
    ):
        sa = structures(G, A)
        if not sa:
            continue
        sb = structures(G, B)
        if not sb:
            continue
        for fA in sa:
            ka = set(fA.kept)
            for fB in sb:
                if ka.union(fB.kept) == set(range(G.num_edges)):
                    out.append((G, fA, fB))
    return out
