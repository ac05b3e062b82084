r"""The decorated strata algebra of Mbar_{g,n}.

Additive generators are decorated strata ``[Gamma, dec]``: a stable graph
with psi powers on flags and kappa monomials on vertices.  The class
attached to ``[Gamma, dec]`` is ``xi_*(dec) / |Aut Gamma|`` where ``xi`` is
the gluing map of the stratum; with this normalization the irreducible
boundary class of Mbar_{1,1} integrates to 1/2 and psi_1 = delta_irr / 12
there.

Products follow the excess intersection formula: the product of two
pushforwards is a sum over generic common degenerations weighted by
``prod (-psi' - psi'')`` over the edges seen by both factors, with the
labelled-structure count divided by |Aut| of both factors.  This
bookkeeping is validated by the excess-consistency and projection-formula
tests rather than assumed.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cache

from .graphs import StableGraph, common_degenerations_fast, trivial_graph
from .integrals import kappa_psi_integral
from . import linalg


class AmbientMismatch(ValueError):
    pass


# ----------------------------------------------------------------------
# decorated strata
# ----------------------------------------------------------------------


class DecoratedStratum:
    """A stable graph with psi exponents on flags and kappa classes on
    vertices, stored in canonical form.

    ``psi``   -- tuple of ((flag, exponent), ...) sorted, exponents > 0
    ``kappa`` -- tuple (one entry per vertex) of sorted tuples of indices >= 1
    """

    __slots__ = ("graph", "psi", "kappa", "_hash")

    def __init__(self, graph, psi, kappa):
        self.graph = graph
        self.psi = psi
        self.kappa = kappa
        self._hash = hash((graph, psi, kappa))

    @staticmethod
    def make(graph: StableGraph, psi=None, kappa=None):
        """Canonicalize; returns None when the monomial dies for dimension
        reasons (some vertex is decorated beyond its dimension)."""
        psi = {f: e for f, e in (psi or {}).items() if e}
        kappa = {v: tuple(sorted(k)) for v, k in (kappa or {}).items() if k}
        if any(e < 0 for e in psi.values()):
            raise ValueError("negative psi exponent")
        if any(b < 1 for k in kappa.values() for b in k):
            raise ValueError("kappa index < 1")
        for v in range(graph.num_vertices):
            deg_v = sum(e for f, e in psi.items() if graph.flag_vertex(f) == v)
            deg_v += sum(kappa.get(v, ()))
            if deg_v > 3 * graph.genera[v] - 3 + graph.valence(v):
                return None
        G, fmap = graph.canonical()
        vmap = {}
        for f, nf in fmap.items():
            vmap[graph.flag_vertex(f)] = G.flag_vertex(nf)
        if len(vmap) < graph.num_vertices:
            # a flagless vertex only occurs in the one-vertex graph
            vmap = {v: v for v in range(graph.num_vertices)} | vmap
        psi1 = {fmap[f]: e for f, e in psi.items()}
        kappa1 = {vmap[v]: k for v, k in kappa.items()}
        best = None
        for aut in G.automorphisms():
            p = tuple(sorted((aut[f], e) for f, e in psi1.items()))
            k2 = [()] * G.num_vertices
            for v, kv in kappa1.items():
                w = G.flag_vertex(aut[G.flags_at(v)[0]]) if G.flags_at(v) else v
                k2[w] = kv
            cand = (p, tuple(k2))
            if best is None or cand < best:
                best = cand
        return DecoratedStratum(G, best[0], best[1])

    # -- data access ----------------------------------------------------

    def psi_dict(self) -> dict:
        return dict(self.psi)

    def kappa_at(self, v: int) -> tuple:
        return self.kappa[v] if v < len(self.kappa) else ()

    @property
    def degree(self) -> int:
        """Cohomological degree."""
        d = self.graph.num_edges
        d += sum(e for _, e in self.psi)
        d += sum(b for k in self.kappa for b in k)
        return 2 * d

    def __eq__(self, other):
        return (
            isinstance(other, DecoratedStratum)
            and self.graph == other.graph
            and self.psi == other.psi
            and self.kappa == other.kappa
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Stratum(%r, psi=%r, kappa=%r)" % (self.graph, self.psi, self.kappa)


# ----------------------------------------------------------------------
# tautological classes
# ----------------------------------------------------------------------


class TautClass:
    """Formal Q-linear combination of decorated strata of one degree."""

    __slots__ = ("g", "n", "degree", "terms")

    def __init__(self, g, n, degree, terms=None):
        self.g = g
        self.n = n
        self.degree = degree
        self.terms: dict[DecoratedStratum, Fraction] = {}
        for s, c in (terms or {}).items():
            if c:
                self.terms[s] = self.terms.get(s, Fraction(0)) + Fraction(c)
        self.terms = {s: c for s, c in self.terms.items() if c}

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if (self.g, self.n) != (other.g, other.n):
            raise AmbientMismatch("ambient mismatch")
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError("inhomogeneous sum")
        deg = self.degree if self.terms else other.degree
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, Fraction(0)) + c
        return TautClass(self.g, self.n, deg, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "TautClass":
        c = Fraction(c)
        return TautClass(
            self.g, self.n, self.degree, {s: c * v for s, v in self.terms.items()}
        )

    def __eq__(self, other):
        return (
            isinstance(other, TautClass)
            and (self.g, self.n) == (other.g, other.n)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            ((self.g, self.n), tuple(sorted(self.terms.items(), key=lambda t: repr(t[0]))))
        )

    def __repr__(self):
        if not self.terms:
            return "TautClass(0; g=%d, n=%d, deg=%d)" % (self.g, self.n, self.degree)
        return "TautClass(%d terms; g=%d, n=%d, deg=%d)" % (
            len(self.terms),
            self.g,
            self.n,
            self.degree,
        )

    def items_sorted(self):
        return sorted(
            self.terms.items(), key=lambda t: (t[0].graph.key(), t[0].psi, t[0].kappa)
        )


def zero_class(g, n, degree=0) -> TautClass:
    return TautClass(g, n, degree, {})


def fundamental_class(g, n) -> TautClass:
    s = DecoratedStratum.make(trivial_graph(g, n))
    return TautClass(g, n, 0, {s: Fraction(1)})


def psi_class(g, n, i) -> TautClass:
    s = DecoratedStratum.make(trivial_graph(g, n), psi={("l", i): 1})
    if s is None:
        return zero_class(g, n, 2)
    return TautClass(g, n, 2, {s: Fraction(1)})


def kappa_class(g, n, b) -> TautClass:
    if b == 0:
        return fundamental_class(g, n).scale(2 * g - 2 + n)
    s = DecoratedStratum.make(trivial_graph(g, n), kappa={0: (b,)})
    if s is None:
        return zero_class(g, n, 2 * b)
    return TautClass(g, n, 2 * b, {s: Fraction(1)})


def boundary_class(graph: StableGraph) -> TautClass:
    s = DecoratedStratum.make(graph)
    return TautClass(graph.g, graph.n, 2 * graph.num_edges, {s: Fraction(1)})


def stratum_class(graph, psi=None, kappa=None) -> TautClass:
    d = 2 * (
        graph.num_edges
        + sum((psi or {}).values())
        + sum(b for k in (kappa or {}).values() for b in k)
    )
    s = DecoratedStratum.make(graph, psi, kappa)
    if s is None:
        return zero_class(graph.g, graph.n, d)
    return TautClass(graph.g, graph.n, d, {s: Fraction(1)})


# ----------------------------------------------------------------------
# product
# ----------------------------------------------------------------------


@cache
def _cached_degenerations(GA: StableGraph, GB: StableGraph):
    return common_degenerations_fast(GA, GB)


def _invert_flag_map(fm: dict) -> dict:
    return {v: k for k, v in fm.items()}


def _transport_monomial(stratum: DecoratedStratum, morph) -> list[tuple[dict, dict]]:
    """Pull the decorations of ``stratum`` (living on morph.target) back to
    morph.source along the contraction.  psi transports along the flag
    bijection; each kappa_b on a target vertex becomes a sum over preimage
    vertices, so a list of (psi, kappa) monomial options is returned."""
    inv = _invert_flag_map(morph.flag_map)
    psi = {inv[f]: e for f, e in stratum.psi}
    fibers: dict[int, list[int]] = {}
    for u, w in enumerate(morph.vertex_map):
        fibers.setdefault(w, []).append(u)
    options: list[tuple[dict, dict]] = [(psi, {})]
    for w in range(stratum.graph.num_vertices):
        for b in stratum.kappa_at(w):
            nxt = []
            for p, k in options:
                for u in fibers[w]:
                    k2 = dict(k)
                    k2[u] = tuple(sorted(k2.get(u, ()) + (b,)))
                    nxt.append((p, k2))
            options = nxt
    return options


def product(x: TautClass, y: TautClass) -> TautClass:
    """Excess-intersection product of two tautological classes."""
    if (x.g, x.n) != (y.g, y.n):
        raise AmbientMismatch("ambient mismatch")
    g, n = x.g, x.n
    deg = x.degree + y.degree
    if deg > 2 * (3 * g - 3 + n):
        return zero_class(g, n, deg)
    acc: dict[DecoratedStratum, Fraction] = {}
    for sa, ca in x.terms.items():
        auta = sa.graph.automorphism_order()
        for sb, cb in y.terms.items():
            autb = sb.graph.automorphism_order()
            w = ca * cb / (auta * autb)
            for (G, fA, fB) in _cached_degenerations(sa.graph, sb.graph):
                common = set(fA.kept) & set(fB.kept)
                for pa, ka in _transport_monomial(sa, fA):
                    for pb, kb in _transport_monomial(sb, fB):
                        base_psi = dict(pa)
                        for f, e in pb.items():
                            base_psi[f] = base_psi.get(f, 0) + e
                        base_kappa = dict(ka)
                        for v, k in kb.items():
                            base_kappa[v] = tuple(sorted(base_kappa.get(v, ()) + k))
                        # expand the excess factor prod_e (-psi' - psi'')
                        monos = [(Fraction(1), base_psi)]
                        for ei in common:
                            (a, b) = G.edges[ei]
                            fa, fb = ("h",) + a, ("h",) + b
                            nxt = []
                            for coef, ps in monos:
                                for hf in (fa, fb):
                                    p2 = dict(ps)
                                    p2[hf] = p2.get(hf, 0) + 1
                                    nxt.append((-coef, p2))
                            monos = nxt
                        for coef, ps in monos:
                            s = DecoratedStratum.make(G, ps, base_kappa)
                            if s is None:
                                continue
                            acc[s] = acc.get(s, Fraction(0)) + w * coef
    return TautClass(g, n, deg, acc)


# ----------------------------------------------------------------------
# integration
# ----------------------------------------------------------------------


def integrate_stratum(s: DecoratedStratum) -> Fraction:
    """1/|Aut| times the product of per-vertex kappa-psi integrals, with
    half-edge flags treated as markings."""
    G = s.graph
    psi = s.psi_dict()
    total = Fraction(1, G.automorphism_order())
    for v in range(G.num_vertices):
        flags = G.flags_at(v)
        exps = [psi.get(f, 0) for f in flags]
        val = kappa_psi_integral(G.genera[v], len(flags), exps, s.kappa_at(v))
        if not val:
            return Fraction(0)
        total *= val
    return total


def integrate(x: TautClass) -> Fraction:
    if x.degree != 2 * (3 * x.g - 3 + x.n):
        return Fraction(0)
    return sum((c * integrate_stratum(s) for s, c in x.terms.items()), Fraction(0))


# ----------------------------------------------------------------------
# grafting a local class into a vertex (shared surgery plumbing)
# ----------------------------------------------------------------------


def graft_local(
    G: StableGraph,
    v: int,
    local: TautClass,
    flag_names: list,
    out_legs: dict,
    psi_other: dict,
    kappa_other: dict,
    coeff: Fraction,
) -> dict[DecoratedStratum, Fraction]:
    """Replace vertex ``v`` of ``G`` by the strata of ``local``.

    ``local`` lives on ``(g', m)`` with ``m = len(flag_names)``; its marking
    ``i`` corresponds to ``flag_names[i-1]``, which is either a flag of ``G``
    at ``v`` (an edge end or a leg) or ``("new", label)``.  ``out_legs`` maps
    each output marking label to its source: ``("old", old_label)`` for a leg
    of ``G`` (possibly at ``v``) or ``("local", i)`` for a local marking.
    Decorations of ``G`` away from ``v`` are passed in ``psi_other`` /
    ``kappa_other`` (old flag and vertex ids).

    Contributions carry ``coeff * c_local * |Aut new| / (|Aut G| * |Aut H|)``,
    which is the pushforward bookkeeping for the composite gluing map.
    """
    out: dict[DecoratedStratum, Fraction] = {}
    aut_old = G.automorphism_order()
    n_out = len(out_legs)
    idx = {f: i + 1 for i, f in enumerate(flag_names)}
    for ls, lc in local.terms.items():
        H = ls.graph
        aut_local = H.automorphism_order()
        genera = []
        old_to_new = {}
        for u in range(G.num_vertices):
            if u == v:
                continue
            old_to_new[u] = len(genera)
            genera.append(G.genera[u])
        h_base = len(genera)
        genera.extend(H.genera)
        slot_next = [0] * len(genera)
        fmap = {}  # surviving G-flags -> new flags
        lmap = {}  # H-flags -> new flags
        edges = []
        for (a, b) in H.edges:
            ends = []
            for f in (a, b):
                u1 = h_base + f[0]
                s1 = slot_next[u1]
                slot_next[u1] += 1
                lmap[("h",) + f] = ("h", u1, s1)
                ends.append((u1, s1))
            edges.append(tuple(ends))
        for (a, b) in G.edges:
            ends = []
            for f in (a, b):
                if f[0] == v:
                    i = idx[("h",) + f]
                    w = h_base + H.legs[i - 1]
                    s = slot_next[w]
                    slot_next[w] += 1
                    fmap[("h",) + f] = ("h", w, s)
                    lmap[("l", i)] = ("h", w, s)
                else:
                    w = old_to_new[f[0]]
                    s = slot_next[w]
                    slot_next[w] += 1
                    fmap[("h",) + f] = ("h", w, s)
                ends.append((w, s))
            edges.append(tuple(ends))
        legs = []
        ok = True
        for label in range(1, n_out + 1):
            src = out_legs[label]
            if src[0] == "old":
                old_f = ("l", src[1])
                if old_f in idx:
                    i = idx[old_f]
                    legs.append(h_base + H.legs[i - 1])
                    lmap[("l", i)] = ("l", label)
                else:
                    u = G.legs[src[1] - 1]
                    if u == v:
                        ok = False
                        break
                    legs.append(old_to_new[u])
                    fmap[old_f] = ("l", label)
            else:
                i = src[1]
                legs.append(h_base + H.legs[i - 1])
                lmap[("l", i)] = ("l", label)
        if not ok:
            continue
        try:
            newG = StableGraph(genera, legs, edges)
        except Exception:
            continue
        psi = {}
        for f, e in psi_other.items():
            nf = fmap[f]
            psi[nf] = psi.get(nf, 0) + e
        for (lf, e) in ls.psi:
            nf = lmap[lf]
            psi[nf] = psi.get(nf, 0) + e
        kappa = {}
        for u, k in kappa_other.items():
            kappa[old_to_new[u]] = tuple(sorted(k))
        for u in range(H.num_vertices):
            k = ls.kappa_at(u)
            if k:
                kappa[h_base + u] = tuple(sorted(kappa.get(h_base + u, ()) + k))
        s2 = DecoratedStratum.make(newG, psi, kappa)
        if s2 is None:
            continue
        ratio = Fraction(newG.automorphism_order(), aut_old * aut_local)
        out[s2] = out.get(s2, Fraction(0)) + coeff * lc * ratio
    return out


def _vertex_data(s: DecoratedStratum, v: int):
    """(flags at v, local psi dict keyed by 1..m, kappa, decorations away)."""
    G = s.graph
    flags = G.flags_at(v)
    psi = s.psi_dict()
    local_psi = {("l", i + 1): psi.get(f, 0) for i, f in enumerate(flags)}
    local_psi = {k: e for k, e in local_psi.items() if e}
    psi_other = {f: e for f, e in psi.items() if G.flag_vertex(f) != v}
    kappa_other = {u: s.kappa_at(u) for u in range(G.num_vertices) if u != v and s.kappa_at(u)}
    return flags, local_psi, s.kappa_at(v), psi_other, kappa_other


# ----------------------------------------------------------------------
# forgetful pullback
# ----------------------------------------------------------------------


def _local_psi_pullback(g, m, i) -> TautClass:
    """pi^* psi_i = psi_i - D_{i,new} on (g, m+1); the new marking is m+1."""
    out = psi_class(g, m + 1, i)
    if g == 0 and m + 1 == 3:
        return zero_class(g, m + 1, 2)
    bubble = StableGraph(
        [g, 0],
        [1 if k in (i, m + 1) else 0 for k in range(1, m + 2)],
        [((0, 0), (1, 0))],
    )
    return out - boundary_class(bubble)


def _local_kappa_pullback(g, m, b) -> TautClass:
    """pi^* kappa_b = kappa_b - psi_new^b on (g, m+1)."""
    out = kappa_class(g, m + 1, b)
    s = DecoratedStratum.make(trivial_graph(g, m + 1), psi={("l", m + 1): b})
    if s is not None:
        out = out - TautClass(g, m + 1, 2 * b, {s: Fraction(1)})
    return out


def _local_forgetful_pullback(g_v, m, local_psi, kappa_v) -> TautClass:
    out = fundamental_class(g_v, m + 1)
    for (kind, i), e in sorted(local_psi.items()):
        for _ in range(e):
            out = product(out, _local_psi_pullback(g_v, m, i))
    for b in kappa_v:
        out = product(out, _local_kappa_pullback(g_v, m, b))
    return out


def pullback_forgetful(x: TautClass, new_label: int | None = None) -> TautClass:
    """Flat pullback along the map forgetting one marking.

    ``x`` lives on (g, n-1); the result lives on (g, n).  The inserted
    marking receives label ``new_label`` (default n); old markings >=
    new_label shift up by one.
    """
    g, n1 = x.g, x.n
    n = n1 + 1
    if new_label is None:
        new_label = n
    if not (1 <= new_label <= n):
        raise ValueError("bad marking label")
    shift = {m: (m if m < new_label else m + 1) for m in range(1, n1 + 1)}
    acc: dict[DecoratedStratum, Fraction] = {}
    for s, c in x.terms.items():
        G = s.graph
        for v in range(G.num_vertices):
            flags, local_psi, kappa_v, psi_other, kappa_other = _vertex_data(s, v)
            loc = _local_forgetful_pullback(G.genera[v], len(flags), local_psi, kappa_v)
            names = list(flags) + [("new", new_label)]
            out_legs = {shift[m]: ("old", m) for m in range(1, n1 + 1)}
            out_legs[new_label] = ("new", new_label)
            # the 'new' marking is local marking m+1
            names[-1] = ("new", new_label)
            idx_new = len(flags) + 1
            out_legs[new_label] = ("local", idx_new)
            for t, cc in graft_local(
                G, v, loc, names, out_legs, psi_other, kappa_other, c
            ).items():
                acc[t] = acc.get(t, Fraction(0)) + cc
    return TautClass(g, n, x.degree, acc)


# ----------------------------------------------------------------------
# forgetful pushforward
# ----------------------------------------------------------------------


def _local_forgetful_pushforward(g_v, m, local_psi, kappa_v, forget_i) -> TautClass:
    """Fiber integration of a psi-kappa monomial along forgetting marking
    ``forget_i`` on (g_v, m); result on (g_v, m-1), markings renumbered.

    Uses psi_j = pi^* psi_j + D_{j,i} and kappa_b = pi^* kappa_b + psi_i^b,
    then pi_*(pi^* x . psi_i^k) = kappa_{k-1} . x with kappa_0 = 2g-2+(m-1).
    """
    b = local_psi.get(("l", forget_i), 0)
    others = [i for i in range(1, m + 1) if i != forget_i]
    rename = {i: j + 1 for j, i in enumerate(others)}
    a = {rename[i]: local_psi.get(("l", i), 0) for i in others}
    g, n_out = g_v, m - 1
    kap = tuple(kappa_v)
    deg = 2 * (sum(a.values()) + b + sum(kap)) - 2
    acc: dict[DecoratedStratum, Fraction] = {}

    def add(psi_map, kappa_list, coef):
        s = DecoratedStratum.make(
            trivial_graph(g, n_out),
            {("l", i): e for i, e in psi_map.items() if e},
            {0: tuple(sorted(kappa_list))} if kappa_list else None,
        )
        if s is not None:
            acc[s] = acc.get(s, Fraction(0)) + coef

    for r in range(len(kap) + 1):
        for T in itertools.combinations(range(len(kap)), r):
            Ts = set(T)
            kept = [kap[j] for j in range(len(kap)) if j not in Ts]
            tot = b + sum(kap[j] for j in T)
            if tot >= 2:
                add(a, kept + [tot - 1], Fraction(1))
            elif tot == 1:
                add(a, kept, Fraction(2 * g - 2 + n_out))
            else:
                # tot == 0 forces T empty and b == 0: section corrections
                for i in others:
                    if a[rename[i]] >= 1:
                        a2 = dict(a)
                        a2[rename[i]] -= 1
                        add(a2, kept, Fraction(1))
    return TautClass(g, n_out, deg, acc)


def pushforward_forgetful(x: TautClass, marking: int | None = None) -> TautClass:
    """Integration along the fiber of the map forgetting ``marking``
    (default: the last one); remaining markings close ranks."""
    g, n = x.g, x.n
    if marking is None:
        marking = n
    if not (1 <= marking <= n):
        raise ValueError("bad marking")
    if 2 * g - 2 + (n - 1) <= 0:
        raise ValueError("target unstable")
    deg = x.degree - 2
    relab = {m: (m if m < marking else m - 1) for m in range(1, n + 1) if m != marking}
    acc: dict[DecoratedStratum, Fraction] = {}
    for s, c in x.terms.items():
        G = s.graph
        v = G.legs[marking - 1]
        flags, local_psi, kappa_v, psi_other, kappa_other = _vertex_data(s, v)
        if 2 * G.genera[v] - 2 + (len(flags) - 1) > 0:
            forget_i = flags.index(("l", marking)) + 1
            loc = _local_forgetful_pushforward(
                G.genera[v], len(flags), local_psi, kappa_v, forget_i
            )
            names = [f for f in flags if f != ("l", marking)]
            out_legs = {relab[m]: ("old", m) for m in range(1, n + 1) if m != marking}
            for t, cc in graft_local(
                G, v, loc, names, out_legs, psi_other, kappa_other, c
            ).items():
                acc[t] = acc.get(t, Fraction(0)) + cc
        else:
            # genus-0 trivalent vertex: the bubble contracts
            if any(local_psi.values()) or kappa_v:
                continue  # psi or kappa on a point vanishes
            res = _contract_bubble(s, v, marking, relab, n - 1, psi_other, kappa_other)
            if res is not None:
                t, ratio = res
                acc[t] = acc.get(t, Fraction(0)) + c * ratio
    return TautClass(g, n - 1, deg, acc)


def _contract_bubble(s, v, marking, relab, n_out, psi_other, kappa_other):
    """Forget a marking on an unstable genus-0 trivalent vertex: the vertex
    contracts.  Remaining decorations transport; |Aut| ratio applies."""
    G = s.graph
    others = [f for f in G.flags_at(v) if f != ("l", marking)]
    assert len(others) == 2
    kinds = sorted(f[0] for f in others)
    old_aut = G.automorphism_order()
    genera = [G.genera[u] for u in range(G.num_vertices) if u != v]
    old_to_new = {}
    i = 0
    for u in range(G.num_vertices):
        if u != v:
            old_to_new[u] = i
            i += 1
    slot_next = [0] * len(genera)
    fmap = {}
    if kinds == ["h", "l"]:
        # a leg and an edge: the leg slides to the far end of the edge
        leg_f = next(f for f in others if f[0] == "l")
        he_f = next(f for f in others if f[0] == "h")
        edge_idx = next(
            i for i, (p, q) in enumerate(G.edges) if ("h",) + p == he_f or ("h",) + q == he_f
        )
        (p, q) = G.edges[edge_idx]
        partner = q if ("h",) + p == he_f else p
        if partner[0] == v:
            return None  # loop at the bubble: ambient would be (1,1)
        edges = []
        for i2, (p2, q2) in enumerate(G.edges):
            if i2 == edge_idx:
                continue
            ends = []
            for f in (p2, q2):
                w = old_to_new[f[0]]
                s2 = slot_next[w]
                slot_next[w] += 1
                fmap[("h",) + f] = ("h", w, s2)
                ends.append((w, s2))
            edges.append(tuple(ends))
        legs = []
        for m in range(1, s.graph.n + 1):
            if m == marking:
                continue
            u = G.legs[m - 1]
            if u == v:
                legs.append(old_to_new[partner[0]])
            else:
                legs.append(old_to_new[u])
            fmap[("l", m)] = ("l", relab[m])
        # psi at the partner half-edge becomes psi at the slid leg
        fmap[("h",) + partner] = ("l", relab[leg_f[1]])
    else:
        # two edge ends at v: splice the two edges into one
        he = [next(i for i, (p, q) in enumerate(G.edges) if ("h",) + p == f or ("h",) + q == f) for f in others]
        if he[0] == he[1]:
            return None  # a loop: ambient (1,1) -> (1,0) is excluded upstream
        partners = []
        for f, ei in zip(others, he):
            (p, q) = G.edges[ei]
            partners.append(q if ("h",) + p == f else p)
        if any(p[0] == v for p in partners):
            return None
        edges = []
        for i2, (p2, q2) in enumerate(G.edges):
            if i2 in he:
                continue
            ends = []
            for f in (p2, q2):
                w = old_to_new[f[0]]
                s2 = slot_next[w]
                slot_next[w] += 1
                fmap[("h",) + f] = ("h", w, s2)
                ends.append((w, s2))
            edges.append(tuple(ends))
        ends = []
        for p in partners:
            w = old_to_new[p[0]]
            s2 = slot_next[w]
            slot_next[w] += 1
            fmap[("h",) + p] = ("h", w, s2)
            ends.append((w, s2))
        edges.append(tuple(ends))
        legs = []
        for m in range(1, s.graph.n + 1):
            if m == marking:
                continue
            legs.append(old_to_new[G.legs[m - 1]])
            fmap[("l", m)] = ("l", relab[m])
    newG = StableGraph(genera, legs, edges)
    psi = {}
    for f, e in psi_other.items():
        nf = fmap[f]
        psi[nf] = psi.get(nf, 0) + e
    kappa = {old_to_new[u]: k for u, k in kappa_other.items()}
    t = DecoratedStratum.make(newG, psi, kappa)
    if t is None:
        return None
    return t, Fraction(newG.automorphism_order(), old_aut)


# ----------------------------------------------------------------------
# gluing pushforward and marking relabelling
# ----------------------------------------------------------------------


def pushforward_gluing(factors: list[TautClass], pairs: list, out_labels: dict) -> TautClass:
    """Boundary pushforward: graft the factor classes along glued markings.

    ``pairs`` is a list of ((factor_index, marking), (factor_index, marking))
    -- each pair becomes an edge (a loop when both sides sit in one factor).
    ``out_labels`` maps (factor_index, marking) of every unglued marking to
    its output label 1..n.  Degree rises by 2 per new edge; the coefficient
    of a graft is the product of the input coefficients.
    """
    glued = {p for pq in pairs for p in pq}
    n_out = len(out_labels)
    g_out = sum(f.g for f in factors) + len(pairs) - len(factors) + 1
    deg = sum(f.degree for f in factors) + 2 * len(pairs)
    acc: dict[DecoratedStratum, Fraction] = {}
    for combo in itertools.product(*[list(f.terms.items()) for f in factors]):
        coeff = Fraction(1)
        genera = []
        base = []
        for (s, c) in combo:
            coeff *= c
            base.append(len(genera))
            genera.extend(s.graph.genera)
        slot_next = [0] * len(genera)
        edges = []
        fmap = {}
        for fi, (s, c) in enumerate(combo):
            G = s.graph
            for (a, b) in G.edges:
                ends = []
                for f in (a, b):
                    w = base[fi] + f[0]
                    s2 = slot_next[w]
                    slot_next[w] += 1
                    fmap[(fi, ("h",) + f)] = ("h", w, s2)
                    ends.append((w, s2))
                edges.append(tuple(ends))
        for ((fi, mi), (fj, mj)) in pairs:
            wi = base[fi] + combo[fi][0].graph.legs[mi - 1]
            wj = base[fj] + combo[fj][0].graph.legs[mj - 1]
            si = slot_next[wi]
            slot_next[wi] += 1
            sj = slot_next[wj]
            slot_next[wj] += 1
            fmap[(fi, ("l", mi))] = ("h", wi, si)
            fmap[(fj, ("l", mj))] = ("h", wj, sj)
            edges.append(((wi, si), (wj, sj)))
        legs = [None] * n_out
        for (fi, m), label in out_labels.items():
            legs[label - 1] = base[fi] + combo[fi][0].graph.legs[m - 1]
            fmap[(fi, ("l", m))] = ("l", label)
        if any(l is None for l in legs):
            raise ValueError("out_labels must cover 1..n")
        try:
            newG = StableGraph(genera, legs, edges)
        except Exception as exc:
            raise ValueError("instability after gluing: %s" % exc)
        psi = {}
        kappa = {}
        for fi, (s, c) in enumerate(combo):
            for f, e in s.psi:
                nf = fmap[(fi, f)]
                psi[nf] = psi.get(nf, 0) + e
            for u in range(s.graph.num_vertices):
                k = s.kappa_at(u)
                if k:
                    kappa[base[fi] + u] = k
        t = DecoratedStratum.make(newG, psi, kappa)
        if t is None:
            continue
        acc[t] = acc.get(t, Fraction(0)) + coeff
    return TautClass(g_out, n_out, deg, acc)


def relabel_markings(x: TautClass, mapping: dict) -> TautClass:
    """Apply a bijective relabelling of markings (old label -> new label)."""
    acc: dict[DecoratedStratum, Fraction] = {}
    for s, c in x.terms.items():
        G = s.graph
        legs = [None] * x.n
        for m in range(1, x.n + 1):
            legs[mapping[m] - 1] = G.legs[m - 1]
        G2 = StableGraph(G.genera, legs, G.edges, check=False)
        psi = {}
        for f, e in s.psi:
            nf = ("l", mapping[f[1]]) if f[0] == "l" else f
            psi[nf] = e
        kappa = {u: k for u, k in enumerate(s.kappa) if k}
        t = DecoratedStratum.make(G2, psi, kappa)
        acc[t] = acc.get(t, Fraction(0)) + c
    return TautClass(x.g, x.n, x.degree, acc)


# ----------------------------------------------------------------------
# generators and pairing ranks
# ----------------------------------------------------------------------


def _kappa_monomials(budget: int):
    """All multisets of integers >= 1 with sum <= budget."""
    out = [()]
    def rec(prefix, smallest, left):
        for b in range(smallest, left + 1):
            cur = prefix + (b,)
            out.append(cur)
            rec(cur, b, left - b)
    rec((), 1, budget)
    return out


def degree_generators(g: int, n: int, d: int) -> list[DecoratedStratum]:
    """All canonical decorated strata of cohomological degree ``d``."""
    if d % 2:
        raise ValueError("odd degree has no strata generators")
    if not (0 <= d <= 2 * (3 * g - 3 + n)):
        raise ValueError("degree out of range")
    from .graphs import enumerate_stable_graphs

    r = d // 2
    found: dict = {}
    for G in enumerate_stable_graphs(g, n, max_edges=r):
        left = r - G.num_edges
        flags = [f for v in range(G.num_vertices) for f in G.flags_at(v)]
        for psi_combo in _bounded_compositions(flags, left):
            rem = left - sum(psi_combo.values())
            for kappa_combo in _vertex_kappas(G, rem):
                s = DecoratedStratum.make(G, psi_combo, kappa_combo)
                if s is not None and s not in found:
                    found[s] = True
    return sorted(found, key=lambda s: (s.graph.num_edges, s.graph.key(), s.psi, s.kappa))


def _bounded_compositions(flags, total):
    """All psi assignments with sum <= total."""
    if total == 0:
        yield {}
        return
    def rec(i, left, cur):
        if i == len(flags):
            yield dict(cur)
            return
        for e in range(left + 1):
            if e:
                cur[flags[i]] = e
            yield from rec(i + 1, left - e, cur)
            if e:
                del cur[flags[i]]
    yield from rec(0, total, {})


def _vertex_kappas(G, total):
    """All kappa assignments across vertices with total index sum == given."""
    Vs = list(range(G.num_vertices))
    def rec(i, left):
        if i == len(Vs):
            if left == 0:
                yield {}
            return
        for mono in _kappa_monomials(left):
            if sum(mono) <= left:
                for rest in rec(i + 1, left - sum(mono)):
                    out = dict(rest)
                    if mono:
                        out[Vs[i]] = mono
                    yield out
    yield from rec(0, total)


def pairing_matrix(g: int, n: int, d: int):
    """The exact matrix of integrals of products of degree-d generators
    against complementary-degree generators."""
    D = 2 * (3 * g - 3 + n)
    rows = degree_generators(g, n, d)
    cols = degree_generators(g, n, D - d)
    mat = []
    for s in rows:
        x = TautClass(g, n, d, {s: Fraction(1)})
        row = []
        for t in cols:
            y = TautClass(g, n, D - d, {t: Fraction(1)})
            row.append(integrate(product(x, y)))
        mat.append(row)
    return rows, cols, mat


def pairing_rank(g: int, n: int, d: int, primes=linalg.DEFAULT_PRIMES):
    """(matrix, rank) of the intersection pairing in degree d."""
    rows, cols, mat = pairing_matrix(g, n, d)
    if not rows or not cols:
        return mat, 0
    return mat, linalg.rank(mat, primes)
