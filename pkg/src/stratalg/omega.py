r"""Cusp-form decorated classes: the semi-tautological extension generated
by the holomorphic 11-form on Mbar_{1,11}.

An omega stratum is a decorated stratum together with one omega slot: a
genus-1 vertex, an 11-element subset S of its flags (encoding the pullback
of omega along forgetting the other flags), and a polarization tag.  Under
permutations of the 11 chosen flags the class transforms by the sign
character, so every subset is stored sorted and the sorting sign is pushed
into the coefficient; a graph automorphism fixing the subset with odd sign
kills the class.

Pairings of omega classes against their antiholomorphic mirrors reduce to
the normalization <omega, omega-bar> = 1 on Mbar_{1,11} through:

- pushing markings outside both subsets forward (projection formula),
- trading psi classes on the omega vertex for boundary divisors
  (psi = delta_irr/12 + sum of rational tails in genus 1),
- restricting the omega decorations to those boundary terms by the
  contract-and-relabel rule (a marking on a collapsing rational tail is
  replaced by the node flag; two subset members on one tail kill the term).

Every rank reported here is the exact rank of a pairing matrix; the
Getzler--Kapranov dimensions quoted next to them are published inputs used
as match targets, never recomputed.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cache

from .graphs import StableGraph, common_degenerations_fast, trivial_graph
from .integrals import kappa_psi_integral
from .strata import (
    DecoratedStratum,
    TautClass,
    _cached_degenerations,
    _local_forgetful_pushforward,
    _transport_monomial,
    boundary_class,
    fundamental_class,
    product,
    psi_class,
    pushforward_forgetful,
    stratum_class,
    zero_class,
)
from . import linalg


HOL = "hol"
ANTIHOL = "antihol"

#: pairing of polarization tags: <hol, antihol> = 1, <antihol, hol> = EPSILON
EPSILON_DEFAULT = Fraction(-1)


def _sort_sign(seq) -> tuple[tuple, int]:
    """Sort a sequence of distinct keys; return (sorted tuple, permutation sign)."""
    seq = list(seq)
    order = sorted(range(len(seq)), key=lambda i: seq[i])
    sign = 1
    seen = [False] * len(seq)
    for i in range(len(seq)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return tuple(seq[i] for i in order), sign


class OmegaStratum:
    """Decorated stratum with one omega slot, in canonical form."""

    __slots__ = ("graph", "psi", "kappa", "vertex", "subset", "pol", "_hash")

    def __init__(self, graph, psi, kappa, vertex, subset, pol):
        self.graph = graph
        self.psi = psi
        self.kappa = kappa
        self.vertex = vertex
        self.subset = subset
        self.pol = pol
        self._hash = hash((graph, psi, kappa, vertex, subset, pol))

    @property
    def degree(self) -> int:
        d = self.graph.num_edges + sum(e for _, e in self.psi)
        d += sum(b for k in self.kappa for b in k)
        return 2 * d + 11

    def kappa_at(self, v):
        return self.kappa[v] if v < len(self.kappa) else ()

    def psi_dict(self):
        return dict(self.psi)

    def __eq__(self, other):
        return (
            isinstance(other, OmegaStratum)
            and self.graph == other.graph
            and self.psi == other.psi
            and self.kappa == other.kappa
            and self.vertex == other.vertex
            and self.subset == other.subset
            and self.pol == other.pol
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "OmegaStratum(%r, v=%d, S=%r, %s)" % (
            self.graph,
            self.vertex,
            self.subset,
            self.pol,
        )


def omega_make(graph, psi, kappa, vertex, subset_ordered, pol):
    """Canonicalize an omega stratum; returns (stratum, sign) or None.

    ``subset_ordered`` lists the 11 flags in geometric order (the order
    matters up to sign).  None means the class vanishes: either a vertex is
    decorated beyond its dimension or some automorphism fixes the subset
    with odd sign.
    """
    subset_ordered = tuple(subset_ordered)
    if len(set(subset_ordered)) != 11:
        raise ValueError("omega subset must have 11 distinct flags")
    if graph.genera[vertex] != 1:
        raise ValueError("omega lives on a genus-1 vertex")
    if any(graph.flag_vertex(f) != vertex for f in subset_ordered):
        raise ValueError("omega subset must consist of flags at its vertex")
    psi = {f: e for f, e in (psi or {}).items() if e}
    kappa = {v: tuple(sorted(k)) for v, k in (kappa or {}).items() if k}
    # vertex dimension bound; the omega vertex itself must carry >= 11 flags
    for v in range(graph.num_vertices):
        deg_v = sum(e for f, e in psi.items() if graph.flag_vertex(f) == v)
        deg_v += sum(kappa.get(v, ()))
        if deg_v > 3 * graph.genera[v] - 3 + graph.valence(v):
            return None
    sign0 = 1
    sub_sorted, s0 = _sort_sign(subset_ordered)
    sign0 *= s0
    G, fmap = graph.canonical()
    vmap = {}
    for f, nf in fmap.items():
        vmap[graph.flag_vertex(f)] = G.flag_vertex(nf)
    psi1 = {fmap[f]: e for f, e in psi.items()}
    kappa1 = {vmap[v]: k for v, k in kappa.items()}
    sub1, s1 = _sort_sign(tuple(fmap[f] for f in sub_sorted))
    sign0 *= s1
    v1 = vmap[vertex]
    # minimize over automorphisms, tracking the sign
    best = None
    best_sign = 1
    zero = False
    for aut in G.automorphisms():
        av = {}
        for f, nf in aut.items():
            av[G.flag_vertex(f)] = G.flag_vertex(nf)
        p = tuple(sorted((aut[f], e) for f, e in psi1.items()))
        k2 = [()] * G.num_vertices
        for v, kv in kappa1.items():
            k2[av[v]] = kv
        sub2, s2 = _sort_sign(tuple(aut[f] for f in sub1))
        cand = (p, tuple(k2), av[v1], sub2)
        if best is None or cand < best:
            best = cand
            best_sign = s2
        elif cand == best and s2 != best_sign:
            zero = True
    if zero:
        return None
    p, k2, v2, sub2 = best
    return (
        OmegaStratum(G, p, k2, v2, sub2, pol),
        sign0 * best_sign,
    )


class OmegaClass:
    """Formal Q-linear combination of omega strata of one degree."""

    __slots__ = ("g", "n", "degree", "terms")

    def __init__(self, g, n, degree, terms=None):
        self.g = g
        self.n = n
        self.degree = degree
        self.terms: dict[OmegaStratum, Fraction] = {}
        for s, c in (terms or {}).items():
            if c:
                self.terms[s] = self.terms.get(s, Fraction(0)) + Fraction(c)
        self.terms = {s: c for s, c in self.terms.items() if c}

    def is_zero(self):
        return not self.terms

    def scale(self, c):
        c = Fraction(c)
        return OmegaClass(self.g, self.n, self.degree, {s: c * v for s, v in self.terms.items()})

    def __add__(self, other):
        if (self.g, self.n) != (other.g, other.n):
            raise ValueError("ambient mismatch")
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError("inhomogeneous sum")
        deg = self.degree if self.terms else other.degree
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, Fraction(0)) + c
        return OmegaClass(self.g, self.n, deg, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        return (
            isinstance(other, OmegaClass)
            and (self.g, self.n) == (other.g, other.n)
            and self.terms == other.terms
        )

    def __repr__(self):
        return "OmegaClass(%d terms; g=%d, n=%d, deg=%d)" % (
            len(self.terms),
            self.g,
            self.n,
            self.degree,
        )

    def mirror(self) -> "OmegaClass":
        """Swap the polarization tag on every stratum."""
        out = {}
        for s, c in self.terms.items():
            t = OmegaStratum(
                s.graph,
                s.psi,
                s.kappa,
                s.vertex,
                s.subset,
                ANTIHOL if s.pol == HOL else HOL,
            )
            out[t] = c
        return OmegaClass(self.g, self.n, self.degree, out)


def omega_zero(g, n, degree=11):
    return OmegaClass(g, n, degree, {})


def omega_leaf(n: int, subset, pol=HOL) -> OmegaClass:
    """f_S^* omega on the trivial graph of (1, n): the degree-11 classes."""
    if n < 11:
        raise ValueError("need at least 11 markings")
    G = trivial_graph(1, n)
    sub = tuple(("l", m) for m in sorted(subset))
    made = omega_make(G, None, None, 0, sub, pol)
    if made is None:
        return omega_zero(1, n)
    s, sign = made
    return OmegaClass(1, n, 11, {s: Fraction(sign)})


def omega_stratum_class(graph, vertex, subset, pol=HOL, psi=None, kappa=None, coeff=1):
    sub = tuple(subset)
    made = omega_make(graph, psi, kappa, vertex, sub, pol)
    deg = 11 + 2 * (
        graph.num_edges
        + sum((psi or {}).values())
        + sum(b for k in (kappa or {}).values() for b in k)
    )
    if made is None:
        return OmegaClass(graph.g, graph.n, deg)
    s, sign = made
    return OmegaClass(graph.g, graph.n, deg, {s: Fraction(coeff) * sign})


# ----------------------------------------------------------------------
# restriction of an omega slot along a contraction
# ----------------------------------------------------------------------


def transport_omega(stratum: OmegaStratum, morph):
    """Restrict the omega slot along a contraction ``morph: G -> A`` where
    ``stratum`` lives on ``A = morph.target``.

    Returns ``None`` when the restriction vanishes, else
    ``(u1, ordered_subset_of_G_flags)``: the genus-1 vertex of the preimage
    subgraph and the images of the subset members in geometric order (a
    subset member on a collapsing rational branch is replaced by the flag
    where the branch meets ``u1``).
    """
    G = morph.source
    w = stratum.vertex
    fiber = [u for u, img in enumerate(morph.vertex_map) if img == w]
    ones = [u for u in fiber if G.genera[u] == 1]
    if len(ones) != 1:
        return None  # all-rational cycle (h^1 = 1) or impossible genus split
    u1 = ones[0]
    kept = set(morph.kept)
    # contracted edges inside the fiber form the subgraph; check it is a tree
    sub_edges = [
        i
        for i, (a, b) in enumerate(G.edges)
        if i not in kept and a[0] in fiber and b[0] in fiber
    ]
    if len(sub_edges) != len(fiber) - 1:
        return None  # contains a cycle; the genus-1 piece is not a vertex
    # attachment flag at u1 for every other fiber vertex: first edge on the
    # path to u1.  Build adjacency of the tree.
    adj = {u: [] for u in fiber}
    for i in sub_edges:
        (a, b) = G.edges[i]
        adj[a[0]].append((b[0], ("h",) + a))
        adj[b[0]].append((a[0], ("h",) + b))
    # BFS from u1: branch(u) = flag at u1 through which u hangs
    branch = {u1: None}
    frontier = [u1]
    while frontier:
        x = frontier.pop()
        for (y, flag_at_x) in adj[x]:
            if y in branch:
                continue
            branch[y] = flag_at_x if x == u1 else branch[x]
            frontier.append(y)
    if len(branch) != len(fiber):
        return None
    inv = {v: k for k, v in morph.flag_map.items()}
    images = []
    for f in stratum.subset:
        gf = inv[f]
        u = G.flag_vertex(gf)
        if u == u1:
            images.append(gf)
        else:
            images.append(branch[u])
    if len(set(images)) != 11:
        return None  # two subset members on one collapsing branch
    return u1, tuple(images)


# ----------------------------------------------------------------------
# the genus-1 paired vertex integral
# ----------------------------------------------------------------------


def _psi_pair_expansion_terms(m, S, T, i):
    """Markings j such that the divisor with tail {i, j} survives both
    omega restrictions, for i in exactly one of S, T."""
    if i in S and i in T:
        return []
    pool = T if i in S else S
    other = S if i in S else T
    return [j for j in range(1, m + 1) if j != i and j in pool and j not in other]


def _drop_sign(S, i):
    """Sign of moving the entry of sorted S at the member i to the end."""
    k = S.index(i)
    return -1 if (len(S) - 1 - k) % 2 else 1


@cache
def _vertex_pair_integral(m, S, T, psi, kappa) -> Fraction:
    """int over Mbar_{1,m} of omega_S . bar-omega_T . prod psi^a . prod kappa,
    normalized by <omega, bar-omega> = 1 on Mbar_{1,11}.

    ``S`` and ``T`` are sorted marking tuples (|S| = |T| = 11); ``psi`` is a
    sorted tuple of (marking, exponent); ``kappa`` a sorted tuple of indices.
    Signs of the defining orders are the caller's business.
    """
    psi_d = dict(psi)
    total_deg = 22 + 2 * (sum(psi_d.values()) + sum(kappa))
    if total_deg != 2 * m:
        return Fraction(0)
    outside = [i for i in range(1, m + 1) if i not in S and i not in T]
    if outside:
        # push forward along the largest outside marking (projection formula)
        i = outside[-1]
        loc = _local_forgetful_pushforward(1, m, {("l", j): e for j, e in psi_d.items()}, kappa, i)
        rename = {j: (j if j < i else j - 1) for j in range(1, m + 1) if j != i}
        S2 = tuple(rename[j] for j in S)
        T2 = tuple(rename[j] for j in T)
        out = Fraction(0)
        for s, c in loc.terms.items():
            p2 = tuple(sorted((f[1], e) for f, e in s.psi))
            k2 = s.kappa_at(0)
            out += c * _vertex_pair_integral(m - 1, S2, T2, p2, k2)
        return out
    if m == 11:
        return Fraction(1) if not psi_d and not kappa else Fraction(0)
    # every marking is in S cup T; vanish unless a psi on the symmetric
    # difference lets us trade for a rational tail
    cand = [i for i, e in psi_d.items() if e and ((i in S) != (i in T))]
    if cand:
        i = cand[0]
        if psi_d[i] != 1:
            # the leftover psi lands on the three-pointed tail: zero... unless
            # it can be expanded at another marking first; exponents >= 2 on
            # the symmetric difference die in every expansion order, see below
            pass
        out = Fraction(0)
        for j in _psi_pair_expansion_terms(m, S, T, i):
            if psi_d[i] != 1 or psi_d.get(j, 0) != 0:
                continue  # tail integral <tau_{a_i-1} tau_{a_j} tau_0> = 0
            # the node is the last marking of the reduced space
            sS = _drop_sign(S, i) if i in S else None
            sT = _drop_sign(T, j) if j in T else None
            if i in T:
                sS, sT = _drop_sign(S, j), _drop_sign(T, i)
                drop_i, drop_j = j, i
            else:
                drop_i, drop_j = i, j
            rename = {}
            idx = 1
            for k in range(1, m + 1):
                if k in (i, j):
                    continue
                rename[k] = idx
                idx += 1
            node = m - 1
            S2 = tuple(sorted(rename[k] for k in S if k != drop_i)) + (node,)
            T2 = tuple(sorted(rename[k] for k in T if k != drop_j)) + (node,)
            p2 = tuple(sorted((rename[k], e) for k, e in psi_d.items() if k not in (i, j) and e))
            out += sS * sT * _vertex_pair_integral(m - 1, S2, T2, p2, tuple(kappa))
        return out
    if any(e for i, e in psi_d.items()):
        return Fraction(0)  # psi only on S cap T: every divisor term dies
    if kappa:
        # trade one kappa for boundary terms through the class machinery
        tau = _kappa_boundary_expansion(m, kappa[-1])
        rest_psi = {}
        rest_kappa = {0: kappa[:-1]} if kappa[:-1] else None
        rest = stratum_class(trivial_graph(1, m), rest_psi, rest_kappa)
        tau = product(tau, rest)
        return _integrate_omega_pair_against(m, S, T, tau)
    return Fraction(0)


@cache
def _kappa_boundary_expansion(m: int, b: int) -> TautClass:
    """kappa_b on Mbar_{1,m} as a boundary class: kappa_b = pi_*(psi^b . B)
    where B is the divisor expansion of one psi_{m+1} factor; the result
    carries kappa only on genus-0 vertices."""
    B = _genus1_psi_divisor_class(m + 1, m + 1)
    s = stratum_class(trivial_graph(1, m + 1), psi={("l", m + 1): b})
    B = product(B, s)
    return pushforward_forgetful(B, m + 1)


@cache
def _genus1_psi_divisor_class(n: int, i: int) -> TautClass:
    """psi_i = delta_irr/12 + sum of rational tails containing i, on Mbar_{1,n}."""
    loop_legs = [0] * n
    loop = StableGraph([0], loop_legs, [((0, 0), (0, 1))])
    out = boundary_class(loop).scale(Fraction(1, 12))
    others = [m for m in range(1, n + 1) if m != i]
    for r in range(1, len(others) + 1):
        for extra in itertools.combinations(others, r):
            A = {i} | set(extra)
            legs = [1 if m in A else 0 for m in range(1, n + 1)]
            G = StableGraph([1, 0], legs, [((0, 0), (1, 0))])
            out = out + boundary_class(G)
    return out


def _integrate_omega_pair_against(m, S, T, tau: TautClass) -> Fraction:
    """int over Mbar_{1,m} of omega_S . bar-omega_T . tau for a boundary-rich
    tautological class tau, by restricting the omegas to each stratum."""
    total = Fraction(0)
    for s, c in tau.terms.items():
        G = s.graph
        if G.num_edges == 0:
            p2 = tuple(sorted((f[1], e) for f, e in s.psi))
            total += c * _vertex_pair_integral(m, S, T, p2, s.kappa_at(0))
            continue
        # restrict both omegas along the contraction of all edges
        res = _restrict_pair_to_stratum(G, S, T)
        if res is None:
            continue
        u1, S2, T2, sign = res
        val = Fraction(1, G.automorphism_order()) * sign
        psi_d = s.psi_dict()
        dead = False
        for v in range(G.num_vertices):
            flags = G.flags_at(v)
            if v == u1:
                continue
            exps = [psi_d.get(f, 0) for f in flags]
            part = kappa_psi_integral(G.genera[v], len(flags), exps, s.kappa_at(v))
            if not part:
                dead = True
                break
            val *= part
        if dead:
            continue
        flags1 = G.flags_at(u1)
        pos = {f: k + 1 for k, f in enumerate(flags1)}
        sub_S, sgnS = _sort_sign(tuple(pos[f] for f in S2))
        sub_T, sgnT = _sort_sign(tuple(pos[f] for f in T2))
        p1 = tuple(sorted((pos[f], e) for f, e in psi_d.items() if f in pos and e))
        inner = _vertex_pair_integral(len(flags1), sub_S, sub_T, p1, s.kappa_at(u1))
        total += c * val * sgnS * sgnT * inner
    return total


def _restrict_pair_to_stratum(G: StableGraph, S, T):
    """Restrict omega_S and bar-omega_T (subsets of ambient markings of a
    genus-1 space) to the stratum of G: both land on the unique genus-1
    vertex or the term dies.  Returns (u1, S-flags, T-flags, sign=1)."""
    ones = [u for u in range(G.num_vertices) if G.genera[u] == 1]
    if len(ones) != 1:
        return None
    u1 = ones[0]
    # branch attachment flags: component of G minus u1 containing each vertex
    adj = {u: [] for u in range(G.num_vertices)}
    for (a, b) in G.edges:
        adj[a[0]].append((b[0], ("h",) + a))
        adj[b[0]].append((a[0], ("h",) + b))
    branch = {u1: None}
    frontier = [u1]
    while frontier:
        x = frontier.pop()
        for (y, flag_at_x) in adj[x]:
            if y in branch:
                continue
            branch[y] = flag_at_x if x == u1 else branch[x]
            frontier.append(y)
    if len(branch) != G.num_vertices:
        return None
    if any(a[0] == u1 and b[0] == u1 for (a, b) in G.edges):
        return None  # loop at the genus-1 vertex would raise genus
    def image(mark):
        u = G.legs[mark - 1]
        return ("l", mark) if u == u1 else branch[u]
    S2 = tuple(image(mk) for mk in S)
    T2 = tuple(image(mk) for mk in T)
    if len(set(S2)) != 11 or len(set(T2)) != 11:
        return None
    return u1, S2, T2, 1


# ----------------------------------------------------------------------
# pairing of omega classes
# ----------------------------------------------------------------------


def _pol_factor(pa, pb, eps):
    if pa == pb:
        return Fraction(0)
    return Fraction(1) if (pa, pb) == (HOL, ANTIHOL) else Fraction(eps)


def _pair_strata(sx: OmegaStratum, sy: OmegaStratum, eps) -> Fraction:
    """Integral of the product of two omega strata over Mbar_{g,n}."""
    pol = _pol_factor(sx.pol, sy.pol, eps)
    if not pol:
        return Fraction(0)
    GA, GB = sx.graph, sy.graph
    auta = GA.automorphism_order()
    autb = GB.automorphism_order()
    total = Fraction(0)
    legs_a = tuple(sorted(f for f in sx.subset if f[0] == "l"))
    legs_b = tuple(sorted(f for f in sy.subset if f[0] == "l"))
    for (G, fA, fB) in _omega_degenerations(
        GA, GB, sx.vertex, sy.vertex, legs_a, legs_b
    ):
        ta = transport_omega(sx, fA)
        if ta is None:
            continue
        tb = transport_omega(sy, fB)
        if tb is None:
            continue
        u1a, Sflags = ta
        u1b, Tflags = tb
        if u1a != u1b:
            continue  # a lone omega factor integrates to zero
        u1 = u1a
        common = set(fA.kept) & set(fB.kept)
        base_weight = Fraction(1, auta * autb * G.automorphism_order())
        for pa, ka in _transport_monomial_pair(sx, fA):
            for pb, kb in _transport_monomial_pair(sy, fB):
                psi0 = dict(pa)
                for f, e in pb.items():
                    psi0[f] = psi0.get(f, 0) + e
                kap0 = dict(ka)
                for v, k in kb.items():
                    kap0[v] = tuple(sorted(kap0.get(v, ()) + k))
                monos = [(Fraction(1), psi0)]
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
                    val = _graph_omega_integral(G, u1, Sflags, Tflags, ps, kap0)
                    if val:
                        total += base_weight * coef * val
    return pol * total


@cache
def _omega_degenerations(GA, GB, va, wb, legs_a, legs_b):
    return common_degenerations_fast(
        GA, GB, omega_u=va, omega_w=wb,
        special_legs_A=legs_a, special_legs_B=legs_b,
    )


def _transport_monomial_pair(s, morph):
    """psi/kappa transport along a contraction (shared with strata.product)."""
    class _Shim:
        pass

    shim = _Shim()
    shim.psi = s.psi
    shim.kappa = s.kappa
    shim.graph = s.graph
    shim.kappa_at = lambda v: s.kappa_at(v)
    return _transport_monomial(shim, morph)


def _graph_omega_integral(G, u1, Sflags, Tflags, psi, kappa) -> Fraction:
    """Product over vertices of local integrals: the paired omega vertex via
    the genus-1 reduction, the rest via kappa-psi correlators."""
    total = Fraction(1)
    for v in range(G.num_vertices):
        flags = G.flags_at(v)
        if v == u1:
            pos = {f: k + 1 for k, f in enumerate(flags)}
            sub_S, sgnS = _sort_sign(tuple(pos[f] for f in Sflags))
            sub_T, sgnT = _sort_sign(tuple(pos[f] for f in Tflags))
            p1 = tuple(
                sorted((pos[f], e) for f, e in psi.items() if f in pos and e)
            )
            inner = _vertex_pair_integral(
                len(flags), sub_S, sub_T, p1, kappa.get(v, ())
            )
            if not inner:
                return Fraction(0)
            total *= sgnS * sgnT * inner
        else:
            exps = [psi.get(f, 0) for f in flags]
            part = kappa_psi_integral(G.genera[v], len(flags), exps, kappa.get(v, ()))
            if not part:
                return Fraction(0)
            total *= part
    return total


def omega_pair(x: OmegaClass, y: OmegaClass, eps=EPSILON_DEFAULT) -> Fraction:
    """Exact pairing of two omega classes, normalized by <omega, bar-omega>=1.

    Zero when the polarizations agree (an odd class squares to zero); raises
    on a degree mismatch."""
    if (x.g, x.n) != (y.g, y.n):
        raise ValueError("ambient mismatch")
    if x.is_zero() or y.is_zero():
        return Fraction(0)
    if x.degree + y.degree != 2 * (3 * x.g - 3 + x.n):
        raise ValueError("degree mismatch")
    total = Fraction(0)
    for sx, cx in x.terms.items():
        for sy, cy in y.terms.items():
            val = _pair_strata(sx, sy, eps)
            if val:
                total += cx * cy * val
    return total


# ----------------------------------------------------------------------
# surgeries on omega classes
# ----------------------------------------------------------------------


def omega_relabel(x: OmegaClass, mapping: dict) -> OmegaClass:
    """Bijective marking relabelling; the subset sign transports."""
    out = {}
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
        sub = tuple(
            ("l", mapping[f[1]]) if f[0] == "l" else f for f in s.subset
        )
        made = omega_make(G2, psi, kappa, s.vertex, sub, s.pol)
        if made is None:
            continue
        t, sign = made
        out[t] = out.get(t, Fraction(0)) + c * sign
    return OmegaClass(x.g, x.n, x.degree, out)


def omega_glue(om: OmegaClass, factors: list, pairs: list, out_labels: dict) -> OmegaClass:
    """Boundary pushforward grafting an omega factor with tautological
    factors; mirrors strata.pushforward_gluing.

    Factor 0 is the omega class; ``factors`` are TautClasses numbered from 1.
    ``pairs``/`out_labels`` use (factor_index, marking) with the omega factor
    as index 0.
    """
    glued = {p for pq in pairs for p in pq}
    n_out = len(out_labels)
    all_cls = [om] + list(factors)
    g_out = sum(f.g for f in all_cls) + len(pairs) - len(all_cls) + 1
    deg = sum(f.degree for f in all_cls) + 2 * len(pairs)
    acc = {}
    taut_items = [list(f.terms.items()) for f in factors]
    for (s0, c0) in om.terms.items():
        for combo in itertools.product(*taut_items):
            coeff = c0
            strata = [s0] + [s for (s, c) in combo]
            for (_, c) in combo:
                coeff *= c
            genera = []
            base = []
            for s in strata:
                base.append(len(genera))
                genera.extend(s.graph.genera)
            slot_next = [0] * len(genera)
            edges = []
            fmap = {}
            for fi, s in enumerate(strata):
                for (a, b) in s.graph.edges:
                    ends = []
                    for f in (a, b):
                        w = base[fi] + f[0]
                        s2 = slot_next[w]
                        slot_next[w] += 1
                        fmap[(fi, ("h",) + f)] = ("h", w, s2)
                        ends.append((w, s2))
                    edges.append(tuple(ends))
            for ((fi, mi), (fj, mj)) in pairs:
                wi = base[fi] + strata[fi].graph.legs[mi - 1]
                wj = base[fj] + strata[fj].graph.legs[mj - 1]
                si = slot_next[wi]
                slot_next[wi] += 1
                sj = slot_next[wj]
                slot_next[wj] += 1
                fmap[(fi, ("l", mi))] = ("h", wi, si)
                fmap[(fj, ("l", mj))] = ("h", wj, sj)
                edges.append(((wi, si), (wj, sj)))
            legs = [None] * n_out
            for (fi, m), label in out_labels.items():
                legs[label - 1] = base[fi] + strata[fi].graph.legs[m - 1]
                fmap[(fi, ("l", m))] = ("l", label)
            newG = StableGraph(genera, legs, edges)
            psi = {}
            kappa = {}
            for fi, s in enumerate(strata):
                for f, e in s.psi:
                    nf = fmap[(fi, f)]
                    psi[nf] = psi.get(nf, 0) + e
                for u in range(s.graph.num_vertices):
                    k = s.kappa_at(u)
                    if k:
                        kappa[base[fi] + u] = k
            sub = tuple(fmap[(0, f)] for f in s0.subset)
            made = omega_make(newG, psi, kappa, base[0] + s0.vertex, sub, s0.pol)
            if made is None:
                continue
            t, sign = made
            acc[t] = acc.get(t, Fraction(0)) + coeff * sign
    return OmegaClass(g_out, n_out, deg, acc)


# ----------------------------------------------------------------------
# orbit memo for large pairing matrices
# ----------------------------------------------------------------------


def _marking_type(s: OmegaStratum, m: int):
    G = s.graph
    f = ("l", m)
    return (G.legs[m - 1], f in s.subset, dict(s.psi).get(f, 0))


_PAIR_CACHE: dict = {}


def pair_cached(sx: OmegaStratum, sy: OmegaStratum, eps=EPSILON_DEFAULT) -> Fraction:
    """omega pairing of two strata, memoized up to simultaneous relabelling
    of markings (the joint orbit of the pair under the symmetric group)."""
    n = sx.graph.n
    types = [(_marking_type(sx, m), _marking_type(sy, m)) for m in range(1, n + 1)]
    order = sorted(range(1, n + 1), key=lambda m: (types[m - 1], m))
    relab = {m: i + 1 for i, m in enumerate(order)}
    tx = omega_relabel(OmegaClass(sx.graph.g, n, sx.degree, {sx: Fraction(1)}), relab)
    ty = omega_relabel(OmegaClass(sy.graph.g, n, sy.degree, {sy: Fraction(1)}), relab)
    if tx.is_zero() or ty.is_zero():
        return Fraction(0)
    (cx_s, cx_c), = tx.terms.items()
    (cy_s, cy_c), = ty.terms.items()
    key = (cx_s, cy_s, eps)
    val = _PAIR_CACHE.get(key)
    if val is None:
        val = _pair_strata(cx_s, cy_s, eps)
        _PAIR_CACHE[key] = val
    return val * cx_c * cy_c


def omega_pair_fast(x: OmegaClass, y: OmegaClass, eps=EPSILON_DEFAULT) -> Fraction:
    if (x.g, x.n) != (y.g, y.n):
        raise ValueError("ambient mismatch")
    if x.is_zero() or y.is_zero():
        return Fraction(0)
    if x.degree + y.degree != 2 * (3 * x.g - 3 + x.n):
        raise ValueError("degree mismatch")
    total = Fraction(0)
    for sx, cx in x.terms.items():
        for sy, cy in y.terms.items():
            val = pair_cached(sx, sy, eps)
            if val:
                total += cx * cy * val
    return total


# ----------------------------------------------------------------------
# signature-level memo and parallel matrix assembly
# ----------------------------------------------------------------------


def _inversion_sign(values) -> int:
    inv = 0
    vals = list(values)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if vals[i] > vals[j]:
                inv += 1
    return -1 if inv % 2 else 1


def _stratum_leg_types(s: OmegaStratum, n: int):
    G = s.graph
    psi = dict(s.psi)
    sub = set(s.subset)
    return [
        (G.legs[m - 1], ("l", m) in sub, psi.get(("l", m), 0)) for m in range(1, n + 1)
    ]


def _stratum_nonleg_key(s: OmegaStratum):
    he_psi = tuple(sorted((f, e) for f, e in s.psi if f[0] == "h"))
    he_sub = tuple(sorted(f for f in s.subset if f[0] == "h"))
    return (s.graph.key(), he_psi, he_sub, s.kappa, s.vertex, s.pol)


_SIG_CACHE: dict = {}


def pair_signature_cached(sx: OmegaStratum, sy: OmegaStratum, eps=EPSILON_DEFAULT) -> Fraction:
    """Pairing through a cheap joint-orbit signature: pairs related by a
    simultaneous marking relabelling share one core evaluation; the subset
    reordering signs are applied per pair."""
    n = sx.graph.n
    tx = _stratum_leg_types(sx, n)
    ty = _stratum_leg_types(sy, n)
    joint = [(tx[m - 1], ty[m - 1]) for m in range(1, n + 1)]
    order = sorted(range(1, n + 1), key=lambda m: (joint[m - 1], m))
    relab = {m: i + 1 for i, m in enumerate(order)}
    sgn_x = _inversion_sign([relab[f[1]] for f in sx.subset if f[0] == "l"])
    sgn_y = _inversion_sign([relab[f[1]] for f in sy.subset if f[0] == "l"])
    sig = (
        tuple(sorted(joint)),
        _stratum_nonleg_key(sx),
        _stratum_nonleg_key(sy),
        eps,
    )
    core = _SIG_CACHE.get(sig)
    if core is None:
        val = pair_cached(sx, sy, eps)
        core = val / (sgn_x * sgn_y)
        _SIG_CACHE[sig] = core
    return core * sgn_x * sgn_y


def _pair_terms(x: OmegaClass, y: OmegaClass, eps) -> Fraction:
    total = Fraction(0)
    for sx, cx in x.terms.items():
        for sy, cy in y.terms.items():
            val = pair_signature_cached(sx, sy, eps)
            if val:
                total += cx * cy * val
    return total


def pairing_matrix(classes, battery, eps=EPSILON_DEFAULT, processes=None):
    """Exact pairing matrix of two lists of omega classes.

    Deterministic regardless of the worker count: rows are assembled in
    chunks and reassembled in order.
    """
    import os

    if processes is None:
        processes = int(os.environ.get("STRATALG_THREADS", "1"))
    rows = list(classes)
    cols = list(battery)
    if processes <= 1 or len(rows) < 4 * processes:
        return [[_pair_terms(x, y, eps) for y in cols] for x in rows]
    import multiprocessing as mp

    chunks = [list(range(i, len(rows), processes)) for i in range(processes)]
    args = [(idxs, rows, cols, eps) for idxs in chunks]
    with mp.get_context("fork").Pool(processes) as pool:
        parts = pool.map(_matrix_chunk, args)
    out = [None] * len(rows)
    for idxs, part in zip(chunks, parts):
        for i, row in zip(idxs, part):
            out[i] = row
    return out


def _matrix_chunk(arg):
    idxs, rows, cols, eps = arg
    return [[_pair_terms(rows[i], y, eps) for y in cols] for i in idxs]


def omega_rank(classes, battery, eps=EPSILON_DEFAULT, primes=linalg.DEFAULT_PRIMES,
               processes=None):
    """Rank of the pairing matrix of ``classes`` against ``battery``; a lower
    bound for the dimension they span."""
    mat = pairing_matrix(classes, battery, eps, processes)
    if not mat or not mat[0]:
        return 0
    return linalg.rank_modular(mat, primes)
