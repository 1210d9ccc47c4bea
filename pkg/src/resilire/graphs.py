"""Directed labeled multigraphs sized for exhaustive analysis.

States of the graph backend stay small (a path-length bound keeps them
that way), so isomorphism and embedding questions are answered by
explicit search: canonical forms via color refinement plus
individualization, embeddings via backtracking with degree and label
pruning.  Graphs are immutable once constructed; equality and hashing
are by canonical form, i.e. up to isomorphism.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from math import factorial
from typing import Dict, Iterator, Optional, Tuple

# Above this many candidate orderings the canonical search individualizes
# one node of the first ambiguous cell instead of brute-forcing.
_BRUTE_ORDERINGS = 5040


class Graph:
    """A finite directed multigraph with node and edge labels.

    nodes: id -> label.  edges: id -> (src, tgt, label).  Ids are opaque
    strings, unique per graph; two graphs are equal when isomorphic.
    """

    __slots__ = ("nodes", "edges", "_key", "_hash")

    def __init__(self, nodes: Dict[str, str], edges: Dict[str, Tuple[str, str, str]]):
        for eid, (src, tgt, _lab) in edges.items():
            if src not in nodes or tgt not in nodes:
                raise ValueError("edge %r references a missing node" % eid)
        self.nodes = dict(nodes)
        self.edges = dict(edges)
        self._key = None
        self._hash = None

    # -- basic views ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, node_id: str) -> int:
        return sum(1 for (s, t, _l) in self.edges.values() if s == node_id or t == node_id)

    def edge_multiset(self) -> Counter:
        """Multiplicities of (src, tgt, label) triples."""
        return Counter((s, t, l) for (s, t, l) in self.edges.values())

    # -- identity up to isomorphism -------------------------------------

    def key(self):
        if self._key is None:
            self._key = _canonical_key(self)
        return self._key

    def __eq__(self, other):
        return isinstance(other, Graph) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        ns = ",".join("%s:%s" % (i, l) for i, l in sorted(self.nodes.items()))
        es = ",".join("%s>%s:%s" % (s, t, l) for (s, t, l) in sorted(self.edges.values()))
        return "Graph(%s | %s)" % (ns, es)

    def canonical(self) -> "Graph":
        """An isomorphic copy with ids n0..nk / e0.. in canonical order."""
        _n, _m, labels, triples = self.key()
        nodes = {"n%d" % i: lab for i, lab in enumerate(labels)}
        edges = {
            "e%d" % j: ("n%d" % s, "n%d" % t, lab)
            for j, (s, t, lab) in enumerate(triples)
        }
        return Graph(nodes, edges)

    def relabeled(self, prefix: str) -> "Graph":
        """Copy with every id prefixed, for disjoint unions."""
        nodes = {prefix + i: l for i, l in self.nodes.items()}
        edges = {
            prefix + e: (prefix + s, prefix + t, l)
            for e, (s, t, l) in self.edges.items()
        }
        return Graph(nodes, edges)


EMPTY_GRAPH = Graph({}, {})


def graph_of(node_labels, edge_triples) -> Graph:
    """Convenience constructor: nodes from an id->label mapping, edges
    from (src, tgt, label) triples with generated edge ids."""
    edges = {"e%d" % i: t for i, t in enumerate(edge_triples)}
    return Graph(dict(node_labels), edges)


def single_node(label: str) -> Graph:
    return Graph({"n0": label}, {})


def disjoint_union(a: Graph, b: Graph) -> Graph:
    ar, br = a.relabeled("a:"), b.relabeled("b:")
    nodes = dict(ar.nodes)
    nodes.update(br.nodes)
    edges = dict(ar.edges)
    edges.update(br.edges)
    return Graph(nodes, edges)


def add_node(g: Graph, node_id: str, label: str) -> Graph:
    if node_id in g.nodes:
        raise ValueError("node id %r already present" % node_id)
    nodes = dict(g.nodes)
    nodes[node_id] = label
    return Graph(nodes, g.edges)


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------


def _refine(g: Graph, colors: Dict[str, int]) -> Dict[str, int]:
    """Iterated neighborhood color refinement (1-WL with edge labels)."""
    n = len(g.nodes)
    while True:
        sigs = {}
        for v in g.nodes:
            out_sig = sorted(
                (l, colors[t]) for (s, t, l) in g.edges.values() if s == v
            )
            in_sig = sorted(
                (l, colors[s]) for (s, t, l) in g.edges.values() if t == v
            )
            sigs[v] = (colors[v], tuple(out_sig), tuple(in_sig))
        ranking = {sig: i for i, sig in enumerate(sorted(set(sigs.values())))}
        new = {v: ranking[sigs[v]] for v in g.nodes}
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new
        if len(set(colors.values())) == n:
            return colors


def _initial_colors(g: Graph) -> Dict[str, int]:
    outd = Counter(s for (s, _t, _l) in g.edges.values())
    ind = Counter(t for (_s, t, _l) in g.edges.values())
    raw = {v: (lab, outd[v], ind[v]) for v, lab in g.nodes.items()}
    ranking = {sig: i for i, sig in enumerate(sorted(set(raw.values())))}
    return {v: ranking[raw[v]] for v in g.nodes}


def _encode(g: Graph, ordering) -> tuple:
    idx = {v: i for i, v in enumerate(ordering)}
    labels = tuple(g.nodes[v] for v in ordering)
    triples = tuple(sorted((idx[s], idx[t], l) for (s, t, l) in g.edges.values()))
    return (labels, triples)


def _cells(g: Graph, colors: Dict[str, int]):
    groups = defaultdict(list)
    for v, c in colors.items():
        groups[c].append(v)
    return [sorted(groups[c]) for c in sorted(groups)]


def _min_encoding(g: Graph, colors: Dict[str, int]) -> tuple:
    cells = _cells(g, colors)
    cost = 1
    for cell in cells:
        cost *= factorial(len(cell))
        if cost > _BRUTE_ORDERINGS:
            break
    if cost <= _BRUTE_ORDERINGS:
        best = None
        for parts in itertools.product(*(itertools.permutations(c) for c in cells)):
            ordering = [v for part in parts for v in part]
            enc = _encode(g, ordering)
            if best is None or enc < best:
                best = enc
        return best
    # Individualize one node of the first ambiguous cell and recurse;
    # the minimum over all choices is an isomorphism invariant.
    target = next(c for c in cells if len(c) > 1)
    fresh = max(colors.values()) + 1
    best = None
    for v in target:
        branched = dict(colors)
        branched[v] = fresh
        enc = _min_encoding(g, _refine(g, branched))
        if best is None or enc < best:
            best = enc
    return best


def _canonical_key(g: Graph) -> tuple:
    if not g.nodes:
        return (0, 0, (), ())
    colors = _refine(g, _initial_colors(g))
    labels, triples = _min_encoding(g, colors)
    return (len(g.nodes), len(g.edges), labels, triples)


# ---------------------------------------------------------------------------
# embeddings (total injective label-preserving morphisms)
# ---------------------------------------------------------------------------


class _Adj:
    """Precomputed adjacency with multiplicities for the matcher."""

    __slots__ = ("between", "outdeg", "indeg", "neigh")

    def __init__(self, g: Graph):
        self.between = Counter()
        self.outdeg = Counter()
        self.indeg = Counter()
        self.neigh = defaultdict(set)
        for (s, t, l) in g.edges.values():
            self.between[(s, t, l)] += 1
            self.outdeg[s] += 1
            self.indeg[t] += 1
            self.neigh[s].add(t)
            self.neigh[t].add(s)


def _pattern_order(p: Graph, adj: _Adj):
    """Node order for backtracking: stay connected, rare labels first."""
    label_freq = Counter(p.nodes.values())
    remaining = set(p.nodes)
    order = []
    while remaining:
        connected = [v for v in remaining if any(u in adj.neigh[v] for u in order)]
        pool = connected or sorted(remaining)
        pick = min(
            pool,
            key=lambda v: (label_freq[p.nodes[v]], -(adj.outdeg[v] + adj.indeg[v]), v),
        )
        order.append(pick)
        remaining.discard(pick)
    return order


def embeddings(pattern: Graph, host: Graph, nodes_only: bool = False) -> Iterator[dict]:
    """All total injective label-preserving morphisms pattern -> host.

    Yields {"nodes": vmap, "edges": emap} dicts.  With nodes_only=True
    only node maps are yielded (edge capacity is still verified, so a
    full morphism exists for every yielded node map).
    """
    if len(pattern.nodes) > len(host.nodes) or pattern.n_edges > host.n_edges:
        return
    padj, hadj = _Adj(pattern), _Adj(host)
    order = _pattern_order(pattern, padj)
    hosts_by_label = defaultdict(list)
    for v, lab in sorted(host.nodes.items()):
        hosts_by_label[lab].append(v)

    vmap: Dict[str, str] = {}
    used = set()

    def capacity_ok(pv, hv):
        if padj.outdeg[pv] > hadj.outdeg[hv] or padj.indeg[pv] > hadj.indeg[hv]:
            return False
        for pu in vmap:
            hu = vmap[pu]
            for (a, b) in ((pv, pu), (pu, pv)):
                ha, hb = (hv, hu) if a == pv else (hu, hv)
                for (s, t, l), cnt in padj.between.items():
                    if (s, t) == (a, b) and cnt > hadj.between[(ha, hb, l)]:
                        return False
        return True

    def assign(i):
        if i == len(order):
            if nodes_only:
                yield {"nodes": dict(vmap), "edges": None}
            else:
                yield from _edge_assignments(pattern, host, dict(vmap))
            return
        pv = order[i]
        for hv in hosts_by_label[pattern.nodes[pv]]:
            if hv in used or not capacity_ok(pv, hv):
                continue
            vmap[pv] = hv
            used.add(hv)
            yield from assign(i + 1)
            del vmap[pv]
            used.discard(hv)

    yield from assign(0)


def _edge_assignments(pattern: Graph, host: Graph, vmap: dict) -> Iterator[dict]:
    pgroups = defaultdict(list)
    for eid, (s, t, l) in sorted(pattern.edges.items()):
        pgroups[(vmap[s], vmap[t], l)].append(eid)
    hgroups = defaultdict(list)
    for eid, (s, t, l) in sorted(host.edges.items()):
        hgroups[(s, t, l)].append(eid)
    keys = sorted(pgroups)
    pools = []
    for k in keys:
        need = pgroups[k]
        have = hgroups.get(k, [])
        if len(have) < len(need):
            return
        pools.append([dict(zip(need, perm)) for perm in itertools.permutations(have, len(need))])
    for combo in itertools.product(*pools):
        emap: Dict[str, str] = {}
        for part in combo:
            emap.update(part)
        yield {"nodes": dict(vmap), "edges": emap}


def exists_embedding(pattern: Graph, host: Graph) -> bool:
    return next(embeddings(pattern, host, nodes_only=True), None) is not None


def count_embeddings(pattern: Graph, host: Graph) -> int:
    return sum(1 for _ in embeddings(pattern, host))


# ---------------------------------------------------------------------------
# paths and normalization
# ---------------------------------------------------------------------------


def longest_path(g: Graph) -> int:
    """Length (edge count) of a longest simple undirected path."""
    best = 0
    incident = defaultdict(list)
    for (s, t, _l) in g.edges.values():
        incident[s].append(t)
        incident[t].append(s)

    def walk(v, seen, length):
        nonlocal best
        if length > best:
            best = length
        for w in incident[v]:
            if w not in seen:
                seen.add(w)
                walk(w, seen, length + 1)
                seen.discard(w)

    for v in g.nodes:
        walk(v, {v}, 0)
    return best


def path_length_within(g: Graph, bound: int) -> bool:
    """True iff every simple undirected path has at most `bound` edges."""
    incident = defaultdict(set)
    for (s, t, _l) in g.edges.values():
        incident[s].add(t)
        incident[t].add(s)

    def walk(v, seen, length):
        if length > bound:
            return False
        for w in incident[v]:
            if w not in seen:
                seen.add(w)
                if not walk(w, seen, length + 1):
                    return False
                seen.discard(w)
        return True

    return all(walk(v, {v}, 0) for v in g.nodes)


def quotient_isolated(g: Graph, labels) -> Graph:
    """Drop isolated nodes whose label is in `labels` (a normalization
    applied before canonicalization when the model asks for it)."""
    if not labels:
        return g
    touched = set()
    for (s, t, _l) in g.edges.values():
        touched.add(s)
        touched.add(t)
    keep = {
        v: lab
        for v, lab in g.nodes.items()
        if v in touched or lab not in labels
    }
    if len(keep) == len(g.nodes):
        return g
    return Graph(keep, g.edges)


# ---------------------------------------------------------------------------
# graph classes (the state sets of graph transition systems)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphClass:
    """Membership test for the state set of a graph backend.

    max_path bounds the longest simple undirected path.  node_count maps
    a label to an inclusive (min, max) range (None = unbounded side).
    control_labels / marker_labels, when nonempty, require exactly one
    node carrying some label from the set.  quotient_labels are the
    labels whose isolated nodes are erased by normalization.
    """

    max_path: Optional[int] = None
    node_count: Tuple[Tuple[str, Tuple[Optional[int], Optional[int]]], ...] = ()
    control_labels: frozenset = frozenset()
    marker_labels: frozenset = frozenset()
    quotient_labels: frozenset = frozenset()

    def normalize(self, g: Graph) -> Graph:
        return quotient_isolated(g, self.quotient_labels).canonical()

    def contains(self, g: Graph) -> bool:
        if self.max_path is not None and not path_length_within(g, self.max_path):
            return False
        counts = Counter(g.nodes.values())
        for lab, (lo, hi) in self.node_count:
            if lo is not None and counts[lab] < lo:
                return False
            if hi is not None and counts[lab] > hi:
                return False
        for required in (self.control_labels, self.marker_labels):
            if required and sum(counts[l] for l in required) != 1:
                return False
        return True

    def control_of(self, g: Graph) -> Optional[str]:
        for lab in g.nodes.values():
            if lab in self.control_labels:
                return lab
        return None

    def marker_of(self, g: Graph) -> Optional[str]:
        for lab in g.nodes.values():
            if lab in self.marker_labels:
                return lab
        return None
