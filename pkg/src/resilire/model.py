"""The model document: a single JSON file describing a backend, an
optional control automaton, the safety and bad conditions, an optional
basis of the reachable states, and resource limits.

Format key: "resilire/1".  Graphs are explicit node/edge lists with
string ids, rule morphisms are explicit id pairs, markings are objects
mapping place names to counts (absent means zero).  Everything is
validated up front; computations never see an inconsistent document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from . import constraints as cns
from . import control as ctl
from .engine import ResilienceInstance
from .errors import ModelError
from .graphs import Graph, GraphClass
from .limits import Limits
from .order import Basis, minimize
from .petri import (ENVIRONMENT, MARKERS, Marking, PetriBackend, PetriNet,
                    START_MARKER, SYSTEM, make_net)
from .rewriting import GraphBackend, Rule

FORMAT = "resilire/1"
OWNERS = (SYSTEM, ENVIRONMENT)


class _Issues:
    def __init__(self):
        self.items: List[Tuple[str, str]] = []

    def add(self, where: str, msg: str):
        self.items.append((where, msg))

    def raise_if_any(self):
        if self.items:
            raise ModelError(self.items)


@dataclass(frozen=True)
class ModelDocument:
    kind: str
    annotate: bool
    net: Optional[PetriNet]
    petri_start: Optional[Dict[str, int]]
    rules: Optional[Tuple[Rule, ...]]
    base_class: Optional[GraphClass]
    gts_start: Optional[Graph]
    automaton: Optional[ctl.ControlAutomaton]
    safety: object
    bad_spec: dict
    b_post: Optional[tuple]
    limits: Limits
    notes: Optional[str] = None
    control_labels: Tuple[str, ...] = ()
    marker_labels: Tuple[str, ...] = ()

    def with_bad(self, bad_spec: dict) -> "ModelDocument":
        return replace(self, bad_spec=dict(bad_spec))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _parse_graph(obj, where: str, issues: _Issues) -> Optional[Graph]:
    if not isinstance(obj, dict):
        issues.add(where, "graph must be an object with nodes/edges")
        return None
    nodes = {}
    for i, n in enumerate(obj.get("nodes", [])):
        nid = n.get("id", "n%d" % i)
        if nid in nodes:
            issues.add("%s/nodes/%d" % (where, i), "duplicate node id %r" % nid)
        if "label" not in n:
            issues.add("%s/nodes/%d" % (where, i), "node needs a label")
            continue
        nodes[nid] = str(n["label"])
    edges = {}
    ok = True
    for i, e in enumerate(obj.get("edges", [])):
        eid = e.get("id", "e%d" % i)
        ewhere = "%s/edges/%d" % (where, i)
        if eid in edges:
            issues.add(ewhere, "duplicate edge id %r" % eid)
        missing = [k for k in ("src", "tgt", "label") if k not in e]
        if missing:
            issues.add(ewhere, "edge needs %s" % ", ".join(missing))
            ok = False
            continue
        if e["src"] not in nodes or e["tgt"] not in nodes:
            issues.add(ewhere, "edge %r references a missing node" % eid)
            ok = False
            continue
        edges[eid] = (e["src"], e["tgt"], str(e["label"]))
    if not ok:
        return None
    return Graph(nodes, edges)


def graph_to_json(g: Graph) -> dict:
    c = g.canonical()
    nodes = sorted(c.nodes.items(), key=lambda kv: int(kv[0][1:]))
    edges = sorted(c.edges.items(), key=lambda kv: int(kv[0][1:]))
    return {
        "nodes": [{"id": i, "label": l} for i, l in nodes],
        "edges": [{"id": i, "src": s, "tgt": t, "label": l}
                  for i, (s, t, l) in edges],
    }


def _parse_class(obj, where: str, issues: _Issues) -> GraphClass:
    obj = obj or {}
    max_path = obj.get("max_path")
    if max_path is not None and (not isinstance(max_path, int) or max_path < 0):
        issues.add(where + "/max_path", "must be a non-negative integer")
        max_path = None
    counts = []
    for lab, rng in sorted((obj.get("node_count") or {}).items()):
        lo, hi = rng.get("min"), rng.get("max")
        counts.append((lab, (lo, hi)))
    return GraphClass(
        max_path=max_path,
        node_count=tuple(counts),
        control_labels=frozenset(obj.get("control_labels", ())),
        marker_labels=frozenset(obj.get("marker_labels", ())),
        quotient_labels=frozenset(obj.get("quotient_isolated", ())),
    )


def _class_to_json(k: GraphClass) -> dict:
    out: dict = {}
    if k.max_path is not None:
        out["max_path"] = k.max_path
    if k.node_count:
        out["node_count"] = {
            lab: {key: val for key, val in (("min", lo), ("max", hi)) if val is not None}
            for lab, (lo, hi) in k.node_count
        }
    if k.control_labels:
        out["control_labels"] = sorted(k.control_labels)
    if k.marker_labels:
        out["marker_labels"] = sorted(k.marker_labels)
    if k.quotient_labels:
        out["quotient_isolated"] = sorted(k.quotient_labels)
    return out


def _parse_rules(objs, where: str, issues: _Issues) -> Tuple[Rule, ...]:
    rules = []
    names = set()
    for i, obj in enumerate(objs):
        rwhere = "%s/%d" % (where, i)
        name = obj.get("name", "rule%d" % i)
        if name in names:
            issues.add(rwhere, "duplicate rule name %r" % name)
        names.add(name)
        owner = obj.get("owner", SYSTEM)
        if owner not in OWNERS:
            issues.add(rwhere + "/owner", "owner must be one of %s" % (OWNERS,))
            owner = SYSTEM
        left = _parse_graph(obj.get("left", {}), rwhere + "/left", issues)
        right = _parse_graph(obj.get("right", {}), rwhere + "/right", issues)
        if left is None or right is None:
            continue
        mp = obj.get("map", {})
        node_map = {a: b for a, b in mp.get("nodes", [])}
        edge_map = {a: b for a, b in mp.get("edges", [])}
        probe = Rule.__new__(Rule)
        probe.name, probe.owner = name, owner
        probe.left, probe.right = left, right
        probe.node_map, probe.edge_map = node_map, edge_map
        problems = probe.check_well_formed()
        if problems:
            for p in problems:
                issues.add(rwhere + "/map", "rule %r: %s" % (name, p))
            continue
        rules.append(Rule(name, owner, left, right, node_map, edge_map))
    return tuple(rules)


def _rule_to_json(r: Rule) -> dict:
    def graph_raw(g: Graph) -> dict:
        return {
            "nodes": [{"id": i, "label": l} for i, l in sorted(g.nodes.items())],
            "edges": [{"id": i, "src": s, "tgt": t, "label": l}
                      for i, (s, t, l) in sorted(g.edges.items())],
        }

    return {
        "name": r.name,
        "owner": r.owner,
        "left": graph_raw(r.left),
        "right": graph_raw(r.right),
        "map": {
            "nodes": [[a, b] for a, b in sorted(r.node_map.items())],
            "edges": [[a, b] for a, b in sorted(r.edge_map.items())],
        },
    }


def _parse_constraint(obj, kind: str, net: Optional[PetriNet],
                      where: str, issues: _Issues):
    if not isinstance(obj, dict) or "op" not in obj:
        issues.add(where, "constraint needs an 'op' key")
        return None
    op = obj["op"]
    if op in ("and", "or"):
        parts = tuple(
            p for p in (
                _parse_constraint(a, kind, net, "%s/args/%d" % (where, i), issues)
                for i, a in enumerate(obj.get("args", ())))
            if p is not None)
        if not parts:
            issues.add(where, "'%s' needs at least one argument" % op)
            return None
        return cns.And(parts) if op == "and" else cns.Or(parts)
    if op in ("exists", "not_exists"):
        if kind == "petri":
            marking = obj.get("marking")
            if marking is None:
                issues.add(where, "a marking pattern needs a 'marking' object")
                return None
            try:
                tokens = net.weights(marking)
            except KeyError as exc:
                issues.add(where + "/marking", str(exc))
                return None
            pattern = cns.VectorPattern(tokens, obj.get("state"), obj.get("marker"))
        else:
            g = _parse_graph(obj.get("graph", {}), where + "/graph", issues)
            if g is None:
                return None
            state = obj.get("state")
            if state is not None:
                g = ctl.with_control(g, state)
            if obj.get("marker") is not None:
                g = ctl.with_marker(g, obj["marker"])
            pattern = g
        return cns.Exists(pattern) if op == "exists" else cns.NotExists(pattern)
    issues.add(where, "unknown constraint op %r" % op)
    return None


def _constraint_to_json(c, kind: str, net: Optional[PetriNet]) -> dict:
    if isinstance(c, (cns.And, cns.Or)):
        op = "and" if isinstance(c, cns.And) else "or"
        return {"op": op,
                "args": [_constraint_to_json(p, kind, net) for p in c.parts]}
    op = "exists" if isinstance(c, cns.Exists) else "not_exists"
    pat = c.pattern
    if kind == "petri":
        out = {"op": op, "marking": {p: n for p, n in zip(net.places, pat.tokens) if n}}
        if pat.state is not None:
            out["state"] = pat.state
        if pat.marker is not None:
            out["marker"] = pat.marker
        return out
    return {"op": op, "graph": graph_to_json(pat)}


def _parse_state(obj, kind: str, doc_bits: dict, where: str, issues: _Issues):
    """Parse a state literal (used by b_post)."""
    net = doc_bits.get("net")
    automaton = doc_bits.get("automaton")
    annotate = doc_bits.get("annotate", False)
    control_labels = doc_bits.get("control_labels") or (
        automaton.states if automaton else ())
    state = obj.get("state")
    marker = obj.get("marker")
    if state is not None and control_labels and state not in control_labels:
        issues.add(where, "unknown automaton state %r" % state)
        return None
    if marker is not None and marker not in MARKERS:
        issues.add(where, "unknown marker %r" % marker)
        return None
    if kind == "petri":
        try:
            tokens = net.weights(obj.get("marking", {}))
        except KeyError as exc:
            issues.add(where + "/marking", str(exc))
            return None
        if automaton is not None and state is None:
            issues.add(where, "state component required with a control automaton")
            return None
        if annotate and marker is None:
            issues.add(where, "marker component required in an annotated model")
            return None
        return Marking(tokens, state, marker)
    g = _parse_graph(obj.get("graph", {}), where + "/graph", issues)
    if g is None:
        return None
    has_control = any(l in control_labels for l in g.nodes.values())
    if control_labels and not has_control:
        if state is None:
            issues.add(where, "state component required with a control automaton")
            return None
        g = ctl.with_control(g, state)
    if annotate and not any(l in MARKERS for l in g.nodes.values()):
        if marker is None:
            issues.add(where, "marker component required in an annotated model")
            return None
        g = ctl.with_marker(g, marker)
    return g


def _parse_limits(obj, where: str, issues: _Issues) -> Limits:
    obj = obj or {}
    kw = {}
    for field in ("max_iters", "overlap_nodes", "overlap_count",
                  "forward_depth_cap", "forward_state_cap"):
        if field in obj:
            v = obj[field]
            if not isinstance(v, int) or v < 1:
                issues.add("%s/%s" % (where, field), "must be a positive integer")
            else:
                kw[field] = v
    return Limits(**kw)


def from_dict(obj: dict) -> ModelDocument:
    issues = _Issues()
    if obj.get("format") != FORMAT:
        issues.add("/format", "expected %r" % FORMAT)
    kind = obj.get("kind")
    if kind not in ("petri", "gts"):
        issues.add("/kind", "kind must be 'petri' or 'gts'")
        issues.raise_if_any()
    annotate = bool(obj.get("annotate", False))
    limits = _parse_limits(obj.get("limits"), "/limits", issues)

    net = petri_start = None
    rules = base_class = gts_start = None
    rule_names = None
    labels_in_use = set()
    if kind == "petri":
        section = obj.get("petri")
        if not isinstance(section, dict):
            issues.add("/petri", "missing petri section")
            issues.raise_if_any()
        try:
            net = make_net(section.get("places", ()), section.get("transitions", ()))
        except (KeyError, ValueError) as exc:
            issues.add("/petri", str(exc))
            issues.raise_if_any()
        petri_start = dict(section.get("start", {}))
        try:
            net.weights(petri_start)
        except KeyError as exc:
            issues.add("/petri/start", str(exc))
        rule_names = {t.name for t in net.transitions}
    else:
        section = obj.get("gts")
        if not isinstance(section, dict):
            issues.add("/gts", "missing gts section")
            issues.raise_if_any()
        base_class = _parse_class(section.get("class"), "/gts/class", issues)
        rules = _parse_rules(section.get("rules", ()), "/gts/rules", issues)
        rule_names = {r.name for r in rules}
        if base_class.quotient_labels:
            # States are normalized by erasing isolated nodes with these
            # labels, so no rule may require one on its left side.
            for i, r in enumerate(rules):
                for nid, lab in r.left.nodes.items():
                    if lab in base_class.quotient_labels and r.left.degree(nid) == 0:
                        issues.add("/gts/rules/%d/left" % i,
                                   "rule %r matches an isolated %r node, which "
                                   "the quotient erases from every state"
                                   % (r.name, lab))
        gts_start = _parse_graph(section.get("start", {"nodes": []}),
                                 "/gts/start", issues)
        for r in rules:
            for g in (r.left, r.right):
                labels_in_use.update(g.nodes.values())
                labels_in_use.update(l for (_s, _t, l) in g.edges.values())
        if gts_start is not None:
            labels_in_use.update(gts_start.nodes.values())

    automaton = None
    if obj.get("automaton") is not None:
        a = obj["automaton"]
        try:
            automaton = ctl.make_automaton(
                a.get("states", ()), a.get("initial"), a.get("edges", ()), rule_names)
        except ModelError as exc:
            issues.items.extend(exc.issues)
        if automaton is not None and labels_in_use & set(automaton.states):
            issues.add("/automaton/states",
                       "automaton states must be disjoint from graph labels: %s"
                       % sorted(labels_in_use & set(automaton.states)))
    if annotate and automaton is None:
        issues.add("/annotate", "annotation needs a control automaton")
    if kind == "gts" and labels_in_use & set(MARKERS) and annotate:
        issues.add("/gts", "marker labels %s are reserved in annotated models"
                   % sorted(labels_in_use & set(MARKERS)))

    control_labels = tuple(obj.get("control_labels", ()))
    marker_labels = tuple(obj.get("marker_labels", ()))

    safety = None
    if "safety" not in obj:
        issues.add("/safety", "missing safety constraint")
    else:
        safety = _parse_constraint(obj["safety"], kind, net, "/safety", issues)
        if safety is not None and cns.polarity(safety) != "positive":
            issues.add("/safety", "safety must be a positive constraint")

    bad_spec = obj.get("bad")
    if not isinstance(bad_spec, dict) or "mode" not in bad_spec:
        issues.add("/bad", "missing bad-set spec with a 'mode'")
        bad_spec = {"mode": "error"}
    else:
        bad_spec = dict(bad_spec)
        if bad_spec["mode"] == "adverse":
            known = set(control_labels) or (set(automaton.states) if automaton else set())
            unknown = set(bad_spec.get("states", ())) - known
            if bad_spec.get("states") and not known:
                issues.add("/bad/states", "no control automaton to observe")
            elif unknown:
                issues.add("/bad/states", "unknown states %s" % sorted(unknown))
            if bad_spec.get("env_marker") and not (annotate or marker_labels):
                issues.add("/bad/env_marker", "needs an annotated model")
        elif bad_spec["mode"] == "custom":
            c = _parse_constraint(bad_spec.get("constraint"), kind, net,
                                  "/bad/constraint", issues)
            if c is not None and cns.polarity(c) != "negative":
                issues.add("/bad/constraint", "must be a negative constraint")
            bad_spec["constraint"] = c
        elif bad_spec["mode"] != "error":
            issues.add("/bad/mode", "unknown mode %r" % bad_spec["mode"])

    b_post = None
    if obj.get("b_post") is not None:
        bits = {"net": net, "automaton": automaton, "annotate": annotate,
                "control_labels": control_labels}
        states = []
        for i, s in enumerate(obj["b_post"]):
            st = _parse_state(s, kind, bits, "/b_post/%d" % i, issues)
            if st is not None:
                states.append(st)
        b_post = tuple(states)

    issues.raise_if_any()
    return ModelDocument(
        kind=kind, annotate=annotate, net=net, petri_start=petri_start,
        rules=rules, base_class=base_class, gts_start=gts_start,
        automaton=automaton, safety=safety, bad_spec=bad_spec, b_post=b_post,
        limits=limits, notes=obj.get("notes"),
        control_labels=control_labels, marker_labels=marker_labels,
    )


def loads(text: str) -> ModelDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError([("/", "not valid JSON: %s" % exc)])
    return from_dict(obj)


def load(path: str) -> ModelDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# ---------------------------------------------------------------------------
# building runnable artifacts
# ---------------------------------------------------------------------------


@dataclass
class BuiltModel:
    doc: ModelDocument
    backend: object
    domain: object
    safe: Basis
    bad: cns.BadSet
    reachable: Optional[Basis]
    start: object

    def instance(self) -> ResilienceInstance:
        if self.reachable is None:
            raise ModelError([
                ("/b_post",
                 "no basis of the reachable states was supplied; `check` needs "
                 "one -- run `resil approx` for bounds that do not")])
        return ResilienceInstance(
            backend=self.backend, reachable=self.reachable, bad=self.bad,
            safe=self.safe, max_iters=self.doc.limits.max_iters)

    def state_to_json(self, state) -> dict:
        return state_to_json(state, self.doc, self.backend)

    def basis_to_json(self, basis: Basis) -> list:
        return [self.state_to_json(s) for s in basis.elements]


def build(doc: ModelDocument) -> BuiltModel:
    issues = _Issues()
    if doc.kind == "petri":
        if doc.automaton is not None:
            backend = ctl.compose_petri_backend(doc.net, doc.automaton, doc.annotate)
        else:
            backend = PetriBackend(doc.net)
        domain = cns.MarkingDomain(
            doc.net, backend.order,
            doc.automaton.states if doc.automaton else None, doc.annotate)
        start = Marking(
            doc.net.weights(doc.petri_start),
            doc.automaton.initial if doc.automaton else None,
            START_MARKER if doc.annotate else None)
    else:
        base = doc.base_class
        if doc.control_labels or doc.marker_labels:
            # A flattened document: control/marker structure is already in
            # the rules, only the class needs the label sets.
            base = GraphClass(
                max_path=base.max_path, node_count=base.node_count,
                control_labels=frozenset(doc.control_labels),
                marker_labels=frozenset(doc.marker_labels),
                quotient_labels=base.quotient_labels)
            backend = GraphBackend(list(doc.rules), base, doc.limits)
        else:
            backend = ctl.compose_graph_backend(
                list(doc.rules), base, doc.automaton, doc.annotate, doc.limits)
        domain = cns.GraphDomain(backend.klass, backend.order, doc.limits)
        start = doc.gts_start
        if doc.automaton is not None:
            start = ctl.with_control(
                start, doc.automaton.initial,
                START_MARKER if doc.annotate else None)
        start = backend.normalize(start)
        if not backend.klass.contains(start):
            issues.add("/gts/start", "start graph lies outside the state class")
    issues.raise_if_any()

    safe = cns.ideal_basis_of(doc.safety, domain)
    bad = cns.anti_ideal_of(doc.bad_spec, domain, safe)
    reachable = None
    if doc.b_post is not None:
        states = list(doc.b_post)
        if doc.kind == "gts":
            states = [backend.normalize(g) for g in states]
            outside = [i for i, g in enumerate(states)
                       if not backend.klass.contains(g)]
            if outside:
                raise ModelError([
                    ("/b_post/%d" % i, "state lies outside the state class")
                    for i in outside])
        reachable = minimize(states, backend.order)
    return BuiltModel(doc, backend, domain, safe, bad, reachable, start)


def state_to_json(state, doc: ModelDocument, backend) -> dict:
    if doc.kind == "petri":
        out = {"marking": {p: n for p, n in zip(doc.net.places, state.tokens) if n}}
        if state.state is not None:
            out["state"] = state.state
        if state.marker is not None:
            out["marker"] = state.marker
        return out
    klass = backend.klass
    out = {"graph": graph_to_json(state)}
    q = klass.control_of(state)
    mk = klass.marker_of(state)
    if q is not None:
        out["state"] = q
    if mk is not None:
        out["marker"] = mk
    return out


# ---------------------------------------------------------------------------
# document serialization and composition
# ---------------------------------------------------------------------------


def to_dict(doc: ModelDocument) -> dict:
    out: dict = {"format": FORMAT, "kind": doc.kind, "annotate": doc.annotate}
    if doc.notes:
        out["notes"] = doc.notes
    if doc.kind == "petri":
        out["petri"] = {
            "places": list(doc.net.places),
            "transitions": [
                {"name": t.name, "owner": t.owner,
                 "pre": {p: w for p, w in zip(doc.net.places, t.pre) if w},
                 "post": {p: w for p, w in zip(doc.net.places, t.post) if w}}
                for t in doc.net.transitions
            ],
            "start": dict(doc.petri_start),
        }
    else:
        out["gts"] = {
            "class": _class_to_json(doc.base_class),
            "rules": [_rule_to_json(r) for r in doc.rules],
            "start": graph_to_json(doc.gts_start),
        }
    if doc.automaton is not None:
        out["automaton"] = {
            "states": list(doc.automaton.states),
            "initial": doc.automaton.initial,
            "edges": [{"from": e.src, "to": e.dst, "select": list(e.select)}
                      for e in doc.automaton.edges],
        }
    if doc.control_labels:
        out["control_labels"] = list(doc.control_labels)
    if doc.marker_labels:
        out["marker_labels"] = list(doc.marker_labels)
    out["safety"] = _constraint_to_json(doc.safety, doc.kind, doc.net)
    bad = dict(doc.bad_spec)
    if bad.get("mode") == "custom":
        bad["constraint"] = _constraint_to_json(bad["constraint"], doc.kind, doc.net)
    out["bad"] = bad
    if doc.b_post is not None:
        if doc.kind == "petri":
            out["b_post"] = [state_to_json(s, doc, None) for s in doc.b_post]
        else:
            out["b_post"] = [{"graph": graph_to_json(g)} for g in doc.b_post]
    out["limits"] = {
        "max_iters": doc.limits.max_iters,
        "overlap_count": doc.limits.overlap_count,
        "forward_depth_cap": doc.limits.forward_depth_cap,
        "forward_state_cap": doc.limits.forward_state_cap,
    }
    if doc.limits.overlap_nodes is not None:
        out["limits"]["overlap_nodes"] = doc.limits.overlap_nodes
    return out


def dumps(doc: ModelDocument) -> str:
    return json.dumps(to_dict(doc), sort_keys=True, indent=1) + "\n"


def compose_document(doc: ModelDocument) -> ModelDocument:
    """Flatten a graph model: compile the automaton (and annotation)
    into the rule set and the class, producing an equivalent document
    with no automaton section."""
    if doc.kind != "gts":
        raise ModelError([
            ("/kind", "only graph models can be flattened; the Petri product "
                      "is built at run time")])
    if doc.automaton is None and not doc.annotate:
        return doc
    rules = list(doc.rules)
    control_labels: Tuple[str, ...] = doc.control_labels
    start = doc.gts_start
    if doc.automaton is not None:
        rules = ctl.enrich_rules(rules, doc.automaton)
        control_labels = tuple(doc.automaton.states)
        start = ctl.with_control(start, doc.automaton.initial,
                                 START_MARKER if doc.annotate else None)
    marker_labels: Tuple[str, ...] = doc.marker_labels
    if doc.annotate:
        rules = ctl.mark_rules(rules)
        marker_labels = MARKERS
    b_post = doc.b_post
    return replace(
        doc, rules=tuple(rules), automaton=None, annotate=False,
        gts_start=start, control_labels=control_labels,
        marker_labels=marker_labels, b_post=b_post)
