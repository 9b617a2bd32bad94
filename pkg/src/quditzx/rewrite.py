"""Verified rewrite rules on diagrams.

Every rule is scalar exact: applying it multiplies the diagram scalar by
the precise factor that keeps the matrix semantics unchanged, not merely
proportional. soundness_report() is the machine check, comparing the
matrix before and after on randomized instantiations.

Public rules:

* S_fuse        merge two adjacent same-color spiders, adding phases.
* D_identity    drop a phaseless degree-2 spider with one leg each way.
* B_copy        push a classical point through a phaseless opposite-color
                spider, one copy per remaining leg.
* B_bialgebra   collapse a complete 2x2 bipartite square of phaseless
                degree-3 spiders to a merge-split pair.
* K2_commute    commute a classical permutation gate through an
                opposite-color spider, transforming its phases.
* F1_color      strip Fourier boxes from every leg of a spider, flipping
                its color.
* F2_cancel     cancel an adjacent F / Fdag pair.

One auxiliary step, loop_remove, erases a spider self-loop (factor one
for either color); simplify() uses it to keep fused diagrams tidy.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import time
from dataclasses import dataclass, field

from . import diagram as dg
from .phases import (PhaseVector, Turn, cyclic_value, cyclic_vector,
                     phase_add, phase_invert, phase_neg_transform)

RULES = ("S_fuse", "D_identity", "B_copy", "B_bialgebra", "K2_commute",
         "F1_color", "F2_cancel")
AUX_RULES = ("loop_remove",)
ALL_RULES = RULES + AUX_RULES


class RuleMatchError(ValueError):
    """The given site does not match the rule's pattern."""


def _require(cond: bool, msg: str):
    if not cond:
        raise RuleMatchError(msg)


def _is_spider(d: dg.Diagram, v: int) -> bool:
    return v in d and d.node(v).kind in dg.SPIDER_KINDS


def _opposite(color: str) -> str:
    return dg.X if color == dg.Z else dg.Z


def _self_loops(d: dg.Diagram, v: int) -> list:
    return [i for i, (s, t) in enumerate(d.edges) if s == v and t == v]


def _legs(d: dg.Diagram, v: int) -> list:
    """(edge_index, sign) with +1 for output legs, -1 for inputs."""
    legs = []
    for i, (s, t) in enumerate(d.edges):
        if s == v:
            legs.append((i, 1))
        if t == v:
            legs.append((i, -1))
    return legs


# ---------------------------------------------------------------------------
# Matchers. Each returns a list of JSON-able site dicts in a canonical
# order; _check_* re-verifies a single site before application.

def _match_s_fuse(d: dg.Diagram) -> list:
    sites = set()
    for s, t in d.edges:
        if s == t:
            continue
        if not (_is_spider(d, s) and _is_spider(d, t)):
            continue
        if d.node(s).kind != d.node(t).kind:
            continue
        sites.add((min(s, t), max(s, t)))
    return [{"keep": a, "absorb": b, "color": d.node(a).kind}
            for a, b in sorted(sites)]


def _check_s_fuse(d, site):
    a, b = site["keep"], site["absorb"]
    _require(_is_spider(d, a) and _is_spider(d, b), "both nodes must be spiders")
    _require(a != b, "cannot fuse a spider with itself")
    _require(d.node(a).kind == d.node(b).kind, "colors differ")
    conn = [i for i, (s, t) in enumerate(d.edges)
            if {s, t} == {a, b}]
    _require(bool(conn), "spiders are not adjacent")
    return a, b, conn


def _apply_s_fuse(b_, d, site):
    a, absorbed, conn = _check_s_fuse(d, site)
    na, nb = d.node(a), d.node(absorbed)
    b_.nodes[a] = dg.Node(na.kind, phase=phase_add(na.phase, nb.phase))
    new_edges = []
    consumed = False
    for i, (s, t) in enumerate(d.edges):
        if i in conn:
            if not consumed:
                consumed = True
                continue
            new_edges.append((a, a))
            continue
        s2 = a if s == absorbed else s
        t2 = a if t == absorbed else t
        new_edges.append((s2, t2))
    b_.edges = new_edges
    b_.remove_node(absorbed)
    return [absorbed], []


def _match_d_identity(d: dg.Diagram) -> list:
    sites = []
    for v in sorted(d.nodes):
        if not _is_spider(d, v):
            continue
        if not d.node(v).phase.is_zero:
            continue
        ins, outs = d.in_edges(v), d.out_edges(v)
        if len(ins) == 1 and len(outs) == 1 and ins[0] != outs[0]:
            sites.append({"node": v})
    return sites


def _check_d_identity(d, site):
    v = site["node"]
    _require(_is_spider(d, v), "node must be a spider")
    _require(d.node(v).phase.is_zero, "phase must be zero")
    ins, outs = d.in_edges(v), d.out_edges(v)
    _require(len(ins) == 1 and len(outs) == 1 and ins[0] != outs[0],
             "need exactly one edge in and one out")
    return v, ins[0], outs[0]


def _apply_d_identity(b_, d, site):
    v, e_in, e_out = _check_d_identity(d, site)
    u = d.edges[e_in][0]
    w = d.edges[e_out][1]
    b_.remove_edges([e_in, e_out])
    b_.add_edge(u, w)
    b_.remove_node(v)
    return [v], []


def _match_loop_remove(d: dg.Diagram) -> list:
    sites = []
    for v in sorted(d.nodes):
        if not _is_spider(d, v):
            continue
        loops = _self_loops(d, v)
        if loops:
            sites.append({"node": v, "edge": loops[0]})
    return sites


def _check_loop_remove(d, site):
    v, e = site["node"], site["edge"]
    _require(_is_spider(d, v), "node must be a spider")
    _require(0 <= e < len(d.edges) and d.edges[e] == (v, v),
             "edge must be a self-loop on the node")
    return v, e


def _apply_loop_remove(b_, d, site):
    _v, e = _check_loop_remove(d, site)
    b_.remove_edges([e])
    return [], []


def _match_f2_cancel(d: dg.Diagram) -> list:
    sites = set()
    for s, t in d.edges:
        if s == t or s not in d or t not in d:
            continue
        ks, kt = d.node(s).kind, d.node(t).kind
        if {ks, kt} == {dg.F, dg.FDAG}:
            sites.add((min(s, t), max(s, t)))
    return [{"boxes": [a, b]} for a, b in sorted(sites)]


def _check_f2_cancel(d, site):
    a, b = site["boxes"]
    _require(a in d and b in d and a != b, "boxes must be two distinct nodes")
    _require({d.node(a).kind, d.node(b).kind} == {dg.F, dg.FDAG},
             "need one F and one Fdag")
    conn = [i for i, (s, t) in enumerate(d.edges) if {s, t} == {a, b}]
    _require(len(conn) in (1, 2), "boxes must be adjacent")
    return a, b, conn


def _apply_f2_cancel(b_, d, site):
    a, b, conn = _check_f2_cancel(d, site)
    if len(conn) == 2:
        # A closed F/Fdag cycle traces to the scalar D.
        b_.remove_edges(conn)
        b_.remove_node(a)
        b_.remove_node(b)
        b_.scalar *= d.dimension
        return [a, b], []
    mid = conn[0]
    first, second = d.edges[mid]
    e_in = next(i for i in d.in_edges(first) if i != mid)
    e_out = next(i for i in d.out_edges(second) if i != mid)
    u = d.edges[e_in][0]
    w = d.edges[e_out][1]
    b_.remove_edges([e_in, mid, e_out])
    b_.add_edge(u, w)
    b_.remove_node(a)
    b_.remove_node(b)
    return [a, b], []


def _f1_wanted_box(color: str, sign: int) -> str:
    if color == dg.Z:
        return dg.F if sign == 1 else dg.FDAG
    return dg.FDAG if sign == 1 else dg.F


def _match_f1_color(d: dg.Diagram) -> list:
    sites = []
    for v in sorted(d.nodes):
        if not _is_spider(d, v):
            continue
        color = d.node(v).kind
        ok = True
        for e, sign in _legs(d, v):
            s, t = d.edges[e]
            other = t if sign == 1 else s
            if other == v or other not in d:
                ok = False
                break
            if d.node(other).kind != _f1_wanted_box(color, sign):
                ok = False
                break
            # The box's far edge must leave the spider alone.
            far = [i for i in d.incident(other) if i != e]
            if len(far) != 1:
                ok = False
                break
            fs, ft = d.edges[far[0]]
            if v in (fs, ft):
                ok = False
                break
        if ok:
            sites.append({"spider": v})
    return sites


def _check_f1_color(d, site):
    v = site["spider"]
    _require(_is_spider(d, v), "node must be a spider")
    color = d.node(v).kind
    plan = []
    for e, sign in _legs(d, v):
        s, t = d.edges[e]
        other = t if sign == 1 else s
        _require(other != v and other in d, "self-loops cannot carry boxes")
        _require(d.node(other).kind == _f1_wanted_box(color, sign),
                 f"leg {e} needs a {_f1_wanted_box(color, sign)} box")
        far = [i for i in d.incident(other) if i != e]
        _require(len(far) == 1, "box must have exactly one far edge")
        fs, ft = d.edges[far[0]]
        _require(v not in (fs, ft), "box wraps back onto the spider")
        plan.append((e, sign, other, far[0]))
    return v, color, plan


def _apply_f1_color(b_, d, site):
    v, color, plan = _check_f1_color(d, site)
    n = d.node(v)
    b_.nodes[v] = dg.Node(_opposite(color), phase=n.phase)
    doomed = []
    bridges = []
    for e, sign, box, far in plan:
        doomed += [e, far]
        fs, ft = d.edges[far]
        if sign == 1:
            bridges.append((v, ft))
        else:
            bridges.append((fs, v))
        b_.remove_node(box)
    b_.remove_edges(doomed)
    for s, t in bridges:
        b_.add_edge(s, t)
    return [box for _, _, box, _ in plan], []


def _match_b_copy(d: dg.Diagram) -> list:
    sites = []
    for e, (s, v) in enumerate(d.edges):
        if s == v or not (_is_spider(d, s) and _is_spider(d, v)):
            continue
        if d.degree(s) != 1:
            continue
        if d.node(s).kind == d.node(v).kind:
            continue
        if cyclic_value(d.node(s).phase) is None:
            continue
        if not d.node(v).phase.is_zero:
            continue
        if _self_loops(d, v):
            continue
        sites.append({"state": s, "spider": v, "edge": e})
    sites.sort(key=lambda x: (x["state"], x["spider"], x["edge"]))
    return sites


def _check_b_copy(d, site):
    s, v, e = site["state"], site["spider"], site["edge"]
    _require(_is_spider(d, s) and _is_spider(d, v), "need two spiders")
    _require(0 <= e < len(d.edges) and d.edges[e] == (s, v),
             "edge must run from the state into the spider")
    _require(d.degree(s) == 1, "state must have exactly one leg")
    _require(d.node(s).kind != d.node(v).kind, "colors must differ")
    _require(cyclic_value(d.node(s).phase) is not None,
             "state is not a classical point")
    _require(d.node(v).phase.is_zero, "spider must be phaseless")
    _require(not _self_loops(d, v), "spider must have no self-loops")
    return s, v, e


def _apply_b_copy(b_, d, site):
    s, v, e = _check_b_copy(d, site)
    state_color = d.node(s).kind
    ket_phase = d.node(s).phase
    bra_phase = phase_invert(ket_phase)
    other = [(i, sign) for i, sign in _legs(d, v) if i != e]
    doomed = [e] + [i for i, _ in other]
    plans = []
    for i, sign in other:
        es, et = d.edges[i]
        plans.append((sign, es if sign == -1 else et))
    b_.remove_edges(doomed)
    b_.remove_node(s)
    b_.remove_node(v)
    added = []
    for sign, w in plans:
        if sign == 1:
            c = b_.add_spider(state_color, ket_phase)
            b_.add_edge(c, w)
        else:
            c = b_.add_spider(state_color, bra_phase)
            b_.add_edge(w, c)
        added.append(c)
    r = len(plans)
    b_.scalar *= d.dimension ** (0.5 * (1 - r))
    return [s, v], added


def _match_k2_commute(d: dg.Diagram) -> list:
    sites = []
    for g in sorted(d.nodes):
        if not _is_spider(d, g):
            continue
        k = cyclic_value(d.node(g).phase)
        if k is None or k == 0:
            continue
        ins, outs = d.in_edges(g), d.out_edges(g)
        if len(ins) != 1 or len(outs) != 1 or ins[0] == outs[0]:
            continue
        for e in (ins[0], outs[0]):
            s, t = d.edges[e]
            v = t if s == g else s
            if v == g or not _is_spider(d, v):
                continue
            if d.node(v).kind == d.node(g).kind:
                continue
            far = outs[0] if e == ins[0] else ins[0]
            fs, ft = d.edges[far]
            if v in (fs, ft):
                continue
            if _self_loops(d, v):
                continue
            sites.append({"gate": g, "spider": v, "edge": e})
    sites.sort(key=lambda x: (x["gate"], x["spider"], x["edge"]))
    return sites


def _check_k2_commute(d, site):
    g, v, e = site["gate"], site["spider"], site["edge"]
    _require(_is_spider(d, g) and _is_spider(d, v), "need two spiders")
    k = cyclic_value(d.node(g).phase)
    _require(k is not None and k != 0, "gate is not a nontrivial classical gate")
    ins, outs = d.in_edges(g), d.out_edges(g)
    _require(len(ins) == 1 and len(outs) == 1 and ins[0] != outs[0],
             "gate must have one leg each way")
    _require(e in (ins[0], outs[0]), "edge does not touch the gate")
    s, t = d.edges[e]
    _require(v in (s, t) and g in (s, t) and v != g, "edge must join gate and spider")
    _require(d.node(v).kind != d.node(g).kind, "colors must differ")
    far = outs[0] if e == ins[0] else ins[0]
    fs, ft = d.edges[far]
    _require(v not in (fs, ft), "gate is doubly attached to the spider")
    _require(not _self_loops(d, v), "spider must have no self-loops")
    return g, v, e, far, k


def _apply_k2_commute(b_, d, site):
    g, v, e, far, k = _check_k2_commute(d, site)
    dim = d.dimension
    nv = d.node(v)
    src, _dst = d.edges[e]
    sign0 = 1 if src == v else -1  # +1: gate sits on an output leg of v.

    if nv.kind == dg.Z:
        kappa = k if sign0 == 1 else (dim - k) % dim
    else:
        kappa = k if sign0 == -1 else (dim - k) % dim

    b_.nodes[v] = dg.Node(nv.kind, phase=phase_neg_transform(nv.phase, kappa))
    b_.scalar *= complex(math.cos(nv.phase.alpha(kappa).radians),
                         math.sin(nv.phase.alpha(kappa).radians))

    gate_color = d.node(g).kind
    other = [(i, sign) for i, sign in _legs(d, v) if i != e]
    doomed = [e, far] + [i for i, _ in other]
    fs, ft = d.edges[far]
    w = ft if sign0 == 1 else fs
    plans = []
    for i, sign in other:
        es, et = d.edges[i]
        plans.append((sign, es if sign == -1 else et,
                      (dim - k) % dim if sign == sign0 else k))
    b_.remove_edges(doomed)
    b_.remove_node(g)
    if sign0 == 1:
        b_.add_edge(v, w)
    else:
        b_.add_edge(w, v)
    added = []
    for sign, far_node, param in plans:
        c = b_.add_spider(gate_color, cyclic_vector(dim, param))
        if sign == 1:
            b_.add_edge(v, c)
            b_.add_edge(c, far_node)
        else:
            b_.add_edge(far_node, c)
            b_.add_edge(c, v)
        added.append(c)
    return [g], added


def _match_b_bialgebra(d: dg.Diagram) -> list:
    def eligible(v):
        return (_is_spider(d, v) and d.node(v).phase.is_zero
                and d.degree(v) == 3 and not _self_loops(d, v))

    sites = []
    spiders = [v for v in sorted(d.nodes) if eligible(v)]
    for ai, a in enumerate(spiders):
        for b in spiders[ai + 1:]:
            if d.node(a).kind != d.node(b).kind:
                continue
            # Candidate far side: common targets of edges out of a and b.
            qs = sorted({t for s, t in d.edges if s == a}
                        & {t for s, t in d.edges if s == b})
            for qi, q1 in enumerate(qs):
                for q2 in qs[qi + 1:]:
                    site = {"first": [a, b], "second": [q1, q2],
                            "color": d.node(a).kind}
                    try:
                        _check_b_bialgebra(d, site)
                    except RuleMatchError:
                        continue
                    sites.append(site)
    return sites


def _check_b_bialgebra(d, site):
    p1, p2 = site["first"]
    q1, q2 = site["second"]
    quad = [p1, p2, q1, q2]
    _require(len(set(quad)) == 4, "square needs four distinct spiders")
    for v in quad:
        _require(_is_spider(d, v), f"node {v} must be a spider")
        _require(d.node(v).phase.is_zero, f"spider {v} must be phaseless")
        _require(d.degree(v) == 3, f"spider {v} must have degree 3")
        _require(not _self_loops(d, v), f"spider {v} must have no self-loops")
    pc = d.node(p1).kind
    _require(d.node(p2).kind == pc, "first pair colors differ")
    qc = d.node(q1).kind
    _require(qc == _opposite(pc) and d.node(q2).kind == qc,
             "second pair must have the opposite color")

    square = {}
    for p in (p1, p2):
        for q in (q1, q2):
            found = [i for i, (s, t) in enumerate(d.edges) if s == p and t == q]
            _require(len(found) == 1,
                     f"need exactly one edge {p}->{q}, found {len(found)}")
            _require(not any((s, t) == (q, p) for s, t in d.edges),
                     "square edges must all point the same way")
            square[(p, q)] = found[0]

    square_set = set(square.values())
    ext = {}
    for v in quad:
        rest = [(i, sign) for i, sign in _legs(d, v) if i not in square_set]
        _require(len(rest) == 1, f"spider {v} needs exactly one external leg")
        ext[v] = rest[0]
    _require(ext[p1][1] == ext[p2][1], "first-pair external legs disagree")
    _require(ext[q1][1] == ext[q2][1], "second-pair external legs disagree")
    _require(ext[p1][1] == -ext[q1][1],
             "external legs must flow through the square")
    return (p1, p2, q1, q2, pc, qc, square, ext)


def _apply_b_bialgebra(b_, d, site):
    p1, p2, q1, q2, pc, qc, square, ext = _check_b_bialgebra(d, site)
    doomed = list(square.values()) + [ext[v][0] for v in (p1, p2, q1, q2)]
    plans = []
    for v in (p1, p2, q1, q2):
        e, sign = ext[v]
        es, et = d.edges[e]
        plans.append((v, sign, es if sign == -1 else et))
    b_.remove_edges(doomed)
    for v in (p1, p2, q1, q2):
        b_.remove_node(v)
    merge = b_.add_spider(qc)
    split = b_.add_spider(pc)
    b_.add_edge(merge, split)
    for v, sign, w in plans:
        target = merge if v in (p1, p2) else split
        if sign == 1:
            b_.add_edge(target, w)
        else:
            b_.add_edge(w, target)
    b_.scalar *= d.dimension ** -0.5
    return [p1, p2, q1, q2], [merge, split]


_MATCHERS = {
    "S_fuse": _match_s_fuse,
    "D_identity": _match_d_identity,
    "B_copy": _match_b_copy,
    "B_bialgebra": _match_b_bialgebra,
    "K2_commute": _match_k2_commute,
    "F1_color": _match_f1_color,
    "F2_cancel": _match_f2_cancel,
    "loop_remove": _match_loop_remove,
}

_APPLIERS = {
    "S_fuse": _apply_s_fuse,
    "D_identity": _apply_d_identity,
    "B_copy": _apply_b_copy,
    "B_bialgebra": _apply_b_bialgebra,
    "K2_commute": _apply_k2_commute,
    "F1_color": _apply_f1_color,
    "F2_cancel": _apply_f2_cancel,
    "loop_remove": _apply_loop_remove,
}


def find_matches(d: dg.Diagram, rule: str) -> list:
    if rule not in _MATCHERS:
        raise ValueError(f"unknown rule {rule!r}; choose from {ALL_RULES}")
    return _MATCHERS[rule](d)


def apply_rule(d: dg.Diagram, rule: str, site: dict) -> dg.Diagram:
    if rule not in _APPLIERS:
        raise ValueError(f"unknown rule {rule!r}; choose from {ALL_RULES}")
    b_ = dg.DiagramBuilder.from_diagram(d)
    _APPLIERS[rule](b_, d, site)
    return b_.finish()


# ---------------------------------------------------------------------------
# Traces and simplification

def diagram_hash(d: dg.Diagram) -> str:
    return hashlib.sha256(dg.to_json(d).encode()).hexdigest()


@dataclass
class TraceStep:
    rule: str
    site: dict
    removed: list
    added: list

    def to_json_dict(self) -> dict:
        return {"rule": self.rule, "site": self.site,
                "removed": self.removed, "added": self.added}


@dataclass
class RewriteTrace:
    initial_hash: str
    final_hash: str
    steps: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "initialHash": self.initial_hash,
            "finalHash": self.final_hash,
            "steps": [s.to_json_dict() for s in self.steps],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "RewriteTrace":
        steps = [TraceStep(s["rule"], s["site"], s.get("removed", []),
                           s.get("added", []))
                 for s in obj["steps"]]
        return cls(obj["initialHash"], obj["finalHash"], steps)


# simplify applies only steps that strictly reduce the edge count, which
# is the termination measure.
_SIMPLIFY_ORDER = ("loop_remove", "F2_cancel", "S_fuse", "D_identity",
                   "B_copy")


def simplify(d: dg.Diagram) -> tuple:
    """Fixpoint of the shrinking rules; returns (diagram, trace).

    Deterministic: at each step the first rule in the fixed order with a
    match fires at its first site.
    """
    trace = RewriteTrace(diagram_hash(d), "")
    current = d
    while True:
        fired = False
        for rule in _SIMPLIFY_ORDER:
            sites = find_matches(current, rule)
            if not sites:
                continue
            site = sites[0]
            before = len(current.edges)
            b_ = dg.DiagramBuilder.from_diagram(current)
            removed, added = _APPLIERS[rule](b_, current, site)
            nxt = b_.finish()
            if len(nxt.edges) >= before:
                raise AssertionError(
                    f"{rule} did not shrink the diagram; simplify would loop")
            trace.steps.append(TraceStep(rule, site, removed, added))
            current = nxt
            fired = True
            break
        if not fired:
            break
    trace.final_hash = diagram_hash(current)
    return current, trace


def replay(d: dg.Diagram, trace: RewriteTrace) -> dg.Diagram:
    """Re-run a trace, verifying both endpoint hashes."""
    if diagram_hash(d) != trace.initial_hash:
        raise ValueError("trace does not start at this diagram")
    current = d
    for step in trace.steps:
        current = apply_rule(current, step.rule, step.site)
    if diagram_hash(current) != trace.final_hash:
        raise ValueError("replay diverged from the recorded final hash")
    return current


# ---------------------------------------------------------------------------
# Randomized soundness checking

def _random_phase(dim: int, rng: random.Random,
                  exact_only: bool = False) -> PhaseVector:
    if exact_only or rng.random() < 0.7:
        return PhaseVector(
            dim, [Turn.exact(rng.randrange(dim), dim) for _ in range(dim - 1)])
    return PhaseVector.from_radians(
        dim, [rng.uniform(0.0, 2.0 * math.pi) for _ in range(dim - 1)])


class _Ctx:
    """Tracks boundary positions while building a random instance."""

    def __init__(self, b_: dg.DiagramBuilder):
        self.b = b_
        self.n_in = 0
        self.n_out = 0

    def attach(self, v: int, sign: int):
        """Give v one external leg: sign +1 adds an output beyond v."""
        if sign == 1:
            o = self.b.add_output(self.n_out)
            self.n_out += 1
            self.b.add_edge(v, o)
        else:
            i = self.b.add_input(self.n_in)
            self.n_in += 1
            self.b.add_edge(i, v)

    def attach_random(self, v: int, count: int, rng: random.Random):
        for _ in range(count):
            self.attach(v, rng.choice((1, -1)))


def random_rule_instance(rule: str, dim: int, rng: random.Random) -> tuple:
    """A small random diagram containing one match of the rule, plus the
    site. Arities stay at most 4; phases mix exact multiples of 1/D with
    occasional irrational angles where the rule allows them."""
    b_ = dg.DiagramBuilder(dim)
    ctx = _Ctx(b_)

    if rule == "S_fuse":
        color = rng.choice((dg.Z, dg.X))
        a = b_.add_spider(color, _random_phase(dim, rng))
        c = b_.add_spider(color, _random_phase(dim, rng))
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.5:
                b_.add_edge(a, c)
            else:
                b_.add_edge(c, a)
        ctx.attach_random(a, rng.randint(0, 3), rng)
        ctx.attach_random(c, rng.randint(0, 3), rng)
        site = {"keep": min(a, c), "absorb": max(a, c), "color": color}
        return b_.finish(), site

    if rule == "D_identity":
        color = rng.choice((dg.Z, dg.X))
        v = b_.add_spider(color, PhaseVector.zero(dim))
        ctx.attach(v, -1)
        ctx.attach(v, 1)
        return b_.finish(), {"node": v}

    if rule == "loop_remove":
        color = rng.choice((dg.Z, dg.X))
        v = b_.add_spider(color, _random_phase(dim, rng))
        e = b_.add_edge(v, v)
        ctx.attach_random(v, rng.randint(0, 3), rng)
        return b_.finish(), {"node": v, "edge": e}

    if rule == "F2_cancel":
        kinds = rng.choice(((dg.F, dg.FDAG), (dg.FDAG, dg.F)))
        b1 = b_.add_box(kinds[0])
        b2 = b_.add_box(kinds[1])
        if rng.random() < 0.25:
            b_.add_edge(b1, b2)
            b_.add_edge(b2, b1)
        else:
            b_.add_edge(b1, b2)
            ctx.attach(b1, -1)
            ctx.attach(b2, 1)
        return b_.finish(), {"boxes": sorted((b1, b2))}

    if rule == "F1_color":
        color = rng.choice((dg.Z, dg.X))
        v = b_.add_spider(color, _random_phase(dim, rng))
        for _ in range(rng.randint(0, 4)):
            sign = rng.choice((1, -1))
            box = b_.add_box(_f1_wanted_box(color, sign))
            if sign == 1:
                b_.add_edge(v, box)
                ctx.attach(box, 1)
            else:
                b_.add_edge(box, v)
                ctx.attach(box, -1)
        return b_.finish(), {"spider": v}

    if rule == "B_copy":
        color = rng.choice((dg.Z, dg.X))
        s = b_.add_spider(color, cyclic_vector(dim, rng.randrange(dim)))
        v = b_.add_spider(_opposite(color), PhaseVector.zero(dim))
        e = b_.add_edge(s, v)
        ctx.attach_random(v, rng.randint(0, 3), rng)
        return b_.finish(), {"state": s, "spider": v, "edge": e}

    if rule == "K2_commute":
        gate_color = rng.choice((dg.Z, dg.X))
        k = rng.randrange(1, dim)
        g = b_.add_spider(gate_color, cyclic_vector(dim, k))
        v = b_.add_spider(_opposite(gate_color), _random_phase(dim, rng))
        if rng.random() < 0.5:
            e = b_.add_edge(v, g)
            ctx.attach(g, 1)
        else:
            e = b_.add_edge(g, v)
            ctx.attach(g, -1)
        ctx.attach_random(v, rng.randint(0, 3), rng)
        return b_.finish(), {"gate": g, "spider": v, "edge": e}

    if rule == "B_bialgebra":
        pc = rng.choice((dg.Z, dg.X))
        qc = _opposite(pc)
        p1 = b_.add_spider(pc)
        p2 = b_.add_spider(pc)
        q1 = b_.add_spider(qc)
        q2 = b_.add_spider(qc)
        for p in (p1, p2):
            for q in (q1, q2):
                b_.add_edge(p, q)
        sigma = rng.choice((1, -1))
        for p in (p1, p2):
            ctx.attach(p, sigma)
        for q in (q1, q2):
            ctx.attach(q, -sigma)
        return b_.finish(), {"first": [p1, p2], "second": [q1, q2],
                             "color": pc}

    raise ValueError(f"unknown rule {rule!r}")


def soundness_report(rule: str, dim: int, trials: int = 50,
                     seed: int = 0, tol: float = 1e-9) -> dict:
    """Random instantiations of one rule: evaluate before and after and
    compare entrywise after scalar normalization."""
    from .semantics import equal_up_to_scalar, evaluate
    import numpy as np

    rng = random.Random(f"{rule}:{dim}:{seed}")
    t0 = time.perf_counter()
    failures = []
    worst = 0.0
    worst_drift = 0.0
    for trial in range(trials):
        d, site = random_rule_instance(rule, dim, rng)
        before = evaluate(d, "fast").matrix
        d2 = apply_rule(d, rule, site)
        after = evaluate(d2, "fast").matrix
        s = equal_up_to_scalar(before, after, tol)
        if s is None:
            failures.append({"trial": trial, "site": site,
                             "reason": "matrices not proportional"})
            continue
        dev = float(np.max(np.abs(before - s * after)))
        worst = max(worst, dev)
        worst_drift = max(worst_drift, abs(s - 1.0))
        if dev > tol:
            failures.append({"trial": trial, "site": site, "deviation": dev})
    return {
        "rule": rule,
        "dim": dim,
        "trials": trials,
        "seed": seed,
        "tol": tol,
        "failures": failures,
        "maxDeviation": worst,
        "maxScalarDrift": worst_drift,
        "passed": not failures,
        "elapsed": time.perf_counter() - t0,
    }
