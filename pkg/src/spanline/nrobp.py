"""Nondeterministic read-once branching programs built from an automaton and a document."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import product

from .autops import VA, InvariantError, trim
from .spancore import DocLike, Marker, text_of

Literal = tuple[str, bool]


@dataclass(frozen=True)
class NROBP:
    """A DAG with literal-labeled edges; each source-sink path whose literals
    hold under an assignment witnesses that assignment."""

    n_nodes: int
    source: int
    sink: int
    edges: tuple[tuple[int, int, Literal | None], ...]
    variables: frozenset[str]

    @property
    def size(self) -> int:
        return self.n_nodes

    def to_dot(self) -> str:
        lines = ["digraph nrobp {", "  rankdir=LR;"]
        lines.append(f'  {self.source} [shape=box, label="s"];')
        lines.append(f'  {self.sink} [shape=box, label="t"];')
        for u, v, lit in self.edges:
            if lit is None:
                lines.append(f"  {u} -> {v};")
            else:
                var, pos = lit
                text = var if pos else "!" + var
                lines.append(f'  {u} -> {v} [label="{text}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def topological_order(n: int, edges: Iterable[tuple[int, int, object]]) -> list[int]:
    indeg = [0] * n
    succ: list[list[int]] = [[] for _ in range(n)]
    for u, v, _ in edges:
        succ[u].append(v)
        indeg[v] += 1
    order = [u for u in range(n) if indeg[u] == 0]
    for u in order:
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                order.append(v)
    if len(order) != n:
        raise InvariantError("branching program has a cycle")
    return order


def _live_nodes(n: int, source: int, sink: int, edges) -> set[int]:
    succ: dict[int, list[int]] = defaultdict(list)
    pred: dict[int, list[int]] = defaultdict(list)
    for u, v, _ in edges:
        succ[u].append(v)
        pred[v].append(u)

    def reach(start: int, adj) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    return reach(source, succ) & reach(sink, pred)


def _contract_epsilon_cycles(A: VA) -> VA:
    """Merge the states of every strongly connected component of epsilon edges."""
    import networkx as nx

    g = nx.DiGraph()
    g.add_nodes_from(range(A.n_states))
    g.add_edges_from((p, q) for p, l, q in A.transitions if l is None)
    comp = {}
    for i, scc in enumerate(nx.strongly_connected_components(g)):
        for q in scc:
            comp[q] = i
    transitions = tuple(
        (comp[p], l, comp[q]) for p, l, q in A.transitions if not (l is None and comp[p] == comp[q])
    )
    finals = frozenset(comp[q] for q in A.finals)
    return VA(A.alphabet, A.variables, len(set(comp.values())), comp[A.initial], finals, transitions)


def to_nrobp(A: VA, d: DocLike) -> NROBP:
    """Branching program whose models are the variable sets assigned by ``A`` on ``d``.

    Each open marker becomes a positive literal on the product of the
    automaton with the document; afterwards every path is completed with
    negative literals for the variables it does not assign.
    """
    text = text_of(d)
    n = len(text)
    variables = frozenset(A.variables)
    B = _contract_epsilon_cycles(A)
    t = B.n_states
    B = VA(
        B.alphabet,
        B.variables,
        t + 1,
        B.initial,
        frozenset([t]),
        B.transitions + tuple((f, None, t) for f in B.finals),
    )
    B = trim(B)
    ids: dict[tuple[int, int], int] = {}
    edges: list[tuple[int, int, Literal | None]] = []

    def node(key: tuple[int, int]) -> int:
        if key not in ids:
            ids[key] = len(ids)
            stack.append(key)
        return ids[key]

    stack: list[tuple[int, int]] = []
    source = node((B.initial, 0))
    while stack:
        q, i = key = stack.pop()
        u = ids[key]
        for l, r in B.out[q]:
            if l is None:
                edges.append((u, node((r, i)), None))
            elif isinstance(l, Marker):
                edges.append((u, node((r, i)), (l.var, True) if l.is_open else None))
            elif i < n and l == text[i]:
                edges.append((u, node((r, i + 1)), None))
    final_key = (next(iter(B.finals)), n) if B.finals else None
    if final_key not in ids:
        return NROBP(2, 0, 1, (), variables)
    sink = ids[final_key]
    live = _live_nodes(len(ids), source, sink, edges)
    renum = {u: k for k, u in enumerate(sorted(live))}
    edges = [(renum[u], renum[v], lit) for u, v, lit in edges if u in live and v in live]
    raw = NROBP(len(renum), renum[source], renum[sink], tuple(dict.fromkeys(edges)), variables)
    return complete(raw)


def seen_variables(p: NROBP) -> list[frozenset[str]]:
    """For each node, the variables labeling some edge on a path from the source to it."""
    order = topological_order(p.n_nodes, p.edges)
    incoming: dict[int, list[tuple[int, Literal | None]]] = defaultdict(list)
    for u, v, lit in p.edges:
        incoming[v].append((u, lit))
    seen: list[frozenset[str]] = [frozenset()] * p.n_nodes
    for v in order:
        acc: set[str] = set()
        for u, lit in incoming[v]:
            acc |= seen[u]
            if lit is not None:
                acc.add(lit[0])
        seen[v] = frozenset(acc)
    return seen


def complete(p: NROBP) -> NROBP:
    """Make every source-sink path mention every variable exactly once.

    An edge ``u -> v`` gets negative literals for the variables seen before
    ``v`` but neither before ``u`` nor on the edge itself; the chains of new
    nodes are shared between edges with the same target and missing set.
    Variables seen on no path at all are negated just before the sink.
    """
    seen = seen_variables(p)
    n = p.n_nodes
    edges: list[tuple[int, int, Literal | None]] = []
    chains: dict[tuple[int, frozenset[str]], int] = {}

    def chain(target: int, missing: frozenset[str]) -> int:
        nonlocal n
        key = (target, missing)
        if key not in chains:
            names = sorted(missing)
            first = n
            n += len(names)
            for k, var in enumerate(names):
                nxt = first + k + 1 if k + 1 < len(names) else target
                edges.append((first + k, nxt, (var, False)))
            chains[key] = first
        return chains[key]

    for u, v, lit in p.edges:
        missing = seen[v] - seen[u] - ({lit[0]} if lit is not None else set())
        if missing:
            edges.append((u, chain(v, frozenset(missing)), lit))
        else:
            edges.append((u, v, lit))
    sink = p.sink
    unseen = frozenset(p.variables - seen[p.sink])
    if unseen and p.edges:
        new_sink = n
        n += 1
        edges.append((sink, chain(new_sink, unseen), None))
        sink = new_sink
    return NROBP(n, p.source, sink, tuple(edges), p.variables)


def project_nrobp(p: NROBP, keep: Iterable[str]) -> NROBP:
    """Existentially drop variables by erasing their literals."""
    keep = frozenset(keep)
    edges = tuple((u, v, lit if lit is None or lit[0] in keep else None) for u, v, lit in p.edges)
    return complete(NROBP(p.n_nodes, p.source, p.sink, edges, p.variables & keep))


def models(p: NROBP) -> set[frozenset[str]]:
    """Assignments (as sets of true variables) admitting a satisfied source-sink path."""
    order = topological_order(p.n_nodes, p.edges)
    succ: dict[int, list[tuple[int, Literal | None]]] = defaultdict(list)
    for u, v, lit in p.edges:
        succ[u].append((v, lit))
    partial: dict[int, set[frozenset[Literal]]] = defaultdict(set)
    partial[p.source].add(frozenset())
    for u in order:
        for v, lit in succ[u]:
            for a in partial[u]:
                if lit is None:
                    partial[v].add(a)
                elif (lit[0], not lit[1]) not in a:
                    partial[v].add(a | {lit})
    result: set[frozenset[str]] = set()
    names = sorted(p.variables)
    for a in partial[p.sink]:
        fixed = dict(a)
        free = [v for v in names if v not in fixed]
        base = {v for v, val in fixed.items() if val}
        for bits in product((False, True), repeat=len(free)):
            result.add(frozenset(base | {v for v, b in zip(free, bits) if b}))
    return result


def count_models(p: NROBP) -> int:
    return len(models(p))


def check_read_once(p: NROBP) -> bool:
    """True iff no source-sink path carries two literals of one variable."""
    live = _live_nodes(p.n_nodes, p.source, p.sink, p.edges) if p.edges else set()
    edges = [(u, v, lit) for u, v, lit in p.edges if u in live and v in live]
    sub = NROBP(p.n_nodes, p.source, p.sink, tuple(edges), p.variables)
    seen = seen_variables(sub)
    return all(lit is None or lit[0] not in seen[u] for u, _, lit in edges)
