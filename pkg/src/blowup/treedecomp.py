"""Tree-decompositions, torsos and an exact small-instance treewidth oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, GraphError, RootedTree, induced_subgraph, normalize_edge


class TreewidthLimitError(ValueError):
    pass


@dataclass
class ValidationReport:
    """Outcome of a structural check: valid iff no violations were recorded."""

    violations: list[tuple[str, object]] = field(default_factory=list)
    width: int | None = None
    adhesion: int | None = None

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, rule: str, witness) -> None:
        self.violations.append((rule, witness))

    def __bool__(self) -> bool:
        return self.valid


class TreeDecomposition:
    """Rooted tree of bags over host-graph vertices.

    Node ids of the decomposition tree are independent of host vertex ids.
    """

    __slots__ = ("tree", "bags")

    def __init__(self, tree: RootedTree, bags: dict[int, frozenset[int]]) -> None:
        if set(bags) != set(tree.parent):
            raise GraphError("bags must be indexed exactly by the tree nodes")
        self.tree = tree
        self.bags = {x: frozenset(b) for x, b in bags.items()}

    @property
    def nodes(self) -> list[int]:
        return self.tree.nodes

    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def adhesion(self) -> int:
        best = 0
        for x, p in self.tree.parent.items():
            if p is not None:
                best = max(best, len(self.bags[x] & self.bags[p]))
        return best

    def restrict(self, keep) -> "TreeDecomposition":
        """Same tree, bags intersected with `keep` (decomposition of the
        induced subgraph)."""
        keep = frozenset(keep)
        return TreeDecomposition(self.tree, {x: b & keep for x, b in self.bags.items()})


def validate_tree_decomposition(g: Graph, td: TreeDecomposition) -> ValidationReport:
    """Check edge coverage and connected traces; measures width and adhesion."""
    report = ValidationReport()
    for x, bag in td.bags.items():
        for v in bag:
            if not (0 <= v < g.n):
                report.add("bag-vertex-range", (x, v))
    for u, v in g.edges:
        if not any(u in bag and v in bag for bag in td.bags.values()):
            report.add("edge-uncovered", (u, v))
    nodes_of: dict[int, list[int]] = {}
    for x, bag in td.bags.items():
        for v in bag:
            nodes_of.setdefault(v, []).append(x)
    for v in range(g.n):
        xs = nodes_of.get(v)
        if not xs:
            report.add("vertex-missing", v)
            continue
        member = set(xs)
        seen = {xs[0]}
        stack = [xs[0]]
        while stack:
            x = stack.pop()
            p = td.tree.parent[x]
            for y in list(td.tree.children[x]) + ([p] if p is not None else []):
                if y in member and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != member:
            report.add("trace-disconnected", v)
    report.width = td.width()
    report.adhesion = td.adhesion()
    return report


def torso(g: Graph, td: TreeDecomposition, x: int) -> Graph:
    """G[B_x] plus clique edges on each adhesion B_x ∩ B_y, on G's id space."""
    if x not in td.bags:
        raise GraphError(f"{x} is not a decomposition node")
    report = validate_tree_decomposition(g, td)
    if not report.valid:
        raise GraphError(f"invalid tree-decomposition: {report.violations[:3]}")
    bag = td.bags[x]
    edges = {e for e in g.edges if e[0] in bag and e[1] in bag}
    p = td.tree.parent[x]
    neigh = list(td.tree.children[x]) + ([p] if p is not None else [])
    for y in neigh:
        shared = sorted(bag & td.bags[y])
        for i, u in enumerate(shared):
            for v in shared[i + 1:]:
                edges.add(normalize_edge(u, v))
    return Graph(g.n, edges)


def torso_local(g: Graph, td: TreeDecomposition, x: int) -> tuple[Graph, list[int]]:
    """Torso of bag x on dense local ids; returns (graph, order) with
    order[local] = host vertex, ascending."""
    t = torso(g, td, x)
    return induced_subgraph(t, td.bags[x])


def child_adhesion_cliques(td: TreeDecomposition, x: int) -> list[frozenset[int]]:
    """Maximal candidate child-adhesion sets B_x ∩ B_y, one per child y."""
    if x not in td.bags:
        raise GraphError(f"{x} is not a decomposition node")
    return [td.bags[x] & td.bags[y] for y in td.tree.children[x]]


def _components_masks(g: Graph) -> list[int]:
    masks = []
    seen = 0
    for s in range(g.n):
        if seen >> s & 1:
            continue
        comp = 1 << s
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.neighbors(v):
                if not comp >> w & 1:
                    comp |= 1 << w
                    stack.append(w)
        seen |= comp
        masks.append(comp)
    return masks


def _tw_component(nbr: list[int], verts: list[int]) -> tuple[int, list[int]]:
    """Exact treewidth of one component via the elimination-order subset DP.

    `nbr[v]` is the neighbourhood bitmask. Returns (width, elimination order).
    f(S) = min over v in S of max(f(S \\ v), q(S \\ v, v)) where q counts the
    vertices outside S ∪ {v} reachable from v through S ∪ {v}.
    """
    full = 0
    for v in verts:
        full |= 1 << v

    def q(s: int, v: int) -> int:
        region = 1 << v
        reach = nbr[v]
        grow = reach & s & ~region
        while grow:
            region |= grow
            new = 0
            g = grow
            while g:
                low = g & -g
                new |= nbr[low.bit_length() - 1]
                g ^= low
            reach |= new
            grow = reach & s & ~region
        boundary = reach & ~s & ~(1 << v)
        return bin(boundary).count("1")

    subs = []
    s = full
    while True:
        subs.append(s)
        if s == 0:
            break
        s = (s - 1) & full
    subs.sort(key=lambda m: bin(m).count("1"))
    f: dict[int, int] = {0: -1}
    choice: dict[int, int] = {}
    for s in subs[1:]:
        best, bestv = None, None
        for v in verts:
            bit = 1 << v
            if not s & bit:
                continue
            prev = s & ~bit
            cost = max(f[prev], q(prev, v))
            if best is None or cost < best:
                best, bestv = cost, v
        f[s] = best
        choice[s] = bestv
    elim = []
    s = full
    while s:
        v = choice[s]
        elim.append(v)
        s &= ~(1 << v)
    elim.reverse()
    return f[full], elim


def exact_treewidth_order(g: Graph, limit: int = 15) -> tuple[int, list[int]]:
    """Exact treewidth with a witness elimination order (small graphs only)."""
    if g.n > limit:
        raise TreewidthLimitError(
            f"graph has {g.n} vertices, oracle limit is {limit}")
    if g.n == 0:
        return -1, []
    nbr = [0] * g.n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    best = 0
    order: list[int] = []
    for mask in _components_masks(g):
        verts = [v for v in range(g.n) if mask >> v & 1]
        if len(verts) == 1:
            order.extend(verts)
            continue
        w, elim = _tw_component(nbr, verts)
        best = max(best, w)
        order.extend(elim)
    return best, order


def exact_treewidth(g: Graph, limit: int = 15) -> int:
    return exact_treewidth_order(g, limit)[0]


def elimination_width(g: Graph, order: list[int]) -> int:
    """Width induced by an elimination order (independent of the DP)."""
    if sorted(order) != list(range(g.n)):
        raise GraphError("order must enumerate every vertex exactly once")
    adj = {v: set(g.neighbors(v)) for v in range(g.n)}
    width = 0
    for v in order:
        nb = adj[v]
        width = max(width, len(nb))
        for u in nb:
            adj[u].discard(v)
            adj[u].update(nb - {u})
        del adj[v]
    return width


def check_blowup_tw_bound(h: Graph, m: int, limit: int = 15) -> bool:
    """tw(H ⊠ K_m) <= (tw(H)+1)m - 1, verified with the exact oracle.

    Always true for a correct implementation; False signals a bug.
    """
    from .graph import complete_blowup

    product = complete_blowup(h, m)
    if product.n > limit:
        raise TreewidthLimitError(
            f"blowup has {product.n} vertices, oracle limit is {limit}")
    return exact_treewidth(product, limit) <= (exact_treewidth(h, limit) + 1) * m - 1
