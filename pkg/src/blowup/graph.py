"""Simple undirected graphs, BFS machinery and strong products.

Vertex ids are dense integers 0..n-1.  All tie-breaking (BFS parent choice,
iteration order) prefers the lowest id so that every construction downstream
is reproducible byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass


class GraphError(ValueError):
    pass


def normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph on vertices 0..n-1."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges) -> None:
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        adj: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            e = normalize_edge(u, v)
            if e in seen:
                continue
            seen.add(e)
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self.edges = frozenset(seen)
        self._adj = tuple(tuple(sorted(a)) for a in adj)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return normalize_edge(u, v) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted vertex lists, ordered by smallest member."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in g.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def induced_subgraph(g: Graph, vertices) -> tuple[Graph, list[int]]:
    """Induced subgraph on `vertices` with dense local ids.

    Returns (subgraph, order) where order[local] = global id, sorted
    ascending.
    """
    order = sorted(set(vertices))
    index = {v: i for i, v in enumerate(order)}
    edges = []
    for v in order:
        for w in g.neighbors(v):
            if v < w and w in index:
                edges.append((index[v], index[w]))
    return Graph(len(order), edges), order


@dataclass(frozen=True)
class Layering:
    """Distance layers V_0, V_1, ... of a connected graph."""

    layer_of: tuple[int, ...]
    layers: tuple[tuple[int, ...], ...]

    def layer(self, v: int) -> int:
        return self.layer_of[v]

    @property
    def depth(self) -> int:
        return len(self.layers)


class RootedTree:
    """Rooted tree given by a parent map; node ids are arbitrary ints."""

    __slots__ = ("root", "parent", "children", "depth_of")

    def __init__(self, root: int, parent: dict[int, int | None]) -> None:
        if parent.get(root, "missing") is not None:
            raise GraphError("root must have parent None")
        roots = [v for v, p in parent.items() if p is None]
        if roots != [root] and set(roots) != {root}:
            raise GraphError(f"expected exactly one root, found {sorted(roots)}")
        children: dict[int, list[int]] = {v: [] for v in parent}
        for v, p in parent.items():
            if p is None:
                continue
            if p not in parent:
                raise GraphError(f"parent {p} of {v} is not a tree node")
            children[p].append(v)
        depth: dict[int, int] = {root: 0}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in sorted(children[v]):
                depth[w] = depth[v] + 1
                stack.append(w)
        if len(depth) != len(parent):
            missing = sorted(set(parent) - set(depth))
            raise GraphError(f"nodes unreachable from root: {missing[:5]}")
        self.root = root
        self.parent = dict(parent)
        self.children = {v: tuple(sorted(c)) for v, c in children.items()}
        self.depth_of = depth

    @property
    def nodes(self) -> list[int]:
        return sorted(self.parent)

    def depth(self, v: int) -> int:
        return self.depth_of[v]

    def __contains__(self, v: int) -> bool:
        return v in self.parent


def bfs_layering(g: Graph, r: int) -> Layering:
    """BFS distance layering from r; errors on a disconnected graph."""
    if not (0 <= r < g.n):
        raise GraphError(f"root {r} not a vertex")
    dist = [-1] * g.n
    dist[r] = 0
    frontier = [r]
    layers = [tuple([r])]
    while frontier:
        nxt = []
        for v in frontier:
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        if nxt:
            nxt.sort()
            layers.append(tuple(nxt))
        frontier = nxt
    for v in range(g.n):
        if dist[v] < 0:
            raise GraphError(f"graph is disconnected: vertex {v} unreachable from {r}")
    return Layering(tuple(dist), tuple(layers))


def bfs_spanning_tree(g: Graph, r: int) -> RootedTree:
    """BFS spanning tree rooted at r; each vertex takes its lowest-id
    neighbour in the previous layer as parent."""
    lay = bfs_layering(g, r)
    parent: dict[int, int | None] = {r: None}
    for v in range(g.n):
        if v == r:
            continue
        lv = lay.layer_of[v]
        parent[v] = min(w for w in g.neighbors(v) if lay.layer_of[w] == lv - 1)
    return RootedTree(r, parent)


def is_bfs_spanning_tree(g: Graph, t: RootedTree) -> bool:
    """True iff t spans g and every non-root parent sits one BFS layer up."""
    if set(t.parent) != set(range(g.n)):
        return False
    try:
        lay = bfs_layering(g, t.root)
    except GraphError:
        return False
    for v, p in t.parent.items():
        if p is None:
            continue
        if not g.has_edge(v, p):
            return False
        if lay.layer_of[p] != lay.layer_of[v] - 1:
            return False
    return True


def is_vertical_path(t: RootedTree, path) -> bool:
    """True iff `path` is a path in t whose shallowest vertex is an endpoint.

    Malformed sequences (unknown vertices, repeats, non-edges) give False.
    """
    seq = list(path)
    if not seq:
        return False
    if any(v not in t for v in seq):
        return False
    if len(set(seq)) != len(seq):
        return False
    for u, v in zip(seq, seq[1:]):
        if t.parent[u] != v and t.parent[v] != u:
            return False
    top = min(range(len(seq)), key=lambda i: t.depth_of[seq[i]])
    return top == 0 or top == len(seq) - 1


def strong_product(a: Graph, b: Graph) -> Graph:
    """Strong product A ⊠ B; vertex (v, x) is encoded as v*|V(B)| + x."""
    nb = b.n
    edges = []
    for v in range(a.n):
        base = v * nb
        for x, y in b.edges:
            edges.append((base + x, base + y))
    for v, w in a.edges:
        for x in range(nb):
            edges.append((v * nb + x, w * nb + x))
        for x, y in b.edges:
            edges.append((v * nb + x, w * nb + y))
            edges.append((v * nb + y, w * nb + x))
    return Graph(a.n * nb, edges)


def complete_blowup(h: Graph, m: int) -> Graph:
    """m-complete-blowup H ⊠ K_m."""
    if m < 1:
        raise GraphError("blowup factor must be >= 1")
    return strong_product(h, complete_graph(m))


def contract_vertex_set(g: Graph, s, new_id: int) -> Graph:
    """Contract the connected set s into a single vertex.

    The result keeps the vertices outside s plus `new_id` (which must be a
    member of s or a fresh id), relabelled densely in ascending order.
    """
    s = set(s)
    if not s:
        raise GraphError("cannot contract an empty set")
    if not s <= set(range(g.n)):
        raise GraphError("contraction set contains unknown vertices")
    sub, _ = induced_subgraph(g, s)
    if not is_connected(sub):
        raise GraphError("contraction set does not induce a connected subgraph")
    kept = sorted(set(range(g.n)) - s)
    if new_id in kept:
        raise GraphError(f"new_id {new_id} collides with a kept vertex")
    order = sorted(kept + [new_id])
    index = {v: i for i, v in enumerate(order)}
    merged = index[new_id]
    edges = set()
    for u, v in g.edges:
        iu = merged if u in s else index[u]
        iv = merged if v in s else index[v]
        if iu != iv:
            edges.add(normalize_edge(iu, iv))
    return Graph(len(order), edges)
