"""Balanced multi-vertex separators of weighted trees.

Removing the returned set Z (|Z| <= q) leaves components of weight at most
total/(q+1).  Weights are exact rationals; no comparison ever goes through
floating point.
"""

from __future__ import annotations

from fractions import Fraction

from .graph import Graph, GraphError, connected_components, is_connected


class WeightedTree:
    """A tree together with a non-negative weight per vertex."""

    __slots__ = ("tree", "weight", "total")

    def __init__(self, tree: Graph, weight: dict[int, Fraction | int]) -> None:
        if tree.n > 0 and tree.edge_count != tree.n - 1:
            raise GraphError("not a tree: wrong edge count")
        if not is_connected(tree):
            raise GraphError("not a tree: disconnected")
        if set(weight) != set(range(tree.n)):
            raise GraphError("weights must cover every vertex")
        w = {v: Fraction(weight[v]) for v in weight}
        if any(x < 0 for x in w.values()):
            raise GraphError("weights must be non-negative")
        self.tree = tree
        self.weight = w
        self.total = sum(w.values(), Fraction(0))

    def subset_weight(self, vertices) -> Fraction:
        return sum((self.weight[v] for v in vertices), Fraction(0))


def _component_weights(wt: WeightedTree, removed: set[int]) -> list[Fraction]:
    keep = [v for v in range(wt.tree.n) if v not in removed]
    seen = set(removed)
    weights = []
    for s in keep:
        if s in seen:
            continue
        stack = [s]
        seen.add(s)
        acc = wt.weight[s]
        while stack:
            v = stack.pop()
            for u in wt.tree.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
                    acc += wt.weight[u]
        weights.append(acc)
    return weights


def validate_separator(wt: WeightedTree, z, q: int) -> bool:
    """|Z| <= q and every component of T - Z weighs at most total/(q+1)."""
    z = set(z)
    if len(z) > q:
        return False
    bound = Fraction(wt.total, q + 1)
    return all(w <= bound for w in _component_weights(wt, z))


def _centroid(wt: WeightedTree, vertices: list[int], total: Fraction) -> int:
    """q = 1 base case: orient each edge toward the heavier side; a vertex of
    outdegree 0 has all hanging components of weight <= total/2.

    Edges unoriented by the weight criterion point to the lower id; among
    outdegree-0 vertices the lowest id wins.
    """
    vset = set(vertices)
    if len(vertices) == 1:
        return vertices[0]
    half = Fraction(total, 2)
    # subtree weights via a DFS order rooted at the smallest vertex
    root = vertices[0]
    parent = {root: None}
    order = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        for u in wt.tree.neighbors(v):
            if u in vset and u not in parent:
                parent[u] = v
                order.append(u)
                stack.append(u)
    down = {v: wt.weight[v] for v in order}
    for v in reversed(order):
        p = parent[v]
        if p is not None:
            down[p] += down[v]
    outdeg = {v: 0 for v in order}
    for v in order:
        p = parent[v]
        if p is None:
            continue
        # component containing v when edge (v, p) is cut weighs down[v]
        toward_child = down[v] > half
        toward_parent = total - down[v] > half
        if toward_child:
            outdeg[p] += 1
        elif toward_parent:
            outdeg[v] += 1
        else:
            outdeg[max(v, p)] += 1  # tie: orient toward the lower id
    return min(v for v in order if outdeg[v] == 0)


def tree_separator(wt: WeightedTree, q: int) -> frozenset[int]:
    """Separator of at most q vertices leaving components of weight at most
    total/(q+1); follows the recursive proof (centroid base case, then peel
    off one heavy subtree per level)."""
    if q < 1:
        raise GraphError("q must be >= 1")
    if wt.tree.n == 0:
        return frozenset()
    live = sorted(range(wt.tree.n))
    result: set[int] = set()
    root = live[0]
    while True:
        vset = set(live)
        total = wt.subset_weight(live)
        if q == 1:
            result.add(_centroid(wt, live, total))
            return frozenset(result)
        bound = Fraction(total, q + 1)
        parent = {root: None}
        order = [root]
        stack = [root]
        while stack:
            v = stack.pop()
            for u in sorted(wt.tree.neighbors(v)):
                if u in vset and u not in parent:
                    parent[u] = v
                    order.append(u)
                    stack.append(u)
        down = {v: wt.weight[v] for v in order}
        for v in reversed(order):
            p = parent[v]
            if p is not None:
                down[p] += down[v]
        depth = {root: 0}
        for v in order[1:]:
            depth[v] = depth[parent[v]] + 1
        children: dict[int, list[int]] = {v: [] for v in order}
        for v in order[1:]:
            children[parent[v]].append(v)
        f = {v: max((down[c] for c in children[v]), default=Fraction(0)) for v in order}
        if f[root] <= bound:
            result.add(root)
            return frozenset(result)
        candidates = [v for v in order if f[v] >= bound]
        best_depth = max(depth[v] for v in candidates)
        v = min(c for c in candidates if depth[c] == best_depth)
        heavy = max(down[c] for c in children[v])
        w = min(c for c in children[v] if down[c] == heavy)
        # remove the subtree rooted at w, keep w in the separator, recurse
        sub = [w]
        stack = [w]
        while stack:
            x = stack.pop()
            for c in children[x]:
                sub.append(c)
                stack.append(c)
        result.add(w)
        removed = set(sub)
        live = [v for v in live if v not in removed]
        q -= 1
        if not live:
            return frozenset(result)
