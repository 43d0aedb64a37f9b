"""Partitions, quotients, H-partition certificates and the product view."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    Graph,
    GraphError,
    Layering,
    RootedTree,
    bfs_spanning_tree,
    is_vertical_path,
    normalize_edge,
)
from .treedecomp import TreeDecomposition, ValidationReport, validate_tree_decomposition


class Partition:
    """Partition of 0..n-1 into non-empty parts with dense part ids."""

    __slots__ = ("n", "part_of", "parts")

    def __init__(self, n: int, part_of: dict[int, int]) -> None:
        if set(part_of) != set(range(n)):
            missing = sorted(set(range(n)) ^ set(part_of))
            raise GraphError(f"not a partition of 0..{n - 1}: offending {missing[:5]}")
        pids = sorted(set(part_of.values()))
        if pids != list(range(len(pids))):
            raise GraphError(f"part ids must be dense 0..k-1, got {pids[:6]}")
        parts: list[set[int]] = [set() for _ in pids]
        for v, p in part_of.items():
            parts[p].add(v)
        self.n = n
        self.part_of = dict(part_of)
        self.parts = tuple(frozenset(p) for p in parts)

    @classmethod
    def from_parts(cls, n: int, parts) -> "Partition":
        part_of: dict[int, int] = {}
        for i, p in enumerate(parts):
            if not p:
                raise GraphError(f"part {i} is empty")
            for v in p:
                if v in part_of:
                    raise GraphError(f"vertex {v} in two parts")
                part_of[v] = i
        return cls(n, part_of)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, {v: v for v in range(n)})

    @property
    def size(self) -> int:
        return len(self.parts)

    def width(self) -> int:
        return max((len(p) for p in self.parts), default=0)


def quotient(g: Graph, p: Partition) -> Graph:
    """Quotient graph G/P on part ids; parts adjacent iff a cross edge exists."""
    if p.n != g.n:
        raise GraphError(f"partition covers 0..{p.n - 1} but graph has n={g.n}")
    edges = set()
    for u, v in g.edges:
        a, b = p.part_of[u], p.part_of[v]
        if a != b:
            edges.add(normalize_edge(a, b))
    return Graph(p.size, edges)


@dataclass
class HPartitionCertificate:
    """Machine-checkable witness that G has an H-partition of bounded width.

    `vertical_paths` (with `tree_root`) is an optional payload produced by the
    planar construction; generic certificates omit it.
    """

    partition: Partition
    h: Graph
    h_td: TreeDecomposition
    apex_part: int | None
    claimed_width: int
    vertical_paths: dict[int, tuple[tuple[int, ...], ...]] | None = None
    tree_root: int | None = None


def validate_layering(g: Graph, layering: Layering) -> ValidationReport:
    """Edge condition |layer(u) - layer(v)| <= 1."""
    report = ValidationReport()
    if len(layering.layer_of) != g.n:
        report.add("layering-size", len(layering.layer_of))
        return report
    assigned: dict[int, int] = {}
    for i, layer in enumerate(layering.layers):
        for v in layer:
            if v in assigned:
                report.add("vertex-in-two-layers", v)
            assigned[v] = i
    for v in range(g.n):
        if assigned.get(v) != layering.layer_of[v]:
            report.add("layer-index-mismatch", v)
    for u, v in g.edges:
        if abs(layering.layer_of[u] - layering.layer_of[v]) > 1:
            report.add("edge-spans-layers", (u, v))
    return report


def check_vertical_path_cover(t: RootedTree, part, paths, limit: int) -> bool:
    """part ⊆ union of at most `limit` vertical paths of t."""
    paths = [tuple(p) for p in paths]
    if len(paths) > limit:
        return False
    if not all(is_vertical_path(t, p) for p in paths):
        return False
    covered = set()
    for p in paths:
        covered.update(p)
    return set(part) <= covered


def validate_h_partition(
    g: Graph,
    cert: HPartitionCertificate,
    tree: RootedTree | None = None,
    path_limit: int = 3,
) -> ValidationReport:
    """Validate every claim a certificate makes about g.

    Checks: the partition itself, quotient ⊆ H under the identity part-id
    mapping, claimed width, validity and width of H's tree-decomposition, the
    apex-part restriction, and (when present) the vertical-path covers.  When
    `tree` is None and the certificate records a tree root, the deterministic
    BFS tree from that root is used for verticality.
    """
    report = ValidationReport()
    p = cert.partition
    if p.n != g.n:
        report.add("partition-size", p.n)
        return report
    if p.size != cert.h.n:
        report.add("part-count-vs-H", (p.size, cert.h.n))
        return report
    q = quotient(g, p)
    for e in q.edges:
        if e not in cert.h.edges:
            report.add("quotient-edge-missing-in-H", e)
    width = p.width()
    if width > cert.claimed_width:
        widest = max(range(p.size), key=lambda i: len(p.parts[i]))
        report.add("width-exceeds-claim", widest)
    td_report = validate_tree_decomposition(cert.h, cert.h_td)
    if not td_report.valid:
        report.add("h-td-invalid", td_report.violations[:3])
    report.width = width
    if cert.apex_part is not None:
        alpha = cert.apex_part
        if not (0 <= alpha < cert.h.n):
            report.add("apex-part-unknown", alpha)
        else:
            restricted = cert.h_td.restrict(set(range(cert.h.n)) - {alpha})
            h_minus, _ = _delete_vertex(cert.h, alpha)
            sub_report = validate_tree_decomposition(h_minus, restricted)
            if not sub_report.valid:
                report.add("h-minus-alpha-td-invalid", sub_report.violations[:3])
    if cert.vertical_paths is not None:
        if tree is None and cert.tree_root is not None:
            try:
                tree = bfs_spanning_tree(g, cert.tree_root)
            except GraphError as exc:
                report.add("tree-root-unusable", str(exc))
        for pid, paths in cert.vertical_paths.items():
            if not (0 <= pid < p.size):
                report.add("path-cover-unknown-part", pid)
                continue
            if tree is not None:
                if not check_vertical_path_cover(tree, p.parts[pid], paths, path_limit):
                    report.add("path-cover-invalid", pid)
            else:
                covered = set()
                for path in paths:
                    covered.update(path)
                if len(paths) > path_limit or not p.parts[pid] <= covered:
                    report.add("path-cover-invalid", pid)
    return report


def _delete_vertex(g: Graph, v: int) -> tuple[Graph, list[int]]:
    """Remove v, relabelling the rest densely; returns (graph, order)."""
    order = [u for u in range(g.n) if u != v]
    index = {u: i for i, u in enumerate(order)}
    edges = [(index[a], index[b]) for a, b in g.edges if a != v and b != v]
    return Graph(g.n - 1, edges), order


def h_minus_apex(cert: HPartitionCertificate) -> tuple[Graph, TreeDecomposition]:
    """H - α with the restricted decomposition, on dense ids."""
    if cert.apex_part is None:
        return cert.h, cert.h_td
    alpha = cert.apex_part
    h_minus, order = _delete_vertex(cert.h, alpha)
    index = {u: i for i, u in enumerate(order)}
    bags = {
        x: frozenset(index[v] for v in bag if v != alpha)
        for x, bag in cert.h_td.bags.items()
    }
    return h_minus, TreeDecomposition(cert.h_td.tree, bags)


def embed_into_product(g: Graph, cert: HPartitionCertificate) -> dict[int, tuple[int, int]]:
    """Realise G inside H ⊠ K_p: v ↦ (part id, rank of v in its part).

    Intra-part ranks are assigned by ascending vertex id.  Raises on an
    invalid certificate; the image adjacency is verified for every edge.
    """
    report = validate_h_partition(g, cert)
    if not report.valid:
        raise GraphError(f"invalid certificate: {report.violations[:3]}")
    p = cert.partition
    mapping: dict[int, tuple[int, int]] = {}
    for pid, part in enumerate(p.parts):
        for idx, v in enumerate(sorted(part)):
            mapping[v] = (pid, idx)
    for u, v in g.edges:
        (a, i), (b, j) = mapping[u], mapping[v]
        if a == b:
            continue  # K_p clause: same H-vertex, distinct ranks
        if normalize_edge(a, b) not in cert.h.edges:
            raise GraphError(f"edge ({u},{v}) not realised in the product")
    return mapping
