"""Partitioning almost-embeddable graphs: vortex splitting, surface
augmentation, BFS slicing and special-vertex expansion.

The algorithmic path covers genus 0 with at most one vortex; for higher
genus or more vortices the augmented surface graph is still constructed (as
an abstract graph) and a certified partition of it must be supplied
externally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactmath import ceil_sqrt, ge_sqrt, le_sqrt, le_sqrt_plus
from .graph import (
    Graph,
    GraphError,
    Layering,
    RootedTree,
    bfs_layering,
    bfs_spanning_tree,
    normalize_edge,
)
from .partition import HPartitionCertificate, Partition, validate_h_partition
from .planar import HalfEdgeEmbedding, PlanarEmbedding, TripodPartitionResult, planar_partition
from .treedecomp import TreeDecomposition


class AlmostEmbeddingError(GraphError):
    pass


class RequiresExternalPartition(AlmostEmbeddingError):
    """Raised when the surface graph leaves the planar toolkit (genus >= 1 or
    two or more vortices); carries the abstract augmented graph so a caller
    can obtain a certified partition for it elsewhere."""

    def __init__(self, message: str, augmented: "AugmentedSurfaceGraph") -> None:
        super().__init__(message)
        self.augmented = augmented


@dataclass(frozen=True)
class Vortex:
    """Graph attached along a disc boundary via a path-decomposition.

    `boundary` lists the disc vertices in order; bag m contains boundary
    vertex m.  Edges and bags use the host graph's vertex ids.
    """

    boundary: tuple[int, ...]
    bags: tuple[frozenset[int], ...]
    edges: frozenset[tuple[int, int]]

    @property
    def vertices(self) -> frozenset[int]:
        out: set[int] = set()
        for b in self.bags:
            out |= b
        return frozenset(out)

    def validate(self, k: int) -> None:
        b = len(self.boundary)
        if b < 1 or len(self.bags) != b:
            raise AlmostEmbeddingError("need one bag per boundary vertex")
        if len(set(self.boundary)) != b:
            raise AlmostEmbeddingError("boundary vertices must be distinct")
        for m, x in enumerate(self.boundary):
            if x not in self.bags[m]:
                raise AlmostEmbeddingError(
                    f"boundary vertex {x} missing from bag {m + 1}")
        for m, bag in enumerate(self.bags):
            if len(bag) > k + 1:
                raise AlmostEmbeddingError(
                    f"bag {m + 1} has {len(bag)} vertices, width exceeds {k}")
        first: dict[int, int] = {}
        last: dict[int, int] = {}
        for m, bag in enumerate(self.bags):
            for v in bag:
                first.setdefault(v, m)
                last[v] = m
        for v in first:
            for m in range(first[v], last[v] + 1):
                if v not in self.bags[m]:
                    raise AlmostEmbeddingError(
                        f"vertex {v} has a disconnected bag interval")
        verts = self.vertices
        for u, v in self.edges:
            if normalize_edge(u, v) != (u, v):
                raise AlmostEmbeddingError("vortex edges must be normalized")
            if u not in verts or v not in verts:
                raise AlmostEmbeddingError(f"edge ({u},{v}) leaves the vortex")
            if not any(u in bag and v in bag for bag in self.bags):
                raise AlmostEmbeddingError(
                    f"edge ({u},{v}) not covered by any bag")


@dataclass(frozen=True)
class AlmostEmbedding:
    """A (g,p,k,a)-almost-embeddable graph with its structure exposed.

    `g0` carries the rotation system of the surface part when g = 0; for
    declared genus >= 1 only the abstract surface graph is kept.
    """

    graph: Graph
    apex: frozenset[int]
    g0: PlanarEmbedding | None
    g0_graph: Graph | None
    g: int
    p: int
    k: int
    a: int
    vortices: tuple[Vortex, ...]

    def surface_graph(self) -> Graph:
        if self.g0 is not None:
            return self.g0.graph
        if self.g0_graph is not None:
            return self.g0_graph
        raise AlmostEmbeddingError("no surface part given")

    def surface_vertices(self) -> frozenset[int]:
        if self.g0 is not None:
            return frozenset(self.g0.rotation)
        g = self.surface_graph()
        present: set[int] = set()
        for u, v in g.edges:
            present.add(u)
            present.add(v)
        # isolated surface vertices are representable only via the rotation
        return frozenset(present)

    def validate(self) -> None:
        if self.k < 1 or min(self.g, self.p, self.a) < 0:
            raise AlmostEmbeddingError("parameters require k >= 1 and g,p,a >= 0")
        if len(self.apex) > self.a:
            raise AlmostEmbeddingError(
                f"{len(self.apex)} apex vertices exceed a={self.a}")
        s = len(self.vortices)
        if s > self.p:
            raise AlmostEmbeddingError(f"{s} vortices exceed p={self.p}")
        if self.g == 0 and self.g0 is None:
            raise AlmostEmbeddingError("genus 0 requires an embedded surface part")
        n = self.graph.n
        surface = self.surface_vertices()
        if any(not 0 <= v < n for v in self.apex | surface):
            raise AlmostEmbeddingError("vertex id out of range")
        vortex_sets = []
        for vx in self.vortices:
            vx.validate(self.k)
            vortex_sets.append(vx.vertices)
        for i in range(len(vortex_sets)):
            for j in range(i + 1, len(vortex_sets)):
                if vortex_sets[i] & vortex_sets[j]:
                    raise AlmostEmbeddingError(f"vortices {i} and {j} share vertices")
        for i, vx in enumerate(self.vortices):
            shared = surface & vortex_sets[i]
            if shared != set(vx.boundary):
                raise AlmostEmbeddingError(
                    f"vortex {i}: surface intersection must equal its boundary")
        covered = set(surface)
        for vs in vortex_sets:
            covered |= vs
        if self.apex & covered:
            raise AlmostEmbeddingError("apex vertices must be disjoint from G - A")
        if covered | self.apex != set(range(n)):
            missing = sorted(set(range(n)) - covered - self.apex)
            raise AlmostEmbeddingError(f"vertices outside the structure: {missing[:5]}")
        allowed = set(self.surface_graph().edges)
        for vx in self.vortices:
            allowed |= set(vx.edges)
        for u, v in self.graph.edges:
            if u in self.apex or v in self.apex:
                continue
            if (u, v) not in allowed:
                raise AlmostEmbeddingError(
                    f"edge ({u},{v}) is in neither the surface part nor a vortex")
        for e in allowed:
            if e not in self.graph.edges:
                raise AlmostEmbeddingError(f"structure edge {e} missing from the graph")


@dataclass(frozen=True)
class VortexSplit:
    """Greedy split of one vortex: selected bag indices a_1..a_q (1-based),
    their union Z, and the blocks Y_1..Y_q between consecutive indices."""

    indices: tuple[int, ...]
    z: frozenset[int]
    blocks: tuple[frozenset[int], ...]

    @property
    def q(self) -> int:
        return len(self.indices)

    def block_of_bag(self, m: int) -> int:
        """1-based block index j with a_j < m < a_{j+1}; 0 when bag m is
        itself selected (then B_m ⊆ Z)."""
        if m in self.indices:
            return 0
        j = 0
        for t, a in enumerate(self.indices, start=1):
            if a < m:
                j = t
        return j

    def validate(self, vortex: Vortex, k: int, n: int) -> None:
        b = len(vortex.boundary)
        kn = k * n
        if not self.indices or self.indices[0] != 1:
            raise AlmostEmbeddingError("a_1 must be 1")
        if list(self.indices) != sorted(set(self.indices)) or self.indices[-1] > b:
            raise AlmostEmbeddingError("indices must be increasing and within range")
        z = frozenset().union(*(vortex.bags[a - 1] for a in self.indices))
        if z != self.z:
            raise AlmostEmbeddingError("Z must be the union of the selected bags")
        if len(self.blocks) != self.q:
            raise AlmostEmbeddingError("need one block per selected index")
        bounds = list(self.indices) + [b + 1]
        for j in range(self.q):
            lo, hi = bounds[j], bounds[j + 1]
            block = frozenset().union(
                frozenset(), *(vortex.bags[m - 1] for m in range(lo + 1, hi))) - z
            if block != self.blocks[j]:
                raise AlmostEmbeddingError(f"block {j + 1} mismatch")
        for j, block in enumerate(self.blocks, start=1):
            if j < self.q and not ge_sqrt(len(block), kn):
                raise AlmostEmbeddingError(
                    f"interior block {j} smaller than sqrt(kn)")
            if not le_sqrt_plus(len(block), kn, k):
                raise AlmostEmbeddingError(f"block {j} larger than sqrt(kn)+k")
        if not le_sqrt_plus(len(self.z), kn, k):
            raise AlmostEmbeddingError("Z larger than sqrt(kn)+k")
        for m in range(1, b + 1):
            j = self.block_of_bag(m)
            target = self.z if j == 0 else self.z | self.blocks[j - 1]
            if not vortex.bags[m - 1] <= target:
                raise AlmostEmbeddingError(f"bag {m} not inside Y_j ∪ Z")


def split_vortex(vortex: Vortex, k: int, n: int) -> VortexSplit:
    """Left-to-right greedy split: close the running block the moment its
    size (excluding Z so far and the closing bag) reaches sqrt(kn).

    The closing bag joins Z, so by the interval property the closed block is
    final.  Interior blocks therefore sit in [sqrt(kn), sqrt(kn)+k] whenever
    bag sizes stay at most k; the trailing block only has the upper bound.
    """
    vortex.validate(k)
    if k < 1 or n < 1:
        raise AlmostEmbeddingError("k and n must be positive")
    kn = k * n
    b = len(vortex.boundary)
    indices = [1]
    z: set[int] = set(vortex.bags[0])
    blocks: list[frozenset[int]] = []
    cur: set[int] = set()
    m = 2
    while m <= b:
        closing = cur - vortex.bags[m - 1]
        if ge_sqrt(len(closing), kn):
            blocks.append(frozenset(closing))
            indices.append(m)
            z |= vortex.bags[m - 1]
            cur = set()
        else:
            cur |= vortex.bags[m - 1] - z
        m += 1
    blocks.append(frozenset(cur - z))
    split = VortexSplit(tuple(indices), frozenset(z), tuple(blocks))
    split.validate(vortex, k, n)
    return split


@dataclass(frozen=True)
class AugmentedSurfaceGraph:
    """The connected surface graph after boundary contraction.

    Vertices are dense 0..n-1; `expansion` maps each special vertex (y or z)
    to the host-graph set it stands for, `to_original` maps every other
    non-root vertex back to its host vertex.
    """

    graph: Graph
    embedding: PlanarEmbedding | None
    root: int
    to_original: dict[int, int]
    expansion: dict[int, frozenset[int]]
    z_vertices: tuple[int, ...]
    y_vertices: tuple[int, ...]


def _abstract_augment(ae: AlmostEmbedding, splits) -> AugmentedSurfaceGraph:
    surface = sorted(ae.surface_vertices())
    edges = {normalize_edge(u, v) for u, v in ae.surface_graph().edges}
    # connect surface components through their lowest-id vertices
    adj: dict[int, list[int]] = {v: [] for v in surface}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen: set[int] = set()
    heads = []
    for v in surface:
        if v in seen:
            continue
        heads.append(v)
        stack = [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    for h in heads[1:]:
        edges.add(normalize_edge(heads[0], h))
    merge: dict[int, tuple] = {}
    y_labels = []
    z_labels = []
    for i, (vx, split) in enumerate(zip(ae.vortices, splits)):
        xs = vx.boundary
        b = len(xs)
        for t in range(b - 1):
            edges.add(normalize_edge(xs[t], xs[t + 1]))
        bounds = list(split.indices) + [b + 1]
        z_label = ("z", i)
        z_labels.append(z_label)
        for a in split.indices:
            merge[xs[a - 1]] = z_label
        for j in range(split.q):
            run = list(range(bounds[j] + 1, bounds[j + 1]))
            if not run:
                continue
            label = ("y", i, j + 1)
            y_labels.append(label)
            for m in run:
                merge[xs[m - 1]] = label
    kept = [v for v in surface if v not in merge]
    order: list = kept + y_labels + z_labels + ["r"]
    index = {lab: i for i, lab in enumerate(order)}

    def image(v):
        return index[merge[v]] if v in merge else index[v]

    out_edges: set[tuple[int, int]] = set()
    for u, v in edges:
        a, c = image(u), image(v)
        if a != c:
            out_edges.add(normalize_edge(a, c))
    for i, (vx, split) in enumerate(zip(ae.vortices, splits)):
        zi = index[("z", i)]
        for x in vx.boundary:
            a = image(x)
            if a != zi:
                out_edges.add(normalize_edge(a, zi))
        out_edges.add(normalize_edge(index["r"], zi))
    if not ae.vortices:
        out_edges.add(normalize_edge(index["r"], index[kept[0]]))
    expansion = {}
    for i, split in enumerate(splits):
        expansion[index[("z", i)]] = split.z
        for j, block in enumerate(split.blocks, start=1):
            if ("y", i, j) in index:
                expansion[index[("y", i, j)]] = block
    return AugmentedSurfaceGraph(
        graph=Graph(len(order), out_edges),
        embedding=None,
        root=index["r"],
        to_original={index[v]: v for v in kept},
        expansion=expansion,
        z_vertices=tuple(index[l] for l in z_labels),
        y_vertices=tuple(index[l] for l in y_labels),
    )


def _match_cyclic_subsequence(walk_vertices: list[int], seq: list[int]):
    """Positions of seq as a cyclic subsequence of walk_vertices, or None."""
    length = len(walk_vertices)
    if len(seq) > length:
        return None
    for start in range(length):
        if walk_vertices[start] != seq[0]:
            continue
        positions = [start]
        idx = 1
        step = 1
        while idx < len(seq) and step < length:
            pos = (start + step) % length
            if walk_vertices[pos] == seq[idx]:
                positions.append(pos)
                idx += 1
            step += 1
        if idx == len(seq):
            return positions
    return None


def augment(ae: AlmostEmbedding, splits) -> AugmentedSurfaceGraph:
    """Build the connected augmented surface graph G0'.

    Genus 0 with at most one vortex is handled with embedding surgery; any
    other shape raises RequiresExternalPartition carrying the abstract G0'.
    """
    s = len(ae.vortices)
    if len(splits) != s:
        raise AlmostEmbeddingError("need one split per vortex")
    if not ae.surface_vertices():
        raise AlmostEmbeddingError("surface part must be non-empty")
    if ae.g > 0 or s >= 2:
        asg = _abstract_augment(ae, splits)
        raise RequiresExternalPartition(
            f"genus {ae.g} with {s} vortices requires an external partition",
            asg)

    m = HalfEdgeEmbedding.from_rotation(ae.g0.rotation)
    comps_seen: set[int] = set()
    heads = []
    for v in sorted(m.rot):
        if v in comps_seen:
            continue
        heads.append(v)
        stack = [v]
        comps_seen.add(v)
        while stack:
            x = stack.pop()
            for e in m.rot[x]:
                y = m.other(e, x)
                if y not in comps_seen:
                    comps_seen.add(y)
                    stack.append(y)
    for h in heads[1:]:
        m.add_bridge(heads[0], h)

    y_reps: list[int] = []
    y_expansion: dict[int, frozenset[int]] = {}
    zid = None
    if s == 1:
        vx, split = ae.vortices[0], splits[0]
        xs = list(vx.boundary)
        b = len(xs)
        chosen = None
        for walk in m.trace():
            wverts = [v for v, _ in walk]
            pos = _match_cyclic_subsequence(wverts, xs)
            if pos is None and b > 2:
                pos = _match_cyclic_subsequence(wverts, [xs[0]] + xs[:0:-1])
                if pos is not None:
                    pos = [pos[0]] + pos[:0:-1]
            if pos is not None:
                chosen = (walk, pos)
                break
        if chosen is None:
            raise AlmostEmbeddingError(
                "vortex boundary does not bound a clean disc of the embedding")
        walk, pos = chosen
        start = pos[0]
        rotated = walk[start:] + walk[:start]
        rel = sorted(((p - start) % len(walk)) for p in pos)
        zid = max(m.rot) + 1
        m.add_star(rotated, rel, zid)
        # boundary path edges x_t x_{t+1}, added where absent
        for t in range(b - 1):
            u, v = xs[t], xs[t + 1]
            if m.has_vertex_edge(u, v):
                continue
            target = None
            for walk2 in m.trace():
                wv = [x for x, _ in walk2]
                if zid in wv and u in wv and v in wv:
                    target = (walk2, wv)
                    break
            if target is None:
                raise AlmostEmbeddingError(
                    f"no face available for boundary edge ({u},{v})")
            walk2, wv = target
            m.add_chord(walk2, wv.index(u), wv.index(v))
        bounds = list(split.indices) + [b + 1]
        for j in range(split.q):
            run = [xs[t - 1] for t in range(bounds[j] + 1, bounds[j + 1])]
            if not run:
                continue
            rep = run[0]
            for nxt in run[1:]:
                m.contract(m.find_edge(rep, nxt), keep=rep)
            y_reps.append(rep)
            y_expansion[rep] = split.blocks[j]
        for a in split.indices:
            m.contract(m.find_edge(zid, xs[a - 1]), keep=zid)
    rid = max(m.rot) + 1
    if s == 1:
        m.add_leaf(zid, rid)
    else:
        m.add_leaf(min(v for v in m.rot), rid)
    m.simplify()
    rotation = m.to_rotation()

    specials = set(y_reps) | ({zid} if zid is not None else set())
    kept = sorted(v for v in rotation if v not in specials and v != rid)
    order = kept + y_reps + ([zid] if zid is not None else []) + [rid]
    index = {v: i for i, v in enumerate(order)}
    new_rotation = {
        index[v]: tuple(index[u] for u in rotation[v]) for v in rotation
    }
    emb = PlanarEmbedding(len(order), new_rotation)
    expansion = {index[rep]: y_expansion[rep] for rep in y_reps}
    if zid is not None:
        expansion[index[zid]] = splits[0].z
    return AugmentedSurfaceGraph(
        graph=emb.graph,
        embedding=emb,
        root=index[rid],
        to_original={index[v]: v for v in kept},
        expansion=expansion,
        z_vertices=tuple([index[zid]] if zid is not None else []),
        y_vertices=tuple(index[r] for r in y_reps),
    )


def choose_slice_offset(layering: Layering, d: int) -> int:
    """Smallest offset ℓ in [3, d-1] minimising |V_ℓ ∪ V_{ℓ+d} ∪ ...|; the
    minimum is at most n/(d-3) by pigeonhole."""
    if d < 4:
        raise AlmostEmbeddingError("d must be at least 4")
    sizes = [len(layer) for layer in layering.layers]
    best = None
    for ell in range(3, d):
        count = sum(sizes[i] for i in range(ell, len(sizes), d))
        if best is None or count < best[0]:
            best = (count, ell)
    return best[1]


@dataclass
class SlicedPartition:
    """Partition of G0' minus the removed layers and the root, with one
    quotient copy per band."""

    part_vertices: list[set[int]]
    part_band: list[int]
    part_origin: list[int]
    h: Graph
    h_td: TreeDecomposition
    removed: frozenset[int]


def slice_and_partition(
    asg: AugmentedSurfaceGraph,
    tripod: TripodPartitionResult,
    layering: Layering,
    ell: int,
    d: int,
) -> SlicedPartition:
    """Split the tripod partition into per-band quotient copies.

    Band 0 holds layers below ℓ, band j >= 1 the layers strictly between
    consecutive removed layers ℓ+(j-1)d and ℓ+jd.
    """
    g = asg.graph
    if tripod.partition.n != g.n:
        raise AlmostEmbeddingError("tripod partition does not match the graph")
    removed: set[int] = {asg.root}
    for i in range(ell, layering.depth, d):
        removed.update(layering.layers[i])

    def band_of(v: int) -> int:
        lv = layering.layer_of[v]
        if lv < ell:
            return 0
        return (lv - ell) // d + 1

    groups: dict[tuple[int, int], set[int]] = {}
    for v in range(g.n):
        if v in removed:
            continue
        key = (band_of(v), tripod.partition.part_of[v])
        groups.setdefault(key, set()).add(v)
    keys = sorted(groups)
    part_vertices = [groups[k] for k in keys]
    part_band = [k[0] for k in keys]
    part_origin = [k[1] for k in keys]
    new_id = {k: i for i, k in enumerate(keys)}
    bands = sorted({k[0] for k in keys})
    h_edges: set[tuple[int, int]] = set()
    for band in bands:
        for u, v in tripod.h.edges:
            a, c = (band, u), (band, v)
            if a in new_id and c in new_id:
                h_edges.add(normalize_edge(new_id[a], new_id[c]))
    h = Graph(len(keys), h_edges)
    # one restricted copy of the tripod decomposition per band, roots chained
    td_parent: dict[int, int | None] = {}
    td_bags: dict[int, frozenset[int]] = {}
    node_id: dict[tuple[int, int], int] = {}
    for band in bands:
        for x in tripod.h_td.nodes:
            node_id[(band, x)] = len(node_id)
    prev_root = None
    for band in bands:
        for x in tripod.h_td.nodes:
            nid = node_id[(band, x)]
            p = tripod.h_td.tree.parent[x]
            if p is not None:
                td_parent[nid] = node_id[(band, p)]
            elif prev_root is None:
                td_parent[nid] = None
                prev_root = nid
            else:
                td_parent[nid] = prev_root
            td_bags[nid] = frozenset(
                new_id[(band, pid)] for pid in tripod.h_td.bags[x]
                if (band, pid) in new_id)
    if not td_bags:
        td_parent[0] = None
        td_bags[0] = frozenset()
    root = next(n for n, p in td_parent.items() if p is None)
    h_td = TreeDecomposition(RootedTree(root, td_parent), td_bags)
    return SlicedPartition(part_vertices, part_band, part_origin, h, h_td,
                           frozenset(removed))


def expand_specials(parts: list[set[int]], bands: list[int],
                    asg: AugmentedSurfaceGraph) -> list[set[int]]:
    """Replace each special vertex by its host set and map everything else
    back to host ids.  Special vertices may only appear in band 0."""
    special = set(asg.expansion)
    out: list[set[int]] = []
    for vertices, band in zip(parts, bands):
        expanded: set[int] = set()
        for v in vertices:
            if v == asg.root:
                raise AlmostEmbeddingError("root must not survive slicing")
            if v in special:
                if band != 0:
                    raise AlmostEmbeddingError(
                        f"special vertex {v} escaped band 0")
                expanded |= asg.expansion[v]
            else:
                expanded.add(asg.to_original[v])
        out.append(expanded)
    return out


@dataclass
class LemmaResult:
    """Outcome of the almost-embeddable partition: removed set S, parts of
    G - S in host ids, the quotient with its width-3 certificate, and the
    certificate over the dense induced copy of G - S."""

    s: frozenset[int]
    parts: list[frozenset[int]]
    h: Graph
    h_td: TreeDecomposition
    cert: HPartitionCertificate
    order: list[int]
    stats: dict = field(default_factory=dict)


def almost_embeddable_partition(
    ae: AlmostEmbedding,
    d: int,
    external_partition: HPartitionCertificate | None = None,
) -> LemmaResult:
    """Produce (S, H-partition of G - S) with |S| <= n/(d-3) + a, planar H of
    treewidth <= 3, every vortex bag minus S inside at most two parts."""
    ae.validate()
    if d < 4:
        raise AlmostEmbeddingError("d must be at least 4")
    n = ae.graph.n
    if n < 1:
        raise AlmostEmbeddingError("graph must be non-empty")
    splits = [split_vortex(vx, ae.k, n) for vx in ae.vortices]
    try:
        asg = augment(ae, splits)
    except RequiresExternalPartition as exc:
        if external_partition is None:
            raise
        asg = exc.augmented
    tree = bfs_spanning_tree(asg.graph, asg.root)
    layering = bfs_layering(asg.graph, asg.root)
    s_count = len(ae.vortices)
    cover_limit = max(2 * (ae.g + 2 * max(0, s_count - 1)), 3)
    if asg.embedding is not None:
        tripod = planar_partition(asg.embedding, tree)
        cover_limit = 3
    else:
        cert = external_partition
        if cert is None or cert.vertical_paths is None:
            raise AlmostEmbeddingError(
                "external partition with vertical paths required")
        report = validate_h_partition(asg.graph, cert, tree=tree,
                                      path_limit=cover_limit)
        if not report.valid:
            raise AlmostEmbeddingError(
                f"external partition invalid: {report.violations[:3]}")
        if set(cert.vertical_paths) != set(range(cert.partition.size)):
            raise AlmostEmbeddingError(
                "external partition must cover every part with vertical paths")
        if cert.h_td.width() > 3:
            raise AlmostEmbeddingError("external quotient decomposition too wide")
        tripod = TripodPartitionResult(
            cert.partition, cert.h, cert.h_td, dict(cert.vertical_paths),
            asg.root)
    for z in asg.z_vertices:
        if layering.layer_of[z] != 1:
            raise AlmostEmbeddingError("vortex hub not in layer 1")
    for y in asg.y_vertices:
        if layering.layer_of[y] > 2:
            raise AlmostEmbeddingError("contracted boundary vertex below layer 2")
    ell = choose_slice_offset(layering, d)
    sliced = slice_and_partition(asg, tripod, layering, ell, d)
    expanded = expand_specials(sliced.part_vertices, sliced.part_band, asg)

    keep = [i for i, part in enumerate(expanded) if part]
    parts = [frozenset(expanded[i]) for i in keep]
    keep_map = {old: new for new, old in enumerate(keep)}
    h_edges = [
        (keep_map[u], keep_map[v])
        for u, v in sliced.h.edges
        if u in keep_map and v in keep_map
    ]
    h = Graph(len(keep), h_edges)
    td_bags = {
        x: frozenset(keep_map[p] for p in bag if p in keep_map)
        for x, bag in sliced.h_td.bags.items()
    }
    h_td = TreeDecomposition(sliced.h_td.tree, td_bags)

    removed_hosts = set()
    for v in sliced.removed:
        if v == asg.root:
            continue
        if v in asg.expansion:
            raise AlmostEmbeddingError("special vertex fell into the removed layers")
        removed_hosts.add(asg.to_original[v])
    s = frozenset(removed_hosts | ae.apex)
    if len(removed_hosts) * (d - 3) > n:
        raise AlmostEmbeddingError("removed layer class larger than n/(d-3)")

    a_factor = 2 * ae.g + 4 * ae.p + 3
    claimed = a_factor * (2 * ceil_sqrt(ae.k * n) + d + 2 * ae.k)
    width = max((len(p) for p in parts), default=0)
    if width > claimed:
        raise AlmostEmbeddingError(
            f"partition width {width} exceeds the certified bound {claimed}")

    covered = set()
    for part in parts:
        covered |= part
    if covered | s != set(range(n)) or covered & s:
        raise AlmostEmbeddingError("parts and S do not partition the graph")

    order = sorted(covered)
    index = {v: i for i, v in enumerate(order)}
    local_parts = [frozenset(index[v] for v in part) for part in parts]
    partition = Partition.from_parts(len(order), local_parts)
    cert = HPartitionCertificate(partition, h, h_td, None, claimed)

    part_of_host: dict[int, int] = {}
    for pid, part in enumerate(parts):
        for v in part:
            part_of_host[v] = pid
    for i, vx in enumerate(ae.vortices):
        for mdx, bag in enumerate(vx.bags):
            touched = {part_of_host[v] for v in bag if v not in s}
            if len(touched) > 2:
                raise AlmostEmbeddingError(
                    f"vortex {i} bag {mdx + 1} meets {len(touched)} parts")
    stats = {
        "n": n,
        "d": d,
        "ell": ell,
        "surface_n": asg.graph.n,
        "s_size": len(s),
        "width": width,
        "bound_width": claimed,
        "cover_limit": cover_limit,
        "vortex": [
            {"q": sp.q, "z_size": len(sp.z)} for sp in splits
        ],
    }
    return LemmaResult(s, parts, h, h_td, cert, order, stats)
