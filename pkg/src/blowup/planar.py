"""Combinatorial planar embeddings and the tripod partition.

An embedding is a rotation system: for each vertex the cyclic order of its
neighbours.  Faces are the orbits of (u,v) -> (v, successor of u around v);
a rotation system describes a sphere embedding iff V - E + F = 2 holds on
every connected component.

`planar_partition` implements the constructive planar product-structure
argument: triangulate, then recursively carve tripods (at most three vertical
tree paths hanging from an inner face) out of regions bounded by at most
three existing parts.  The quotient grows like a stacked 3-tree, which is
what certifies treewidth at most 3.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    Graph,
    GraphError,
    RootedTree,
    connected_components,
    is_bfs_spanning_tree,
    normalize_edge,
)
from .partition import Partition
from .treedecomp import TreeDecomposition


class PlanarEmbedding:
    """Rotation system over vertices of a graph on ids 0..n-1.

    Only vertices present as rotation keys are part of the embedding; this
    lets an embedding describe a subgraph of a larger id space (the surface
    part of an almost-embeddable graph).
    """

    __slots__ = ("n", "rotation", "_faces")

    def __init__(self, n: int, rotation: dict[int, tuple[int, ...]]) -> None:
        self.n = n
        self.rotation = {v: tuple(nbrs) for v, nbrs in rotation.items()}
        self._faces = None
        self._check()

    def _check(self) -> None:
        for v, nbrs in self.rotation.items():
            if not (0 <= v < self.n):
                raise GraphError(f"rotation vertex {v} out of range")
            if len(set(nbrs)) != len(nbrs):
                raise GraphError(f"duplicate neighbour in rotation of {v}")
            for u in nbrs:
                if u == v:
                    raise GraphError(f"self-loop in rotation of {v}")
                if u not in self.rotation or v not in self.rotation[u]:
                    raise GraphError(f"rotation not symmetric at ({v},{u})")
        if not self.is_spherical():
            raise GraphError("rotation system does not describe a sphere embedding")

    @property
    def vertices(self) -> list[int]:
        return sorted(self.rotation)

    @property
    def graph(self) -> Graph:
        edges = {normalize_edge(v, u) for v, nbrs in self.rotation.items() for u in nbrs}
        return Graph(self.n, edges)

    def faces(self) -> list[tuple[int, ...]]:
        if self._faces is None:
            self._faces = trace_faces(self.rotation)
        return self._faces

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.rotation.values()) // 2

    def is_spherical(self) -> bool:
        """Euler check V - E + F = 2C - I (components with edges count 2,
        isolated vertices 1)."""
        verts = set(self.rotation)
        if not verts:
            return True
        seen: set[int] = set()
        comps = 0
        isolated = 0
        for s in self.rotation:
            if s in seen:
                continue
            comps += 1
            stack = [s]
            seen.add(s)
            size = 0
            has_edge = False
            while stack:
                v = stack.pop()
                size += 1
                for u in self.rotation[v]:
                    has_edge = True
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            if not has_edge:
                isolated += 1
        v = len(verts)
        e = self.edge_count()
        f = len(self.faces())
        return v - e + f == 2 * comps - isolated


def trace_faces(rotation: dict[int, tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Face walks of a simple rotation system, as vertex tuples."""
    succ: dict[tuple[int, int], int] = {}
    for v, nbrs in rotation.items():
        for i, u in enumerate(nbrs):
            succ[(v, u)] = nbrs[(i + 1) % len(nbrs)]
    visited: set[tuple[int, int]] = set()
    faces = []
    for start in sorted(succ):
        if start in visited:
            continue
        walk = []
        e = start
        while e not in visited:
            visited.add(e)
            walk.append(e[0])
            u, v = e
            e = (v, succ[(v, u)])
        faces.append(tuple(walk))
    return faces


class HalfEdgeEmbedding:
    """Mutable embedding used for surgery: rotations hold edge ids, so
    parallel edges arising during contraction stay well-defined."""

    __slots__ = ("rot", "ends", "_next_edge")

    def __init__(self) -> None:
        self.rot: dict[int, list[int]] = {}
        self.ends: dict[int, tuple[int, int]] = {}
        self._next_edge = 0

    @classmethod
    def from_rotation(cls, rotation: dict[int, tuple[int, ...]]) -> "HalfEdgeEmbedding":
        m = cls()
        eid: dict[tuple[int, int], int] = {}
        for v in sorted(rotation):
            m.rot[v] = []
        for v in sorted(rotation):
            for u in rotation[v]:
                key = normalize_edge(v, u)
                if key not in eid:
                    eid[key] = m._new_edge(key)
                m.rot[v].append(eid[key])
        return m

    def _new_edge(self, ends: tuple[int, int]) -> int:
        e = self._next_edge
        self._next_edge += 1
        self.ends[e] = ends
        return e

    def other(self, e: int, v: int) -> int:
        a, b = self.ends[e]
        return b if v == a else a

    def has_vertex_edge(self, u: int, v: int) -> bool:
        return any(self.other(e, u) == v for e in self.rot[u])

    def find_edge(self, u: int, v: int) -> int:
        for e in self.rot[u]:
            if self.other(e, u) == v:
                return e
        raise GraphError(f"no edge between {u} and {v}")

    def trace(self) -> list[list[tuple[int, int]]]:
        """Faces as walks of (vertex, outgoing edge id) pairs."""
        nxt: dict[tuple[int, int], int] = {}
        for v, edges in self.rot.items():
            for i, e in enumerate(edges):
                nxt[(v, e)] = edges[(i + 1) % len(edges)]
        visited: set[tuple[int, int]] = set()
        faces = []
        for v in sorted(self.rot):
            for e in self.rot[v]:
                if (v, e) in visited:
                    continue
                walk = []
                cur = (v, e)
                while cur not in visited:
                    visited.add(cur)
                    walk.append(cur)
                    cv, ce = cur
                    w = self.other(ce, cv)
                    cur = (w, nxt[(w, ce)])
                faces.append(walk)
        return faces

    def add_bridge(self, u: int, v: int) -> int:
        e = self._new_edge(normalize_edge(u, v))
        self.rot[u].append(e)
        self.rot[v].append(e)
        return e

    def add_leaf(self, v: int, leaf: int) -> int:
        e = self._new_edge(normalize_edge(v, leaf))
        self.rot[leaf] = [e]
        self.rot[v].append(e)
        return e

    def add_chord(self, walk: list[tuple[int, int]], i: int, j: int) -> int:
        """Add an edge between walk positions i and j of one face: the new
        half-edge goes immediately before the outgoing edge at each end."""
        a, ea = walk[i]
        b, eb = walk[j]
        e = self._new_edge(normalize_edge(a, b))
        self.rot[a].insert(self.rot[a].index(ea), e)
        self.rot[b].insert(self.rot[b].index(eb), e)
        return e

    def add_star(self, walk: list[tuple[int, int]], positions: list[int], z: int) -> None:
        """Insert new vertex z inside a face, adjacent to the walk vertices
        at `positions` (ascending walk order)."""
        new_edges = []
        for p in positions:
            x, ex = walk[p]
            e = self._new_edge(normalize_edge(x, z))
            self.rot[x].insert(self.rot[x].index(ex), e)
            new_edges.append(e)
        self.rot[z] = list(reversed(new_edges))

    def delete_edge(self, e: int) -> None:
        a, b = self.ends[e]
        self.rot[a] = [x for x in self.rot[a] if x != e]
        if b != a:
            self.rot[b] = [x for x in self.rot[b] if x != e]
        del self.ends[e]

    def contract(self, e: int, keep: int) -> None:
        """Contract edge e, merging the other endpoint into `keep`."""
        a, b = self.ends[e]
        if keep not in (a, b):
            raise GraphError("keep must be an endpoint")
        gone = b if keep == a else a
        ru, rv = self.rot[keep], self.rot[gone]
        iu, iv = ru.index(e), rv.index(e)
        merged = ru[:iu] + rv[iv + 1:] + rv[:iv] + ru[iu + 1:]
        del self.ends[e]
        del self.rot[gone]
        self.rot[keep] = merged
        for x in set(merged):
            p, q = self.ends[x]
            self.ends[x] = (
                keep if p == gone else p,
                keep if q == gone else q,
            )
        # drop self-loops created by parallel copies of the contracted edge
        loops = [x for x in set(merged) if self.ends[x] == (keep, keep)]
        for x in loops:
            self.rot[keep] = [y for y in self.rot[keep] if y != x]
            del self.ends[x]

    def simplify(self) -> None:
        """Delete all but the lowest-id copy of each parallel edge."""
        by_pair: dict[tuple[int, int], list[int]] = {}
        for e, (a, b) in self.ends.items():
            by_pair.setdefault(normalize_edge(a, b), []).append(e)
        for pair, es in sorted(by_pair.items()):
            for e in sorted(es)[1:]:
                self.delete_edge(e)

    def to_rotation(self) -> dict[int, tuple[int, ...]]:
        rotation = {}
        for v, edges in self.rot.items():
            nbrs = tuple(self.other(e, v) for e in edges)
            if len(set(nbrs)) != len(nbrs):
                raise GraphError(f"parallel edges remain at {v}; simplify first")
            rotation[v] = nbrs
        return rotation


def triangulate_planar(emb: PlanarEmbedding) -> PlanarEmbedding:
    """Add chords until every face is a triangle.

    Ears are cut in walk order; an ear is skipped when its chord would repeat
    a vertex or duplicate an existing edge (in a simple plane graph the next
    ear is then available).  Original edges are preserved and no vertices are
    added.
    """
    verts = emb.vertices
    if len(verts) < 3:
        raise GraphError("triangulation needs at least 3 vertices")
    if verts != list(range(emb.n)):
        raise GraphError("triangulation expects a dense embedding")
    g = emb.graph
    if len(connected_components(g)) != 1:
        raise GraphError("triangulation expects a connected embedding")
    m = HalfEdgeEmbedding.from_rotation(emb.rotation)
    present = {normalize_edge(*e) for e in g.edges}
    for walk in m.trace():
        walk = list(walk)
        while len(walk) > 3:
            cut = None
            for i in range(len(walk)):
                a = walk[i - 1][0]
                b = walk[i][0]
                c = walk[(i + 1) % len(walk)][0]
                if a == c or normalize_edge(a, c) in present:
                    continue
                cut = i
                break
            if cut is None:
                raise GraphError("no valid ear found while triangulating")
            i = cut
            e = m.add_chord(walk, (i - 1) % len(walk), (i + 1) % len(walk))
            a = walk[i - 1][0]
            present.add(normalize_edge(a, walk[(i + 1) % len(walk)][0]))
            # the triangle (a, walk[i], walk[i+1]) splits off; the remaining
            # walk exits a via the new chord
            walk[i - 1] = (a, e)
            del walk[i]
    rotation = m.to_rotation()
    out = PlanarEmbedding(emb.n, rotation)
    if any(len(f) != 3 for f in out.faces()):
        raise GraphError("triangulation left a non-triangular face")
    return out


@dataclass
class TripodPartitionResult:
    """Partition of a connected planar graph into tripods, with certificates.

    Every part is covered by at most three vertical paths of the spanning
    tree; `h_td` certifies tw(H) <= 3, and H contains the quotient.
    """

    partition: Partition
    h: Graph
    h_td: TreeDecomposition
    path_cover: dict[int, tuple[tuple[int, ...], ...]]
    tree_root: int


def _tiny_partition(g: Graph, t: RootedTree) -> TripodPartitionResult:
    part = Partition.from_parts(g.n, [sorted(range(g.n))])
    h = Graph(1, [])
    h_td = TreeDecomposition(RootedTree(0, {0: None}), {0: frozenset({0})})
    if g.n == 1:
        paths = ((t.root,),)
    else:
        child = next(v for v in range(g.n) if v != t.root)
        paths = ((child, t.root),)
    return TripodPartitionResult(part, h, h_td, {0: paths}, t.root)


def planar_partition(emb: PlanarEmbedding, t: RootedTree) -> TripodPartitionResult:
    """Tripod partition of a connected planar embedding along a BFS tree.

    The quotient H is built one part at a time: a part carved inside a region
    is joined to the (at most three) parts bounding that region, so H is a
    subgraph of a stacked 3-tree and the recursion tree yields its width-3
    decomposition directly.
    """
    g = emb.graph
    if emb.vertices != list(range(emb.n)) or emb.n == 0:
        raise GraphError("partition expects a dense non-empty embedding")
    if len(connected_components(g)) != 1:
        raise GraphError("graph must be connected")
    if set(t.parent) != set(range(g.n)):
        raise GraphError("tree must span the graph")
    if not is_bfs_spanning_tree(g, t):
        raise GraphError("spanning tree is not a BFS tree of the graph")
    if g.n <= 2:
        return _tiny_partition(g, t)

    tri = triangulate_planar(emb)
    faces = tri.faces()
    edge_faces: dict[tuple[int, int], list[int]] = {}
    for fid, walk in enumerate(faces):
        for i in range(3):
            edge_faces.setdefault(normalize_edge(walk[i], walk[(i + 1) % 3]), []).append(fid)

    r = t.root
    root_faces = [fid for fid, w in enumerate(faces) if r in w]
    f_r = min(root_faces, key=lambda fid: (tuple(sorted(faces[fid])), fid))

    part_of: dict[int, int] = {}
    parts: list[list[int]] = []
    path_cover: dict[int, tuple[tuple[int, ...], ...]] = {}
    h_edges: set[tuple[int, int]] = set()

    def new_part(vertices: list[int], paths) -> int:
        pid = len(parts)
        parts.append(sorted(vertices))
        for v in vertices:
            part_of[v] = pid
        path_cover[pid] = tuple(tuple(p) for p in paths)
        return pid

    root_triple = sorted(set(faces[f_r]))
    new_part(root_triple, [(v,) for v in root_triple])

    td_parent: dict[int, int | None] = {0: None}
    td_bags: dict[int, frozenset[int]] = {0: frozenset({0})}

    all_face_ids = frozenset(range(len(faces))) - {f_r}
    stack: list[tuple[frozenset[int], int]] = [(all_face_ids, 0)]
    while stack:
        region_faces, anchor = stack.pop()
        region_vertices: set[int] = set()
        for fid in region_faces:
            region_vertices.update(faces[fid])
        boundary_parts = sorted({part_of[v] for v in region_vertices if v in part_of})
        if len(boundary_parts) > 3:
            raise GraphError(
                f"region bounded by {len(boundary_parts)} parts; invariant broken")
        interior = [v for v in region_vertices if v not in part_of]
        if not interior:
            continue

        color: dict[int, int] = {}

        def color_of(v: int) -> int:
            chain = []
            cur = v
            while cur not in color:
                if cur in part_of:
                    color[cur] = part_of[cur]
                    break
                chain.append(cur)
                cur = t.parent[cur]
            c = color[cur]
            for u in chain:
                color[u] = c
            return color[v] if v in color else c

        chosen = None
        if len(boundary_parts) == 3:
            want = set(boundary_parts)
            for fid in sorted(region_faces):
                if {color_of(v) for v in faces[fid]} == want:
                    chosen = fid
                    break
            if chosen is None:
                raise GraphError("no trichromatic face found; invariant broken")
        elif len(boundary_parts) == 2:
            for fid in sorted(region_faces):
                w = faces[fid]
                ok = False
                for i in range(3):
                    u, v = w[i], w[(i + 1) % 3]
                    if (u in part_of and v in part_of
                            and part_of[u] != part_of[v]):
                        ok = True
                        break
                if ok:
                    chosen = fid
                    break
            if chosen is None:
                raise GraphError("no two-coloured boundary face found")
        else:
            for fid in sorted(region_faces):
                if any(v not in part_of for v in faces[fid]):
                    chosen = fid
                    break
            if chosen is None:
                raise GraphError("interior vertices but no usable face")

        fwalk = faces[chosen]
        carve: set[tuple[int, int]] = set()
        for i in range(3):
            carve.add(normalize_edge(fwalk[i], fwalk[(i + 1) % 3]))
        legs: list[list[int]] = []
        tau: set[int] = set()
        for corner in sorted(set(fwalk)):
            if corner in part_of:
                continue
            leg = [corner]
            while t.parent[leg[-1]] not in part_of:
                leg.append(t.parent[leg[-1]])
            carve.update(normalize_edge(a, b) for a, b in zip(leg, leg[1:]))
            carve.add(normalize_edge(leg[-1], t.parent[leg[-1]]))
            legs.append(leg)
            tau.update(leg)

        new_anchor = anchor
        if tau:
            pid = new_part(sorted(tau), legs)
            for b in boundary_parts:
                h_edges.add(normalize_edge(pid, b))
            node = len(td_bags)
            td_parent[node] = anchor
            td_bags[node] = frozenset([pid] + boundary_parts)
            new_anchor = node

        remaining = region_faces - {chosen}
        seen: set[int] = set()
        for start in sorted(remaining):
            if start in seen:
                continue
            comp = {start}
            seen.add(start)
            frontier = [start]
            while frontier:
                fid = frontier.pop()
                w = faces[fid]
                for i in range(3):
                    e = normalize_edge(w[i], w[(i + 1) % 3])
                    if e in carve:
                        continue
                    for nfid in edge_faces[e]:
                        if nfid in remaining and nfid not in seen:
                            seen.add(nfid)
                            comp.add(nfid)
                            frontier.append(nfid)
            stack.append((frozenset(comp), new_anchor))

    unassigned = [v for v in range(g.n) if v not in part_of]
    if unassigned:
        raise GraphError(f"vertices left unpartitioned: {unassigned[:5]}")

    partition = Partition.from_parts(g.n, parts)
    h = Graph(len(parts), h_edges)
    h_td = TreeDecomposition(RootedTree(0, td_parent), td_bags)
    return TripodPartitionResult(partition, h, h_td, path_cover, r)
