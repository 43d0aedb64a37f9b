"""Canonical JSON serialisation for every file format the CLI speaks.

Serialisation is canonical (sorted keys, compact separators, trailing
newline, integers only) so that identical runs produce byte-identical
certificates.
"""

from __future__ import annotations

import json
import os
import tempfile

from .graph import Graph, GraphError, RootedTree
from .partition import HPartitionCertificate, Partition
from .planar import PlanarEmbedding
from .treedecomp import TreeDecomposition


class FormatError(ValueError):
    pass


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".blowup-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path: str):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc


# -- graphs -----------------------------------------------------------------

def graph_to_obj(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.sorted_edges()]}


def graph_from_obj(obj) -> Graph:
    try:
        n = obj["n"]
        edges = obj["edges"]
    except (TypeError, KeyError) as exc:
        raise FormatError(f"graph object missing field: {exc}") from exc
    seen = set()
    for e in edges:
        if len(e) != 2 or not all(isinstance(x, int) for x in e):
            raise FormatError(f"bad edge entry {e}")
        u, v = e
        if not u < v:
            raise FormatError(f"edge [{u},{v}] must be listed once with u < v")
        if (u, v) in seen:
            raise FormatError(f"duplicate edge [{u},{v}]")
        seen.add((u, v))
    try:
        return Graph(n, [tuple(e) for e in edges])
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


# -- embeddings -------------------------------------------------------------

def embedding_to_obj(emb: PlanarEmbedding) -> dict:
    return {
        "graph": graph_to_obj(emb.graph),
        "rotation": {str(v): list(emb.rotation[v]) for v in emb.vertices},
    }


def embedding_from_obj(obj) -> PlanarEmbedding:
    g = graph_from_obj(obj.get("graph", {}))
    rot_raw = obj.get("rotation")
    if not isinstance(rot_raw, dict):
        raise FormatError("embedding needs a rotation object")
    rotation = {}
    for key, nbrs in rot_raw.items():
        rotation[int(key)] = tuple(nbrs)
    try:
        emb = PlanarEmbedding(g.n, rotation)
    except GraphError as exc:
        raise FormatError(str(exc)) from exc
    if emb.graph.edges != g.edges:
        raise FormatError("rotation edges disagree with the graph edge list")
    return emb


# -- tree-decompositions ----------------------------------------------------

def td_to_obj(td: TreeDecomposition) -> dict:
    tree_edges = sorted(
        [min(x, p), max(x, p)] for x, p in td.tree.parent.items() if p is not None
    )
    return {
        "root": td.tree.root,
        "tree_edges": tree_edges,
        "bags": {str(x): sorted(td.bags[x]) for x in td.nodes},
    }


def td_from_obj(obj) -> TreeDecomposition:
    try:
        root = obj["root"]
        tree_edges = obj["tree_edges"]
        bags_raw = obj["bags"]
    except (TypeError, KeyError) as exc:
        raise FormatError(f"tree-decomposition missing field: {exc}") from exc
    nodes = {int(k) for k in bags_raw}
    adj: dict[int, list[int]] = {x: [] for x in nodes}
    for e in tree_edges:
        x, y = e
        if x not in nodes or y not in nodes:
            raise FormatError(f"tree edge {e} references unknown node")
        adj[x].append(y)
        adj[y].append(x)
    if root not in nodes:
        raise FormatError(f"root {root} is not a node")
    parent: dict[int, int | None] = {root: None}
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    if set(parent) != nodes:
        raise FormatError("decomposition tree is not connected")
    if len(tree_edges) != len(nodes) - 1:
        raise FormatError("decomposition tree has a cycle")
    bags = {int(k): frozenset(vs) for k, vs in bags_raw.items()}
    try:
        return TreeDecomposition(RootedTree(root, parent), bags)
    except GraphError as exc:
        raise FormatError(str(exc)) from exc


# -- certificates -----------------------------------------------------------

def certificate_to_obj(cert: HPartitionCertificate) -> dict:
    obj = {
        "partition": {str(v): p for v, p in sorted(cert.partition.part_of.items())},
        "H": graph_to_obj(cert.h),
        "H_td": td_to_obj(cert.h_td),
        "alpha": cert.apex_part,
        "claimed_width": cert.claimed_width,
    }
    if cert.vertical_paths is not None:
        obj["vertical_paths"] = {
            str(pid): [list(p) for p in paths]
            for pid, paths in sorted(cert.vertical_paths.items())
        }
        if cert.tree_root is not None:
            obj["tree_root"] = cert.tree_root
    return obj


def certificate_from_obj(obj) -> HPartitionCertificate:
    try:
        part_raw = obj["partition"]
        h = graph_from_obj(obj["H"])
        h_td = td_from_obj(obj["H_td"])
        alpha = obj["alpha"]
        claimed = obj["claimed_width"]
    except (TypeError, KeyError) as exc:
        raise FormatError(f"certificate missing field: {exc}") from exc
    part_of = {int(v): p for v, p in part_raw.items()}
    try:
        partition = Partition(len(part_of), part_of)
    except GraphError as exc:
        raise FormatError(str(exc)) from exc
    paths = None
    if "vertical_paths" in obj:
        paths = {
            int(pid): tuple(tuple(p) for p in plist)
            for pid, plist in obj["vertical_paths"].items()
        }
    return HPartitionCertificate(
        partition, h, h_td, alpha, claimed, paths, obj.get("tree_root"))
