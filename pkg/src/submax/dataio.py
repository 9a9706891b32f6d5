"""Instance generation, real-data loaders, and JSON persistence.

Instance files carry a schema version, a family tag, the matroid, and a
family-specific payload; loading re-runs all family invariants and
reports the offending field on failure.  Generators are pure functions
of their seed.
"""

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .matroids import Matroid
from .objectives import (
    CacheNetworkObjective,
    CacheRequest,
    FacilityLocationObjective,
    InfluenceObjective,
    SummarizationObjective,
)

SCHEMA_VERSION = 1


class InstanceFormatError(ValueError):
    """Instance file violates the schema; message names the field."""


# ---------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class GraphData:
    num_nodes: int
    edges: tuple  # (u, v) pairs
    directed: bool
    parts: tuple = None  # optional (left, right) split for bipartite graphs

    def adjacency(self):
        adj = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            if not self.directed:
                adj[v].append(u)
        return adj


def zkc_graph():
    """Bundled Zachary karate club graph (34 nodes, 78 edges, undirected)."""
    text = resources.files("submax.data").joinpath("zkc_edges.txt").read_text()
    edges = []
    for line in text.splitlines():
        if line.strip():
            u, v = line.split()
            edges.append((int(u), int(v)))
    return GraphData(num_nodes=34, edges=tuple(edges), directed=False)


def zkc_factions():
    """Faction label (0/1) per karate-club node."""
    text = resources.files("submax.data").joinpath(
        "zkc_factions.txt"
    ).read_text()
    labels = {}
    for line in text.splitlines():
        if line.strip():
            node, label = line.split()
            labels[int(node)] = int(label)
    return [labels[i] for i in range(34)]


def gen_bipartite_powerlaw(num_nodes, exponent=2.0, seed=0, min_degree=1):
    """Directed bipartite graph with power-law right-side degrees.

    Nodes split evenly into left [0, n/2) and right [n/2, n); each right
    node draws its in-degree from a zeta-like law truncated at the left
    side's size (which keeps edges simple) and picks that many distinct
    left in-neighbors.
    """
    if num_nodes % 2:
        raise ValueError("node count must be even")
    if num_nodes < 2:
        raise ValueError("need at least two nodes")
    half = num_nodes // 2
    rng = np.random.default_rng(seed)
    degrees = np.arange(min_degree, half + 1, dtype=np.float64)
    pmf = degrees ** (-float(exponent))
    cdf = np.cumsum(pmf / pmf.sum())
    edges = []
    for w in range(half, num_nodes):
        draw = int(np.searchsorted(cdf, rng.random(), side="right"))
        degree = min(min_degree + draw, half)
        heads = rng.choice(half, size=degree, replace=False)
        for u in sorted(int(h) for h in heads):
            edges.append((u, w))
    return GraphData(
        num_nodes=num_nodes,
        edges=tuple(edges),
        directed=True,
        parts=(tuple(range(half)), tuple(range(half, num_nodes))),
    )


# ---------------------------------------------------------------------
# Independent-cascade traces
# ---------------------------------------------------------------------


def single_cascade(graph, p, rng):
    """One percolation trace: keep each edge with probability p, then
    map every node to its forward-reachable set (always containing the
    node itself)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    keep = rng.random(len(graph.edges)) < p
    adj = [[] for _ in range(graph.num_nodes)]
    for (u, v), kept in zip(graph.edges, keep):
        if kept:
            adj[u].append(v)
            if not graph.directed:
                adj[v].append(u)
    if not graph.directed:
        # Reachability is the connected component; one sweep suffices.
        comp = [-1] * graph.num_nodes
        comps = []
        for s in range(graph.num_nodes):
            if comp[s] != -1:
                continue
            stack = [s]
            comp[s] = len(comps)
            members = [s]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if comp[v] == -1:
                        comp[v] = len(comps)
                        members.append(v)
                        stack.append(v)
            comps.append(tuple(sorted(members)))
        return tuple(comps[comp[v]] for v in range(graph.num_nodes))
    trace = []
    for s in range(graph.num_nodes):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        trace.append(tuple(sorted(seen)))
    return tuple(trace)


def gen_ic_cascades(graph, p, count, seed=0):
    """Independent cascade traces with per-cascade derived seeds."""
    traces = []
    for idx in range(int(count)):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=int(seed), spawn_key=(idx,))
        )
        traces.append(single_cascade(graph, p, rng))
    return traces


# ---------------------------------------------------------------------
# Synthetic instance helpers
# ---------------------------------------------------------------------


def gen_sm_objective(num_tokens, num_partitions, num_realizations, rng):
    """Random summarization instance; values normalized to sum 1 per z."""
    splits = np.array_split(np.arange(num_tokens), num_partitions)
    partitions = [tuple(int(i) for i in s) for s in splits if len(s)]
    values = rng.random((num_realizations, num_tokens))
    values /= values.sum(axis=1, keepdims=True)
    return SummarizationObjective(partitions, values)


def gen_fl_objective(num_facilities, num_customers, rng, sparsity=0.0):
    """Random facility-location instance with weights in [0, 1]."""
    weights = rng.random((num_customers, num_facilities))
    if sparsity > 0:
        weights[rng.random(weights.shape) < sparsity] = 0.0
    return FacilityLocationObjective(weights)


def gen_im_objective(num_nodes, edge_prob, num_cascades, p, rng):
    """Random directed graph plus cascade traces."""
    edges = []
    for u in range(num_nodes):
        for v in range(num_nodes):
            if u != v and rng.random() < edge_prob:
                edges.append((u, v))
    graph = GraphData(num_nodes=num_nodes, edges=tuple(edges), directed=True)
    seed = int(rng.integers(2**31))
    return InfluenceObjective(
        num_nodes, gen_ic_cascades(graph, p, num_cascades, seed=seed)
    )


def gen_cn_objective(num_nodes, catalogue_size, num_requests, target_load, rng):
    """Line network with random sub-path requests, scaled to the target
    worst empty-cache load."""
    if not 0.0 < target_load < 1.0:
        raise ValueError("target load must lie in (0, 1)")
    edges = [(v, v + 1, 1.0) for v in range(num_nodes - 1)]
    requests = []
    for _ in range(num_requests):
        start = int(rng.integers(0, num_nodes - 1))
        end = int(rng.integers(start + 1, num_nodes))
        item = int(rng.integers(catalogue_size))
        rate = float(rng.uniform(0.2, 1.0))
        requests.append(
            CacheRequest(item, tuple(range(start, end + 1)), rate)
        )
    # Scale rates so the max empty-cache edge load hits the target.
    loads = np.zeros(len(edges))
    for req in requests:
        for k in range(len(req.path) - 1):
            loads[req.path[k]] += req.rate
    scale = target_load / loads.max()
    requests = [
        CacheRequest(r.item, r.path, r.rate * scale) for r in requests
    ]
    return CacheNetworkObjective(num_nodes, catalogue_size, edges, requests)


# ---------------------------------------------------------------------
# Ratings loader
# ---------------------------------------------------------------------


def load_ratings(path, delimiter=None):
    """Facility-location objective from ``user,item,rating`` lines.

    Facilities are items, customers (realizations) are users; ratings
    rescale to [0, 1] by the file's maximum; missing pairs weigh 0;
    duplicate (user, item) pairs take the last value with a warning.
    """
    entries = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            sep = delimiter
            if sep is None:
                sep = "\t" if "\t" in line else ","
            parts = line.split(sep)
            if len(parts) != 3:
                raise ValueError(
                    f"{path}:{lineno}: expected user{sep}item{sep}rating, "
                    f"got {line!r}"
                )
            try:
                user, item, rating = parts[0], parts[1], float(parts[2])
            except ValueError as exc:
                raise ValueError(
                    f"{path}:{lineno}: malformed rating {parts[2]!r}"
                ) from exc
            if rating < 0:
                raise ValueError(f"{path}:{lineno}: negative rating")
            if (user, item) in entries:
                warnings.warn(
                    f"{path}:{lineno}: duplicate pair ({user}, {item}); "
                    "last value wins"
                )
            entries[(user, item)] = rating
    if not entries:
        raise ValueError(f"{path}: no ratings found")
    users = sorted({u for u, _ in entries})
    items = sorted({i for _, i in entries})
    max_rating = max(entries.values())
    if max_rating <= 0:
        raise ValueError(f"{path}: all ratings are zero")
    weights = np.zeros((len(users), len(items)))
    user_pos = {u: i for i, u in enumerate(users)}
    item_pos = {m: i for i, m in enumerate(items)}
    for (u, m), rating in entries.items():
        weights[user_pos[u], item_pos[m]] = rating / max_rating
    return FacilityLocationObjective(weights), users, items


# ---------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------


@dataclass
class Instance:
    objective: object
    matroid: Matroid
    meta: dict = field(default_factory=dict)

    @property
    def family(self):
        return self.objective.family

    @property
    def n(self):
        return self.objective.n


def _payload_of(obj):
    if isinstance(obj, SummarizationObjective):
        return {
            "partitions": [list(p) for p in obj.partitions],
            "values": obj.values.tolist(),
        }
    if isinstance(obj, InfluenceObjective):
        return {
            "num_nodes": obj.n,
            "cascades": [
                [list(reach) for reach in trace] for trace in obj.traces
            ],
        }
    if isinstance(obj, FacilityLocationObjective):
        return {"weights": obj.weights.tolist()}
    if isinstance(obj, CacheNetworkObjective):
        return {
            "num_nodes": obj.num_nodes,
            "catalogue_size": obj.catalogue_size,
            "edges": [[u, v, mu] for u, v, mu in obj.edges],
            "requests": [
                {"item": r.item, "path": list(r.path), "rate": r.rate}
                for r in obj.requests
            ],
        }
    raise TypeError(f"unknown objective type {type(obj).__name__}")


def _objective_from_payload(family, payload):
    try:
        if family == "SM":
            return SummarizationObjective(
                payload["partitions"], payload["values"]
            )
        if family == "IM":
            return InfluenceObjective(
                payload["num_nodes"], payload["cascades"]
            )
        if family == "FL":
            return FacilityLocationObjective(payload["weights"])
        if family == "CN":
            return CacheNetworkObjective(
                payload["num_nodes"],
                payload["catalogue_size"],
                [tuple(e) for e in payload["edges"]],
                [
                    CacheRequest(r["item"], tuple(r["path"]), r["rate"])
                    for r in payload["requests"]
                ],
            )
    except KeyError as exc:
        raise InstanceFormatError(f"payload.{exc.args[0]}: missing") from exc
    except (ValueError, TypeError) as exc:
        raise InstanceFormatError(f"payload: {exc}") from exc
    raise InstanceFormatError(f"family: unknown tag {family!r}")


def instance_to_dict(instance):
    return {
        "schema_version": SCHEMA_VERSION,
        "family": instance.family,
        "n": instance.n,
        "matroid": instance.matroid.to_json_dict(),
        "payload": _payload_of(instance.objective),
        "meta": instance.meta,
    }


def save_instance(instance, path):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh)
        fh.write("\n")


def instance_from_dict(obj):
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InstanceFormatError(
            f"schema_version: {version!r} unsupported (expected {SCHEMA_VERSION})"
        )
    family = obj.get("family")
    payload = obj.get("payload")
    if not isinstance(payload, dict):
        raise InstanceFormatError("payload: missing or not an object")
    objective = _objective_from_payload(family, payload)
    n = obj.get("n")
    if n != objective.n:
        raise InstanceFormatError(
            f"n: {n} disagrees with payload ground set {objective.n}"
        )
    try:
        matroid = Matroid.from_json_dict(obj["matroid"], n=objective.n)
    except KeyError:
        raise InstanceFormatError("matroid: missing") from None
    except ValueError as exc:
        raise InstanceFormatError(f"matroid: {exc}") from exc
    return Instance(objective, matroid, meta=obj.get("meta", {}))


def load_instance(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(obj)
