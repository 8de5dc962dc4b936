"""Per-time-slot snapshot graphs: laser ISLs plus ground up/down links.

A snapshot is an undirected weighted graph over every satellite and every
ground station at one instant. Satellite-satellite edges exist iff the
Euclidean separation is within the configured laser link range (optionally
also requiring a clear line of sight past the Earth); station-satellite
edges exist iff the satellite is above the station's elevation mask. Edge
weights are propagation latencies at the vacuum speed of light.

Node ordering is total and deterministic: ground stations first (by
label), then satellites (by ID). Everything downstream that breaks ties
does so in this order.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
from scipy.spatial import cKDTree

from .constellation import Constellation, ConstellationConfig, orbit_radius_km, parse_sat_id
from .geo import CONSTANTS, GeodeticPoint, geodetic_to_inertial, elevation_angles, segments_clear


class LinkClass(enum.Enum):
    INTRA_PLANE = "intra_plane"
    ADJACENT_PLANE = "adjacent_plane"
    CROSSING_PLANE = "crossing_plane"
    GROUND = "ground"


@dataclass(frozen=True)
class NodeRef:
    """A graph node: a ground station (by label) or a satellite (by ID)."""

    kind: str  # "ground" | "sat"
    label: str

    @classmethod
    def ground(cls, label: str) -> "NodeRef":
        return cls("ground", label)

    @classmethod
    def satellite(cls, sat_id: str) -> "NodeRef":
        return cls("sat", sat_id)

    @property
    def is_ground(self) -> bool:
        return self.kind == "ground"

    def sort_key(self) -> tuple[int, str]:
        # Ground stations order before satellites.
        return (0 if self.kind == "ground" else 1, self.label)

    def __lt__(self, other: "NodeRef") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Link:
    a: NodeRef
    b: NodeRef
    distance_km: float
    latency_s: float
    link_class: LinkClass | None


@dataclass(frozen=True)
class TopologyParams:
    lisl_range_km: float = 1500.0
    min_elevation_deg: float = 10.0
    occlusion_check: bool = True

    def __post_init__(self):
        if self.lisl_range_km <= 0:
            raise ValueError("lisl_range_km must be > 0")
        if not 0.0 <= self.min_elevation_deg < 90.0:
            raise ValueError("min_elevation_deg must be in [0, 90)")


@dataclass(frozen=True)
class NeighborCounts:
    intra_plane: int = 0
    adjacent_plane: int = 0
    crossing_plane: int = 0
    ground: int = 0

    @property
    def total(self) -> int:
        return self.intra_plane + self.adjacent_plane + self.crossing_plane + self.ground


def classify_link(a: str, b: str, cfg: ConstellationConfig) -> LinkClass:
    """Class of a satellite-satellite link from the IDs' plane indices."""
    if a == b:
        raise ValueError(f"link endpoints are identical ({a})")
    plane_a, _ = parse_sat_id(a)
    plane_b, _ = parse_sat_id(b)
    return _classify_planes(plane_a, plane_b, cfg.num_planes)


def _classify_planes(plane_a: int, plane_b: int, num_planes: int) -> LinkClass:
    if plane_a == plane_b:
        return LinkClass.INTRA_PLANE
    diff = (plane_a - plane_b) % num_planes
    if diff == 1 or diff == num_planes - 1:
        return LinkClass.ADJACENT_PLANE
    return LinkClass.CROSSING_PLANE


class SnapshotGraph:
    """Immutable weighted graph of one time slot.

    Nodes are indexed 0..n-1 in NodeRef order; edges are stored once with
    index_a < index_b and are reachable symmetrically through the
    adjacency lists.
    """

    def __init__(
        self,
        slot_index: int,
        time_s: float,
        ground_labels: tuple[str, ...],
        sat_ids: tuple[str, ...],
        edge_i: np.ndarray,
        edge_j: np.ndarray,
        edge_dist_km: np.ndarray,
        dims: tuple[int, int] | None = None,
        c_vacuum: float = CONSTANTS.c_vacuum,
        sat_index: dict[str, int] | None = None,
    ):
        self.slot_index = slot_index
        self.time_s = time_s
        self.ground_labels = ground_labels
        self.sat_ids = sat_ids
        self.edge_i = edge_i
        self.edge_j = edge_j
        self.edge_dist_km = edge_dist_km
        self._dims = dims
        self.c_vacuum = c_vacuum
        self._adjacency: list[list[tuple[int, float]]] | None = None
        self._csr: tuple[list[int], list[int], list[float]] | None = None
        self._sat_index = sat_index

    # -- node bookkeeping ---------------------------------------------------

    @property
    def n_ground(self) -> int:
        return len(self.ground_labels)

    @property
    def n_nodes(self) -> int:
        return len(self.ground_labels) + len(self.sat_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_dist_km)

    def node_ref(self, idx: int) -> NodeRef:
        if idx < self.n_ground:
            return NodeRef.ground(self.ground_labels[idx])
        return NodeRef.satellite(self.sat_ids[idx - self.n_ground])

    def nodes(self) -> list[NodeRef]:
        return [self.node_ref(i) for i in range(self.n_nodes)]

    def index_of(self, node: NodeRef) -> int:
        if node.is_ground:
            try:
                return self.ground_labels.index(node.label)
            except ValueError:
                raise KeyError(f"node {node.label!r} not in snapshot") from None
        if self._sat_index is None:
            self._sat_index = {sid: k for k, sid in enumerate(self.sat_ids)}
        try:
            return self.n_ground + self._sat_index[node.label]
        except KeyError:
            raise KeyError(f"node {node.label!r} not in snapshot") from None

    # -- edges ----------------------------------------------------------------

    def latency_of(self, distance_km: float) -> float:
        return distance_km * 1000.0 / self.c_vacuum

    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-node list of (neighbor index, latency_s), built lazily."""
        if self._adjacency is None:
            adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n_nodes)]
            offsets, nbrs, wts = self.csr()
            for u in range(self.n_nodes):
                adj[u] = [(nbrs[k], wts[k]) for k in range(offsets[u], offsets[u + 1])]
            self._adjacency = adj
        return self._adjacency

    def csr(self) -> tuple[list[int], list[int], list[float]]:
        """Compressed adjacency (offsets, neighbors, latencies_s).

        Node u's neighbors sit in neighbors[offsets[u]:offsets[u+1]]. This
        is the routing hot path, so it is assembled with array ops.
        """
        if self._csr is None:
            lat = self.edge_dist_km * (1000.0 / self.c_vacuum)
            both_u = np.concatenate([self.edge_i, self.edge_j])
            both_v = np.concatenate([self.edge_j, self.edge_i])
            both_w = np.concatenate([lat, lat])
            order = np.argsort(both_u, kind="stable")
            counts = np.bincount(both_u, minlength=self.n_nodes)
            offsets = np.zeros(self.n_nodes + 1, dtype=np.int64)
            np.cumsum(counts, out=offsets[1:])
            self._csr = (
                offsets.tolist(),
                both_v[order].tolist(),
                both_w[order].tolist(),
            )
        return self._csr

    def _class_of_edge(self, i: int, j: int) -> LinkClass | None:
        if i < self.n_ground or j < self.n_ground:
            return LinkClass.GROUND
        if self._dims is None:
            return None
        _, sats_per_plane = self._dims
        plane_i = (i - self.n_ground) // sats_per_plane + 1
        plane_j = (j - self.n_ground) // sats_per_plane + 1
        return _classify_planes(plane_i, plane_j, self._dims[0])

    def links(self) -> Iterator[Link]:
        for i, j, d in zip(self.edge_i.tolist(), self.edge_j.tolist(), self.edge_dist_km.tolist()):
            yield Link(
                a=self.node_ref(i),
                b=self.node_ref(j),
                distance_km=d,
                latency_s=self.latency_of(d),
                link_class=self._class_of_edge(i, j),
            )

    def link_between(self, a: NodeRef, b: NodeRef) -> Link | None:
        ia, ib = self.index_of(a), self.index_of(b)
        if ia > ib:
            ia, ib = ib, ia
        mask = (self.edge_i == ia) & (self.edge_j == ib)
        hits = np.nonzero(mask)[0]
        if len(hits) == 0:
            return None
        d = float(self.edge_dist_km[hits[0]])
        return Link(self.node_ref(ia), self.node_ref(ib), d, self.latency_of(d),
                    self._class_of_edge(ia, ib))

    def has_edge(self, a: NodeRef, b: NodeRef) -> bool:
        return self.link_between(a, b) is not None

    def edge_set(self) -> set[tuple[str, str]]:
        """Canonical (label_a, label_b) pairs; handy for set comparisons."""
        out = set()
        for i, j in zip(self.edge_i.tolist(), self.edge_j.tolist()):
            out.add((self.node_ref(i).label, self.node_ref(j).label))
        return out

    @classmethod
    def from_edge_list(
        cls,
        edges: Iterable[tuple[NodeRef, NodeRef, float]],
        nodes: Iterable[NodeRef] = (),
        slot_index: int = 0,
        time_s: float = 0.0,
        c_vacuum: float = CONSTANTS.c_vacuum,
    ) -> "SnapshotGraph":
        """Build a snapshot from explicit (a, b, distance_km) triples.

        Intended for small synthetic graphs in tests and tools; node set is
        the union of endpoints and the optional extra ``nodes``.
        """
        edges = list(edges)
        all_nodes = set(nodes)
        for a, b, _ in edges:
            all_nodes.add(a)
            all_nodes.add(b)
        ordered = sorted(all_nodes, key=NodeRef.sort_key)
        ground_labels = tuple(n.label for n in ordered if n.is_ground)
        sat_ids = tuple(n.label for n in ordered if not n.is_ground)
        index = {n: k for k, n in enumerate(ordered)}
        seen = set()
        ei, ej, dist = [], [], []
        for a, b, d in edges:
            if a == b:
                raise ValueError(f"self-loop on {a.label!r}")
            if d <= 0:
                raise ValueError("edge distance must be > 0")
            i, j = index[a], index[b]
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise ValueError(f"duplicate edge {a.label!r}-{b.label!r}")
            seen.add((i, j))
            ei.append(i)
            ej.append(j)
            dist.append(d)
        order = np.lexsort((np.array(ej, dtype=np.int32), np.array(ei, dtype=np.int32)))
        return cls(
            slot_index,
            time_s,
            ground_labels,
            sat_ids,
            np.array(ei, dtype=np.int32)[order],
            np.array(ej, dtype=np.int32)[order],
            np.array(dist, dtype=float)[order],
            dims=None,
            c_vacuum=c_vacuum,
        )


def build_snapshot(
    constellation: Constellation,
    stations: list[GeodeticPoint],
    t: float,
    params: TopologyParams,
    slot_index: int = 0,
) -> SnapshotGraph:
    """Snapshot of the constellation plus ground stations at time t.

    Satellite pairs within laser range are found with a KD-tree and
    optionally filtered by Earth occlusion; each station links to every
    satellite at or above its elevation mask. Isolated nodes are legal.
    """
    constants = constellation.constants
    labels = [s.label for s in stations]
    if len(set(labels)) != len(labels):
        raise ValueError("ground station labels must be unique")
    order = sorted(range(len(stations)), key=lambda k: stations[k].label)
    ground_labels = tuple(stations[k].label for k in order)

    sats_xyz = constellation.positions_at(t)
    n_ground = len(ground_labels)

    # Laser ISLs: range-pruned candidate pairs, then optional occlusion cut.
    # A chord between two points of the shell cannot dip below the Earth
    # when it is shorter than twice the tangent length, so the filter is
    # skipped where it provably cannot remove anything.
    pairs = cKDTree(sats_xyz).query_pairs(r=params.lisl_range_km, output_type="ndarray")
    shell_r = orbit_radius_km(constellation.cfg, constants)
    always_clear = params.lisl_range_km <= 2.0 * math.sqrt(
        max(0.0, shell_r**2 - constants.earth_radius_km**2)
    )
    if params.occlusion_check and not always_clear and len(pairs):
        clear = segments_clear(sats_xyz[pairs[:, 0]], sats_xyz[pairs[:, 1]],
                               constants.earth_radius_km)
        pairs = pairs[clear]
    if len(pairs):
        isl_dist = np.linalg.norm(sats_xyz[pairs[:, 0]] - sats_xyz[pairs[:, 1]], axis=1)
        isl_i = pairs[:, 0].astype(np.int64) + n_ground
        isl_j = pairs[:, 1].astype(np.int64) + n_ground
    else:
        isl_dist = np.empty(0)
        isl_i = np.empty(0, dtype=np.int64)
        isl_j = np.empty(0, dtype=np.int64)

    # Ground up/down links, gated by the elevation mask.
    gs_i, gs_j, gs_dist = [], [], []
    for g_idx, label in enumerate(ground_labels):
        station = stations[order[g_idx]]
        gs_xyz = geodetic_to_inertial(
            station, t, constants.earth_radius_km, constants.earth_rotation_rate
        )
        elev = elevation_angles(gs_xyz, sats_xyz)
        visible = np.nonzero(elev >= params.min_elevation_deg)[0]
        if len(visible):
            d = np.linalg.norm(sats_xyz[visible] - gs_xyz, axis=1)
            gs_i.append(np.full(len(visible), g_idx, dtype=np.int64))
            gs_j.append(visible.astype(np.int64) + n_ground)
            gs_dist.append(d)

    edge_i = np.concatenate([np.concatenate(gs_i), isl_i]) if gs_i else isl_i
    edge_j = np.concatenate([np.concatenate(gs_j), isl_j]) if gs_j else isl_j
    edge_d = np.concatenate([np.concatenate(gs_dist), isl_dist]) if gs_dist else isl_dist

    srt = np.lexsort((edge_j, edge_i))
    return SnapshotGraph(
        slot_index=slot_index,
        time_s=t,
        ground_labels=ground_labels,
        sat_ids=constellation.sat_ids,
        edge_i=edge_i[srt].astype(np.int32),
        edge_j=edge_j[srt].astype(np.int32),
        edge_dist_km=edge_d[srt],
        dims=(constellation.cfg.num_planes, constellation.cfg.sats_per_plane),
        c_vacuum=constants.c_vacuum,
        sat_index=constellation.sat_index,
    )


def neighbor_census(graph: SnapshotGraph) -> dict[str, NeighborCounts]:
    """Per-satellite link counts by class; class sums equal node degree."""
    n_sats = len(graph.sat_ids)
    if n_sats == 0:
        return {}
    if graph._dims is None:
        raise ValueError("census requires a snapshot built from a constellation")
    counts = np.zeros((n_sats, 4), dtype=np.int64)  # intra, adjacent, crossing, ground
    num_planes, sats_per_plane = graph._dims
    ng = graph.n_ground
    i = graph.edge_i.astype(np.int64)
    j = graph.edge_j.astype(np.int64)
    is_ground = i < ng  # edge_i < edge_j, so only i can be a ground node
    gsat = j[is_ground] - ng
    np.add.at(counts, (gsat, 3), 1)
    si = i[~is_ground] - ng
    sj = j[~is_ground] - ng
    diff = (si // sats_per_plane - sj // sats_per_plane) % num_planes
    cls = np.where(diff == 0, 0, np.where((diff == 1) | (diff == num_planes - 1), 1, 2))
    np.add.at(counts, (si, cls), 1)
    np.add.at(counts, (sj, cls), 1)
    return {
        sat_id: NeighborCounts(int(c[0]), int(c[1]), int(c[2]), int(c[3]))
        for sat_id, c in zip(graph.sat_ids, counts)
    }


def write_edge_csv(graph: SnapshotGraph, path) -> None:
    """Diagnostic edge dump: slot, endpoints, class, distance, latency."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["slot", "node_a", "node_b", "class", "distance_km", "latency_ms"])
        for link in graph.links():
            w.writerow(
                [
                    graph.slot_index,
                    link.a.label,
                    link.b.label,
                    link.link_class.value if link.link_class else "",
                    f"{link.distance_km:.6f}",
                    f"{link.latency_s * 1000.0:.4f}",
                ]
            )
