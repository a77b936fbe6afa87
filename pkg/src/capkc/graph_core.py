"""Unweighted graphs, hop metrics, power graphs, thresholding, instance I/O.

Everything downstream works on hop distances of a thresholded graph, so this
module is the single place that touches weighted input.  Distances are exact
rationals; unreachable pairs are represented by the INF sentinel, which only
ever participates in comparisons, never in arithmetic.
"""

from __future__ import annotations

import heapq
from collections import deque
from fractions import Fraction

from .errors import InputError, PipelineError
from .rational import format_rational

INF = float("inf")

HARD = "hard"
SOFT = "soft"


class Graph:
    """Simple undirected graph on vertices 0..n-1.

    Treated as immutable after construction; adjacency and the all-pairs hop
    matrix are computed lazily and cached.
    """

    def __init__(self, vertex_count, edges):
        if vertex_count < 0:
            raise InputError("vertex_count must be nonnegative")
        norm = set()
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise InputError(f"edge ({u},{v}) out of range [0,{vertex_count})")
            norm.add((u, v) if u < v else (v, u))
        self.vertex_count = vertex_count
        self.edges = frozenset(norm)
        self._adj = None
        self._hops = None

    @property
    def adjacency(self):
        if self._adj is None:
            adj = [[] for _ in range(self.vertex_count)]
            for u, v in self.edges:
                adj[u].append(v)
                adj[v].append(u)
            for lst in adj:
                lst.sort()
            self._adj = adj
        return self._adj

    def neighbors(self, u):
        return self.adjacency[u]

    def closed_neighborhood(self, u):
        return [u] + self.adjacency[u]

    def has_edge(self, u, v):
        return ((u, v) if u < v else (v, u)) in self.edges

    def hop_distances(self):
        """All-pairs hop distances; INF for unreachable pairs."""
        if self._hops is None:
            n = self.vertex_count
            adj = self.adjacency
            rows = []
            for s in range(n):
                dist = [INF] * n
                dist[s] = 0
                q = deque([s])
                while q:
                    u = q.popleft()
                    du = dist[u]
                    for w in adj[u]:
                        if dist[w] == INF:
                            dist[w] = du + 1
                            q.append(w)
                rows.append(dist)
            self._hops = rows
        return self._hops

    def hop(self, u, v):
        return self.hop_distances()[u][v]

    def is_connected(self):
        if self.vertex_count <= 1:
            return True
        seen = [False] * self.vertex_count
        seen[0] = True
        q = deque([0])
        count = 1
        while q:
            u = q.popleft()
            for w in self.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    q.append(w)
        return count == self.vertex_count

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.vertex_count == other.vertex_count
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.vertex_count, self.edges))

    def __repr__(self):
        return f"Graph(n={self.vertex_count}, m={len(self.edges)})"


def connected_components(graph):
    """Partition of the vertex set into maximal connected classes.

    Returned as a list of ascending vertex lists, ordered by smallest member.
    """
    n = graph.vertex_count
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp = []
        seen[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            comp.append(u)
            for w in graph.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    q.append(w)
        comp.sort()
        out.append(comp)
    return out


def induced_subgraph(graph, vertices):
    """Subgraph on `vertices`, relabeled to 0..len-1 in ascending id order.

    Returns (subgraph, old_ids) where old_ids[new] = original vertex id.
    """
    old_ids = sorted(vertices)
    index = {v: i for i, v in enumerate(old_ids)}
    edges = [
        (index[u], index[v])
        for u, v in graph.edges
        if u in index and v in index
    ]
    return Graph(len(old_ids), edges), old_ids


def power_graph(graph, delta):
    """Graph with edge uv iff 1 <= hop distance <= delta.  Components never merge."""
    if delta < 1:
        raise InputError("power exponent must be >= 1")
    if delta == 1:
        return graph
    hops = graph.hop_distances()
    n = graph.vertex_count
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if hops[u][v] <= delta
    ]
    return Graph(n, edges)


class WeightedMetricInstance:
    """A problem statement: metric distances, capacities, k, hard/soft mode.

    dist is the exact shortest-path closure of the input edges; pairs in
    different components hold INF.  Capacities are nonnegative integers.
    """

    def __init__(self, vertex_count, dist, capacities, k, mode, edges=None):
        if mode not in (HARD, SOFT):
            raise InputError(f"mode must be '{HARD}' or '{SOFT}', got {mode!r}")
        if k < 1:
            raise InputError("k must be >= 1")
        if len(capacities) != vertex_count:
            raise InputError("capacity list length mismatch")
        for v, c in enumerate(capacities):
            if not isinstance(c, int) or c < 0:
                raise InputError(f"capacity of vertex {v} must be a nonnegative integer")
        self.vertex_count = vertex_count
        self.dist = dist
        self.capacities = list(capacities)
        self.k = k
        self.mode = mode
        # original edge list (u, v, weight), kept for file round-trips
        self.edges = list(edges) if edges is not None else self._complete_edges()

    def _complete_edges(self):
        out = []
        for u in range(self.vertex_count):
            for v in range(u + 1, self.vertex_count):
                if self.dist[u][v] != INF:
                    out.append((u, v, self.dist[u][v]))
        return out

    @classmethod
    def from_weighted_edges(cls, vertex_count, edges, capacities, k, mode):
        """Build the metric as the exact shortest-path closure of the edges."""
        adj = [[] for _ in range(vertex_count)]
        uniform = None
        ok_uniform = True
        for u, v, w in edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise InputError(f"edge ({u},{v}) out of range")
            w = Fraction(w)
            if w < 0:
                raise InputError(f"negative edge weight on ({u},{v})")
            adj[u].append((v, w))
            adj[v].append((u, w))
            if uniform is None:
                uniform = w
            elif w != uniform:
                ok_uniform = False
        n = vertex_count
        dist = []
        if ok_uniform and uniform is not None and uniform > 0:
            # uniform positive weights: BFS scaled by the weight
            plain = [[] for _ in range(n)]
            for u, v, _ in edges:
                plain[u].append(v)
                plain[v].append(u)
            for s in range(n):
                row = [INF] * n
                row[s] = Fraction(0)
                q = deque([s])
                while q:
                    u = q.popleft()
                    for w2 in plain[u]:
                        if row[w2] == INF:
                            row[w2] = row[u] + uniform
                            q.append(w2)
                dist.append(row)
        else:
            for s in range(n):
                row = [INF] * n
                row[s] = Fraction(0)
                heap = [(Fraction(0), s)]
                while heap:
                    d, u = heapq.heappop(heap)
                    if d > row[u]:
                        continue
                    for v, w in adj[u]:
                        nd = d + w
                        if row[v] == INF or nd < row[v]:
                            row[v] = nd
                            heapq.heappush(heap, (nd, v))
                dist.append(row)
        normalized = [(u, v, Fraction(w)) for u, v, w in edges]
        return cls(vertex_count, dist, capacities, k, mode, edges=normalized)

    @classmethod
    def from_distance_matrix(cls, dist, capacities, k, mode):
        """Direct construction; validates symmetry, zero diagonal, triangle inequality."""
        n = len(dist)
        mat = [[(INF if dist[i][j] == INF else Fraction(dist[i][j])) for j in range(n)] for i in range(n)]
        for i in range(n):
            if mat[i][i] != 0:
                raise InputError(f"d({i},{i}) must be 0")
            for j in range(n):
                if mat[i][j] != mat[j][i]:
                    raise InputError(f"distance matrix not symmetric at ({i},{j})")
                if mat[i][j] != INF and mat[i][j] < 0:
                    raise InputError(f"negative distance at ({i},{j})")
        for i in range(n):
            for j in range(n):
                if mat[i][j] == INF:
                    continue
                for h in range(n):
                    if mat[i][h] != INF and mat[h][j] != INF and mat[i][h] + mat[h][j] < mat[i][j]:
                        raise InputError(f"triangle inequality violated on ({i},{h},{j})")
        return cls(n, mat, capacities, k, mode)


def candidate_radii(inst):
    """Strictly increasing list of the distinct finite pairwise distances."""
    vals = set()
    n = inst.vertex_count
    for u in range(n):
        row = inst.dist[u]
        for v in range(u + 1, n):
            if row[v] != INF:
                vals.add(row[v])
    return sorted(vals)


def threshold_graph(inst, r):
    """Edge uv iff u != v and d(u,v) <= r; the bottleneck reduction step."""
    if r < 0:
        raise InputError("threshold radius must be >= 0")
    n = inst.vertex_count
    edges = []
    for u in range(n):
        row = inst.dist[u]
        for v in range(u + 1, n):
            if row[v] != INF and row[v] <= r:
                edges.append((u, v))
    return Graph(n, edges)


def hamiltonian_path_in_cube(graph):
    """A vertex order covering all of G with consecutive hop distance <= 3.

    Built on a BFS spanning tree rooted at vertex 0: the path of a subtree is
    its root followed by each child's path reversed (children ascending).
    Reversal is what keeps junction distances within 3; each subtree path ends
    at a child of its root, so crossing from one child subtree to the next
    costs at most child -> root -> next child -> its child = 3 tree hops.
    """
    n = graph.vertex_count
    if n == 0:
        raise InputError("empty graph has no Hamiltonian path")
    if not graph.is_connected():
        raise InputError("Hamiltonian path in the cube needs a connected graph")
    if n == 1:
        return [0]
    # BFS tree from 0, children in ascending id order
    parent = [-1] * n
    order = [0]
    seen = [False] * n
    seen[0] = True
    q = deque([0])
    while q:
        u = q.popleft()
        for w in graph.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                order.append(w)
                q.append(w)
    children = [[] for _ in range(n)]
    for v in order[1:]:
        children[parent[v]].append(v)
    for lst in children:
        lst.sort()
    path = [None] * n
    for v in reversed(order):
        seg = [v]
        for c in children[v]:
            seg.extend(reversed(path[c]))
            path[c] = None
        path[v] = seg
    return path[0]


# ---------------------------------------------------------------------------
# instance file format
#
#   capkc 1 <n> <m> <k> <hard|soft>
#   v <id> <capacity>          (n lines, each id exactly once)
#   e <u> <v> <weight>         (m lines; weight rational p/q or integer)
#
# Blank lines and lines starting with '#' are skipped.


def parse_instance_text(text):
    lines = text.splitlines()
    items = [
        (i + 1, line.strip())
        for i, line in enumerate(lines)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not items:
        raise InputError("empty instance file")

    def fail(lineno, msg):
        raise InputError(f"line {lineno}: {msg}")

    lineno, header = items[0]
    parts = header.split()
    if len(parts) != 6 or parts[0] != "capkc":
        fail(lineno, "header must be 'capkc 1 <n> <m> <k> <hard|soft>'")
    if parts[1] != "1":
        fail(lineno, f"unsupported format version {parts[1]!r}")
    try:
        n, m, k = int(parts[2]), int(parts[3]), int(parts[4])
    except ValueError:
        fail(lineno, "n, m, k must be integers")
    mode = parts[5]
    if mode not in (HARD, SOFT):
        fail(lineno, f"mode must be 'hard' or 'soft', got {mode!r}")
    if n < 1:
        fail(lineno, "n must be >= 1")
    if m < 0 or k < 1:
        fail(lineno, "m must be >= 0 and k >= 1")
    if len(items) - 1 != n + m:
        fail(lineno, f"expected {n} vertex lines and {m} edge lines, found {len(items) - 1}")

    caps = [None] * n
    for lineno, line in items[1 : 1 + n]:
        parts = line.split()
        if len(parts) != 3 or parts[0] != "v":
            fail(lineno, "expected 'v <id> <capacity>'")
        try:
            vid, cap = int(parts[1]), int(parts[2])
        except ValueError:
            fail(lineno, "vertex id and capacity must be integers")
        if not 0 <= vid < n:
            fail(lineno, f"vertex id {vid} out of range [0,{n})")
        if caps[vid] is not None:
            fail(lineno, f"duplicate vertex line for id {vid}")
        if cap < 0:
            fail(lineno, "capacity must be >= 0")
        caps[vid] = cap

    edges = []
    seen_pairs = set()
    for lineno, line in items[1 + n :]:
        parts = line.split()
        if len(parts) != 4 or parts[0] != "e":
            fail(lineno, "expected 'e <u> <v> <weight>'")
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            fail(lineno, "edge endpoints must be integers")
        try:
            w = Fraction(parts[3])
        except (ValueError, ZeroDivisionError):
            fail(lineno, f"bad weight {parts[3]!r}")
        if u == v:
            fail(lineno, f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            fail(lineno, f"edge ({u},{v}) out of range [0,{n})")
        if w < 0:
            fail(lineno, "edge weight must be >= 0")
        pair = (u, v) if u < v else (v, u)
        if pair in seen_pairs:
            fail(lineno, f"duplicate edge ({pair[0]},{pair[1]})")
        seen_pairs.add(pair)
        edges.append((u, v, w))

    return WeightedMetricInstance.from_weighted_edges(n, edges, caps, k, mode)


def read_instance(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read instance file {path}: {exc}") from exc
    return parse_instance_text(text)


def format_instance(inst):
    out = [f"capkc 1 {inst.vertex_count} {len(inst.edges)} {inst.k} {inst.mode}"]
    for v in range(inst.vertex_count):
        out.append(f"v {v} {inst.capacities[v]}")
    for u, v, w in sorted(inst.edges, key=lambda e: (min(e[0], e[1]), max(e[0], e[1]))):
        a, b = (u, v) if u < v else (v, u)
        out.append(f"e {a} {b} {format_rational(w)}")
    return "\n".join(out) + "\n"


def write_instance(inst, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_instance(inst))
