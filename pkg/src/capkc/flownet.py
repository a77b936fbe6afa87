"""Exact max-flow (Dinic) over rational or integer capacities.

Every capacity and flow value is exact (int, Fraction, or gmpy2.mpq); no
floating point.  Deterministic: arcs are scanned in insertion order, so two
runs on identically built networks produce identical flows.

Termination does not depend on capacities being integral: Dinic runs at most
V phases and each blocking flow saturates at least one arc per augmenting
path, giving at most E paths per phase.
"""

from __future__ import annotations

from collections import deque

from .errors import PipelineError


class MaxFlowNetwork:
    def __init__(self, node_count):
        self.node_count = node_count
        self.to = []
        self.cap = []
        self.orig = []
        self.adj = [[] for _ in range(node_count)]

    def add_edge(self, u, v, capacity):
        """Directed arc u -> v.  Returns the arc id usable with flow_on."""
        if capacity < 0:
            raise PipelineError(f"negative capacity on arc ({u},{v})")
        a = len(self.to)
        self.to.append(v)
        self.cap.append(capacity)
        self.orig.append(capacity)
        self.adj[u].append(a)
        self.to.append(u)
        self.cap.append(0)
        self.orig.append(0)
        self.adj[v].append(a + 1)
        return a

    def flow_on(self, arc):
        return self.orig[arc] - self.cap[arc]

    def _levels(self, s, t):
        level = [-1] * self.node_count
        level[s] = 0
        q = deque([s])
        cap = self.cap
        to = self.to
        while q:
            u = q.popleft()
            lu = level[u]
            for a in self.adj[u]:
                w = to[a]
                if level[w] < 0 and cap[a] > 0:
                    level[w] = lu + 1
                    q.append(w)
        return level if level[t] >= 0 else None

    def max_flow(self, s, t):
        if s == t:
            raise PipelineError("source equals sink")
        total = 0
        cap = self.cap
        to = self.to
        adj = self.adj
        while True:
            level = self._levels(s, t)
            if level is None:
                return total
            it = [0] * self.node_count
            # iterative blocking flow: walk forward along the level graph,
            # retreat marks dead vertices, augment restarts from s
            path = []  # arc ids along the current partial path
            u = s
            while True:
                if u == t:
                    bottleneck = None
                    for a in path:
                        if bottleneck is None or cap[a] < bottleneck:
                            bottleneck = cap[a]
                    for a in path:
                        cap[a] -= bottleneck
                        cap[a ^ 1] += bottleneck
                    total += bottleneck
                    path = []
                    u = s
                    continue
                arcs = adj[u]
                advanced = False
                while it[u] < len(arcs):
                    a = arcs[it[u]]
                    w = to[a]
                    if cap[a] > 0 and level[w] == level[u] + 1:
                        path.append(a)
                        u = w
                        advanced = True
                        break
                    it[u] += 1
                if advanced:
                    continue
                if u == s:
                    break  # phase exhausted
                level[u] = -1
                a = path.pop()
                u = to[a ^ 1]
                it[u] += 1

    def source_side_cut(self, s):
        """Vertices reachable from s in the residual network (call after max_flow)."""
        seen = [False] * self.node_count
        seen[s] = True
        q = deque([s])
        cap = self.cap
        to = self.to
        while q:
            u = q.popleft()
            for a in self.adj[u]:
                w = to[a]
                if not seen[w] and cap[a] > 0:
                    seen[w] = True
                    q.append(w)
        return {v for v in range(self.node_count) if seen[v]}
