"""Integer max-flow and the combinatorial solvers built on it.

Used for three things: deciding feasibility of nonnegative flows with a
prescribed divergence (which is semistability of a subquiver), deciding
whether a single arrow can carry positive flow (polystability, supports),
and maximizing a vertex weight over successor-closed vertex sets via the
max-weight closure reduction.  All capacities are Python ints, so every
answer is exact.
"""

from __future__ import annotations

from collections import deque


class MaxFlowNetwork:
    """Dinic's algorithm on a small directed network with int capacities."""

    def __init__(self, n):
        self.n = n
        self.adj = [[] for _ in range(n)]
        # edges stored flat: to, cap, index of reverse edge
        self.to = []
        self.cap = []

    def add_edge(self, u, v, cap):
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def _bfs(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if self.cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    dq.append(v)
        self.level = level
        return level[t] >= 0

    def _dfs(self, u, t, f):
        if u == t:
            return f
        while self.iter[u] < len(self.adj[u]):
            e = self.adj[u][self.iter[u]]
            v = self.to[e]
            if self.cap[e] > 0 and self.level[v] == self.level[u] + 1:
                d = self._dfs(v, t, min(f, self.cap[e]))
                if d > 0:
                    self.cap[e] -= d
                    self.cap[e ^ 1] += d
                    return d
            self.iter[u] += 1
        return 0

    def max_flow(self, s, t):
        total = 0
        while self._bfs(s, t):
            self.iter = [0] * self.n
            while True:
                f = self._dfs(s, t, 1 << 62)
                if f == 0:
                    break
                total += f
        return total

    def edge_flow(self, edge_index):
        # flow pushed through edge k equals the residual on its reverse
        return self.cap[2 * edge_index + 1]


def _index(vertices):
    return {v: i for i, v in enumerate(vertices)}


def feasible_flow(vertices, arcs, divergence, lower=None):
    """Integral r >= lower with sum_{a out of v} r_a - sum_{a into v} r_a = divergence(v).

    ``arcs`` is a list of (tail, head) pairs (loops allowed, they carry zero
    net divergence and get flow = lower bound).  Returns the list of arc
    flows, or None if infeasible.  ``divergence`` must sum to zero.
    """
    idx = _index(vertices)
    n = len(vertices)
    lower = lower or [0] * len(arcs)
    # substitute r = lower + r' and absorb lower bounds into the divergence
    div = [divergence[v] for v in vertices]
    for (t, h), lo in zip(arcs, lower):
        if lo:
            div[idx[t]] -= lo
            div[idx[h]] += lo
    big = sum(abs(x) for x in div) + 1
    net = MaxFlowNetwork(n + 2)
    s, t = n, n + 1
    need = 0
    arc_edges = []
    for (a, b) in arcs:
        if a == b:
            arc_edges.append(None)
        else:
            arc_edges.append(len(net.to) // 2)
            net.add_edge(idx[a], idx[b], big)
    for i, v in enumerate(vertices):
        if div[i] > 0:
            net.add_edge(s, i, div[i])
            need += div[i]
        elif div[i] < 0:
            net.add_edge(i, t, -div[i])
    if net.max_flow(s, t) < need:
        return None
    flows = []
    for k, e in enumerate(arc_edges):
        base = lower[k]
        flows.append(base if e is None else base + net.edge_flow(e))
    return flows


def max_closure(vertices, arcs, weight, force_in=None, force_out=None):
    """Maximum of sum(weight) over vertex sets closed under arc successors.

    The empty set (value 0) and the full set always count as closed; use
    ``force_in`` / ``force_out`` to restrict to sets containing one vertex
    and avoiding another.  Classic min-cut reduction.
    """
    idx = _index(vertices)
    w = [weight[v] for v in vertices]
    shift = sum(abs(x) for x in w) + 1
    if force_in is not None:
        w[idx[force_in]] += shift
    if force_out is not None:
        w[idx[force_out]] -= shift
    big = sum(abs(x) for x in w) + 1
    n = len(vertices)
    net = MaxFlowNetwork(n + 2)
    s, t = n, n + 1
    pos = 0
    for i in range(n):
        if w[i] > 0:
            net.add_edge(s, i, w[i])
            pos += w[i]
        elif w[i] < 0:
            net.add_edge(i, t, -w[i])
    for (a, b) in arcs:
        if a != b:
            net.add_edge(idx[a], idx[b], big)
    val = pos - net.max_flow(s, t)
    if force_in is not None:
        val -= shift
    return val
