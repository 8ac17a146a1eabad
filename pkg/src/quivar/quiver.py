"""Quiver data model, weights and stability.

A quiver is a finite directed multigraph; loops and parallel arrows are
allowed.  Subquivers always keep the full vertex set, so they are just arrow
subsets.  Stability of a subquiver with respect to an integral weight is
decided two ways: by brute force over successor-closed vertex sets, and by
a max-weight-closure reduction; the closure solver is the production path
and the brute-force variant is kept as a test oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .flows import feasible_flow, max_closure


class QuiverStructureError(ValueError):
    """Input quiver violates a structural precondition."""


@dataclass(frozen=True)
class Arrow:
    name: str
    tail: str
    head: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise QuiverStructureError("duplicate vertex ids")
        names = set()
        for a in self.arrows:
            if a.name in names:
                raise QuiverStructureError(f"duplicate arrow id {a.name!r}")
            names.add(a.name)
            if a.tail not in vs or a.head not in vs:
                raise QuiverStructureError(
                    f"arrow {a.name!r} references unknown vertex")

    # -- basic accessors ----------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_arrows(self):
        return len(self.arrows)

    def arrow(self, name):
        return self._arrow_map()[name]

    @lru_cache(maxsize=None)
    def _arrow_map(self):
        return {a.name: a for a in self.arrows}

    def arrow_names(self):
        return tuple(a.name for a in self.arrows)

    def out_arrows(self, v):
        return [a for a in self.arrows if a.tail == v]

    def in_arrows(self, v):
        return [a for a in self.arrows if a.head == v]

    def sub(self, arrow_names) -> "Subquiver":
        return Subquiver(self, frozenset(arrow_names))

    def full(self) -> "Subquiver":
        return Subquiver(self, frozenset(a.name for a in self.arrows))

    def without(self, arrow_names) -> "Subquiver":
        drop = set(arrow_names)
        return Subquiver(self, frozenset(a.name for a in self.arrows
                                         if a.name not in drop))

    def delete_vertex_arrows(self, v) -> "Subquiver":
        """Subquiver keeping all arrows not incident to v (v stays isolated)."""
        return Subquiver(self, frozenset(a.name for a in self.arrows
                                         if v not in (a.tail, a.head)))

    # -- derived data ---------------------------------------------------------

    def incidence(self):
        """Vertex x arrow matrix: +1 at the tail, -1 at the head, loops are 0."""
        vi = {v: i for i, v in enumerate(self.vertices)}
        m = [[0] * len(self.arrows) for _ in self.vertices]
        for j, a in enumerate(self.arrows):
            if a.tail != a.head:
                m[vi[a.tail]][j] += 1
                m[vi[a.head]][j] -= 1
        return m

    def canonical_weight(self):
        w = {v: 0 for v in self.vertices}
        for a in self.arrows:
            if a.tail != a.head:
                w[a.tail] += 1
                w[a.head] -= 1
        return w

    def zero_weight(self):
        return {v: 0 for v in self.vertices}

    def divergence(self, flow):
        """Net outflow per vertex of an arrow-indexed flow dict."""
        d = {v: 0 for v in self.vertices}
        for name, val in flow.items():
            a = self.arrow(name)
            if a.tail != a.head:
                d[a.tail] += val
                d[a.head] -= val
        return d

    def has_oriented_cycles(self) -> bool:
        succ = {v: [] for v in self.vertices}
        for a in self.arrows:
            if a.tail == a.head:
                return True
            succ[a.tail].append(a.head)
        color = {v: 0 for v in self.vertices}

        for root in self.vertices:
            if color[root]:
                continue
            stack = [(root, iter(succ[root]))]
            color[root] = 1
            while stack:
                v, it = stack[-1]
                adv = next(it, None)
                if adv is None:
                    color[v] = 2
                    stack.pop()
                elif color[adv] == 1:
                    return True
                elif color[adv] == 0:
                    color[adv] = 1
                    stack.append((adv, iter(succ[adv])))
        return False

    def topological_order(self):
        if self.has_oriented_cycles():
            raise QuiverStructureError("quiver has oriented cycles")
        indeg = {v: 0 for v in self.vertices}
        for a in self.arrows:
            indeg[a.head] += 1
        order = [v for v in self.vertices if indeg[v] == 0]
        seen = 0
        while seen < len(order):
            v = order[seen]
            seen += 1
            for a in self.out_arrows(v):
                indeg[a.head] -= 1
                if indeg[a.head] == 0:
                    order.append(a.head)
        return order


@dataclass(frozen=True)
class Subquiver:
    """An arrow subset of a quiver; the vertex set is always the full one."""

    quiver: Quiver
    arrows: frozenset

    def __post_init__(self):
        known = set(self.quiver.arrow_names())
        if not self.arrows <= known:
            raise QuiverStructureError("subquiver arrow not in parent quiver")

    def arrow_objs(self):
        return [a for a in self.quiver.arrows if a.name in self.arrows]

    def components(self):
        """Connected components on the full vertex set, singletons included."""
        parent = {v: v for v in self.quiver.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in self.arrow_objs():
            ra, rb = find(a.tail), find(a.head)
            if ra != rb:
                parent[ra] = rb
        comps = {}
        for v in self.quiver.vertices:
            comps.setdefault(find(v), []).append(v)
        return [tuple(c) for c in comps.values()]

    def is_forest(self) -> bool:
        return len(self.arrows) == self.quiver.n_vertices - len(self.components())

    def restrict_weight(self, theta, comp):
        return sum(theta[v] for v in comp)


def weight_tuple(q: Quiver, theta) -> tuple:
    return tuple(theta[v] for v in q.vertices)


def check_weight(q: Quiver, theta):
    if set(theta) != set(q.vertices):
        raise QuiverStructureError("weight must assign a value to every vertex")
    if sum(theta.values()) != 0:
        raise QuiverStructureError("weight does not sum to zero")


# ---------------------------------------------------------------------------
# stability

def closed_sets(sub: Subquiver):
    """All nonempty proper subsets of the vertices closed under successors.

    Brute force; only for small quivers (<= 20 vertices).
    """
    q = sub.quiver
    n = q.n_vertices
    if n > 20:
        raise QuiverStructureError("brute-force closed-set search capped at 20 vertices")
    vi = {v: i for i, v in enumerate(q.vertices)}
    arcs = [(vi[a.tail], vi[a.head]) for a in sub.arrow_objs() if a.tail != a.head]
    for mask in range(1, (1 << n) - 1):
        if all(not (mask >> t) & 1 or (mask >> h) & 1 for t, h in arcs):
            yield frozenset(q.vertices[i] for i in range(n) if (mask >> i) & 1)


def _stability_bruteforce(sub: Subquiver, theta, strict: bool) -> bool:
    for s in closed_sets(sub):
        val = sum(theta[v] for v in s)
        if val > 0 or (strict and val == 0):
            return False
    return True


def _stability_closure(sub: Subquiver, theta, strict: bool) -> bool:
    q = sub.quiver
    arcs = [(a.tail, a.head) for a in sub.arrow_objs() if a.tail != a.head]
    reach = _reachability(q.vertices, arcs)
    for v in q.vertices:
        for u in q.vertices:
            if u == v or u in reach[v]:
                continue
            best = max_closure(q.vertices, arcs, theta, force_in=v, force_out=u)
            if best > 0 or (strict and best == 0):
                return False
    return True


def _reachability(vertices, arcs):
    succ = {v: set() for v in vertices}
    for t, h in arcs:
        succ[t].add(h)
    reach = {}
    for v in vertices:
        seen = set()
        stack = [v]
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        reach[v] = seen
    return reach


def is_stable(sub: Subquiver, theta, method: str = "closure") -> bool:
    """Every nonempty proper successor-closed vertex set has negative weight."""
    check_weight(sub.quiver, theta)
    if method == "closure":
        return _stability_closure(sub, theta, strict=True)
    if method == "bruteforce":
        return _stability_bruteforce(sub, theta, strict=True)
    raise ValueError(f"unknown method {method!r}")


def is_semistable(sub: Subquiver, theta, method: str = "flow") -> bool:
    """Like stability but with <= 0; equivalently the flow polytope is nonempty."""
    check_weight(sub.quiver, theta)
    if method == "flow":
        return _flow_feasible(sub, theta) is not None
    if method == "closure":
        return _stability_closure(sub, theta, strict=False)
    if method == "bruteforce":
        return _stability_bruteforce(sub, theta, strict=False)
    raise ValueError(f"unknown method {method!r}")


def _flow_feasible(sub: Subquiver, theta, lower_on=None):
    """Integral flow r >= 0 on the subquiver's arrows with divergence theta.

    ``lower_on`` forces r >= 1 on the named arrows.  Returns an arrow -> int
    dict or None.
    """
    q = sub.quiver
    arrows = sorted(sub.arrows)
    objs = [q.arrow(n) for n in arrows]
    arcs = [(a.tail, a.head) for a in objs]
    lower = [1 if lower_on and a in lower_on else 0 for a in arrows]
    sol = feasible_flow(q.vertices, arcs, theta, lower)
    if sol is None:
        return None
    return dict(zip(arrows, sol))


def arrow_supports_positive_flow(sub: Subquiver, theta, arrow_name) -> bool:
    a = sub.quiver.arrow(arrow_name)
    if a.tail == a.head:
        # a loop imposes no divergence, so it can carry flow iff anything can
        return _flow_feasible(sub, theta) is not None
    return _flow_feasible(sub, theta, lower_on={arrow_name}) is not None


def is_polystable(sub: Subquiver, theta, method: str = "components") -> bool:
    """Components have weight zero and are stable; equivalently a strictly
    positive flow with divergence theta exists on the subquiver."""
    check_weight(sub.quiver, theta)
    if method == "flow":
        base = _flow_feasible(sub, theta)
        if base is None:
            return False
        # only arrows the witness flow misses still need a probe
        return all(arrow_supports_positive_flow(sub, theta, a)
                   for a, v in base.items() if v == 0)
    if method != "components":
        raise ValueError(f"unknown method {method!r}")
    q = sub.quiver
    for comp in sub.components():
        if sum(theta[v] for v in comp) != 0:
            return False
        inner = [a for a in sub.arrow_objs()
                 if a.tail in comp and a.head in comp]
        comp_q = Quiver(tuple(comp), tuple(inner))
        comp_theta = {v: theta[v] for v in comp}
        if not is_stable(comp_q.full(), comp_theta):
            return False
    return True


def maximal_polystable(sub: Subquiver, theta) -> Subquiver:
    """Union of supports of all flows in the subquiver's flow polytope."""
    base = _flow_feasible(sub, theta)
    if base is None:
        raise QuiverStructureError(
            "subquiver is not semistable; no maximal polystable subquiver")
    keep = frozenset(a for a, v in base.items()
                     if v > 0 or arrow_supports_positive_flow(sub, theta, a))
    return Subquiver(sub.quiver, keep)


def is_tight(q: Quiver, theta) -> bool:
    """Removal of any single arrow leaves a stable quiver."""
    return all(is_stable(q.without({a.name}), theta) for a in q.arrows)


# ---------------------------------------------------------------------------
# contraction and tightening

def _merged_name(members):
    parts = []
    for m in members:
        parts.extend(m.split("+"))
    return "+".join(sorted(parts))


def contract(q: Quiver, sub: Subquiver, theta=None):
    """Contract the subquiver: vertices become its connected components,
    arrows are the complementary arrows.  Returns (quiver, vertex_map) or
    (quiver, vertex_map, pushed_weight) when a weight is supplied."""
    if sub.quiver != q:
        raise QuiverStructureError("subquiver belongs to a different quiver")
    comps = sub.components()
    vmap = {}
    names = []
    for comp in comps:
        name = comp[0] if len(comp) == 1 else _merged_name(comp)
        names.append(name)
        for v in comp:
            vmap[v] = name
    names.sort()
    arrows = tuple(Arrow(a.name, vmap[a.tail], vmap[a.head])
                   for a in q.arrows if a.name not in sub.arrows)
    gamma = Quiver(tuple(names), arrows)
    if theta is None:
        return gamma, vmap
    pushed = {n: 0 for n in names}
    for v, val in theta.items():
        pushed[vmap[v]] += val
    return gamma, vmap, pushed


def tighten(q: Quiver, theta):
    """Contract forced arrows until the weight is tight.

    Requires a connected, stable input; the flow polytope is unchanged up to
    a unimodular coordinate change.  Returns (quiver, arrow_map) where the
    map sends surviving arrow names of the input to arrow names of the
    output (contracted arrows are absent).
    """
    if len(q.full().components()) != 1:
        raise QuiverStructureError("tighten requires a connected quiver")
    if not is_stable(q.full(), theta):
        raise QuiverStructureError("tighten requires a stable quiver")
    cur, wt = q, dict(theta)
    while True:
        victim = None
        for a in cur.arrows:
            if a.tail == a.head:
                continue
            if not is_stable(cur.without({a.name}), wt):
                victim = a.name
                break
        if victim is None:
            break
        cur, _, wt = contract(cur, cur.sub({victim}), wt)
    amap = {a.name: a.name for a in cur.arrows}
    return cur, amap


# ---------------------------------------------------------------------------
# flag quivers

@dataclass(frozen=True)
class FlagData:
    source: str
    sinks: tuple
    m: int
    multiplicities: tuple


def is_flag_quiver(q: Quiver):
    """FlagData if the quiver is a flag quiver, else None.

    Use :func:`flag_violation` for the reason.
    """
    return None if flag_violation(q) else _flag_data(q)


def flag_violation(q: Quiver):
    if q.has_oriented_cycles():
        return "quiver has oriented cycles"
    sources = [v for v in q.vertices if not q.in_arrows(v)]
    if len(sources) != 1:
        return f"expected exactly one source, found {len(sources)}"
    theta = q.canonical_weight()
    sinks = [v for v in q.vertices if not q.out_arrows(v)]
    for s in sinks:
        if -theta[s] < 2:
            return f"sink {s!r} has multiplicity {-theta[s]} < 2"
    for v in q.vertices:
        if v not in sinks and v != sources[0] and theta[v] != 0:
            return f"inner vertex {v!r} has nonzero canonical weight"
    return None


def _flag_data(q: Quiver) -> FlagData:
    theta = q.canonical_weight()
    source = next(v for v in q.vertices if not q.in_arrows(v))
    sinks = tuple(v for v in q.vertices if not q.out_arrows(v))
    return FlagData(source, sinks, theta[source],
                    tuple(-theta[s] for s in sinks))


def require_tight_flag(q: Quiver) -> FlagData:
    reason = flag_violation(q)
    if reason:
        raise QuiverStructureError(f"not a flag quiver: {reason}")
    theta = q.canonical_weight()
    if not is_tight(q, theta):
        raise QuiverStructureError("flag quiver is not tight; tighten first")
    return _flag_data(q)


# ---------------------------------------------------------------------------
# generators

def gamma_perm(k: int, perm) -> Quiver:
    """Vertices 1..k mod k, arrows p -> p+1 and p -> perm(p)."""
    if sorted(perm) != list(range(1, k + 1)):
        raise QuiverStructureError("perm must be a bijection on 1..k")
    vs = tuple(str(p) for p in range(1, k + 1))
    arrows = []
    for p in range(1, k + 1):
        arrows.append(Arrow(f"b{p}", str(p), str(p % k + 1)))
    for p in range(1, k + 1):
        arrows.append(Arrow(f"g{p}", str(p), str(perm[p - 1])))
    return Quiver(vs, tuple(arrows))


def gamma_dbl(k: int) -> Quiver:
    return gamma_perm(k, [p % k + 1 for p in range(1, k + 1)])


def gamma_opp(k: int) -> Quiver:
    return gamma_perm(k, [(p - 2) % k + 1 for p in range(1, k + 1)])


def ladder_flag(*ns) -> Quiver:
    """Staircase ladder-box quiver with one source and len(ns)-1 sinks.

    Vertices are the interior lattice points of the staircase region under
    the diagonal squares of an (n x n) box, plus one vertex per boundary
    component; arrows point east and north.  Deterministic naming: source
    "p0", sinks "p1".."pl" numbered bottom-to-top, interior points "v{x}_{y}".
    """
    *n_list, n = ns
    if not n_list or any(a >= b for a, b in zip([0] + n_list, n_list + [n])):
        raise QuiverStructureError("ladder parameters must satisfy 0 < n1 < ... < n")
    l = len(n_list)
    heights = [0] + n_list  # n_0 = 0

    def top(x):
        return max(h for h in heights if h <= n - x)

    xmax = n - n_list[0]
    corners = {(n - nv, heights[i]): i + 1
               for i, nv in enumerate(n_list + [n])}

    def classify(x, y):
        if (x, y) in corners:
            i = corners[(x, y)]
            if i in (1, l + 1):
                return "p0"
            return f"v{x}_{y}"  # inner corner between two sinks
        if x == 0 or y == 0:
            return "p0"
        if y == top(x):
            # horizontal run of sink i with heights[i] == y
            return f"p{heights.index(y)}"
        for i, nv in enumerate(n_list, start=1):
            if x == n - nv and heights[i - 1] <= y <= heights[i]:
                return f"p{i}"
        return f"v{x}_{y}"

    points = [(x, y) for y in range(0, max(heights) + 1)
              for x in range(0, xmax + 1) if y <= top(x)]
    pset = set(points)
    arrows = []
    count = 0
    for (x, y) in points:
        src = classify(x, y)
        # east: the open segment stays inside iff y <= top(x + 1)
        for dx, dy in ((1, 0), (0, 1)):
            if (x + dx, y + dy) in pset:
                dst = classify(x + dx, y + dy)
                if dst != src:
                    count += 1
                    arrows.append(Arrow(f"a{count}", src, dst))
    names = []
    for (x, y) in points:
        nm = classify(x, y)
        if nm not in names:
            names.append(nm)
    order = sorted(names, key=lambda s: (s[0] != "p", s))
    return Quiver(tuple(order), tuple(arrows))


# ---------------------------------------------------------------------------
# isomorphism (small instances)

def quiver_isomorphic(q1: Quiver, q2: Quiver) -> bool:
    """Multigraph isomorphism by backtracking; fine at desk scale."""
    if q1.n_vertices != q2.n_vertices or q1.n_arrows != q2.n_arrows:
        return False

    def profile(q):
        mult = {}
        for a in q.arrows:
            mult[(a.tail, a.head)] = mult.get((a.tail, a.head), 0) + 1
        sig = {}
        for v in q.vertices:
            outs = sorted(c for (t, _), c in mult.items() if t == v)
            ins = sorted(c for (_, h), c in mult.items() if h == v)
            sig[v] = (tuple(outs), tuple(ins))
        return mult, sig

    m1, s1 = profile(q1)
    m2, s2 = profile(q2)
    if sorted(s1.values()) != sorted(s2.values()):
        return False
    verts1 = sorted(q1.vertices, key=lambda v: s1[v])
    cands = {v: [w for w in q2.vertices if s2[w] == s1[v]] for v in verts1}

    def extend(i, assign, used):
        if i == len(verts1):
            return True
        v = verts1[i]
        for w in cands[v]:
            if w in used:
                continue
            ok = True
            for u, wu in assign.items():
                if m1.get((v, u), 0) != m2.get((w, wu), 0) or \
                   m1.get((u, v), 0) != m2.get((wu, w), 0):
                    ok = False
                    break
            if ok and m1.get((v, v), 0) == m2.get((w, w), 0):
                assign[v] = w
                used.add(w)
                if extend(i + 1, assign, used):
                    return True
                del assign[v]
                used.discard(w)
        return False

    return extend(0, {}, set())


def is_opp_cycle(q: Quiver, k: int) -> bool:
    """Does the quiver look like the double k-cycle with reversed second lap
    (one arrow each way between cyclically consecutive vertices)?"""
    if q.n_vertices != k or q.n_arrows != 2 * k:
        return False
    if k == 1:
        return all(a.tail == a.head for a in q.arrows)
    mult = {}
    for a in q.arrows:
        if a.tail == a.head:
            return False
        mult[frozenset((a.tail, a.head))] = mult.get(frozenset((a.tail, a.head)), 0) + 1
        if sum(1 for b in q.arrows if b.tail == a.tail and b.head == a.head) != \
           sum(1 for b in q.arrows if b.tail == a.head and b.head == a.tail):
            return False
    if k == 2:
        return list(mult.values()) == [4]
    if any(c != 2 for c in mult.values()) or len(mult) != k:
        return False
    # the pairs must form a single undirected k-cycle
    adj = {v: [] for v in q.vertices}
    for pair in mult:
        a, b = tuple(pair)
        adj[a].append(b)
        adj[b].append(a)
    if any(len(nb) != 2 for nb in adj.values()):
        return False
    start = q.vertices[0]
    seen = {start}
    prev, cur = None, start
    for _ in range(k - 1):
        nxt = [w for w in adj[cur] if w != prev]
        if not nxt:
            return False
        prev, cur = cur, nxt[0]
        if cur in seen:
            return False
        seen.add(cur)
    return len(seen) == k and start in adj[cur]


def simple_oriented_cycles(q: Quiver):
    """Supports of the minimal nonnegative circulations: simple directed
    cycles (and loops), as primitive arrow-flow dicts."""
    cycles = []
    seen = set()
    loops = [a for a in q.arrows if a.tail == a.head]
    for a in loops:
        cycles.append({a.name: 1})
    plain = [a for a in q.arrows if a.tail != a.head]

    def dfs(start, v, path, used_vertices):
        for a in plain:
            if a.tail != v:
                continue
            if a.head == start:
                key = frozenset(x.name for x in path + [a])
                if key not in seen:
                    seen.add(key)
                    cycles.append({x.name: 1 for x in path + [a]})
            elif a.head not in used_vertices:
                dfs(start, a.head, path + [a], used_vertices | {a.head})

    for v in q.vertices:
        dfs(v, v, [], {v})
    # dedupe rotations via the frozenset key; drop supersets of smaller cycles
    uniq = {}
    for c in cycles:
        uniq[frozenset(c)] = c
    return [uniq[k] for k in sorted(uniq, key=lambda s: (len(s), sorted(s)))]
