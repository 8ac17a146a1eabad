"""The quiver text format: one declaration per line, diff-friendly.

``# ...`` comments, ``v <id>`` declares a vertex, ``a <id> <tail> <head>``
an arrow, and optional ``w <vertex> <int>`` lines a weight (which must sum
to zero; without any the canonical weight is used downstream).
"""

from __future__ import annotations

from .quiver import Arrow, Quiver, QuiverStructureError


class QuiverInputError(ValueError):
    """Malformed quiver file; message carries the offending line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_quiver(text: str):
    """Parse the text format; returns (quiver, weight or None)."""
    vertices = []
    arrows = []
    weight = {}
    saw_weight = False
    seen_v = set()
    seen_a = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "v":
            if len(parts) != 2:
                raise QuiverInputError(line_no, "expected 'v <id>'")
            if parts[1] in seen_v:
                raise QuiverInputError(line_no, f"duplicate vertex id {parts[1]!r}")
            seen_v.add(parts[1])
            vertices.append(parts[1])
        elif kind == "a":
            if len(parts) != 4:
                raise QuiverInputError(line_no, "expected 'a <id> <tail> <head>'")
            name, tail, head = parts[1:]
            if name in seen_a:
                raise QuiverInputError(line_no, f"duplicate arrow id {name!r}")
            seen_a.add(name)
            for ref in (tail, head):
                if ref not in seen_v:
                    raise QuiverInputError(line_no, f"unknown vertex {ref!r}")
            arrows.append(Arrow(name, tail, head))
        elif kind == "w":
            if len(parts) != 3:
                raise QuiverInputError(line_no, "expected 'w <vertex> <int>'")
            if parts[1] not in seen_v:
                raise QuiverInputError(line_no, f"unknown vertex {parts[1]!r}")
            try:
                weight[parts[1]] = int(parts[2])
            except ValueError:
                raise QuiverInputError(line_no, f"weight {parts[2]!r} is not an integer")
            saw_weight = True
        else:
            raise QuiverInputError(line_no, f"unknown directive {kind!r}")
    if not vertices:
        raise QuiverInputError(0, "no vertices declared")
    try:
        q = Quiver(tuple(vertices), tuple(arrows))
    except QuiverStructureError as exc:
        raise QuiverInputError(0, str(exc))
    if not saw_weight:
        return q, None
    full = {v: weight.get(v, 0) for v in vertices}
    if sum(full.values()) != 0:
        raise QuiverInputError(0, "weight does not sum to zero")
    return q, full


def serialize_quiver(q: Quiver, weight=None) -> str:
    lines = [f"v {v}" for v in q.vertices]
    lines += [f"a {a.name} {a.tail} {a.head}" for a in q.arrows]
    if weight is not None:
        lines += [f"w {v} {weight[v]}" for v in q.vertices if weight[v] != 0]
    return "\n".join(lines) + "\n"
