"""Graphviz export of subgroup graphs: boxes for cosets, circles for factor classes."""
from __future__ import annotations

from .automaton import Automaton, bipartite_view


def _element_name(fp, a: int, x: int) -> str:
    return fp.format(((a, x),)) if x else "1"


def to_dot(A: Automaton, name: str = "H") -> str:
    fp = A.ambient
    view = bipartite_view(A)
    lines = [f'graph "{name}" {{']
    for p in view.primary:
        extra = ", peripheries=2" if p == A.base else ""
        lines.append(f'  p{p} [shape=box, label="{p}"{extra}];')
    for s, (a, members) in enumerate(view.secondary):
        lines.append(f'  s{s} [shape=circle, label="{fp.factors[a].name}"];')
    for p, s, label in view.edges:
        a = view.secondary[s][0]
        lines.append(f'  p{p} -- s{s} [label="{_element_name(fp, a, label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
