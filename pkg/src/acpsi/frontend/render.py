"""Pretty-printing of terms and serialization of transition systems.

``render_term`` is a parse inverse: feeding its output back through the
parser reconstructs the same tree.  The JSON shape for transition systems
is ``{"init": ..., "states": [{"id", "terminating", "truncated"}, ...],
"edges": [{"from", "label", "to"}, ...]}`` and round-trips through
``import_lts_json`` (modulo the state terms, which serialization drops).
"""

from __future__ import annotations

import json
from typing import Any

from ..kernel.terms import (Act, Alt, CommMerge, Delta, Encap, Epsilon,
                            LeftMerge, Par, PosSi, RecConst, Seq, Si, Term,
                            Var)
from ..sos import Lts
from ..strategy.base import UnitState
from ..strategy.semaphore import SemState

_ALT, _MERGE, _SEQ, _ATOM = 0, 1, 2, 3

_MERGE_SYMBOL = {Par: "||", LeftMerge: "|_", CommMerge: "|"}


def _render_state(state: Any) -> str:
    if isinstance(state, UnitState):
        return "init"
    if isinstance(state, SemState):
        inner = ", ".join(f"{r}:[{','.join(str(i) for i in q)}]"
                          for r, q in state.entries)
        return "{" + inner + "}"
    raise ValueError(f"no literal syntax for control state {state!r}")


def _render_hist(h) -> str:
    return ", ".join(f"({i},{n})" for i, n in h)


def render_term(t: Term) -> str:
    """Concrete syntax for ``t``; parses back to the same tree."""
    return _render(t, _ALT)


def _render(t: Term, min_level: int) -> str:
    if isinstance(t, Delta):
        return "delta"
    if isinstance(t, Epsilon):
        return "eps"
    if isinstance(t, (Act, Var)):
        return t.name
    if isinstance(t, Alt):
        body = f"{_render(t.left, _ALT)} + {_render(t.right, _MERGE)}"
        return f"({body})" if min_level > _ALT else body
    if isinstance(t, (Par, LeftMerge, CommMerge)):
        op = _MERGE_SYMBOL[type(t)]
        body = f"{_render(t.left, _SEQ)} {op} {_render(t.right, _SEQ)}"
        return f"({body})" if min_level > _MERGE else body
    if isinstance(t, Seq):
        body = f"{_render(t.left, _ATOM)} . {_render(t.right, _SEQ)}"
        return f"({body})" if min_level > _SEQ else body
    if isinstance(t, Encap):
        names = ",".join(sorted(t.blocked))
        return f"encap{{{names}}}({_render(t.body, _ALT)})"
    if isinstance(t, Si):
        args = ", ".join(_render(a, _ALT) for a in t.args)
        return (f"si[{t.n}; {_render_hist(t.hist)}; "
                f"{_render_state(t.state)}]({args})")
    if isinstance(t, PosSi):
        args = ", ".join(_render(a, _ALT) for a in t.args)
        return (f"pos[{t.n}; {t.index}; {_render_hist(t.hist)}; "
                f"{_render_state(t.state)}]({args})")
    if isinstance(t, RecConst):
        eqs = "; ".join(f"{v} = {_render(body, _ALT)}"
                        for v, body in t.spec.equations)
        return f"rec {t.var} {{ {eqs} }} {t.var}"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Transition-system serialization

def export_lts(lts: Lts, format: str = "json") -> bytes:
    if format == "json":
        return _export_json(lts)
    if format == "dot":
        return _export_dot(lts)
    raise ValueError(f"unknown export format: {format!r}")


def _export_json(lts: Lts) -> bytes:
    doc = {
        "init": lts.init,
        "states": [{"id": q,
                    "terminating": q in lts.terminating,
                    "truncated": q in lts.truncated}
                   for q in sorted(lts.states)],
        "edges": [{"from": src, "label": label, "to": dst}
                  for src, label, dst in lts.edges],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def import_lts_json(data: bytes | str) -> Lts:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    doc = json.loads(data)
    states = frozenset(s["id"] for s in doc["states"])
    return Lts(
        init=doc["init"],
        states=states,
        edges=tuple((e["from"], e["label"], e["to"]) for e in doc["edges"]),
        terminating=frozenset(s["id"] for s in doc["states"] if s["terminating"]),
        truncated=frozenset(s["id"] for s in doc["states"] if s["truncated"]),
        state_term=None,
    )


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _export_dot(lts: Lts) -> bytes:
    lines = ["digraph lts {", "  rankdir=LR;",
             "  __init [shape=point, label=\"\"];",
             f"  __init -> q{lts.init};"]
    for q in sorted(lts.states):
        shape = "doublecircle" if q in lts.terminating else "circle"
        style = ", style=dashed" if q in lts.truncated else ""
        lines.append(f"  q{q} [shape={shape}, label={_dot_quote(str(q))}{style}];")
    for src, label, dst in lts.edges:
        lines.append(f"  q{src} -> q{dst} [label={_dot_quote(label)}];")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")
