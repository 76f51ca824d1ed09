"""Finite-sequence and finite-map primitives.

Sequences are plain tuples and maps are plain dicts; every operation
returns a fresh value and never mutates its arguments.  These are the
small combinators the scheduler state updates are written in terms of:
head/tail/element-set/concatenation for sequences, and empty map,
singleton map (maplet), right-biased override, and domain subtraction
for maps.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence, TypeVar

T = TypeVar("T")
K = TypeVar("K", bound=Hashable)
V = TypeVar("V")


def seq_hd(u: Sequence[T]) -> T:
    """First element of a non-empty sequence."""
    if not u:
        raise ValueError("hd of empty sequence")
    return u[0]


def seq_tl(u: Sequence[T]) -> tuple[T, ...]:
    """All but the first element of a non-empty sequence."""
    if not u:
        raise ValueError("tl of empty sequence")
    return tuple(u[1:])


def seq_elems(u: Sequence[T]) -> frozenset[T]:
    """The set of elements occurring in ``u``."""
    return frozenset(u)


def seq_concat(u: Sequence[T], v: Sequence[T]) -> tuple[T, ...]:
    return tuple(u) + tuple(v)


def map_empty() -> dict:
    return {}


def maplet(d: K, e: V) -> dict[K, V]:
    """The map defined exactly at ``d``, with value ``e``."""
    return {d: e}


def map_override(f: Mapping[K, V], g: Mapping[K, V]) -> dict[K, V]:
    """Union of ``f`` and ``g``; where both are defined, ``g`` wins."""
    out = dict(f)
    out.update(g)
    return out


def map_domain_subtract(f: Mapping[K, V], keys: Iterable[K]) -> dict[K, V]:
    """Restrict ``f`` to the keys not in ``keys``."""
    drop = set(keys)
    return {k: v for k, v in f.items() if k not in drop}
