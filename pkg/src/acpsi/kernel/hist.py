"""Interleaving histories.

A history is a finite sequence of ``(i, n)`` pairs: in each interleaving
step process ``i`` got the turn, and after its turn ``n`` processes
remained.  Well-formedness rules:

* the empty sequence is a history;
* a first pair ``(i, n)`` needs ``1 <= i <= n``;
* after a pair ``(i, n)``, a pair ``(j, m)`` needs ``1 <= j <= n`` and
  ``n - 1 <= m <= n + 1`` (one process may terminate or be created per
  step).
"""

from __future__ import annotations

from typing import Sequence

from ..errors import IllFormedHistory

Hist = tuple[tuple[int, int], ...]

EMPTY_HIST: Hist = ()


def _ok_first(i: int, n: int) -> bool:
    return 1 <= i <= n


def _ok_after(prev: tuple[int, int], j: int, m: int) -> bool:
    _, n = prev
    return 1 <= j <= n and m >= 1 and n - 1 <= m <= n + 1


def hist_is_wellformed(pairs: Sequence[Sequence[int]]) -> bool:
    """True iff ``pairs`` satisfies the three history-formation rules."""
    prev: tuple[int, int] | None = None
    for p in pairs:
        if len(p) != 2:
            return False
        i, n = p
        if not (isinstance(i, int) and isinstance(n, int)):
            return False
        if prev is None:
            if not _ok_first(i, n):
                return False
        else:
            if not _ok_after(prev, i, n):
                return False
        prev = (i, n)
    return True


def hist_extend(h: Hist, i: int, n: int) -> Hist:
    """Append ``(i, n)``; raises if the result would be ill-formed.

    Only the new pair is checked, so extension is O(1); ``h`` itself is
    assumed well-formed (term constructors enforce that).
    """
    if not h:
        if not _ok_first(i, n):
            raise IllFormedHistory(f"({i},{n}) is not a legal first history pair")
    elif not _ok_after(h[-1], i, n):
        raise IllFormedHistory(
            f"({i},{n}) cannot follow {h[-1]} in an interleaving history")
    return h + ((i, n),)


def mk_hist(pairs: Sequence[Sequence[int]]) -> Hist:
    """Validate and freeze a history given as any sequence of pairs."""
    if not hist_is_wellformed(pairs):
        raise IllFormedHistory(f"ill-formed interleaving history: {list(pairs)!r}")
    return tuple((int(i), int(n)) for i, n in pairs)
