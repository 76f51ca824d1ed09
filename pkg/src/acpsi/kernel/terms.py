"""Process terms.

The term language has the constants ``delta`` (inaction) and ``eps``
(successful termination), action constants, alternative / sequential /
parallel composition, left merge, communication merge, encapsulation,
recursion constants over guarded recursive specifications, and the two
interleaving operators:

* ``Si(h, s, args)`` interleaves ``args`` under the active strategy,
  after history ``h`` in control state ``s``;
* ``PosSi(i, h, s, args)`` is the positional variant that forces the
  turn to argument ``i`` regardless of the scheduler.  It only exists
  to axiomatize ``Si`` and for testing.

All nodes are immutable and hashable.  Control states are opaque to the
kernel: any hashable value a strategy owns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

from ..errors import IllFormedHistory
from .hist import Hist, hist_is_wellformed


@dataclass(frozen=True, slots=True)
class Delta:
    def __repr__(self) -> str:
        return "delta"


@dataclass(frozen=True, slots=True)
class Epsilon:
    def __repr__(self) -> str:
        return "eps"


@dataclass(frozen=True, slots=True)
class Act:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("action name must be nonempty")

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Alt:
    left: "Term"
    right: "Term"

    def __repr__(self) -> str:
        return f"({self.left!r} + {self.right!r})"


@dataclass(frozen=True, slots=True)
class Seq:
    left: "Term"
    right: "Term"

    def __repr__(self) -> str:
        return f"({self.left!r} . {self.right!r})"


@dataclass(frozen=True, slots=True)
class Par:
    left: "Term"
    right: "Term"

    def __repr__(self) -> str:
        return f"({self.left!r} || {self.right!r})"


@dataclass(frozen=True, slots=True)
class LeftMerge:
    left: "Term"
    right: "Term"

    def __repr__(self) -> str:
        return f"({self.left!r} |_ {self.right!r})"


@dataclass(frozen=True, slots=True)
class CommMerge:
    left: "Term"
    right: "Term"

    def __repr__(self) -> str:
        return f"({self.left!r} | {self.right!r})"


@dataclass(frozen=True, slots=True)
class Encap:
    blocked: frozenset[str]
    body: "Term"

    def __repr__(self) -> str:
        names = ",".join(sorted(self.blocked))
        return f"encap{{{names}}}({self.body!r})"


@dataclass(frozen=True, slots=True)
class RecSpec:
    """A finite set of equations ``X = t`` with pairwise distinct variables.

    Equation bodies may mention the specification's own variables freely;
    any other free variable is rejected.  Guardedness is *not* enforced
    here (it needs rewriting; see ``check_guarded``), only checked lazily
    by the semantics.
    """

    equations: tuple[tuple[str, "Term"], ...]

    def __post_init__(self) -> None:
        names = [v for v, _ in self.equations]
        if not names:
            raise ValueError("recursive specification needs at least one equation")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate equation variables: {names}")
        own = frozenset(names)
        for v, body in self.equations:
            loose = free_vars(body) - own
            if loose:
                raise ValueError(
                    f"equation for {v} uses variables not defined in the "
                    f"specification: {sorted(loose)}")

    @classmethod
    def of(cls, equations: Mapping[str, "Term"]) -> "RecSpec":
        return cls(tuple(sorted(equations.items())))

    @property
    def vars(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.equations)

    def body(self, var: str) -> "Term":
        for v, t in self.equations:
            if v == var:
                return t
        raise KeyError(var)

    def __repr__(self) -> str:
        eqs = "; ".join(f"{v} = {t!r}" for v, t in self.equations)
        return f"{{{eqs}}}"


@dataclass(frozen=True, slots=True)
class RecConst:
    """The constant denoting the (unique) solution of ``spec`` for ``var``."""

    var: str
    spec: RecSpec

    def __post_init__(self) -> None:
        if self.var not in self.spec.vars:
            raise ValueError(f"{self.var} is not defined by the specification")

    def __repr__(self) -> str:
        return f"<{self.var}|{self.spec!r}>"


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Si:
    """Strategy-driven interleaving of ``args`` after history ``hist``."""

    hist: Hist
    state: Any
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("interleaving operator needs at least one argument")
        if __debug__ and not hist_is_wellformed(self.hist):
            raise IllFormedHistory(f"ill-formed history in term: {self.hist!r}")

    @property
    def n(self) -> int:
        return len(self.args)

    def __repr__(self) -> str:
        inner = ", ".join(repr(a) for a in self.args)
        return f"si[{self.n}; {self.hist}; {self.state!r}]({inner})"


@dataclass(frozen=True, slots=True)
class PosSi:
    """Positional interleaving: the turn is pinned to argument ``index``."""

    index: int
    hist: Hist
    state: Any
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("interleaving operator needs at least one argument")
        if not 1 <= self.index <= len(self.args):
            raise ValueError(
                f"position {self.index} out of range for {len(self.args)} arguments")
        if __debug__ and not hist_is_wellformed(self.hist):
            raise IllFormedHistory(f"ill-formed history in term: {self.hist!r}")

    @property
    def n(self) -> int:
        return len(self.args)

    def __repr__(self) -> str:
        inner = ", ".join(repr(a) for a in self.args)
        return f"pos[{self.n}; {self.index}; {self.hist}; {self.state!r}]({inner})"


Term = (Delta | Epsilon | Act | Alt | Seq | Par | LeftMerge | CommMerge
        | Encap | Si | PosSi | RecConst | Var)

DELTA = Delta()
EPSILON = Epsilon()


# ---------------------------------------------------------------------------
# Structural queries

def free_vars(t: Term) -> frozenset[str]:
    """Free variables of ``t``.  Recursion constants bind their spec's
    variables, so they contribute nothing."""
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, (Delta, Epsilon, Act, RecConst)):
        return frozenset()
    if isinstance(t, (Alt, Seq, Par, LeftMerge, CommMerge)):
        return free_vars(t.left) | free_vars(t.right)
    if isinstance(t, Encap):
        return free_vars(t.body)
    if isinstance(t, (Si, PosSi)):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= free_vars(a)
        return out
    raise TypeError(f"not a term: {t!r}")


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def substitute(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace free occurrences of variables by terms.

    Recursion constants are closed, so substitution never descends into
    their specifications.
    """
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, (Delta, Epsilon, Act, RecConst)):
        return t
    if isinstance(t, Alt):
        return Alt(substitute(t.left, mapping), substitute(t.right, mapping))
    if isinstance(t, Seq):
        return Seq(substitute(t.left, mapping), substitute(t.right, mapping))
    if isinstance(t, Par):
        return Par(substitute(t.left, mapping), substitute(t.right, mapping))
    if isinstance(t, LeftMerge):
        return LeftMerge(substitute(t.left, mapping), substitute(t.right, mapping))
    if isinstance(t, CommMerge):
        return CommMerge(substitute(t.left, mapping), substitute(t.right, mapping))
    if isinstance(t, Encap):
        return Encap(t.blocked, substitute(t.body, mapping))
    if isinstance(t, Si):
        return Si(t.hist, t.state, tuple(substitute(a, mapping) for a in t.args))
    if isinstance(t, PosSi):
        return PosSi(t.index, t.hist, t.state,
                     tuple(substitute(a, mapping) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def subterms(t: Term) -> Iterator[Term]:
    """All subterms of ``t``, including ``t``, not descending into specs."""
    yield t
    if isinstance(t, (Alt, Seq, Par, LeftMerge, CommMerge)):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, Encap):
        yield from subterms(t.body)
    elif isinstance(t, (Si, PosSi)):
        for a in t.args:
            yield from subterms(a)


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def action_names(t: Term, *, include_specs: bool = True) -> frozenset[str]:
    """Every action name occurring in ``t`` (optionally inside rec specs too)."""
    out: set[str] = set()
    stack: list[Term] = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Act):
            out.add(u.name)
        elif isinstance(u, (Alt, Seq, Par, LeftMerge, CommMerge)):
            stack.append(u.left)
            stack.append(u.right)
        elif isinstance(u, Encap):
            stack.append(u.body)
        elif isinstance(u, (Si, PosSi)):
            stack.extend(u.args)
        elif isinstance(u, RecConst) and include_specs:
            stack.extend(body for _, body in u.spec.equations)
    return frozenset(out)


def is_basic(t: Term) -> bool:
    """True iff ``t`` uses only inaction, termination, actions, + and ``.``."""
    if isinstance(t, (Delta, Epsilon, Act)):
        return True
    if isinstance(t, (Alt, Seq)):
        return is_basic(t.left) and is_basic(t.right)
    return False


# ---------------------------------------------------------------------------
# Syntactic order and ACI normalization

_STATE_KEY_FALLBACK = ("opaque",)


def _state_sort_key(state: Any) -> tuple:
    sk = getattr(state, "sort_key", None)
    if callable(sk):
        return sk()
    return (_STATE_KEY_FALLBACK[0], type(state).__name__, repr(state))


def term_sort_key(t: Term) -> tuple:
    """A total syntactic order on terms, as nested comparable tuples."""
    if isinstance(t, Delta):
        return ("0delta",)
    if isinstance(t, Epsilon):
        return ("1eps",)
    if isinstance(t, Act):
        return ("2act", t.name)
    if isinstance(t, Seq):
        return ("3seq", term_sort_key(t.left), term_sort_key(t.right))
    if isinstance(t, Alt):
        return ("4alt", term_sort_key(t.left), term_sort_key(t.right))
    if isinstance(t, Par):
        return ("5par", term_sort_key(t.left), term_sort_key(t.right))
    if isinstance(t, LeftMerge):
        return ("6lm", term_sort_key(t.left), term_sort_key(t.right))
    if isinstance(t, CommMerge):
        return ("7cm", term_sort_key(t.left), term_sort_key(t.right))
    if isinstance(t, Encap):
        return ("8encap", tuple(sorted(t.blocked)), term_sort_key(t.body))
    if isinstance(t, Si):
        return ("9si", len(t.args), t.hist, _state_sort_key(t.state),
                tuple(term_sort_key(a) for a in t.args))
    if isinstance(t, PosSi):
        return ("9pos", len(t.args), t.index, t.hist, _state_sort_key(t.state),
                tuple(term_sort_key(a) for a in t.args))
    if isinstance(t, RecConst):
        return ("Arec", t.var,
                tuple((v, term_sort_key(b)) for v, b in t.spec.equations))
    if isinstance(t, Var):
        return ("Bvar", t.name)
    raise TypeError(f"not a term: {t!r}")


def _flatten_alt(t: Term, out: list[Term]) -> None:
    if isinstance(t, Alt):
        _flatten_alt(t.left, out)
        _flatten_alt(t.right, out)
    else:
        out.append(t)


def alt_of(summands: list[Term]) -> Term:
    """Left-associated alternative of ``summands``; empty list means delta."""
    if not summands:
        return DELTA
    out = summands[0]
    for s in summands[1:]:
        out = Alt(out, s)
    return out


def canonical_term(t: Term) -> Term:
    """Normalize alternative composition for state identification.

    Summands are flattened, normalized recursively, sorted by the total
    syntactic order, deduplicated, and delta summands dropped (unless the
    whole term is delta).  Nothing else is rewritten; in particular
    sequential units are kept as written.
    """
    if isinstance(t, (Delta, Epsilon, Act, Var, RecConst)):
        return t
    if isinstance(t, Alt):
        raw: list[Term] = []
        _flatten_alt(t, raw)
        summands = [canonical_term(s) for s in raw]
        keep = [s for s in summands if not isinstance(s, Delta)]
        if not keep:
            return DELTA
        uniq = sorted(set(keep), key=term_sort_key)
        return alt_of(uniq)
    if isinstance(t, Seq):
        return Seq(canonical_term(t.left), canonical_term(t.right))
    if isinstance(t, Par):
        return Par(canonical_term(t.left), canonical_term(t.right))
    if isinstance(t, LeftMerge):
        return LeftMerge(canonical_term(t.left), canonical_term(t.right))
    if isinstance(t, CommMerge):
        return CommMerge(canonical_term(t.left), canonical_term(t.right))
    if isinstance(t, Encap):
        return Encap(t.blocked, canonical_term(t.body))
    if isinstance(t, Si):
        return Si(t.hist, t.state, tuple(canonical_term(a) for a in t.args))
    if isinstance(t, PosSi):
        return PosSi(t.index, t.hist, t.state,
                     tuple(canonical_term(a) for a in t.args))
    raise TypeError(f"not a term: {t!r}")
