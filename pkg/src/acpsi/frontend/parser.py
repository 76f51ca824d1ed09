"""Concrete syntax for terms.

Grammar sketch (whitespace and ``#`` line comments are skipped)::

    term   := merge ('+' merge)*                       left-associative
    merge  := seqt (('||' | '|_' | '|') seqt)?         non-associative
    seqt   := atom ('.' seqt)?                         right-associative
    atom   := 'delta' | 'eps' | ACTION | '(' term ')'
            | 'encap' '{' names '}' '(' term ')'
            | 'si' '[' NUM ';' hist ';' state ']' '(' term {',' term} ')'
            | 'pos' '[' NUM ';' NUM ';' hist ';' state ']' '(' term {',' term} ')'
            | 'rec' NAME '{' NAME '=' term {';' NAME '=' term} '}' NAME
    hist   := [ '(' NUM ',' NUM ')' {',' '(' NUM ',' NUM ')'} ]
    state  := 'init' | '{' [ NAME ':' '[' nums ']' {',' ...} ] '}'

``.`` binds strongest, then the three merge operators and encapsulation,
then ``+``.  Merge operators must be parenthesized when nested.  An
ACTION is an identifier, optionally ending in ``~`` (a bar action).  All
actions must be declared by the system config.  The ``init`` state
literal denotes the active strategy's initial control state; ``{...}``
literals build semaphore states directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from ..errors import IllFormedHistory, ParseError
from ..kernel.config import SystemConfig
from ..kernel.hist import mk_hist
from ..kernel.terms import (Act, Alt, CommMerge, Delta, Encap, Epsilon,
                            LeftMerge, Par, PosSi, RecConst, RecSpec, Seq,
                            Si, Term, Var)
from ..strategy.base import StrategyInstance
from ..strategy.semaphore import SemState

KEYWORDS = frozenset({"delta", "eps", "encap", "si", "pos", "rec", "init"})

_TOKEN_RE = re.compile(r"""
      (?P<ws>\s+|\#[^\n]*)
    | (?P<name>[A-Za-z][A-Za-z0-9_]*~?)
    | (?P<num>\d+)
    | (?P<sym>\|\||\|_|[+.()\[\]{};,:=|])
""", re.VERBOSE)


@dataclass(frozen=True)
class SourceText:
    """A piece of source with position tracking for diagnostics."""

    text: str
    path: str | None = None
    grammar_version: str = "1"


@dataclass(frozen=True)
class Token:
    kind: str  # name | num | sym | eof
    value: str
    line: int
    column: int


def tokenize(src: SourceText) -> list[Token]:
    out: list[Token] = []
    pos = 0
    line, col = 1, 1
    text = src.text
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, col, src.path)
        lexeme = m.group(0)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, src: SourceText, cfg: SystemConfig,
                 strat: StrategyInstance | None):
        self.src = src
        self.cfg = cfg
        self.strat = strat
        self.tokens = tokenize(src)
        self.pos = 0
        self.scopes: list[frozenset[str]] = []

    # -- token plumbing

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.column, self.src.path)

    def expect(self, value: str) -> Token:
        tok = self.next()
        if tok.value != value:
            raise self.fail(f"expected {value!r}, found {tok.value!r}", tok)
        return tok

    def expect_num(self) -> int:
        tok = self.next()
        if tok.kind != "num":
            raise self.fail(f"expected a number, found {tok.value!r}", tok)
        return int(tok.value)

    def expect_name(self) -> Token:
        tok = self.next()
        if tok.kind != "name":
            raise self.fail(f"expected an identifier, found {tok.value!r}", tok)
        return tok

    # -- grammar

    def term(self) -> Term:
        out = self.merge()
        while self.peek().value == "+":
            self.next()
            out = Alt(out, self.merge())
        return out

    MERGE_OPS = {"||": Par, "|_": LeftMerge, "|": CommMerge}

    def merge(self) -> Term:
        left = self.seqt()
        tok = self.peek()
        if tok.value in self.MERGE_OPS:
            self.next()
            right = self.seqt()
            after = self.peek()
            if after.value in self.MERGE_OPS:
                raise self.fail(
                    "merge operators are non-associative; parenthesize", after)
            return self.MERGE_OPS[tok.value](left, right)
        return left

    def seqt(self) -> Term:
        left = self.atom()
        if self.peek().value == ".":
            self.next()
            return Seq(left, self.seqt())
        return left

    def atom(self) -> Term:
        tok = self.peek()
        if tok.value == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind == "name":
            if tok.value == "delta":
                self.next()
                return Delta()
            if tok.value == "eps":
                self.next()
                return Epsilon()
            if tok.value == "encap":
                return self.encap()
            if tok.value == "si":
                return self.si()
            if tok.value == "pos":
                return self.possi()
            if tok.value == "rec":
                return self.rec()
            if tok.value == "init":
                raise self.fail("'init' is only meaningful as a control-state "
                                "literal", tok)
            self.next()
            name = tok.value
            for scope in reversed(self.scopes):
                if name in scope:
                    return Var(name)
            if not self.cfg.declares(name):
                raise self.fail(f"undeclared action: {name}", tok)
            return Act(name)
        raise self.fail(f"expected a term, found {tok.value!r}", tok)

    def encap(self) -> Term:
        self.expect("encap")
        self.expect("{")
        names: list[str] = []
        if self.peek().value != "}":
            while True:
                t = self.expect_name()
                if not self.cfg.declares(t.value):
                    raise self.fail(f"undeclared action: {t.value}", t)
                names.append(t.value)
                if self.peek().value != ",":
                    break
                self.next()
        self.expect("}")
        self.expect("(")
        body = self.term()
        self.expect(")")
        return Encap(frozenset(names), body)

    def hist(self) -> tuple[tuple[int, int], ...]:
        pairs: list[tuple[int, int]] = []
        start = self.peek()
        while self.peek().value == "(":
            self.next()
            i = self.expect_num()
            self.expect(",")
            n = self.expect_num()
            self.expect(")")
            pairs.append((i, n))
            if self.peek().value != ",":
                break
            self.next()
        try:
            return mk_hist(pairs)
        except IllFormedHistory as exc:
            raise self.fail(f"malformed history literal: {exc}", start) from exc

    def state(self):
        tok = self.peek()
        if tok.value == "init":
            self.next()
            if self.strat is None:
                raise self.fail("'init' state literal needs an active strategy",
                                tok)
            return self.strat.initial_state
        if tok.value == "{":
            self.next()
            queues: dict[str, tuple[int, ...]] = {}
            if self.peek().value != "}":
                while True:
                    name = self.expect_name()
                    self.expect(":")
                    self.expect("[")
                    items: list[int] = []
                    if self.peek().value != "]":
                        while True:
                            items.append(self.expect_num())
                            if self.peek().value != ",":
                                break
                            self.next()
                    self.expect("]")
                    if name.value in queues:
                        raise self.fail(f"duplicate semaphore {name.value}", name)
                    queues[name.value] = tuple(items)
                    if self.peek().value != ",":
                        break
                    self.next()
            self.expect("}")
            return SemState.of(queues)
        raise self.fail("expected a control-state literal ('init' or '{...}')",
                        tok)

    def _si_args(self, n_tok: Token, arity: int) -> tuple[Term, ...]:
        self.expect("(")
        args = [self.term()]
        while self.peek().value == ",":
            self.next()
            args.append(self.term())
        self.expect(")")
        if len(args) != arity:
            raise self.fail(
                f"operator arity {arity} does not match {len(args)} arguments",
                n_tok)
        return tuple(args)

    def si(self) -> Term:
        self.expect("si")
        self.expect("[")
        n_tok = self.peek()
        arity = self.expect_num()
        self.expect(";")
        h = self.hist()
        self.expect(";")
        s = self.state()
        self.expect("]")
        args = self._si_args(n_tok, arity)
        try:
            return Si(h, s, args)
        except (ValueError, IllFormedHistory) as exc:
            raise self.fail(str(exc), n_tok) from exc

    def possi(self) -> Term:
        self.expect("pos")
        self.expect("[")
        n_tok = self.peek()
        arity = self.expect_num()
        self.expect(";")
        index = self.expect_num()
        self.expect(";")
        h = self.hist()
        self.expect(";")
        s = self.state()
        self.expect("]")
        args = self._si_args(n_tok, arity)
        try:
            return PosSi(index, h, s, args)
        except (ValueError, IllFormedHistory) as exc:
            raise self.fail(str(exc), n_tok) from exc

    def rec(self) -> Term:
        self.expect("rec")
        root_tok = self.expect_name()
        self.expect("{")
        # Scan ahead for the defined variables so bodies can mention any of
        # them before building the equations.
        defined = self._peek_equation_vars()
        self.scopes.append(defined)
        try:
            equations: dict[str, Term] = {}
            while True:
                var_tok = self.expect_name()
                if var_tok.value in equations:
                    raise self.fail(f"duplicate equation for {var_tok.value}",
                                    var_tok)
                self.expect("=")
                equations[var_tok.value] = self.term()
                if self.peek().value == ";":
                    self.next()
                    if self.peek().value == "}":
                        break
                    continue
                break
            self.expect("}")
        finally:
            self.scopes.pop()
        close_tok = self.expect_name()
        if close_tok.value != root_tok.value:
            raise self.fail(
                f"recursion block opened for {root_tok.value} must close with "
                f"the same variable, found {close_tok.value}", close_tok)
        try:
            spec = RecSpec.of(equations)
            return RecConst(root_tok.value, spec)
        except ValueError as exc:
            raise self.fail(str(exc), root_tok) from exc

    def _peek_equation_vars(self) -> frozenset[str]:
        names: set[str] = set()
        depth = 0
        i = self.pos
        while i < len(self.tokens):
            tok = self.tokens[i]
            if tok.value == "{":
                depth += 1
            elif tok.value == "}":
                if depth == 0:
                    break
                depth -= 1
            elif (depth == 0 and tok.kind == "name"
                  and i + 1 < len(self.tokens)
                  and self.tokens[i + 1].value == "="):
                names.add(tok.value)
            i += 1
        return frozenset(names)


def parse_term(src: str | SourceText, cfg: SystemConfig,
               strat: StrategyInstance | None = None) -> Term:
    """Parse a single term; raises ParseError with location on any problem."""
    if isinstance(src, str):
        src = SourceText(src)
    p = _Parser(src, cfg, strat)
    out = p.term()
    tok = p.peek()
    if tok.kind != "eof":
        raise p.fail(f"unexpected trailing input: {tok.value!r}", tok)
    return out


def scan_action_names(text: str) -> frozenset[str]:
    """Identifier tokens of ``text`` that could be action names (used to
    synthesize a default config when none is given)."""
    names: set[str] = set()
    toks = tokenize(SourceText(text))
    for i, tok in enumerate(toks):
        if tok.kind != "name" or tok.value in KEYWORDS:
            continue
        if i + 1 < len(toks) and toks[i + 1].value in ("=", ":"):
            continue  # rec variable or state literal key
        prev = toks[i - 1].value if i > 0 else ""
        if prev == "rec":
            continue
        names.add(tok.value)
    return frozenset(names)
