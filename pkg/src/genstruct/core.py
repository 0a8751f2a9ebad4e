"""Signatures, terms, and rewriting of terms by flat function equations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
# atom names may carry ".1"-style suffixes produced by fresh naming
ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")


class GenstructError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GenstructError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateName(ParseError):
    pass


class UnknownSymbol(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class UnboundName(ParseError):
    pass


@dataclass(frozen=True)
class Signature:
    """Function symbols (constants are 0-ary functions) and relation symbols."""

    functions: Mapping[str, int] = field(default_factory=dict)
    relations: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "relations", dict(self.relations))
        for name in self.functions.keys() & self.relations.keys():
            raise DuplicateName(f"duplicate name {name!r}")
        for name, arity in self.functions.items():
            if not SYMBOL_RE.match(name) or arity < 0:
                raise ParseError(f"bad function symbol {name!r}/{arity}")
        for name, arity in self.relations.items():
            if not SYMBOL_RE.match(name) or arity < 1:
                raise ParseError(f"bad relation symbol {name!r}/{arity}")

    def __hash__(self):
        return hash((tuple(sorted(self.functions.items())), tuple(sorted(self.relations.items()))))

    def arity(self, name: str) -> int:
        if name in self.functions:
            return self.functions[name]
        if name in self.relations:
            return self.relations[name]
        raise UnknownSymbol(f"unknown symbol {name!r}")

    @property
    def constants(self) -> list[str]:
        return sorted(f for f, n in self.functions.items() if n == 0)

    @property
    def symbols(self) -> set[str]:
        return set(self.functions) | set(self.relations)

    def merge(self, other: Signature) -> Signature:
        funcs = dict(self.functions)
        rels = dict(self.relations)
        for name, arity in other.functions.items():
            if funcs.get(name, arity) != arity or name in rels:
                raise DuplicateName(f"conflicting declarations of {name!r}")
            funcs[name] = arity
        for name, arity in other.relations.items():
            if rels.get(name, arity) != arity or name in funcs:
                raise DuplicateName(f"conflicting declarations of {name!r}")
            rels[name] = arity
        return Signature(funcs, rels)


def parse_signature(text: str) -> Signature:
    funcs: dict[str, int] = {}
    rels: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parse_signature_line(line, lineno, funcs, rels)
    return Signature(funcs, rels)


def parse_signature_line(line: str, lineno: int, funcs: dict, rels: dict) -> None:
    """Parse one ``func``/``rel``/``const`` directive into ``funcs``/``rels``."""
    parts = line.split()
    kind = parts[0]
    if kind == "const":
        if len(parts) != 2:
            raise ParseError("expected 'const NAME'", lineno)
        name, arity = parts[1], 0
    elif kind in ("func", "rel"):
        if len(parts) != 3:
            raise ParseError(f"expected '{kind} NAME ARITY'", lineno)
        name = parts[1]
        try:
            arity = int(parts[2])
        except ValueError:
            raise ParseError(f"malformed arity {parts[2]!r}", lineno) from None
        if arity < 0 or (kind == "rel" and arity == 0) or not parts[2].isdigit():
            raise ParseError(f"malformed arity {parts[2]!r}", lineno)
    else:
        raise ParseError(f"unknown directive {kind!r}", lineno)
    if not SYMBOL_RE.match(name):
        raise ParseError(f"malformed name {name!r}", lineno)
    if name in funcs or name in rels:
        raise DuplicateName(f"duplicate name {name!r}", lineno)
    (rels if kind == "rel" else funcs)[name] = arity


def render_signature(sig: Signature) -> str:
    lines = []
    for name in sorted(sig.functions):
        arity = sig.functions[name]
        lines.append(f"const {name}" if arity == 0 else f"func {name} {arity}")
    for name in sorted(sig.relations):
        lines.append(f"rel {name} {sig.relations[name]}")
    return "\n".join(lines) + ("\n" if lines else "")


class Term:
    """Immutable term; hashes are cached since terms are used as set elements."""

    __slots__ = ("_hash", "depth", "size")

    def sort_key(self) -> tuple:
        raise NotImplementedError


class Leaf(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.depth = 0
        self.size = 1
        self._hash = hash(("leaf", name))

    def __eq__(self, other):
        return isinstance(other, Leaf) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Leaf({self.name!r})"

    def __str__(self):
        return self.name

    def sort_key(self) -> tuple:
        return (0, self.name, ())


class App(Term):
    __slots__ = ("fn", "args", "_key")

    def __init__(self, fn: str, args: Sequence[Term] = ()):
        self.fn = fn
        self.args = tuple(args)
        self.depth = 1 + max((a.depth for a in self.args), default=0)
        self.size = 1 + sum(a.size for a in self.args)
        self._hash = hash((fn, self.args))
        self._key = None

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.fn == other.fn
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.fn!r}, {list(self.args)!r})"

    def __str__(self):
        return render_term(self)

    def sort_key(self) -> tuple:
        if self._key is None:
            self._key = (self.depth, self.fn, tuple(a.sort_key() for a in self.args))
        return self._key


def term_key(t: Term) -> tuple:
    return t.sort_key()


def sorted_terms(terms: Iterable[Term]) -> list[Term]:
    return sorted(terms, key=term_key)


def render_term(t: Term) -> str:
    if isinstance(t, Leaf):
        return t.name
    if not t.args:
        return t.fn
    return f"{t.fn}({','.join(render_term(a) for a in t.args)})"


def leaves(t: Term) -> set[str]:
    if isinstance(t, Leaf):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= leaves(a)
    return out


def subterms(t: Term) -> Iterator[Term]:
    """Yield every subterm, children before parents."""
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)
    yield t


def check_term(t: Term, sig: Signature) -> None:
    if isinstance(t, App):
        if t.fn not in sig.functions:
            raise UnknownSymbol(f"unknown function symbol {t.fn!r}")
        if sig.functions[t.fn] != len(t.args):
            raise ArityMismatch(
                f"{t.fn} expects {sig.functions[t.fn]} arguments, got {len(t.args)}"
            )
        for a in t.args:
            check_term(a, sig)


_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_.]*)|(.))")


def tokenize(text: str, lineno: int | None = None) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        tok = m.group(1) or m.group(2)
        if tok is None:
            break
        # two-character operators
        if tok == "!" and text.startswith("!=", m.start(2)):
            tok = "!="
            pos = m.end() + 1
        else:
            pos = m.end()
        tokens.append(tok)
    return tokens


class TokenStream:
    def __init__(self, tokens: list[str], lineno: int | None = None):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.lineno)
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}", self.lineno)

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)


def parse_term_tokens(ts: TokenStream, sig: Signature, context: Iterable[str] | None) -> Term:
    name = ts.next()
    if not ATOM_RE.match(name):
        raise ParseError(f"unexpected token {name!r}", ts.lineno)
    if ts.peek() == "(":
        ts.next()
        if name not in sig.functions:
            raise UnknownSymbol(f"unknown function symbol {name!r}", ts.lineno)
        args: list[Term] = []
        if ts.peek() == ")":
            ts.next()
        else:
            while True:
                args.append(parse_term_tokens(ts, sig, context))
                tok = ts.next()
                if tok == ")":
                    break
                if tok != ",":
                    raise ParseError(f"expected ',' or ')', got {tok!r}", ts.lineno)
        if sig.functions[name] != len(args):
            raise ArityMismatch(
                f"{name} expects {sig.functions[name]} arguments, got {len(args)}", ts.lineno
            )
        return App(name, args)
    if sig.functions.get(name) == 0:
        return App(name, ())
    if name in sig.functions:
        raise ArityMismatch(f"{name} expects {sig.functions[name]} arguments", ts.lineno)
    if context is not None and name not in context:
        raise UnboundName(f"unbound name {name!r}", ts.lineno)
    return Leaf(name)


def parse_term(text: str, sig: Signature, context: Iterable[str] | None = None) -> Term:
    """Parse ``text`` as a term; leaves must lie in ``context`` when given."""
    if context is not None:
        context = set(context)
    ts = TokenStream(tokenize(text))
    t = parse_term_tokens(ts, sig, context)
    if not ts.at_end():
        raise ParseError(f"trailing input {ts.peek()!r}")
    return t


def split_top_level(text: str) -> list[str]:
    """Split on commas that are not nested inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    last = "".join(cur).strip()
    if last or parts:
        parts.append(last)
    return [p for p in parts if p]


class RewriteSystem:
    """Flat rules ``f(g1,...,gn) -> g`` over generator names.

    Left-hand sides never overlap, so the system is confluent, and every
    step shrinks the term, so it terminates.
    """

    __slots__ = ("rules",)

    def __init__(self, rules: Mapping[tuple[str, tuple[str, ...]], str] | None = None):
        self.rules: dict[tuple[str, tuple[str, ...]], str] = dict(rules or {})

    def __repr__(self):
        return f"RewriteSystem({self.rules!r})"

    def __eq__(self, other):
        return isinstance(other, RewriteSystem) and self.rules == other.rules

    def __len__(self):
        return len(self.rules)

    def lookup(self, fn: str, args: Sequence[Term]) -> str | None:
        names = []
        for a in args:
            if not isinstance(a, Leaf):
                return None
            names.append(a.name)
        return self.rules.get((fn, tuple(names)))

    def apply(self, fn: str, args: Sequence[Term]) -> Term:
        """Apply ``fn`` to arguments already in normal form."""
        target = self.lookup(fn, args)
        if target is not None:
            return Leaf(target)
        return App(fn, args)

    def is_redex(self, t: Term) -> bool:
        return isinstance(t, App) and self.lookup(t.fn, t.args) is not None


def normalize(t: Term, rw: RewriteSystem) -> Term:
    if isinstance(t, Leaf):
        return t
    args = tuple(normalize(a, rw) for a in t.args)
    target = rw.lookup(t.fn, args)
    if target is not None:
        return Leaf(target)
    if args == t.args:
        return t
    return App(t.fn, args)


def redex_positions(t: Term, rw: RewriteSystem, path: tuple[int, ...] = ()) -> list[tuple[int, ...]]:
    """Positions of all redexes, in pre-order (outermost first)."""
    out = []
    if rw.is_redex(t):
        out.append(path)
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            out.extend(redex_positions(a, rw, path + (i,)))
    return out


def rewrite_at(t: Term, pos: tuple[int, ...], rw: RewriteSystem) -> Term:
    """Contract the redex at ``pos``."""
    if not pos:
        target = rw.lookup(t.fn, t.args)  # type: ignore[union-attr]
        if target is None:
            raise ValueError(f"no redex at position () of {render_term(t)}")
        return Leaf(target)
    assert isinstance(t, App)
    i = pos[0]
    args = list(t.args)
    args[i] = rewrite_at(args[i], pos[1:], rw)
    return App(t.fn, args)
