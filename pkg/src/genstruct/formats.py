"""Text documents for diagrams, presentations, and finite structures.

One line-based grammar covers all inputs::

    func f 2            # optional signature lines
    rel R 1
    vars a b c          # or: generators ... / domain ... / xvars ... + yvars ...
    f(a,b) = c
    R(a)
    !R(b)
    R(c) = 0            # table form, allowed for relations
    formula R(f(a,b))   # optional, for flattening
    xbind a = a
    ybind b = f(a,a)

When no signature lines are present the signature is read off the atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import (
    ATOM_RE,
    ParseError,
    Signature,
    Term,
    TokenStream,
    parse_signature_line,
    parse_term,
    render_signature,
    tokenize,
)
from .diagrams import (
    ExtensionDiagram,
    FlatAtom,
    FlatDiagram,
    Formula,
    FunEq,
    NegRel,
    Rel,
    parse_formula,
    render_diagram,
)
from .structures import FinStructure, Presentation, realize

SIGNATURE_DIRECTIVES = ("func", "rel", "const")
HEADERS = ("vars", "generators", "domain", "xvars", "yvars")


@dataclass
class Document:
    sig: Signature
    headers: dict[str, tuple[str, ...]]
    atoms: list[FlatAtom]
    atom_lines: list[int]
    formula_text: str | None = None
    formula_line: int | None = None
    xbind: dict[str, str] = field(default_factory=dict)
    ybind: dict[str, str] = field(default_factory=dict)
    declared_signature: bool = False

    @property
    def names(self) -> tuple[str, ...]:
        for h in ("generators", "vars", "domain"):
            if h in self.headers:
                return self.headers[h]
        return self.headers.get("xvars", ()) + self.headers.get("yvars", ())

    def diagram(self) -> FlatDiagram:
        return FlatDiagram(self.names, self.atoms)

    def extension(self) -> ExtensionDiagram:
        if "xvars" not in self.headers and "yvars" not in self.headers:
            raise ParseError("an extension diagram needs 'xvars' and 'yvars' lines")
        self.diagram()
        return ExtensionDiagram(self.headers.get("xvars", ()), self.headers.get("yvars", ()), self.atoms)

    def presentation(self) -> Presentation:
        self.diagram()
        return Presentation(self.sig, self.names, self.atoms)

    def structure(self) -> FinStructure:
        return realize(self.diagram(), self.sig)

    def formula(self) -> Formula:
        if self.formula_text is None:
            raise ParseError("no 'formula' line")
        context = set(self.xbind) | set(self.ybind)
        return parse_formula(self.formula_text, self.sig, context, self.formula_line)

    def bindings(self, p: Presentation) -> tuple[dict[str, Term], dict[str, Term]]:
        def read(binds: dict[str, str]) -> dict[str, Term]:
            return {v: p.normal(parse_term(t, p.sig, p.generators)) for v, t in binds.items()}

        return read(self.xbind), read(self.ybind)


def _parse_atom(line: str, lineno: int) -> tuple[FlatAtom, bool]:
    """Parse one atom line; the flag says whether the symbol must be a relation."""
    ts = TokenStream(tokenize(line, lineno), lineno)
    negated = ts.peek() == "!"
    if negated:
        ts.next()
    name = ts.next()
    if not ATOM_RE.match(name):
        raise ParseError(f"expected a symbol, got {name!r}", lineno)
    args: list[str] = []
    has_parens = ts.peek() == "("
    if has_parens:
        ts.next()
        if ts.peek() != ")":
            while True:
                arg = ts.next()
                if not ATOM_RE.match(arg):
                    raise ParseError(f"arguments of flat atoms must be names, got {arg!r}", lineno)
                args.append(arg)
                tok = ts.next()
                if tok == ")":
                    break
                if tok != ",":
                    raise ParseError(f"expected ',' or ')', got {tok!r}", lineno)
        else:
            ts.next()
    if negated:
        if not has_parens or not ts.at_end():
            raise ParseError("expected '!R(args)'", lineno)
        return NegRel(name, tuple(args)), True
    if ts.at_end():
        if not has_parens:
            raise ParseError(f"expected an atom, got {line!r}", lineno)
        return Rel(name, tuple(args)), True
    ts.expect("=")
    value = ts.next()
    if not ts.at_end():
        raise ParseError(f"trailing input {ts.peek()!r}", lineno)
    if value in ("0", "1"):
        if not has_parens:
            raise ParseError("relation entries need an argument list", lineno)
        return (Rel if value == "1" else NegRel)(name, tuple(args)), True
    if not ATOM_RE.match(value):
        raise ParseError(f"expected a name after '=', got {value!r}", lineno)
    return FunEq(name, tuple(args), value), False


def _parse_bind(rest: str, lineno: int) -> tuple[str, str]:
    var, sep, term = rest.partition("=")
    var = var.strip().rstrip(":").strip()
    if not sep or not ATOM_RE.match(var) or not term.strip():
        raise ParseError("expected 'xbind NAME = TERM'", lineno)
    return var, term.strip()


def parse_document(text: str, sig: Signature | None = None) -> Document:
    """Parse a document; ``sig`` is used when the text declares no signature."""
    funcs: dict[str, int] = {}
    rels: dict[str, int] = {}
    headers: dict[str, tuple[str, ...]] = {}
    raw_atoms: list[tuple[FlatAtom, bool, int]] = []
    formula_text = formula_line = None
    xbind: dict[str, str] = {}
    ybind: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        if word in SIGNATURE_DIRECTIVES:
            parse_signature_line(line, lineno, funcs, rels)
        elif word in HEADERS and "(" not in line and "=" not in line:
            if word in headers:
                raise ParseError(f"repeated '{word}' line", lineno)
            names = tuple(rest.split())
            for n in names:
                if not ATOM_RE.match(n):
                    raise ParseError(f"malformed name {n!r}", lineno)
            if len(set(names)) != len(names):
                raise ParseError(f"repeated name in '{word}' line", lineno)
            headers[word] = names
        elif word == "formula":
            if formula_text is not None:
                raise ParseError("repeated 'formula' line", lineno)
            formula_text, formula_line = rest.strip(), lineno
        elif word in ("xbind", "ybind"):
            var, term = _parse_bind(rest, lineno)
            target = xbind if word == "xbind" else ybind
            if var in xbind or var in ybind:
                raise ParseError(f"{var} is bound twice", lineno)
            target[var] = term
        else:
            atom, is_rel = _parse_atom(line, lineno)
            raw_atoms.append((atom, is_rel, lineno))

    primary = [h for h in ("vars", "generators", "domain") if h in headers]
    split = [h for h in ("xvars", "yvars") if h in headers]
    if len(primary) > 1 or (primary and split):
        raise ParseError("a document has exactly one of vars, generators, domain, or xvars/yvars")
    if not primary and not split:
        raise ParseError("missing 'vars', 'generators', 'domain', or 'xvars'/'yvars' line")

    declared = bool(funcs or rels)
    if declared:
        signature = Signature(funcs, rels)
    elif sig is not None:
        signature = sig
    else:
        signature = _infer_signature(raw_atoms)
    for atom, is_rel, lineno in raw_atoms:
        if is_rel and atom.symbol not in signature.relations:
            raise ParseError(f"{atom.symbol} is not a relation symbol", lineno)
        if not is_rel and atom.symbol not in signature.functions:
            raise ParseError(f"{atom.symbol} is not a function symbol", lineno)
        if len(atom.args) != signature.arity(atom.symbol):
            raise ParseError(f"{atom.symbol} expects {signature.arity(atom.symbol)} arguments", lineno)
    return Document(
        signature,
        headers,
        [a for a, _, _ in raw_atoms],
        [n for _, _, n in raw_atoms],
        formula_text,
        formula_line,
        xbind,
        ybind,
        declared,
    )


def _infer_signature(raw_atoms) -> Signature:
    funcs: dict[str, int] = {}
    rels: dict[str, int] = {}
    for atom, is_rel, lineno in raw_atoms:
        table, other = (rels, funcs) if is_rel else (funcs, rels)
        if atom.symbol in other or table.get(atom.symbol, len(atom.args)) != len(atom.args):
            raise ParseError(f"inconsistent use of symbol {atom.symbol!r}", lineno)
        table[atom.symbol] = len(atom.args)
    return Signature(funcs, rels)


def with_signature(sig: Signature, body: str) -> str:
    head = render_signature(sig)
    return head + body if head else body


def render_diagram_document(d: FlatDiagram, sig: Signature) -> str:
    return with_signature(sig, render_diagram(d))


def render_extension_document(d: ExtensionDiagram, sig: Signature) -> str:
    return with_signature(sig, str(d))


def render_structure(s: FinStructure) -> str:
    """``domain`` line followed by one table entry per line."""
    lines = [f"domain {' '.join(s.domain)}"]
    for fn in sorted(s.sig.functions):
        for tup in itertools.product(s.domain, repeat=s.sig.functions[fn]):
            head = f"{fn}({','.join(tup)})" if tup else fn
            lines.append(f"{head} = {s.functions[fn][tup]}")
    for rel in sorted(s.sig.relations):
        for tup in itertools.product(s.domain, repeat=s.sig.relations[rel]):
            lines.append(f"{rel}({','.join(tup)}) = {int(tup in s.relations[rel])}")
    return with_signature(s.sig, "\n".join(lines) + "\n")
