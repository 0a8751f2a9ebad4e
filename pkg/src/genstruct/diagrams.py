"""Flat diagrams, extension diagrams, and the quantifier-free formulas built from them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .core import (
    App,
    GenstructError,
    Leaf,
    ParseError,
    Signature,
    Term,
    TokenStream,
    UnknownSymbol,
    ArityMismatch,
    parse_term_tokens,
    render_term,
    tokenize,
)


class DiagramError(GenstructError):
    pass


class EmptyVariableSet(DiagramError):
    pass


@dataclass(frozen=True, order=True)
class Rel:
    rel: str
    args: tuple[str, ...]

    @property
    def symbol(self) -> str:
        return self.rel

    def key(self) -> tuple:
        return (self.rel, self.args, 0, "")

    def __str__(self):
        return f"{self.rel}({','.join(self.args)})"


@dataclass(frozen=True, order=True)
class NegRel:
    rel: str
    args: tuple[str, ...]

    @property
    def symbol(self) -> str:
        return self.rel

    def key(self) -> tuple:
        return (self.rel, self.args, 1, "")

    def __str__(self):
        return f"!{self.rel}({','.join(self.args)})"


@dataclass(frozen=True, order=True)
class FunEq:
    fn: str
    args: tuple[str, ...]
    value: str

    @property
    def symbol(self) -> str:
        return self.fn

    def key(self) -> tuple:
        return (self.fn, self.args, 2, self.value)

    def __str__(self):
        head = self.fn if not self.args else f"{self.fn}({','.join(self.args)})"
        return f"{head} = {self.value}"


FlatAtom = Union[Rel, NegRel, FunEq]


def atom_vars(atom: FlatAtom) -> set[str]:
    out = set(atom.args)
    if isinstance(atom, FunEq):
        out.add(atom.value)
    return out


def sorted_atoms(atoms: Iterable[FlatAtom]) -> list[FlatAtom]:
    return sorted(atoms, key=lambda a: a.key())


def rename_atom(atom: FlatAtom, mapping: Mapping[str, str]) -> FlatAtom:
    args = tuple(mapping.get(v, v) for v in atom.args)
    if isinstance(atom, FunEq):
        return FunEq(atom.fn, args, mapping.get(atom.value, atom.value))
    return type(atom)(atom.rel, args)


@dataclass(frozen=True)
class FlatDiagram:
    vars: tuple[str, ...]
    atoms: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        if len(set(self.vars)) != len(self.vars):
            raise DiagramError(f"repeated variable in {self.vars}")
        declared = set(self.vars)
        for atom in self.atoms:
            extra = atom_vars(atom) - declared
            if extra:
                raise DiagramError(f"atom {atom} mentions undeclared {sorted(extra)}")

    def check_arities(self, sig: Signature) -> None:
        for atom in self.atoms:
            table = sig.functions if isinstance(atom, FunEq) else sig.relations
            if atom.symbol not in table:
                raise UnknownSymbol(f"unknown symbol {atom.symbol!r} in {atom}")
            if table[atom.symbol] != len(atom.args):
                raise ArityMismatch(f"arity mismatch in {atom}")

    def with_atoms(self, atoms: Iterable[FlatAtom], vars: Sequence[str] | None = None) -> FlatDiagram:
        return FlatDiagram(self.vars if vars is None else vars, self.atoms | frozenset(atoms))

    def rename(self, mapping: Mapping[str, str]) -> FlatDiagram:
        return FlatDiagram(
            [mapping.get(v, v) for v in self.vars],
            {rename_atom(a, mapping) for a in self.atoms},
        )

    def function_table(self) -> dict[tuple[str, tuple[str, ...]], str]:
        """Map ``(f, args)`` to value; only meaningful for consistent diagrams."""
        return {(a.fn, a.args): a.value for a in self.atoms if isinstance(a, FunEq)}

    def __str__(self):
        return render_diagram(self)


def render_diagram(d: FlatDiagram, header: str = "vars") -> str:
    lines = [f"{header} {' '.join(d.vars)}".rstrip()]
    lines.extend(str(a) for a in sorted_atoms(d.atoms))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Violation:
    clause: int
    first: FlatAtom
    second: FlatAtom

    def __str__(self):
        return f"clause {self.clause}: {self.first} / {self.second}"


def check_consistent(d: FlatDiagram) -> list[Violation]:
    """Return every clashing atom pair; an empty list means consistent."""
    violations = []
    for atom in sorted_atoms(d.atoms):
        if isinstance(atom, Rel) and NegRel(atom.rel, atom.args) in d.atoms:
            violations.append(Violation(1, atom, NegRel(atom.rel, atom.args)))
    values: dict[tuple, list[FunEq]] = {}
    for atom in sorted_atoms(d.atoms):
        if isinstance(atom, FunEq):
            values.setdefault((atom.fn, atom.args), []).append(atom)
    for group in values.values():
        for first, second in itertools.combinations(group, 2):
            violations.append(Violation(2, first, second))
    return violations


def is_consistent(d: FlatDiagram) -> bool:
    return not check_consistent(d)


@dataclass(frozen=True)
class Gap:
    symbol: str
    args: tuple[str, ...]
    is_function: bool

    def __str__(self):
        call = f"{self.symbol}({','.join(self.args)})"
        return f"{call} undefined" if self.is_function else f"{call} undecided"


def check_complete(d: FlatDiagram, sig: Signature) -> list[Gap]:
    gaps = []
    decided = {(a.rel, a.args) for a in d.atoms if not isinstance(a, FunEq)}
    defined = d.function_table()
    for rel in sorted(sig.relations):
        for tup in itertools.product(d.vars, repeat=sig.relations[rel]):
            if (rel, tup) not in decided:
                gaps.append(Gap(rel, tup, False))
    for fn in sorted(sig.functions):
        for tup in itertools.product(d.vars, repeat=sig.functions[fn]):
            if (fn, tup) not in defined:
                gaps.append(Gap(fn, tup, True))
    return gaps


def is_complete(d: FlatDiagram, sig: Signature) -> bool:
    return is_consistent(d) and not check_complete(d, sig)


def complete(d: FlatDiagram, sig: Signature, default: str | None = None) -> FlatDiagram:
    """Negate undecided relation instances and send undefined function values to ``default``."""
    if not d.vars:
        raise EmptyVariableSet("cannot complete a diagram with no variables")
    if default is None:
        default = d.vars[0]
    if default not in d.vars:
        raise DiagramError(f"default {default!r} is not a variable of the diagram")
    if not is_consistent(d):
        raise DiagramError("cannot complete an inconsistent diagram")
    added: list[FlatAtom] = []
    for gap in check_complete(d, sig):
        if gap.is_function:
            added.append(FunEq(gap.symbol, gap.args, default))
        else:
            added.append(NegRel(gap.symbol, gap.args))
    if not added:
        return d
    return d.with_atoms(added)


@dataclass(frozen=True)
class ExtensionDiagram:
    x_vars: tuple[str, ...]
    y_vars: tuple[str, ...]
    atoms: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "x_vars", tuple(self.x_vars))
        object.__setattr__(self, "y_vars", tuple(self.y_vars))
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        if set(self.x_vars) & set(self.y_vars):
            raise DiagramError("x and y variables overlap")
        if not is_extension_diagram(self.diagram, self.x_vars, self.y_vars):
            raise DiagramError("not an extension diagram")

    @property
    def diagram(self) -> FlatDiagram:
        return FlatDiagram(self.x_vars + self.y_vars, self.atoms)

    def __str__(self):
        lines = [
            f"xvars {' '.join(self.x_vars)}".rstrip(),
            f"yvars {' '.join(self.y_vars)}".rstrip(),
        ]
        lines.extend(str(a) for a in sorted_atoms(self.atoms))
        return "\n".join(lines) + "\n"


def is_extension_diagram(d: FlatDiagram, x_vars: Sequence[str], y_vars: Sequence[str]) -> bool:
    ys = set(y_vars)
    if set(x_vars) | ys != set(d.vars) or set(x_vars) & ys:
        raise DiagramError("x_vars and y_vars must partition the diagram's variables")
    if not is_consistent(d):
        return False
    return all(ys.intersection(atom.args) for atom in d.atoms)


# -- quantifier-free formulas -------------------------------------------------


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class RelAtom:
    rel: str
    args: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    subs: tuple["Formula", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "subs", tuple(self.subs))


@dataclass(frozen=True)
class Or:
    subs: tuple["Formula", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "subs", tuple(self.subs))


Formula = Union[Eq, RelAtom, Not, And, Or]
TOP = And(())
BOTTOM = Or(())


def atom_formula(atom: FlatAtom) -> Formula:
    args = tuple(Leaf(v) for v in atom.args)
    if isinstance(atom, Rel):
        return RelAtom(atom.rel, args)
    if isinstance(atom, NegRel):
        return Not(RelAtom(atom.rel, args))
    return Eq(App(atom.fn, args), Leaf(atom.value))


def delta(vars: Sequence[str]) -> Formula:
    """Pairwise distinctness of ``vars``."""
    return And(tuple(Not(Eq(Leaf(u), Leaf(v))) for u, v in itertools.combinations(vars, 2)))


def phi_delta(d: FlatDiagram) -> Formula:
    conj = [atom_formula(a) for a in sorted_atoms(d.atoms)]
    conj.extend(delta(d.vars).subs)
    return And(tuple(conj))


def _conjuncts(phi: Formula) -> list[Formula]:
    if isinstance(phi, And):
        out = []
        for s in phi.subs:
            out.extend(_conjuncts(s))
        return out
    return [phi]


def render_formula(phi: Formula, ascii: bool = False) -> str:
    """Render with unicode connectives, or in the input grammar when ``ascii``."""
    neq, neg, land, lor = ("!=", "!", " & ", " | ") if ascii else ("≠", "¬", " ∧ ", " ∨ ")
    top, bottom = ("true", "false") if ascii else ("⊤", "⊥")

    def go(f: Formula, nested: bool) -> str:
        if isinstance(f, Eq):
            sep = " = " if ascii else "="
            return f"{render_term(f.left)}{sep}{render_term(f.right)}"
        if isinstance(f, RelAtom):
            return f"{f.rel}({','.join(render_term(a) for a in f.args)})"
        if isinstance(f, Not):
            if isinstance(f.sub, Eq):
                sep = f" {neq} " if ascii else neq
                return f"{render_term(f.sub.left)}{sep}{render_term(f.sub.right)}"
            return neg + go(f.sub, True)
        subs = _conjuncts(f) if isinstance(f, And) else list(f.subs)
        if not subs:
            return top if isinstance(f, And) else bottom
        if len(subs) == 1:
            return go(subs[0], nested)
        text = (land if isinstance(f, And) else lor).join(go(s, True) for s in subs)
        return f"({text})" if nested else text

    return go(phi, False)


def psi_delta(d: ExtensionDiagram) -> str:
    """Render the axiom forall x (delta(x) -> exists y phi(x, y))."""
    body = phi_delta(d.diagram)
    if d.y_vars:
        inner = render_formula(body)
        if len(_conjuncts(body)) > 1:
            inner = f"({inner})"
        inner = f"∃{' '.join(d.y_vars)} {inner}"
    else:
        inner = render_formula(body)
    if not d.x_vars:
        return inner
    guard = render_formula(delta(d.x_vars))
    return f"∀{' '.join(d.x_vars)} ({guard} → {inner})"


def formula_terms(phi: Formula) -> list[Term]:
    if isinstance(phi, Eq):
        return [phi.left, phi.right]
    if isinstance(phi, RelAtom):
        return list(phi.args)
    if isinstance(phi, Not):
        return formula_terms(phi.sub)
    out = []
    for s in phi.subs:
        out.extend(formula_terms(s))
    return out


def evaluate(phi: Formula, model, env: Mapping[str, object]) -> bool:
    """Evaluate ``phi`` in ``model`` with leaves bound by ``env``.

    ``model`` needs ``apply(fn, args)`` and ``holds_rel(rel, args)``.
    """

    def term(t: Term):
        if isinstance(t, Leaf):
            if t.name not in env:
                raise DiagramError(f"unbound variable {t.name!r}")
            return env[t.name]
        return model.apply(t.fn, [term(a) for a in t.args])

    def go(f: Formula) -> bool:
        if isinstance(f, Eq):
            return term(f.left) == term(f.right)
        if isinstance(f, RelAtom):
            return model.holds_rel(f.rel, [term(a) for a in f.args])
        if isinstance(f, Not):
            return not go(f.sub)
        if isinstance(f, And):
            return all(go(s) for s in f.subs)
        return any(go(s) for s in f.subs)

    return go(phi)


def parse_formula(text: str, sig: Signature, context: Iterable[str] | None = None, lineno: int | None = None) -> Formula:
    if context is not None:
        context = set(context)
    ts = TokenStream(tokenize(text), lineno)

    def disj() -> Formula:
        subs = [conj()]
        while ts.peek() == "|":
            ts.next()
            subs.append(conj())
        return subs[0] if len(subs) == 1 else Or(tuple(subs))

    def conj() -> Formula:
        subs = [unary()]
        while ts.peek() == "&":
            ts.next()
            subs.append(unary())
        return subs[0] if len(subs) == 1 else And(tuple(subs))

    def unary() -> Formula:
        tok = ts.peek()
        if tok == "!":
            ts.next()
            return Not(unary())
        if tok == "(":
            ts.next()
            f = disj()
            ts.expect(")")
            return f
        if tok == "true":
            ts.next()
            return TOP
        if tok == "false":
            ts.next()
            return BOTTOM
        return atom()

    def atom() -> Formula:
        tok = ts.peek()
        if tok in sig.relations:
            ts.next()
            ts.expect("(")
            args = []
            while True:
                args.append(parse_term_tokens(ts, sig, context))
                sep = ts.next()
                if sep == ")":
                    break
                if sep != ",":
                    raise ParseError(f"expected ',' or ')', got {sep!r}", lineno)
            if len(args) != sig.relations[tok]:
                raise ArityMismatch(f"{tok} expects {sig.relations[tok]} arguments", lineno)
            return RelAtom(tok, tuple(args))
        left = parse_term_tokens(ts, sig, context)
        op = ts.next()
        if op not in ("=", "!="):
            raise ParseError(f"expected '=' or '!=', got {op!r}", lineno)
        right = parse_term_tokens(ts, sig, context)
        eq = Eq(left, right)
        return eq if op == "=" else Not(eq)

    f = disj()
    if not ts.at_end():
        raise ParseError(f"trailing input {ts.peek()!r}", lineno)
    return f
