"""Turn a satisfied quantifier-free formula into an extension diagram."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Mapping

from .core import GenstructError, Leaf, Term, render_term
from .diagrams import (
    And,
    Eq,
    ExtensionDiagram,
    FlatAtom,
    Formula,
    FunEq,
    NegRel,
    Not,
    Or,
    Rel,
    RelAtom,
    evaluate,
    render_formula,
)
from .structures import Presentation, RedundantTuple, generated_closure


class NotSatisfied(GenstructError):
    pass


Literal = tuple[bool, Formula]  # (positive, atom)


def nnf(phi: Formula, positive: bool = True) -> Formula:
    if isinstance(phi, (Eq, RelAtom)):
        return phi if positive else Not(phi)
    if isinstance(phi, Not):
        return nnf(phi.sub, not positive)
    subs = tuple(nnf(s, positive) for s in phi.subs)
    if isinstance(phi, And):
        return And(subs) if positive else Or(subs)
    return Or(subs) if positive else And(subs)


def _literal_key(lit: Literal) -> tuple:
    return (render_formula(lit[1]), not lit[0])


@functools.lru_cache(maxsize=4096)
def _dnf(phi: Formula) -> tuple[tuple[Literal, ...], ...]:
    if isinstance(phi, (Eq, RelAtom)):
        return (((True, phi),),)
    if isinstance(phi, Not):
        return (((False, phi.sub),),)
    if isinstance(phi, Or):
        out = []
        for s in phi.subs:
            out.extend(_dnf(s))
        return tuple(out)
    disjuncts: list[tuple[Literal, ...]] = [()]
    for s in phi.subs:
        disjuncts = [d + e for d in disjuncts for e in _dnf(s)]
    return tuple(disjuncts)


def dnf(phi: Formula) -> list[tuple[Literal, ...]]:
    """Disjuncts as canonically sorted literal tuples, in canonical order."""
    out = set()
    for d in _dnf(nnf(phi)):
        out.add(tuple(sorted(set(d), key=_literal_key)))
    return sorted(out, key=lambda d: [_literal_key(l) for l in d])


def literal_formula(lit: Literal) -> Formula:
    return lit[1] if lit[0] else Not(lit[1])


@dataclass
class FlattenResult:
    diagram: ExtensionDiagram
    x: dict[str, Term]
    y: dict[str, Term]

    @property
    def env(self) -> dict[str, Term]:
        return {**self.x, **self.y}


def flatten(phi: Formula, B: Presentation, a: Mapping[str, Term], b: Mapping[str, Term]) -> FlattenResult:
    """Extension diagram satisfied by (a, b) in B that implies ``phi`` modulo atoms over ``a``.

    ``a`` and ``b`` map variable names to elements of ``B``; every element of
    ``b`` must lie outside the substructure generated by ``a``.
    """
    x = {v: B.normal(e) for v, e in a.items()}
    y = {v: B.normal(e) for v, e in b.items()}
    if set(x) & set(y):
        raise RedundantTuple("a variable is bound on both sides")
    values = list(x.values()) + list(y.values())
    if len(set(values)) != len(values):
        raise RedundantTuple("bound elements are not pairwise distinct")
    base = generated_closure(B, x.values())
    for v, e in y.items():
        if e in base:
            raise RedundantTuple(f"{v} = {render_term(e)} lies in the closure of the x tuple")
    env = {**x, **y}
    if not evaluate(phi, B, env):
        raise NotSatisfied(f"{render_formula(phi)} does not hold")

    for disjunct in dnf(phi):
        if all(evaluate(literal_formula(l), B, env) for l in disjunct):
            break
    else:  # pragma: no cover - phi holds, so some disjunct does
        raise NotSatisfied("no satisfied disjunct")

    var_of_elem = {e: v for v, e in env.items()}
    taken = set(env)
    counter = [0]
    atoms: set[FlatAtom] = set()

    def fresh() -> str:
        while f"w{counter[0]}" in taken:
            counter[0] += 1
        name = f"w{counter[0]}"
        taken.add(name)
        return name

    def var_of(t: Term) -> str:
        if isinstance(t, Leaf):
            return t.name
        argvars = tuple(var_of(s) for s in t.args)
        d = B.apply(t.fn, [env[v] for v in argvars])
        w = var_of_elem.get(d)
        if w is None:
            w = fresh()
            var_of_elem[d] = w
            env[w] = d
            (x if d in base else y)[w] = d
        atoms.add(FunEq(t.fn, argvars, w))
        return w

    for positive, atom in disjunct:
        if isinstance(atom, Eq):
            # equalities are trivial and inequalities follow from distinctness
            var_of(atom.left)
            var_of(atom.right)
        else:
            args = tuple(var_of(s) for s in atom.args)
            atoms.add(Rel(atom.rel, args) if positive else NegRel(atom.rel, args))

    ys = set(y)
    kept = {a for a in atoms if ys.intersection(a.args)}
    return FlattenResult(ExtensionDiagram(tuple(x), tuple(y), kept), x, y)
