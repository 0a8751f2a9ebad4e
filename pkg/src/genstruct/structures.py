"""Finite structures and finitely presented structures over normal-form terms.

A :class:`Presentation` is a generator set plus a consistent flat diagram.
It denotes the structure whose universe is the set of normal forms of terms
over the generators under the diagram's function equations; relations hold
only where the diagram says so.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import (
    ATOM_RE,
    App,
    GenstructError,
    Leaf,
    RewriteSystem,
    Signature,
    Term,
    check_term,
    normalize,
    parse_term,
    render_signature,
    render_term,
    sorted_terms,
    split_top_level,
)
from .diagrams import (
    DiagramError,
    EmptyVariableSet,
    Eq,
    FlatAtom,
    FlatDiagram,
    FunEq,
    NegRel,
    Rel,
    RelAtom,
    check_complete,
    check_consistent,
    sorted_atoms,
)


class IncompleteDiagram(DiagramError):
    pass


class InconsistentDiagram(DiagramError):
    pass


class UnknownGenerator(GenstructError):
    pass


class BaseNotContained(GenstructError):
    pass


class RedundantTuple(GenstructError):
    pass


def fresh_name(base: str, taken: Iterable[str]) -> str:
    """``base`` if unused, else ``base.1``, ``base.2``, ..."""
    taken = taken if isinstance(taken, (set, frozenset, dict)) else set(taken)
    if base not in taken:
        return base
    i = 1
    while f"{base}.{i}" in taken:
        i += 1
    return f"{base}.{i}"


# -- finite structures --------------------------------------------------------


@dataclass
class FinStructure:
    sig: Signature
    domain: tuple[str, ...]
    relations: dict[str, frozenset] = field(default_factory=dict)
    functions: dict[str, dict[tuple[str, ...], str]] = field(default_factory=dict)

    def __post_init__(self):
        self.domain = tuple(self.domain)
        dom = set(self.domain)
        for fn, arity in self.sig.functions.items():
            table = self.functions.setdefault(fn, {})
            for tup in itertools.product(self.domain, repeat=arity):
                if table.get(tup) not in dom:
                    raise DiagramError(f"{fn} is not total on the domain")
        for rel in self.sig.relations:
            self.relations[rel] = frozenset(self.relations.get(rel, ()))

    def apply(self, fn: str, args: Sequence[str]) -> str:
        return self.functions[fn][tuple(args)]

    def holds_rel(self, rel: str, args: Sequence[str]) -> bool:
        return tuple(args) in self.relations[rel]


def realize(d: FlatDiagram, sig: Signature) -> FinStructure:
    """The structure on the diagram's variables read off a complete diagram."""
    if not d.vars:
        raise EmptyVariableSet("a structure needs a nonempty domain")
    d.check_arities(sig)
    if check_consistent(d):
        raise InconsistentDiagram(str(check_consistent(d)[0]))
    gaps = check_complete(d, sig)
    if gaps:
        raise IncompleteDiagram(f"diagram is incomplete: {gaps[0]}")
    relations: dict[str, set] = {r: set() for r in sig.relations}
    functions: dict[str, dict] = {f: {} for f in sig.functions}
    for atom in d.atoms:
        if isinstance(atom, Rel):
            relations[atom.rel].add(atom.args)
        elif isinstance(atom, FunEq):
            functions[atom.fn][atom.args] = atom.value
    return FinStructure(sig, d.vars, {r: frozenset(v) for r, v in relations.items()}, functions)


def diag_f(s: FinStructure) -> FlatDiagram:
    atoms: list[FlatAtom] = []
    for rel, arity in s.sig.relations.items():
        for tup in itertools.product(s.domain, repeat=arity):
            atoms.append(Rel(rel, tup) if tup in s.relations[rel] else NegRel(rel, tup))
    for fn, arity in s.sig.functions.items():
        for tup in itertools.product(s.domain, repeat=arity):
            atoms.append(FunEq(fn, tup, s.functions[fn][tup]))
    return FlatDiagram(s.domain, atoms)


# -- presentations ------------------------------------------------------------


class Presentation:
    """Generators plus a consistent flat diagram over them (closed-world reading)."""

    def __init__(self, sig: Signature, generators: Sequence[str], atoms: Iterable[FlatAtom] = ()):
        self.sig = sig
        self.generators = tuple(generators)
        for g in self.generators:
            if not ATOM_RE.match(g):
                raise DiagramError(f"malformed generator name {g!r}")
            if g in sig.symbols:
                raise DiagramError(f"generator {g!r} clashes with a symbol name")
        self.diagram = FlatDiagram(self.generators, atoms)
        self.diagram.check_arities(sig)
        violations = check_consistent(self.diagram)
        if violations:
            raise InconsistentDiagram(f"inconsistent presentation: {violations[0]}")
        self.rw = RewriteSystem(self.diagram.function_table())
        self.positive = frozenset((a.rel, a.args) for a in self.diagram.atoms if isinstance(a, Rel))
        self._genset = frozenset(self.generators)

    def __repr__(self):
        return f"Presentation({list(self.generators)}, {len(self.diagram.atoms)} atoms)"

    def __str__(self):
        return render_presentation(self)

    def __eq__(self, other):
        return (
            isinstance(other, Presentation)
            and self.sig == other.sig
            and set(self.generators) == set(other.generators)
            and self.diagram.atoms == other.diagram.atoms
        )

    def __hash__(self):
        return hash((frozenset(self.generators), self.diagram.atoms))

    @property
    def atoms(self) -> frozenset:
        return self.diagram.atoms

    def is_generator(self, name: str) -> bool:
        return name in self._genset

    def extend(self, generators: Iterable[str] = (), atoms: Iterable[FlatAtom] = ()) -> Presentation:
        return Presentation(self.sig, self.generators + tuple(generators), self.diagram.atoms | frozenset(atoms))

    def normal(self, t: Term) -> Term:
        """Normal form of a term over the generators."""
        for leaf in _leaf_names(t):
            if leaf not in self._genset:
                raise UnknownGenerator(f"{leaf!r} is not a generator")
        check_term(t, self.sig)
        return normalize(t, self.rw)

    def element(self, text: str) -> Term:
        return self.normal(parse_term(text, self.sig, self.generators))

    def elements(self, text: str) -> list[Term]:
        return [self.element(part) for part in split_top_level(text)]

    def contains(self, e: Term) -> bool:
        try:
            return self.normal(e) == e
        except GenstructError:
            return False

    def apply(self, fn: str, args: Sequence[Term]) -> Term:
        return self.rw.apply(fn, args)

    def holds_rel(self, rel: str, args: Sequence[Term]) -> bool:
        names = []
        for a in args:
            if not isinstance(a, Leaf):
                return False
            names.append(a.name)
        return (rel, tuple(names)) in self.positive


def _leaf_names(t: Term) -> Iterable[str]:
    if isinstance(t, Leaf):
        yield t.name
    else:
        for a in t.args:
            yield from _leaf_names(a)


def render_presentation(p: Presentation, comments: Sequence[str] = ()) -> str:
    lines = [render_signature(p.sig).rstrip("\n")] if p.sig.symbols else []
    lines.append(f"generators {' '.join(p.generators)}".rstrip())
    lines.extend(str(a) for a in sorted_atoms(p.diagram.atoms))
    lines.extend(f"# {c}" for c in comments)
    return "\n".join(lines) + "\n"


def eval_term(p: Presentation, t: Term) -> Term:
    return p.normal(t)


def holds(p: Presentation, atom) -> bool:
    """Truth of ``e1 = e2`` (an :class:`Eq`) or ``R(e...)`` (a :class:`RelAtom`)."""
    if isinstance(atom, Eq):
        return p.normal(atom.left) == p.normal(atom.right)
    if isinstance(atom, RelAtom):
        return p.holds_rel(atom.rel, [p.normal(a) for a in atom.args])
    raise TypeError(f"not an atom: {atom!r}")


# -- generated substructures --------------------------------------------------


class GeneratorClosure:
    """Generator-level trace of the substructure generated by ``seeds``.

    ``reached`` is the least set of generators containing the generator
    seeds and closed under the diagram's function equations; ``steps`` lists
    every equation whose arguments all lie in ``reached``, in derivation order.
    """

    def __init__(self, presentation: Presentation, seeds: Iterable[Term]):
        p = presentation
        self.presentation = p
        self.seeds = frozenset(p.normal(s) for s in seeds)
        reached = {s.name for s in self.seeds if isinstance(s, Leaf)}
        steps = []
        pending = sorted(p.rw.rules.items())
        changed = True
        while changed:
            changed = False
            rest = []
            for (fn, args), target in pending:
                if all(a in reached for a in args):
                    steps.append(((fn, args), target))
                    if target not in reached:
                        reached.add(target)
                        changed = True
                else:
                    rest.append(((fn, args), target))
            pending = rest
        self.reached = frozenset(reached)
        self.steps = tuple(steps)
        self._memo: dict[Term, bool] = {}

    def __contains__(self, e: Term) -> bool:
        if isinstance(e, Leaf):
            return e.name in self.reached
        hit = self._memo.get(e)
        if hit is None:
            hit = e in self.seeds or all(a in self for a in e.args)
            self._memo[e] = hit
        return hit

    def __repr__(self):
        return f"GeneratorClosure(reached={sorted(self.reached)}, seeds={[render_term(s) for s in sorted_terms(self.seeds)]})"

    @property
    def free_seeds(self) -> list[Term]:
        """Formal seeds not generated by anything else in the closure."""
        return sorted_terms(s for s in self.seeds if isinstance(s, App) and not all(a in self for a in s.args))

    @property
    def positive_atoms(self) -> list[tuple[str, tuple[str, ...]]]:
        return sorted((r, args) for r, args in self.presentation.positive if all(a in self.reached for a in args))

    def basis(self) -> list[Term]:
        return sorted_terms([Leaf(g) for g in self.reached] + self.free_seeds)

    def members(self, elements: Iterable[Term]) -> list[Term]:
        return [e for e in elements if e in self]


def generated_closure(p: Presentation, X: Iterable[Term]) -> GeneratorClosure:
    return GeneratorClosure(p, X)


@dataclass
class Transport:
    """Outcome of pushing generators ``xs`` of one structure onto ``ys`` in another.

    When ``ok``, the assignment extends to a homomorphism from the
    substructure generated by ``xs`` sending each ``xs[i]`` to ``ys[i]``.
    """

    ok: bool
    reason: str | None
    sigma: dict[Term, Term]
    closure: GeneratorClosure
    target: Presentation

    def image(self, e: Term) -> Term:
        if e in self.sigma:
            return self.sigma[e]
        if isinstance(e, Leaf):
            raise KeyError(f"{e.name} is outside the transported substructure")
        return self.target.apply(e.fn, [self.image(a) for a in e.args])


def transport(src: Presentation, xs: Sequence[Term], dst: Presentation, ys: Sequence[Term]) -> Transport:
    if len(xs) != len(ys):
        raise ValueError("tuples of different lengths")
    xs = [src.normal(x) for x in xs]
    ys = [dst.normal(y) for y in ys]
    cl = GeneratorClosure(src, xs)
    sigma: dict[Term, Term] = {}
    free = set(cl.free_seeds)

    def fail(reason: str) -> Transport:
        return Transport(False, reason, sigma, cl, dst)

    def assign(e: Term, v: Term) -> str | None:
        old = sigma.get(e)
        if old is None:
            sigma[e] = v
            return None
        if old != v:
            return f"{render_term(e)} is sent to both {render_term(old)} and {render_term(v)}"
        return None

    for x, y in zip(xs, ys):
        if isinstance(x, Leaf) or x in free:
            err = assign(x, y)
            if err:
                return fail(err)
    # derivation order guarantees arguments are assigned before use
    for (fn, args), target in cl.steps:
        val = dst.apply(fn, [sigma[Leaf(a)] for a in args])
        err = assign(Leaf(target), val)
        if err:
            shown = f"{fn}({','.join(args)})" if args else fn
            return fail(f"equation {shown} = {target} not preserved: {err}")
    for rel, args in cl.positive_atoms:
        if not dst.holds_rel(rel, [sigma[Leaf(a)] for a in args]):
            return fail(f"relation {rel}({','.join(args)}) not preserved")
    result = Transport(True, None, sigma, cl, dst)
    for x, y in zip(xs, ys):
        if result.image(x) != y:
            return fail(f"{render_term(x)} is sent to {render_term(result.image(x))}, not {render_term(y)}")
    return result


def isomorphic_tuples(p1: Presentation, xs: Sequence[Term], p2: Presentation, ys: Sequence[Term]) -> str | None:
    """``None`` if ``xs -> ys`` extends to an isomorphism of generated substructures, else a reason."""
    forward = transport(p1, xs, p2, ys)
    if not forward.ok:
        return forward.reason
    backward = transport(p2, ys, p1, xs)
    if not backward.ok:
        return backward.reason
    return None


def qf_type_equal(p: Presentation, tup1: Sequence[Term], tup2: Sequence[Term], over: Iterable[Term] = ()) -> bool:
    """Whether ``tup1`` and ``tup2`` have the same quantifier-free type over ``over``."""
    over = [_as_element(p, e) for e in over]
    tup1 = [_as_element(p, e) for e in tup1]
    tup2 = [_as_element(p, e) for e in tup2]
    if len(tup1) != len(tup2):
        return False
    return isomorphic_tuples(p, over + tup1, p, over + tup2) is None


def _as_element(p: Presentation, e: Term) -> Term:
    try:
        return p.normal(e)
    except GenstructError:
        raise BaseNotContained(f"{render_term(e)} is not an element of the presentation") from None


# -- maps and substructures ---------------------------------------------------


@dataclass
class StructureMap:
    source: Presentation
    target: Presentation
    assignment: dict[str, Term]

    def __post_init__(self):
        missing = set(self.source.generators) - set(self.assignment)
        if missing:
            raise ValueError(f"map leaves generators unassigned: {sorted(missing)}")
        self.assignment = {g: self.target.normal(v) for g, v in self.assignment.items()}

    def image(self, e: Term) -> Term:
        if isinstance(e, Leaf):
            return self.assignment[e.name]
        return self.target.apply(e.fn, [self.image(a) for a in e.args])

    def homomorphism_failure(self) -> str | None:
        gens = [Leaf(g) for g in self.source.generators]
        t = transport(self.source, gens, self.target, [self.assignment[g] for g in self.source.generators])
        return t.reason

    def is_homomorphism(self) -> bool:
        return self.homomorphism_failure() is None

    def embedding_failure(self) -> str | None:
        gens = [Leaf(g) for g in self.source.generators]
        return isomorphic_tuples(self.source, gens, self.target, [self.assignment[g] for g in self.source.generators])

    def is_embedding(self) -> bool:
        return self.embedding_failure() is None

    def then(self, other: StructureMap) -> StructureMap:
        return StructureMap(self.source, other.target, {g: other.image(v) for g, v in self.assignment.items()})

    def render(self, name: str) -> list[str]:
        return [f"map {name}: {g} -> {render_term(v)}" for g, v in self.assignment.items()]


@dataclass
class Generatorified:
    """A definitional extension in which chosen elements became generators."""

    presentation: Presentation
    original: Presentation
    definitions: dict[str, Term]
    elements: list[Leaf]

    def unfold(self, e: Term) -> Term:
        """Translate an element of the extension back to the original."""
        if isinstance(e, Leaf):
            if e.name in self.definitions:
                return self.definitions[e.name]
            return e
        return self.original.apply(e.fn, [self.unfold(a) for a in e.args])

    def lift(self, e: Term) -> Term:
        return self.presentation.normal(e)


def generatorify(p: Presentation, elements: Iterable[Term]) -> Generatorified:
    """Name each formal element (and its formal subterms) by a new generator."""
    taken = set(p.generators) | p.sig.symbols
    new_gens: list[str] = []
    new_atoms: list[FlatAtom] = []
    definitions: dict[str, Term] = {}
    memo: dict[Term, str] = {}

    def name_of(e: Term) -> str:
        if isinstance(e, Leaf):
            return e.name
        if e in memo:
            return memo[e]
        argnames = tuple(name_of(a) for a in e.args)
        n = fresh_name("_".join((e.fn,) + argnames) if argnames else e.fn + "_", taken)
        taken.add(n)
        new_gens.append(n)
        new_atoms.append(FunEq(e.fn, argnames, n))
        definitions[n] = e
        memo[e] = n
        return n

    normals = [p.normal(e) for e in elements]
    names = [name_of(e) for e in normals]
    q = p.extend(new_gens, new_atoms) if new_gens else p
    return Generatorified(q, p, definitions, [Leaf(n) for n in names])


@dataclass
class Substructure:
    """``presentation`` presents the substructure of ``ambient`` generated by ``seeds``."""

    presentation: Presentation
    ambient: Presentation
    embedding: StructureMap
    seeds: list[Term]


def substructure(p: Presentation, X: Sequence[Term]) -> Substructure:
    """Present the substructure generated by X; X becomes a tuple of generators.

    The ambient presentation may need new generator names for formal seeds;
    the embedding maps back to the caller's presentation.
    """
    g = generatorify(p, X)
    cl = GeneratorClosure(g.presentation, g.elements)
    gens = sorted(cl.reached, key=lambda n: (g.presentation.generators.index(n)))
    atoms = [
        a for a in g.presentation.diagram.atoms
        if all(v in cl.reached for v in a.args) and (not isinstance(a, FunEq) or a.value in cl.reached)
    ]
    q = Presentation(p.sig, gens, atoms)
    emb = StructureMap(q, p, {n: g.unfold(Leaf(n)) for n in gens})
    return Substructure(q, p, emb, list(g.elements))
