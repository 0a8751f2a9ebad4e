"""Amalgamation of presentations along embeddings, and realization of extension diagrams."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import ArityMismatch, GenstructError, Leaf, Term
from .diagrams import ExtensionDiagram, FlatAtom, rename_atom
from .structures import (
    GeneratorClosure,
    InconsistentDiagram,
    Presentation,
    RedundantTuple,
    StructureMap,
    fresh_name,
    generatorify,
    qf_type_equal,
    render_presentation,
    transport,
)


class NotEmbedding(GenstructError):
    pass


class HypothesisFailed(GenstructError):
    def __init__(self, which: str, detail: str = ""):
        self.which = which
        super().__init__(f"hypothesis failed: {which}" + (f" ({detail})" if detail else ""))


@dataclass
class Amalgam:
    """``presentation`` together with the two legs into it.

    ``renamed`` lists generators of the right factor that were given a new
    name in the amalgam because their name was already taken.
    """

    presentation: Presentation
    left: StructureMap
    right: StructureMap
    renamed: dict[str, str] = field(default_factory=dict)

    def render(self) -> str:
        comments = ["map"] + self.left.render("g1") + self.right.render("g2")
        comments += [f"renamed {old} -> {new}" for old, new in sorted(self.renamed.items())]
        return render_presentation(self.presentation, comments)


def inclusion(sub: Presentation, sup: Presentation) -> StructureMap:
    """The map sending each generator of ``sub`` to the same-named generator of ``sup``."""
    return StructureMap(sub, sup, {g: Leaf(g) for g in sub.generators})


def _evaluate(p: Presentation, e: Term, source: Presentation, images: Sequence[Term]) -> Term:
    """Image in ``p`` of a ``source`` element under generators -> ``images``."""
    if isinstance(e, Leaf):
        return images[source.generators.index(e.name)]
    return p.apply(e.fn, [_evaluate(p, a, source, images) for a in e.args])


def _glue(f1: StructureMap, f2: StructureMap) -> Amalgam:
    A = f1.source
    if f2.source != A:
        raise ValueError("the two maps must share their source")
    if f1.target.sig != f2.target.sig:
        raise ValueError("factors have different signatures")
    for name, f in (("left", f1), ("right", f2)):
        failure = f.embedding_failure()
        if failure:
            raise NotEmbedding(f"{name} map is not an embedding: {failure}")

    agens = [Leaf(g) for g in A.generators]
    B1, C1 = f1.target, f2.target
    img_b = [f1.image(a) for a in agens]
    img_c = [f2.image(a) for a in agens]
    extra_b: list[Term] = []
    extra_c: list[Term] = []
    while True:
        gb = generatorify(B1, img_b + extra_b)
        gc = generatorify(C1, img_c + extra_c)
        B1, C1 = gb.presentation, gc.presentation
        img_b, img_c = gb.elements[: len(agens)], gc.elements[: len(agens)]
        back_b = transport(B1, img_b, A, agens)
        back_c = transport(C1, img_c, A, agens)
        assert back_b.ok and back_c.ok
        pairs: dict[str, str] = {}
        extra_b, extra_c = [], []
        for g in sorted(back_b.closure.reached):
            v = _evaluate(C1, back_b.sigma[Leaf(g)], A, img_c)
            if isinstance(v, Leaf):
                pairs[g] = v.name
            else:
                extra_c.append(v)
        for h in sorted(back_c.closure.reached):
            v = _evaluate(B1, back_c.sigma[Leaf(h)], A, img_b)
            if not isinstance(v, Leaf):
                extra_b.append(v)
            elif pairs.setdefault(v.name, h) != h:
                raise AssertionError("embeddings identify different generators")
        if not extra_b and not extra_c:
            break

    matched = {h: g for g, h in pairs.items()}
    taken = set(B1.generators) | B1.sig.symbols
    names: dict[str, str] = {}
    renamed: dict[str, str] = {}
    right_only = []
    for h in C1.generators:
        if h in matched:
            names[h] = matched[h]
            continue
        n = fresh_name(h, taken)
        taken.add(n)
        names[h] = n
        right_only.append(n)
        if n != h:
            renamed[h] = n
    atoms: set[FlatAtom] = set(B1.diagram.atoms)
    atoms.update(rename_atom(a, names) for a in C1.diagram.atoms)
    try:
        D = Presentation(B1.sig, B1.generators + tuple(right_only), atoms)
    except InconsistentDiagram as exc:  # pragma: no cover - excluded by the embedding checks
        raise AssertionError(f"amalgam diagram is inconsistent: {exc}") from exc
    left = StructureMap(f1.target, D, {b: Leaf(b) for b in f1.target.generators})
    right = StructureMap(f2.target, D, {c: Leaf(names[c]) for c in f2.target.generators})
    return Amalgam(D, left, right, renamed)


def disjoint_amalgam(f1: StructureMap, f2: StructureMap) -> Amalgam:
    """Amalgamate ``f1: A -> B`` and ``f2: A -> C`` so that B and C meet exactly in A.

    The diagram of the result is the union of the two diagrams with the image
    of A identified; generated elements mixing both sides stay formal.
    """
    return _glue(f1, f2)


def fibered_coproduct(i1: StructureMap, i2: StructureMap) -> Amalgam:
    """Pushout of ``i1: B -> AB`` and ``i2: B -> B'`` in the category of structures.

    Elements are the normal forms over the glued generators: no function
    application with all arguments on one side survives simplification.
    """
    return _glue(i1, i2)


@dataclass
class Realization:
    """Extension of a presentation by witnesses ``b`` for an extension diagram over ``a``."""

    presentation: Presentation
    a: list[Term]
    b: list[Term]
    x_vars: tuple[str, ...] = ()
    y_vars: tuple[str, ...] = ()

    def __iter__(self):
        return iter((self.presentation, self.b))

    @property
    def env(self) -> dict[str, Term]:
        return dict(zip(self.x_vars, self.a)) | dict(zip(self.y_vars, self.b))


def realize_extension(p: Presentation, a: Sequence[Term], d: ExtensionDiagram) -> Realization:
    """Add fresh witnesses ``b`` to ``p`` with ``phi_d(a, b)`` true."""
    if len(a) != len(d.x_vars):
        raise ArityMismatch(f"expected {len(d.x_vars)} elements, got {len(a)}")
    a = [p.normal(e) for e in a]
    if len(set(a)) != len(a):
        raise RedundantTuple("tuple has repeated elements")
    g = generatorify(p, a)
    base = g.presentation
    taken = set(base.generators) | base.sig.symbols
    mapping = {x: e.name for x, e in zip(d.x_vars, g.elements)}
    new = []
    for y in d.y_vars:
        n = fresh_name(y, taken)
        taken.add(n)
        mapping[y] = n
        new.append(n)
    q = base.extend(new, (rename_atom(atom, mapping) for atom in d.atoms))
    return Realization(q, list(g.elements), [Leaf(n) for n in new], d.x_vars, d.y_vars)


@dataclass
class IndependenceAmalgam:
    """Ambient extension containing the amalgamated tuple ``a``.

    ``inputs`` maps each argument name to its elements read in the extension.
    """

    presentation: Presentation
    a: list[Term]
    inputs: dict[str, list[Term]]


def independence_amalgam(
    p: Presentation,
    C: Sequence[Term],
    a: Sequence[Term],
    ap: Sequence[Term],
    b: Sequence[Term],
    c: Sequence[Term],
) -> IndependenceAmalgam:
    """Find a'' with the type of ``a`` over C b, of ``ap`` over C c, and independent from b c over C."""
    from .independence import alg_indep

    C, a, ap, b, c = ([p.normal(e) for e in seq] for seq in (C, a, ap, b, c))
    if len(a) != len(ap):
        raise HypothesisFailed("a and a' have different lengths")
    for which, left, right in (("a ind_C b", a, b), ("a' ind_C c", ap, c), ("b ind_C c", b, c)):
        verdict = alg_indep(p, left, right, C)
        if not verdict.is_independent:
            raise HypothesisFailed(which, f"witness {verdict.render_witness()}")
    if not qf_type_equal(p, a, ap, C):
        raise HypothesisFailed("a and a' have the same type over C")

    # name every relevant element so all closures are generator-level
    g = generatorify(p, C + a + ap + b + c)
    P1 = g.presentation
    lifted = [e for e in g.elements]
    nC, na, nap, nb, nc = (len(s) for s in (C, a, ap, b, c))
    Cs = lifted[:nC]
    As = lifted[nC:nC + na]
    Aps = lifted[nC + na:nC + na + nap]
    Bs = lifted[nC + na + nap:nC + na + nap + nb]
    Cc = lifted[nC + na + nap + nb:]

    # make the isomorphism <Ca> -> <Ca'> send generators to generators
    while True:
        fwd = transport(P1, Cs + As, P1, Cs + Aps)
        back = transport(P1, Cs + Aps, P1, Cs + As)
        assert fwd.ok and back.ok
        need = [v for v in list(fwd.sigma.values()) + list(back.sigma.values()) if not isinstance(v, Leaf)]
        if not need:
            break
        P1 = generatorify(P1, need).presentation

    def reached(*groups: list[Term]) -> frozenset[str]:
        return GeneratorClosure(P1, [e for grp in groups for e in grp]).reached

    G_C = reached(Cs)
    G_Ca, G_Cap = reached(Cs, As), reached(Cs, Aps)
    G_Cb, G_Cc = reached(Cs, Bs), reached(Cs, Cc)
    G_Cab, G_Capc = reached(Cs, As, Bs), reached(Cs, Aps, Cc)
    iso_back = {k.name: v.name for k, v in back.sigma.items()}  # <Ca'> gens -> <Ca> gens

    taken = set(P1.generators) | P1.sig.symbols
    copies: list[str] = []

    def copy(name: str) -> str:
        n = fresh_name(name, taken)
        taken.add(n)
        copies.append(n)
        return n

    copy_a = {x: copy(x) for x in sorted(G_Ca - G_C)}
    tau_ab = {x: x for x in G_Cb} | copy_a
    tau_ab |= {x: copy(x) for x in sorted(G_Cab - G_Ca - G_Cb)}
    tau_ac = {x: x for x in G_Cc} | {x: copy_a[iso_back[x]] for x in G_Cap - G_C}
    tau_ac |= {x: copy(x) for x in sorted(G_Capc - G_Cap - G_Cc)}

    new_atoms: set[FlatAtom] = set()
    for atom in P1.diagram.atoms:
        names = set(atom.args) | ({atom.value} if hasattr(atom, "value") else set())
        if names <= G_Cab:
            new_atoms.add(rename_atom(atom, tau_ab))
        if names <= G_Capc:
            new_atoms.add(rename_atom(atom, tau_ac))
    try:
        P3 = P1.extend(copies, new_atoms)
    except InconsistentDiagram as exc:  # pragma: no cover - excluded by the hypotheses
        raise AssertionError(f"amalgamated diagram is inconsistent: {exc}") from exc
    a_new = [Leaf(tau_ab[e.name]) for e in As]
    inputs = {
        "C": [P3.normal(e) for e in C],
        "a": [P3.normal(e) for e in a],
        "ap": [P3.normal(e) for e in ap],
        "b": [P3.normal(e) for e in b],
        "c": [P3.normal(e) for e in c],
    }
    return IndependenceAmalgam(P3, a_new, inputs)
