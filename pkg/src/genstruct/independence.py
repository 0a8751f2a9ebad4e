"""Decision procedures for algebraic, tensor, and bounded M-dividing independence."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import GenstructError, Leaf, Term, render_term, sorted_terms
from .diagrams import atom_vars
from .structures import GeneratorClosure, Presentation, generatorify, isomorphic_tuples


class BoundTooLargeForBudget(GenstructError):
    pass


class Kind(enum.Enum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class IndepVerdict:
    """Outcome of an independence check.

    ``witness`` is an element for algebraic dependence, a base tuple for
    M-dependence, and a textual reason for tensor dependence.
    """

    kind: Kind
    witness: object = None
    relation: str = "a"
    note: str = ""

    @property
    def is_independent(self) -> bool:
        return self.kind is Kind.INDEPENDENT

    @property
    def exit_code(self) -> int:
        return {Kind.INDEPENDENT: 0, Kind.DEPENDENT: 1, Kind.UNKNOWN: 2}[self.kind]

    def render_witness(self) -> str:
        w = self.witness
        if w is None:
            return ""
        if isinstance(w, Term):
            return render_term(w)
        if isinstance(w, tuple):
            return "{" + ", ".join(render_term(e) for e in w) + "}"
        return str(w)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "verdict": self.kind.value,
            "witness": self.render_witness() or None,
            "note": self.note or None,
        }


def _norm(p: Presentation, xs: Iterable[Term]) -> list[Term]:
    return [p.normal(e) for e in xs]


def alg_indep(p: Presentation, A: Iterable[Term], B: Iterable[Term], C: Iterable[Term]) -> IndepVerdict:
    """Whether the closures of C A and C B meet exactly in the closure of C.

    Any common element outside the closure of C can be pushed down to a
    generator or to a seed: a formal element lies in a closure either as a
    seed or because all its arguments do.
    """
    A, B, C = _norm(p, A), _norm(p, B), _norm(p, C)
    ca = GeneratorClosure(p, C + A)
    cb = GeneratorClosure(p, C + B)
    c = GeneratorClosure(p, C)
    candidates = [Leaf(g) for g in (ca.reached & cb.reached) - c.reached]
    candidates += [s for s in ca.seeds | cb.seeds if not isinstance(s, Leaf) and s in ca and s in cb and s not in c]
    if not candidates:
        return IndepVerdict(Kind.INDEPENDENT)
    return IndepVerdict(Kind.DEPENDENT, sorted_terms(candidates)[0])


def kim_indep_proxy(p: Presentation, A: Iterable[Term], B: Iterable[Term], base: Iterable[Term]) -> IndepVerdict:
    """Kim-independence, computed as algebraic independence; valid when ``base`` is a model."""
    v = alg_indep(p, A, B, base)
    return IndepVerdict(v.kind, v.witness, "K", "equals algebraic independence over models")


def closure_fragment(p: Presentation, X: Sequence[Term], depth_bound: int) -> tuple[list[Term], bool]:
    """Elements of the closure of X up to term depth ``depth_bound`` (generators have depth 0).

    The flag says whether the closure is finite and hence fully listed.
    """
    cl = GeneratorClosure(p, X)
    formal_seeds = [s for s in cl.seeds if not isinstance(s, Leaf)]
    gens = [Leaf(g) for g in cl.reached]
    exact = not formal_seeds and all(
        (fn, tuple(t)) in p.rw.rules
        for fn, arity in p.sig.functions.items()
        for t in itertools.product(sorted(cl.reached), repeat=arity)
    )
    if exact:
        return sorted_terms(gens), True
    found = set(gens) | set(cl.seeds)
    while True:
        current = sorted_terms(found)
        new = set()
        for fn, arity in sorted(p.sig.functions.items()):
            for args in itertools.product(current, repeat=arity):
                if 1 + max((a.depth for a in args), default=0) > depth_bound:
                    continue
                e = p.apply(fn, args)
                if e not in found and e.depth <= depth_bound:
                    new.add(e)
        if not new:
            return sorted_terms(found), False
        found |= new


def m_indep_bounded(
    p: Presentation,
    A: Iterable[Term],
    B: Iterable[Term],
    C: Iterable[Term],
    depth_bound: int = 2,
    max_subsets: int = 1 << 16,
) -> IndepVerdict:
    """Algebraic independence over every C <= C' <= closure(B C), for C' in a bounded family.

    Independent only when the closure of B C is finite and every C' was
    tried; Unknown when the bound ran out without a counterexample.
    """
    if depth_bound < 0:
        raise ValueError("depth_bound must be nonnegative")
    A, B, C = _norm(p, A), _norm(p, B), _norm(p, C)
    pool, exact = closure_fragment(p, B + C, depth_bound)
    base = GeneratorClosure(p, C)
    candidates = [e for e in pool if e not in base]
    tried = 0
    for size in range(len(candidates) + 1):
        for extra in itertools.combinations(candidates, size):
            tried += 1
            if tried > max_subsets:
                raise BoundTooLargeForBudget(
                    f"{len(candidates)} candidate elements give more than {max_subsets} bases; lower the depth or raise the cap"
                )
            base_set = tuple(C) + extra
            v = alg_indep(p, A, B, base_set)
            if not v.is_independent:
                return IndepVerdict(Kind.DEPENDENT, base_set, "M", f"not algebraically independent over it: {v.render_witness()}")
    if exact:
        return IndepVerdict(Kind.INDEPENDENT, None, "M")
    return IndepVerdict(Kind.UNKNOWN, None, "M", f"closure is infinite; searched depth {depth_bound}")


def tensor_indep(p: Presentation, A: Iterable[Term], B: Iterable[Term], C: Iterable[Term]) -> IndepVerdict:
    """Whether the pushout of <AC> and <BC> over <C> maps isomorphically onto <ABC>."""
    from .amalgamation import fibered_coproduct, inclusion

    A, B, C = _norm(p, A), _norm(p, B), _norm(p, C)
    g = generatorify(p, A + B + C)
    P1 = g.presentation
    els = g.elements
    Cs, As, Bs = els[len(A) + len(B):], els[: len(A)], els[len(A): len(A) + len(B)]

    def restrict(X: list[Term]) -> Presentation:
        cl = GeneratorClosure(P1, X)
        gens = [n for n in P1.generators if n in cl.reached]
        return Presentation(P1.sig, gens, [a for a in P1.diagram.atoms if atom_vars(a) <= cl.reached])

    QC, QAC, QBC = restrict(Cs), restrict(Cs + As), restrict(Cs + Bs)
    am = fibered_coproduct(inclusion(QC, QAC), inclusion(QC, QBC))
    D = am.presentation
    to_ambient: dict[str, Term] = {}
    for gen in QAC.generators:
        to_ambient[gen] = Leaf(gen)
    for gen in QBC.generators:
        to_ambient[am.right.assignment[gen].name] = Leaf(gen)
    gens = list(D.generators)
    reason = isomorphic_tuples(D, [Leaf(n) for n in gens], P1, [to_ambient[n] for n in gens])
    if reason is None:
        return IndepVerdict(Kind.INDEPENDENT, None, "tensor")
    collapsed = _collapsed_pair(gens, to_ambient)
    return IndepVerdict(Kind.DEPENDENT, collapsed or reason, "tensor")


def _collapsed_pair(gens: list[str], image: dict[str, Term]) -> str | None:
    seen: dict[Term, str] = {}
    for n in gens:
        other = seen.setdefault(image[n], n)
        if other != n:
            return f"{other} and {n} both map to {render_term(image[n])}"
    return None
