"""Random instance generators and brute-force oracles shared by the tests.

The oracles deliberately avoid the library's closure, transport, and
gluing code: they enumerate terms, search assignments, or compare
bounded-depth atomic diagrams directly.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

from genstruct.core import App, GenstructError, Leaf, Signature, Term, normalize, redex_positions, rewrite_at
from genstruct.diagrams import FlatAtom, FlatDiagram, FunEq, NegRel, Rel, check_consistent
from genstruct.structures import Presentation

# -- random instances -----------------------------------------------------------


def random_signature(rng: random.Random, max_arity: int = 2, funcs: int = 2, rels: int = 1) -> Signature:
    fs = {f"f{i}": rng.randint(1, max_arity) for i in range(rng.randint(1, funcs) if funcs else 0)}
    rs = {f"R{i}": rng.randint(1, max_arity) for i in range(rng.randint(0, rels))}
    return Signature(fs, rs)


def random_atoms(rng: random.Random, sig: Signature, names: Sequence[str], count: int) -> list[FlatAtom]:
    """Up to ``count`` atoms over ``names`` forming a consistent diagram."""
    atoms: set[FlatAtom] = set()
    symbols = sorted(sig.symbols)
    for _ in range(count * 3):
        if len(atoms) >= count or not symbols or not names:
            break
        s = rng.choice(symbols)
        args = tuple(rng.choice(names) for _ in range(sig.arity(s)))
        if s in sig.relations:
            cand = Rel(s, args) if rng.random() < 0.7 else NegRel(s, args)
        else:
            cand = FunEq(s, args, rng.choice(names))
        if not check_consistent(FlatDiagram(tuple(names), atoms | {cand})):
            atoms.add(cand)
    return sorted(atoms, key=lambda a: a.key())


def random_presentation(rng: random.Random, sig: Signature, n_gens: int, n_atoms: int, prefix: str = "g") -> Presentation:
    gens = [f"{prefix}{i}" for i in range(n_gens)]
    return Presentation(sig, gens, random_atoms(rng, sig, gens, n_atoms))


def random_term(rng: random.Random, sig: Signature, leaves: Sequence[str], depth: int) -> Term:
    funcs = sorted(sig.functions)
    if depth == 0 or not funcs or rng.random() < 0.3:
        consts = [f for f in funcs if sig.functions[f] == 0]
        if consts and rng.random() < 0.2:
            return App(rng.choice(consts), ())
        return Leaf(rng.choice(leaves))
    f = rng.choice(funcs)
    return App(f, [random_term(rng, sig, leaves, depth - 1) for _ in range(sig.functions[f])])


def random_term_of_depth(rng: random.Random, sig: Signature, leaves: Sequence[str], depth: int) -> Term:
    """A random term of exactly ``depth`` (constants have depth 1)."""
    consts = sorted(f for f, n in sig.functions.items() if n == 0)
    if depth == 0:
        return Leaf(rng.choice(leaves))
    if depth == 1 and consts and rng.random() < 0.2:
        return App(rng.choice(consts), ())
    f = rng.choice(sorted(fn for fn, n in sig.functions.items() if n > 0))
    n = sig.functions[f]
    deep = rng.randrange(n)
    args = [
        random_term_of_depth(rng, sig, leaves, depth - 1 if i == deep else rng.randint(0, depth - 1))
        for i in range(n)
    ]
    return App(f, args)


def random_element(rng: random.Random, p: Presentation, depth: int) -> Term:
    return p.normal(random_term(rng, p.sig, p.generators, depth))


# -- oracles --------------------------------------------------------------------


def normal_form_by_random_strategy(t: Term, rw, rng: random.Random) -> tuple[Term, int]:
    """Rewrite one randomly chosen redex at a time until none is left."""
    steps = 0
    while True:
        positions = redex_positions(t, rw)
        if not positions:
            return t, steps
        t = rewrite_at(t, rng.choice(positions), rw)
        steps += 1


def normal_form_outermost(t: Term, rw) -> Term:
    while True:
        positions = redex_positions(t, rw)
        if not positions:
            return t
        t = rewrite_at(t, positions[0], rw)


def enumerate_closure(p: Presentation, seeds: Iterable[Term], depth_cap: int) -> set[Term]:
    """All elements of the generated substructure whose term depth is at most ``depth_cap``.

    Forward enumeration: apply every function to every tuple of known
    elements, normalize, and keep results within the cap, until nothing new
    appears. Generators have depth 0, so every generator reachable through
    the equations is found. Each round only uses tuples with a new entry;
    elements already at the cap are never arguments.
    """
    found = {p.normal(s) for s in seeds}
    funcs = sorted(p.sig.functions.items())
    fresh = set(found)
    while True:
        usable = [e for e in found if e.depth < depth_cap]
        new = set()
        for fn, arity in funcs:
            for args in itertools.product(usable, repeat=arity):
                if arity and not any(a in fresh for a in args):
                    continue
                if not arity and found - fresh:
                    continue
                e = normalize(App(fn, args), p.rw)
                if e.depth <= depth_cap and e not in found:
                    new.add(e)
        if not new:
            return found
        found |= new
        fresh = new


def brute_alg_dependent(p: Presentation, A, B, C, depth_cap: int) -> set[Term]:
    ca = enumerate_closure(p, list(C) + list(A), depth_cap)
    cb = enumerate_closure(p, list(C) + list(B), depth_cap)
    c = enumerate_closure(p, C, depth_cap)
    return (ca & cb) - c


def all_terms(sig: Signature, leaves: Sequence[str], depth: int) -> list[Term]:
    level = [Leaf(n) for n in leaves] + [App(f, ()) for f, n in sorted(sig.functions.items()) if n == 0]
    terms = list(level)
    for _ in range(depth):
        nxt = []
        seen = set(terms)
        for fn, arity in sorted(sig.functions.items()):
            if arity == 0:
                continue
            for args in itertools.product(terms, repeat=arity):
                t = App(fn, args)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        terms.extend(nxt)
    return terms


def atomic_profile(p: Presentation, tup: Sequence[Term], depth: int) -> tuple:
    """Truth values of all atomic formulas in variables v0.. up to term depth ``depth``.

    Returned as an equality partition (first-occurrence labels) plus the
    relation truth table, so two tuples have equal profiles iff they satisfy
    the same bounded-depth atomic formulas.
    """
    names = [f"v{i}" for i in range(len(tup))]
    env = dict(zip(names, tup))
    terms = all_terms(p.sig, names, depth)

    def value(t: Term) -> Term:
        if isinstance(t, Leaf):
            return env[t.name]
        return p.apply(t.fn, [value(a) for a in t.args])

    values = [value(t) for t in terms]
    labels: dict[Term, int] = {}
    partition = tuple(labels.setdefault(v, len(labels)) for v in values)
    rels = []
    for rel, arity in sorted(p.sig.relations.items()):
        for idx in itertools.product(range(len(terms)), repeat=arity):
            rels.append(p.holds_rel(rel, [values[i] for i in idx]))
    return partition, tuple(rels)


def is_homomorphism(src: Presentation, dst: Presentation, assignment: dict[str, Term]) -> bool:
    """Positive atoms of ``src`` hold of the images in ``dst``."""
    for atom in src.diagram.atoms:
        if isinstance(atom, FunEq):
            if dst.apply(atom.fn, [assignment[a] for a in atom.args]) != assignment[atom.value]:
                return False
        elif isinstance(atom, Rel):
            if not dst.holds_rel(atom.rel, [assignment[a] for a in atom.args]):
                return False
    return True


def evaluate_in(dst: Presentation, e: Term, assignment: dict[str, Term]) -> Term:
    if isinstance(e, Leaf):
        return assignment[e.name]
    return dst.apply(e.fn, [evaluate_in(dst, a, assignment) for a in e.args])


def homomorphisms(src: Presentation, dst: Presentation, pool: Sequence[Term], fixed: dict[str, Term] | None = None):
    """Every assignment of src's generators into ``pool`` that is a homomorphism.

    Backtracking over generators in order; each atom is checked as soon as
    all of its names are assigned.
    """
    gens = list(src.generators)
    fixed = dict(fixed or {})
    order = {g: i for i, g in enumerate(gens)}
    by_last: dict[int, list[FlatAtom]] = {}
    for atom in src.diagram.atoms:
        if isinstance(atom, NegRel):
            continue
        names = set(atom.args) | ({atom.value} if isinstance(atom, FunEq) else set())
        last = max((order[n] for n in names), default=-1)
        by_last.setdefault(last, []).append(atom)

    asg: dict[str, Term] = {}

    def ok(atom) -> bool:
        if isinstance(atom, FunEq):
            return dst.apply(atom.fn, [asg[a] for a in atom.args]) == asg[atom.value]
        return dst.holds_rel(atom.rel, [asg[a] for a in atom.args])

    def go(i: int):
        if i == len(gens):
            yield dict(asg)
            return
        g = gens[i]
        choices = [fixed[g]] if g in fixed else pool
        for v in choices:
            asg[g] = v
            if all(ok(a) for a in by_last.get(i, [])):
                yield from go(i + 1)
        asg.pop(g, None)

    yield from go(0)


def random_formula(rng: random.Random, sig: Signature, names: Sequence[str], depth: int, term_depth: int = 2):
    from genstruct.diagrams import And, Eq, Not, Or, RelAtom

    if depth == 0 or rng.random() < 0.35:
        rels = sorted(sig.relations)
        if rels and rng.random() < 0.5:
            r = rng.choice(rels)
            return RelAtom(r, tuple(random_term(rng, sig, names, term_depth) for _ in range(sig.relations[r])))
        return Eq(random_term(rng, sig, names, term_depth), random_term(rng, sig, names, term_depth))
    kind = rng.choice(["not", "and", "or"])
    if kind == "not":
        return Not(random_formula(rng, sig, names, depth - 1, term_depth))
    subs = tuple(random_formula(rng, sig, names, depth - 1, term_depth) for _ in range(rng.randint(2, 3)))
    return And(subs) if kind == "and" else Or(subs)


def random_flatten_instance(rng: random.Random):
    """(phi, B, a, b) with B satisfying phi at (a, b) and b outside the closure of a."""
    from genstruct.diagrams import Not, evaluate
    from genstruct.structures import generated_closure

    while True:
        sig = random_signature(rng, funcs=2, rels=1)
        B = random_presentation(rng, sig, rng.randint(2, 5), rng.randint(0, 6))
        pool = list(dict.fromkeys(random_element(rng, B, rng.choice([0, 0, 1])) for _ in range(8)))
        rng.shuffle(pool)
        a = pool[: rng.randint(0, min(2, len(pool)))]
        closure = generated_closure(B, a)
        rest = [e for e in pool if e not in closure]
        if not rest:
            continue
        b = rest[: rng.randint(1, min(2, len(rest)))]
        xs = {f"x{i}": e for i, e in enumerate(a)}
        ys = {f"y{i}": e for i, e in enumerate(b)}
        phi = random_formula(rng, sig, list(xs) + list(ys), 3)
        if not evaluate(phi, B, {**xs, **ys}):
            phi = Not(phi)
        return phi, B, xs, ys


def _new_atoms(rng: random.Random, sig: Signature, old: Sequence[str], new: Sequence[str], count: int) -> list[FlatAtom]:
    """Random consistent atoms over old+new, each mentioning a new name among its arguments."""
    names = list(old) + list(new)
    atoms: list[FlatAtom] = []
    for atom in random_atoms(rng, sig, names, count * 3):
        if set(atom.args) & set(new):
            atoms.append(atom)
        if len(atoms) == count:
            break
    return atoms


def random_pushout_instance(rng: random.Random, max_extra: int = 3):
    """(B, AB, Bp) where B is included in both; at most ``max_extra`` new generators in total."""
    from genstruct.amalgamation import inclusion

    while True:
        sig = random_signature(rng, funcs=rng.randint(0, 2), rels=rng.randint(0, 1))
        if not sig.functions and not sig.relations:
            continue
        B = random_presentation(rng, sig, rng.randint(1, 2), rng.randint(0, 2), prefix="b")
        n_left = rng.randint(1, max_extra - 1)
        n_right = rng.randint(1, max_extra - n_left)
        xs = [f"x{i}" for i in range(n_left)]
        ys = [f"y{i}" for i in range(n_right)]
        try:
            AB = B.extend(xs, _new_atoms(rng, sig, B.generators, xs, rng.randint(0, 3)))
            Bp = B.extend(ys, _new_atoms(rng, sig, B.generators, ys, rng.randint(0, 3)))
        except GenstructError:
            continue
        if inclusion(B, AB).is_embedding() and inclusion(B, Bp).is_embedding():
            return B, AB, Bp


def cocones(AB: Presentation, Bp: Presentation, shared: Sequence[str], T: Presentation, pool: Sequence[Term]):
    """Pairs of homomorphisms AB -> T and Bp -> T agreeing on the shared generators."""
    for u in homomorphisms(AB, T, pool):
        for v in homomorphisms(Bp, T, pool, {g: u[g] for g in shared}):
            yield u, v


def random_complete_target(rng: random.Random, sig: Signature, n_gens: int, prefix: str = "t") -> Presentation:
    """Presentation whose functions are total on its generators, so its universe is exactly them."""
    from genstruct.diagrams import complete

    gens = [f"{prefix}{i}" for i in range(n_gens)]
    d = FlatDiagram(gens, random_atoms(rng, sig, gens, rng.randint(0, 2 * n_gens)))
    return Presentation(sig, gens, complete(d, sig, rng.choice(gens)).atoms)


def random_indep_theorem_instance(rng: random.Random):
    """(P, C, a, ap, b, c) where ap copies a's diagram over C; hypotheses are not guaranteed."""
    from genstruct.diagrams import rename_atom

    sig = random_signature(rng, funcs=rng.randint(1, 2), rels=rng.randint(0, 2))
    C = [f"k{i}" for i in range(rng.randint(0, 1))]
    a = [f"a{i}" for i in range(rng.randint(1, 2))]
    ap = [f"p{i}" for i in range(len(a))]
    b = [f"b{i}" for i in range(rng.randint(1, 2))]
    c = [f"c{i}" for i in range(rng.randint(1, 2))]
    base_atoms = random_atoms(rng, sig, C, rng.randint(0, 2))
    a_atoms = _new_atoms(rng, sig, C, a, rng.randint(0, 3))
    ap_atoms = [rename_atom(x, dict(zip(a, ap))) for x in a_atoms]
    ab_atoms = _new_atoms(rng, sig, C + a, b, rng.randint(0, 3))
    apc_atoms = _new_atoms(rng, sig, C + ap, c, rng.randint(0, 3))
    atoms = set(base_atoms) | set(a_atoms) | set(ap_atoms) | set(ab_atoms) | set(apc_atoms)
    gens = C + a + ap + b + c
    if check_consistent(FlatDiagram(gens, atoms)):
        return None
    P = Presentation(sig, gens, atoms)
    return P, *([Leaf(n) for n in grp] for grp in (C, a, ap, b, c))
