"""Finite witnesses: a TP2 array, a formula that forks without dividing, and a base-monotonicity failure.

Every inconsistency reported here is a clash found by ``check_consistent``
on an explicit diagram, and every consistency claim comes with a realized
extension that is re-checked element by element.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .amalgamation import realize_extension
from .core import App, GenstructError, Leaf, Signature, Term, parse_signature, render_term
from .diagrams import Eq, ExtensionDiagram, FlatDiagram, FunEq, Or, Violation, check_consistent, evaluate
from .independence import IndepVerdict, alg_indep
from .structures import Presentation, fresh_name, holds

PATH_LIMIT = 10_000
PATH_SAMPLE = 100


class SignatureLacksFunction(GenstructError):
    pass


class PreconditionFailed(GenstructError):
    pass


def _function_arity(sig: Signature | None, fn: str) -> tuple[Signature, int]:
    if sig is None:
        sig = parse_signature(f"func {fn} 2")
    arity = sig.functions.get(fn)
    if arity is None or arity < 2:
        raise SignatureLacksFunction(f"signature has no function {fn!r} of arity at least 2")
    return sig, arity


def _tuple_names(stem: str, width: int) -> tuple[str, ...]:
    return (stem,) if width == 1 else tuple(f"{stem}_{j}" for j in range(width))


Pattern = tuple[str, tuple[str, ...], str]  # f(args) = value, "x" marks the free variable


def _instantiate(pattern: Pattern, x: str) -> FunEq:
    fn, args, value = pattern
    return FunEq(fn, tuple(x if a == "x" else a for a in args), x if value == "x" else value)


def pair_clash(p: Presentation, first: Pattern, second: Pattern) -> Violation | None:
    """A function-value clash for ``first & second`` under every choice of x.

    x ranges over a fresh element and every generator of ``p``; a formal
    value of x behaves like a fresh one after naming it. Returns the clash
    for fresh x, or None if some choice is consistent.
    """
    fresh = fresh_name("x", set(p.generators) | p.sig.symbols)
    witness = None
    for x in (fresh,) + p.generators:
        vars_ = p.generators + ((fresh,) if x == fresh else ())
        d = FlatDiagram(vars_, p.diagram.atoms | {_instantiate(first, x), _instantiate(second, x)})
        clashes = [v for v in check_consistent(d) if v.clause == 2]
        if not clashes:
            return None
        if witness is None:
            witness = clashes[0]
    return witness


@dataclass
class FamilyCheck:
    """Pairwise inconsistency of one family of formula instances."""

    label: str
    pairs: int
    clashes: list[str]

    @property
    def ok(self) -> bool:
        return len(self.clashes) == self.pairs

    def to_dict(self) -> dict:
        return {"label": self.label, "pairs": self.pairs, "inconsistent_pairs": len(self.clashes), "example": self.clashes[:1]}


def _family_check(p: Presentation, label: str, patterns: Sequence[Pattern]) -> FamilyCheck:
    clashes = []
    pairs = 0
    for first, second in itertools.combinations(patterns, 2):
        pairs += 1
        v = pair_clash(p, first, second)
        if v is not None:
            clashes.append(str(v))
    return FamilyCheck(label, pairs, clashes)


def _realize_conjunction(p: Presentation, patterns: Sequence[Pattern]) -> tuple[Presentation, Term] | None:
    """Realize x with all ``patterns`` true; re-check each equation in the result."""
    xs = sorted({a for fn, args, v in patterns for a in args + (v,) if a != "x"}, key=p.generators.index)
    d = ExtensionDiagram(tuple(xs), ("x",), [_instantiate(pt, "x") for pt in patterns])
    q, (x,) = realize_extension(p, [Leaf(n) for n in xs], d)
    for fn, args, value in patterns:
        lhs = App(fn, tuple(x if a == "x" else Leaf(a) for a in args))
        if not holds(q, Eq(lhs, x if value == "x" else Leaf(value))):
            return None
    return q, x


@dataclass
class TP2Report:
    function: str
    arity: int
    n_rows: int
    n_cols: int
    presentation: Presentation
    rows: list[FamilyCheck]
    paths_total: int
    paths_checked: int
    sampled: bool
    paths_realized: int
    example_path: tuple[int, ...] = ()
    example_witness: str = ""

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows) and self.paths_realized == self.paths_checked

    def to_dict(self) -> dict:
        return {
            "demo": "tp2",
            "function": self.function,
            "arity": self.arity,
            "rows": self.n_rows,
            "cols": self.n_cols,
            "row_checks": [r.to_dict() for r in self.rows],
            "paths_total": self.paths_total,
            "paths_checked": self.paths_checked,
            "sampled": self.sampled,
            "paths_realized": self.paths_realized,
            "example_path": list(self.example_path),
            "example_witness": self.example_witness,
            "ok": self.ok,
        }

    def render(self) -> str:
        lines = [f"TP2 array for {self.function}/{self.arity}: {self.n_rows} rows x {self.n_cols} columns"]
        for r in self.rows:
            lines.append(f"  {r.label}: {len(r.clashes)}/{r.pairs} pairs inconsistent")
            if r.clashes:
                lines.append(f"    e.g. {r.clashes[0]}")
        how = f"sample of {self.paths_checked} (seed 0)" if self.sampled else "all"
        lines.append(f"  paths: {self.paths_realized}/{self.paths_checked} realized ({how} of {self.paths_total})")
        if self.example_path:
            lines.append(f"    path {list(self.example_path)} realized by {self.example_witness}")
        lines.append("  result: " + ("ok" if self.ok else "FAILED"))
        return "\n".join(lines) + "\n"


def tp2_array(n_rows: int, n_cols: int, sig: Signature | None = None, fn: str = "f") -> TP2Report:
    """Rows ``f(x,b_i) = c_ij`` are 2-inconsistent; every path through the rows is consistent."""
    sig, arity = _function_arity(sig, fn)
    if n_rows < 2 or n_cols < 2:
        raise PreconditionFailed("the array needs at least 2 rows and 2 columns")
    bs = [_tuple_names(f"b{i}", arity - 1) for i in range(n_rows)]
    cs = [[f"c{i}_{j}" for j in range(n_cols)] for i in range(n_rows)]
    p = Presentation(sig, [n for b in bs for n in b] + [n for row in cs for n in row])

    def pattern(i: int, j: int) -> Pattern:
        return (fn, ("x",) + bs[i], cs[i][j])

    rows = [_family_check(p, f"row {i}", [pattern(i, j) for j in range(n_cols)]) for i in range(n_rows)]

    total = n_cols ** n_rows
    if total <= PATH_LIMIT:
        paths = list(itertools.product(range(n_cols), repeat=n_rows))
    else:
        rng = random.Random(0)
        paths = [tuple(rng.randrange(n_cols) for _ in range(n_rows)) for _ in range(PATH_SAMPLE)]
    realized = 0
    example: tuple[tuple[int, ...], str] | None = None
    for path in paths:
        got = _realize_conjunction(p, [pattern(i, j) for i, j in enumerate(path)])
        if got is not None:
            realized += 1
            if example is None:
                example = (path, render_term(got[1]))
    return TP2Report(
        fn, arity, n_rows, n_cols, p, rows, total, len(paths), total > PATH_LIMIT, realized,
        *(example or ((), "")),
    )


@dataclass
class DisjunctionWitness:
    shape: str
    realized_by: str
    instances: int
    satisfied: int

    @property
    def ok(self) -> bool:
        return self.satisfied == self.instances

    def to_dict(self) -> dict:
        return {"shape": self.shape, "realized_by": self.realized_by, "instances": self.instances, "satisfied": self.satisfied}


@dataclass
class ForkReport:
    function: str
    arity: int
    n: int
    families: list[FamilyCheck]
    witnesses: list[DisjunctionWitness]

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.families) and all(w.ok for w in self.witnesses)

    def to_dict(self) -> dict:
        return {
            "demo": "fork-not-divide",
            "function": self.function,
            "arity": self.arity,
            "n": self.n,
            "families": [f.to_dict() for f in self.families],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "ok": self.ok,
        }

    def render(self) -> str:
        lines = [f"forking without dividing for {self.function}/{self.arity}, sequences of length {self.n}"]
        for f in self.families:
            lines.append(f"  {f.label}: {len(f.clashes)}/{f.pairs} pairs inconsistent")
            if f.clashes:
                lines.append(f"    e.g. {f.clashes[0]}")
        for w in self.witnesses:
            lines.append(f"  {w.shape}: disjunction holds in {w.satisfied}/{w.instances} instances at {w.realized_by}")
        lines.append("  result: " + ("ok" if self.ok else "FAILED"))
        return "\n".join(lines) + "\n"


def _disjunction(fn: str, arity: int, b: Sequence[str], c: str, x: Term):
    """``f(x,b) = c | f(x,...,x) = b[0]``"""
    bl = tuple(Leaf(n) for n in b)
    return Or((Eq(App(fn, (x,) + bl), Leaf(c)), Eq(App(fn, (x,) * arity), bl[0])))


def _identity_env(p: Presentation) -> dict[str, Term]:
    return {g: Leaf(g) for g in p.generators}


def fork_not_divide_demo(n: int, sig: Signature | None = None, fn: str = "f") -> ForkReport:
    """Both disjuncts of ``f(x,b) = c | f(x,...,x) = b[0]`` divide, but the disjunction does not."""
    sig, arity = _function_arity(sig, fn)
    if n < 2:
        raise PreconditionFailed("sequence length must be at least 2")
    diag = ("x",) * arity

    # constant b, distinct c_i
    b = _tuple_names("b", arity - 1)
    cs = [f"c{i}" for i in range(n)]
    p_const = Presentation(sig, b + tuple(cs))
    const_family = _family_check(p_const, f"{fn}(x,b) = c_i with b constant", [(fn, ("x",) + b, c) for c in cs])

    # distinct b_i
    bis = [_tuple_names(f"b{i}", arity - 1) for i in range(n)]
    dcs = [f"c{i}" for i in range(n)]
    p_dist = Presentation(sig, [m for bi in bis for m in bi] + dcs)
    dist_family = _family_check(p_dist, f"{fn}(x,...,x) = b_i with b_i distinct", [(fn, diag, bi[0]) for bi in bis])

    witnesses = []
    q, x = _realize_conjunction(p_const, [(fn, diag, b[0])])
    sat = sum(evaluate(_disjunction(fn, arity, b, c, x), q, _identity_env(q)) for c in cs)
    witnesses.append(DisjunctionWitness("constant b", f"{render_term(x)} with {fn}(x,...,x) = {b[0]}", n, sat))
    q, x = _realize_conjunction(p_dist, [(fn, ("x",) + bi, c) for bi, c in zip(bis, dcs)])
    sat = sum(evaluate(_disjunction(fn, arity, bi, c, x), q, _identity_env(q)) for bi, c in zip(bis, dcs))
    witnesses.append(DisjunctionWitness("distinct b_i", f"{render_term(x)} with {fn}(x,b_i) = c_i", n, sat))
    return ForkReport(fn, arity, n, [const_family, dist_family], witnesses)


@dataclass
class BaseMonotonicityReport:
    presentation: Presentation
    a: list[Term]
    b: list[Term]
    c: Term
    base: list[Term]
    over_base: IndepVerdict
    over_base_b: IndepVerdict
    equation_holds: bool = field(default=False)

    @property
    def A(self) -> list[Term]:
        return self.a

    @property
    def B(self) -> list[Term]:
        return self.b + [self.c]

    @property
    def verdicts(self) -> tuple[IndepVerdict, IndepVerdict]:
        return self.over_base, self.over_base_b

    @property
    def ok(self) -> bool:
        return self.over_base.is_independent and self.over_base_b.witness == self.c and self.equation_holds

    def to_dict(self) -> dict:
        return {
            "demo": "base-mono",
            "presentation": str(self.presentation),
            "a_indep_bc_over_C": self.over_base.to_dict(),
            "a_indep_c_over_Cb": self.over_base_b.to_dict(),
            "witness_equation_holds": self.equation_holds,
            "ok": self.ok,
        }

    def render(self) -> str:
        fb = ",".join(render_term(e) for e in self.b)
        base = ", ".join(render_term(e) for e in self.base) or "empty set"
        lines = [
            "base monotonicity failure",
            *("  " + ln for ln in str(self.presentation).splitlines()),
            f"  over C = {base}:",
            f"    a vs {fb},{render_term(self.c)}: {self.over_base.kind.value}",
            f"    a vs {render_term(self.c)} over C,{fb}: {self.over_base_b.kind.value}"
            + (f" (witness {self.over_base_b.render_witness()})" if self.over_base_b.witness is not None else ""),
            f"  witness satisfies the defining equation: {'yes' if self.equation_holds else 'no'}",
            "  result: " + ("ok" if self.ok else "FAILED"),
        ]
        return "\n".join(lines) + "\n"


def base_monotonicity_failure(
    sig: Signature | None = None, fn: str = "f", base: Sequence[str] = ()
) -> BaseMonotonicityReport:
    """Build a, b, c with ``f(a,b) = c`` and a independent from b c over the base, but not from c over b."""
    sig, arity = _function_arity(sig, fn)
    b = _tuple_names("b", arity - 1)
    p = Presentation(sig, ("a",) + b + ("c",) + tuple(base), [FunEq(fn, ("a",) + b, "c")])
    A = [Leaf("a")]
    B = [Leaf(n) for n in b]
    c = Leaf("c")
    C = [Leaf(n) for n in base]
    v1 = alg_indep(p, A, B + [c], C)
    v2 = alg_indep(p, A, [c], C + B)
    eq = isinstance(v2.witness, Term) and holds(p, Eq(App(fn, tuple(A + B)), v2.witness))
    return BaseMonotonicityReport(p, A, B, c, C, v1, v2, eq)

