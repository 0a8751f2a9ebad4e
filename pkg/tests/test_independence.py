import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from genstruct.core import Leaf, parse_signature
from genstruct.diagrams import FunEq, Rel
from genstruct.independence import (
    BoundTooLargeForBudget,
    Kind,
    alg_indep,
    closure_fragment,
    kim_indep_proxy,
    m_indep_bounded,
    tensor_indep,
)
from genstruct.structures import Presentation, generated_closure
from helpers import brute_alg_dependent, random_element, random_presentation, random_signature

SIG = parse_signature("func f 2\nfunc g 2\nrel R 1")


def L(*names):
    return [Leaf(n) for n in names]


def _random_instance(rng, unary=False):
    sig = random_signature(rng, max_arity=1 if unary else 2)
    p = random_presentation(rng, sig, rng.randint(1, 4), rng.randint(0, 7))

    def pick():
        return [random_element(rng, p, rng.choice([0, 0, 0, 1])) for _ in range(rng.randint(0, 2))]

    return p, pick(), pick(), pick()


class TestAlgebraic:
    def test_free_generators(self):
        p = Presentation(SIG, ["a", "b"], [])
        assert alg_indep(p, L("a"), L("b"), []).kind is Kind.INDEPENDENT

    def test_shared_value(self):
        p = Presentation(SIG, ["a", "b", "c", "d"], [FunEq("f", ("a", "b"), "c"), FunEq("g", ("b", "d"), "c")])
        v = alg_indep(p, L("a", "b"), L("b", "d"), L("b"))
        assert v.kind is Kind.DEPENDENT
        assert v.witness == Leaf("c")
        assert v.exit_code == 1
        brute = brute_alg_dependent(p, L("a", "b"), L("b", "d"), L("b"), 2)
        assert {e for e in brute if isinstance(e, Leaf)} == {Leaf("c")}

    def test_a_inside_base(self):
        p = Presentation(SIG, ["a", "b", "c"], [FunEq("f", ("c", "c"), "a"), FunEq("f", ("a", "b"), "c")])
        assert alg_indep(p, L("a"), L("b"), L("c")).is_independent

    def test_formal_common_element(self):
        p = Presentation(SIG, ["a", "b"], [])
        fab = p.element("f(a,b)")
        v = alg_indep(p, [fab], L("a", "b"), [])
        assert v.witness == fab

    def test_kim_relabels(self):
        p = Presentation(SIG, ["a", "b", "c", "d"], [FunEq("f", ("a", "b"), "c"), FunEq("g", ("b", "d"), "c")])
        for args in [(L("a"), L("b"), []), (L("a", "b"), L("b", "d"), L("b")), (L("a"), L("b"), L("a"))]:
            k, a = kim_indep_proxy(p, *args), alg_indep(p, *args)
            assert (k.kind, k.witness) == (a.kind, a.witness)
            assert k.relation == "K"
            assert "models" in k.note

    @given(st.integers(0, 10**6))
    def test_symmetry_and_monotonicity(self, seed):
        p, A, B, C = _random_instance(random.Random(seed))
        v = alg_indep(p, A, B, C)
        assert v.kind == alg_indep(p, B, A, C).kind
        if v.is_independent:
            for k in range(len(A) + 1):
                for A2 in itertools.combinations(A, k):
                    for j in range(len(B) + 1):
                        for B2 in itertools.combinations(B, j):
                            assert alg_indep(p, A2, B2, C).is_independent
        else:
            w = v.witness
            assert w in generated_closure(p, C + A) and w in generated_closure(p, C + B)
            assert w not in generated_closure(p, C)

    @given(st.integers(0, 10**6))
    def test_existence_over_base(self, seed):
        rng = random.Random(seed)
        p, A, _, C = _random_instance(rng)
        basis = generated_closure(p, C).basis()
        members = list(basis)
        for fn, n in p.sig.functions.items():
            for args in itertools.islice(itertools.product(basis, repeat=n), 4):
                members.append(p.apply(fn, args))
        assert alg_indep(p, A, members, C).is_independent

    @given(st.integers(0, 10**6))
    def test_agrees_with_bruteforce(self, seed):
        rng = random.Random(seed)
        unary = rng.random() < 0.5
        p, A, B, C = _random_instance(rng, unary)
        cap = 4 if unary else 2
        v = alg_indep(p, A, B, C)
        brute = brute_alg_dependent(p, A, B, C, cap)
        assert v.is_independent == (not brute)
        if not v.is_independent:
            assert v.witness in brute


class TestBoundedM:
    def test_relational_exact(self):
        p = Presentation(parse_signature("rel R 1"), ["a", "b"], [])
        assert m_indep_bounded(p, L("a"), L("b"), []).kind is Kind.INDEPENDENT

    def test_base_extension_creates_dependence(self):
        sig = parse_signature("func f 2")
        p = Presentation(sig, ["a", "b", "c"], [FunEq("f", ("a", "b"), "c")])
        v = m_indep_bounded(p, L("a"), L("b", "c"), [])
        assert v.kind is Kind.DEPENDENT
        assert v.witness == (Leaf("b"),)
        assert v.render_witness() == "{b}"
        assert alg_indep(p, L("a"), L("b", "c"), []).is_independent

    def test_free_binary_unknown(self):
        p = Presentation(parse_signature("func f 2"), ["a", "b"], [])
        v = m_indep_bounded(p, L("a"), L("b"), [], depth_bound=2)
        assert v.kind is Kind.UNKNOWN
        assert v.exit_code == 2

    def test_finite_unary_closure_exact(self):
        sig = parse_signature("func s 1")
        p = Presentation(sig, ["a", "b", "c"], [FunEq("s", ("b",), "c"), FunEq("s", ("c",), "b"), FunEq("s", ("a",), "a")])
        assert closure_fragment(p, L("b"), 0) == (L("b", "c"), True)
        assert m_indep_bounded(p, L("a"), L("b"), []).kind is Kind.INDEPENDENT

    def test_budget(self):
        p = Presentation(parse_signature("func f 2\nfunc g 2"), ["a", "b"], [])
        with pytest.raises(BoundTooLargeForBudget):
            m_indep_bounded(p, L("a"), L("b"), [], depth_bound=2, max_subsets=1000)

    def test_negative_depth(self):
        with pytest.raises(ValueError):
            m_indep_bounded(Presentation(SIG, ["a"], []), L("a"), [], [], depth_bound=-1)

    @given(st.integers(0, 10**6))
    def test_implies_algebraic(self, seed):
        p, A, B, C = _random_instance(random.Random(seed), unary=True)
        try:
            v = m_indep_bounded(p, A, B, C, depth_bound=1, max_subsets=4096)
        except BoundTooLargeForBudget:
            return
        if not alg_indep(p, A, B, C).is_independent:
            assert v.kind is Kind.DEPENDENT
            assert v.witness == tuple(p.normal(c) for c in C)
        if v.kind is Kind.DEPENDENT:
            assert not alg_indep(p, A, B, v.witness).is_independent


class TestTensor:
    def test_free(self):
        p = Presentation(SIG, ["a", "b"], [])
        assert tensor_indep(p, L("a"), L("b"), []).is_independent

    def test_named_product_is_still_free(self):
        # c only names f(a,b), so <ab> is still the free structure on a, b
        p = Presentation(SIG, ["a", "b", "c"], [FunEq("f", ("a", "b"), "c")])
        assert tensor_indep(p, L("a"), L("b"), []).is_independent

    def test_relation_on_mixed_value(self):
        p = Presentation(SIG, ["a", "b", "c"], [FunEq("f", ("a", "b"), "c"), Rel("R", ("c",))])
        v = tensor_indep(p, L("a"), L("b"), [])
        assert v.kind is Kind.DEPENDENT
        assert "R(c)" in v.render_witness()

    def test_collapse(self):
        p = Presentation(SIG, ["a", "b", "c"], [FunEq("f", ("a", "a"), "c"), FunEq("g", ("b", "b"), "c")])
        v = tensor_indep(p, L("a"), L("b"), [])
        assert v.kind is Kind.DEPENDENT

    def test_a_inside_base(self):
        p = Presentation(SIG, ["a", "b", "c"], [FunEq("f", ("c", "c"), "a"), Rel("R", ("a",))])
        assert tensor_indep(p, L("a"), L("b"), L("c")).is_independent

    @given(st.integers(0, 10**6))
    def test_tensor_implies_algebraic(self, seed):
        p, A, B, C = _random_instance(random.Random(seed))
        if tensor_indep(p, A, B, C).is_independent:
            assert alg_indep(p, A, B, C).is_independent


def test_verdict_json_shape():
    v = alg_indep(Presentation(SIG, ["a"], []), L("a"), L("a"), [])
    assert v.to_dict() == {"relation": "a", "verdict": "dependent", "witness": "a", "note": None}
