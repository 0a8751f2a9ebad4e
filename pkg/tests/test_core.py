import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from genstruct.core import (
    App,
    ArityMismatch,
    DuplicateName,
    Leaf,
    ParseError,
    RewriteSystem,
    Signature,
    UnboundName,
    UnknownSymbol,
    normalize,
    parse_signature,
    parse_term,
    redex_positions,
    render_signature,
    render_term,
    sorted_terms,
    split_top_level,
)
from helpers import normal_form_by_random_strategy, normal_form_outermost, random_term


class TestSignature:
    def test_functions_and_relations(self):
        sig = parse_signature("func f 2\nrel R 1")
        assert sig.functions == {"f": 2}
        assert sig.relations == {"R": 1}

    def test_const_is_nullary_function(self):
        assert parse_signature("const e").functions == {"e": 0}

    def test_duplicate_name(self):
        with pytest.raises(DuplicateName) as exc:
            parse_signature("func f 2\nfunc f 3")
        assert exc.value.line == 2

    def test_duplicate_across_kinds(self):
        with pytest.raises(DuplicateName):
            parse_signature("func f 2\nrel f 1")

    @pytest.mark.parametrize("text", ["func f x", "func f -1", "rel R 0", "func f", "rel R 1 2"])
    def test_malformed_arity(self, text):
        with pytest.raises(ParseError) as exc:
            parse_signature("rel S 1\n" + text)
        assert "line 2" in str(exc.value)

    def test_unknown_directive(self):
        with pytest.raises(ParseError, match="line 1: unknown directive"):
            parse_signature("fun f 2")

    def test_comments_and_blank_lines(self):
        sig = parse_signature("# heading\n\nfunc f 1  # unary\n")
        assert sig.functions == {"f": 1}

    def test_round_trip(self):
        text = "const e\nfunc f 2\nfunc s 1\nrel R 2\n"
        sig = parse_signature(text)
        assert render_signature(sig) == text
        assert parse_signature(render_signature(sig)) == sig

    @given(
        st.dictionaries(st.from_regex(r"[a-e][a-z0-9_]{0,3}", fullmatch=True), st.integers(0, 3), max_size=4),
        st.dictionaries(st.from_regex(r"[A-E][a-z0-9_]{0,3}", fullmatch=True), st.integers(1, 3), max_size=3),
    )
    def test_round_trip_property(self, funcs, rels):
        sig = Signature(funcs, rels)
        assert parse_signature(render_signature(sig)) == sig


SIG = parse_signature("func f 2\nfunc s 1\nconst e\nrel R 1")


class TestTerms:
    def test_parse_application(self):
        assert parse_term("f(a,b)", SIG, {"a", "b"}) == App("f", [Leaf("a"), Leaf("b")])

    def test_nested_depth(self):
        t = parse_term("f(f(a,a),b)", SIG, {"a", "b"})
        assert t.depth == 2
        assert t.size == 5

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            parse_term("f(a)", SIG, {"a"})

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbol):
            parse_term("g(a)", SIG, {"a"})

    def test_unbound_leaf(self):
        with pytest.raises(UnboundName):
            parse_term("f(a,z)", SIG, {"a"})

    def test_constant_is_application(self):
        t = parse_term("e", SIG, set())
        assert t == App("e", ())
        assert t != Leaf("e")
        assert parse_term("e()", SIG, set()) == t
        assert render_term(t) == "e"

    def test_render_parse_up_to_whitespace(self):
        t = parse_term(" f( s(a) , e ) ", SIG, {"a"})
        assert render_term(t) == "f(s(a),e)"

    def test_canonical_order(self):
        a, b = Leaf("a"), Leaf("b")
        terms = [App("s", [a]), b, App("f", [a, a]), a, App("e", ())]
        assert [render_term(t) for t in sorted_terms(terms)] == ["a", "b", "e", "f(a,a)", "s(a)"]

    def test_split_top_level(self):
        assert split_top_level("a, f(a,b), s(b)") == ["a", "f(a,b)", "s(b)"]
        assert split_top_level("") == []

    @given(st.integers(0, 10_000))
    def test_render_parse_round_trip(self, seed):
        t = random_term(random.Random(seed), SIG, ["a", "b", "c"], 4)
        assert parse_term(render_term(t), SIG, {"a", "b", "c"}) == t


class TestNormalize:
    def test_single_rule(self):
        rw = RewriteSystem({("f", ("a", "b")): "c"})
        assert normalize(parse_term("f(a,b)", SIG), rw) == Leaf("c")

    def test_two_step_collapse(self):
        rw = RewriteSystem({("f", ("a", "b")): "a"})
        assert normalize(parse_term("f(f(a,b),b)", SIG), rw) == Leaf("a")

    def test_no_rules(self):
        t = parse_term("f(a,b)", SIG)
        assert normalize(t, RewriteSystem()) == t

    def test_constant_rule(self):
        rw = RewriteSystem({("e", ()): "a"})
        assert normalize(parse_term("s(e)", SIG), rw) == App("s", [Leaf("a")])

    def test_redex_positions_outermost_first(self):
        rw = RewriteSystem({("s", ("a",)): "a"})
        t = parse_term("s(s(a))", SIG)
        assert redex_positions(t, rw) == [(0,)]
        assert redex_positions(App("s", [Leaf("a")]), rw) == [()]


def _random_rules(rng: random.Random, names):
    rules = {}
    for _ in range(rng.randint(0, 8)):
        fn = rng.choice(["f", "s", "e"])
        arity = {"f": 2, "s": 1, "e": 0}[fn]
        rules[(fn, tuple(rng.choice(names) for _ in range(arity)))] = rng.choice(names)
    return RewriteSystem(rules)


@given(st.integers(0, 10**6))
def test_normalize_idempotent_and_strategy_independent(seed):
    rng = random.Random(seed)
    names = ["a", "b", "c"]
    rw = _random_rules(rng, names)
    t = random_term(rng, SIG, names, rng.randint(0, 6))
    nf = normalize(t, rw)
    assert normalize(nf, rw) == nf
    assert not redex_positions(nf, rw)
    assert normal_form_outermost(t, rw) == nf
    other, steps = normal_form_by_random_strategy(t, rw, rng)
    assert other == nf
    # each step shrinks the term
    assert steps <= t.size
