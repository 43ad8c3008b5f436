import math
import random

import pytest

from akgraph.errors import (
    NonQueryableAttributeError,
    QuerySyntaxError,
    TypeMismatchError,
    UnknownAttributeError,
)
from akgraph.query import (
    And,
    Compare,
    Composite,
    Or,
    Range,
    evaluate,
    match_ids,
    parse,
    pretty_print,
)
from helpers import naive_match_ids, random_ast, small_graph


# --- parsing ---------------------------------------------------------------

def test_parse_string_equality():
    assert parse("Ti='hello world'") == Compare("Ti", "=", "hello world")


def test_parse_normalizes_string_literals():
    assert parse("Ti='CAFÉ Au Lait!'") == Compare("Ti", "=", "cafe au lait")
    assert parse("AA.AuN='Maria  J.  Vega'") == Compare("AA.AuN", "=", "maria j vega")


def test_parse_numeric_comparisons():
    assert parse("Y=2014") == Compare("Y", "=", 2014)
    assert parse("CC>5") == Compare("CC", ">", 5)
    assert parse("ECC<=100") == Compare("ECC", "<=", 100)


def test_parse_date_comparison():
    assert parse("D>='2016-02-05'") == Compare("D", ">=", "2016-02-05")


def test_parse_range_inclusivity():
    assert parse("Y=[2010,2015)") == Range("Y", 2010, 2015, True, False)
    assert parse("Y=(2010,2015]") == Range("Y", 2010, 2015, False, True)
    assert parse("Y=[2010,2015]") == Range("Y", 2010, 2015, True, True)
    assert parse("Y=(2010,2015)") == Range("Y", 2010, 2015, False, False)


def test_parse_date_range():
    assert parse("D=['2016-01-01','2016-12-31']") == Range(
        "D", "2016-01-01", "2016-12-31", True, True)


def test_parse_and_or_fold_left():
    got = parse("Or(Y=2013,Y=2014,CC>5)")
    assert got == Or(Or(Compare("Y", "=", 2013), Compare("Y", "=", 2014)),
                     Compare("CC", ">", 5))


def test_parse_nested_boolean():
    got = parse("And(Or(Y=2010,Y=2011),Ti='x y')")
    assert got == And(Or(Compare("Y", "=", 2010), Compare("Y", "=", 2011)),
                      Compare("Ti", "=", "x y"))


def test_parse_composite():
    got = parse("And(Composite(AA.AuN='maria j vega'),Y=[2010,2014])")
    assert got == And(Composite("AA", Compare("AA.AuN", "=", "maria j vega")),
                      Range("Y", 2010, 2014, True, True))


def test_parse_composite_other_prefixes():
    assert parse("Composite(F.FN='physics')") == Composite(
        "F", Compare("F.FN", "=", "physics"))
    assert parse("Composite(J.JId=77)") == Composite("J", Compare("J.JId", "=", 77))


def test_parse_whitespace_tolerated():
    assert parse(" And( Y=2010 , CC>=3 ) ") == And(
        Compare("Y", "=", 2010), Compare("CC", ">=", 3))


# --- parse errors ----------------------------------------------------------

def test_empty_input_position_zero():
    with pytest.raises(QuerySyntaxError) as err:
        parse("")
    assert err.value.position == 0


def test_trailing_garbage_position():
    with pytest.raises(QuerySyntaxError) as err:
        parse("Y=2010 trailing")
    assert err.value.position == 7


def test_missing_literal():
    with pytest.raises(QuerySyntaxError):
        parse("Y=")


def test_unterminated_range():
    with pytest.raises(QuerySyntaxError):
        parse("Y=[2010,2015")


def test_single_arg_boolean_rejected():
    with pytest.raises(QuerySyntaxError):
        parse("And(Y=2010)")


def test_unknown_attribute():
    with pytest.raises(UnknownAttributeError):
        parse("Zz='a'")


def test_type_mismatches():
    with pytest.raises(TypeMismatchError):
        parse("Y='abc'")
    with pytest.raises(TypeMismatchError):
        parse("Ti=5")
    with pytest.raises(TypeMismatchError):
        parse("Ti>'abc'")
    with pytest.raises(TypeMismatchError):
        parse("RId>5")
    with pytest.raises(TypeMismatchError):
        parse("D='January 2nd'")


def test_composite_requires_single_prefix():
    with pytest.raises(QuerySyntaxError):
        parse("Composite(Y=2014)")
    with pytest.raises(QuerySyntaxError):
        parse("Composite(And(AA.AuN='a',Y=2010))")
    with pytest.raises(QuerySyntaxError):
        parse("Composite(And(AA.AuN='a',F.FId=1))")


def test_extended_attribute_gate():
    with pytest.raises(NonQueryableAttributeError):
        parse("E.DOI='10.1/x'")
    got = parse("E.DOI='10.1/X'", extended_query=True)
    assert got == Compare("E.DOI", "=", "10.1/X")  # raw, not normalized
    for attr in ("E.V", "E.I", "E.FP", "E.LP"):
        assert parse(f"{attr}='7'", extended_query=True) == Compare(attr, "=", "7")


def test_response_only_attributes_never_queryable():
    for attr in ("E.DN", "E.S", "E.VFN"):
        with pytest.raises(NonQueryableAttributeError):
            parse(f"{attr}='x'", extended_query=True)


# --- pretty printing -------------------------------------------------------

def test_pretty_print_goldens():
    for text in ("Ti='hello world'", "Y=2014", "Y=[2010,2015)",
                 "And(Composite(AA.AuN='maria j vega'),Y=[2010,2014])",
                 "D>='2016-02-05'", "Composite(F.FN='physics')"):
        assert pretty_print(parse(text)) == text


def test_round_trip_small_sample():
    rng = random.Random(20160914)
    for _ in range(1000):
        ast = random_ast(rng)
        assert parse(pretty_print(ast)) == ast


# --- evaluation ------------------------------------------------------------

def test_match_ids_order_is_static_rank():
    g = small_graph()
    ids = match_ids(g, Compare("CC", ">=", 0))
    assert ids == sorted(g.papers, key=lambda pid: g.ecc_rank[pid])


def test_evaluate_logprob_formula():
    g = small_graph()
    resp = evaluate(g, Compare("CC", ">=", 0), count=len(g.papers))
    for entity in resp.entities:
        pid = entity.values["Id"]
        assert entity.logprob == pytest.approx(-math.log1p(g.ecc_rank[pid]))
    ranks = [g.ecc_rank[e.values["Id"]] for e in resp.entities]
    assert ranks == sorted(ranks)


def test_evaluate_pagination():
    g = small_graph()
    full = evaluate(g, Compare("CC", ">=", 0), count=10)
    page = evaluate(g, Compare("CC", ">=", 0), count=3, offset=2)
    assert [e.values["Id"] for e in page.entities] == [
        e.values["Id"] for e in full.entities[2:5]]
    beyond = evaluate(g, Compare("CC", ">=", 0), count=5, offset=50)
    assert beyond.entities == ()


def test_evaluate_attribute_projection():
    g = small_graph()
    resp = evaluate(g, Compare("Id", "=", 3),
                    attributes=("Id", "Ti", "AA.AuN", "E.DOI", "J.JN"))
    (entity,) = resp.entities
    assert entity.values["Id"] == 3
    assert entity.values["AA.AuN"] == ["ada lovel", "ben ack"]
    assert entity.values["E.DOI"] == "10.1000/unit.003"
    assert entity.values["J.JN"] == "open findings"


def test_evaluate_omits_absent_values():
    g = small_graph()
    resp = evaluate(g, Compare("Id", "=", 1), attributes=("Id", "C.CN"))
    (entity,) = resp.entities
    assert "C.CN" not in entity.values  # paper 1 has no venue


def test_evaluate_echoes_expression():
    g = small_graph()
    resp = evaluate(g, parse("Y=2011"), expr_text="Y=2011")
    assert resp.expr_echo == "Y=2011"
    assert evaluate(g, parse("Y=2011")).expr_echo == "Y=2011"


def test_evaluate_rejects_bad_window():
    g = small_graph()
    with pytest.raises(ValueError):
        evaluate(g, parse("Y=2011"), count=0)
    with pytest.raises(ValueError):
        evaluate(g, parse("Y=2011"), offset=-1)


def test_word_and_reference_queries():
    g = small_graph()
    hits = set(match_ids(g, parse("RId=3")))
    assert hits == {p.id for p in g.papers.values() if 3 in p.references}
    word_hits = set(match_ids(g, parse(f"W='{sorted(g.papers[2].words)[0]}'")))
    assert 2 in word_hits


def test_doi_matching_case_insensitive():
    g = small_graph()
    upper = match_ids(g, parse("E.DOI='10.1000/UNIT.003'", extended_query=True))
    lower = match_ids(g, parse("E.DOI='10.1000/unit.003'", extended_query=True))
    assert upper == lower == [3]


def test_composite_binds_one_record():
    g = small_graph()
    # ada holds 101 and ben holds 102; no single authorship holds both
    cross = parse("Composite(And(AA.AuN='ada lovel',AA.AuId=102))")
    assert match_ids(g, cross) == []
    same = parse("Composite(And(AA.AuN='ada lovel',AA.AuId=101))")
    assert len(match_ids(g, same)) == 10
    # outside a composite the two conditions may match different authors
    loose = parse("And(AA.AuN='ada lovel',AA.AuId=102)")
    assert set(match_ids(g, loose)) == {
        p.id for p in g.papers.values() if len(p.authorships) == 2}


def test_empty_range_matches_nothing():
    g = small_graph()
    assert match_ids(g, parse("Y=[2012,2011]")) == []


def test_engine_agrees_with_reference_matcher():
    g = small_graph()
    rng = random.Random(7)
    from helpers import random_query
    for _ in range(150):
        expr = random_query(rng, g)
        assert match_ids(g, expr) == naive_match_ids(g, expr), pretty_print(expr)
