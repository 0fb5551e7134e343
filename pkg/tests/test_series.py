import random

import pytest

from bsharp.coefficients import coeff_eq, coeff_print, symbol
from bsharp.errors import SeriesError, SingularMethodError
from bsharp.rationals import rat
from bsharp.series import (
    SeriesTerm,
    TruncatedBSeries,
    compose,
    display_terms,
    exact_series,
    format_series,
    identity_series,
    modified_equation_series,
    modifying_integrator_series,
    reset_zero_skip_count,
    scale_step,
    series_eq,
    series_from_json_dict,
    series_order_of_accuracy,
    series_sub,
    series_to_json_dict,
    substitute,
    truncated,
    zero_skip_count,
)
from bsharp.tableaux import builtin_tableau, rk_series, tableau_from_json_dict
from bsharp.trees import EMPTY_TREE, all_trees_up_to, parse_tree

T = parse_tree


def random_map_series(max_order, seed):
    rng = random.Random(seed)
    return TruncatedBSeries.from_function(
        max_order, rat(1), lambda t: rat(rng.randint(-9, 9), rng.randint(1, 9))
    )


def random_flow_series(max_order, seed):
    rng = random.Random(seed)
    return TruncatedBSeries.from_function(
        max_order, rat(0), lambda t: rat(rng.randint(-9, 9), rng.randint(1, 9))
    )


# ---------------------------------------------------------------------------
# the container
# ---------------------------------------------------------------------------

def test_series_must_cover_exactly_the_tree_range():
    with pytest.raises(SeriesError, match="cover exactly"):
        TruncatedBSeries(2, rat(1), {T("[0]"): rat(1)})
    extra = {t: rat(1) for t in all_trees_up_to(3)}
    with pytest.raises(SeriesError, match="cover exactly"):
        TruncatedBSeries(2, rat(1), extra)
    with pytest.raises(SeriesError):
        TruncatedBSeries(-1, rat(1), {})


def test_kind_classification():
    assert exact_series(2).kind == "map"
    assert identity_series(2).kind == "map"
    assert modified_equation_series(exact_series(2)).kind == "flow"
    assert TruncatedBSeries.from_function(1, rat(1, 2), lambda t: rat(0)).kind == "general"


def test_lookup_and_iteration_order():
    s = exact_series(4)
    assert s[EMPTY_TREE] == rat(1)
    assert s[T("[0,1,1]")] == rat(1, 3)
    assert list(s.trees()) == list(all_trees_up_to(4))
    with pytest.raises(SeriesError, match="outside this series"):
        s[T("[0,1,2,3,4]")]


def test_series_equality_needs_matching_orders():
    assert exact_series(3) == exact_series(3)
    assert exact_series(3) != identity_series(3)
    with pytest.raises(SeriesError, match="equal truncation orders"):
        series_eq(exact_series(3), exact_series(4))


def test_truncated_restricts_but_never_extends():
    s = exact_series(5)
    assert truncated(s, 3) == exact_series(3)
    with pytest.raises(SeriesError, match="cannot extend"):
        truncated(s, 6)


def test_series_sub_gives_residuals():
    method = rk_series(builtin_tableau("midpoint"), 3)
    residual = series_sub(method, exact_series(3))
    assert residual[T("[0]")] == 0
    assert residual[T("[0,1]")] == 0
    assert residual[T("[0,1,1]")] == rat(1, 4) - rat(1, 3)


def test_scale_step_grades_by_order():
    s = random_map_series(4, 5)
    mu = rat(3)
    scaled = scale_step(s, mu)
    for tree, c in s.items():
        assert scaled[tree] == c * rat(3) ** tree.order


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------

def test_composition_witness_values():
    e = rk_series(builtin_tableau("euler"), 3)
    x = exact_series(3)
    exact_then_euler = compose(x, e)
    euler_then_exact = compose(e, x)
    bushy, chain = T("[0,1,1]"), T("[0,1,2]")
    # order matters on the bushy tree...
    assert exact_then_euler[bushy] == rat(4, 3)
    assert euler_then_exact[bushy] == rat(7, 3)
    # ...but happens to agree on the chain
    assert exact_then_euler[chain] == rat(2, 3)
    assert euler_then_exact[chain] == rat(2, 3)
    # shared low-order values
    for s in (exact_then_euler, euler_then_exact):
        assert s.kind == "map"
        assert s[T("[0]")] == 2
        assert s[T("[0,1]")] == rat(3, 2)


def test_composition_identity_laws():
    s = random_map_series(5, 21)
    i = identity_series(5)
    assert compose(i, s) == s
    assert compose(s, i) == s


def test_composition_is_associative():
    a, b, c = (random_map_series(5, seed) for seed in (31, 32, 33))
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_composition_requires_map_kind_inner():
    flow = random_flow_series(3, 40)
    with pytest.raises(SeriesError, match="map-kind inner"):
        compose(flow, exact_series(3))
    # a flow-kind *outer* is fine: differencing a method against identity
    assert compose(exact_series(3), flow).kind == "flow"


def test_composition_rejects_mixed_orders():
    with pytest.raises(SeriesError, match="equal truncation orders"):
        compose(exact_series(3), exact_series(4))


def test_normalized_self_composition_is_the_two_half_step_method():
    euler = rk_series(builtin_tableau("euler"), 4)
    two_steps = compose(euler, euler, normalize_stepsize=True)
    combined = tableau_from_json_dict(
        {"A": [["0", "0"], ["1/2", "0"]], "b": ["1/2", "1/2"], "c": ["0", "1/2"]}
    )
    assert two_steps == rk_series(combined, 4)
    # without normalization the composite takes a double-width step
    plain = compose(euler, euler)
    assert plain[T("[0]")] == 2
    assert two_steps[T("[0]")] == 1


def test_composing_halves_of_the_exact_flow_gives_the_exact_flow():
    x = exact_series(6)
    assert compose(x, x, normalize_stepsize=True) == x


# ---------------------------------------------------------------------------
# substitution and its triangular inverses
# ---------------------------------------------------------------------------

def test_substitution_requires_flow_kind_inner():
    with pytest.raises(SeriesError, match="flow-kind inner"):
        substitute(exact_series(3), exact_series(3))


def test_substituting_the_unit_field_changes_nothing():
    # the field series with coefficient 1 on the one-node tree and 0
    # elsewhere is the substitution unit
    unit = TruncatedBSeries.from_function(
        5, rat(0), lambda t: rat(1) if t.order == 1 else rat(0)
    )
    s = random_map_series(5, 50)
    assert substitute(unit, s) == s
    flow = random_flow_series(5, 51)
    assert substitute(unit, flow) == flow
    assert substitute(flow, unit) == flow


def test_substitution_is_associative():
    u = random_flow_series(5, 60)
    v = random_flow_series(5, 61)
    w = random_map_series(5, 62)
    assert substitute(u, substitute(v, w)) == substitute(substitute(u, v), w)


def test_modified_equation_round_trip():
    for seed in range(3):
        method = random_map_series(5, 100 + seed)
        v = modified_equation_series(method)
        assert v.kind == "flow"
        assert substitute(v, exact_series(5)) == method


def test_modifying_integrator_round_trip():
    for name in ("euler", "midpoint", "rk4"):
        method = rk_series(builtin_tableau(name), 5)
        v = modifying_integrator_series(method)
        assert substitute(v, method) == exact_series(5)


def test_modified_equation_of_the_exact_flow_is_the_field():
    v = modified_equation_series(exact_series(5))
    for tree, c in v.items():
        assert c == (rat(1) if tree.order == 1 else rat(0))


def test_euler_perturbations_have_harmonic_tall_tree_weights():
    # for the one-stage first-order method the chain-tree weights follow the
    # two classical scalar expansions: log(1+x) and exp(x)-1
    v = modified_equation_series(rk_series(builtin_tableau("euler"), 6))
    w = modifying_integrator_series(rk_series(builtin_tableau("euler"), 6))
    import math

    for n in range(1, 7):
        chain = T("[" + ",".join(str(i) for i in range(n)) + "]")
        assert v[chain] == rat((-1) ** (n + 1), n)
        assert w[chain] == rat(1, math.factorial(n))


def test_modified_equation_frozen_second_order_family():
    # the two-stage second-order family: h^2 and h^3 displayed corrections
    v = modified_equation_series(rk_series(builtin_tableau("rk22(alpha)"), 4))
    shown = {
        str(term.tree): (coeff_print(term.coefficient), term.h_power)
        for term in display_terms(v, reduce_order_by=1)
    }
    assert shown == {
        "[0]": ("1", 0),
        "[0,1,2]": ("-1/6", 2),
        "[0,1,1]": ("(-4*alpha + 3)/(24*alpha)", 2),
        "[0,1,2,3]": ("1/8", 3),
        "[0,1,2,2]": ("(2*alpha - 1)/(16*alpha)", 3),
        "[0,1,2,1]": ("(alpha - 1)/(8*alpha)", 3),
        "[0,1,1,1]": ("(2*alpha^2 - 3*alpha + 1)/(48*alpha^2)", 3),
    }


def test_modifying_integrator_needs_nonzero_first_weight():
    with pytest.raises(SingularMethodError):
        modifying_integrator_series(identity_series(3))


def test_perturbation_builders_reject_flow_kind_input():
    flow = random_flow_series(3, 70)
    with pytest.raises(SeriesError):
        modified_equation_series(flow)
    with pytest.raises(SeriesError):
        modifying_integrator_series(flow)


def test_zero_skipping_is_observable_but_harmless():
    method = rk_series(builtin_tableau("midpoint"), 6)
    reset_zero_skip_count()
    eager = modified_equation_series(method, skip_zero=False)
    assert zero_skip_count() == 0
    lazy = modified_equation_series(method)
    assert zero_skip_count() > 0
    assert eager == lazy
    before = zero_skip_count()
    assert modifying_integrator_series(method, skip_zero=False) == (
        modifying_integrator_series(method)
    )
    assert zero_skip_count() > before
    reset_zero_skip_count()
    assert zero_skip_count() == 0


# ---------------------------------------------------------------------------
# order of accuracy
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "name,order", [("euler", 1), ("midpoint", 2), ("rk4", 4), ("rk22(alpha)", 2)]
)
def test_order_of_accuracy_of_builtins(name, order):
    series = rk_series(builtin_tableau(name), 5)
    assert series_order_of_accuracy(series) == order


def test_order_of_accuracy_edges():
    assert series_order_of_accuracy(exact_series(6)) == 6
    assert series_order_of_accuracy(identity_series(3)) == 0
    assert series_order_of_accuracy(random_flow_series(3, 80)) == 0
    assert series_order_of_accuracy(exact_series(6), 4) == 4
    with pytest.raises(SeriesError, match="cannot verify"):
        series_order_of_accuracy(exact_series(3), 5)


# ---------------------------------------------------------------------------
# display
# ---------------------------------------------------------------------------

def test_display_terms_convention():
    s = rk_series(builtin_tableau("midpoint"), 3)
    terms = display_terms(s)
    assert terms[0] == SeriesTerm(EMPTY_TREE, rat(1), 0)
    by_tree = {str(t): (c, p) for t, c, p in terms}
    # coefficient of the bushy tree is 1/4; displayed over sigma=2 as 1/8
    assert by_tree["[0,1,1]"] == (rat(1, 8), 3)
    # the order-3 chain weight is 0 for this method and is not displayed
    assert "[0,1,2]" not in by_tree


def test_display_terms_reduce_order_validation():
    flow = modified_equation_series(rk_series(builtin_tableau("euler"), 3))
    assert all(t.h_power == t.tree.order - 1 for t in display_terms(flow, 1))
    with pytest.raises(SeriesError, match="negative h power"):
        display_terms(flow, 2)
    with pytest.raises(SeriesError, match="nonzero empty"):
        display_terms(exact_series(3), 1)
    with pytest.raises(SeriesError, match="non-negative"):
        display_terms(flow, -1)


def test_format_series_text_snapshot():
    v = modified_equation_series(rk_series(builtin_tableau("euler"), 3))
    assert format_series(v, "text", 1) == (
        "1     h^0  F([0])\n"
        "-1/2  h^1  F([0,1])\n"
        "1/3   h^2  F([0,1,2])\n"
        "1/12  h^2  F([0,1,1])"
    )


def test_format_series_latex_snapshot():
    v = modified_equation_series(rk_series(builtin_tableau("euler"), 3))
    assert format_series(v, "latex", 1) == (
        r"F([0]) - \frac{1}{2} h F([0,1]) + \frac{1}{3} h^{2} F([0,1,2])"
        r" + \frac{1}{12} h^{2} F([0,1,1])"
    )


def test_format_series_empty_and_unknown():
    zero = TruncatedBSeries.from_function(2, rat(0), lambda t: rat(0))
    assert format_series(zero) == "0"
    with pytest.raises(ValueError):
        format_series(exact_series(2), "html")


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def test_json_round_trip_map_and_flow():
    for s in (
        rk_series(builtin_tableau("rk22(alpha)"), 4),
        modified_equation_series(rk_series(builtin_tableau("midpoint"), 4)),
    ):
        data = series_to_json_dict(s)
        again = series_from_json_dict(data)
        assert again == s
        # keys are written in (order, lex) order
        assert list(data["coefficients"]) == [str(t) for t in all_trees_up_to(4)]


def test_json_rejects_general_kind():
    s = TruncatedBSeries.from_function(1, rat(1, 2), lambda t: rat(0))
    with pytest.raises(SeriesError, match="map-kind .* and flow-kind"):
        series_to_json_dict(s)


@pytest.mark.parametrize(
    "mutate,fragment",
    [
        (lambda d: d.pop("kind"), "missing"),
        (lambda d: d.update(kind="exact"), "must be"),
        (lambda d: d.update(max_order="2"), "integer"),
        (lambda d: d.update(empty="1/2"), "contradicts"),
        (lambda d: d.update(coefficients=[]), "object"),
        (lambda d: d["coefficients"].pop("[0,1]"), "cover exactly"),
        (lambda d: d["coefficients"].update({"∅": "0"}), "empty tree"),
        (lambda d: d["coefficients"].update({"[0,1,2,3]": "0"}), "cover exactly"),
    ],
)
def test_json_error_paths(mutate, fragment):
    data = series_to_json_dict(exact_series(3))
    mutate(data)
    with pytest.raises(SeriesError, match=fragment):
        series_from_json_dict(data)


def test_json_rejects_two_spellings_of_one_tree():
    # [0,1,1,2] canonicalizes to [0,1,2,1], which the table already names
    data = series_to_json_dict(exact_series(4))
    data["coefficients"]["[0,1,1,2]"] = "0"
    with pytest.raises(SeriesError, match="duplicate"):
        series_from_json_dict(data)


def test_json_accepts_symbolic_coefficients():
    from bsharp.coefficients import coeff_div, coeff_mul

    data = series_to_json_dict(rk_series(builtin_tableau("rk22(alpha)"), 3))
    assert data["coefficients"]["[0,1,1]"] == "1/(4*alpha)"
    restored = series_from_json_dict(data)
    expected = coeff_div(rat(1), coeff_mul(rat(4), symbol("alpha")))
    assert coeff_eq(restored[T("[0,1,1]")], expected)
