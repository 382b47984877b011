import datetime as dt

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from stlf.errors import AllRulesZeroError, ConfigError, NoRuleFiredError, RuleSyntaxError
from stlf.features import Sample
from stlf.fuzzy import (
    LOAD_LABELS,
    SHAPES,
    TEMPERATURE_LABELS,
    LinguisticVariable,
    MamdaniRule,
    MembershipFunction,
    TsRule,
    fis_train,
    format_rulebases,
    format_rules,
    fuzzify,
    generate_rules,
    make_partition,
    mamdani_infer,
    membership,
    parse_rule,
    parse_rulebases,
    parse_rules,
    ts_infer,
)
from stlf.fuzzy.rules import MamdaniSystem, weighted_average

TRI = MembershipFunction.triangular(0, 5, 10)
finite = st.floats(-1e3, 1e3, allow_nan=False)


def paper_triangle(p, a, b, c):
    """The piecewise definition, branch by branch."""
    if p == b:
        return 1.0
    if p >= c or p <= a:
        return 0.0
    if p < b:
        return (p - a) / (b - a)
    return (c - p) / (c - b)


class TestMembership:
    @pytest.mark.parametrize("x,expected", [(5, 1.0), (12, 0.0), (2.5, 0.5), (7.5, 0.5), (0, 0.0), (10, 0.0), (-3, 0.0)])
    def test_triangular_examples(self, x, expected):
        assert membership(TRI, x) == expected

    @given(st.floats(-5, 15, allow_nan=False))
    def test_triangular_matches_piecewise(self, x):
        assert membership(TRI, x) == pytest.approx(paper_triangle(x, 0, 5, 10), abs=1e-15)

    def test_array_input_keeps_shape(self):
        out = membership(TRI, np.array([[0.0, 5.0], [2.5, 12.0]]))
        np.testing.assert_array_equal(out, [[0.0, 1.0], [0.5, 0.0]])

    def test_trapezoidal(self):
        mf = MembershipFunction.trapezoidal(0, 2, 4, 8)
        assert [membership(mf, x) for x in (0, 1, 2, 3, 4, 6, 8, 9)] == [0, 0.5, 1, 1, 1, 0.5, 0, 0]

    def test_gaussian(self):
        mf = MembershipFunction.gaussian(3.0, 2.0)
        assert membership(mf, 3.0) == 1.0
        assert membership(mf, 5.0) == pytest.approx(np.exp(-0.5))

    def test_bell(self):
        mf = MembershipFunction.bell(0.0, 2.0, 3.0)
        assert membership(mf, 0.0) == 1.0
        assert membership(mf, 2.0) == 0.5
        assert membership(mf, 4.0) == pytest.approx(1 / 65)

    @given(st.sampled_from(SHAPES), st.lists(finite, min_size=4, max_size=4), st.floats(0.01, 100), finite)
    def test_degree_in_unit_interval(self, shape, raw, width, x):
        pts = sorted(raw)
        assume(pts[-1] > pts[0])
        mf = {
            "triangular": lambda: MembershipFunction.triangular(pts[0], pts[1], pts[3]),
            "trapezoidal": lambda: MembershipFunction.trapezoidal(*pts),
            "gaussian": lambda: MembershipFunction.gaussian(pts[0], width),
            "bell": lambda: MembershipFunction.bell(pts[0], width, width),
        }[shape]()
        assert 0.0 <= membership(mf, x) <= 1.0

    @pytest.mark.parametrize(
        "shape,params",
        [
            ("triangular", (5, 0, 10)),
            ("triangular", (1, 1, 1)),
            ("trapezoidal", (0, 3, 2, 5)),
            ("gaussian", (0, 0)),
            ("bell", (0, 1, -1)),
            ("gaussian", (0, 1, 2)),
            ("sigmoid", (0, 1)),
        ],
    )
    def test_invalid(self, shape, params):
        with pytest.raises(ValueError):
            MembershipFunction(shape, params)


class TestPartition:
    def test_load_peaks(self):
        var = make_partition("load", (0, 100), LOAD_LABELS, "triangular")
        peaks = [mf.peak for _, mf in var.terms]
        np.testing.assert_allclose(peaks, [0, 100 / 6, 200 / 6, 50, 400 / 6, 500 / 6, 100], atol=1e-12)
        for k, p in enumerate(peaks):
            assert fuzzify(var, p)[k] == 1.0

    @pytest.mark.parametrize("shape", SHAPES)
    def test_two_labels_cross_at_half(self, shape):
        var = make_partition("x", (0, 10), ("lo", "hi"), shape)
        np.testing.assert_allclose(fuzzify(var, 5.0), [0.5, 0.5], atol=1e-12)

    def test_one_label(self):
        with pytest.raises(ConfigError):
            make_partition("x", (0, 1), ("only",))

    @given(st.floats(-10, 30, allow_nan=False), st.integers(2, 9))
    def test_triangular_partition_of_unity(self, x, m):
        var = make_partition("t", (-10, 30), [f"t{k}" for k in range(m)], "triangular")
        assert fuzzify(var, x).sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("shape", SHAPES)
    def test_clamping(self, shape):
        var = make_partition("t", (0, 1), TEMPERATURE_LABELS, shape)
        np.testing.assert_array_equal(fuzzify(var, -5.0), fuzzify(var, 0.0))
        np.testing.assert_array_equal(fuzzify(var, 7.0), fuzzify(var, 1.0))

    @pytest.mark.parametrize("shape", SHAPES)
    def test_terms_inside_universe(self, shape):
        var = make_partition("t", (2, 3), LOAD_LABELS, shape)
        assert var.labels == LOAD_LABELS and len(var) == 7

    def test_duplicate_labels(self):
        with pytest.raises(ConfigError):
            LinguisticVariable("x", (0, 1), (("a", TRI), ("a", TRI)))

    def test_term_outside_universe(self):
        with pytest.raises(ConfigError):
            LinguisticVariable("x", (0, 6), (("a", TRI),))


def output_var():
    mfs = {
        "lo": MembershipFunction.triangular(20, 40, 60),
        "mid": MembershipFunction.triangular(40, 60, 80),
        "hi": MembershipFunction.triangular(60, 80, 100),
    }
    return LinguisticVariable("out", (0, 120), tuple(mfs.items()))


def input_vars():
    return {"x": make_partition("x", (0, 10), ("a", "b", "c"), "triangular")}


class TestMamdani:
    def test_single_symmetric_rule(self):
        rules = [MamdaniRule((("x", "a"),), ("out", "mid"))]
        assert mamdani_infer(rules, input_vars(), {"x": 0.0}, output_var()) == pytest.approx(60, abs=0.5)

    def test_two_rules_equal_firing(self):
        rules = [MamdaniRule((("x", "a"),), ("out", "lo")), MamdaniRule((("x", "b"),), ("out", "hi"))]
        # x = 2.5 is half way between the peaks of a and b
        assert mamdani_infer(rules, input_vars(), {"x": 2.5}, output_var()) == pytest.approx(60, abs=0.5)

    def test_no_rule_fired(self):
        rules = [MamdaniRule((("x", "a"),), ("out", "mid"))]
        with pytest.raises(NoRuleFiredError):
            mamdani_infer(rules, input_vars(), {"x": 9.0}, output_var())

    def test_undeclared_variable(self):
        with pytest.raises(ConfigError):
            mamdani_infer([MamdaniRule((("y", "a"),), ("out", "mid"))], input_vars(), {"x": 1}, output_var())

    def test_unknown_label(self):
        with pytest.raises(ConfigError):
            MamdaniSystem([MamdaniRule((("x", "zz"),), ("out", "mid"))], input_vars(), output_var())

    def test_against_brute_force(self):
        rng = np.random.default_rng(0)
        ov = output_var()
        rules = [
            MamdaniRule((("x", "abc"[i % 3]),), ("out", ("lo", "mid", "hi")[rng.integers(3)])) for i in range(6)
        ]
        grid = np.linspace(0, 120, 201)
        for x in rng.uniform(0, 10, size=20):
            agg = np.zeros_like(grid)
            for r in rules:
                w = membership(input_vars()["x"].term(r.antecedent[0][1]), x)
                agg = np.maximum(agg, np.minimum(w, membership(ov.term(r.consequent[1]), grid)))
            expected = (grid * agg).sum() / agg.sum()
            assert mamdani_infer(rules, input_vars(), {"x": x}, ov) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(0, 10), st.lists(st.sampled_from(["lo", "mid", "hi"]), min_size=3, max_size=3))
    def test_output_within_universe(self, x, cons):
        rules = [MamdaniRule((("x", lab),), ("out", c)) for lab, c in zip("abc", cons)]
        assert 0 <= mamdani_infer(rules, input_vars(), {"x": x}, output_var()) <= 120


def ts_rule(label, *q):
    return TsRule((("x", label),), q)


class TestTakagiSugeno:
    def test_constant_rule(self):
        assert ts_infer([ts_rule("a", 7.0, 0.0)], input_vars(), {"x": 0.0}) == 7.0

    def test_weighted_average(self):
        assert weighted_average([0.25, 0.75], [4.0, 8.0]) == 7.0

    def test_two_rules_through_memberships(self):
        # x = 1.25: degree 0.75 in a, 0.25 in b
        rules = [ts_rule("a", 8.0, 0.0), ts_rule("b", 4.0, 0.0)]
        assert ts_infer(rules, input_vars(), {"x": 1.25}) == 7.0

    def test_linear_consequent(self):
        assert ts_infer([ts_rule("b", 1.0, 2.0)], input_vars(), {"x": 5.0}) == 11.0

    def test_all_rules_zero(self):
        with pytest.raises(AllRulesZeroError):
            ts_infer([ts_rule("a", 1.0, 0.0)], input_vars(), {"x": 10.0})

    def test_coefficient_count(self):
        with pytest.raises(ConfigError):
            TsRule((("x", "a"),), (1.0,))

    @given(
        st.lists(st.tuples(st.sampled_from("abc"), finite, finite), min_size=1, max_size=6),
        st.floats(0, 10),
    )
    def test_bounded_by_rule_outputs(self, spec, x):
        rules = [ts_rule(lab, q0, q1) for lab, q0, q1 in spec]
        f = [q0 + q1 * x for _, q0, q1 in spec]
        try:
            y = ts_infer(rules, input_vars(), {"x": x})
        except AllRulesZeroError:
            return
        assert min(f) - 1e-9 * (1 + abs(min(f))) <= y <= max(f) + 1e-9 * (1 + abs(max(f)))

    @given(
        st.lists(st.floats(0.001, 1), min_size=1, max_size=8),
        st.lists(finite, min_size=8, max_size=8),
        st.floats(1e-3, 1e3),
    )
    def test_scaling_weights_is_neutral(self, w, f, c):
        f = f[: len(w)]
        assert weighted_average(np.multiply(w, c), f) == pytest.approx(weighted_average(w, f), rel=1e-12, abs=1e-12)


def peak_pairs(var, out):
    return [({"x": mf.peak}, out.terms[k % len(out)][1].peak) for k, (_, mf) in enumerate(var.terms)]


class TestGenerateRules:
    def test_one_sample_at_peaks(self):
        rules = generate_rules([({"x": 5.0}, 60.0)], input_vars(), output_var())
        assert rules == [MamdaniRule((("x", "b"),), ("out", "mid"))]

    def test_conflict_keeps_stronger(self):
        # both samples map to x IS a; the first sits at the peak, the second does not
        samples = [({"x": 0.0}, 40.0), ({"x": 1.0}, 80.0)]
        rules = generate_rules(samples, input_vars(), output_var())
        assert rules == [MamdaniRule((("x", "a"),), ("out", "lo"))]
        rules = generate_rules(samples[::-1], input_vars(), output_var())
        assert rules == [MamdaniRule((("x", "a"),), ("out", "lo"))]

    def test_tie_takes_lower_term(self):
        rules = generate_rules([({"x": 2.5}, 50.0)], input_vars(), output_var())
        assert rules == [MamdaniRule((("x", "a"),), ("out", "lo"))]

    @pytest.mark.parametrize("shape", SHAPES)
    def test_coverage(self, shape):
        var = make_partition("x", (0, 1), LOAD_LABELS, shape)
        ov = make_partition("out", (0, 1), LOAD_LABELS, shape)
        rules = generate_rules(peak_pairs(var, ov), {"x": var}, ov)
        assert len(rules) == 7
        system = MamdaniSystem(rules, {"x": var}, ov)
        for x in np.linspace(0, 1, 1001):
            system.infer({"x": x})

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        samples = [({"x": x}, y) for x, y in zip(rng.uniform(0, 10, 50), rng.uniform(0, 120, 50))]
        assert generate_rules(samples, input_vars(), output_var()) == generate_rules(samples, input_vars(), output_var())

    def test_empty(self):
        with pytest.raises(ConfigError):
            generate_rules([], input_vars(), output_var())


class TestRuleFile:
    def test_mamdani_line(self):
        rule = parse_rule("IF load IS VL AND temp IS C THEN out IS L")
        assert rule == MamdaniRule((("load", "VL"), ("temp", "C")), ("out", "L"))
        assert format_rules([rule]) == "IF load IS VL AND temp IS C THEN out IS L\n"

    def test_ts_line(self):
        rule = parse_rule("IF load IS VL AND temp IS C THEN f = 0.1 + 0.5*load + -0.02*temp")
        assert rule == TsRule((("load", "VL"), ("temp", "C")), (0.1, 0.5, -0.02))

    @given(st.lists(st.tuples(st.sampled_from("abc"), st.floats(allow_nan=False, allow_infinity=False)), min_size=1, max_size=5))
    def test_round_trip(self, spec):
        rules = [TsRule((("x", lab), ("y", "b")), (q, -q, q / 3)) for lab, q in spec]
        rules += [MamdaniRule((("x", lab),), ("out", "mid")) for lab, _ in spec]
        assert parse_rules(format_rules(rules)) == rules

    def test_sections(self):
        bases = {"h00": [MamdaniRule((("x", "a"),), ("out", "lo"))], "h01": []}
        assert parse_rulebases(format_rulebases(bases)) == bases

    def test_comments_and_blanks(self):
        assert parse_rules("# header\n\nIF x IS a THEN out IS lo\n") == [MamdaniRule((("x", "a"),), ("out", "lo"))]

    @pytest.mark.parametrize(
        "text,line",
        [
            ("IF x IS a THEN out IS lo\nWHEN x IS a THEN out IS lo", 2),
            ("IF x IS a out IS lo", 1),
            ("IF x a THEN out IS lo", 1),
            ("\nIF x IS a THEN f = 1 + q*x", 2),
            ("IF x IS a THEN f = 1 + 2*y", 1),
            ("IF x IS a THEN f = 1", 1),
        ],
    )
    def test_syntax_errors_name_the_line(self, text, line):
        with pytest.raises(RuleSyntaxError) as info:
            parse_rules(text)
        assert info.value.line == line


class TestFisForecaster:
    def samples(self, n=30):
        rng = np.random.default_rng(0)
        base = dt.datetime(2024, 1, 1)
        out = []
        for i in range(n):
            x = rng.uniform(0.2, 0.8, size=62)
            x[60:62] = (0.5, 1.0)
            out.append(Sample(x, np.clip(np.tile(x[24:48], 2) + 0.01, 0, 1), base + dt.timedelta(days=7 * i), "weekday"))
        return out

    @pytest.mark.parametrize("shape", SHAPES)
    def test_emits_48_values(self, shape):
        model = fis_train(self.samples(), shape)
        assert model.forecast(self.samples()[0].input).shape == (48,)
        assert model.predict([s.input for s in self.samples(3)]).shape == (3, 48)

    def test_fallback_is_persistence(self):
        model = fis_train(self.samples(), "triangular")
        x = self.samples()[0].input.copy()
        x[60:62] = (0.5, 0.0)  # a weekday no rule mentions
        y = model.forecast(x)
        assert model.fallbacks > 0
        np.testing.assert_array_equal(y[:24][model_fell_back(model, x)], x[24:48][model_fell_back(model, x)])


def model_fell_back(model, x):
    from stlf.fuzzy.forecaster import hour_inputs

    mask = []
    for h in range(24):
        try:
            model._systems[h].infer(hour_inputs(x, h))
            mask.append(False)
        except NoRuleFiredError:
            mask.append(True)
    return np.array(mask)
