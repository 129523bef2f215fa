import numpy as np
import pytest

from titlescope.lexicon import (
    demo_lexicon,
    distance_series,
    load_dic,
    moving_average,
    pairwise_distance,
    profile,
    standardize,
)

DIC = """%
1\tposemo
2\tnegemo
%
happ*\t1
sad\t2
grim\t2
"""


@pytest.fixture()
def lex(tmp_path):
    path = tmp_path / "mini.dic"
    path.write_text(DIC)
    return load_dic(path)


class TestDicParsing:
    def test_categories(self, lex):
        assert lex.categories == ("posemo", "negemo")

    def test_literal_and_wildcard(self, lex):
        assert lex.match("sad") == {1}
        assert lex.match("happy") == {0}
        assert lex.match("happiness") == {0}
        assert lex.match("unrelated") == set()

    def test_demo_lexicon_loads(self):
        demo = demo_lexicon()
        assert len(demo.categories) == 20
        assert demo.match("attack") >= {1, 2}  # negemo + anger

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.dic"
        path.write_text("happ*\t1\n")
        with pytest.raises(ValueError):
            load_dic(path)


class TestProfile:
    def test_percentage_counting(self, lex):
        p = profile(["happy", "happy", "sad"], lex)
        assert p.percentages[0] == pytest.approx(66.6667, abs=1e-3)
        assert p.percentages[1] == pytest.approx(33.3333, abs=1e-3)

    def test_no_matches_all_zero(self, lex):
        p = profile(["stock", "market"], lex)
        assert np.all(p.percentages == 0.0)
        assert not p.empty

    def test_prefix_rule(self, lex):
        p = profile(["happiness"], lex)
        assert p.percentages[0] == 100.0

    def test_empty_cell_flagged(self, lex):
        p = profile([], lex)
        assert p.empty
        assert np.all(p.percentages == 0.0)

    def test_multi_category_token(self):
        demo = demo_lexicon()
        p = profile(["attack"], demo)
        negemo = demo.categories.index("negemo")
        anger = demo.categories.index("anger")
        assert p.percentages[negemo] == 100.0
        assert p.percentages[anger] == 100.0

    def test_token_order_invariance(self, lex):
        a = profile(["happy", "sad", "grim"], lex)
        b = profile(["grim", "happy", "sad"], lex)
        assert np.array_equal(a.percentages, b.percentages)


class TestStandardize:
    def prof(self, lex, values, month="2015-01", group="Left"):
        p = profile([], lex)
        return type(p)(
            group=group, topic="t", month=month,
            percentages=np.asarray(values, dtype=float), token_count=10,
        )

    def test_two_point(self, lex):
        z = standardize([self.prof(lex, [10, 0]), self.prof(lex, [20, 0])])
        assert z[0].percentages[0] == pytest.approx(-1.0)
        assert z[1].percentages[0] == pytest.approx(1.0)

    def test_constant_category_zero(self, lex):
        z = standardize([self.prof(lex, [5, 3]), self.prof(lex, [5, 7])])
        assert z[0].percentages[0] == 0.0
        assert z[1].percentages[0] == 0.0

    def test_mean_zero(self, lex):
        rng = np.random.default_rng(0)
        profs = [self.prof(lex, rng.random(2) * 10) for _ in range(9)]
        z = standardize(profs)
        mat = np.vstack([p.percentages for p in z])
        assert np.all(np.abs(mat.mean(axis=0)) < 1e-9)

    def test_needs_two_profiles(self, lex):
        with pytest.raises(ValueError):
            standardize([self.prof(lex, [1, 2])])


class TestDistance:
    def prof(self, values):
        from titlescope.lexicon import LinguisticProfile

        return LinguisticProfile(
            group="g", topic="t", month="2015-01",
            percentages=np.asarray(values, dtype=float), token_count=1,
        )

    def test_identical_zero(self):
        assert pairwise_distance(self.prof([1, 2]), self.prof([1, 2])) == 0.0

    def test_three_four_five(self):
        assert pairwise_distance(self.prof([0, 0]), self.prof([3, 4])) == 5.0

    def test_metric_axioms_random_triples(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            a, b, c = (self.prof(rng.normal(size=6)) for _ in range(3))
            dab = pairwise_distance(a, b)
            dba = pairwise_distance(b, a)
            assert dab >= 0
            assert dab == dba
            assert dab <= pairwise_distance(a, c) + pairwise_distance(c, b) + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            pairwise_distance(self.prof([1]), self.prof([1, 2]))


class TestMovingAverage:
    def series(self, values, start_month=1):
        return [(f"2015-{m:02d}", v) for m, v in enumerate(values, start=start_month)]

    def test_constant_series_unchanged(self):
        s = self.series([2.0] * 12)
        assert moving_average(s, 7) == s

    def test_window_one_identity(self):
        s = self.series([1.0, 5.0, 2.0])
        assert moving_average(s, 1) == s

    def test_center_spike(self):
        s = self.series([0, 0, 0, 7, 0, 0, 0])
        out = moving_average(s, 7)
        assert out[3][1] == pytest.approx(1.0)

    def test_edges_shrink(self):
        s = self.series([6.0, 0, 0, 0])
        out = moving_average(s, 7)
        assert out[0][1] == pytest.approx(1.5)  # only 4 points in reach

    def test_gap_awareness(self):
        # a 10-month hole: the two clusters never see each other with w=7
        s = [("2015-01", 4.0), ("2015-02", 4.0), ("2016-01", 8.0), ("2016-02", 8.0)]
        out = moving_average(s, 7)
        assert [v for _, v in out] == [4.0, 4.0, 8.0, 8.0]

    def test_contraction(self):
        rng = np.random.default_rng(2)
        vals = rng.normal(size=24).tolist()
        s = [(f"{2015 + m // 12}-{m % 12 + 1:02d}", v) for m, v in enumerate(vals)]
        out = [v for _, v in moving_average(s, 7)]
        assert max(out) <= max(vals) + 1e-12
        assert min(out) >= min(vals) - 1e-12

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            moving_average(self.series([1.0]), 4)

    def test_empty_series_rejected(self):
        with pytest.raises(ValueError):
            moving_average([], 7)


def test_distance_series_with_gaps(lex):
    from titlescope.lexicon import LinguisticProfile

    def prof(group, month, values, empty=False):
        return LinguisticProfile(
            group=group, topic="t", month=month,
            percentages=np.asarray(values, dtype=float),
            token_count=0 if empty else 5, empty=empty,
        )

    profiles = [
        prof("Left", "2015-01", [1, 0]),
        prof("Right", "2015-01", [0, 1]),
        prof("Left", "2015-02", [2, 0]),
        # Right missing in 2015-02 -> gap
        prof("Left", "2015-03", [0, 0]),
        prof("Right", "2015-03", [3, 4], empty=False),
    ]
    series = distance_series(profiles, "Left", "Right", "t", window=1)
    assert series.months == ("2015-01", "2015-03")
    assert series.raw[1] == 5.0
