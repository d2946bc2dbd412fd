from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from brouwer_entropy.errors import ChartError, InvalidParameterError, LayoutBoundError
from brouwer_entropy.glued_plane import (
    ChartPoint,
    GluingSpec,
    build_gluing,
    build_linear_example,
    phi_eval,
    step,
    to_chart,
)


def mid(spec, path):
    lo, hi = spec.interval(path)
    return (lo + hi) / 2


class TestBuild:
    def test_two_charts(self):
        spec = build_gluing(2, 2, 8)
        assert spec.L == 2
        for k in range(1, 9):
            assert phi_eval(spec, 1, mid(spec, (k,))) == -k

    def test_last_level_values_alpha_3(self):
        spec = build_gluing(3, 3, 4)
        assert spec.value_range(2, 2) == (2, 4)
        assert [phi_eval(spec, 2, mid(spec, (2, k))) for k in (2, 3, 4)] == [-2, -3, -4]

    def test_last_level_values_alpha_2_5(self):
        spec = build_gluing(3, 2.5, 9)
        assert spec.value_range(2, 9) == (9, 12)
        assert len(list(spec.paths(2, 9))) - len(list(spec.paths(2, 8))) == 4

    @pytest.mark.parametrize("L, alpha", [(3, 5), (3, 2), (2, 2.5), (4, 3), (1, 1)])
    def test_rejects_bad_parameters(self, L, alpha):
        with pytest.raises(InvalidParameterError):
            build_gluing(L, alpha, 8)

    def test_rejects_bad_k_max(self):
        with pytest.raises(InvalidParameterError):
            build_gluing(3, 3, 0)

    def test_alpha_prime_is_decimal(self):
        assert build_gluing(4, 3.7, 4).alpha_prime == Fraction(7, 10)


class TestLayout:
    spec = build_gluing(4, 3.5, 12)

    def test_level_one_inside_two_thirds(self):
        his = []
        for k in range(1, 13):
            lo, hi = self.spec.interval((k,))
            assert 0 < lo < hi <= Fraction(2, 3)
            his.append(hi)
        assert his == sorted(his, reverse=True)
        assert his[-1] < Fraction(1, 1000)

    def test_nesting_and_disjointness(self):
        for depth in (2, 3):
            paths = list(self.spec.paths(depth, 6))
            for p in paths:
                lo, hi = self.spec.interval(p)
                plo, phi = self.spec.interval(p[:-1])
                assert plo < lo < hi < phi
            spans = sorted(self.spec.interval(p) for p in paths)
            assert all(a[1] < b[0] for a, b in zip(spans, spans[1:]))

    def test_plateau_exactness(self):
        for path, y in self.spec.plateau_midpoints(8):
            for level in range(1, 4):
                value = phi_eval(self.spec, level, y)
                assert isinstance(value, int)
                assert value == -path[level - 1]

    def test_gap_midpoints_half_values(self):
        for path, y in self.spec.gap_midpoints(5):
            assert phi_eval(self.spec, 3, y) == -path[-1] - Fraction(1, 2)

    def test_constant_above_blocks(self):
        assert phi_eval(self.spec, 1, Fraction(9, 10)) == -1
        assert phi_eval(self.spec, 1, 5) == -1

    def test_level_one_diverges(self):
        values = [phi_eval(self.spec, 1, mid(self.spec, (k,))) for k in range(1, 13)]
        assert values == [-k for k in range(1, 13)]

    def test_below_floor(self):
        with pytest.raises(LayoutBoundError) as info:
            phi_eval(self.spec, 1, self.spec.floor / 2)
        assert info.value.k_max == 12

    def test_nonpositive_y(self):
        with pytest.raises(ChartError):
            phi_eval(self.spec, 1, 0)

    def test_level_two_example(self):
        spec = build_gluing(3, 3, 8)
        assert phi_eval(spec, 2, mid(spec, (3, 5))) == -5


@settings(max_examples=200, deadline=None)
@given(
    a=st.fractions(min_value=Fraction(1, 3000), max_value=Fraction(1, 1)),
    b=st.fractions(min_value=Fraction(1, 3000), max_value=Fraction(1, 1)),
)
def test_level_one_monotone(a, b):
    spec = build_gluing(3, 3, 16)
    lo, hi = sorted((a, b))
    assert phi_eval(spec, 1, lo) <= phi_eval(spec, 1, hi)


@settings(max_examples=100, deadline=None)
@given(
    y=st.fractions(min_value=Fraction(1, 2000), max_value=Fraction(3, 2)),
    x=st.fractions(min_value=-50, max_value=50),
    j=st.integers(1, 4),
    k=st.integers(1, 4),
    n=st.integers(-40, 40),
)
def test_shears_compose_and_commute(y, x, j, k, n):
    spec = build_gluing(4, 4, 16)
    p = ChartPoint(1, x, y)
    direct = to_chart(spec, p, k)
    via = to_chart(spec, to_chart(spec, p, j), k)
    assert direct == via
    assert to_chart(spec, direct, 1) == p
    assert step(spec, to_chart(spec, p, k), n) == to_chart(spec, step(spec, p, n), k)


def test_to_chart_examples():
    spec = build_gluing(3, 3, 8)
    p = ChartPoint(1, Fraction(0), mid(spec, (2,)))
    assert to_chart(spec, p, 2) == ChartPoint(2, -2, p.y)
    assert to_chart(spec, p, 1) is p
    q = ChartPoint(1, Fraction(1, 7), mid(spec, (3, 5)))
    assert to_chart(spec, to_chart(spec, q, 3), 1) == q
    with pytest.raises(ChartError):
        to_chart(spec, ChartPoint(1, 0, Fraction(-1, 5)), 2)


def test_step_examples():
    assert step(None, ChartPoint(1, 0.0, 0.5), 3) == ChartPoint(1, 3.0, 0.5)
    assert step(None, ChartPoint(2, -1.0, -0.2), -2) == ChartPoint(2, -3.0, -0.2)


def test_linear_map_examples():
    A = build_linear_example()
    assert A.apply(ChartPoint(1, 1, 1), 1) == ChartPoint(1, 2, Fraction(1, 2))
    assert A.apply(ChartPoint(1, 1, 8), 3) == ChartPoint(1, 8, 1)
    p = ChartPoint(1, Fraction(1, 4), 4)
    assert A.apply(A.apply(p, 1), -1) == p


class TestSerialization:
    def test_round_trip(self):
        spec = build_gluing(3, 2.5, 4096)
        text = spec.to_json()
        back = GluingSpec.from_json(text)
        assert back == spec
        assert back.to_json() == text

    def test_layout_entries_follow_rule(self):
        data = build_gluing(3, 3, 5).to_dict()
        assert data["layout_k1_limit"] == 5
        first = data["layout"][0]
        assert first == {"index": [1], "lo": "4/9", "hi": "5/9", "value": -1}

    def test_tampered_layout_rejected(self):
        data = build_gluing(3, 3, 5).to_dict()
        data["layout"][3]["value"] -= 1
        with pytest.raises(InvalidParameterError):
            GluingSpec.from_dict(data)

    def test_version_checked(self):
        data = build_gluing(2, 2, 3).to_dict()
        data["version"] = 99
        with pytest.raises(InvalidParameterError):
            GluingSpec.from_dict(data)
