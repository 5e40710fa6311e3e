import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oilab.distributions import (
    Distribution,
    cosine_similarity,
    fidelity,
    point_mass,
    tv_distance,
    uniform_distribution,
)
from oilab.errors import DegenerateInputError, WidthError
from oilab.seeding import derive_rng


def exact_distribution(width: int, weights: list[int]) -> Distribution:
    total = sum(weights)
    return Distribution(
        width,
        {
            format(i, f"0{width}b"): Fraction(w, total)
            for i, w in enumerate(weights)
            if w
        },
    )


@st.composite
def exact_pairs(draw):
    width = draw(st.integers(1, 4))
    n = 1 << width
    w0 = draw(st.lists(st.integers(0, 12), min_size=n, max_size=n).filter(lambda v: sum(v) > 0))
    w1 = draw(st.lists(st.integers(0, 12), min_size=n, max_size=n).filter(lambda v: sum(v) > 0))
    return exact_distribution(width, w0), exact_distribution(width, w1)


class TestConstruction:
    def test_sum_must_be_one_exact(self):
        with pytest.raises(ValueError):
            Distribution(1, {"0": Fraction(1, 2)})

    def test_float_sum_tolerance(self):
        Distribution(1, {"0": 0.5, "1": 0.5 + 1e-13})
        with pytest.raises(ValueError):
            Distribution(1, {"0": 0.5, "1": 0.6})

    def test_negative_probability(self):
        with pytest.raises(ValueError):
            Distribution(1, {"0": Fraction(3, 2), "1": Fraction(-1, 2)})

    def test_key_width_checked(self):
        with pytest.raises(WidthError):
            Distribution(2, {"0": Fraction(1)})

    def test_zero_entries_dropped(self):
        d = Distribution(1, {"0": Fraction(1), "1": Fraction(0)})
        assert d.support() == ["0"]

    def test_marginal(self):
        d = exact_distribution(2, [1, 2, 3, 2])
        assert d.marginal(0, 1).probs == {"0": Fraction(3, 8), "1": Fraction(5, 8)}
        assert d.marginal(1, 2).probs == {"0": Fraction(1, 2), "1": Fraction(1, 2)}


class TestTvDistance:
    def test_identical_is_zero(self):
        d = exact_distribution(2, [1, 0, 3, 0])
        assert tv_distance(d, d) == 0

    def test_disjoint_is_one(self):
        assert tv_distance(point_mass(1, "0"), point_mass(1, "1")) == 1

    def test_uniform_vs_point_mass(self):
        # direct summation: (1/2)(|1/2 - 1| + |1/2 - 0|) = 1/2
        assert tv_distance(uniform_distribution(1), point_mass(1, "0")) == Fraction(1, 2)

    def test_width_mismatch(self):
        with pytest.raises(WidthError):
            tv_distance(uniform_distribution(1), uniform_distribution(2))


class TestFidelity:
    def test_identical_is_one(self):
        d = exact_distribution(2, [1, 2, 3, 10])
        assert fidelity(d, d) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_is_zero(self):
        assert fidelity(point_mass(1, "0"), point_mass(1, "1")) == 0.0

    def test_uniform_vs_point_mass(self):
        expected = math.sqrt(0.5)  # sqrt((1/2)*1) summed over the single shared key
        assert fidelity(uniform_distribution(1), point_mass(1, "0")) == pytest.approx(
            expected, abs=1e-12
        )


class TestCosine:
    def test_identical_is_one(self):
        d = exact_distribution(3, [1, 5, 0, 2, 0, 0, 1, 4])
        assert cosine_similarity(d, d) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_is_zero(self):
        assert cosine_similarity(point_mass(1, "0"), point_mass(1, "1")) == 0.0

    def test_uniform_two_points_vs_point_mass(self):
        # (1/2) / ((1/sqrt(2)) * 1)
        value = cosine_similarity(uniform_distribution(1), point_mass(1, "0"))
        assert value == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    def test_degenerate_rejected(self):
        # the constructor forbids zero mass, so forge one to hit the guard
        degenerate = object.__new__(Distribution)
        object.__setattr__(degenerate, "width", 1)
        object.__setattr__(degenerate, "probs", {})
        good = uniform_distribution(1)
        with pytest.raises(DegenerateInputError):
            cosine_similarity(good, degenerate)


@settings(max_examples=80, deadline=None)
@given(exact_pairs())
def test_metrics_symmetric(pair):
    d0, d1 = pair
    assert tv_distance(d0, d1) == tv_distance(d1, d0)
    assert fidelity(d0, d1) == fidelity(d1, d0)


@settings(max_examples=80, deadline=None)
@given(exact_pairs())
def test_fidelity_tv_bounds(pair):
    d0, d1 = pair
    delta = float(tv_distance(d0, d1))
    f = fidelity(d0, d1)
    assert 1 - f <= delta + 1e-9
    assert delta <= math.sqrt(max(0.0, 1 - f * f)) + 1e-9


def test_fidelity_tv_bounds_seeded_sweep():
    rng = derive_rng(11, "metric-bounds")
    for _ in range(300):
        width = int(rng.integers(1, 5))
        n = 1 << width
        pair = []
        for _ in range(2):
            weights = rng.integers(0, 20, n)
            if weights.sum() == 0:
                weights[0] = 1
            pair.append(exact_distribution(width, [int(w) for w in weights]))
        delta = float(tv_distance(*pair))
        f = fidelity(*pair)
        assert 1 - f <= delta + 1e-9
        assert delta <= math.sqrt(max(0.0, 1 - f * f)) + 1e-9


def test_json_round_trip_exact():
    d = exact_distribution(5, [0, 3, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0,
                              0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1])
    blob = d.to_json_dict()
    assert all(len(k) == 2 for k in blob["probs"])  # hex keys padded to width
    assert Distribution.from_json_dict(blob) == d


def test_json_decimal_strings():
    d = exact_distribution(1, [3, 1])
    blob = d.to_json_dict()
    assert blob["probs"] == {"0": "0.75", "1": "0.25"}
