import math

import pytest

from schauder import constants
from schauder.exceptions import ValidationError


class TestCheckP:
    @pytest.mark.parametrize("p, expected", [(1, 1), (2.0, 2), ("inf", math.inf), (math.inf, math.inf)])
    def test_accepted(self, p, expected):
        assert constants.check_p(p) == expected

    @pytest.mark.parametrize("p", [0, 3, "two"])
    def test_rejected(self, p):
        with pytest.raises(ValidationError):
            constants.check_p(p)


class TestNormConstants:
    def test_generation_inf(self):
        assert constants.generation_norm(math.inf, 1, 4) == 2.0

    def test_generation_one(self):
        assert constants.generation_norm(1, 2, 5) == 2.0**-3

    def test_final_generation(self):
        n = 3
        assert constants.generation_norm(1, n, n) == pytest.approx(2**3.5 - 2**-1.5)
        assert constants.generation_norm(math.inf, n, n) == pytest.approx(2**4.5 - math.sqrt(2))

    def test_l2_bracket_n3(self):
        lower, upper = constants.l2_final_bracket(3)
        # sqrt(2 / (1 - cos(pi/16)) + 3/4), evaluated directly
        assert upper == pytest.approx(10.238988, abs=1e-6)
        assert lower < upper

    def test_cumulative_one(self):
        n, m = 4, 2
        expected = 2 ** (-(n + 3) / 2) * ((2 ** 1.5 - 1) / (math.sqrt(2) - 1) + 1)
        assert constants.cumulative_norm(1, m, n) == pytest.approx(expected)
        assert constants.cumulative_norm(1, -1, n) == pytest.approx(2 ** (-(n + 3) / 2))

    def test_cumulative_stops_below_final(self):
        with pytest.raises(ValidationError):
            constants.cumulative_norm(2, 3, 3)

    def test_generation_range(self):
        with pytest.raises(ValidationError):
            constants.generation_norm(1, 5, 4)


class TestRatios:
    @pytest.mark.parametrize("n", [2, 5, 9])
    def test_inf_ratio_closed_form(self, n):
        assert constants.final_to_cumulative_ratio(math.inf, n) == pytest.approx(2 ** (n / 2 + 2) * (1 - 2.0 ** (-n - 1)))

    def test_asymptotics_at_20(self):
        n = 20
        r1 = constants.final_to_cumulative_ratio(1, n) / ((math.sqrt(2) - 1) * 2 ** (n + 2))
        rinf = constants.final_to_cumulative_ratio(math.inf, n) / 2 ** (n / 2 + 2)
        assert abs(r1 - 1) < 0.01
        assert abs(rinf - 1) < 0.01

    def test_bracket_asymptotics(self):
        n = 10
        lower, upper = constants.l2_final_bracket(n)
        for value in (lower, upper):
            # 1 - cos x ~ x^2 / 2 gives sqrt(4 / x^2) = 2^{n+2} / pi
            assert abs(value * math.pi / 2 ** (n + 2) - 1) < 0.02

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_explicit_l2_ratio_is_weaker(self, n):
        assert constants.corollary_l2_ratio(n) <= constants.final_to_cumulative_ratio(2, n)


class TestFunctionalConstants:
    def test_a2(self):
        assert constants.antiderivative_constants(5)[2] == pytest.approx(0.0099472, abs=1e-7)

    def test_families_positive(self):
        for family in constants.functional_constants(4):
            assert all(v > 0 for v in family.values())

    def test_gamma2_definition(self):
        n = 3
        expected = (1 + 2 ** (-n - 1) * math.sqrt(2 / (1 - math.cos(math.pi / 16)) + 0.75)) / math.sqrt(3)
        assert constants.gamma2(n) == pytest.approx(expected)
        A, B, C, D = constants.functional_constants(n)
        assert C[2] == pytest.approx(expected)
        assert D[2] == pytest.approx(2 ** (n + 1) * expected)
