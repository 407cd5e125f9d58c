import math
import random

import pytest

from claritykit import QppInput, n_sigma_percent, nqc, smv, wig


def inp(scores, s_c=1.0, q_len=1):
    return QppInput(scores=tuple(scores), s_c=s_c, q_len=q_len)


class TestWig:
    def test_zero_gain(self):
        assert wig(inp([3.0, 3.0, 3.0], s_c=3.0)) == 0.0

    def test_hand_value(self):
        assert wig(inp([6.0, 4.0], s_c=3.0, q_len=1)) == pytest.approx(2.0, abs=1e-12)

    def test_scale_linearity(self):
        base = inp([5.0, 2.0, 1.0], s_c=0.5, q_len=2)
        scaled = inp([15.0, 6.0, 3.0], s_c=1.5, q_len=2)
        assert wig(scaled) == pytest.approx(3.0 * wig(base), abs=1e-12)

    def test_can_be_negative(self):
        assert wig(inp([1.0], s_c=5.0)) < 0.0


class TestNqc:
    def test_constant_scores(self):
        assert nqc(inp([2.0, 2.0, 2.0], s_c=4.0)) == 0.0

    def test_hand_value(self):
        # sigma([2,4,6]) = sqrt(8/3), over s_c = 2
        assert nqc(inp([2.0, 4.0, 6.0], s_c=2.0)) == pytest.approx(0.81650, abs=1e-5)

    def test_translation_invariant(self):
        a = inp([2.0, 4.0, 6.0], s_c=2.0)
        b = inp([12.0, 14.0, 16.0], s_c=2.0)
        assert nqc(a) == pytest.approx(nqc(b), abs=1e-12)


class TestSmv:
    def test_constant_scores(self):
        assert smv(inp([3.0, 3.0], s_c=2.0)) == 0.0

    def test_hand_value_two_scores(self):
        # scores e*m and m/e with m=2: evaluate the formula directly
        e, m, s_c = math.e, 2.0, 3.0
        mu = (e * m + m / e) / 2.0
        expected = ((e * m) * abs(math.log(e * m / mu)) + (m / e) * abs(math.log(m / e / mu)))
        expected = expected / 2.0 / s_c
        assert smv(inp([e * m, m / e], s_c=s_c)) == pytest.approx(expected, abs=1e-12)

    def test_scale_homogeneous(self):
        base = inp([4.0, 1.0, 2.0], s_c=2.0)
        scaled = inp([12.0, 3.0, 6.0], s_c=2.0)
        assert smv(scaled) == pytest.approx(3.0 * smv(base), abs=1e-12)

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError, match="positive"):
            smv(inp([2.0, 0.0]))


class TestNSigmaPercent:
    def test_singleton_prefix(self):
        assert n_sigma_percent(inp([10.0, 1.0, 1.0]), x=50.0) == 0.0

    def test_hand_value(self):
        assert n_sigma_percent(inp([10.0, 9.0, 2.0], s_c=2.0), x=50.0) == pytest.approx(
            0.25, abs=1e-12
        )

    def test_x_100_distinct_scores(self):
        assert n_sigma_percent(inp([8.0, 7.0, 3.0]), x=100.0) == 0.0

    def test_x_100_keeps_exact_ties(self):
        assert n_sigma_percent(inp([8.0, 8.0, 3.0]), x=100.0) == 0.0  # tie group, sigma 0

    def test_x_validation(self):
        with pytest.raises(ValueError):
            n_sigma_percent(inp([1.0]), x=0.0)


class TestInputValidation:
    def test_s_c_must_be_positive(self):
        with pytest.raises(ValueError):
            QppInput(scores=(1.0,), s_c=0.0, q_len=1)

    def test_q_len_must_be_positive(self):
        with pytest.raises(ValueError):
            QppInput(scores=(1.0,), s_c=1.0, q_len=0)

    def test_empty_list_rejected(self):
        empty = QppInput(scores=(), s_c=1.0, q_len=1)
        for fn in (wig, nqc, smv, n_sigma_percent):
            with pytest.raises(ValueError, match="empty"):
                fn(empty)


class TestAgainstStraightLine:
    """Independently coded recomputation: plain loops, no shared helpers."""

    def straight_wig(self, scores, s_c, q_len):
        total = 0.0
        for s in scores:
            total += s - s_c
        return total / len(scores) / math.sqrt(q_len)

    def straight_nqc(self, scores, s_c, q_len):
        mean = 0.0
        for s in scores:
            mean += s
        mean /= len(scores)
        var = 0.0
        for s in scores:
            var += (s - mean) * (s - mean)
        var /= len(scores)
        return math.sqrt(var) / s_c

    def straight_smv(self, scores, s_c, q_len):
        mean = 0.0
        for s in scores:
            mean += s
        mean /= len(scores)
        acc = 0.0
        for s in scores:
            acc += s * abs(math.log(s) - math.log(mean))
        return acc / len(scores) / s_c

    def straight_nsigma(self, scores, s_c, q_len, x=50.0):
        top = scores[0]
        kept = []
        for s in scores:
            if s >= x / 100.0 * top:
                kept.append(s)
        mean = 0.0
        for s in kept:
            mean += s
        mean /= len(kept)
        var = 0.0
        for s in kept:
            var += (s - mean) * (s - mean)
        var /= len(kept)
        return math.sqrt(var) / s_c

    def test_twenty_random_lists(self):
        rng = random.Random(55)
        pairs = [
            (wig, self.straight_wig),
            (nqc, self.straight_nqc),
            (smv, self.straight_smv),
            (n_sigma_percent, self.straight_nsigma),
        ]
        for _ in range(20):
            k = rng.randint(1, 30)
            scores = sorted((rng.uniform(0.1, 20.0) for _ in range(k)), reverse=True)
            s_c = rng.uniform(0.1, 5.0)
            q_len = rng.randint(1, 6)
            query = inp(scores, s_c=s_c, q_len=q_len)
            for fn, straight in pairs:
                assert fn(query) == pytest.approx(
                    straight(scores, s_c, q_len), abs=1e-9
                ), fn.__name__


class TestSharedProperties:
    def test_nonnegative(self):
        rng = random.Random(77)
        for _ in range(30):
            scores = sorted((rng.uniform(0.5, 9.0) for _ in range(5)), reverse=True)
            query = inp(scores, s_c=rng.uniform(0.2, 3.0), q_len=2)
            assert nqc(query) >= 0.0
            assert smv(query) >= 0.0
            assert n_sigma_percent(query) >= 0.0

    def test_permuting_equal_scores_is_noop(self):
        a = inp([5.0, 5.0, 2.0], s_c=1.0)
        b = inp([5.0, 5.0, 2.0], s_c=1.0)  # the two fives swap places
        for fn in (wig, nqc, smv, n_sigma_percent):
            assert fn(a) == fn(b)

    def test_deterministic(self):
        query = inp([4.0, 3.0, 1.0], s_c=0.7, q_len=3)
        for fn in (wig, nqc, smv, n_sigma_percent):
            assert fn(query) == fn(query)
