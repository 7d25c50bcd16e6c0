import math

import numpy as np
import pytest

import oracles
from summrank.metrics import (
    bleu,
    diversity,
    length_score,
    mean_rouge,
    rouge_l,
    rouge_lsum,
    rouge_n,
)
from summrank.text import split_sentences, tokenize

CAT = tokenize("the cat sat on the mat")
MAT = tokenize("the cat is on the mat")


class TestRougeN:
    def test_unigram_fixture(self):
        # hand n-gram counting: 5 shared of 6 on each side
        result = rouge_n(CAT, MAT, 1)
        assert result.precision == pytest.approx(5 / 6)
        assert result.recall == pytest.approx(5 / 6)
        assert result.f1 == pytest.approx(0.8333, abs=1e-4)

    def test_bigram_fixture(self):
        result = rouge_n(CAT, MAT, 2)
        assert result.precision == result.recall == result.f1 == pytest.approx(0.6)

    def test_identity(self):
        result = rouge_n(CAT, CAT, 1)
        assert result.f1 == 1.0

    def test_empty_inputs_zero(self):
        empty = tokenize("")
        assert rouge_n(empty, MAT, 1).f1 == 0.0
        assert rouge_n(CAT, empty, 2).f1 == 0.0

    def test_f1_symmetry(self):
        assert rouge_n(CAT, MAT, 1).f1 == pytest.approx(rouge_n(MAT, CAT, 1).f1)

    def test_unigram_permutation_invariance(self):
        rng = np.random.default_rng(3)
        tokens = list(CAT.tokens)
        rng.shuffle(tokens)
        shuffled = tokenize(" ".join(tokens))
        assert rouge_n(shuffled, MAT, 1).f1 == pytest.approx(rouge_n(CAT, MAT, 1).f1)


class TestRougeL:
    def test_fixture(self):
        # LCS "the cat on the mat" has length 5
        result = rouge_l(CAT, MAT)
        assert result.precision == pytest.approx(5 / 6)
        assert result.f1 == pytest.approx(0.8333, abs=1e-4)

    def test_identity(self):
        assert rouge_l(CAT, CAT).f1 == 1.0

    def test_disjoint(self):
        assert rouge_l(CAT, tokenize("zebras fly quickly")).f1 == 0.0

    def test_f1_symmetry(self):
        assert rouge_l(CAT, MAT).f1 == pytest.approx(rouge_l(MAT, CAT).f1)


class TestRougeLsum:
    def test_fixture(self):
        cand = split_sentences("the cat sat\ndogs bark")
        ref = split_sentences("the cat sat\nbirds sing")
        result = rouge_lsum(cand, ref)
        assert result.precision == pytest.approx(3 / 5)
        assert result.recall == pytest.approx(3 / 5)
        assert result.f1 == pytest.approx(0.6)

    def test_single_sentence_reduces_to_rouge_l(self):
        cand = split_sentences("the cat sat on the mat")
        ref = split_sentences("the cat is on the mat")
        assert rouge_lsum(cand, ref).f1 == pytest.approx(rouge_l(CAT, MAT).f1)

    def test_identity(self):
        sents = split_sentences("the cat sat\ndogs bark loudly")
        assert rouge_lsum(sents, sents).f1 == 1.0

    def test_repeated_reference_sentences_stay_clipped(self):
        # one candidate token cannot be credited to two reference sentences
        cand = split_sentences("a")
        ref = split_sentences("a\na")
        result = rouge_lsum(cand, ref)
        assert result.precision <= 1.0
        assert result.precision == pytest.approx(1.0)
        assert result.recall == pytest.approx(0.5)


class TestMeanRouge:
    def test_identity(self):
        assert mean_rouge("the cat sat", "the cat sat") == 1.0

    def test_fixture(self):
        value = mean_rouge("the cat sat on the mat", "the cat is on the mat")
        assert value == pytest.approx((0.8333 + 0.6 + 0.8333) / 3, abs=1e-4)

    def test_disjoint(self):
        assert mean_rouge("alpha beta", "gamma delta") == 0.0


class TestBleu:
    def test_identity(self):
        assert bleu(CAT, CAT) == pytest.approx(1.0)

    def test_smoothed_fixture(self):
        # clipped precisions 1/2, 1/3, then smoothed 1/3 and 1/2; BP = 1
        cand = tokenize("the cat the cat")
        ref = tokenize("the cat sat")
        expected = (0.5 * (1 / 3) * (1 / 3) * 0.5) ** 0.25
        assert bleu(cand, ref) == pytest.approx(expected)
        assert bleu(cand, ref) == pytest.approx(0.4082, abs=1e-4)

    def test_disjoint_small_positive(self):
        cand = tokenize("alpha beta gamma delta")
        ref = tokenize("epsilon zeta eta theta")
        score = bleu(cand, ref)
        assert 0.0 < score < 0.35

    def test_disjoint_below_overlapping_pair(self):
        disjoint = bleu(tokenize("alpha beta gamma delta"), tokenize("epsilon zeta eta theta"))
        overlapping = bleu(tokenize("alpha beta gamma delta"), tokenize("alpha beta eta theta"))
        assert disjoint < overlapping

    def test_empty_candidate(self):
        assert bleu(tokenize(""), CAT) == 0.0

    def test_brevity_penalty(self):
        cand = tokenize("the cat")
        ref = tokenize("the cat sat on the mat")
        # precisions all 1 on orders 1..2; penalty exp(1 - 6/2)
        assert bleu(cand, ref) == pytest.approx(math.exp(1 - 3))

    def test_permutation_sensitive(self):
        assert bleu(tokenize("a b c d"), tokenize("d c b a")) != pytest.approx(
            bleu(tokenize("a b c d"), tokenize("a b c d"))
        )


class TestDiversity:
    def test_fixture(self):
        result = diversity(tokenize("a a b a"))
        assert result.per_order == pytest.approx((0.5, 1.0, 1.0))
        assert result.value == pytest.approx(0.8333, abs=1e-4)

    def test_all_distinct(self):
        assert diversity(tokenize("a b c d")).value == 1.0

    def test_single_token_vacuous_orders(self):
        assert diversity(tokenize("a")).value == 1.0

    def test_empty(self):
        assert diversity(tokenize("")).value == 1.0


class TestLengthScore:
    def test_zero_difference(self):
        assert length_score(10, 10.0).value == 1.0

    def test_direct_formula(self):
        assert length_score(7, 10.0).value == pytest.approx(1 / 3)
        assert length_score(0, 30.0).value == pytest.approx(1 / 30)

    def test_sub_unit_difference_clamps(self):
        assert length_score(10, 10.4).value == 1.0


def _random_token_pair(rng):
    vocab = [f"t{i}" for i in range(8)]
    len_a = int(rng.integers(0, 31))
    len_b = int(rng.integers(0, 31))
    a = [vocab[int(i)] for i in rng.integers(0, 8, len_a)]
    b = [vocab[int(i)] for i in rng.integers(0, 8, len_b)]
    return a, b


class TestOracleEquivalence:
    """Randomized cross-checks against the brute-force implementations."""

    def test_two_hundred_random_pairs(self):
        rng = np.random.default_rng(20240817)
        for _ in range(200):
            a, b = _random_token_pair(rng)
            cand = tokenize(" ".join(a))
            ref = tokenize(" ".join(b))

            for n in (1, 2):
                got = rouge_n(cand, ref, n)
                p, r, f = oracles.rouge_n_f1(tuple(cand.tokens), tuple(ref.tokens), n)
                assert abs(got.precision - p) < 1e-9
                assert abs(got.recall - r) < 1e-9
                assert abs(got.f1 - f) < 1e-9

            got_l = rouge_l(cand, ref)
            _, _, f = oracles.rouge_l_f1(tuple(cand.tokens), tuple(ref.tokens))
            assert abs(got_l.f1 - f) < 1e-9

            assert abs(bleu(cand, ref) - oracles.bleu_score(list(cand.tokens), list(ref.tokens))) < 1e-9
            assert abs(diversity(cand).value - oracles.diversity_value(list(cand.tokens))) < 1e-9
            assert abs(length_score(len(cand), 11.5).value - oracles.length_value(len(cand), 11.5)) < 1e-9

    def test_lsum_random_sentence_groups(self):
        rng = np.random.default_rng(99)
        vocab = [f"t{i}" for i in range(8)]
        for _ in range(200):
            def draw_sents():
                n_sents = int(rng.integers(1, 4))
                sents = []
                for _ in range(n_sents):
                    length = int(rng.integers(0, 9))
                    sents.append(" ".join(vocab[int(i)] for i in rng.integers(0, 8, length)))
                return [s for s in sents if s]

            cand_sents = draw_sents()
            ref_sents = draw_sents()
            got = rouge_lsum(
                split_sentences("\n".join(cand_sents)),
                split_sentences("\n".join(ref_sents)),
            )
            _, _, f = oracles.rouge_lsum_f1(
                [tuple(s.split()) for s in cand_sents],
                [tuple(s.split()) for s in ref_sents],
            )
            assert abs(got.f1 - f) < 1e-9

    def test_all_outputs_in_unit_interval(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            a, b = _random_token_pair(rng)
            cand = tokenize(" ".join(a))
            ref = tokenize(" ".join(b))
            values = [
                rouge_n(cand, ref, 1).f1,
                rouge_n(cand, ref, 2).f1,
                rouge_l(cand, ref).f1,
                bleu(cand, ref),
                diversity(cand).value,
                length_score(len(cand), 9.0).value,
            ]
            assert all(0.0 <= v <= 1.0 for v in values)
