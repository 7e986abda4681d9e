import math
import random
from collections import Counter, defaultdict

import pytest

from imenoise.errors import DataFormatError
from imenoise.lm import BOS, EOS, UNK, NGramLanguageModel, relative_ppl_increase


def make_reference(sentences, order, d):
    """Independent recursive implementation of the interpolated
    absolute-discounting formula, straight from raw counts."""
    vocab = set("".join(sentences)) | {BOS, EOS, UNK}
    level_counts = [defaultdict(Counter) for _ in range(order + 1)]
    for s in sentences:
        seq = [BOS] * (order - 1) + list(s) + [EOS]
        for i in range(order - 1, len(seq)):
            hist = tuple(seq[i - order + 1 : i])
            for k in range(1, order + 1):
                level_counts[k][hist[len(hist) - (k - 1) :]][seq[i]] += 1
    V = len(vocab)

    def p(k, hist, tok):
        if k == 1:
            c = level_counts[1][()]
            tot = sum(c.values())
            n1 = len(c)
            return (max(c.get(tok, 0) - d, 0.0) + d * n1 / V) / tot
        counter = level_counts[k].get(hist)
        if not counter:
            return p(k - 1, hist[1:], tok)
        tot = sum(counter.values())
        lam = d * len(counter) / tot
        return max(counter.get(tok, 0) - d, 0.0) / tot + lam * p(k - 1, hist[1:], tok)

    def prob(tok, hist):
        tok = tok if tok in vocab else UNK
        hist = tuple(c if c in vocab else UNK for c in hist)[-(order - 1) :] if order > 1 else ()
        return p(order, hist, tok)

    return vocab, prob


class TestHandComputed:
    def test_bigram_ab(self):
        # corpus ab,ab: bigram events (B,a) (a,b) (b,E) twice each
        # unigrams: a=2 b=2 E=2, C=6, distinct=3, V=5
        # p1(b) = (2-.75)/6 + (.75*3/6)/5 = 0.2833333...
        # p(b|a) = (2-.75)/2 + (.75*1/2)*p1(b) = 0.625 + 0.375*0.28333...
        m = NGramLanguageModel(order=2, discount=0.75).fit(["ab", "ab"])
        expected = 0.625 + 0.375 * (1.25 / 6 + 0.75 * 3 / 6 / 5)
        assert math.isclose(10 ** m.logprob10("b", "a"), expected, rel_tol=1e-12)
        # b is the most probable continuation of history "a"
        best = max(m.vocab_, key=lambda w: m.logprob10(w, "a"))
        assert best == "b"

    def test_unigram_counts(self):
        # corpus "aa": tokens a,a,E; C=3, distinct=2, V=4
        m = NGramLanguageModel(order=1, discount=0.75).fit(["aa"])
        p_a = (2 - 0.75) / 3 + (0.75 * 2 / 3) / 4
        p_unk = (0.75 * 2 / 3) / 4
        assert math.isclose(10 ** m.logprob10("a", ""), p_a, rel_tol=1e-12)
        assert math.isclose(10 ** m.logprob10(UNK, ""), p_unk, rel_tol=1e-12)
        assert p_a > p_unk

    def test_closed_form_perplexity(self):
        # order-1 model on the single sentence "a": p(a)=p(E)=0.3125,
        # so PPL("a") = (0.3125 * 0.3125) ** -(1/2) = 3.2 exactly
        m = NGramLanguageModel(order=1, discount=0.75).fit(["a"])
        assert math.isclose(m.perplexity("a"), 3.2, rel_tol=1e-12)


class TestInvariants:
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_normalization(self, order):
        m = NGramLanguageModel(order=order, discount=0.6).fit(["abcab", "bca", "aa"])
        histories = ["", "a", "ab", "ca", BOS * max(order - 1, 0), "zz", "bz"]
        for hist in histories:
            total = sum(10 ** m.logprob10(w, hist) for w in m.vocab_)
            assert abs(total - 1.0) < 1e-6, (hist, total)

    def test_every_corpus_char_in_vocab(self):
        m = NGramLanguageModel(order=2).fit(["xyz", "zzy"])
        assert {"x", "y", "z"} <= m.vocab_

    def test_determinism(self):
        m = NGramLanguageModel(order=3).fit(["abcd", "bcda"])
        assert m.perplexity("abc") == m.perplexity("abc")

    def test_unk_sentence_harder(self):
        m = NGramLanguageModel(order=2).fit(["aaaa", "aaab"] * 5)
        assert m.perplexity("qrs") >= m.perplexity("aaaa")

    def test_monotone_data_support(self):
        base = ["abc", "bcd", "cde"]
        m1 = NGramLanguageModel(order=2).fit(base)
        m2 = NGramLanguageModel(order=2).fit(base + ["abc"] * 3)
        assert m2.perplexity("abc") <= m1.perplexity("abc")

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            NGramLanguageModel(order=2).fit([])
        with pytest.raises(ValueError):
            NGramLanguageModel(order=2).fit(["", ""])

    def test_bad_hyperparameters(self):
        with pytest.raises(ValueError):
            NGramLanguageModel(order=0).fit(["ab"])
        with pytest.raises(ValueError):
            NGramLanguageModel(order=2, discount=1.5).fit(["ab"])

    def test_empty_sentence_rejected(self):
        m = NGramLanguageModel(order=2).fit(["ab"])
        with pytest.raises(ValueError):
            m.perplexity("")


class TestOracle:
    @pytest.mark.parametrize("order", [1, 2])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_reference(self, order, seed):
        rng = random.Random(seed)
        alphabet = "abcde"[: rng.randint(2, 5)]
        corpus = [
            "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 6)))
            for _ in range(rng.randint(2, 8))
        ]
        d = rng.choice([0.4, 0.75, 0.9])
        m = NGramLanguageModel(order=order, discount=d).fit(corpus)
        vocab, ref = make_reference(corpus, order, d)
        assert vocab == m.vocab_
        tokens = sorted(vocab) + ["q"]  # q is out-of-vocabulary
        histories = [""]
        if order > 1:
            histories += [c for c in sorted(vocab)] + ["q", BOS]
        for tok in tokens:
            for hist in histories:
                got = 10 ** m.logprob10(tok, hist)
                want = ref(tok, hist)
                assert math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-15), (tok, hist)


class TestRelativeIncrease:
    def test_identical_is_zero(self):
        m = NGramLanguageModel(order=2).fit(["abab"])
        assert relative_ppl_increase(m, "abab", "abab") == 0.0

    def test_unseen_swap_positive_and_reverse_negative(self):
        m = NGramLanguageModel(order=2).fit(["abab", "abab", "abcd"])
        memorized, corrupted = "abab", "abqb"
        assert relative_ppl_increase(m, memorized, corrupted) > 0
        assert relative_ppl_increase(m, corrupted, memorized) < 0


class TestSerialization:
    def test_round_trip_scores_identical(self, tmp_path):
        rng = random.Random(42)
        corpus = [
            "".join(rng.choice("abcdef") for _ in range(rng.randint(2, 12)))
            for _ in range(30)
        ]
        m = NGramLanguageModel(order=3, discount=0.7).fit(corpus)
        path = tmp_path / "model.txt"
        m.save(path)
        m2 = NGramLanguageModel.load(path)
        assert m2.get_params() == m.get_params()
        for _ in range(100):
            s = "".join(rng.choice("abcdefq ") for _ in range(rng.randint(1, 15))).strip() or "a"
            assert m.perplexity(s) == m2.perplexity(s)

    def test_save_load_save_bytes_identical(self, tmp_path):
        m = NGramLanguageModel(order=2).fit(["ab ba", "a\tb", "a\\b"])
        p1, p2 = tmp_path / "m1.txt", tmp_path / "m2.txt"
        m.save(p1)
        NGramLanguageModel.load(p1).save(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_gzip_round_trip(self, tmp_path):
        m = NGramLanguageModel(order=2).fit(["abc"])
        path = tmp_path / "model.arpa.gz"
        m.save(path)
        assert NGramLanguageModel.load(path).perplexity("abc") == m.perplexity("abc")

    def test_truncated_file(self, tmp_path):
        m = NGramLanguageModel(order=2).fit(["abc"])
        path = tmp_path / "model.txt"
        m.save(path)
        text = path.read_text(encoding="utf-8")
        path.write_text(text.replace("\\end\\\n", ""), encoding="utf-8")
        with pytest.raises(DataFormatError, match="truncated"):
            NGramLanguageModel.load(path)

    def test_version_mismatch(self, tmp_path):
        m = NGramLanguageModel(order=2).fit(["abc"])
        path = tmp_path / "model.txt"
        m.save(path)
        text = path.read_text(encoding="utf-8")
        path.write_text(text.replace("ngram-lm-v1", "ngram-lm-v9", 1), encoding="utf-8")
        with pytest.raises(DataFormatError, match="version"):
            NGramLanguageModel.load(path)

    def test_bad_line_reports_position(self, tmp_path):
        m = NGramLanguageModel(order=2).fit(["abc"])
        path = tmp_path / "model.txt"
        m.save(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[5] = "not-a-number\ta"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match=":6:"):
            NGramLanguageModel.load(path)
