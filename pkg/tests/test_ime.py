import random

import pytest

from imenoise.ime import PinyinIME, TypingPolicy
from imenoise.pinyin import PinyinTag


@pytest.fixture(scope="module")
def ime(tiny_lexicon, tiny_model):
    return PinyinIME(tiny_lexicon, tiny_model, k=5)


class TestCandidates:
    def test_context_drives_rank(self, ime, table):
        # the tiny corpus is dominated by 现在, so after 现 the zai pick is 在
        ranked = ime.candidates("现", table.seq("zai"))
        assert ranked.surfaces()[0] == "在"

    def test_singleton_pool(self, ime, table):
        ranked = ime.candidates("", table.seq("qie"))
        assert ranked.surfaces() == ["且"]

    def test_scores_non_increasing(self, ime, table):
        ranked = ime.candidates("现", table.seq("zai"), k=10)
        scores = [c.score for c in ranked.candidates]
        assert scores == sorted(scores, reverse=True)

    def test_no_duplicate_surfaces(self, ime, table):
        ranked = ime.candidates("", table.seq("wan"), k=10)
        surfaces = ranked.surfaces()
        assert len(surfaces) == len(set(surfaces))

    def test_truncation(self, ime, table):
        assert len(ime.candidates("", table.seq("wan"), k=2)) == 2

    def test_bad_k(self, ime, table):
        with pytest.raises(ValueError):
            ime.candidates("", table.seq("wan"), k=0)

    def test_determinism(self, ime, table):
        a = ime.candidates("现在开", table.seq("xin"))
        b = ime.candidates("现在开", table.seq("xin"))
        assert a == b

    def test_ordering_matches_rescore_oracle(self, ime, tiny_lexicon, table):
        rng = random.Random(31)
        readings = sorted({r.flat: r for e in tiny_lexicon.entries for r in e.readings}.items())
        contexts = ["", "现", "现在", "开心地", "晚上吃"]
        for _ in range(300):
            _, p = readings[rng.randrange(len(readings))]
            context = rng.choice(contexts)
            fuzzy = rng.random() < 0.5
            ranked = ime.candidates(context, p, fuzzy=fuzzy, k=50)
            pool = tiny_lexicon.lookup_by_pinyin(p, fuzzy=fuzzy)
            rescored = sorted(
                ((-ime.score(context, e.surface), -e.frequency, e.surface) for e in pool),
            )
            assert [s for _, _, s in rescored] == ranked.surfaces()

    def test_pinyin_soundness_fuzzy_modes(self, ime, tiny_lexicon, table):
        rng = random.Random(57)
        inventory = sorted(table.syllables)
        norm = table.rules.normalize
        checked = 0
        trials = 0
        while checked < 10_000 and trials < 60_000:
            trials += 1
            p = table.seq(rng.choice(inventory))
            fuzzy = rng.random() < 0.5
            ranked = ime.candidates("", p, fuzzy=fuzzy, k=50)
            assert ranked.fuzzy_used == fuzzy
            for cand in ranked.candidates:
                entry = tiny_lexicon.by_surface[cand.surface]
                if fuzzy:
                    assert any(norm(r) == norm(p) for r in entry.readings)
                else:
                    assert any(r.flat == p.flat for r in entry.readings)
                checked += 1
        assert checked >= 10_000


class TestTypeToken:
    def test_slip_to_second_or_third(self, ime, table):
        # rank-1 for zai after 现 is the correct 在: the typist takes #2 or #3
        ranked = ime.candidates("现", table.seq("zai")).surfaces()
        seen = set()
        for seed in range(60):
            rng = random.Random(seed)
            out = ime.type_token("现", table.seq("zai"), TypingPolicy(avoid="在"), rng)
            seen.add(out)
        assert seen == {ranked[1], ranked[2]}

    def test_two_candidate_pool_takes_second(self, ime, tiny_lexicon, table):
        p = table.seq("lv")
        ranked = ime.candidates("", p).surfaces()
        assert len(ranked) == 2
        rng = random.Random(0)
        out = ime.type_token("", p, TypingPolicy(avoid=ranked[0]), rng)
        assert out == ranked[1]

    def test_wrong_pinyin_takes_first(self, ime, table):
        # typed dai while the correct token is 在: first candidate wins
        ranked = ime.candidates("", table.seq("dai")).surfaces()
        rng = random.Random(1)
        out = ime.type_token("", table.seq("dai"), TypingPolicy(avoid="在"), rng)
        assert out == ranked[0]

    def test_single_candidate_equal_correct(self, ime, table):
        rng = random.Random(2)
        assert ime.type_token("", table.seq("qie"), TypingPolicy(avoid="且"), rng) is None

    def test_empty_pool(self, ime, table):
        rng = random.Random(3)
        assert ime.type_token("", table.seq("kuo"), TypingPolicy(avoid="阔"), rng) is None

    def test_never_returns_avoided(self, ime, tiny_lexicon, table):
        rng = random.Random(77)
        readings = sorted({r.flat: r for e in tiny_lexicon.entries for r in e.readings}.items())
        surfaces = sorted(tiny_lexicon.by_surface)
        for _ in range(10_000):
            _, p = readings[rng.randrange(len(readings))]
            avoid = rng.choice(surfaces)
            out = ime.type_token("现在", p, TypingPolicy(avoid=avoid), rng)
            assert out != avoid

    def test_require_tag_constrains_pool(self, ime, tiny_lexicon, table):
        rng = random.Random(5)
        # typed fuzzy zhai for correct 在: without the constraint homophones
        # of 在 (tag SAME) could be picked; with it only FUZZY ones remain
        policy = TypingPolicy(avoid="在", require_tag=PinyinTag.FUZZY)
        for seed in range(30):
            out = ime.type_token("现", table.seq("zhai"), policy, random.Random(seed), fuzzy=True)
            assert out is not None
            assert tiny_lexicon.best_tag("在", out) is PinyinTag.FUZZY
