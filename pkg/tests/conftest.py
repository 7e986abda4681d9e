import random

import pytest
from importlib import resources

from imenoise.lexicon import Lexicon, LexiconEntry
from imenoise.lm import NGramLanguageModel
from imenoise.pinyin import PinyinTable

DATA = resources.files("imenoise.data")

# Readings for the small, hand-checked character set the unit tests use.
TINY_READINGS = {
    "在": ["zai"], "再": ["zai"], "载": ["zai"], "宅": ["zhai"], "砸": ["za"],
    "太": ["tai"], "现": ["xian"], "先": ["xian"],
    "的": ["de", "di"], "地": ["di", "de"], "得": ["de", "dei"],
    "他": ["ta"], "她": ["ta"], "它": ["ta"],
    "开": ["kai"], "心": ["xin"], "新": ["xin"],
    "旅": ["lv"], "驴": ["lv"], "游": ["you"], "友": ["you"], "有": ["you"],
    "庐": ["lu"], "卢": ["lu"], "山": ["shan"], "善": ["shan"], "上": ["shang"],
    "完": ["wan"], "玩": ["wan"], "晚": ["wan"], "万": ["wan"],
    "带": ["dai"], "戴": ["dai"], "第": ["di"],
    "好": ["hao"], "吃": ["chi"], "西": ["xi"], "安": ["an"],
    "且": ["qie"], "监": ["jian"], "管": ["guan"], "也": ["ye"],
    "不": ["bu"], "如": ["ru"], "寿": ["shou"], "险": ["xian"],
    "快": ["kuai"], "乐": ["le", "yue"], "人": ["ren"], "民": ["min"],
}

# surface, readings (space-separated syllables), frequency, entity flag
TINY_WORDS = [
    ("现在", ["xian zai"], 5000, False),
    ("开心", ["kai xin"], 3000, False),
    ("心地", ["xin di"], 80, False),
    ("旅游", ["lv you"], 2500, False),
    ("驴友", ["lv you"], 120, False),
    ("庐山", ["lu shan"], 60, True),
    ("完善", ["wan shan"], 900, False),
    ("晚上", ["wan shang"], 2000, False),
    ("寿险", ["shou xian"], 150, False),
    ("监管", ["jian guan"], 700, False),
    ("人民", ["ren min"], 4000, False),
    ("快乐", ["kuai le"], 1800, False),
    ("西安", ["xi an"], 500, True),
    ("先", ["xian"], 900, False),
]
TINY_CHAR_FREQS = {
    "的": 100000, "地": 9000, "得": 8000, "在": 60000, "再": 9000, "载": 700,
    "宅": 300, "砸": 200, "太": 5000, "现": 7000, "他": 30000, "她": 15000,
    "它": 6000, "开": 8000, "心": 7000, "新": 9000, "旅": 900, "驴": 100,
    "游": 1500, "友": 1200, "有": 40000, "庐": 30, "卢": 90, "山": 3000,
    "善": 500, "上": 20000, "完": 2500, "玩": 1800, "晚": 2200, "万": 4000,
    "带": 2000, "戴": 400, "第": 6000, "好": 12000, "吃": 3000, "西": 4000,
    "安": 3500, "且": 1500, "监": 600, "管": 1800, "也": 18000, "不": 50000,
    "如": 6000, "寿": 300, "险": 900, "快": 2600, "乐": 2000, "人": 25000,
    "民": 5000,
}


@pytest.fixture(scope="session")
def table():
    t = PinyinTable.load(str(DATA / "syllables.txt"), str(DATA / "fuzzy_rules.txt"))
    for ch, readings in TINY_READINGS.items():
        t.add_char(ch, readings)
    return t


@pytest.fixture(scope="session")
def tiny_lexicon(table):
    entries = []
    for surface, readings, freq, entity in TINY_WORDS:
        entries.append(
            LexiconEntry(surface, tuple(table.seq(r) for r in readings), freq, entity)
        )
    for ch, freq in TINY_CHAR_FREQS.items():
        entries.append(LexiconEntry(ch, table.readings(ch), freq))
    return Lexicon(entries, table)


TINY_CORPUS = [
    "现在开心地旅游",
    "现在人民快乐",
    "他现在在西安旅游",
    "晚上吃得好",
    "现在完善监管",
    "且监管也不如寿险完善",
    "游戏规则的快速改变",
    "开心地旅游的人",
    "现在他也开心",
    "她晚上在庐山",
] * 3


@pytest.fixture(scope="session")
def tiny_model(table):
    usable = [
        "".join(c for c in s if table.known_char(c)) for s in TINY_CORPUS
    ]
    return NGramLanguageModel(order=3).fit([s for s in usable if s])


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240811)
