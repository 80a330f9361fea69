import random
from fractions import Fraction

import pytest

from exmix.measures import ExchangeableLaw
from exmix.typecomb import Alphabet, enumerate_types

_ACCEPTANCE_LINES = []


def random_law(rng: random.Random, n: int, d: int, zero_prob: float = 0.3) -> ExchangeableLaw:
    """Random rational weights on the types of mass n, some of them zero."""
    types = enumerate_types(n, d)
    raw = [0 if rng.random() < zero_prob else rng.randint(1, 12) for _ in types]
    if not any(raw):
        raw[rng.randrange(len(raw))] = 1
    total = sum(raw)
    return ExchangeableLaw(n, Alphabet.of_size(d), {t: Fraction(w, total) for t, w in zip(types, raw)})


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def acceptance_report():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
