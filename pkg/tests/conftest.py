import itertools
from fractions import Fraction

import pytest

from gcdcode.network import NetworkSpec
from gcdcode.typekit import AlphabetSpec, Distribution

BIN2 = AlphabetSpec((2, 2))
BIN3 = AlphabetSpec((2, 2, 2))
CD = NetworkSpec.complementary_delivery()
THREE = NetworkSpec.three_user()

# doubly symmetric binary source with crossover 0.11
DSBS = Distribution(BIN2, (Fraction(89, 200), Fraction(11, 200), Fraction(11, 200), Fraction(89, 200)))


def all_sequences(alphabet, n):
    """Every length-n sequence over the joint alphabet, the brute-force universe."""
    return itertools.product(alphabet.letters, repeat=n)


def histogram(x, alphabet):
    counts = [0] * alphabet.joint_size
    for letter in x:
        counts[alphabet.letters.index(tuple(letter))] += 1
    return tuple(counts)


@pytest.fixture
def bin2():
    return BIN2


@pytest.fixture
def cd():
    return CD


@pytest.fixture
def dsbs():
    return DSBS


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
