import pytest

from machnat.data import load_classic_rules, load_corpus
from machnat.kernel import MachParams


@pytest.fixture(scope="session")
def mach():
    return MachParams()


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def entries(corpus):
    return corpus.by_id()


@pytest.fixture(scope="session")
def corpus_rules(corpus):
    return corpus.rules()


@pytest.fixture(scope="session")
def classic():
    return load_classic_rules()
