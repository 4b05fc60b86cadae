import numpy as np
import pytest

from agpflow.pauli import TransOp

LETTER_IDS = (0, 1, 2, 3)


def random_word(rng, max_support, min_support=1):
    n = int(rng.integers(min_support, max_support + 1))
    if n == 1:
        return (int(rng.integers(1, 4)),)
    mid = [int(x) for x in rng.integers(0, 4, size=n - 2)]
    return (int(rng.integers(1, 4)), *mid, int(rng.integers(1, 4)))


def random_transop(rng, max_support=3, n_terms=4, hermitian=False):
    terms = {}
    for _ in range(n_terms):
        w = random_word(rng, max_support)
        c = rng.normal() if hermitian else complex(rng.normal(), rng.normal())
        terms[w] = terms.get(w, 0) + c
    return TransOp(terms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def rng_session():
    return np.random.default_rng(715517)
