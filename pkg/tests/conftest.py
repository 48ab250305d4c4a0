import numpy as np
import pytest

from loccache import UserRealization, allocate_memory, place_cache

# five-state worked example: rates chosen so the equal-time-ratio
# solution lands on m = (0.25, 0.5, 0.75, 0.5, 0.25) at M = 2.25, K = 4
EXAMPLE_RATES = np.array([3.0, 2.0, 1.0, 2.0, 3.0])
EXAMPLE_M = 2.25
EXAMPLE_K = 4
EXAMPLE_REALIZATION = UserRealization((1, 2, 4, 5))


@pytest.fixture(scope="session")
def example_alloc():
    return allocate_memory(EXAMPLE_RATES, EXAMPLE_M, EXAMPLE_K)


@pytest.fixture(scope="session")
def example_placement(example_alloc):
    return place_cache(example_alloc, EXAMPLE_K)


def random_integer_t_instance(rng):
    """Random (K, t, rates, realization) with an equal-time-ratio rate vector.

    Multiplicities are drawn in 1..K-1 and rates set proportional to
    1 - t(j)/K, so the drawn t IS the optimal allocation for M = sum t/K
    and the closed-form delivery time applies.
    """
    K = int(rng.integers(2, 7))
    S = int(rng.integers(2, 9))
    t = rng.integers(1, K, size=S)
    scale = float(rng.uniform(0.5, 5.0))
    rates = scale * (1.0 - t / K)
    realization = UserRealization(tuple(int(s) for s in rng.integers(1, S + 1, size=K)))
    return K, t, rates, realization
