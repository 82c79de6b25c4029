import pytest

import idealcstar as ic


@pytest.fixture(scope="session")
def f2():
    return ic.model_from_name("F2")


@pytest.fixture(scope="session")
def z2():
    return ic.model_from_name("Z2")


@pytest.fixture(scope="session")
def z():
    return ic.model_from_name("Z")


@pytest.fixture(scope="session")
def zmod5():
    return ic.model_from_name("ZmodN:5")


@pytest.fixture(scope="session")
def dinf():
    return ic.model_from_name("Dinf")


@pytest.fixture(scope="session")
def all_models(f2, z2, zmod5, dinf):
    return [f2, z2, zmod5, dinf]


@pytest.fixture(scope="session")
def swap_system(z):
    return ic.FiniteSystem(z, {"a": [1, 0]}, [1 / 3, 2 / 3])


@pytest.fixture(scope="session")
def rotation_system():
    z3 = ic.model_from_name("ZmodN:3")
    return ic.FiniteSystem(z3, {"a": [1, 2, 0]}, [1 / 3, 1 / 3, 1 / 3])


def random_element(model, rng, max_len=6):
    letters = rng.integers(0, model.num_letters, size=int(rng.integers(0, max_len + 1)))
    return model.element([int(l) for l in letters])


def brute_force_free_ball(rank, radius):
    """Oracle: enumerate raw words over the symmetric alphabet, reduce, dedupe."""
    import itertools

    model = ic.FreeModel(rank)
    seen = set()
    for length in range(radius + 1):
        for word in itertools.product(range(2 * rank), repeat=length):
            reduced = model.reduce(word)
            if len(reduced) <= radius:
                seen.add(reduced)
    return seen


def l1_ball_count(rank, radius):
    """Oracle: lattice points with |x|_1 <= radius by direct iteration."""
    import itertools

    count = 0
    for point in itertools.product(range(-radius, radius + 1), repeat=rank):
        if sum(abs(c) for c in point) <= radius:
            count += 1
    return count
