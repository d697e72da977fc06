import pytest

from expolevy import params_from_model

from _fixtures import FIXTURES


@pytest.fixture(scope="session")
def params_for():
    cache = {}

    def get(name):
        if name not in cache:
            model, q = FIXTURES[name]
            cache[name] = params_from_model(model, q)
        return cache[name]

    return get
