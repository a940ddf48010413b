"""
Shared codes and configuration fixtures for the ldlab tests.

The config module caches both YAML files, so every test starts and ends with
a cleared cache; tests that shrink caps through LDLAB_CAP use `small_cap`.
"""
import pytest
from hypothesis import settings

from ldlab import config
from ldlab.families import hadamard, reed_solomon

# galois compiles its numba kernels on first use, so the first example of a
# property test can take far longer than hypothesis's default deadline
settings.register_profile('ldlab', deadline=None)
settings.load_profile('ldlab')


@pytest.fixture(autouse=True)
def fresh_config():
    config.reset_cache()
    yield
    config.reset_cache()


@pytest.fixture()
def small_cap(monkeypatch):
    """Enumeration-style caps lowered to 64"""
    monkeypatch.setenv(config.CAP_ENV_VAR, '64')
    config.reset_cache()
    return 64


# -----------------------------
# Small codes
# -----------------------------

@pytest.fixture()
def had22():
    """Had(2,2): n=4, k=2, d=2"""
    return hadamard(2, 2)


@pytest.fixture()
def had23():
    """Had(2,3): n=8, k=3, d=4"""
    return hadamard(2, 3)


@pytest.fixture()
def had32():
    """Had(3,2): n=9, k=2, d=6"""
    return hadamard(3, 2)


@pytest.fixture()
def rs5():
    """RS over GF(5) on all five points, degree <= 1: n=5, k=2, d=4"""
    return reed_solomon(5, range(5), 1)
