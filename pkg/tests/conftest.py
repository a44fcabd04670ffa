"""
Pytest configuration and fixtures for hvtorus tests.

- Unit tests: small truncations, run in well under a second each
- Slow tests: window sweeps of the acceptance experiments
"""

import pytest

from hvtorus.exppoly import ExpPolynomial, RhoSpec
from hvtorus.lattice import STANDARD_BASIS, BasisPair, LatticeVector
from hvtorus.runtime import ComputeContext


@pytest.fixture(autouse=True)
def reset_runtime(monkeypatch):
    """Reset the ComputeContext singleton and its environment between tests."""
    monkeypatch.delenv("HVTORUS_MAX_WORKERS", raising=False)
    monkeypatch.delenv("HVTORUS_LOG_LEVEL", raising=False)
    ComputeContext.reset()
    yield
    ComputeContext.reset()


@pytest.fixture
def std_basis():
    return STANDARD_BASIS


@pytest.fixture
def skew_basis():
    """A non-standard Z-basis with determinant +1."""
    return BasisPair(b1=LatticeVector(2, 1), b2=LatticeVector(1, 1))


@pytest.fixture
def zero_rho():
    return RhoSpec.zero()


@pytest.fixture
def shift_rho():
    """rho(E(k b1)) = 1 for k = 1, -1: T_rho is all of C[t, t^-1]."""
    return RhoSpec.table(E={1: 1, -1: 1})


@pytest.fixture
def even_rho():
    """rho(E(k b1)) = 1 for k = 2, -2: T_rho splits into even and odd powers."""
    return RhoSpec.table(E={2: 1, -2: 1})


@pytest.fixture
def linear_rho():
    """g1(m) = m, g2 = 0."""
    return RhoSpec.from_exp(g1=ExpPolynomial.of((1, 1, 1)))


@pytest.fixture
def constant_rho():
    """g1 = 1, g2 = 0: nonzero level rho(f(b2)) = 1."""
    return RhoSpec.from_exp(g1=ExpPolynomial.of((1, 0, 1)))
