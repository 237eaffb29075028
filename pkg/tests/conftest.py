import numpy as np
import pytest

from momentvar import catalog
from momentvar.moment import critical_test


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_tensor(n, rng, complex_entries=True):
    """A generic nonzero point of the tensor space (not usually associative)."""
    c = rng.standard_normal((n, n, n))
    if complex_entries:
        c = c + 1j * rng.standard_normal((n, n, n))
    from momentvar.algebra import AlgebraTensor
    return AlgebraTensor(n, c)


def catalog_entries():
    """Bounded catalog enumeration shared by the property suites."""
    return catalog.all_concrete_entries(max_mat=2, family_dims=(2, 3, 4))


def critical_catalog_entries():
    """Catalog entries whose own frame passes the critical test."""
    out = []
    for entry in catalog_entries():
        if critical_test(entry.tensor).is_critical:
            out.append(entry)
    return out
