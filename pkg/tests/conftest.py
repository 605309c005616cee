"""Shared fixtures: session-scoped eigenpair cache keyed by (beta, grid size)."""

import pytest

from fraclab import Grid, assemble_operator, compute_spectrum


@pytest.fixture(scope="session")
def get_spectrum():
    """Memoized spectrum loader; repeated requests reuse the larger solve."""
    cache = {}

    def fetch(beta, n, modes=12):
        key = (beta, n)
        have = cache.get(key)
        if have is None or have.modes < modes:
            solve = min(max(modes, 12), n)
            have = compute_spectrum(assemble_operator(Grid(n), beta), solve)
            cache[key] = have
        return have

    return fetch
