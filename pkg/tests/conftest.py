from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from symcone.lattice import build_surface_model

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture(scope="session", params=[3, 4], ids=["n3", "n4"])
def model(request):
    return build_surface_model(request.param)


@pytest.fixture(scope="session")
def m3():
    return build_surface_model(3)


@pytest.fixture(scope="session")
def m4():
    return build_surface_model(4)


small_ints = st.integers(min_value=-5, max_value=5)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def lattice_vectors(draw, model, perp_only=False, density=0.3):
    """Integer vectors with entries in [-5, 5]; ``perp_only`` zeroes F and W."""
    coords = []
    for k in range(model.rank):
        if perp_only and k < 2:
            coords.append(0)
        elif k < 6 or draw(st.floats(0, 1)) < density:
            coords.append(draw(small_ints))
        else:
            coords.append(0)
    return np.array(coords, dtype=object)


@st.composite
def rational_classes(draw, model, density=0.3):
    coords = []
    for k in range(model.rank):
        if k < 6 or draw(st.floats(0, 1)) < density:
            coords.append(draw(rationals))
        else:
            coords.append(Fraction(0))
    return np.array(coords, dtype=object)
