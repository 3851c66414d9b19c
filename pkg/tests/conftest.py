import numpy as np
import pytest
from hypothesis import assume
from hypothesis import strategies as st

from planar_ar.params import ParamSet, check_conditions

TABLE = ParamSet(-0.1, 0.5, 0.2, 0.72)

# rows h2 = 3..-3, columns h1 = -2..3
TABLE_ACF = np.array(
    [
        [0, 0, 0.125, 0.1125, 0.0225, -0.00225],
        [0, 0, 0.25, 0.15, 0.0075, -0.003],
        [0, 0, 0.5, 0.15, -0.015, 0.0015],
        [0, 0, 1, 0, 0, 0],
        [-0.015, 0.15, 0.5, 0, 0, 0],
        [0.0075, 0.15, 0.25, 0, 0, 0],
        [0.0225, 0.1125, 0.125, 0, 0, 0],
    ]
)


def table_acf_by_lag() -> dict[tuple[int, int], float]:
    out = {}
    for r, h2 in enumerate(range(3, -4, -1)):
        for col, h1 in enumerate(range(-2, 4)):
            out[(h1, h2)] = float(TABLE_ACF[r, col])
    return out


def draw_params(rng, n, *, causal=False, min_factor=0.05, box=3.0, sigma2=(0.2, 3.0)):
    """Rejection-sample stationary (or causal) parameters away from the boundary."""
    out = []
    while len(out) < n:
        a, b, c = rng.uniform(-box, box, 3)
        p = ParamSet(float(a), float(b), float(c), float(rng.uniform(*sigma2)))
        r = check_conditions(p)
        if not r.stationary or min(abs(f) for f in r.factors) <= min_factor:
            continue
        if causal and not r.causal:
            continue
        out.append(p)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# magnitudes below 1e-100 would make the reciprocal transforms overflow
coef = st.floats(-3, 3, allow_nan=False, allow_infinity=False).filter(lambda x: x == 0 or abs(x) > 1e-100)
sigma2s = st.floats(0.1, 5, allow_nan=False, allow_infinity=False)


@st.composite
def stationary_params(draw, min_factor=0.05):
    a, b, c, s = draw(coef), draw(coef), draw(coef), draw(sigma2s)
    p = ParamSet(a, b, c, s)
    r = check_conditions(p)
    assume(r.stationary and min(abs(f) for f in r.factors) > min_factor)
    return p


@st.composite
def causal_params(draw, min_factor=0.05):
    small = st.floats(-1.5, 1.5).filter(lambda x: x == 0 or abs(x) > 1e-100)
    a, b, c = draw(small), draw(small), draw(small)
    p = ParamSet(a, b, c, draw(sigma2s))
    r = check_conditions(p)
    assume(r.causal and min(r.factors) > min_factor)
    return p
