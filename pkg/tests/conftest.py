import sys
from pathlib import Path

import numpy as np
import hypothesis.strategies as st
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

unit = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def matrices(draw, n=None, max_n=8):
    n = n or draw(st.integers(1, max_n))
    return np.array(draw(st.lists(st.lists(unit, min_size=n, max_size=n), min_size=n, max_size=n)))


@st.composite
def prob_vectors(draw, n):
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    if w.sum() == 0.0:
        w[draw(st.integers(0, n - 1))] = 1.0
    return w / w.sum()


@st.composite
def games_with_profile(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    return (draw(matrices(n)), draw(matrices(n)), draw(prob_vectors(n)), draw(prob_vectors(n)))
