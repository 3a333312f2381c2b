from fractions import Fraction

from hypothesis import strategies as st

from coaltwo.core import Parameters


def probabilities(max_den=12):
    """Exact probabilities in [0, 1] with small denominators."""
    return st.builds(lambda d, k: Fraction(k % (d + 1), d),
                     st.integers(1, max_den), st.integers(0, 10**6))


def parameters(max_N=60):
    return st.builds(Parameters, st.integers(2, max_N), probabilities(), probabilities())
