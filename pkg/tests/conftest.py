import numpy as np
from hypothesis import HealthCheck, settings

# deterministic property-test profile: fixed example budget, no wall-clock
# deadline (iterative solvers have uneven per-example cost)
settings.register_profile(
    "det",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("det")


def dft_matrix(N: int) -> np.ndarray:
    """Dense unitary DFT matrix, the O(N^2) oracle for the FFT layer."""
    j = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(j, j) / N) / np.sqrt(N)
