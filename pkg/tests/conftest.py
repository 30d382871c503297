import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dualbench.core import Mode, TwoPhotonState


def entangled_pair_terms(gamma=1.0):
    """Terms of the polarization-entangled pair with internal overlap gamma.

    The signal wavepacket is internal basis vector e0; the idler wavepacket is
    gamma * e0 + sqrt(1 - |gamma|^2) * e1.
    """
    beta = np.sqrt(max(0.0, 1.0 - abs(gamma) ** 2))
    inv = 1 / np.sqrt(2)
    terms = {}
    for s_pol, i_pol in (("H", "V"), ("V", "H")):
        if abs(gamma) > 0:
            terms[(Mode("S", s_pol, 0), Mode("I", i_pol, 0))] = gamma * inv
        if beta > 0:
            terms[(Mode("S", s_pol, 0), Mode("I", i_pol, 1))] = beta * inv
    return terms


@pytest.fixture
def bell_pair():
    return TwoPhotonState(entangled_pair_terms(1.0))


def gamma_pair(gamma):
    return TwoPhotonState(entangled_pair_terms(gamma))
