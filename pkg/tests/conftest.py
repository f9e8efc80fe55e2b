import math

import pytest

from tcxy.freefermion import XYParams
from tcxy.hamiltonians import SystemParams

TWO_PI = 2.0 * math.pi


def fig2_params(**over) -> SystemParams:
    """Caption parameters of the dynamics comparison, in angular units."""
    xy = dict(lam=TWO_PI * 1.0, gamma=1.0, h=TWO_PI * 1e-5, n_spins=4)
    xy.update({k: over.pop(k) for k in list(over) if k in xy})
    base = dict(
        omega0=TWO_PI * 6.9e9,
        omega_a=TWO_PI * 6.89e9,
        g=TWO_PI * 1.05e6,
        n_bar=40.0,
        theta=math.pi / 2,
        phi=0.0,
        varphi=math.pi / 3,
    )
    base.update(over)
    return SystemParams(xy=XYParams(**xy), **base)


@pytest.fixture
def fig2():
    return fig2_params
