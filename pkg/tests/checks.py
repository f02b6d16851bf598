"""Statistical checks shared by the simulation tests."""

import numpy as np
from scipy import stats

from polyareset.crossover import crossover_cdf

#: Significance level of every goodness-of-fit test.
LEVEL = 1e-3


def chi_square_pvalue(observed: dict, expected: dict, n: int) -> float:
    """Pearson test; cells with expected count below 5 are pooled into one."""
    obs, exp, pool_o, pool_e = [], [], 0.0, 0.0
    for cell, p in expected.items():
        if p * n >= 5:
            obs.append(observed.get(cell, 0))
            exp.append(p * n)
        else:
            pool_o += observed.get(cell, 0)
            pool_e += p * n
    stray = sum(c for cell, c in observed.items() if cell not in expected)
    pool_o += stray
    if pool_e >= 5:
        obs.append(pool_o)
        exp.append(pool_e)
    else:
        assert stray == 0
    obs, exp = np.array(obs, float), np.array(exp, float)
    return float(stats.chi2.sf(((obs - exp) ** 2 / exp).sum(), len(obs) - 1))


def crossover_cdf_table(u: float):
    """Limiting CDF by linear interpolation on 4001 nodes (interpolation error ~1e-6)."""
    grid = np.linspace(0.0, 10.0, 4001)
    values = np.array([crossover_cdf(z, u) for z in grid])
    return lambda x: np.interp(x, grid, values, right=1.0)
