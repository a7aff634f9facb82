"""Numpy reference backend for the resampling kernel.

Implements the draw-order contract documented in the package ``__init__``;
the compiled backend must stay bit-identical to this one.
"""

from __future__ import annotations

import math

import numpy as np


def resample_counts(
    mu: float,
    n_pubs: int,
    n_4star: int,
    sigma2_eps: float,
    log_threshold: float,
    rng: np.random.Generator,
    max_rounds: int = 1_000_000,
) -> int:
    if n_pubs <= 0:
        raise ValueError(f"n_pubs must be positive, got {n_pubs}")
    if not 0 <= n_4star <= n_pubs:
        raise ValueError(f"n_4star must lie in [0, n_pubs], got {n_4star}")
    if sigma2_eps < 0:
        raise ValueError(f"sigma2_eps must be nonnegative, got {sigma2_eps}")

    sig = math.sqrt(sigma2_eps)
    loc = -0.5 * sigma2_eps
    log_v = np.empty(n_pubs, dtype=np.float64)
    want_4star = np.zeros(n_pubs, dtype=bool)
    want_4star[:n_4star] = True
    active = np.arange(n_pubs, dtype=np.intp)

    rounds = 0
    while active.size:
        if rounds >= max_rounds:
            raise RuntimeError(
                f"{active.size} of {n_pubs} publications unresolved "
                f"after {max_rounds} rejection rounds"
            )
        rounds += 1
        z_v = rng.standard_normal(active.size)
        z_e = rng.standard_normal(active.size)
        lv = mu + z_v
        le = loc + sig * z_e
        accepted = ((lv + le) > log_threshold) == want_4star[active]
        log_v[active[accepted]] = lv[accepted]
        active = active[~accepted]

    z = rng.standard_normal(n_pubs)
    log_p = log_v + (loc + sig * z)
    return int(np.count_nonzero(log_p > log_threshold))
