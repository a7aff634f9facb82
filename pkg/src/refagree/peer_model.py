"""Generative model of peer-review uncertainty.

Each publication of an institution carries a latent value
``v ~ LogNormal(mu, 1)`` where ``mu`` is the institution's capability.
Reviewers observe a noisy perceived value ``p = v * eps`` with a
multiplicative error ``eps ~ LogNormal(-sigma2_eps / 2, sigma2_eps)``, so the
error is 1 on average and ``sigma2_eps`` controls review inaccuracy
(``sigma2_eps = 0`` is perfectly accurate review).  A publication is awarded
four stars when its perceived value exceeds the threshold ``p_threshold``.

The perceived value is then ``LogNormal(mu - sigma2_eps/2, 1 + sigma2_eps)``,
which gives a closed-form maximum-likelihood capability estimate from an
observed 4* proportion, and Bayes' theorem gives the distribution of the
latent value conditional on the observed star outcome, sampled here by joint
rejection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from . import _kernels
from .errors import ComputationError

#: Attempt cap for rejection sampling before giving up.
MAX_SAMPLER_ATTEMPTS = 1_000_000


@dataclass(frozen=True)
class ModelConfig:
    """Scenario parameters: review inaccuracy and the four-star threshold."""

    sigma2_eps: float
    p_threshold: float = 1.0

    def __post_init__(self) -> None:
        if self.sigma2_eps < 0:
            raise ValueError(f"sigma2_eps must be nonnegative, got {self.sigma2_eps}")
        if self.p_threshold <= 0:
            raise ValueError(f"p_threshold must be positive, got {self.p_threshold}")


@dataclass(frozen=True)
class InstitutionModel:
    """Calibrated capability of one institution.

    ``n_4star`` may be non-integral because published 4* proportions are
    rounded; it is rounded half-to-even to a publication count when
    resampling.
    """

    mu: float
    n_pubs: int
    n_4star: float

    def __post_init__(self) -> None:
        if self.n_pubs <= 0:
            raise ValueError(f"n_pubs must be positive, got {self.n_pubs}")
        if not 0.0 <= self.n_4star <= self.n_pubs:
            raise ValueError(
                f"n_4star must lie in [0, n_pubs], got {self.n_4star} for n_pubs={self.n_pubs}"
            )


def perceived_value_params(mu: float, config: ModelConfig) -> tuple[float, float]:
    """Location and variance of the log of the perceived value."""
    return mu - config.sigma2_eps / 2.0, 1.0 + config.sigma2_eps


def ml_estimate_mu(pp_4star: float, n_pubs: int, config: ModelConfig) -> float:
    """Capability whose perceived-value distribution reproduces the observed PP(4*).

    Solves ``P(p > p_threshold) = pp_4star`` in closed form.  Degenerate
    proportions 0 and 1 are first clamped to ``1/(2 n_pubs)`` from the
    boundary so the estimate stays finite.
    """
    if not 0.0 <= pp_4star <= 1.0:
        raise ValueError(f"pp_4star must lie in [0, 1], got {pp_4star}")
    if n_pubs <= 0:
        raise ValueError(f"n_pubs must be positive, got {n_pubs}")
    pp = clamp_proportion(pp_4star, n_pubs)
    s2 = config.sigma2_eps
    # P(p > t) = pp  <=>  mu = ln t + s2/2 + sqrt(1+s2) * ndtri(pp)
    return math.log(config.p_threshold) + s2 / 2.0 + math.sqrt(1.0 + s2) * float(ndtri(pp))


def clamp_proportion(pp: float, n_pubs: int) -> float:
    """Continuity-corrected clamp of degenerate proportions 0 and 1."""
    if pp <= 0.0:
        return 1.0 / (2.0 * n_pubs)
    if pp >= 1.0:
        return 1.0 - 1.0 / (2.0 * n_pubs)
    return pp


def prob_4star(mu: float, config: ModelConfig) -> float:
    """Probability that a publication of capability ``mu`` is awarded 4*."""
    loc, var = perceived_value_params(mu, config)
    z = (math.log(config.p_threshold) - loc) / math.sqrt(var)
    return float(ndtr(-z))


def prob_4star_given_value(v, config: ModelConfig):
    """Probability of a 4* award conditional on the latent value.

    Vectorized over ``v``; a step function at the threshold when review is
    perfectly accurate.
    """
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr <= 0):
        raise ValueError("values must be positive")
    s2 = config.sigma2_eps
    if s2 == 0.0:
        out = (v_arr > config.p_threshold).astype(float)
    else:
        # P(eps > t/v) for log-normal eps with mean 1
        z = (np.log(config.p_threshold / v_arr) + s2 / 2.0) / math.sqrt(s2)
        out = ndtr(-z)
    if np.isscalar(v) or np.ndim(v) == 0:
        return float(out)
    return out


def sample_conditional_value(
    mu: float,
    has_4star: bool,
    config: ModelConfig,
    rng: np.random.Generator,
    max_attempts: int = MAX_SAMPLER_ATTEMPTS,
) -> float:
    """Draw one latent value conditional on the observed star outcome.

    Joint rejection: propose ``(v, eps)`` from the unconditional model and
    accept when the implied star outcome matches ``has_4star``.  The paired
    error is discarded; callers draw a fresh error for any re-review.
    """
    s2 = config.sigma2_eps
    sig = math.sqrt(s2)
    log_t = math.log(config.p_threshold)
    for _ in range(max_attempts):
        log_v = mu + rng.standard_normal()
        log_eps = -s2 / 2.0 + sig * rng.standard_normal()
        if ((log_v + log_eps) > log_t) == has_4star:
            return math.exp(log_v)
    raise ComputationError(
        f"conditional value sampler: no acceptance within {max_attempts} attempts "
        f"(mu={mu}, sigma2_eps={s2}, has_4star={has_4star})"
    )


def resample_counts(
    model: InstitutionModel,
    config: ModelConfig,
    rng: np.random.Generator,
    max_rounds: int = MAX_SAMPLER_ATTEMPTS,
) -> int:
    """Number of 4* awards in one simulated re-review of an institution."""
    n_4star = int(np.rint(model.n_4star))
    try:
        return _kernels.resample_counts(
            model.mu,
            model.n_pubs,
            n_4star,
            config.sigma2_eps,
            math.log(config.p_threshold),
            rng,
            max_rounds,
        )
    except RuntimeError as exc:
        raise ComputationError(
            f"institution resampling failed: {exc} "
            f"(mu={model.mu}, sigma2_eps={config.sigma2_eps})"
        ) from None


def resample_institution(
    model: InstitutionModel,
    config: ModelConfig,
    rng: np.random.Generator,
) -> float:
    """One bootstrapped PP(4*): re-reviewed share of 4* awards."""
    return resample_counts(model, config, rng) / model.n_pubs
