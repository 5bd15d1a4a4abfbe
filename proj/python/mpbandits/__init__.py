"""Decentralized multi-player multi-armed bandit simulations."""

from ._core import (
    PRNG,
    ResourceError,
    exploration,
    kl_bernoulli,
    klucb_index,
    klucb_upper_bound,
    lower_bound_ours,
    lower_bound_zhao,
    run_monte_carlo,
    tree,
    ucb_index,
)

__all__ = [
    "PRNG",
    "ResourceError",
    "exploration",
    "kl_bernoulli",
    "klucb_index",
    "klucb_upper_bound",
    "lower_bound_ours",
    "lower_bound_zhao",
    "run_monte_carlo",
    "tree",
    "ucb_index",
]
