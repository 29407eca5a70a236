"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from gsvdcap import ChannelPair, ExperimentConfig, sample_channel


def random_pair(n_t, n_r, n_e, seed, trial=0, sigma_r2=1.0, sigma_e2=1.0):
    """Draw one seeded Rayleigh channel pair through the experiment sampler."""
    cfg = ExperimentConfig(
        n_t=n_t,
        n_r=n_r,
        n_e=n_e,
        sigma_r2=sigma_r2,
        sigma_e2=sigma_e2,
        trials=1,
        seed=seed,
    )
    return sample_channel(cfg, trial)


def pair_from_arrays(hr, he):
    return ChannelPair(np.asarray(hr, dtype=np.complex128),
                       np.asarray(he, dtype=np.complex128))


@pytest.fixture(scope="session")
def shape_classes():
    """Shape triples (n_t, n_r, n_e) spanning tall, square, and wide regimes."""
    return [
        (5, 5, 4),
        (4, 3, 3),
        (6, 3, 3),
        (8, 3, 3),
        (3, 2, 5),
        (5, 4, 2),
        (5, 3, 4),
        (2, 2, 2),
    ]
