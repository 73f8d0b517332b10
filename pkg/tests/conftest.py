"""Shared random-instance generators; everything is seeded for reproducibility."""

import numpy as np
from hypothesis import settings

from gnorm.hermitian import herm

settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")


def rand_herm(rng, d, dims=()):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return herm((g + g.conj().T) / 2, dims)


def rand_psd(rng, d, dims=()):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return herm(g @ g.conj().T / d, dims)


def rand_density(rng, d, dims=()):
    p = rand_psd(rng, d)
    return herm(p.entries / np.trace(p.entries).real, dims)


def rand_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_kraus_channel(rng, d_in, d_out, n_kraus):
    """Trace-preserving channel via a random Stinespring isometry."""
    g = rng.normal(size=(d_out * n_kraus, d_in)) + 1j * rng.normal(size=(d_out * n_kraus, d_in))
    q, _ = np.linalg.qr(g)
    return [q[i * d_out : (i + 1) * d_out, :] for i in range(n_kraus)]
