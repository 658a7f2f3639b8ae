"""Seeded random constructions used by property tests and demos.

Every function takes an explicit ``numpy.random.Generator``.
"""

import numpy as np
import scipy.stats

from .nonideality import ValuedObservable
from .povm import BivariatePovm, Pvm


def random_unitary(d, rng):
    """Haar-random unitary."""
    return scipy.stats.unitary_group.rvs(d, random_state=rng)


def random_pure_state(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density(d, rng, rank=None):
    """Random density matrix from a Ginibre matrix of the given rank (full by default)."""
    k = d if rank is None else rank
    G = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = G @ G.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_hermitian(d, rng):
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (G + G.conj().T)


def basis_pvm(U):
    """Rank-one PVM from the columns of a unitary."""
    return Pvm([np.outer(u, u.conj()) for u in U.T])


def random_maximal_observable(d, rng):
    """Maximal observable in a Haar-random basis with distinct random values."""
    values = np.sort(rng.normal(size=d))
    return ValuedObservable(basis_pvm(random_unitary(d, rng)), values)


def partition_pvm(U, labels):
    """PVM whose projectors span the columns of `U` sharing a label."""
    groups = [np.flatnonzero(labels == g) for g in np.unique(labels)]
    return Pvm([U[:, g] @ U[:, g].conj().T for g in groups])


def random_partition(d, rng):
    k = rng.integers(1, d + 1)
    labels = rng.integers(0, k, size=d)
    return labels


def commuting_pvm_pair(d, rng):
    """Two PVMs diagonal in one shared random basis, with independent partitions."""
    U = random_unitary(d, rng)
    return partition_pvm(U, random_partition(d, rng)), partition_pvm(U, random_partition(d, rng))


def independent_pvm_pair(d, rng):
    """Two PVMs built on independent random bases (almost surely non-commuting unless trivial)."""
    A = partition_pvm(random_unitary(d, rng), random_partition(d, rng))
    B = partition_pvm(random_unitary(d, rng), random_partition(d, rng))
    return A, B


def random_stochastic(rows, cols, rng):
    """Column-stochastic matrix with Dirichlet(1) columns."""
    return rng.dirichlet(np.ones(rows), size=cols).T


def symmetric_spreading_channel(K, rng):
    """Random unbiased channel for the equally spaced values ``0, 1, ..., K-1``.

    Column ``j`` keeps some mass on ``j`` and moves the rest in equal
    halves to ``j - k`` and ``j + k`` for each reach ``k`` that stays in
    range, so the column mean stays at ``j``. End columns stay ideal.
    """
    lam = np.zeros((K, K))
    for j in range(K):
        reach = min(j, K - 1 - j)
        w = rng.dirichlet(np.ones(reach + 1))
        lam[j, j] = w[0]
        for k in range(1, reach + 1):
            lam[j - k, j] += w[k] / 2
            lam[j + k, j] += w[k] / 2
    return lam


def noisy_grid(biv, t):
    """Mix a bivariate POVM with the uniform grid ``I / (K L)``: ``(1 - t) R + t I/(K L)``."""
    K, L = biv.shape
    noise = np.broadcast_to(np.eye(biv.dim) / (K * L), biv.grid.shape)
    return BivariatePovm((1 - t) * biv.grid + t * noise)
