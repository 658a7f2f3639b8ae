"""Inefficient photon counting as a binomial non-ideality channel.

Each photon is registered with probability eta. The resulting POVM is
diagonal in the number basis and its channel is biased: it lowers the
mean count to eta * n.
"""
import numpy as np

from qmeas import PhotonChannel, photon_povm
from qmeas.models import photon_mean_counts

povm, lam = photon_povm(PhotonChannel(eta=0.6, n_max=5))
np.set_printoptions(precision=4, suppress=True)
print("lambda[m, n] = P(detect m | n photons):\n", lam)
print("column sums:", lam.sum(axis=0))
print("mean detected count per Fock state:", photon_mean_counts(lam))
print("number of effects (including the remainder):", len(povm))
