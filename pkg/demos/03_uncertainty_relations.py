"""Preparation vs measurement uncertainty.

The entropic uncertainty relation bounds the outcome entropies of two
separate ideal measurements on the same state. The joint-measurement bound
instead constrains the measuring device and holds for every state. Adding
the two gives a weaker combined inequality.
"""
import numpy as np

import qmeas
from qmeas.rand import random_density, random_maximal_observable

rng = np.random.default_rng(1)
A, B = random_maximal_observable(3, rng), random_maximal_observable(3, rng)
for _ in range(3):
    rho = random_density(3, rng)
    r = qmeas.entropic_ur_report(rho, A, B)
    print(f"H_A + H_B = {r.H_A + r.H_B:.4f} >= {r.bound:.4f}: {r.satisfied}")

# Standard deviations: unbiased noise only widens the distribution
lam = np.array([[1, 0.25, 0], [0, 0.5, 0], [0, 0.25, 1]])
v = qmeas.variance_decomposition(lam, [-1, 0, 1], [0.2, 0.5, 0.3])
print(f"\nVar(r) = {v.var_r:.4f} = Var(p) {v.var_p:.4f} + noise {v.noise_term:.4f}")

# Combined inequality on the neutron interferometer
chi = 0.4
obs = qmeas.observables(chi)
c = qmeas.combined_entropic_report(np.eye(2) / 2, qmeas.neutron_bivariate(chi, 0.3), obs.path, obs.interference)
print(f"\nH_A + J_lambda + H_B + J_mu = {c.sum:.4f} >= {c.bound:.4f}")
