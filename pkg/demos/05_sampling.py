"""Seeded sampling of the neutron detector grid.

Frequencies approach the Born probabilities as the number of shots
grows; a fixed seed always reproduces the same counts.
"""
import numpy as np

from qmeas import empirical_report, neutron_bivariate, sample_outcomes
from qmeas.simulate import outcome_probabilities

rho = np.eye(2) / 2
biv = neutron_bivariate(np.pi / 2, 0.5)
p = outcome_probabilities(rho, biv)
print("analytic p[m, n]:\n", p.round(4))
for shots in (10**3, 10**4, 10**5, 10**6):
    counts = sample_outcomes(rho, biv, shots, seed=2024)
    rep = empirical_report(counts, p)
    print(f"{shots:>8} shots: max |freq - p| = {rep.max_abs_dev:.2e}, chi2 = {rep.chi_square:.2f} (dof {rep.dof})")
