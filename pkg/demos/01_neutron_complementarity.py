"""Neutron interferometer with an absorber: a joint non-ideal measurement.

Sweeping the absorber transmission `a` from 0 to 1 trades information
about which path the neutron took for interference visibility. Both
marginals of the detector POVM are noisy versions of the ideal path and
interference observables, and their combined non-ideality never drops
below ln 2.
"""
import numpy as np

import qmeas

chi = np.pi / 3
obs = qmeas.observables(chi)

# The three detector effects are not projectors for 0 < a < 1
M = qmeas.neutron_povm(chi, 0.5)
print("is the a=0.5 detector POVM projective?", M.is_pvm)

# Group them into a 2x2 grid and read off both non-ideality matrices
rep = qmeas.joint_nonideal_report(qmeas.neutron_bivariate(chi, 0.5), obs.path, obs.interference)
print("lambda (path):\n", rep.lam.round(4))
print("mu (interference):\n", rep.mu.round(4))

# The sweep behind the parametric J_lambda vs J_mu plot
print(f"\n{'a':>5} {'J_lambda':>10} {'J_mu':>10} {'sum - ln2':>10}")
for a in np.linspace(0, 1, 11):
    r = qmeas.joint_nonideal_report(qmeas.neutron_bivariate(chi, a), obs.path, obs.interference)
    print(f"{a:5.2f} {r.J_lambda:10.6f} {r.J_mu:10.6f} {r.J_lambda + r.J_mu - np.log(2):10.2e}")
