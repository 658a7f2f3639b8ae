"""Standard observables can be measured jointly only if they commute.

For commuting PVMs the products M_m N_n form the joint POVM; otherwise a
witness names the pair of projectors that fails to commute.
"""
import numpy as np

import qmeas
from qmeas.rand import partition_pvm, random_unitary

rng = np.random.default_rng(7)

# Two coarse-grainings of one shared basis commute
U = random_unitary(4, rng)
A = partition_pvm(U, np.array([0, 0, 1, 2]))
B = partition_pvm(U, np.array([0, 1, 1, 0]))
joint = qmeas.joint_pvm_construct(A, B)
rows, cols = qmeas.marginals(joint)
print("shared basis  -> joint grid", joint.shape,
      "; marginal error", f"{np.max(np.abs(rows.effects - A.effects)):.1e}")

# Path and interference never commute
obs = qmeas.observables(1.0)
print("path vs interference ->", qmeas.joint_pvm_construct(obs.path.pvm, obs.interference.pvm))

# Independent bases almost never do
C = partition_pvm(random_unitary(4, rng), np.array([0, 1, 1, 0]))
print("independent bases    ->", qmeas.joint_pvm_construct(A, C))
