"""Generalized (POVM-based) quantum measurement toolkit.

Validates POVMs, decides joint measurability of standard observables,
recovers non-ideality matrices, and checks the entropic and
standard-deviation uncertainty relations and the state-independent bound
on joint non-ideality. Includes the absorbing neutron interferometer and
the inefficient photon counter as worked models.
"""

from .exceptions import DimensionError, InfeasibleError, QmeasError, ValidationError
from .linalg import (
    HKRReport,
    SpectralDecomposition,
    as_density,
    as_hermitian,
    commutator,
    eigh,
    expectation,
    hkr_report,
    pure_state,
)
from .povm import (
    BivariatePovm,
    IncompatibilityWitness,
    Povm,
    Pvm,
    joint_pvm_construct,
    marginals,
    validate_povm,
    validate_pvm,
)
from .nonideality import (
    NonidealityReport,
    ValuedObservable,
    check_stochastic,
    combined_entropic_report,
    entropic_ur_report,
    generalized_heisenberg_report,
    joint_nonideal_report,
    martens_bound,
    recover_nonideality,
    row_entropy,
    shannon_entropy,
    unbiasedness_check,
    variance_decomposition,
)
from .models import (
    NeutronConfig,
    PhotonChannel,
    neutron_J_closed_form,
    neutron_bivariate,
    neutron_nonideality_closed_form,
    neutron_out_state,
    neutron_povm,
    observables,
    photon_povm,
)
from .simulate import OutcomeCounts, empirical_report, sample_outcomes

__version__ = "0.1.0"
