"""Neutron interferometer with an absorber, and the inefficient photon counter.

Neutron model
-------------
A neutron enters a three-slab interferometer in ``alpha|k1> + beta|k2>``.
One path carries a phase shifter (phase ``chi``) and an absorber
(amplitude transmission ``sqrt(a)``); each Bragg reflection contributes a
factor ``i``. The two detectors and the absorber define a three-outcome
POVM on the two-dimensional path space. Grouping its effects as

    R = [[M1,   M2  ],
         [M3/2, M3/2]]

makes it a joint non-ideal measurement of the *path* observable
``{P+, P-}`` (rows) and the *interference* observable ``{Q1, Q2}``
(columns). Outcome values are +1/-1 for both, by convention.

Photon model
------------
A detector with quantum efficiency ``eta`` registers ``m`` of ``n``
incident photons with binomial probability, so its POVM is diagonal in
the number basis.
"""

from dataclasses import dataclass
from math import comb
from typing import NamedTuple

import numpy as np

from .exceptions import ValidationError
from .linalg import TOL_TRACE
from .nonideality import ValuedObservable
from .povm import BivariatePovm, Povm, Pvm

P_PLUS = 0.5 * np.array([[1, -1j], [1j, 1]])
P_MINUS = 0.5 * np.array([[1, 1j], [-1j, 1]])
for _a in (P_PLUS, P_MINUS):
    _a.setflags(write=False)

CROSS_CHECK_TOL = 1e-10


def _check_a(a):
    if not 0.0 <= a <= 1.0:
        raise ValidationError(f"transmission coefficient a={a!r} outside [0, 1]")


def interference_projectors(chi):
    """``Q1(chi), Q2(chi)`` in the ``|k1>, |k2>`` basis."""
    c2 = np.cos(chi / 2) ** 2
    s2 = np.sin(chi / 2) ** 2
    h = 0.5 * np.sin(chi)
    Q1 = np.array([[c2, -h], [-h, s2]], dtype=complex)
    Q2 = np.array([[s2, h], [h, c2]], dtype=complex)
    return Q1, Q2


class NeutronObservables(NamedTuple):
    interference: ValuedObservable
    path: ValuedObservable


def observables(chi):
    """Interference ``{Q1, Q2}`` and path ``{P+, P-}`` observables, both valued (+1, -1)."""
    Q1, Q2 = interference_projectors(chi)
    return NeutronObservables(
        interference=ValuedObservable(Pvm([Q1, Q2], labels=("Q1", "Q2")), (1.0, -1.0)),
        path=ValuedObservable(Pvm([P_PLUS, P_MINUS], labels=("P+", "P-")), (1.0, -1.0)),
    )


@dataclass(frozen=True)
class NeutronConfig:
    alpha: complex
    beta: complex
    chi: float
    a: float

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise ValidationError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
        _check_a(self.a)


class NeutronOutState(NamedTuple):
    c1: complex
    c2: complex
    c_abs: complex

    @property
    def probabilities(self):
        return np.abs(np.array([self.c1, self.c2, self.c_abs])) ** 2


def _out_rows(chi, a):
    """Rows ``v_i`` with ``<k_i|out> = v_i . (alpha, beta)``; row 3 is the absorbed channel."""
    s = np.sqrt(a) * np.exp(1j * chi)
    return np.array(
        [
            [0.5 * (-1 - s), 0.5 * (1j - 1j * s)],
            [0.5 * (-1j + 1j * s), 0.5 * (-1 - s)],
            [np.sqrt((1 - a) / 2) * 1j, -np.sqrt((1 - a) / 2)],
        ]
    )


def neutron_out_state(cfg):
    """Amplitudes on ``|k1>``, ``|k2>`` and ``|abs>`` after the interferometer."""
    c = _out_rows(cfg.chi, cfg.a) @ np.array([cfg.alpha, cfg.beta], dtype=complex)
    return NeutronOutState(complex(c[0]), complex(c[1]), complex(c[2]))


def neutron_effects(chi, a):
    """The three effects ``M1, M2, M3`` as an array of shape (3, 2, 2)."""
    _check_a(a)
    Q1, Q2 = interference_projectors(chi)
    ra = np.sqrt(a)
    base = P_PLUS + a * P_MINUS
    M1 = 0.5 * (base + ra * (Q1 - Q2))
    M2 = 0.5 * (base - ra * (Q1 - Q2))
    M3 = (1 - a) * P_MINUS
    return np.stack([M1, M2, M3])


SIX_STATES = np.array(
    [[1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j]], dtype=complex
) / np.array([1, 1, np.sqrt(2), np.sqrt(2), np.sqrt(2), np.sqrt(2)])[:, None]


def povm_cross_check(chi, a, effects=None, states=SIX_STATES):
    """Largest gap between ``<in|M_i|in>`` and ``|<k_i|out>|^2`` over `states`."""
    effects = neutron_effects(chi, a) if effects is None else np.asarray(effects)
    worst = 0.0
    for alpha, beta in states:
        p_out = neutron_out_state(NeutronConfig(alpha, beta, chi, a)).probabilities
        v = np.array([alpha, beta])
        p_in = np.einsum("i,kij,j->k", v.conj(), effects, v).real
        worst = max(worst, float(np.max(np.abs(p_out - p_in))))
    return worst


def neutron_povm(chi, a):
    """POVM ``{M1, M2, M3}`` of the two detectors and the absorber.

    The closed-form effects are checked against detection probabilities
    computed from the outgoing state on six input states spanning the
    operator space; a mismatch above ``1e-10`` raises.
    """
    effects = neutron_effects(chi, a)
    gap = povm_cross_check(chi, a, effects)
    if gap > CROSS_CHECK_TOL:
        raise ValidationError(f"neutron POVM disagrees with the outgoing state by {gap:.3e}")
    return Povm(effects, labels=("D1", "D2", "abs"))


def neutron_bivariate(chi, a):
    """2 x 2 grid ``[[M1, M2], [M3/2, M3/2]]``; rows are path (+, -), columns interference (1, 2)."""
    M1, M2, M3 = neutron_effects(chi, a)
    return BivariatePovm(np.array([[M1, M2], [M3 / 2, M3 / 2]]))


def neutron_nonideality_closed_form(a):
    """Analytic non-ideality matrices (lambda for path, mu for interference)."""
    _check_a(a)
    ra = np.sqrt(a)
    lam = np.array([[1.0, a], [0.0, 1.0 - a]])
    mu = 0.5 * np.array([[1 + ra, 1 - ra], [1 - ra, 1 + ra]])
    return lam, mu


def _xlogx(x):
    return 0.0 if x == 0 else x * np.log(x)


def neutron_J_closed_form(a):
    """Analytic ``(J_lambda, J_mu)`` as functions of the transmission coefficient."""
    _check_a(a)
    ra = np.sqrt(a)
    J_l = 0.5 * (_xlogx(1 + a) - _xlogx(a))
    J_m = 0.5 * (2 * np.log(2) - _xlogx(1 + ra) - _xlogx(1 - ra))
    return float(J_l), float(J_m)


@dataclass(frozen=True)
class PhotonChannel:
    eta: float
    n_max: int

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValidationError(f"quantum efficiency eta={self.eta!r} outside (0, 1]")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValidationError(f"n_max={self.n_max!r} must be an integer >= 1")


def photon_lambda(eta, n_max):
    """Binomial detection matrix ``lam[m, n] = C(n, m) eta^m (1-eta)^(n-m)`` for ``m <= n``."""
    lam = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        for m in range(n + 1):
            lam[m, n] = comb(n, m) * eta**m * (1 - eta) ** (n - m)
    return lam


class PhotonPovm(NamedTuple):
    povm: Povm
    lam: np.ndarray


def photon_povm(ch):
    """Detector POVM on the number states ``0..n_max``.

    Effects ``R_m = sum_n lam[m, n] |n><n|`` for ``m = 0..n_max`` followed by
    the remainder ``I - sum_m R_m`` which keeps the POVM complete on the
    truncated space (it vanishes up to roundoff, since every detected
    count is at most ``n_max``).
    """
    lam = photon_lambda(ch.eta, ch.n_max)
    effects = [np.diag(row).astype(complex) for row in lam]
    rest = np.eye(ch.n_max + 1) - np.sum(effects, axis=0)
    if np.max(np.abs(rest)) > TOL_TRACE:
        raise ValidationError("photon channel columns do not sum to one")
    effects.append(rest.astype(complex))
    labels = [str(m) for m in range(ch.n_max + 1)] + ["rest"]
    return PhotonPovm(Povm(effects, labels=labels), lam)


def photon_mean_counts(lam):
    """Mean detected count for each number-state input ``|n><n|``."""
    return np.arange(lam.shape[0]) @ lam
