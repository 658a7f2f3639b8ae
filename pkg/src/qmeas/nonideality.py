"""Non-ideality matrices and the inequalities built on them.

A POVM ``{R_m}`` is a non-ideal measurement of a standard observable with
spectral projectors ``{M_m'}`` when ``R_m = sum_m' lam[m, m'] M_m'`` for a
column-stochastic ``lam``. This module recovers ``lam`` from operators,
measures its distance from the identity by the average row entropy, and
evaluates the state-independent bound on the combined non-ideality of a
joint measurement of two incompatible maximal observables, alongside the
state-dependent entropic and standard-deviation uncertainty relations.

All logarithms are natural and ``0 ln 0 = 0``.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.optimize
import scipy.special

from .exceptions import DimensionError, InfeasibleError, ValidationError
from .linalg import as_density, check_same_dim, eigh, hkr_report, TOL_HERM
from .povm import Povm, Pvm, marginals

TOL_STOCH = 1e-10
TOL_CLAMP = 1e-12
TOL_INFEASIBLE = 1e-8
TOL_INEQ = 1e-9
TOL_UNBIASED = 1e-9


def check_stochastic(lam, name="lambda"):
    """Validate a column-stochastic matrix and return a clean float copy.

    Entries down to ``-1e-12`` are clamped to zero; each column must sum
    to one within ``1e-10``.
    """
    lam = np.array(lam, dtype=float)
    if lam.ndim != 2 or 0 in lam.shape:
        raise DimensionError(f"{name}: expected a non-empty 2-D array, got shape {lam.shape}")
    if not np.all(np.isfinite(lam)):
        raise ValidationError(f"{name}: entries must be finite")
    if lam.min() < -TOL_CLAMP:
        raise ValidationError(f"{name}: negative entry {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    drift = np.abs(lam.sum(axis=0) - 1.0)
    if drift.max() > TOL_STOCH:
        j = int(np.argmax(drift))
        raise ValidationError(f"{name}: column {j} sums to {lam[:, j].sum()!r}, expected 1")
    return lam


@dataclass(frozen=True, eq=False)
class ValuedObservable:
    """A standard observable ``A = sum_m a_m M_m`` given by its PVM and outcome values."""

    pvm: Pvm
    values: Sequence[float]

    def __post_init__(self):
        pvm = self.pvm if isinstance(self.pvm, Pvm) else Pvm(self.pvm)
        values = np.array(self.values, dtype=float).ravel()
        if len(values) != len(pvm):
            raise DimensionError(f"{len(values)} values for {len(pvm)} projectors")
        if not np.all(np.isfinite(values)):
            raise ValidationError("observable values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "pvm", pvm)
        object.__setattr__(self, "values", values)

    @property
    def dim(self):
        return self.pvm.dim

    @property
    def operator(self):
        return np.einsum("m,mij->ij", self.values, self.pvm.effects)

    @property
    def is_maximal(self):
        """Rank-one projectors with pairwise distinct values."""
        return self.pvm.is_maximal and len(np.unique(self.values)) == len(self.values)

    def eigenvectors(self):
        """Columns ``|a_m>`` spanning each rank-one projector, in effect order."""
        if not self.is_maximal:
            raise ValidationError("observable is not maximal (degenerate spectrum)")
        return np.column_stack([eigh(M).eigenvectors[:, -1] for M in self.pvm.effects])

    def probabilities(self, rho):
        return self.pvm.probabilities(rho)


class Recovery(NamedTuple):
    matrix: np.ndarray
    residual: float


def decomposition_residual(R, target, lam):
    """Max-entry residual of ``R_m - sum_m' lam[m, m'] M_m'``."""
    rec = np.einsum("ab,bij->aij", lam, np.asarray(target.effects))
    return float(np.max(np.abs(np.asarray(R.effects) - rec)))


def _closed_form(R, target):
    obs = ValuedObservable(target, np.arange(len(target)))
    vecs = obs.eigenvectors()
    # lam[m, m'] = <a_m'| R_m |a_m'>
    return np.einsum("im,kij,jm->km", vecs.conj(), np.asarray(R.effects), vecs).real


def _nnls(R, target):
    d = R.dim
    M = np.asarray(target.effects).reshape(len(target), d * d)
    A = np.concatenate([M.real, M.imag], axis=1).T
    lam = np.empty((len(R), len(target)))
    for m, Rm in enumerate(np.asarray(R.effects)):
        b = np.concatenate([Rm.real.ravel(), Rm.imag.ravel()])
        lam[m], _ = scipy.optimize.nnls(A, b)
    return lam


def recover_nonideality(R, target, method="auto"):
    """Find the non-ideality matrix relating POVM `R` to the PVM `target`.

    Parameters
    ----------
    R : Povm
    target : Pvm
    method : {"auto", "closed", "nnls"}
        ``"closed"`` reads off ``<a_m'| R_m |a_m'>`` and requires rank-one
        target projectors. ``"nnls"`` solves a non-negative least squares
        problem per row and works for any PVM. ``"auto"`` picks ``"closed"``
        when the target is maximal.

    Returns
    -------
    Recovery
        ``(matrix, residual)`` with ``matrix[m, m']`` column-stochastic and
        ``residual`` the max-entry reconstruction error.

    Raises
    ------
    InfeasibleError
        If the best decomposition leaves a residual of ``1e-8`` or more,
        i.e. `R` is not a non-ideal measurement of `target`.
    """
    R = R if isinstance(R, Povm) else Povm(R)
    target = target if isinstance(target, Pvm) else Pvm(target)
    if R.dim != target.dim:
        raise DimensionError(f"dimension mismatch: {R.dim} vs {target.dim}")
    traces = np.trace(target.effects, axis1=1, axis2=2).real
    if np.any(traces < 0.5):
        raise ValidationError("target PVM has a zero projector; its column is undetermined")
    if method == "auto":
        method = "closed" if target.is_maximal else "nnls"
    if method == "closed":
        if not target.is_maximal:
            raise ValidationError("closed-form recovery needs rank-one target projectors")
        lam = _closed_form(R, target)
    elif method == "nnls":
        lam = _nnls(R, target)
    else:
        raise ValueError(f"unknown method {method!r}")

    lam = np.clip(lam, 0.0, 1.0)
    drift = np.abs(lam.sum(axis=0) - 1.0)
    if drift.max() < TOL_STOCH:
        lam = lam / lam.sum(axis=0)
    residual = decomposition_residual(R, target, lam)
    if residual >= TOL_INFEASIBLE or drift.max() >= TOL_INFEASIBLE:
        raise InfeasibleError(
            f"POVM is not a non-ideal measurement of the target "
            f"(residual {residual:.3e}, column drift {drift.max():.3e})",
            residual=max(residual, float(drift.max())),
        )
    return Recovery(lam, residual)


def row_entropy(lam):
    """Average row entropy ``J = -(1/N) sum lam ln(lam / rowsum)`` of a square stochastic matrix.

    Zero for the identity (and its permutations), ``ln N`` for the
    uniform matrix.
    """
    lam = check_stochastic(lam)
    N, K = lam.shape
    if N != K:
        raise DimensionError(f"row entropy is defined for square matrices, got {lam.shape}")
    rows = lam.sum(axis=1, keepdims=True)
    J = -np.sum(scipy.special.rel_entr(lam, np.broadcast_to(rows, lam.shape))) / N
    return float(J) + 0.0  # no negative zero


def shannon_entropy(p):
    """``-sum p ln p`` with ``0 ln 0 = 0``."""
    return float(np.sum(scipy.special.entr(np.clip(np.asarray(p, dtype=float), 0.0, None))))


def max_overlap(A, B):
    """``max_mn |<a_m|b_n>|`` for two maximal observables."""
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")
    return float(np.max(np.abs(A.eigenvectors().conj().T @ B.eigenvectors())))


def martens_bound(A, B):
    """Lower bound ``-2 ln max_mn |<a_m|b_n>|`` on ``J_lambda + J_mu``.

    Both observables must be maximal; the result lies in ``[0, ln d]``.
    """
    c = min(max_overlap(A, B), 1.0)
    bound = -2.0 * np.log(c)
    if not -TOL_HERM <= bound <= np.log(A.dim) + 1e-9:
        raise ValidationError(f"bound {bound!r} outside [0, ln d]; eigenvectors not orthonormal?")
    return float(max(bound, 0.0))


@dataclass(frozen=True)
class NonidealityReport:
    lam: np.ndarray
    mu: np.ndarray
    J_lambda: float
    J_mu: float
    martens_bound: float
    satisfied: bool
    residual_lambda: float
    residual_mu: float

    def to_dict(self):
        return {
            "lambda": self.lam.tolist(),
            "mu": self.mu.tolist(),
            "J_lambda": self.J_lambda,
            "J_mu": self.J_mu,
            "martens_bound": self.martens_bound,
            "sum_minus_bound": self.J_lambda + self.J_mu - self.martens_bound,
            "satisfied": self.satisfied,
            "residual_lambda": self.residual_lambda,
            "residual_mu": self.residual_mu,
        }


def joint_nonideal_report(biv, A, B):
    """Interpret `biv` as a joint non-ideal measurement of `A` and `B`.

    Recovers both non-ideality matrices from the marginals, computes their
    row entropies and checks them against ``martens_bound(A, B)``.
    `InfeasibleError.which` is ``"row"`` or ``"column"`` when a marginal
    does not decompose.
    """
    if biv.dim != A.dim or biv.dim != B.dim:
        raise DimensionError("bivariate POVM and observables differ in dimension")
    rows, cols = marginals(biv)
    recs = []
    for which, marg, obs in (("row", rows, A), ("column", cols, B)):
        try:
            recs.append(recover_nonideality(marg, obs.pvm))
        except InfeasibleError as exc:
            raise InfeasibleError(f"{which} marginal: {exc}", exc.residual, which) from exc
    (lam, res_l), (mu, res_m) = recs
    J_l = row_entropy(lam)
    J_m = row_entropy(mu)
    bound = martens_bound(A, B)
    return NonidealityReport(lam, mu, J_l, J_m, bound, bool(J_l + J_m >= bound - TOL_INEQ), res_l, res_m)


class EntropicReport(NamedTuple):
    H_A: float
    H_B: float
    bound: float
    satisfied: bool


def entropic_ur_report(rho, A, B):
    """Check ``H_A(rho) + H_B(rho) >= -2 ln max|<a_m|b_n>|``."""
    rho = as_density(rho)
    check_same_dim(rho, A.pvm.effects[0], B.pvm.effects[0])
    bound = martens_bound(A, B)
    ha = shannon_entropy(A.probabilities(rho))
    hb = shannon_entropy(B.probabilities(rho))
    return EntropicReport(ha, hb, bound, bool(ha + hb >= bound - TOL_INEQ))


def column_bias(lam, values):
    """``sum_m a_m lam[m, m'] - a_m'`` for every column ``m'``."""
    lam = check_stochastic(lam)
    values = np.asarray(values, dtype=float)
    if lam.shape != (len(values), len(values)):
        raise DimensionError(f"lambda shape {lam.shape} does not match {len(values)} values")
    return values @ lam - values


def unbiasedness_check(lam, values):
    """True when the channel preserves every outcome mean, ``a_m' = sum_m a_m lam[m, m']``."""
    return bool(np.all(np.abs(column_bias(lam, values)) < TOL_UNBIASED))


def _require_unbiased(lam, values, name="lambda"):
    bias = np.abs(column_bias(lam, values))
    if bias.max() >= TOL_UNBIASED:
        j = int(np.argmax(bias))
        raise ValidationError(f"{name} is biased: column {j} mean is off by {bias[j]:.3e}")


def distribution_variance(values, p):
    values = np.asarray(values, dtype=float)
    p = np.asarray(p, dtype=float)
    mean = values @ p
    return float(max((values**2) @ p - mean**2, 0.0))


class VarianceDecomposition(NamedTuple):
    var_r: float
    var_p: float
    noise_term: float
    identity_holds: bool
    dominates: bool


def variance_decomposition(lam, values, p):
    """Split the variance of the non-ideal distribution ``r = lam p``.

    For an unbiased channel ``Var(r) = Var(p) + sum_m' D_m'^2 p_m'`` where
    ``D_m'^2`` is the variance of column ``m'`` of `lam`.
    """
    lam = check_stochastic(lam)
    values = np.asarray(values, dtype=float)
    p = np.asarray(p, dtype=float)
    if p.shape != (lam.shape[1],):
        raise DimensionError(f"p has shape {p.shape}, expected ({lam.shape[1]},)")
    if p.min() < -TOL_CLAMP or abs(p.sum() - 1.0) > TOL_STOCH:
        raise ValidationError("p is not a probability vector")
    _require_unbiased(lam, values)
    r = lam @ p
    var_r = distribution_variance(values, r)
    var_p = distribution_variance(values, p)
    col_var = (values**2) @ lam - (values @ lam) ** 2
    noise = float(col_var @ p)
    return VarianceDecomposition(
        var_r, var_p, noise, abs(var_r - var_p - noise) < 1e-9, var_r >= var_p - 1e-12
    )


class HeisenbergReport(NamedTuple):
    lhs: float
    mid: float
    rhs: float
    satisfied: bool


def generalized_heisenberg_report(rho, A, B, lambda_a, lambda_b):
    """Chain ``D(r) D(s) >= dA dB >= |<[A, B]>| / 2`` for unbiased channels on `A` and `B`."""
    rho = as_density(rho)
    _require_unbiased(lambda_a, A.values, "lambda_a")
    _require_unbiased(lambda_b, B.values, "lambda_b")
    r = check_stochastic(lambda_a) @ A.probabilities(rho)
    s = check_stochastic(lambda_b) @ B.probabilities(rho)
    lhs = np.sqrt(distribution_variance(A.values, r)) * np.sqrt(distribution_variance(B.values, s))
    hkr = hkr_report(rho, A.operator, B.operator)
    mid = hkr.deltaA * hkr.deltaB
    ok = lhs >= mid - TOL_INEQ and mid >= hkr.bound - TOL_INEQ
    return HeisenbergReport(float(lhs), float(mid), hkr.bound, bool(ok))


class CombinedReport(NamedTuple):
    sum: float
    bound: float
    satisfied: bool


def combined_entropic_report(rho, biv, A, B):
    """``H_A + J_lambda + H_B + J_mu >= -4 ln max|<a_m|b_n>|``."""
    joint = joint_nonideal_report(biv, A, B)
    ent = entropic_ur_report(rho, A, B)
    total = ent.H_A + joint.J_lambda + ent.H_B + joint.J_mu
    bound = 2.0 * joint.martens_bound
    return CombinedReport(total, bound, bool(total >= bound - TOL_INEQ))
