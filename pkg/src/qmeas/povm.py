"""POVMs, PVMs, bivariate POVMs and joint measurability of standard observables."""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .exceptions import DimensionError, ValidationError
from .linalg import TOL_PSD, TOL_RECON, as_hermitian

TOL_COMPLETE = 1e-10
TOL_PROJ = 1e-9
TOL_COMMUTE = 1e-9


def _stack_effects(effects, name):
    if isinstance(effects, Povm):
        effects = effects.effects
    arrs = [as_hermitian(e, f"{name}[{i}]") for i, e in enumerate(effects)]
    if not arrs:
        raise ValidationError(f"{name}: at least one effect is required")
    shapes = {a.shape for a in arrs}
    if len(shapes) != 1:
        raise DimensionError(f"{name}: effects have different shapes {sorted(shapes)}")
    return np.stack(arrs)


def completeness_residual(effects):
    """Max absolute entry of ``sum(effects) - I``."""
    effects = np.asarray(effects)
    d = effects.shape[-1]
    total = effects.reshape(-1, d, d).sum(axis=0)
    return float(np.max(np.abs(total - np.eye(d))))


class PovmDiagnostics(NamedTuple):
    min_eigenvalues: Tuple[float, ...]
    completeness_residual: float
    psd_ok: bool
    complete_ok: bool

    @property
    def valid(self):
        return self.psd_ok and self.complete_ok


def diagnose(effects):
    """Per-effect minimum eigenvalues and the completeness residual, without raising."""
    effects = np.asarray(effects)
    d = effects.shape[-1]
    flat = effects.reshape(-1, d, d)
    mins = tuple(float(np.linalg.eigvalsh(e)[0]) for e in flat)
    res = completeness_residual(flat)
    return PovmDiagnostics(mins, res, min(mins) >= -TOL_PSD, res <= TOL_COMPLETE)


def _check_psd_complete(flat, name, labels=None):
    diag = diagnose(flat)
    for i, lo in enumerate(diag.min_eigenvalues):
        if lo < -TOL_PSD:
            tag = labels[i] if labels else i
            raise ValidationError(
                f"{name}: effect {tag!r} is not positive semidefinite (min eigenvalue {lo:.3e})"
            )
    if not diag.complete_ok:
        raise ValidationError(
            f"{name}: effects do not sum to the identity (max residual {diag.completeness_residual:.3e})"
        )


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered collection of PSD effects summing to the identity.

    Validation happens on construction; an instance is always a valid POVM.
    """

    effects: np.ndarray
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        eff = _stack_effects(self.effects, type(self).__name__)
        eff.setflags(write=False)
        object.__setattr__(self, "effects", eff)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(eff):
                raise ValidationError(f"{len(labels)} labels for {len(eff)} effects")
            object.__setattr__(self, "labels", labels)
        _check_psd_complete(eff, type(self).__name__, self.labels)

    @property
    def dim(self):
        return self.effects.shape[-1]

    def __len__(self):
        return len(self.effects)

    def __getitem__(self, i):
        return self.effects[i]

    def __iter__(self):
        return iter(self.effects)

    def probabilities(self, rho):
        """``Tr(rho E_i)`` for every effect."""
        rho = np.asarray(rho)
        if rho.shape != (self.dim, self.dim):
            raise DimensionError(f"state shape {rho.shape} does not match dim {self.dim}")
        return np.einsum("ij,kji->k", rho, self.effects).real

    @property
    def is_pvm(self):
        return _pvm_defect(self.effects) < TOL_PROJ


def _pvm_defect(effects):
    """Largest deviation from idempotence / mutual orthogonality."""
    worst = 0.0
    for i, e in enumerate(effects):
        worst = max(worst, float(np.max(np.abs(e @ e - e))))
        for f in effects[i + 1:]:
            worst = max(worst, float(np.max(np.abs(e @ f))))
    return worst


class Pvm(Povm):
    """POVM whose effects are mutually orthogonal projectors."""

    def __post_init__(self):
        super().__post_init__()
        defect = _pvm_defect(self.effects)
        if defect >= TOL_PROJ:
            raise ValidationError(
                f"Pvm: effects are not orthogonal projectors (max defect {defect:.3e})"
            )

    @property
    def is_maximal(self):
        """True when every projector has rank one."""
        return bool(np.all(np.abs(np.trace(self.effects, axis1=1, axis2=2) - 1) < 1e-8))


def validate_povm(effects, labels=None):
    """Build a `Povm`, raising `ValidationError` with a diagnosis on failure."""
    return Povm(effects, labels)


def validate_pvm(effects, labels=None):
    return Pvm(effects, labels)


@dataclass(frozen=True, eq=False)
class BivariatePovm:
    """K x L grid of PSD effects ``R[m, n]`` with unit sum; array shape ``(K, L, d, d)``."""

    grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid)
        if g.ndim != 4 or g.shape[-1] != g.shape[-2] or 0 in g.shape:
            raise DimensionError(f"bivariate grid must have shape (K, L, d, d), got {g.shape}")
        K, L, d, _ = g.shape
        flat = _stack_effects(list(g.reshape(K * L, d, d)), "BivariatePovm")
        labels = [f"({m},{n})" for m in range(K) for n in range(L)]
        _check_psd_complete(flat, "BivariatePovm", labels)
        g = flat.reshape(K, L, d, d)
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def shape(self):
        return self.grid.shape[:2]

    @property
    def dim(self):
        return self.grid.shape[-1]

    def probabilities(self, rho):
        """Joint distribution ``p[m, n] = Tr(rho R[m, n])``."""
        rho = np.asarray(rho)
        if rho.shape != (self.dim, self.dim):
            raise DimensionError(f"state shape {rho.shape} does not match dim {self.dim}")
        return np.einsum("ij,mnji->mn", rho, self.grid).real


def marginals(biv):
    """Row marginal ``{sum_n R_mn}`` and column marginal ``{sum_m R_mn}``."""
    return Povm(biv.grid.sum(axis=1)), Povm(biv.grid.sum(axis=0))


class IncompatibilityWitness(NamedTuple):
    """Pair of projectors with the largest commutator (max-abs entry norm)."""

    m: int
    n: int
    commutator_norm: float


def commutator_norms(A, B):
    """Matrix of max-abs-entry norms of ``[M_m, N_n]``."""
    M = np.asarray(A.effects)
    N = np.asarray(B.effects)
    MN = np.einsum("mij,njk->mnik", M, N)
    NM = np.einsum("nij,mjk->mnik", N, M)
    return np.max(np.abs(MN - NM), axis=(2, 3))


def joint_pvm_construct(A, B):
    """Joint bivariate POVM for two PVMs, or a witness that none exists.

    Two standard observables admit a joint measurement exactly when all
    their spectral projectors commute, and then the joint POVM is
    ``R_mn = M_m N_n``. Products are symmetrized to remove roundoff.

    Returns
    -------
    BivariatePovm or IncompatibilityWitness
    """
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")
    norms = commutator_norms(A, B)
    if norms.max() >= TOL_COMMUTE:
        m, n = np.unravel_index(np.argmax(norms), norms.shape)
        return IncompatibilityWitness(int(m), int(n), float(norms[m, n]))
    M = np.asarray(A.effects)
    N = np.asarray(B.effects)
    grid = 0.5 * (np.einsum("mij,njk->mnik", M, N) + np.einsum("nij,mjk->mnik", N, M))
    return BivariatePovm(grid)


def psd_leq(X, Y, tol=TOL_PSD):
    """``X <= Y`` in the PSD (Loewner) order, within `tol`."""
    return float(np.linalg.eigvalsh(np.asarray(Y) - np.asarray(X))[0]) >= -tol


__all__ = [
    "Povm",
    "Pvm",
    "BivariatePovm",
    "IncompatibilityWitness",
    "PovmDiagnostics",
    "validate_povm",
    "validate_pvm",
    "marginals",
    "joint_pvm_construct",
    "commutator_norms",
    "completeness_residual",
    "diagnose",
    "psd_leq",
    "TOL_COMPLETE",
    "TOL_PROJ",
    "TOL_COMMUTE",
    "TOL_RECON",
]
