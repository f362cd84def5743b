"""Equilibria, their linearization and normal stability/hyperbolicity.

Every equilibrium has ``omega == omega1 = omega_star`` with ``omega_star``
zero or an eigenvector of ``J`` for some moment ``lambda_star``. The
linearization acts on stacked perturbations ``(dW, dW1)``::

    dW'  = J^-1 (k (dW1 - dW) - W* x (J - lambda* Id) dW)
    dW1' = -(k/I) (dW1 - dW) - W* x (dW1 - dW)

Its null space is the tangent space of the equilibrium set, zero is a
semi-simple eigenvalue, and no nonzero eigenvalue is purely imaginary. The
rotation is normally stable about the largest moment and normally
hyperbolic otherwise, with one unstable eigenvalue about the middle axis and
two about the smallest.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import BodyParams, ParameterError
from .eigen import eigenvalues6, sort_eigenvalues

SPECTRAL_TOL = 1e-8
RANK_TOL = 1e-8
PAIR_TOL = 1e-10


class AxisLabel(str, enum.Enum):
    ORIGIN = "Origin"
    AXIS1 = "Axis1"
    AXIS2 = "Axis2"
    AXIS3 = "Axis3"
    PLANE12 = "Plane12"
    PLANE23 = "Plane23"
    ANY_AXIS = "AnyAxis"


_LABELS = {
    (0,): AxisLabel.AXIS1,
    (1,): AxisLabel.AXIS2,
    (2,): AxisLabel.AXIS3,
    (0, 1): AxisLabel.PLANE12,
    (1, 2): AxisLabel.PLANE23,
    (0, 1, 2): AxisLabel.ANY_AXIS,
}


class Verdict(str, enum.Enum):
    NORMALLY_STABLE = "NormallyStable"
    NORMALLY_HYPERBOLIC = "NormallyHyperbolic"
    SPHERICAL_DEGENERATE = "SphericalDegenerate"
    ZERO_EQUILIBRIUM = "ZeroEquilibrium"
    INCONCLUSIVE = "Inconclusive"


def eigenspaces(params: BodyParams) -> list[tuple[float, tuple[int, ...]]]:
    """Distinct moments with the axis indices spanning their eigenspace.

    Ties are decided by exact equality of the given moments.
    """
    moments = [params.A1, params.A2, params.A3]
    out: list[tuple[float, tuple[int, ...]]] = []
    for i, a in enumerate(moments):
        if out and out[-1][0] == a:
            out[-1] = (a, out[-1][1] + (i,))
        else:
            out.append((a, (i,)))
    return out


def eigenspace_indices(params: BodyParams, lambda_star: float) -> tuple[int, ...]:
    idx = tuple(i for i, a in enumerate((params.A1, params.A2, params.A3)) if a == lambda_star)
    if not idx:
        raise ParameterError(f"{lambda_star} is not a principal moment of {params}")
    return idx


def label_for(indices: tuple[int, ...]) -> AxisLabel:
    return _LABELS[tuple(indices)]


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """Permanent rotation ``omega == omega1 == omega_star``.

    ``lambda_star`` is ``None`` only for the zero equilibrium.
    """

    omega_star: np.ndarray
    lambda_star: float | None
    axis_label: AxisLabel
    I: float

    @property
    def Lambda_star(self) -> float | None:
        return None if self.lambda_star is None else self.lambda_star + self.I

    @property
    def is_zero(self) -> bool:
        return self.lambda_star is None

    @property
    def state_vector(self) -> np.ndarray:
        return np.concatenate([self.omega_star, self.omega_star])

    @classmethod
    def at(cls, params: BodyParams, omega_star, rtol: float = 1e-12) -> "Equilibrium":
        """Build the equilibrium through ``omega_star``, inferring its moment.

        Raises ``ParameterError`` when ``omega_star`` is not (to ``rtol``) an
        eigenvector of ``J``.
        """
        w = np.array(omega_star, dtype=float).reshape(3)
        w.setflags(write=False)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return cls(w, None, AxisLabel.ORIGIN, params.I)
        moments = params.moments
        for lam, idx in eigenspaces(params):
            if np.linalg.norm((moments - lam) * w) <= rtol * norm * params.A3:
                return cls(w, lam, label_for(idx), params.I)
        raise ParameterError(f"{w.tolist()} is not an eigenvector of J = diag{tuple(moments)}")


@dataclass(frozen=True)
class EquilibriumSet:
    """Union of subspaces of R^6 spanned by ``e_i + e_{i+3}``."""

    case: int
    spans: list[list[np.ndarray]]
    labels: list[AxisLabel]
    moments: list[float]

    def contains(self, y, tol: float = 1e-12) -> bool:
        y = np.asarray(y, dtype=float)
        for span in self.spans:
            basis = np.array(span).T
            coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
            if np.linalg.norm(basis @ coef - y) <= tol * max(1.0, float(np.linalg.norm(y))):
                return True
        return False


def equilibrium_set(params: BodyParams) -> EquilibriumSet:
    """Structure of the equilibrium set for the four tie patterns of the moments:
    1 all distinct, 2 ``A1 = A2 < A3``, 3 ``A1 < A2 = A3``, 4 all equal."""
    a1, a2, a3 = params.A1, params.A2, params.A3
    if a1 < a2 < a3:
        case = 1
    elif a1 == a2 < a3:
        case = 2
    elif a1 < a2 == a3:
        case = 3
    else:
        case = 4
    spans, labels, moments = [], [], []
    for lam, idx in eigenspaces(params):
        basis = []
        for i in idx:
            e = np.zeros(6)
            e[i] = e[i + 3] = 1.0
            basis.append(e)
        spans.append(basis)
        labels.append(label_for(idx))
        moments.append(lam)
    return EquilibriumSet(case, spans, labels, moments)


def representative_equilibria(params: BodyParams, alpha: float = 1.0) -> list[Equilibrium]:
    """One equilibrium ``alpha * e_i`` per distinct eigenspace, ``i`` its first axis."""
    out = []
    for lam, idx in eigenspaces(params):
        w = np.zeros(3)
        w[idx[0]] = alpha
        out.append(Equilibrium.at(params, w))
    return out


def skew(w) -> np.ndarray:
    """Matrix of ``v -> w x v``."""
    x, y, z = w
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def linearization(params: BodyParams, eq: Equilibrium) -> np.ndarray:
    """Closed-form 6x6 Jacobian of the right-hand side at ``eq``."""
    moments = params.moments
    lam = 0.0 if eq.lambda_star is None else eq.lambda_star
    S = skew(eq.omega_star)
    D = np.diag(moments - lam)
    eye = np.eye(3)
    kI = params.k / params.I
    L = np.empty((6, 6))
    L[:3, :3] = (-params.k * eye - S @ D) / moments[:, None]
    L[:3, 3:] = (params.k * eye) / moments[:, None]
    L[3:, :3] = kI * eye + S
    L[3:, 3:] = -kI * eye - S
    return L


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    tau: float
    zero_multiplicity: int
    n_unstable: int
    n_stable: int

    @classmethod
    def from_eigenvalues(cls, eigenvalues, tau: float) -> "Spectrum":
        w = sort_eigenvalues(eigenvalues)
        return cls(
            eigenvalues=w,
            tau=float(tau),
            zero_multiplicity=int(np.sum(np.abs(w) <= tau)),
            n_unstable=int(np.sum(w.real > tau)),
            n_stable=int(np.sum(w.real < -tau)),
        )

    @property
    def slowest_decay_rate(self) -> float | None:
        """``-max Re`` over the strictly stable eigenvalues."""
        stable = self.eigenvalues.real[self.eigenvalues.real < -self.tau]
        return None if stable.size == 0 else float(-np.max(stable))

    def conjugate_defect(self) -> float:
        """Largest distance from a non-real eigenvalue to the nearest conjugate
        of another eigenvalue."""
        w = self.eigenvalues
        worst = 0.0
        for i, lam in enumerate(w):
            if abs(lam.imag) <= self.tau:
                continue
            others = np.delete(w, i)
            worst = max(worst, float(np.min(np.abs(others - np.conj(lam)))))
        return worst


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    n_unstable: int
    zero_multiplicity: int
    eigenspace_dim: int
    null_dim: int
    semisimple_zero: bool
    tangent_matches_null: bool


def spectral_tolerance(L: np.ndarray) -> float:
    return SPECTRAL_TOL * max(1.0, float(np.linalg.norm(L)))


def numerical_rank(M: np.ndarray, rtol: float = RANK_TOL) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def ranks_of_square(L: np.ndarray, rtol: float = RANK_TOL) -> tuple[int, int]:
    """Numerical ranks of ``L`` and ``L @ L``.

    ``rank(L^2)`` is taken as the rank of ``L`` applied to an orthonormal
    basis of ``range(L)``, with the same cutoff ``rtol * sigma_max(L)``.
    Forming ``L @ L`` explicitly squares the conditioning and misreads small
    genuine eigenvalues as zero.
    """
    U, s, _ = np.linalg.svd(L)
    if s[0] == 0.0:
        return 0, 0
    cutoff = rtol * s[0]
    rank = int(np.sum(s > cutoff))
    s2 = np.linalg.svd(L @ U[:, :rank], compute_uv=False)
    return rank, int(np.sum(s2 > cutoff))


def imaginary_axis_check(spectrum: Spectrum) -> bool:
    """True when no eigenvalue with negligible real part has a sizeable
    imaginary part, i.e. the spectrum meets the imaginary axis only at 0."""
    w = spectrum.eigenvalues
    on_axis = np.abs(w.real) <= spectrum.tau
    return bool(np.all(np.abs(w.imag[on_axis]) <= spectrum.tau))


def classify(params: BodyParams, eq: Equilibrium) -> tuple[Spectrum, Classification]:
    L = linearization(params, eq)
    tau = spectral_tolerance(L)
    spectrum = Spectrum.from_eigenvalues(eigenvalues6(L), tau)

    rank_L, rank_L2 = ranks_of_square(L)
    semisimple = rank_L2 == rank_L
    null_dim = 6 - rank_L
    if eq.is_zero:
        dim = 3
        tangent_basis = np.eye(6)[:, :3] + np.eye(6)[:, 3:]
    else:
        idx = eigenspace_indices(params, eq.lambda_star)
        dim = len(idx)
        tangent_basis = np.zeros((6, dim))
        for col, i in enumerate(idx):
            tangent_basis[i, col] = tangent_basis[i + 3, col] = 1.0
    in_kernel = np.linalg.norm(L @ tangent_basis) <= tau
    tangent_matches = bool(null_dim == dim and in_kernel)

    if eq.is_zero:
        verdict = Verdict.ZERO_EQUILIBRIUM
    elif params.A1 == params.A3:
        verdict = Verdict.SPHERICAL_DEGENERATE
    elif spectrum.n_unstable == 0 and spectrum.zero_multiplicity == dim:
        verdict = Verdict.NORMALLY_STABLE
    elif spectrum.n_unstable >= 1 and spectrum.n_stable >= 1:
        verdict = Verdict.NORMALLY_HYPERBOLIC
    else:
        verdict = Verdict.INCONCLUSIVE

    return spectrum, Classification(
        verdict=verdict,
        n_unstable=spectrum.n_unstable,
        zero_multiplicity=spectrum.zero_multiplicity,
        eigenspace_dim=dim,
        null_dim=null_dim,
        semisimple_zero=bool(semisimple),
        tangent_matches_null=tangent_matches,
    )


def expected_verdict(params: BodyParams, lambda_star: float) -> tuple[Verdict, int]:
    """Verdict and unstable-eigenvalue count predicted from the moment ordering alone."""
    if params.A1 == params.A3:
        return Verdict.SPHERICAL_DEGENERATE, 0
    if lambda_star == params.A3:
        return Verdict.NORMALLY_STABLE, 0
    if lambda_star == params.A2:
        return Verdict.NORMALLY_HYPERBOLIC, 1
    return Verdict.NORMALLY_HYPERBOLIC, 2


def classification_record(params: BodyParams, eq: Equilibrium, spectrum: Spectrum,
                          cls: Classification) -> dict:
    """Flat, JSON/CSV friendly view of a classification."""
    rec = {
        "A1": params.A1,
        "A2": params.A2,
        "A3": params.A3,
        "I": params.I,
        "k": params.k,
        "axis": eq.axis_label.value,
        "omega_star": [float(v) for v in eq.omega_star],
        "lambda_star": eq.lambda_star,
    }
    for i, lam in enumerate(spectrum.eigenvalues):
        rec[f"eig{i}_re"] = float(lam.real)
        rec[f"eig{i}_im"] = float(lam.imag)
    rec.update(
        verdict=cls.verdict.value,
        n_unstable=cls.n_unstable,
        n_stable=spectrum.n_stable,
        zero_multiplicity=cls.zero_multiplicity,
        eigenspace_dim=cls.eigenspace_dim,
        null_dim=cls.null_dim,
        semisimple_zero=cls.semisimple_zero,
        tangent_matches_null=cls.tangent_matches_null,
        imaginary_axis_ok=imaginary_axis_check(spectrum),
    )
    return rec
