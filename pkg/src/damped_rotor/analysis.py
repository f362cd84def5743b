"""Post-processing of trajectories: attained axis, limit identities, decay rate
and the sufficient conditions for spinning up about the major axis."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import BodyParams, State, balances
from .integrator import StopReason, TrajectoryRecord
from .spectral import (
    AxisLabel,
    Equilibrium,
    classify,
    eigenspaces,
    label_for,
)

DOMINANCE = 1.0 - 1e-8
MIN_TAIL_SAMPLES = 20

_trapezoid = getattr(np, "trapezoid", None) or np.trapz  # renamed in numpy 2


class AmbiguousLimit(ValueError):
    """No single eigenspace of J carries the limit velocity."""


class Indeterminate(ValueError):
    """Too few tail samples to fit a decay rate."""


class AttainabilityCase(str, enum.Enum):
    A = "a"  # A1 = A2 < A3
    B = "b"  # A1 < A2 < A3
    C = "c"  # A1 < A2 = A3
    SPHERE = "sphere"


@dataclass(frozen=True)
class AttainabilityReport:
    """Signed margins ``LHS - RHS`` of the sufficient conditions.

    ``satisfied`` is true when every margin of the case is strictly positive;
    it then guarantees convergence about the largest moment. For case ``a``
    the margin of the companion condition for the ``A1 = A2`` plane is also
    reported.
    """

    case: AttainabilityCase
    condition_values: list[float]
    satisfied: bool
    minor_axis_condition_value: float | None = None

    @property
    def minor_axis_satisfied(self) -> bool | None:
        v = self.minor_axis_condition_value
        return None if v is None else v > 0.0

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "condition_values": list(self.condition_values),
            "satisfied": self.satisfied,
            "minor_axis_condition_value": self.minor_axis_condition_value,
        }


def attainability(params: BodyParams, s0: State) -> AttainabilityReport:
    a1, a2, a3, I = params.A1, params.A2, params.A3, params.I
    p, q, r = (float(v) for v in s0.omega)
    w_sq = float(s0.omega @ s0.omega)
    w1_sq = float(s0.omega1 @ s0.omega1)
    cross = 2.0 * float((params.moments * s0.omega) @ (I * s0.omega1))
    total = w_sq + w1_sq

    if a1 == a2 == a3:
        return AttainabilityReport(AttainabilityCase.SPHERE, [], False)
    if a1 == a2:
        m = (a3 - I) * (a3 - a1) * r * r + cross - a1 * I * total
        minor = (a1 - a3) * (a1 - I) * (w_sq - r * r) + cross - a3 * I * total
        return AttainabilityReport(AttainabilityCase.A, [m], m > 0.0, minor)
    if a2 == a3:
        m = (a3 - I) * (a3 - a1) * (q * q + r * r) + cross - a1 * I * total
        return AttainabilityReport(AttainabilityCase.C, [m], m > 0.0)
    m1 = (a2 - I) * (a2 - a1) * q * q + (a3 - I) * (a3 - a1) * r * r + cross - a1 * I * total
    m2 = (a1 - I) * (a1 - a2) * p * p + (a3 - I) * (a3 - a2) * r * r + cross - a2 * I * total
    return AttainabilityReport(AttainabilityCase.B, [m1, m2], m1 > 0.0 and m2 > 0.0)


def limit_identities(params: BodyParams, s0: State, omega_bar, d_inf: float) -> tuple[float, float]:
    """Residuals of the two identities a limit rotation must satisfy.

    Momentum: ``|(J + I) w|^2 = K^2(0)``. Energy:
    ``<w, (J + I) w> = 2 V(0) - 2 D_inf``.
    """
    w = np.asarray(omega_bar, dtype=float)
    jc = params.moments + params.I
    b = balances(params, s0)
    res_mom = abs(float(np.sum(jc**2 * w**2)) - b.Ksq)
    res_kin = abs(float(np.sum(jc * w**2)) - (2.0 * b.V - 2.0 * d_inf))
    return res_mom, res_kin


def eigenspace_fractions(params: BodyParams, omega_bar) -> list[tuple[AxisLabel, float]]:
    w = np.asarray(omega_bar, dtype=float)
    total = float(w @ w)
    return [
        (label_for(idx), float(np.sum(w[list(idx)] ** 2)) / total)
        for _, idx in eigenspaces(params)
    ]


def classify_limit_axis(params: BodyParams, omega_bar) -> AxisLabel:
    w = np.asarray(omega_bar, dtype=float)
    if not np.any(w):
        return AxisLabel.ORIGIN
    fractions = eigenspace_fractions(params, w)
    for label, frac in fractions:
        if frac >= DOMINANCE:
            return label
    detail = ", ".join(f"{lab.value}={frac:.3g}" for lab, frac in fractions)
    raise AmbiguousLimit(f"no eigenspace dominates {w.tolist()} ({detail})")


def project_to_axis(params: BodyParams, omega_bar, label: AxisLabel) -> np.ndarray:
    w = np.asarray(omega_bar, dtype=float)
    out = np.zeros(3)
    for _, idx in eigenspaces(params):
        if label_for(idx) is label:
            out[list(idx)] = w[list(idx)]
    return out


@dataclass(frozen=True)
class RateFit:
    rate: float
    goodness: float
    n_samples: int
    t_first: float
    t_last: float


def fit_decay(t, values) -> RateFit:
    """Least-squares exponential rate of positive ``values`` sampled at ``t``."""
    t = np.asarray(t, dtype=float)
    logv = np.log(np.asarray(values, dtype=float))
    if t.size < MIN_TAIL_SAMPLES:
        raise Indeterminate(f"only {t.size} tail samples, need {MIN_TAIL_SAMPLES}")
    slope, intercept = np.polyfit(t, logv, 1)
    resid = logv - (slope * t + intercept)
    ss_tot = float(np.sum((logv - logv.mean()) ** 2))
    goodness = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0.0 else 1.0
    return RateFit(float(-slope), goodness, int(t.size), float(t[0]), float(t[-1]))


def fit_rate(record: TrajectoryRecord) -> RateFit:
    """Exponential decay rate of ``|W - W1|`` over the converged tail.

    The tail holds the samples with ``10 conv_eps <= |W - W1| <= 1e-3 |W0 - W10|``
    taken after the last excursion above the upper bound; earlier visits to
    the band (lingering near an unstable rotation) are excluded.
    """
    rel = record.relative_speed
    lo = 10.0 * record.config.conv_eps
    hi = 1e-3 * rel[0]
    above = np.flatnonzero(rel > hi)
    start = above[-1] + 1 if above.size else 0
    mask = (rel >= lo) & (rel <= hi)
    mask[:start] = False
    return fit_decay(record.t[mask], rel[mask])


def trapezoid_dissipation(record: TrajectoryRecord) -> float:
    rel = record.relative_speed
    return float(record.params.k * _trapezoid(rel**2, record.t))


@dataclass
class ConvergenceReport:
    stop_reason: StopReason
    t_star: float | None
    omega_bar: np.ndarray
    attained_axis: AxisLabel | None
    fitted_rate: float | None
    fit_goodness: float | None
    predicted_rate: float | None
    attained_verdict: str | None
    D_inf: float
    D_inf_trapezoid: float
    energy_drop: float
    limit_residuals: tuple[float, float]
    ksq_max_rel_drift: float
    attainability: AttainabilityReport
    params: BodyParams
    initial_state: State
    final_state: State
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        s0, sf = self.initial_state, self.final_state
        b0 = balances(self.params, s0)
        return {
            "params": self.params.to_dict(),
            "initial_state": {"omega": s0.omega.tolist(), "omega1": s0.omega1.tolist()},
            "final_state": {"omega": sf.omega.tolist(), "omega1": sf.omega1.tolist()},
            "V0": b0.V,
            "Ksq0": b0.Ksq,
            "stop_reason": self.stop_reason.value,
            "t_star": self.t_star,
            "omega_bar": [float(v) for v in self.omega_bar],
            "attained_axis": None if self.attained_axis is None else self.attained_axis.value,
            "attained_verdict": self.attained_verdict,
            "fitted_rate": self.fitted_rate,
            "fit_goodness": self.fit_goodness,
            "predicted_rate": self.predicted_rate,
            "D_inf": self.D_inf,
            "D_inf_trapezoid": self.D_inf_trapezoid,
            "energy_drop": self.energy_drop,
            "limit_residuals": {"momentum": self.limit_residuals[0],
                                "energy": self.limit_residuals[1]},
            "ksq_max_rel_drift": self.ksq_max_rel_drift,
            "attainability": self.attainability.to_dict(),
            "notes": list(self.notes),
        }


def _finite_or_none(x):
    return None if x is None or not math.isfinite(x) else float(x)


def analyze(record: TrajectoryRecord) -> ConvergenceReport:
    """Full report for one trajectory; never raises on non-convergence,
    it records the reason in ``notes`` instead."""
    params = record.params
    s0, sf = record.initial_state, record.final_state
    omega_bar = 0.5 * (sf.omega + sf.omega1)
    notes: list[str] = []

    axis = None
    predicted = None
    verdict = None
    try:
        axis = classify_limit_axis(params, omega_bar)
    except AmbiguousLimit as exc:
        notes.append(str(exc))
    if axis is not None and axis is not AxisLabel.ORIGIN:
        eq = Equilibrium.at(params, project_to_axis(params, omega_bar, axis))
        spectrum, cls = classify(params, eq)
        predicted = spectrum.slowest_decay_rate
        verdict = cls.verdict.value

    fitted = goodness = None
    if record.converged:
        try:
            fit = fit_rate(record)
        except Indeterminate as exc:
            notes.append(f"rate fit: {exc}")
        else:
            fitted, goodness = fit.rate, fit.goodness
    else:
        notes.append(f"trajectory stopped with {record.stop_reason.value}")

    d_inf = float(record.dissipation[-1])
    return ConvergenceReport(
        stop_reason=record.stop_reason,
        t_star=record.t_star,
        omega_bar=omega_bar,
        attained_axis=axis,
        fitted_rate=_finite_or_none(fitted),
        fit_goodness=_finite_or_none(goodness),
        predicted_rate=predicted,
        attained_verdict=verdict,
        D_inf=d_inf,
        D_inf_trapezoid=trapezoid_dissipation(record),
        energy_drop=float(record.V[0] - record.V[-1]),
        limit_residuals=limit_identities(params, s0, omega_bar, d_inf),
        ksq_max_rel_drift=record.ksq_max_rel_drift,
        attainability=attainability(params, s0),
        params=params,
        initial_state=s0,
        final_state=sf,
        notes=notes,
    )
