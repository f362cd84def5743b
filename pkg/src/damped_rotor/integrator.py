"""Adaptive Dormand-Prince integration with conservation monitoring."""
from __future__ import annotations

import enum
import io
import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import _backend
from .dynamics import BodyParams, ParameterError, State

KSQ_FLOOR = 1e-30
CSV_HEADER = ("t", "p", "q", "r", "p1", "q1", "r1", "V", "Ksq")


class StepFailure(RuntimeError):
    """Raised when a single step produces non-finite values."""


class StopReason(enum.Enum):
    CONVERGED = "Converged"
    HORIZON_REACHED = "HorizonReached"
    STEP_FAILURE = "StepFailure"


_STATUS = {0: StopReason.CONVERGED, 1: StopReason.HORIZON_REACHED, 2: StopReason.STEP_FAILURE}


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, step bounds and stopping rule.

    The run stops early once ``|W - W1| + |rhs|`` stays below ``conv_eps``
    at every sample for ``conv_window`` seconds.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.5
    t_end: float = 500.0
    sample_dt: float = 0.05
    conv_eps: float = 1e-9
    conv_window: float = 5.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(f"integrator.{f.name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"integrator.{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        for name in ("rel_tol", "abs_tol"):
            if not 0.0 < getattr(self, name) <= 1e-2:
                raise ParameterError(f"integrator.{name} must lie in (0, 1e-2]")
        if not 0.0 < self.h_min <= self.h_init <= self.h_max:
            raise ParameterError("integrator step bounds need 0 < h_min <= h_init <= h_max")
        if self.t_end <= 0.0:
            raise ParameterError("integrator.t_end must be positive")
        if self.sample_dt <= 0.0:
            raise ParameterError("integrator.sample_dt must be positive")
        if self.conv_eps <= 0.0:
            raise ParameterError("integrator.conv_eps must be positive")
        if self.conv_window < 0.0:
            raise ParameterError("integrator.conv_window must be non-negative")

    def updated(self, **changes) -> "IntegratorConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_dict(cls, data: dict | None) -> "IntegratorConfig":
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown integrator field(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class TrajectoryRecord:
    """Samples of one integration run.

    ``y`` has one row ``(p, q, r, p1, q1, r1)`` per sample time in ``t``.
    ``dissipation`` is the energy drained by the damper up to each sample,
    accumulated with the Runge-Kutta stage weights during stepping.
    """

    params: BodyParams
    config: IntegratorConfig
    t: np.ndarray
    y: np.ndarray
    V: np.ndarray
    Ksq: np.ndarray
    dissipation: np.ndarray
    stop_reason: StopReason
    t_star: float | None
    n_accepted: int = 0
    n_rejected: int = 0
    backend: str = field(default="")

    @property
    def ksq_max_rel_drift(self) -> float:
        return float(np.max(np.abs(self.Ksq - self.Ksq[0])) / max(self.Ksq[0], KSQ_FLOOR))

    @property
    def omega(self) -> np.ndarray:
        return self.y[:, :3]

    @property
    def omega1(self) -> np.ndarray:
        return self.y[:, 3:]

    @property
    def relative_speed(self) -> np.ndarray:
        """``|W(t) - W1(t)|`` at every sample."""
        return np.linalg.norm(self.y[:, 3:] - self.y[:, :3], axis=1)

    @property
    def initial_state(self) -> State:
        return State.from_vector(self.y[0])

    @property
    def final_state(self) -> State:
        return State.from_vector(self.y[-1])

    @property
    def converged(self) -> bool:
        return self.stop_reason is StopReason.CONVERGED

    @property
    def samples(self) -> list[tuple[float, State, float, float]]:
        return [
            (float(t), State.from_vector(y), float(v), float(k))
            for t, y, v, k in zip(self.t, self.y, self.V, self.Ksq)
        ]

    def energy_increase(self) -> float:
        """Largest sample-to-sample rise of V relative to V(0); 0 when monotone."""
        if len(self.V) < 2:
            return 0.0
        rise = float(np.max(np.diff(self.V)))
        return max(rise, 0.0) / max(self.V[0], KSQ_FLOOR)

    def to_csv(self) -> str:
        buf = io.StringIO()
        write_csv(self, buf)
        return buf.getvalue()


def _par(params: BodyParams):
    return params.as_tuple()


def step(params: BodyParams, s: State, h: float, rel_tol: float = 1e-10,
         abs_tol: float = 1e-10) -> tuple[State, float]:
    """Single Dormand-Prince 5(4) step of size ``h``.

    The error estimate is the largest component of the embedded difference
    divided by ``abs_tol + rel_tol * max(|y_i|, |y_new_i|)``; a step is
    acceptable when it is at most 1.
    """
    if not h > 0.0:
        raise ValueError(f"step size must be positive, got {h}")
    yn, err, _, _ = _backend.kernels.dopri_step(_par(params), s.vector, h, rel_tol, abs_tol)
    if not math.isfinite(err):
        raise StepFailure(f"non-finite values in step of size {h} from {s!r}")
    return State.from_vector(yn), float(err)


def sample_balances(params: BodyParams, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``V`` and ``K^2`` over rows of ``y``."""
    a = params.moments
    w, w1 = y[:, :3], y[:, 3:]
    with np.errstate(over="ignore"):  # a blown-up StepFailure run reports inf
        V = 0.5 * (np.sum(a * w * w, axis=1) + params.I * np.sum(w1 * w1, axis=1))
        m = a * w + params.I * w1
        return V, np.sum(m * m, axis=1)


def integrate(params: BodyParams, s0: State, cfg: IntegratorConfig | None = None,
              backend: str | None = None) -> TrajectoryRecord:
    cfg = cfg or IntegratorConfig()
    kern = _backend.load(backend)
    t, y, diss, status, t_star, n_acc, n_rej = kern.integrate(
        _par(params), s0.vector, cfg.rel_tol, cfg.abs_tol, cfg.h_init, cfg.h_min,
        cfg.h_max, cfg.t_end, cfg.sample_dt, cfg.conv_eps, cfg.conv_window,
    )
    V, Ksq = sample_balances(params, y)
    reason = _STATUS[int(status)]
    return TrajectoryRecord(
        params=params,
        config=cfg,
        t=t,
        y=y,
        V=V,
        Ksq=Ksq,
        dissipation=diss,
        stop_reason=reason,
        t_star=float(t_star) if reason is StopReason.CONVERGED else None,
        n_accepted=int(n_acc),
        n_rejected=int(n_rej),
        backend=kern.NAME,
    )


def rk4_reference(params: BodyParams, s0: State, t_end: float, h: float,
                  backend: str | None = None) -> State:
    """Fixed-step classical RK4 from 0 to ``t_end``; ``t_end / h`` is rounded
    to the nearest integer step count and the step adjusted to hit ``t_end``."""
    n = max(1, int(round(t_end / h)))
    y = _backend.load(backend).rk4(_par(params), s0.vector, t_end / n, n)
    return State.from_vector(y)


def write_csv(record: TrajectoryRecord, fh) -> None:
    fh.write(",".join(CSV_HEADER) + "\n")
    cols = np.column_stack([record.t, record.y, record.V, record.Ksq])
    for row in cols:
        fh.write(",".join("%.17g" % v for v in row) + "\n")


def read_csv(path) -> dict[str, np.ndarray]:
    """Load a trajectory CSV into a dict of column arrays."""
    with open(path, newline="") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected trajectory header: {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}
