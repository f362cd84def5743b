"""Body-frame equations of motion for a rigid body carrying a spherical damper.

State layout used everywhere in the package::

    y = (p, q, r, p1, q1, r1)

where ``(p, q, r)`` is the angular velocity of the outer body and
``(p1, q1, r1)`` that of the damper, both resolved along the principal
axes. The outer body has inertia ``J = diag(A1, A2, A3)``, the damper has
scalar inertia ``I`` and the lubricant transmits the torque ``k (W1 - W)``.

Equations::

    J dW/dt  = k (W1 - W) - W x (J W)
    I dW1/dt = -k (W1 - W) - I (W x W1)

The kinetic energy ``V`` decays at rate ``k |W1 - W|^2`` and the squared
total momentum ``K^2 = |J W + I W1|^2`` is a first integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ParameterError(ValueError):
    """Invalid physical parameters or malformed state."""


@dataclass(frozen=True)
class BodyParams:
    """Principal moments ``A1 <= A2 <= A3`` of the outer body, damper inertia ``I``
    and lubricant coupling ``k``. Moments are not re-sorted: axis labels in
    every report refer to the order given here."""

    A1: float
    A2: float
    A3: float
    I: float = 1.0
    k: float = 1.0

    def __post_init__(self):
        for name in ("A1", "A2", "A3", "I", "k"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not 0.0 < self.A1 <= self.A2 <= self.A3:
            raise ParameterError(
                f"moments must satisfy 0 < A1 <= A2 <= A3, got "
                f"({self.A1}, {self.A2}, {self.A3})"
            )
        if self.I <= 0.0:
            raise ParameterError(f"I must be positive, got {self.I}")
        if self.k <= 0.0:
            raise ParameterError(f"k must be positive, got {self.k}")

    @classmethod
    def from_moments(cls, moments, I=1.0, k=1.0) -> "BodyParams":
        a1, a2, a3 = (float(m) for m in moments)
        return cls(a1, a2, a3, I, k)

    @property
    def moments(self) -> np.ndarray:
        return np.array([self.A1, self.A2, self.A3])

    @property
    def J(self) -> np.ndarray:
        return np.diag(self.moments)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.A1, self.A2, self.A3, self.I, self.k)

    def to_dict(self) -> dict:
        return {"A": [self.A1, self.A2, self.A3], "I": self.I, "k": self.k}


def _vec3(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ParameterError(f"{name} must have exactly 3 components, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite components: {arr.tolist()}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class State:
    """Pair of body-frame angular velocities ``(omega, omega1)``."""

    omega: np.ndarray
    omega1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", _vec3(self.omega, "omega"))
        object.__setattr__(self, "omega1", _vec3(self.omega1, "omega1"))

    @classmethod
    def from_vector(cls, y) -> "State":
        y = np.asarray(y, dtype=float).reshape(-1)
        if y.shape != (6,):
            raise ParameterError(f"state vector must have 6 components, got {y.size}")
        return cls(y[:3], y[3:])

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.omega, self.omega1])

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return bool(np.array_equal(self.vector, other.vector))

    def __repr__(self):
        return f"State(omega={self.omega.tolist()}, omega1={self.omega1.tolist()})"


@dataclass(frozen=True)
class Balances:
    V: float
    Ksq: float
    dissipation_rate: float
    M_total: np.ndarray


def gyroscopic(moments, omega) -> np.ndarray:
    """``omega x (J omega)`` in Euler form.

    Written with moment differences so the component belonging to a pair of
    equal moments is exactly zero in floating point.
    """
    a1, a2, a3 = moments
    p, q, r = omega
    return np.array([(a3 - a2) * q * r, (a1 - a3) * r * p, (a2 - a1) * p * q])


def rhs(params: BodyParams, s: State) -> np.ndarray:
    """Time derivative of the stacked state ``(omega, omega1)``."""
    w, w1 = s.omega, s.omega1
    rel = w1 - w
    dw = (params.k * rel - gyroscopic(params.moments, w)) / params.moments
    dw1 = -(params.k / params.I) * rel - np.cross(w, w1)
    return np.concatenate([dw, dw1])


def kinetic_energy(params: BodyParams, s: State) -> float:
    w, w1 = s.omega, s.omega1
    return 0.5 * (float(w @ (params.moments * w)) + params.I * float(w1 @ w1))


def total_momentum(params: BodyParams, s: State) -> np.ndarray:
    return params.moments * s.omega + params.I * s.omega1


def balances(params: BodyParams, s: State) -> Balances:
    m = total_momentum(params, s)
    rel = s.omega1 - s.omega
    return Balances(
        V=kinetic_energy(params, s),
        Ksq=float(m @ m),
        dissipation_rate=-params.k * float(rel @ rel),
        M_total=m,
    )


def energy_time_derivative_check(params: BodyParams, s: State) -> tuple[float, float]:
    """Residuals of the energy and momentum balances at a single state.

    Returns ``(energy_residual, momentum_residual)``: the first is
    ``|<grad V, rhs> + k |W1 - W|^2|``, the second ``|d(K^2)/dt|`` evaluated
    through the chain rule on ``rhs``. Both vanish for a correct right-hand
    side up to rounding.
    """
    f = rhs(params, s)
    grad_v = np.concatenate([params.moments * s.omega, params.I * s.omega1])
    rel = s.omega1 - s.omega
    energy_res = abs(float(grad_v @ f) + params.k * float(rel @ rel))
    m = total_momentum(params, s)
    dm = params.moments * f[:3] + params.I * f[3:]
    momentum_res = abs(2.0 * float(m @ dm))
    return energy_res, momentum_res


def is_equilibrium(params: BodyParams, s: State, tol: float = 0.0) -> bool:
    """Structural equilibrium test: ``omega == omega1`` and ``omega`` is zero
    or a J-eigenvector. ``tol`` bounds ``|omega - omega1|`` and the
    gyroscopic residual, both relative to ``|omega|`` scale."""
    w, w1 = s.omega, s.omega1
    scale = max(1.0, float(np.linalg.norm(w))) ** 2 * params.A3
    if np.linalg.norm(w - w1) > tol * max(1.0, float(np.linalg.norm(w))):
        return False
    return float(np.linalg.norm(gyroscopic(params.moments, w))) <= tol * scale
