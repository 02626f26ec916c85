"""
Finite-time augmented observer for the pitch channel.

Estimates three quantities from a single noisy position-like
measurement y: the measured variable itself (x1), its rate (x2), and a
lumped disturbance acting on the rate equation (x3).  The underlying
plant form is

    w1' = w2
    w2' = w3 + h(t)        h: known input
    w3' = eta(t)           unknown, bounded-derivative disturbance
    y   = w1 + n(t)        n: measurement noise

and the observer applies fractional-power output injection

    x1' = x2      - (k3/eps)   |e|^a3 sign(e)
    x2' = x3 + h  - (k2/eps^2) |e|^a2 sign(e)
    x3' =         - (k1/eps^3) |e|^a1 sign(e)

with e = x1 - y.  The exponents are tied together,
a2 = (2 a1 + 1)/3 and a3 = (a1 + 2)/3, and the gains must satisfy
k1 > 0, k3 > 0, k2 > 4 k1/(pi k3) for stability.  Raising a1 toward 1
improves steady precision; shrinking eps raises the observer bandwidth
(and its noise sensitivity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .integrate import rk4_step


class NonFiniteEstimate(RuntimeError):
    """Observer state became NaN or infinite."""


@dataclass(frozen=True)
class ObserverParams:
    k1: float = 0.75
    k2: float = 2.75
    k3: float = 3.0
    alpha1: float = 0.9
    epsilon: float = 0.3

    def __post_init__(self):
        violations = validate_params(self, raise_on_error=False)
        if violations:
            raise ValueError("invalid observer parameters: " + "; ".join(violations))

    @property
    def alpha2(self) -> float:
        return (2.0 * self.alpha1 + 1.0) / 3.0

    @property
    def alpha3(self) -> float:
        return (self.alpha1 + 2.0) / 3.0


def validate_params(p, raise_on_error: bool = False) -> list[str]:
    """Return the list of violated parameter constraints (empty if valid).

    Works on any object with k1/k2/k3/alpha1/epsilon attributes so that
    candidate values can be screened before constructing ObserverParams.
    """
    v = []
    if not p.k1 > 0.0:
        v.append("k1 must be > 0")
    if not p.k3 > 0.0:
        v.append("k3 must be > 0")
    if p.k1 > 0.0 and p.k3 > 0.0 and not p.k2 > 4.0 * p.k1 / (math.pi * p.k3):
        v.append("k2 must exceed 4*k1/(pi*k3)")
    if not 0.0 < p.alpha1 < 1.0:
        v.append("alpha1 must lie in the open interval (0, 1)")
    if not 0.0 < p.epsilon < 1.0:
        v.append("epsilon must lie in the open interval (0, 1)")
    if raise_on_error and v:
        raise ValueError("; ".join(v))
    return v


@dataclass
class ObserverState:
    x1: float = 0.0   # estimate of the measured variable
    x2: float = 0.0   # estimate of its rate
    x3: float = 0.0   # estimate of the lumped disturbance

    def as_tuple(self):
        return (self.x1, self.x2, self.x3)


def _frac_pow(e: float, a: float) -> float:
    """|e|^a * sign(e), continuous through zero."""
    if e > 0.0:
        return math.pow(e, a)
    if e < 0.0:
        return -math.pow(-e, a)
    return 0.0


def observer_derivative(state, y_op: float, h: float, p: ObserverParams):
    """(x1', x2', x3') of the observer driven by measurement y_op and input h.

    `state` is anything indexable as (x1, x2, x3).
    """
    x1, x2, x3 = state[0], state[1], state[2]
    e = x1 - y_op
    eps = p.epsilon
    d1 = x2 - (p.k3 / eps) * _frac_pow(e, p.alpha3)
    d2 = x3 + h - (p.k2 / (eps * eps)) * _frac_pow(e, p.alpha2)
    d3 = -(p.k1 / (eps ** 3)) * _frac_pow(e, p.alpha1)
    return d1, d2, d3


def estimate_step(obs: ObserverState, y_op: float, h: float,
                  p: ObserverParams, dt: float) -> ObserverState:
    """Advance the observer one step (RK4, measurement and input held)."""
    def f(_t, s):
        return observer_derivative(s, y_op, h, p)

    x1, x2, x3 = rk4_step(f, obs.as_tuple(), 0.0, dt)
    if not (math.isfinite(x1) and math.isfinite(x2) and math.isfinite(x3)):
        raise NonFiniteEstimate(f"observer state non-finite: {(x1, x2, x3)}")
    return ObserverState(x1, x2, x3)
