"""Plain floating-point gradient descent used as ground truth.

classical_gd iterates x <- x - eta * grad f(x) with symbolic gradients
(exact monomial differentiation or the closed-form scalar derivative);
finite_diff_grad provides a second, derivative-free cross-check.  Both work
for monomial-sum and coordinate-separable objectives: anything exposing
``n``, ``evaluate`` and ``gradient``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainExit, DomainViolation

HALF = 0.5
_DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class OracleTrace:
    """Iterates plus objective values and gradient norms, length T + 1."""

    iterates: tuple[tuple[float, ...], ...]
    values: tuple[float, ...]
    grad_norms: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.iterates, dtype=float)


def classical_gd(objective, x0, eta: float, steps: int) -> OracleTrace:
    """Run exact double-precision descent; halt if an iterate leaves the box.

    A domain exit is surfaced as DomainExit carrying the partial trace: the
    containment schedule is supposed to prevent it, so an exit flags a
    configuration bug rather than something to clip away silently.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != objective.n:
        raise ValueError(f"x0 has {x.size} coordinates, expected {objective.n}")
    if np.any(np.abs(x) > HALF + _DOMAIN_TOL):
        raise DomainViolation("x0 lies outside [-1/2, 1/2]^n")
    iterates = [tuple(float(v) for v in x)]
    values = [float(objective.evaluate(x))]
    grads = [np.asarray(objective.gradient(x), dtype=float)]
    for t in range(steps):
        x = x - eta * grads[-1]
        if np.any(np.abs(x) > HALF + _DOMAIN_TOL):
            partial = OracleTrace(
                iterates=tuple(iterates),
                values=tuple(values),
                grad_norms=tuple(float(np.linalg.norm(g)) for g in grads),
            )
            raise DomainExit(
                f"iterate left [-1/2, 1/2]^n at step {t + 1}",
                step=t + 1,
                trace=partial,
            )
        iterates.append(tuple(float(v) for v in x))
        values.append(float(objective.evaluate(x)))
        grads.append(np.asarray(objective.gradient(x), dtype=float))
    return OracleTrace(
        iterates=tuple(iterates),
        values=tuple(values),
        grad_norms=tuple(float(np.linalg.norm(g)) for g in grads),
    )


def finite_diff_grad(objective, x, h: float) -> np.ndarray:
    """Central-difference gradient, component-wise, step h."""
    x = np.asarray(x, dtype=float).ravel()
    if h <= 0:
        raise ValueError("h must be positive")
    if np.any(np.abs(x) + h > HALF + _DOMAIN_TOL):
        raise DomainViolation("x +/- h e_m leaves [-1/2, 1/2]^n")
    grad = np.zeros(x.size)
    for m in range(x.size):
        step = np.zeros(x.size)
        step[m] = h
        grad[m] = (objective.evaluate(x + step) - objective.evaluate(x - step)) / (2 * h)
    return grad
