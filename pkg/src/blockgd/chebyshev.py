"""Polynomial approximation of scalar derivatives on [-1/2, 1/2].

Given a scalar analytic function F, approx_derivative builds a Chebyshev
interpolant P of F' on the box interval, doubling the candidate degree
(2, 4, 8, ..., 512) until the sup error measured on a dense Chebyshev grid
drops below the target.  The measured error is the contract: it is grid
evidence, not a minimax certificate.

Coefficients are in the domain-mapped Chebyshev basis, i.e. P(x) =
sum_k c_k T_k(2x) for x in [-1/2, 1/2]; the polynomial extends to all of
[-1, 1] where the eigenvalue-transform bound check needs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as ncheb

from .errors import DegreeCapExceeded, DomainViolation, SchemaError

DOMAIN_HALF_WIDTH = 0.5
GRID_POINTS = 4096
DEGREE_CAP = 512
NAMED_KINDS = ("sin", "cos", "exp", "gaussian", "logistic")
_DOMAIN_TOL = 1e-12


def chebyshev_nodes(count: int, half_width: float = DOMAIN_HALF_WIDTH) -> np.ndarray:
    """First-kind Chebyshev nodes scaled to [-half_width, half_width]."""
    k = np.arange(count)
    return half_width * np.cos(np.pi * (2 * k + 1) / (2 * count))


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function with a closed-form derivative.

    kind is "poly" (power-basis coeffs, ascending) or one of the named
    families, each parameterized by a scale s:

        sin:      sin(s*x)             derivative  s*cos(s*x)
        cos:      cos(s*x)             derivative -s*sin(s*x)
        exp:      exp(s*x)             derivative  s*exp(s*x)
        gaussian: exp(-(s*x)^2)        derivative -2*s^2*x*exp(-(s*x)^2)
        logistic: 1/(1+exp(-s*x))      derivative  s*L(x)*(1-L(x))
    """

    kind: str
    coeffs: tuple[float, ...] | None = None
    scale: float = 1.0

    @classmethod
    def polynomial(cls, coeffs) -> "ScalarFunction":
        vals = [float(c) for c in coeffs]
        while len(vals) > 1 and vals[-1] == 0.0:
            vals.pop()
        if not vals:
            vals = [0.0]
        return cls(kind="poly", coeffs=tuple(vals))

    @classmethod
    def named(cls, name: str, scale: float = 1.0) -> "ScalarFunction":
        if name not in NAMED_KINDS:
            raise ValueError(f"unknown function name {name!r}; expected one of {NAMED_KINDS}")
        return cls(kind=name, scale=float(scale))

    def value(self, x):
        s = self.scale
        if self.kind == "poly":
            return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs))
        if self.kind == "sin":
            return np.sin(s * np.asarray(x, dtype=float))
        if self.kind == "cos":
            return np.cos(s * np.asarray(x, dtype=float))
        if self.kind == "exp":
            return np.exp(s * np.asarray(x, dtype=float))
        if self.kind == "gaussian":
            xv = np.asarray(x, dtype=float)
            return np.exp(-((s * xv) ** 2))
        if self.kind == "logistic":
            xv = np.asarray(x, dtype=float)
            return 1.0 / (1.0 + np.exp(-s * xv))
        raise ValueError(f"unknown kind {self.kind!r}")

    def derivative(self, x):
        s = self.scale
        if self.kind == "poly":
            dcoef = self._derivative_coeffs()
            return np.polynomial.polynomial.polyval(x, np.asarray(dcoef))
        if self.kind == "sin":
            return s * np.cos(s * np.asarray(x, dtype=float))
        if self.kind == "cos":
            return -s * np.sin(s * np.asarray(x, dtype=float))
        if self.kind == "exp":
            return s * np.exp(s * np.asarray(x, dtype=float))
        if self.kind == "gaussian":
            xv = np.asarray(x, dtype=float)
            return -2.0 * s * s * xv * np.exp(-((s * xv) ** 2))
        if self.kind == "logistic":
            lv = self.value(x)
            return s * lv * (1.0 - lv)
        raise ValueError(f"unknown kind {self.kind!r}")

    def _derivative_coeffs(self) -> list[float]:
        assert self.kind == "poly"
        dcoef = [k * c for k, c in enumerate(self.coeffs)][1:]
        return dcoef or [0.0]


@dataclass(frozen=True)
class SeparableObjective:
    """f(x) = sum_i F(x_i): one shared scalar function applied coordinate-wise."""

    func: ScalarFunction
    n: int
    grad_bound: float

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        gb = float(self.grad_bound)
        if not (gb > 0.0 and math.isfinite(gb)):
            raise ValueError(f"grad_bound must be positive and finite, got {gb}")
        object.__setattr__(self, "grad_bound", gb)

    def _check_domain(self, x) -> np.ndarray:
        vec = np.asarray(x, dtype=float).ravel()
        if vec.size != self.n:
            raise ValueError(f"point has {vec.size} coordinates, expected {self.n}")
        bad = np.nonzero(np.abs(vec) > DOMAIN_HALF_WIDTH + _DOMAIN_TOL)[0]
        if bad.size:
            m = int(bad[0])
            raise DomainViolation(f"x[{m}] = {vec[m]!r} lies outside [-1/2, 1/2]")
        return vec

    def evaluate(self, x) -> float:
        vec = self._check_domain(x)
        return float(np.sum(self.func.value(vec)))

    def gradient(self, x) -> np.ndarray:
        vec = self._check_domain(x)
        return np.asarray(self.func.derivative(vec), dtype=float)


@dataclass(frozen=True)
class ChebyshevPoly:
    """Chebyshev series on [-1/2, 1/2] with its grid-measured sup error."""

    coeffs: tuple[float, ...]
    degree: int
    sup_error_bound: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.degree != len(self.coeffs) - 1:
            raise ValueError("degree must equal len(coeffs) - 1")

    def __call__(self, x: float) -> float:
        """Clenshaw evaluation at one point of [-1/2, 1/2]."""
        if abs(x) > DOMAIN_HALF_WIDTH + _DOMAIN_TOL:
            raise DomainViolation(f"x = {x!r} lies outside [-1/2, 1/2]")
        t = 2.0 * float(x)
        b_next, b_after = 0.0, 0.0
        for c in self.coeffs[:0:-1]:
            b_next, b_after = 2.0 * t * b_next - b_after + c, b_next
        return self.coeffs[0] + t * b_next - b_after

    def eval_unchecked(self, xs) -> np.ndarray:
        """Vectorized evaluation without the domain check (grids, extensions)."""
        return ncheb.chebval(2.0 * np.asarray(xs, dtype=float), np.asarray(self.coeffs))

    def scaled(self, factor: float) -> "ChebyshevPoly":
        f = float(factor)
        return ChebyshevPoly(
            tuple(c * f for c in self.coeffs), self.degree, abs(f) * self.sup_error_bound
        )


def _trim_trailing(coeffs: np.ndarray, threshold: float) -> np.ndarray:
    keep = len(coeffs)
    while keep > 1 and abs(coeffs[keep - 1]) < threshold:
        keep -= 1
    return coeffs[:keep]


def approx_derivative(func: ScalarFunction, eps: float) -> ChebyshevPoly:
    """Approximate F' on [-1/2, 1/2] to measured sup error <= eps.

    Polynomial inputs are differentiated exactly (degree deg(F)-1, reported
    error 0).  Named functions are interpolated at Chebyshev nodes with the
    candidate degree doubling from 2 up to the cap of 512; trailing
    coefficients below eps/(10*degree) are trimmed before measurement.
    """
    if not 0.0 < eps <= 0.25:
        raise ValueError(f"eps must lie in (0, 1/4], got {eps}")
    if func.kind == "poly":
        dcoef = func._derivative_coeffs()
        # p(t/2) in the power basis, then convert: exact up to rounding.
        mapped = [c / (2.0**k) for k, c in enumerate(dcoef)]
        coeffs = ncheb.poly2cheb(mapped)
        return ChebyshevPoly(tuple(coeffs), len(coeffs) - 1, 0.0)

    grid = chebyshev_nodes(GRID_POINTS)
    target = np.asarray(func.derivative(grid), dtype=float)
    degree = 2
    while degree <= DEGREE_CAP:
        series = ncheb.Chebyshev.interpolate(
            lambda x: np.asarray(func.derivative(x), dtype=float),
            degree,
            domain=[-DOMAIN_HALF_WIDTH, DOMAIN_HALF_WIDTH],
        )
        coeffs = _trim_trailing(np.asarray(series.coef, dtype=float),
                                eps / (10.0 * degree))
        err = float(np.max(np.abs(ncheb.chebval(2.0 * grid, coeffs) - target)))
        if err <= eps:
            return ChebyshevPoly(tuple(coeffs), len(coeffs) - 1, err)
        degree *= 2
    raise DegreeCapExceeded(
        f"no degree <= {DEGREE_CAP} reaches sup error {eps} for kind={func.kind!r}"
    )


def load_scalar_function(doc: dict) -> ScalarFunction:
    """Parse {"kind": "named", "name": ..., "scale": ...} or {"kind": "poly", "coeffs": [...]}."""
    if not isinstance(doc, dict):
        raise SchemaError(f"$: expected object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind == "poly":
        unknown = set(doc) - {"kind", "coeffs"}
        if unknown:
            raise SchemaError(f"$: unknown keys {sorted(unknown)}")
        coeffs = doc.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise SchemaError("coeffs: expected non-empty array of numbers")
        for i, c in enumerate(coeffs):
            if not isinstance(c, (int, float)) or isinstance(c, bool):
                raise SchemaError(f"coeffs[{i}]: expected number, got {c!r}")
        return ScalarFunction.polynomial(coeffs)
    if kind == "named":
        unknown = set(doc) - {"kind", "name", "scale"}
        if unknown:
            raise SchemaError(f"$: unknown keys {sorted(unknown)}")
        name = doc.get("name")
        if name not in NAMED_KINDS:
            raise SchemaError(f"name: expected one of {list(NAMED_KINDS)}, got {name!r}")
        scale = doc.get("scale", 1.0)
        if not isinstance(scale, (int, float)) or isinstance(scale, bool):
            raise SchemaError(f"scale: expected number, got {scale!r}")
        return ScalarFunction.named(name, float(scale))
    raise SchemaError(f"kind: expected 'poly' or 'named', got {kind!r}")
