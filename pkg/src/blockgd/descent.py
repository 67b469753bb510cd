"""Gradient-descent engines driven by the corner-block calculus.

run_generic realizes x <- x - eta * grad f(x) for monomial-sum objectives
entirely through encoding operations: single-entry projections and products
assemble each scaled partial derivative, signed averages combine terms, and
amplification strips the leftover 1/2.  The step size is pinned to
eta = 1/(2*M*K) (K counting gradient-contributing terms), which is the
identification under which the pipeline reproduces the descent update.

run_separable handles f(x) = sum_i F(x_i) by applying a polynomial
approximation of F' to the iterate diagonal through an eigenvalue
transform, inserting the step size by down-scaling, subtracting, and
amplifying.  The polynomial handed to the transform is divided by
max(2*M, 2 * measured sup) so the sup-norm cap holds by construction while
the net inserted factor stays exactly eta.

Iterates are read directly off the diagonal corner (the simulator's
privilege); the measurement-style read-out path is still exercised to
report the terminal post-selection probability.  Containment is enforced
at run time: every step's amplification requires the next iterate's
infinity norm to stay strictly below 1/2, so a bad schedule raises rather
than silently clipping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import blockcalc as bc
from .blockcalc import AuditLog, BlockEncoding
from .chebyshev import ChebyshevPoly, ScalarFunction, SeparableObjective, approx_derivative
from .errors import (
    DomainViolation,
    InfeasibleSchedule,
    InvalidConfig,
    NormBoundViolated,
    ScaleOverflow,
    VariableNotInSupport,
)
from .polyfunc import ObjectiveFunction

HALF = 0.5
_TOL = 1e-12

GENERIC = "generic"
SEPARABLE = "separable"


@dataclass(frozen=True)
class DescentConfig:
    """Run parameters: iteration count, per-stage error budget, mode, step size.

    In generic mode the step size is derived from the objective
    (eta = 1/(2*M*K)); supplying a different eta is a configuration error.
    In separable mode eta is required and must satisfy 0 < eta <= 1/(2*M).
    """

    steps: int
    eps: float
    mode: str
    eta: float | None = None
    delta_amp: float = 0.5

    def __post_init__(self):
        if self.steps < 0:
            raise InvalidConfig(f"T must be non-negative, got {self.steps}")
        if not (0.0 < self.eps < 1.0):
            raise InvalidConfig(f"eps must lie in (0, 1), got {self.eps}")
        if self.mode not in (GENERIC, SEPARABLE):
            raise InvalidConfig(f"mode must be '{GENERIC}' or '{SEPARABLE}', got {self.mode!r}")
        if not (0.0 < self.delta_amp <= 0.5):
            raise InvalidConfig(f"delta_amp must lie in (0, 1/2], got {self.delta_amp}")


@dataclass(frozen=True)
class IterationRecord:
    """One trace row: iterate, objective value, gradient, budgets, counters."""

    t: int
    x: tuple[float, ...]
    f_value: float
    gradient: tuple[float, ...]
    eps_budget: float
    depth_units: int
    queries: int
    ancillas: int
    ancilla_high_water: int


@dataclass
class DescentTrace:
    """Per-iteration records plus terminal post-selection probability.

    ``schedule_bound_ok`` records whether ||x0||_2 <= 1/2 - eta*M*T held (the
    sufficient containment condition); runs with explicit initial vectors may
    proceed without it, relying on the runtime norm guards instead.
    ``ancillas`` counts naive cumulative consumption; per-iteration deltas
    are available via per_iteration_deltas() since reuse is not modeled.
    """

    mode: str
    n: int
    eta: float
    eps: float
    steps: int
    grad_bound: float
    records: list[IterationRecord]
    probability: float
    schedule_bound_ok: bool
    norm_safety_ok: bool
    poly_degree: int | None = None
    poly_sup_error: float | None = None

    def iterates(self) -> np.ndarray:
        return np.asarray([r.x for r in self.records], dtype=float)

    def final_iterate(self) -> np.ndarray:
        return np.asarray(self.records[-1].x, dtype=float)

    def per_iteration_deltas(self) -> list[dict]:
        out = []
        for prev, cur in zip(self.records, self.records[1:]):
            out.append(
                {
                    "t": cur.t,
                    "depth_units": cur.depth_units - prev.depth_units,
                    "queries": cur.queries - prev.queries,
                    "ancillas": cur.ancillas - prev.ancillas,
                }
            )
        return out

    def to_json_dict(self) -> dict:
        doc = {
            "mode": self.mode,
            "n": self.n,
            "eta": self.eta,
            "eps": self.eps,
            "T": self.steps,
            "grad_bound": self.grad_bound,
            "probability": self.probability,
            "schedule_bound_ok": self.schedule_bound_ok,
            "norm_safety_ok": self.norm_safety_ok,
            "iterations": [
                {
                    "t": r.t,
                    "x": list(r.x),
                    "f": r.f_value,
                    "gradient": list(r.gradient),
                    "eps_budget": r.eps_budget,
                    "depth_units": r.depth_units,
                    "queries": r.queries,
                    "ancillas": r.ancillas,
                    "ancilla_high_water": r.ancilla_high_water,
                }
                for r in self.records
            ],
        }
        if self.poly_degree is not None:
            doc["poly_degree"] = self.poly_degree
            doc["poly_sup_error"] = self.poly_sup_error
        return doc

    def to_csv_text(self) -> str:
        header = "t," + ",".join(f"x{i}" for i in range(self.n))
        lines = [header]
        for r in self.records:
            lines.append(str(r.t) + "," + ",".join(repr(v) for v in r.x))
        return "\n".join(lines) + "\n"


def eta_generic(objective: ObjectiveFunction) -> float:
    """Pinned generic step size 1/(2*M*K) over gradient-contributing terms.

    Constant terms never reach the averaging stage, so K counts terms with
    non-empty support; an all-constant objective has no descent direction
    and gets eta = 0.
    """
    k_eff = sum(1 for t in objective.terms if t.support)
    if k_eff == 0:
        return 0.0
    return 1.0 / (2.0 * objective.grad_bound * k_eff)


def initial_state_uniform(eta: float, grad_bound: float, steps: int, n: int) -> np.ndarray:
    """First n amplitudes of the uniform q-qubit state meeting the schedule.

    q = ceil(log2(1/(1/2 - eta*M*T)^2)), raised to ceil(log2 n) when n needs
    more amplitudes; each amplitude is 2**(-q/2), so the diagonal operator
    built from the result has norm max_i |x_i| <= 1/2 - eta*M*T by
    construction.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    slack = HALF - eta * grad_bound * steps
    if slack <= 0.0:
        raise InfeasibleSchedule(
            f"eta*M*T = {eta * grad_bound * steps} must stay below 1/2"
        )
    q = math.ceil(math.log2(1.0 / slack**2))
    q = max(q, math.ceil(math.log2(n)), 1)
    amplitude = 1.0 / math.sqrt(2.0**q)
    return np.full(n, amplitude)


def _pad_dim(n: int) -> int:
    p = 1
    while p < max(n, 1):
        p *= 2
    return p


def _encode_initial(x0: np.ndarray, audit: AuditLog | None) -> BlockEncoding:
    dim = _pad_dim(x0.size)
    psi = np.zeros(dim)
    psi[: x0.size] = x0
    return bc.diag_encode(psi, audit=audit)


def _apply_scalar_factor(
    enc: BlockEncoding,
    factor: float,
    eps: float,
    delta: float,
    audit: AuditLog | None,
) -> BlockEncoding:
    """Multiply a corner by a real scalar via scale-down / amplification.

    |factor| < 1 is a plain down-scale, |factor| > 1 an amplification
    (subject to its strict norm bound); a negative sign rides on a one-term
    signed average.  A factor that would push the corner past unit norm is
    rejected: the caller's gradient bound M is too small.
    """
    magnitude = abs(factor)
    if magnitude == 0.0:
        raise ValueError("zero scaling factor should have been filtered out")
    if magnitude * enc.norm > 1.0 + bc.NORM_TOL:
        raise ScaleOverflow(
            f"|coeff * exponent| / M = {magnitude} would push the corner norm to "
            f"{magnitude * enc.norm}; renormalize the gradient bound"
        )
    if magnitude > 1.0:
        enc = bc.amplify(enc, magnitude, delta, eps, audit=audit)
    elif magnitude < 1.0:
        enc = bc.scale_down(enc, 1.0 / magnitude, audit=audit)
    if factor < 0.0:
        enc = bc.lcu([enc], [-1], audit=audit)
    return enc


def build_partial_be(
    iterate: BlockEncoding,
    objective: ObjectiveFunction,
    term_index: int,
    var: int,
    *,
    eps: float,
    delta: float = 0.5,
    audit: AuditLog | None = None,
) -> BlockEncoding:
    """Encoding of (a_i * e_iv / M) * monomial-derivative at diagonal slot var.

    Assembles the derivative of one term with respect to one of its support
    variables: one single-entry projection per needed factor, repeated
    products for powers (the d(f_i) products), the trivial projector when
    the variable appears linearly, then the combined coefficient scaling.
    """
    term = objective.terms[term_index]
    if term.exponents[var] == 0:
        raise VariableNotInSupport(
            f"term {term_index} has no variable {var}; its derivative vanishes"
        )
    factors = []
    for m in term.support:
        exponent = term.exponents[m] - (1 if m == var else 0)
        if exponent == 0:
            continue
        base = bc.entry_project(iterate, m, var, audit=audit)
        acc = base
        for _ in range(exponent - 1):
            acc = bc.product(acc, base, audit=audit)
        factors.append(acc)
    if factors:
        enc = factors[0]
        for extra in factors[1:]:
            enc = bc.product(enc, extra, audit=audit)
    else:
        # Monomial is x_var itself: the derivative factor is the bare projector.
        enc = bc.projector_encode(iterate.dim, var, audit=audit)
    factor = term.coeff * term.exponents[var] / objective.grad_bound
    return _apply_scalar_factor(enc, factor, eps, delta, audit)


def build_gradient_be(
    iterate: BlockEncoding,
    objective: ObjectiveFunction,
    *,
    eps: float,
    delta: float = 0.5,
    audit: AuditLog | None = None,
) -> BlockEncoding:
    """Encoding of (1/(2*M*K)) * diag(grad f) at the current iterate.

    Per contributing term: average its per-variable partial encodings, then
    restore the factor v/2 (amplify for v > 2, down-scale for v = 1, nothing
    for v = 2, since amplification needs a factor above 1).  A final average
    over the K contributing terms assembles the full gradient diagonal.
    Constant terms are dropped before averaging.
    """
    contributing = [i for i, t in enumerate(objective.terms) if t.support]
    if not contributing:
        return bc.diag_encode(np.zeros(iterate.dim), audit=audit)
    per_term = []
    for i in contributing:
        support = objective.terms[i].support
        partials = [
            build_partial_be(iterate, objective, i, p, eps=eps, delta=delta, audit=audit)
            for p in support
        ]
        combined = bc.lcu(partials, [1] * len(partials), audit=audit)
        v = len(support)
        if v > 2:
            combined = bc.amplify(combined, v / 2.0, delta, eps, audit=audit)
        elif v == 1:
            combined = bc.scale_down(combined, 2.0, audit=audit)
        per_term.append(combined)
    return bc.lcu(per_term, [1] * len(per_term), audit=audit)


def gd_step_generic(
    iterate: BlockEncoding,
    gradient: BlockEncoding,
    *,
    eps: float,
    delta: float = 0.5,
    audit: AuditLog | None = None,
) -> BlockEncoding:
    """One update: signed average of iterate and gradient, then remove the 1/2.

    The amplification precondition is exactly the containment requirement
    max_i |x_{i,t+1}| < 1/2; its failure signals an invalid schedule.
    """
    halved = bc.lcu([iterate, gradient], [1, -1], audit=audit)
    return bc.amplify(halved, 2.0, delta, eps, audit=audit)


def _qsvt_divisor(poly: ChebyshevPoly, grad_bound: float) -> tuple[float, float]:
    """Divisor making |P/divisor| <= 1/2 on all of [-1, 1], and the measured sup."""
    k = np.arange(bc.POLY_GRID_POINTS)
    grid = np.cos(np.pi * (2 * k + 1) / (2 * bc.POLY_GRID_POINTS))
    sup_full = float(np.max(np.abs(poly.eval_unchecked(grid))))
    divisor = max(2.0 * grad_bound, 2.0 * sup_full * (1.0 + 1e-12))
    return divisor, sup_full


def gd_step_separable(
    iterate: BlockEncoding,
    poly: ChebyshevPoly,
    grad_bound: float,
    eta: float,
    eps: float,
    *,
    delta: float = 0.5,
    audit: AuditLog | None = None,
) -> BlockEncoding:
    """One update x <- x - eta * P(x) applied coordinate-wise.

    The eigenvalue transform applies P/divisor (divisor chosen so the
    sup-norm cap holds on [-1, 1]); the down-scale by 1/(eta*divisor)
    restores exactly eta * P, the signed average subtracts, and the final
    amplification strips the 1/2.
    """
    divisor, _ = _qsvt_divisor(poly, grad_bound)
    p_insert = 1.0 / (eta * divisor)
    if p_insert < 1.0 - _TOL:
        raise InvalidConfig(
            f"eta = {eta} exceeds 1/{divisor} allowed by the measured "
            "derivative bound; amplifying the step size is not supported"
        )
    scaled_coeffs = np.asarray(poly.coeffs) / divisor
    transformed = bc.qsvt_transform(
        iterate,
        lambda xs: np.polynomial.chebyshev.chebval(2.0 * np.asarray(xs, dtype=float), scaled_coeffs),
        poly.degree,
        audit=audit,
    )
    if p_insert > 1.0 + _TOL:
        transformed = bc.scale_down(transformed, p_insert, audit=audit)
    halved = bc.lcu([iterate, transformed], [1, -1], audit=audit)
    return bc.amplify(halved, 2.0, delta, eps, audit=audit)


def _validate_x0(x0, n: int) -> np.ndarray:
    vec = np.asarray(x0, dtype=float).ravel()
    if vec.size != n:
        raise InvalidConfig(f"x0 has {vec.size} coordinates, expected n={n}")
    if np.any(np.abs(vec) > HALF + _TOL):
        raise DomainViolation("x0 lies outside [-1/2, 1/2]^n")
    return vec


def _snapshot(t: int, enc: BlockEncoding, objective, n: int) -> IterationRecord:
    x = np.real(enc.diagonal()[:n])
    return IterationRecord(
        t=t,
        x=tuple(float(v) for v in x),
        f_value=float(objective.evaluate(x)),
        gradient=tuple(float(g) for g in objective.gradient(x)),
        eps_budget=enc.eps,
        depth_units=enc.resources.depth_units,
        queries=enc.resources.queries,
        ancillas=enc.ancillas,
        ancilla_high_water=enc.resources.ancilla_high_water,
    )


def _finish_trace(
    mode: str,
    objective,
    records: list[IterationRecord],
    enc: BlockEncoding,
    x0: np.ndarray,
    eta: float,
    cfg: DescentConfig,
    **extra,
) -> DescentTrace:
    uniform = np.full(enc.dim, 1.0 / math.sqrt(enc.dim))
    prob = bc.apply_postselect(enc, uniform).prob
    schedule_ok = bool(
        float(np.linalg.norm(x0))
        <= HALF - eta * objective.grad_bound * cfg.steps + _TOL
    )
    norm_ok = all(max(abs(v) for v in r.x) <= HALF + _TOL for r in records)
    return DescentTrace(
        mode=mode,
        n=objective.n,
        eta=eta,
        eps=cfg.eps,
        steps=cfg.steps,
        grad_bound=objective.grad_bound,
        records=records,
        probability=prob,
        schedule_bound_ok=schedule_ok,
        norm_safety_ok=norm_ok,
        **extra,
    )


def run_generic(
    objective: ObjectiveFunction,
    x0,
    cfg: DescentConfig,
    *,
    audit: AuditLog | None = None,
) -> DescentTrace:
    """Drive T generic steps from diag-encoded x0 and trace every iterate.

    The sufficient containment condition ||x0||_2 <= 1/2 - eta*M*T is
    recorded on the trace, not enforced up front: objectives that contract
    (or an explicit, well-chosen x0) may run safely far beyond it, and any
    actual violation surfaces as NormBoundViolated at the offending step.
    """
    if cfg.mode != GENERIC:
        raise InvalidConfig(f"run_generic requires mode='{GENERIC}', got {cfg.mode!r}")
    eta = eta_generic(objective)
    if cfg.eta is not None and abs(cfg.eta - eta) > 1e-9 * max(eta, 1.0):
        raise InvalidConfig(
            f"generic mode pins eta to 1/(2*M*K) = {eta}; got {cfg.eta}"
        )
    x0 = _validate_x0(x0, objective.n)
    enc = _encode_initial(x0, audit)
    records = [_snapshot(0, enc, objective, objective.n)]
    for t in range(1, cfg.steps + 1):
        try:
            grad = build_gradient_be(
                enc, objective, eps=cfg.eps, delta=cfg.delta_amp, audit=audit
            )
            enc = gd_step_generic(
                enc, grad, eps=cfg.eps, delta=cfg.delta_amp, audit=audit
            )
        except NormBoundViolated as exc:
            raise NormBoundViolated(
                f"step {t}: {exc}; the initial vector violates the containment schedule"
            ) from exc
        records.append(_snapshot(t, enc, objective, objective.n))
    return _finish_trace(GENERIC, objective, records, enc, x0, eta, cfg)


def run_separable(
    objective: SeparableObjective,
    x0,
    cfg: DescentConfig,
    *,
    audit: AuditLog | None = None,
) -> DescentTrace:
    """Drive T separable steps with a shared derivative polynomial."""
    if cfg.mode != SEPARABLE:
        raise InvalidConfig(
            f"run_separable requires mode='{SEPARABLE}', got {cfg.mode!r}"
        )
    m_bound = objective.grad_bound
    if cfg.eta is None:
        raise InvalidConfig("separable mode requires an explicit eta")
    if not 0.0 < cfg.eta <= 1.0 / (2.0 * m_bound) + _TOL:
        raise InvalidConfig(
            f"eta must lie in (0, 1/(2*M)] = (0, {1.0 / (2.0 * m_bound)}], got {cfg.eta}"
        )
    poly = approx_derivative(objective.func, cfg.eps)
    x0 = _validate_x0(x0, objective.n)
    enc = _encode_initial(x0, audit)
    records = [_snapshot(0, enc, objective, objective.n)]
    for t in range(1, cfg.steps + 1):
        try:
            enc = gd_step_separable(
                enc, poly, m_bound, cfg.eta, cfg.eps,
                delta=cfg.delta_amp, audit=audit,
            )
        except NormBoundViolated as exc:
            raise NormBoundViolated(
                f"step {t}: {exc}; the initial vector violates the containment schedule"
            ) from exc
        records.append(_snapshot(t, enc, objective, objective.n))
    return _finish_trace(
        SEPARABLE, objective, records, enc, x0, cfg.eta, cfg,
        poly_degree=poly.degree, poly_sup_error=poly.sup_error_bound,
    )


# ---------------------------------------------------------------------------
# Resource prediction
# ---------------------------------------------------------------------------

ENVELOPE_NOTE = (
    "asymptotic envelopes with unit constants; scaling guides, not runtime predictions"
)


@dataclass(frozen=True)
class CostParams:
    """Inputs for the cost report; JSON keys follow the compare-costs schema."""

    n: int = 16
    terms: int = 3          # K
    degree: int = 4         # d, max total degree per term
    vars_per_term: int = 3  # v
    steps: int = 5          # T
    eps: float = 1e-6
    poly_degree: int = 8    # deg(P) for the separable engine
    sparsity: int = 2       # s
    sparse_rows: int = 2    # number of populated rows in the sparse regime
    tensor_order: int = 2   # p, half the homogeneous degree

    def __post_init__(self):
        for name in ("n", "terms", "degree", "vars_per_term", "sparsity",
                     "sparse_rows", "tensor_order"):
            if getattr(self, name) < 1:
                raise InvalidConfig(f"{name} must be >= 1")
        if self.steps < 1:
            raise InvalidConfig("steps must be >= 1")
        if self.poly_degree < 0:
            raise InvalidConfig("poly_degree must be >= 0")
        if not (0.0 < self.eps < 1.0):
            raise InvalidConfig("eps must lie in (0, 1)")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CostParams":
        mapping = {
            "n": "n", "K": "terms", "d": "degree", "v": "vars_per_term",
            "T": "steps", "eps": "eps", "deg_P": "poly_degree",
            "s": "sparsity", "S_rows": "sparse_rows", "p_tensor": "tensor_order",
        }
        unknown = set(doc) - set(mapping)
        if unknown:
            raise InvalidConfig(f"unknown cost parameters {sorted(unknown)}")
        kwargs = {mapping[k]: v for k, v in doc.items()}
        return cls(**kwargs)


def envelope_formulas(params: CostParams) -> dict:
    """Per-regime cost envelopes with all constants set to one (logs base 2)."""
    ln_n = math.log2(params.n) if params.n > 1 else 1.0
    ln_eps = math.log2(1.0 / params.eps)
    k, d, v, t = params.terms, params.degree, params.vars_per_term, params.steps
    s, rows, p = params.sparsity, params.sparse_rows, params.tensor_order
    generic_pi = ln_n * (k**2) * d * (v**2) * ln_eps
    separable_pi = ln_n * params.poly_degree * ln_eps
    return {
        "generic_per_iteration": generic_pi,
        "generic_total": ln_n * ((k**2) * d * (v**2) * ln_eps) ** t,
        "separable_per_iteration": separable_pi,
        "separable_total": ln_n * (params.poly_degree * ln_eps) ** t,
        "highly_sparse_total": ln_n * ((s**2) * (rows**2) * p * ln_eps) ** t,
        "tensor_oracle_total": ln_n * (p ** (5 * t)) * (s**t) / (params.eps ** (4 * t)),
        "classical_total": float(params.n * d * k * v * t),
    }


def _canonical_objective(n: int, terms: int, degree: int, vars_per_term: int) -> ObjectiveFunction:
    """Deterministic synthetic family used to measure implemented counters."""
    if vars_per_term > n:
        raise InvalidConfig(f"v = {vars_per_term} cannot exceed n = {n}")
    if terms > n:
        raise InvalidConfig(f"probe family requires K <= n, got K = {terms}")
    if degree < vars_per_term:
        raise InvalidConfig(f"d = {degree} cannot be below v = {vars_per_term}")
    from .polyfunc import MonomialTerm

    coeff = 1.0 / (4.0 * terms)
    built = []
    for i in range(terms):
        exps = [0] * n
        for j in range(vars_per_term):
            exps[(i + j) % n] = 1
        exps[i % n] += degree - vars_per_term
        built.append(MonomialTerm(coeff, tuple(exps)))
    return ObjectiveFunction(n, float(degree), tuple(built))


def measure_generic_iteration(
    n: int, terms: int, degree: int, vars_per_term: int, eps: float
) -> dict:
    """Measured counter increments of one generic iteration on the probe family."""
    objective = _canonical_objective(n, terms, degree, vars_per_term)
    cfg = DescentConfig(steps=1, eps=eps, mode=GENERIC)
    trace = run_generic(objective, np.full(n, 0.05), cfg)
    return trace.per_iteration_deltas()[0]


def measure_separable_iteration(n: int, poly_degree: int, eps: float) -> dict:
    """Measured counter increments of one separable iteration (exact P of given degree)."""
    coeffs = [0.0] * (poly_degree + 1) + [0.5 / (poly_degree + 1)]
    func = ScalarFunction.polynomial(coeffs)
    objective = SeparableObjective(func=func, n=n, grad_bound=1.0)
    cfg = DescentConfig(steps=1, eps=eps, mode=SEPARABLE, eta=0.1)
    trace = run_separable(objective, np.full(n, 0.05), cfg)
    return trace.per_iteration_deltas()[0]


def resource_predict(params: CostParams, delta_opt: float | None = None) -> dict:
    """Cost report: measured per-iteration counters, envelopes, crossover rows.

    The measured block reruns one iteration of a canonical synthetic family
    through the actual pipeline, so those numbers are exact implemented
    counters; the envelope block evaluates the per-regime asymptotic
    formulas with unit constants and is labeled as such.
    """
    measured = {
        "generic": measure_generic_iteration(
            params.n, params.terms, params.degree, params.vars_per_term, params.eps
        ),
        "separable": measure_separable_iteration(
            params.n, params.poly_degree, params.eps
        ),
    }
    crossover = []
    for t in range(1, params.steps + 1):
        sub = CostParams(
            n=params.n, terms=params.terms, degree=params.degree,
            vars_per_term=params.vars_per_term, steps=t, eps=params.eps,
            poly_degree=params.poly_degree, sparsity=params.sparsity,
            sparse_rows=params.sparse_rows, tensor_order=params.tensor_order,
        )
        env = envelope_formulas(sub)
        crossover.append(
            {
                "T": t,
                "generic": env["generic_total"],
                "separable": env["separable_total"],
                "highly_sparse": env["highly_sparse_total"],
                "tensor_oracle": env["tensor_oracle_total"],
                "classical": env["classical_total"],
            }
        )
    report = {
        "params": {
            "n": params.n, "K": params.terms, "d": params.degree,
            "v": params.vars_per_term, "T": params.steps, "eps": params.eps,
            "deg_P": params.poly_degree, "s": params.sparsity,
            "S_rows": params.sparse_rows, "p_tensor": params.tensor_order,
        },
        "implemented_per_iteration": measured,
        "envelopes": envelope_formulas(params),
        "envelope_note": ENVELOPE_NOTE,
        "crossover": crossover,
    }
    if delta_opt is not None:
        if not 0.0 < delta_opt < 1.0:
            raise InvalidConfig("delta_opt must lie in (0, 1)")
        report["iterations_to_converge"] = {
            "convex": math.ceil(1.0 / delta_opt),
            "strongly_convex": math.ceil(math.log2(1.0 / delta_opt)),
        }
    return report
