"""Corner-block calculus for subnormalized operator encodings.

A BlockEncoding stands for a unitary whose top-left block is ``corner``,
an approximation of ``target / alpha`` with guaranteed error
``||target - alpha * corner|| <= eps``.  The calculus works on the corner
directly with exact dense arithmetic: each operation combines corners,
propagates the worst-case error budget by triangle-inequality rules, and
accumulates abstract resource counters (depth units, queries to input
encodings, ancilla qubits).  Gate-level synthesis is out of scope;
realize_dilation supplies an explicit unitary completion used by the
validation suite to cross-check the corner arithmetic independently.

Counter semantics: an operation's output merges the counters of its
distinct operands once each (sequential composition adds depth; tensor
composition takes the max) and then adds the operation's own stated cost.
Repeated uses of one operand are charged to ``queries``, not by inlining
its ledger again, so totals over a T-step pipeline that feeds each output
back in grow geometrically with T, as expected.

Conventions: matrices are dense complex with power-of-two size (inputs are
zero-padded at construction), indices are 0-based, and spectral norms use
dense SVD, so dimensions are expected to stay at most 2**10.  Norm and
polynomial-bound checks allow a 1e-10 grace for float noise.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidScale,
    MixedAlpha,
    NormBoundViolated,
    NormTooLarge,
    NotDiagonal,
    NotHermitian,
    NotNormalized,
    PolyBoundViolated,
)

NORM_TOL = 1e-10
DIAG_TOL = 1e-12
POLY_GRID_POINTS = 2048


def spectral_norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat, 2))


def _next_power_of_two(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _digest(mat: np.ndarray) -> str:
    payload = np.ascontiguousarray(mat).tobytes() + str(mat.shape).encode()
    return hashlib.sha1(payload).hexdigest()[:12]


@dataclass(frozen=True)
class ResourceCounter:
    """Abstract cost ledger; all fields only ever grow under composition."""

    depth_units: int = 0
    queries: int = 0
    ancilla_high_water: int = 0

    def add(self, *, depth: int = 0, queries: int = 0) -> "ResourceCounter":
        return ResourceCounter(
            self.depth_units + depth,
            self.queries + queries,
            self.ancilla_high_water,
        )


def _merge_counters(encodings, *, parallel: bool = False) -> ResourceCounter:
    depths = [e.resources.depth_units for e in encodings]
    return ResourceCounter(
        depth_units=max(depths) if parallel else sum(depths),
        queries=sum(e.resources.queries for e in encodings),
        ancilla_high_water=max(e.resources.ancilla_high_water for e in encodings),
    )


@dataclass(frozen=True)
class BlockEncoding:
    """Immutable corner block plus (alpha, ancillas, eps) and counters."""

    corner: np.ndarray
    alpha: float = 1.0
    ancillas: int = 0
    eps: float = 0.0
    resources: ResourceCounter = ResourceCounter()

    def __post_init__(self):
        mat = np.array(self.corner, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"corner must be square, got shape {mat.shape}")
        n = mat.shape[0]
        padded = _next_power_of_two(n)
        if padded != n:
            grown = np.zeros((padded, padded), dtype=complex)
            grown[:n, :n] = mat
            mat = grown
        norm = spectral_norm(mat)
        if norm > 1.0 + NORM_TOL:
            raise NormTooLarge(f"corner spectral norm {norm} exceeds 1")
        alpha = float(self.alpha)
        if not (math.isfinite(alpha) and alpha >= 1.0):
            raise ValueError(f"alpha must be finite and >= 1, got {alpha}")
        eps = float(self.eps)
        if not (math.isfinite(eps) and eps >= 0.0):
            raise ValueError(f"eps must be finite and >= 0, got {eps}")
        if self.ancillas < 0:
            raise ValueError("ancillas must be non-negative")
        mat.setflags(write=False)
        object.__setattr__(self, "corner", mat)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "ancillas", int(self.ancillas))
        object.__setattr__(
            self,
            "resources",
            replace(
                self.resources,
                ancilla_high_water=max(
                    self.resources.ancilla_high_water, int(self.ancillas)
                ),
            ),
        )

    @property
    def dim(self) -> int:
        return self.corner.shape[0]

    @property
    def qubits(self) -> int:
        return int(math.log2(self.dim))

    @property
    def norm(self) -> float:
        return spectral_norm(self.corner)

    def is_diagonal(self) -> bool:
        off = self.corner - np.diag(np.diag(self.corner))
        return bool(np.max(np.abs(off)) <= DIAG_TOL) if off.size else True

    def diagonal(self) -> np.ndarray:
        return np.diag(self.corner).copy()

    def summary(self) -> dict:
        return {
            "id": _digest(self.corner),
            "alpha": self.alpha,
            "eps": self.eps,
            "ancillas": self.ancillas,
            "depth_units": self.resources.depth_units,
            "queries": self.resources.queries,
            "ancilla_high_water": self.resources.ancilla_high_water,
        }


@dataclass(frozen=True)
class PostSelection:
    """Outcome of projecting the ancillas onto the all-zeros result.

    ``state`` is None (undefined) when the corner annihilates the input.
    """

    state: np.ndarray | None
    prob: float


class AuditLog:
    """Append-only record of calculus operations, one JSON line each.

    Records carry the operation name, its scalar parameters, and the
    (alpha, eps, counters) summaries of every operand and of the output.
    Sequence numbers replace timestamps so reruns are byte-identical.
    Depth for single-entry projections is charged as ceil(log2 N) per
    invocation even where a constant-depth projector would do; the counter
    is intentionally conservative and consistent.
    """

    def __init__(self):
        self.records: list[dict] = []

    def record(self, op: str, inputs, output: BlockEncoding, **params):
        self.records.append(
            {
                "seq": len(self.records),
                "op": op,
                "params": params,
                "in": [e.summary() for e in inputs],
                "out": output.summary(),
            }
        )

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(rec, sort_keys=True) + "\n" for rec in self.records
        )

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())


def _log(audit: AuditLog | None, op: str, inputs, output: BlockEncoding, **params):
    if audit is not None:
        audit.record(op, inputs, output, **params)
    return output


def diag_encode(
    psi, alpha: float = 1.0, *, audit: AuditLog | None = None
) -> BlockEncoding:
    """Encode a vector of amplitudes as a diagonal corner block.

    Sub-unit vectors are allowed: they are read as the leading amplitudes
    of a larger unit state.  Costs ceil(log2 N) depth units and
    ceil(log2 N) + 3 ancillas; the encoding is exact (eps = 0).
    """
    vec = np.asarray(psi, dtype=complex).ravel()
    norm = float(np.linalg.norm(vec))
    if norm > 1.0 + NORM_TOL:
        raise NormTooLarge(f"amplitude vector norm {norm} exceeds 1")
    dim = _next_power_of_two(max(len(vec), 1))
    padded = np.zeros(dim, dtype=complex)
    padded[: len(vec)] = vec
    log_n = int(math.log2(dim))
    enc = BlockEncoding(
        corner=np.diag(padded),
        alpha=float(alpha),
        ancillas=log_n + 3,
        eps=0.0,
        resources=ResourceCounter(depth_units=log_n, queries=0,
                                  ancilla_high_water=log_n + 3),
    )
    return _log(audit, "diag_encode", [], enc, dim=dim, alpha=float(alpha))


def projector_encode(dim: int, k: int, *, audit: AuditLog | None = None) -> BlockEncoding:
    """Exact encoding of the basis projector |k><k|: depth 1, log2 N ancillas."""
    dim = _next_power_of_two(dim)
    if not 0 <= k < dim:
        raise IndexOutOfRange(f"index {k} not in [0, {dim})")
    corner = np.zeros((dim, dim), dtype=complex)
    corner[k, k] = 1.0
    log_n = int(math.log2(dim))
    enc = BlockEncoding(
        corner=corner,
        alpha=1.0,
        ancillas=log_n,
        eps=0.0,
        resources=ResourceCounter(depth_units=1, queries=0, ancilla_high_water=log_n),
    )
    return _log(audit, "projector_encode", [], enc, dim=dim, k=k)


def entry_project(
    enc: BlockEncoding, j: int, k: int, *, audit: AuditLog | None = None
) -> BlockEncoding:
    """From a diagonal encoding, keep entry j alone and park it at slot k.

    Produces the diagonal matrix x_j |k><k| using the input encoding twice;
    costs ceil(log2 N) depth and ceil(log2 N) + 3 ancillas on top.
    """
    if not enc.is_diagonal():
        raise NotDiagonal("entry_project requires a diagonal corner")
    dim = enc.dim
    if not 0 <= j < dim:
        raise IndexOutOfRange(f"source index {j} not in [0, {dim})")
    if not 0 <= k < dim:
        raise IndexOutOfRange(f"target index {k} not in [0, {dim})")
    corner = np.zeros((dim, dim), dtype=complex)
    corner[k, k] = enc.corner[j, j]
    log_n = int(math.log2(dim))
    out = BlockEncoding(
        corner=corner,
        alpha=enc.alpha,
        ancillas=enc.ancillas + log_n + 3,
        eps=enc.eps,
        resources=enc.resources.add(depth=log_n, queries=2),
    )
    return _log(audit, "entry_project", [enc], out, j=j, k=k)


def product(
    a: BlockEncoding, b: BlockEncoding, *, audit: AuditLog | None = None
) -> BlockEncoding:
    """Encoding of the operator product, one use of each input."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    merged = _merge_counters([a, b])
    out = BlockEncoding(
        corner=a.corner @ b.corner,
        alpha=a.alpha * b.alpha,
        ancillas=a.ancillas + b.ancillas,
        eps=a.alpha * b.eps + b.alpha * a.eps,
        resources=merged.add(queries=2),
    )
    return _log(audit, "product", [a, b], out)


def lcu(
    encodings, signs, *, audit: AuditLog | None = None
) -> BlockEncoding:
    """Signed average (1/m) * sum_i s_i * corner_i of m encodings.

    All inputs must share dimension and alpha; callers rescale explicitly
    first so the resource ledger stays honest.  Costs m queries plus
    ceil(log2 m) ancillas.
    """
    encs = list(encodings)
    signs = [int(s) for s in signs]
    if not encs:
        raise ValueError("lcu requires at least one encoding")
    if len(signs) != len(encs):
        raise ValueError("signs and encodings must have equal length")
    if any(s not in (-1, 1) for s in signs):
        raise ValueError(f"signs must be +/-1, got {signs}")
    dim = encs[0].dim
    if any(e.dim != dim for e in encs):
        raise DimensionMismatch("lcu inputs must share one dimension")
    alpha = encs[0].alpha
    if any(e.alpha != alpha for e in encs):
        raise MixedAlpha("lcu inputs must share one alpha; rescale first")
    m = len(encs)
    corner = sum(s * e.corner for s, e in zip(signs, encs)) / m
    merged = _merge_counters(encs)
    out = BlockEncoding(
        corner=corner,
        alpha=alpha,
        ancillas=sum(e.ancillas for e in encs) + math.ceil(math.log2(m)),
        eps=sum(e.eps for e in encs) / m,
        resources=merged.add(queries=m),
    )
    return _log(audit, "lcu", encs, out, m=m, signs=signs)


def scale_down(
    enc: BlockEncoding, p: float, *, audit: AuditLog | None = None
) -> BlockEncoding:
    """Shrink the corner by 1/p via one extra rotation ancilla (p > 1)."""
    p = float(p)
    if p <= 1.0:
        raise InvalidScale(f"scale factor must exceed 1, got {p}")
    theta = 2.0 * math.acos(1.0 / p)
    out = BlockEncoding(
        corner=enc.corner / p,
        alpha=enc.alpha,
        ancillas=enc.ancillas + 1,
        eps=enc.eps / p,
        resources=enc.resources.add(depth=1),
    )
    return _log(audit, "scale_down", [enc], out, p=p, theta=theta)


def tensor(encodings, *, audit: AuditLog | None = None) -> BlockEncoding:
    """Kronecker product of encodings: parallel single uses of each input."""
    encs = list(encodings)
    if not encs:
        raise ValueError("tensor requires at least one encoding")
    corner = reduce(np.kron, (e.corner for e in encs))
    alpha = 1.0
    eps = 0.0
    for e in encs:
        eps = alpha * e.eps + e.alpha * eps
        alpha *= e.alpha
    merged = _merge_counters(encs, parallel=True)
    out = BlockEncoding(
        corner=corner,
        alpha=alpha,
        ancillas=sum(e.ancillas for e in encs),
        eps=eps,
        resources=merged.add(queries=len(encs)),
    )
    return _log(audit, "tensor", encs, out, m=len(encs))


def amplify(
    enc: BlockEncoding,
    gamma: float,
    delta: float,
    eps_target: float,
    *,
    audit: AuditLog | None = None,
) -> BlockEncoding:
    """Boost the corner by gamma > 1, requiring ||gamma * corner|| < 1 - delta.

    Realized at desk scale as an exact rescale; the multiplicative
    singular-value perturbation allowed by the construction is charged to
    the error budget instead of being injected.  Uses m =
    ceil((2*gamma/delta) * ln(4*gamma/eps_target)) repetitions, one extra
    ancilla; the bound on the boosted norm is strict.
    """
    gamma = float(gamma)
    delta = float(delta)
    eps_target = float(eps_target)
    if gamma <= 1.0:
        raise InvalidScale(f"amplification factor must exceed 1, got {gamma}")
    if not 0.0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    if eps_target <= 0.0:
        raise ValueError(f"eps_target must be positive, got {eps_target}")
    boosted_norm = gamma * enc.norm
    if boosted_norm >= 1.0 - delta:
        raise NormBoundViolated(
            f"||gamma * corner|| = {boosted_norm} must stay strictly below "
            f"{1.0 - delta}"
        )
    m = math.ceil((2.0 * gamma / delta) * math.log(4.0 * gamma / eps_target))
    out = BlockEncoding(
        corner=gamma * enc.corner,
        alpha=enc.alpha,
        ancillas=enc.ancillas + 1,
        eps=gamma * enc.eps + eps_target * boosted_norm,
        resources=enc.resources.add(depth=m, queries=m),
    )
    return _log(audit, "amplify", [enc], out, gamma=gamma, delta=delta,
                eps_target=eps_target, m=m)


def _poly_degree(poly, degree: int | None) -> int:
    if degree is not None:
        return int(degree)
    if hasattr(poly, "degree"):
        return int(poly.degree())
    raise ValueError("degree is required when poly does not expose .degree()")


def qsvt_transform(
    enc: BlockEncoding,
    poly,
    degree: int | None = None,
    *,
    audit: AuditLog | None = None,
) -> BlockEncoding:
    """Apply a bounded real polynomial to the eigenvalues of the corner.

    ``poly`` is any callable polynomial (numpy polynomial objects work);
    pass ``degree`` explicitly for plain callables.  Requires a Hermitian
    corner and sup |poly| <= 1/2 on [-1, 1], checked on a 2048-point
    Chebyshev grid.  The output is a fresh (alpha=1) encoding with two more
    ancillas, degree extra depth/queries, and error 4*d*sqrt(eps/alpha).
    """
    d = _poly_degree(poly, degree)
    if d < 0:
        raise ValueError("degree must be non-negative")
    herm_defect = spectral_norm(enc.corner - enc.corner.conj().T)
    if herm_defect > NORM_TOL:
        raise NotHermitian(f"corner deviates from Hermitian by {herm_defect}")
    k = np.arange(POLY_GRID_POINTS)
    grid = np.cos(np.pi * (2 * k + 1) / (2 * POLY_GRID_POINTS))
    sup = float(np.max(np.abs(np.asarray(poly(grid), dtype=float))))
    if sup > 0.5 + NORM_TOL:
        raise PolyBoundViolated(
            f"sup |poly| = {sup} on [-1, 1] exceeds the 1/2 cap"
        )
    if enc.is_diagonal():
        diag = np.diag(enc.corner).real
        corner = np.diag(np.asarray(poly(diag), dtype=complex))
    else:
        eigvals, eigvecs = np.linalg.eigh(enc.corner)
        transformed = np.asarray(poly(eigvals), dtype=complex)
        corner = (eigvecs * transformed) @ eigvecs.conj().T
    out = BlockEncoding(
        corner=corner,
        alpha=1.0,
        ancillas=enc.ancillas + 2,
        eps=4.0 * d * math.sqrt(enc.eps / enc.alpha),
        resources=enc.resources.add(depth=d, queries=d),
    )
    return _log(audit, "qsvt_transform", [enc], out, degree=d, sup=sup)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    sym = (mat + mat.conj().T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    # Float noise can push eigenvalues to -1e-16 or 1 + 1e-16; clamp first.
    eigvals = np.clip(eigvals, 0.0, 1.0)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


def realize_dilation(enc: BlockEncoding) -> np.ndarray:
    """Complete the corner B into the unitary [[B, sqrt(I-BB*)], [sqrt(I-B*B), -B*]].

    Exists for independent validation of the corner arithmetic; it carries
    no counters.  The top-left block of the result equals the corner
    exactly; unitarity holds to 1e-10 for any contraction.
    """
    if enc.norm > 1.0 + NORM_TOL:
        raise NormTooLarge("dilation requires a contraction corner")
    b = enc.corner
    n = enc.dim
    eye = np.eye(n)
    top_right = _psd_sqrt(eye - b @ b.conj().T)
    bottom_left = _psd_sqrt(eye - b.conj().T @ b)
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = b
    out[:n, n:] = top_right
    out[n:, :n] = bottom_left
    out[n:, n:] = -b.conj().T
    return out


def apply_postselect(enc: BlockEncoding, phi) -> PostSelection:
    """Apply the corner to a unit state and post-select the zero ancillas.

    Returns the normalized image and the success probability
    ||corner @ phi||^2; a zero image leaves the state undefined (None).
    """
    vec = np.asarray(phi, dtype=complex).ravel()
    if vec.size != enc.dim:
        raise DimensionMismatch(f"state has dim {vec.size}, corner {enc.dim}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalized(f"state norm {norm} differs from 1")
    image = enc.corner @ vec
    weight = float(np.linalg.norm(image))
    if weight == 0.0:
        return PostSelection(state=None, prob=0.0)
    return PostSelection(state=image / weight, prob=weight**2)


def identity_encoding(dim: int) -> BlockEncoding:
    """Exact cost-free encoding of the identity (any unitary encodes itself)."""
    return BlockEncoding(corner=np.eye(_next_power_of_two(dim), dtype=complex))
