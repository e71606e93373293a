"""Evaluation of the two product-moment entanglement conditions.

For an n-partite state rho and one local operator A_k per subsystem the
engine computes

    lhs  = | < A_1 A_2 ... A_n > |
    rhs1 = prod_k < (A_k^dag A_k)^(n/2) > ^ (1/n)
    rhs2 = < ( (1/n) sum_k A_k^dag A_k )^(n/2) >

Every fully separable state satisfies lhs <= rhs1 and lhs <= rhs2, so a
value of lhs exceeding either bound (beyond tolerance) certifies
entanglement; non-violation is inconclusive.

Expectation values factorize over the sum-of-products state
representation, which is the default "fast" route.  ``rhs2`` needs the
n/2 power of a genuinely multipartite operator; it is computed without
dense matrices whenever every local ket of every product term is an
eigenvector of its site's A^dag A (true for number-diagonal operators on
Fock/basis product terms), and through a dense full-space fallback
otherwise.  Both routes agree within round-off wherever both apply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionCap, DimensionMismatch
from .linalg import (
    DIMENSION_CAP,
    annihilation_op,
    as_operator,
    dag,
    kron_embed,
    kron_product,
    psd_power,
    qubit_lowering_op,
    qubit_raising_op,
    total_dimension,
)
from .states import PureSOP, State, dense_vector

#: Scale for the default detection tolerance, see :func:`evaluate`.
DEFAULT_EPSILON_SCALE = 1e-9

#: Absolute bound on ||N^2 - N|| under which (A^dag A)^(n/2) = A^dag A is used.
PROJECTOR_TOL = 1e-12

#: Relative residual bound for the eigenvector fast path of ``rhs_condition2``.
EIGENVECTOR_RTOL = 1e-11


@dataclass(frozen=True)
class OperatorAssignment:
    """One local operator per subsystem."""

    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(as_operator(op) for op in self.ops))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(op.shape[0] for op in self.ops)

    @classmethod
    def qubit_lowering(cls, n: int) -> "OperatorAssignment":
        """|0><1| on every site."""
        return cls(tuple(qubit_lowering_op() for _ in range(n)))

    @classmethod
    def qubit_raising(cls, n: int) -> "OperatorAssignment":
        """|1><0| on every site."""
        return cls(tuple(qubit_raising_op() for _ in range(n)))

    @classmethod
    def qubit_flipped(cls, n: int, flipped_sites=(0,)) -> "OperatorAssignment":
        """Raising on the flipped sites, lowering elsewhere.

        Matches states in which those spins are flipped relative to the
        rest, e.g. the single-flip GHZ variant.
        """
        flipped = set(flipped_sites)
        return cls(
            tuple(
                qubit_raising_op() if k in flipped else qubit_lowering_op()
                for k in range(n)
            )
        )

    @classmethod
    def annihilation(cls, dims) -> "OperatorAssignment":
        """Truncated annihilation operator on every mode."""
        return cls(tuple(annihilation_op(int(d)) for d in dims))


def canonical_assignment(name: str, dims) -> OperatorAssignment:
    """Resolve one of the named operator choices against subsystem dims."""
    dims = tuple(int(d) for d in dims)
    if name == "annihilation":
        return OperatorAssignment.annihilation(dims)
    if name in ("lowering", "raising", "flipped"):
        if any(d != 2 for d in dims):
            raise DimensionMismatch(f"{name} operators require qubit subsystems, got {dims}")
        n = len(dims)
        if name == "lowering":
            return OperatorAssignment.qubit_lowering(n)
        if name == "raising":
            return OperatorAssignment.qubit_raising(n)
        return OperatorAssignment.qubit_flipped(n)
    raise DimensionMismatch(
        f"unknown operator choice {name!r}; known: lowering, raising, flipped, annihilation"
    )


@dataclass(frozen=True)
class WitnessReport:
    """Both condition evaluations on one state with one operator choice."""

    lhs: float
    rhs1: float
    rhs2: float
    margin1: float
    margin2: float
    detected1: bool
    detected2: bool
    epsilon: float

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs1": self.rhs1,
            "rhs2": self.rhs2,
            "margin1": self.margin1,
            "margin2": self.margin2,
            "detected1": self.detected1,
            "detected2": self.detected2,
            "epsilon": self.epsilon,
        }


def _check_assignment(state: State, assignment: OperatorAssignment) -> None:
    if assignment.dims != tuple(state.dims):
        raise DimensionMismatch(
            f"operator dims {assignment.dims} != state dims {tuple(state.dims)}"
        )


def _components(state: State) -> tuple[tuple[tuple[float, PureSOP], ...], float]:
    if isinstance(state, PureSOP):
        return ((1.0, state),), 0.0
    return tuple(zip(state.weights, state.pures)), state.white_noise_weight


def _pair_matrix(stack: np.ndarray, op: np.ndarray | None = None) -> np.ndarray:
    # entry [j, j'] = <u_j | op | u_j'> over the stacked local kets
    if op is None:
        return stack.conj() @ stack.T
    return stack.conj() @ (op @ stack.T)


def _pure_product_expectation(pure: PureSOP, ops) -> complex:
    amps = pure.amplitudes()
    total = np.ones((len(amps), len(amps)), dtype=complex)
    for site, op in enumerate(ops):
        total *= _pair_matrix(pure.site_stack(site), op)
    return complex(amps.conj() @ total @ amps)


def _pure_site_expectations(pure: PureSOP, site_ops) -> np.ndarray:
    """<M_k> for one operator per site, sharing the overlap bookkeeping."""
    amps = pure.amplitudes()
    n = pure.num_sites
    count = len(amps)
    stacks = [pure.site_stack(k) for k in range(n)]
    grams = [_pair_matrix(stack) for stack in stacks]
    prefix = [np.ones((count, count), dtype=complex)]
    for k in range(n - 1):
        prefix.append(prefix[-1] * grams[k])
    suffix = np.ones((count, count), dtype=complex)
    values = np.empty(n, dtype=complex)
    for k in range(n - 1, -1, -1):
        env = prefix[k] * suffix
        values[k] = amps.conj() @ (env * _pair_matrix(stacks[k], site_ops[k])) @ amps
        suffix = suffix * grams[k]
    return values


def _site_expectations(state: State, site_ops) -> np.ndarray:
    comps, noise = _components(state)
    values = np.zeros(len(state.dims), dtype=complex)
    for weight, pure in comps:
        values += weight * _pure_site_expectations(pure, site_ops)
    if noise:
        values += noise * np.array(
            [np.trace(op) / d for op, d in zip(site_ops, state.dims)], dtype=complex
        )
    return values


def product_expectation(state: State, assignment: OperatorAssignment) -> complex:
    """< A_1 A_2 ... A_n > on the given state."""
    _check_assignment(state, assignment)
    comps, noise = _components(state)
    value = sum(
        weight * _pure_product_expectation(pure, assignment.ops) for weight, pure in comps
    )
    if noise:
        traces = 1.0 + 0.0j
        for op, d in zip(assignment.ops, state.dims):
            traces *= np.trace(op) / d
        value += noise * traces
    return complex(value)


def site_second_moments(state: State, assignment: OperatorAssignment) -> np.ndarray:
    """< A_k^dag A_k > for every site, as real numbers."""
    _check_assignment(state, assignment)
    squares = [dag(op) @ op for op in assignment.ops]
    return _site_expectations(state, squares).real


def _moment_operator(op: np.ndarray, n: int, tol: float) -> np.ndarray:
    square = dag(op) @ op
    # projectors are fixed points of every positive power
    if np.max(np.abs(square @ square - square)) <= PROJECTOR_TOL:
        return square
    return psd_power(square, n / 2.0, tol)


def _dense_expectation(full_op: np.ndarray, state: State) -> complex:
    comps, noise = _components(state)
    value = 0.0 + 0.0j
    for weight, pure in comps:
        vec = dense_vector(pure)
        value += weight * np.vdot(vec, full_op @ vec)
    if noise:
        value += noise * np.trace(full_op) / full_op.shape[0]
    return complex(value)


def rhs_condition1(
    state: State,
    assignment: OperatorAssignment,
    method: str = "auto",
    tol: float = 1e-10,
) -> float:
    """Geometric mean bound: prod_k <(A_k^dag A_k)^(n/2)>^(1/n)."""
    _check_assignment(state, assignment)
    n = len(state.dims)
    moment_ops = [_moment_operator(op, n, tol) for op in assignment.ops]
    if method == "dense":
        values = np.array(
            [
                _dense_expectation(kron_embed(mop, k, state.dims), state)
                for k, mop in enumerate(moment_ops)
            ]
        )
    elif method in ("auto", "fast"):
        values = _site_expectations(state, moment_ops)
    else:
        raise ValueError(f"unknown method {method!r}")
    result = 1.0
    for value in values:
        result *= max(float(value.real), 0.0) ** (1.0 / n)
    return float(result)


def _fast_rhs2(state: State, squares, n: int, cap: int) -> float | None:
    """Eigenvector route for rhs2; returns None when ineligible.

    Requires every local ket of every product term to be an eigenvector
    of its site's A^dag A.  Each term is then an eigenvector of the
    operator average S, so S^(n/2) acts by scalar powers and only term
    overlaps are needed.
    """
    comps, noise = _components(state)
    scales = [max(1.0, float(np.max(np.abs(sq)))) for sq in squares]
    half = n / 2.0
    value = 0.0
    for weight, pure in comps:
        amps = pure.amplitudes()
        count = len(amps)
        sums = np.zeros(count)
        gram = np.ones((count, count), dtype=complex)
        for k, square in enumerate(squares):
            stack = pure.site_stack(k)
            acted = stack @ square.T
            mu = np.einsum("jd,jd->j", stack.conj(), acted)
            residual = float(np.max(np.abs(acted - mu[:, None] * stack)))
            if residual > EIGENVECTOR_RTOL * scales[k]:
                return None
            sums += mu.real
            gram *= _pair_matrix(stack)
        powered = np.maximum(sums / n, 0.0) ** half
        value += weight * float((amps.conj() @ (gram * powered[None, :]) @ amps).real)
    if noise:
        total = total_dimension(state.dims)
        if total > cap:
            return None
        spectrum = np.zeros(1)
        for square in squares:
            spectrum = np.add.outer(spectrum, np.linalg.eigvalsh(square)).ravel()
        value += noise * float(np.mean(np.maximum(spectrum / n, 0.0) ** half))
    return value


def rhs_condition2(
    state: State,
    assignment: OperatorAssignment,
    method: str = "auto",
    cap: int = DIMENSION_CAP,
    tol: float = 1e-10,
) -> float:
    """Operator-average bound: <((1/n) sum_k A_k^dag A_k)^(n/2)>."""
    _check_assignment(state, assignment)
    n = len(state.dims)
    squares = [dag(op) @ op for op in assignment.ops]
    if method in ("auto", "fast"):
        value = _fast_rhs2(state, squares, n, cap)
        if value is not None:
            return float(value)
        if method == "fast":
            raise ValueError("fast path ineligible: some local ket is not an eigenvector")
    elif method != "dense":
        raise ValueError(f"unknown method {method!r}")
    total = total_dimension(state.dims)
    if total > cap:
        raise DimensionCap(
            f"rhs_condition2 needs full dimension {total} <= cap {cap} for the dense route"
        )
    summed = sum(kron_embed(sq, k, state.dims, cap) for k, sq in enumerate(squares)) / n
    powered = psd_power(summed, n / 2.0, tol)
    return float(_dense_expectation(powered, state).real)


def evaluate(
    state: State,
    assignment: OperatorAssignment,
    epsilon: float | None = None,
    method: str = "auto",
    cap: int = DIMENSION_CAP,
) -> WitnessReport:
    """Evaluate both conditions and assemble a report.

    ``epsilon`` is the detection tolerance: a condition counts as violated
    only when its margin exceeds it.  When omitted it defaults to
    ``1e-9 * max(1, rhs1, rhs2)``, which keeps strict-inequality semantics
    at equality boundaries without misreading round-off as detection.
    """
    lhs = abs(product_expectation(state, assignment))
    rhs1 = rhs_condition1(state, assignment, method=method)
    rhs2 = rhs_condition2(state, assignment, method=method, cap=cap)
    if epsilon is None:
        epsilon = DEFAULT_EPSILON_SCALE * max(1.0, rhs1, rhs2)
    margin1 = lhs - rhs1
    margin2 = lhs - rhs2
    return WitnessReport(
        lhs=float(lhs),
        rhs1=float(rhs1),
        rhs2=float(rhs2),
        margin1=float(margin1),
        margin2=float(margin2),
        detected1=bool(margin1 > epsilon),
        detected2=bool(margin2 > epsilon),
        epsilon=float(epsilon),
    )


def dense_product_operator(assignment: OperatorAssignment, cap: int = DIMENSION_CAP):
    """Full-space A_1 ⊗ ... ⊗ A_n, for dense cross-checks."""
    return kron_product(assignment.ops, cap)


def product_expectation_dense(
    state: State, assignment: OperatorAssignment, cap: int = DIMENSION_CAP
) -> complex:
    """Dense-route < A_1 ... A_n >, the oracle twin of :func:`product_expectation`."""
    _check_assignment(state, assignment)
    full = dense_product_operator(assignment, cap)
    return _dense_expectation(full, state)
