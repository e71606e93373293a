"""Randomized ground-truth checks for the separability bounds.

Fully separable states can never violate either condition, so seeded
random mixtures of Haar-random product states, probed with random local
operators, form the strongest correctness property the engine has: any
positive detection margin on such a state is a bug (or a tolerance
violation), not physics.

The operator-power inequality <B>^p <= <B^p> (p > 1) that underpins the
bounds is exercised the same way, with random PSD operators and random
density matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, InvalidDensityMatrix
from .linalg import as_operator, dag, psd_power
from .states import MixedEnsemble, ProductTerm, PureSOP
from .witness import OperatorAssignment, evaluate

#: A separable-state margin below this counts as a genuine violation.
SEPARABLE_MARGIN_TOL = -1e-9

#: Same, for the operator-power inequality.
LEMMA_MARGIN_TOL = -1e-10


def haar_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform pure state via a normalized complex Gaussian vector."""
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def random_assignment(dims, rng: np.random.Generator) -> OperatorAssignment:
    """One unconstrained complex Gaussian matrix per site."""
    ops = tuple(
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for d in (int(d) for d in dims)
    )
    return OperatorAssignment(ops)


def random_pure_state(dims, n_terms: int, rng: np.random.Generator) -> PureSOP:
    """Random normalized sum of ``n_terms`` Haar product terms (generically entangled)."""
    dims = tuple(int(d) for d in dims)
    terms = []
    for _ in range(n_terms):
        amp = complex(rng.standard_normal() + 1j * rng.standard_normal())
        terms.append(ProductTerm(amp, tuple(haar_ket(d, rng) for d in dims)))
    return PureSOP(dims, tuple(terms)).normalized()


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random density matrix (Wishart construction)."""
    mat = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = mat @ dag(mat)
    return rho / np.trace(rho).real


def random_psd(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random PSD operator with O(1) spectral radius."""
    mat = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    out = mat @ dag(mat)
    return out / dim


@dataclass(frozen=True)
class SeparableSpec:
    """Seeded description of one random fully separable ensemble."""

    dims: tuple[int, ...]
    n_terms: int
    seed: int

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not 2 <= len(dims) <= 5:
            raise BadParameter(f"need 2..5 subsystems, got {len(dims)}")
        if any(not 1 <= d <= 4 for d in dims):
            raise BadParameter(f"local dims must be 1..4, got {dims}")
        if not 1 <= self.n_terms <= 6:
            raise BadParameter(f"n_terms must be 1..6, got {self.n_terms}")


def sample_separable(spec: SeparableSpec) -> MixedEnsemble:
    """Flat-simplex mixture of Haar-random product states; deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    weights = rng.dirichlet(np.ones(spec.n_terms))
    pures = tuple(
        PureSOP(
            spec.dims,
            (ProductTerm(1.0 + 0.0j, tuple(haar_ket(d, rng) for d in spec.dims)),),
        )
        for _ in range(spec.n_terms)
    )
    return MixedEnsemble(spec.dims, tuple(float(w) for w in weights), pures)


def check_separable_bounds(
    state: MixedEnsemble, assignment: OperatorAssignment
) -> tuple[float, float]:
    """Slack (rhs - lhs) of both bounds; negative beyond tolerance means violation."""
    report = evaluate(state, assignment)
    return report.rhs1 - report.lhs, report.rhs2 - report.lhs


def check_lemma(op, rho, power: float, tol: float = 1e-10) -> float:
    """Slack <B^p> - <B>^p of the operator-power inequality, p > 1."""
    if power <= 1.0:
        raise BadParameter(f"power must exceed 1, got {power}")
    rho = as_operator(rho)
    defect = float(np.max(np.abs(rho - dag(rho))))
    if defect > tol:
        raise InvalidDensityMatrix(f"Hermiticity defect {defect:.3e}")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > 1e-8:
        raise InvalidDensityMatrix(f"trace {trace} != 1")
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < -tol:
        raise InvalidDensityMatrix(f"negative eigenvalue {evals[0]:.3e}")
    powered = psd_power(op, power, tol)
    mean = max(float(np.trace(rho @ as_operator(op)).real), 0.0)
    mean_powered = float(np.trace(rho @ powered).real)
    return mean_powered - mean**power


@dataclass(frozen=True)
class SeparableTrialSummary:
    trials: int
    violations: int
    worst_margin1: float
    worst_margin2: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    @property
    def worst_margin(self) -> float:
        return min(self.worst_margin1, self.worst_margin2)


def run_separable_trials(
    trials: int,
    seed: int,
    max_n: int = 4,
    max_dim: int = 3,
    max_terms: int = 4,
    margin_tol: float = SEPARABLE_MARGIN_TOL,
) -> SeparableTrialSummary:
    """Seeded batch of random separable ensembles vs random operators.

    Per-trial generators are derived from (seed, trial index), so any
    subset of trials reproduces identically, serial or parallel.
    """
    violations = 0
    worst1 = worst2 = np.inf
    for trial in range(int(trials)):
        rng = np.random.default_rng([int(seed), trial])
        n = int(rng.integers(2, max_n + 1))
        dims = tuple(int(d) for d in rng.integers(2, max_dim + 1, n))
        spec = SeparableSpec(
            dims=dims,
            n_terms=int(rng.integers(1, max_terms + 1)),
            seed=int(rng.integers(0, 2**63 - 1)),
        )
        ensemble = sample_separable(spec)
        assignment = random_assignment(dims, rng)
        margin1, margin2 = check_separable_bounds(ensemble, assignment)
        worst1 = min(worst1, margin1)
        worst2 = min(worst2, margin2)
        if margin1 < margin_tol or margin2 < margin_tol:
            violations += 1
    return SeparableTrialSummary(int(trials), violations, float(worst1), float(worst2))


@dataclass(frozen=True)
class LemmaTrialSummary:
    trials: int
    violations: int
    worst_margin: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def run_lemma_trials(
    trials: int,
    seed: int,
    dim: int = 6,
    powers=(1.5, 2.0, 3.0),
    margin_tol: float = LEMMA_MARGIN_TOL,
) -> LemmaTrialSummary:
    """Seeded batch of (B, rho, p) triples for the operator-power inequality."""
    violations = 0
    worst = np.inf
    powers = tuple(float(p) for p in powers)
    for trial in range(int(trials)):
        rng = np.random.default_rng([int(seed), trial, 7])
        op = random_psd(dim, rng)
        rho = random_density_matrix(dim, rng)
        power = powers[int(rng.integers(len(powers)))]
        margin = check_lemma(op, rho, power)
        worst = min(worst, margin)
        if margin < margin_tol:
            violations += 1
    return LemmaTrialSummary(int(trials), violations, float(worst))
