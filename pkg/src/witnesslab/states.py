"""State families represented as normalized sums of product terms.

A pure state is stored as a short list of amplitude-weighted product
terms (one local ket per subsystem); a mixed state is a convex mixture
of such pure states, optionally with a maximally-mixed component.  This
sum-of-products form is what lets expectation values factorize per site
instead of going through the full tensor-product space.

Fock-truncated continuous-variable families carry an explicit cutoff;
the discarded tail weight is checked against a tolerance and the kept
amplitudes are renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, DimensionCap, TruncationTooCoarse
from .linalg import DIMENSION_CAP, basis_ket, total_dimension

#: Largest acceptable discarded probability for truncated CV states.
DEFAULT_TAIL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProductTerm:
    """One amplitude-weighted product of local kets."""

    amplitude: complex
    factors: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class PureSOP:
    """Pure state as a sum of product terms over fixed subsystem dims.

    Every term must carry one unit-norm local ket per subsystem; the
    factorized evaluation paths depend on it.
    """

    dims: tuple[int, ...]
    terms: tuple[ProductTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) < 2 or any(d < 1 for d in self.dims):
            raise BadParameter(f"need at least 2 subsystems of dim >= 1, got {self.dims}")
        if not self.terms:
            raise BadParameter("a state needs at least one product term")
        for term in self.terms:
            if len(term.factors) != len(self.dims):
                raise BadParameter(
                    f"term has {len(term.factors)} factors for {len(self.dims)} subsystems"
                )
            for ket, dim in zip(term.factors, self.dims):
                if ket.shape != (dim,):
                    raise BadParameter(f"local ket shape {ket.shape} != ({dim},)")
                if abs(np.linalg.norm(ket) - 1.0) > 1e-10:
                    raise BadParameter("local kets must be unit-normalized")

    @property
    def num_sites(self) -> int:
        return len(self.dims)

    def amplitudes(self) -> np.ndarray:
        return np.array([t.amplitude for t in self.terms], dtype=complex)

    def site_stack(self, site: int) -> np.ndarray:
        """All terms' local kets at one site, stacked to shape (terms, dim)."""
        return np.array([t.factors[site] for t in self.terms], dtype=complex)

    def norm(self) -> float:
        amps = self.amplitudes()
        gram = np.ones((len(self.terms), len(self.terms)), dtype=complex)
        for k in range(self.num_sites):
            stack = self.site_stack(k)
            gram *= stack.conj() @ stack.T
        return float(np.sqrt((amps.conj() @ gram @ amps).real))

    def normalized(self) -> "PureSOP":
        scale = self.norm()
        if scale == 0.0:
            raise BadParameter("cannot normalize a zero state")
        terms = tuple(ProductTerm(t.amplitude / scale, t.factors) for t in self.terms)
        return PureSOP(self.dims, terms)


@dataclass(frozen=True, eq=False)
class MixedEnsemble:
    """Convex mixture of pure SOP states plus an optional white-noise part.

    ``weights`` and ``white_noise_weight`` sum to one; the white-noise
    component stands for I / prod(dims) and is always handled factorwise,
    never materialized.
    """

    dims: tuple[int, ...]
    weights: tuple[float, ...]
    pures: tuple[PureSOP, ...]
    white_noise_weight: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != len(self.pures):
            raise BadParameter("one weight per pure component required")
        if any(w < -1e-12 for w in self.weights) or self.white_noise_weight < -1e-12:
            raise BadParameter("mixture weights must be nonnegative")
        total = sum(self.weights) + self.white_noise_weight
        if abs(total - 1.0) > 1e-12:
            raise BadParameter(f"mixture weights sum to {total}, expected 1")
        for pure in self.pures:
            if pure.dims != self.dims:
                raise BadParameter("all components must share the ensemble dims")

    @property
    def num_sites(self) -> int:
        return len(self.dims)


State = PureSOP | MixedEnsemble

#: Family tag -> (required parameter names, optional parameter names).
FAMILY_PARAMS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "GHZ": (("n", "theta"), ()),
    "FlippedGHZ": (("n", "theta"), ()),
    "TwoGroupGHZ": (("n", "l", "theta1", "theta2"), ()),
    "LSeparable": (("n", "l", "theta", "thetas"), ()),
    "MixedSingleOut": (("n", "theta", "thetas"), ()),
    "NoisyGHZ": (("n", "theta", "p", "noise"), ()),
    "NModeSqueezed": (("n", "x"), ("cutoff",)),
    "ModifiedFourMode": (("x",), ("cutoff",)),
}


@dataclass(frozen=True)
class StateFamily:
    """Parametric descriptor of a state family, serializable to JSON."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILY_PARAMS:
            raise BadParameter(
                f"unknown family {self.family!r}; known: {sorted(FAMILY_PARAMS)}"
            )

    def with_param(self, name: str, value) -> "StateFamily":
        required, optional = FAMILY_PARAMS[self.family]
        if name not in required + optional:
            raise BadParameter(f"family {self.family} has no parameter {name!r}")
        params = dict(self.params)
        params[name] = value
        return StateFamily(self.family, params)

    def as_dict(self) -> dict:
        params = {
            key: list(val) if isinstance(val, (tuple, list, np.ndarray)) else val
            for key, val in self.params.items()
        }
        return {"family": self.family, "params": params}

    @classmethod
    def from_dict(cls, obj) -> "StateFamily":
        if not isinstance(obj, dict) or "family" not in obj:
            raise BadParameter("state family object needs a 'family' key")
        params = obj.get("params", {})
        if not isinstance(params, dict):
            raise BadParameter("'params' must be an object")
        return cls(str(obj["family"]), dict(params))


def tail_weight(x: float, cutoff: int) -> float:
    """Probability discarded by truncating a squeezed-vacuum series at ``cutoff``.

    The kept weights are (1-x^2) x^(2m) for m = 0..cutoff, so the tail is
    x^(2(cutoff+1)).
    """
    return float(x) ** (2 * (int(cutoff) + 1))


def auto_cutoff(x: float, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest cutoff >= 1 whose tail weight is within tolerance."""
    if not 0.0 < x < 1.0:
        raise BadParameter(f"x must lie in (0, 1), got {x}")
    cutoff = max(1, math.ceil(math.log(tail_tol) / (2.0 * math.log(x)) - 1.0))
    while tail_weight(x, cutoff) > tail_tol:
        cutoff += 1
    while cutoff > 1 and tail_weight(x, cutoff - 1) <= tail_tol:
        cutoff -= 1
    return cutoff


def _as_int(params: dict, name: str, family: str, minimum: int) -> int:
    value = params[name]
    if not float(value).is_integer():
        raise BadParameter(f"{family}: {name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise BadParameter(f"{family}: {name} must be >= {minimum}, got {value}")
    return value


def _as_float(params: dict, name: str, family: str) -> float:
    value = float(params[name])
    if not math.isfinite(value):
        raise BadParameter(f"{family}: {name} must be finite")
    return value


def _as_angles(params: dict, name: str, family: str, length: int) -> list[float]:
    value = params[name]
    if not isinstance(value, (list, tuple, np.ndarray)):
        raise BadParameter(f"{family}: {name} must be a list of angles")
    angles = [float(v) for v in value]
    if len(angles) != length:
        raise BadParameter(f"{family}: {name} needs {length} entries, got {len(angles)}")
    if not all(math.isfinite(a) for a in angles):
        raise BadParameter(f"{family}: {name} must be finite")
    return angles


def _check_params(family: StateFamily) -> dict:
    required, optional = FAMILY_PARAMS[family.family]
    missing = [name for name in required if name not in family.params]
    if missing:
        raise BadParameter(f"family {family.family} missing parameters {missing}")
    unknown = [name for name in family.params if name not in required + optional]
    if unknown:
        raise BadParameter(f"family {family.family} got unknown parameters {unknown}")
    return dict(family.params)


def _superposition_qubit(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)], dtype=complex)


def _ghz_terms(n: int, theta: float) -> tuple[ProductTerm, ProductTerm]:
    zeros = tuple(basis_ket(2, 0) for _ in range(n))
    ones = tuple(basis_ket(2, 1) for _ in range(n))
    return (
        ProductTerm(complex(math.cos(theta)), zeros),
        ProductTerm(complex(math.sin(theta)), ones),
    )


def _build_ghz(params: dict) -> PureSOP:
    n = _as_int(params, "n", "GHZ", 2)
    theta = _as_float(params, "theta", "GHZ")
    return PureSOP((2,) * n, _ghz_terms(n, theta))


def _build_flipped_ghz(params: dict) -> PureSOP:
    n = _as_int(params, "n", "FlippedGHZ", 2)
    theta = _as_float(params, "theta", "FlippedGHZ")
    first = (basis_ket(2, 1),) + tuple(basis_ket(2, 0) for _ in range(n - 1))
    second = (basis_ket(2, 0),) + tuple(basis_ket(2, 1) for _ in range(n - 1))
    terms = (
        ProductTerm(complex(math.cos(theta)), first),
        ProductTerm(complex(math.sin(theta)), second),
    )
    return PureSOP((2,) * n, terms)


def _build_two_group_ghz(params: dict) -> PureSOP:
    n = _as_int(params, "n", "TwoGroupGHZ", 2)
    l = _as_int(params, "l", "TwoGroupGHZ", 1)
    if l >= n:
        raise BadParameter(f"TwoGroupGHZ: l must be < n, got l={l}, n={n}")
    t1 = _as_float(params, "theta1", "TwoGroupGHZ")
    t2 = _as_float(params, "theta2", "TwoGroupGHZ")
    zero, one = basis_ket(2, 0), basis_ket(2, 1)
    terms = []
    for amp1, bit1 in ((math.cos(t1), zero), (math.sin(t1), one)):
        for amp2, bit2 in ((math.cos(t2), zero), (math.sin(t2), one)):
            factors = tuple(bit1 for _ in range(l)) + tuple(bit2 for _ in range(n - l))
            terms.append(ProductTerm(complex(amp1 * amp2), factors))
    return PureSOP((2,) * n, tuple(terms))


def _build_l_separable(params: dict) -> PureSOP:
    n = _as_int(params, "n", "LSeparable", 2)
    l = _as_int(params, "l", "LSeparable", 1)
    if l >= n:
        raise BadParameter(f"LSeparable: l must be < n, got l={l}, n={n}")
    theta = _as_float(params, "theta", "LSeparable")
    thetas = _as_angles(params, "thetas", "LSeparable", l)
    # The l single-qubit factors come first, then the (n-l)-qubit GHZ block.
    front = tuple(_superposition_qubit(t) for t in thetas)
    zeros = tuple(basis_ket(2, 0) for _ in range(n - l))
    ones = tuple(basis_ket(2, 1) for _ in range(n - l))
    terms = (
        ProductTerm(complex(math.cos(theta)), front + zeros),
        ProductTerm(complex(math.sin(theta)), front + ones),
    )
    return PureSOP((2,) * n, terms)


def _build_mixed_single_out(params: dict) -> MixedEnsemble:
    n = _as_int(params, "n", "MixedSingleOut", 2)
    theta = _as_float(params, "theta", "MixedSingleOut")
    thetas = _as_angles(params, "thetas", "MixedSingleOut", n)
    zero, one = basis_ket(2, 0), basis_ket(2, 1)
    pures = []
    for i in range(n):
        single = _superposition_qubit(thetas[i])
        low = tuple(single if k == i else zero for k in range(n))
        high = tuple(single if k == i else one for k in range(n))
        terms = (
            ProductTerm(complex(math.cos(theta)), low),
            ProductTerm(complex(math.sin(theta)), high),
        )
        pures.append(PureSOP((2,) * n, terms))
    return MixedEnsemble((2,) * n, (1.0 / n,) * n, tuple(pures))


def _build_noisy_ghz(params: dict) -> MixedEnsemble:
    n = _as_int(params, "n", "NoisyGHZ", 2)
    theta = _as_float(params, "theta", "NoisyGHZ")
    p = _as_float(params, "p", "NoisyGHZ")
    if not 0.0 < p < 1.0:
        raise BadParameter(f"NoisyGHZ: p must lie in (0, 1), got {p}")
    noise = params["noise"]
    ghz = PureSOP((2,) * n, _ghz_terms(n, theta))
    if noise == "ground":
        ground = PureSOP(
            (2,) * n,
            (ProductTerm(1.0 + 0.0j, tuple(basis_ket(2, 0) for _ in range(n))),),
        )
        return MixedEnsemble((2,) * n, (p, 1.0 - p), (ghz, ground))
    if noise == "white":
        return MixedEnsemble((2,) * n, (p,), (ghz,), white_noise_weight=1.0 - p)
    raise BadParameter(f"NoisyGHZ: noise must be 'ground' or 'white', got {noise!r}")


def _squeezed_amplitudes(x: float, cutoff: int) -> np.ndarray:
    # Renormalized geometric amplitudes; successive ratio is exactly x.
    amps = np.empty(cutoff + 1)
    amps[0] = 1.0
    for m in range(cutoff):
        amps[m + 1] = amps[m] * x
    kept = (1.0 - x ** (2 * (cutoff + 1))) / (1.0 - x * x)
    return (amps / math.sqrt(kept)).astype(complex)


def _resolve_cutoff(params: dict, family: str, tail_tol: float) -> tuple[float, int]:
    x = _as_float(params, "x", family)
    if not 0.0 < x < 1.0:
        raise BadParameter(f"{family}: x must lie in (0, 1), got {x}")
    if params.get("cutoff") is None:
        return x, auto_cutoff(x, tail_tol)
    cutoff = _as_int(params, "cutoff", family, 1)
    tail = tail_weight(x, cutoff)
    if tail > tail_tol:
        raise TruncationTooCoarse(
            f"{family}: tail weight {tail:.3e} at cutoff {cutoff} exceeds {tail_tol:.3e}"
        )
    return x, cutoff


def _build_n_mode_squeezed(params: dict, tail_tol: float) -> PureSOP:
    n = _as_int(params, "n", "NModeSqueezed", 2)
    x, cutoff = _resolve_cutoff(params, "NModeSqueezed", tail_tol)
    amps = _squeezed_amplitudes(x, cutoff)
    dim = cutoff + 1
    terms = tuple(
        ProductTerm(amps[m], tuple(basis_ket(dim, m) for _ in range(n)))
        for m in range(cutoff + 1)
    )
    return PureSOP((dim,) * n, terms)


def _build_modified_four_mode(params: dict, tail_tol: float) -> PureSOP:
    x, cutoff = _resolve_cutoff(params, "ModifiedFourMode", tail_tol)
    amps = _squeezed_amplitudes(x, cutoff)
    low, high = cutoff + 1, cutoff + 2
    terms = tuple(
        ProductTerm(
            amps[m],
            (
                basis_ket(low, m),
                basis_ket(low, m),
                basis_ket(high, m + 1),
                basis_ket(high, m + 1),
            ),
        )
        for m in range(cutoff + 1)
    )
    return PureSOP((low, low, high, high), terms)


def build_state(family: StateFamily, tail_tol: float = DEFAULT_TAIL_TOL) -> State:
    """Construct the normalized state described by a family descriptor."""
    params = _check_params(family)
    tag = family.family
    if tag == "GHZ":
        return _build_ghz(params)
    if tag == "FlippedGHZ":
        return _build_flipped_ghz(params)
    if tag == "TwoGroupGHZ":
        return _build_two_group_ghz(params)
    if tag == "LSeparable":
        return _build_l_separable(params)
    if tag == "MixedSingleOut":
        return _build_mixed_single_out(params)
    if tag == "NoisyGHZ":
        return _build_noisy_ghz(params)
    if tag == "NModeSqueezed":
        return _build_n_mode_squeezed(params, tail_tol)
    if tag == "ModifiedFourMode":
        return _build_modified_four_mode(params, tail_tol)
    raise BadParameter(f"unknown family {tag!r}")  # unreachable; guarded in __post_init__


def dense_vector(state: PureSOP, cap: int = DIMENSION_CAP) -> np.ndarray:
    """Expand a pure SOP state into a full state vector (dense fallback)."""
    total = total_dimension(state.dims)
    if total > cap:
        raise DimensionCap(f"full-space dimension {total} exceeds cap {cap}")
    vec = np.zeros(total, dtype=complex)
    for term in state.terms:
        comp = np.array([term.amplitude], dtype=complex)
        for factor in term.factors:
            comp = np.kron(comp, factor)
        vec += comp
    return vec
