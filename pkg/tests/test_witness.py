"""Tests for the condition-evaluation engine."""

import math

import numpy as np
import pytest

from witnesslab.errors import DimensionCap, DimensionMismatch
from witnesslab.states import StateFamily, build_state
from witnesslab.witness import (
    OperatorAssignment,
    canonical_assignment,
    evaluate,
    product_expectation,
    product_expectation_dense,
    rhs_condition1,
    rhs_condition2,
    site_second_moments,
)


def ghz(n, theta):
    return build_state(StateFamily("GHZ", {"n": n, "theta": theta}))


def four_mode(x, tail_tol=1e-15):
    return build_state(StateFamily("ModifiedFourMode", {"x": x}), tail_tol=tail_tol)


def test_ghz_product_expectation():
    """<prod |0><1|> = cos(theta) sin(theta); sqrt(3)/4 at pi/6."""
    value = product_expectation(ghz(3, math.pi / 6), OperatorAssignment.qubit_lowering(3))
    assert value == pytest.approx(math.sqrt(3) / 4, abs=1e-14)
    for theta in (0.2, 0.9, 2.5):
        value = product_expectation(ghz(4, theta), OperatorAssignment.qubit_lowering(4))
        assert value == pytest.approx(math.cos(theta) * math.sin(theta), abs=1e-13)


def test_lowering_annihilates_ground_product():
    value = product_expectation(ghz(3, 0.0), OperatorAssignment.qubit_lowering(3))
    assert value == pytest.approx(0.0, abs=1e-14)


def four_mode_series_moment(x, weight, tol=1e-16):
    """Independent truncated summation of (1-x^2) sum_m x^(2m) weight(m)."""
    q = x * x
    total, m = 0.0, 0
    while True:
        term = q**m * weight(m)
        total += term
        if m > 10 and term < tol * max(1.0, total):
            return (1.0 - q) * total
        m += 1


def test_four_mode_product_expectation_vs_series():
    """<a1 a2 a3 a4> at x = 0.5 is 2x/(1-x^2)^2 = 16/9, checked against
    an independent summation of the defining series."""
    x = 0.5
    state = four_mode(x)
    value = product_expectation(state, OperatorAssignment.annihilation(state.dims))
    series = four_mode_series_moment(x, lambda m: m * (m + 1)) / x
    assert series == pytest.approx(16.0 / 9.0, abs=1e-12)
    assert value.real == pytest.approx(series, abs=1e-10)
    assert abs(value.imag) < 1e-12


def test_ghz_rhs_condition1():
    """Geometric-mean bound equals sin^2(theta); 0.25 at pi/6."""
    assert rhs_condition1(ghz(3, math.pi / 6), OperatorAssignment.qubit_lowering(3)) == (
        pytest.approx(0.25, abs=1e-14)
    )


def test_noisy_ghz_rhs_condition1_formula():
    """White noise shifts each site moment to p sin^2 + (1-p)/2."""
    lowering = OperatorAssignment.qubit_lowering(3)
    for theta, p in [(0.3, 0.8), (1.1, 0.4), (math.pi / 8, 0.95)]:
        state = build_state(
            StateFamily("NoisyGHZ", {"n": 3, "theta": theta, "p": p, "noise": "white"})
        )
        report = evaluate(state, lowering)
        want = p * math.sin(theta) ** 2 + (1.0 - p) / 2.0
        assert report.rhs1 == pytest.approx(want, abs=1e-14)
        # consistency with the p-rearranged inequality: same violation verdict
        rearranged = abs(math.cos(theta) * math.sin(theta)) > (
            math.sin(theta) ** 2 + (1.0 - p) / (2.0 * p)
        )
        assert report.detected1 == rearranged


def test_four_mode_rhs_condition1():
    """x(1+x^2)/(1-x^2)^2 = 10/9 at x = 0.5."""
    state = four_mode(0.5)
    value = rhs_condition1(state, OperatorAssignment.annihilation(state.dims))
    assert value == pytest.approx(10.0 / 9.0, abs=1e-10)


def test_ghz_rhs_condition2_matches_condition1():
    """For GHZ with lowering the two bounds coincide."""
    lowering = OperatorAssignment.qubit_lowering(3)
    state = ghz(3, math.pi / 6)
    assert rhs_condition2(state, lowering) == pytest.approx(0.25, abs=1e-12)
    for theta in np.linspace(0.1, 1.4, 7):
        state = ghz(5, float(theta))
        a5 = OperatorAssignment.qubit_lowering(5)
        assert abs(rhs_condition1(state, a5) - rhs_condition2(state, a5)) < 1e-9


def test_squeezed_conditions_coincide():
    for x in (0.2, 0.6, 0.9):
        state = build_state(StateFamily("NModeSqueezed", {"n": 3, "x": x}))
        ops = OperatorAssignment.annihilation(state.dims)
        assert abs(rhs_condition1(state, ops) - rhs_condition2(state, ops)) < 1e-9


def test_four_mode_rhs_condition2():
    """(x^4 + 6x^2 + 1)/(4(1-x^2)^2) = 2.5625/2.25 at x = 0.5."""
    state = four_mode(0.5)
    value = rhs_condition2(state, OperatorAssignment.annihilation(state.dims))
    assert value == pytest.approx(2.5625 / 2.25, abs=1e-10)


def test_two_group_rhs_condition2_equal_angles():
    """At theta1 = theta2 the doubled bound minus the lhs leaves 2 sin^4."""
    theta = 0.4
    state = build_state(
        StateFamily("TwoGroupGHZ", {"n": 4, "l": 2, "theta1": theta, "theta2": theta})
    )
    report = evaluate(state, OperatorAssignment.qubit_lowering(4))
    assert 2.0 * report.rhs2 - report.lhs == pytest.approx(
        2.0 * math.sin(theta) ** 4, abs=1e-12
    )


def test_evaluate_detects_ghz():
    report = evaluate(ghz(3, math.pi / 6), OperatorAssignment.qubit_lowering(3))
    assert report.detected1 and report.detected2
    assert report.lhs == pytest.approx(0.4330127, abs=1e-6)


def test_evaluate_balanced_ghz_not_detected():
    """cos = sin is the equality case: strict inequality fails."""
    report = evaluate(ghz(3, math.pi / 4), OperatorAssignment.qubit_lowering(3))
    assert not report.detected1 and not report.detected2


def test_two_group_l1_n3_detection_pattern():
    """Condition 1 fires near theta2 = 0, condition 2 never fires."""
    lowering = OperatorAssignment.qubit_lowering(3)
    detected1 = []
    for theta2 in np.linspace(1e-3, math.pi - 1e-3, 80):
        state = build_state(
            StateFamily(
                "TwoGroupGHZ",
                {"n": 3, "l": 1, "theta1": math.pi / 4, "theta2": float(theta2)},
            )
        )
        report = evaluate(state, lowering)
        assert not report.detected2
        detected1.append(report.detected1)
    assert detected1[0]
    assert any(detected1) and not all(detected1)


def test_flipped_ghz_with_matched_operators():
    """Raising on the flipped site restores the cos/sin detection region."""
    flipped = OperatorAssignment.qubit_flipped(4)
    state = build_state(StateFamily("FlippedGHZ", {"n": 4, "theta": 0.3}))
    report = evaluate(state, flipped)
    assert report.lhs == pytest.approx(abs(math.cos(0.3) * math.sin(0.3)), abs=1e-13)
    assert report.rhs1 == pytest.approx(math.sin(0.3) ** 2, abs=1e-13)
    assert report.detected1 and report.detected2


FAST_DENSE_CASES = [
    ("GHZ", {"n": 3, "theta": 0.7}, "lowering", None),
    ("GHZ", {"n": 8, "theta": 0.3}, "raising", None),
    ("FlippedGHZ", {"n": 4, "theta": 0.5}, "flipped", None),
    ("TwoGroupGHZ", {"n": 5, "l": 2, "theta1": 0.4, "theta2": 1.1}, "lowering", None),
    ("LSeparable", {"n": 6, "l": 2, "theta": 0.3, "thetas": [0.6, 0.9]}, "lowering", None),
    (
        "MixedSingleOut",
        {"n": 5, "theta": 0.25, "thetas": [0.1, 0.4, 0.9, 1.2, 0.7]},
        "lowering",
        None,
    ),
    ("NoisyGHZ", {"n": 4, "theta": 0.6, "p": 0.55, "noise": "white"}, "lowering", None),
    ("NoisyGHZ", {"n": 4, "theta": 0.6, "p": 0.55, "noise": "ground"}, "lowering", None),
    ("NModeSqueezed", {"n": 3, "x": 0.5, "cutoff": 7}, "annihilation", 1e-2),
    ("ModifiedFourMode", {"x": 0.5, "cutoff": 3}, "annihilation", 1e-2),
]


@pytest.mark.parametrize("family,params,ops,tail", FAST_DENSE_CASES)
def test_fast_equals_dense(family, params, ops, tail):
    """Factorized and full-space evaluations agree on every family."""
    state = build_state(StateFamily(family, params), **({} if tail is None else {"tail_tol": tail}))
    assignment = canonical_assignment(ops, state.dims)
    assert abs(
        product_expectation(state, assignment) - product_expectation_dense(state, assignment)
    ) < 1e-9
    assert abs(
        rhs_condition1(state, assignment) - rhs_condition1(state, assignment, method="dense")
    ) < 1e-9
    assert abs(
        rhs_condition2(state, assignment) - rhs_condition2(state, assignment, method="dense")
    ) < 1e-9


def test_report_values_real_nonnegative():
    """lhs and both bounds are real and nonnegative across random families."""
    rng = np.random.default_rng(4)
    lowering = OperatorAssignment.qubit_lowering(4)
    for _ in range(25):
        theta1, theta2 = rng.uniform(-math.pi, math.pi, 2)
        state = build_state(
            StateFamily(
                "TwoGroupGHZ", {"n": 4, "l": 2, "theta1": float(theta1), "theta2": float(theta2)}
            )
        )
        report = evaluate(state, lowering)
        for value in (report.lhs, report.rhs1, report.rhs2):
            assert value >= -1e-10


def test_bipartite_identity_and_hierarchy():
    """rhs2^2 = rhs1^2 + ((a-b)/2)^2 and condition 2 implies condition 1 at n=2."""
    from witnesslab.oracle import random_assignment, random_pure_state

    rng = np.random.default_rng(12)
    for _ in range(100):
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        state = random_pure_state(dims, int(rng.integers(1, 4)), rng)
        assignment = random_assignment(dims, rng)
        report = evaluate(state, assignment)
        m_a, m_b = site_second_moments(state, assignment)
        assert report.rhs2**2 == pytest.approx(
            report.rhs1**2 + 0.25 * (m_a - m_b) ** 2, abs=1e-9 * max(1.0, report.rhs2**2)
        )
        if report.detected2:
            assert report.detected1


def test_local_phase_invariance():
    """Multiplying any A_k by a phase changes no report field."""
    state = ghz(3, 0.6)
    base = OperatorAssignment.qubit_lowering(3)
    phases = [np.exp(1j * phi) for phi in (0.3, -1.2, 2.8)]
    rotated = OperatorAssignment(tuple(ph * op for ph, op in zip(phases, base.ops)))
    rep_a, rep_b = evaluate(state, base), evaluate(state, rotated)
    for field in ("lhs", "rhs1", "rhs2", "margin1", "margin2"):
        assert getattr(rep_a, field) == pytest.approx(getattr(rep_b, field), abs=1e-12)
    assert (rep_a.detected1, rep_a.detected2) == (rep_b.detected1, rep_b.detected2)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        product_expectation(ghz(3, 0.2), OperatorAssignment.qubit_lowering(4))


def test_fast_method_rejects_superposition_locals():
    """LSeparable locals are not eigenvectors of |1><1|, so 'fast' refuses."""
    state = build_state(
        StateFamily("LSeparable", {"n": 4, "l": 1, "theta": 0.4, "thetas": [0.3]})
    )
    with pytest.raises(ValueError):
        rhs_condition2(state, OperatorAssignment.qubit_lowering(4), method="fast")
    # auto silently falls back to the dense route
    dense = rhs_condition2(state, OperatorAssignment.qubit_lowering(4), method="dense")
    auto = rhs_condition2(state, OperatorAssignment.qubit_lowering(4))
    assert auto == pytest.approx(dense, abs=1e-12)


def test_rhs_condition2_dimension_cap():
    """Random operators on a large Fock space leave no viable route."""
    from witnesslab.oracle import random_assignment

    state = build_state(StateFamily("NModeSqueezed", {"n": 3, "x": 0.65}))
    assert np.prod(state.dims) > 2**14
    rng = np.random.default_rng(0)
    with pytest.raises(DimensionCap):
        rhs_condition2(state, random_assignment(state.dims, rng))


def test_report_json_schema():
    report = evaluate(ghz(3, 0.5), OperatorAssignment.qubit_lowering(3))
    payload = report.to_json()
    assert list(payload) == [
        "lhs",
        "rhs1",
        "rhs2",
        "margin1",
        "margin2",
        "detected1",
        "detected2",
        "epsilon",
    ]


def test_epsilon_semantics():
    """detected_i is exactly margin_i > epsilon for the epsilon used."""
    state = ghz(3, 0.5)
    lowering = OperatorAssignment.qubit_lowering(3)
    report = evaluate(state, lowering)
    assert report.detected1 == (report.margin1 > report.epsilon)
    assert report.detected2 == (report.margin2 > report.epsilon)
    # an epsilon larger than the margin suppresses detection
    muted = evaluate(state, lowering, epsilon=1.0)
    assert not muted.detected1 and not muted.detected2 and muted.epsilon == 1.0
