"""Closed-form maximisers against a dense log-grid oracle."""

import math

import numpy as np
import pytest

from mcf.cosine_optimizer import (
    Location, ShiftedRatioProblem, SimpleRatioProblem, local_cosine_bound,
    maximize_shifted, maximize_simple, shifted_case,
)
from mcf.errors import InvalidProblemError

GRID = np.concatenate([[0.0], np.logspace(-8, 6, 100_000)])


def random_simple(rng):
    return SimpleRatioProblem(
        float(rng.normal()), float(rng.normal()),
        float(rng.uniform(0.1, 3)), float(rng.uniform(0.1, 3)),
    )


def random_shifted(rng, case):
    """A valid shifted problem that lands in the requested case."""
    while True:
        q = float(rng.uniform(0.2, 3.0))
        t = float(rng.normal())
        s = q * t * t + float(rng.uniform(0.1, 3.0))
        p = float(rng.normal())
        if case in (1, 2):
            p = abs(p) + 0.1 if case == 1 else -(abs(p) + 0.1)
            r = p * t
        else:
            r = float(rng.normal(scale=2.0))
        problem = ShiftedRatioProblem(r, p, s, q, t)
        if shifted_case(problem) == case:
            return problem


def check_against_grid(problem, verdict, dominance_tol=1e-7):
    grid_values = problem.evaluate(GRID)
    assert verdict.value >= grid_values.max() - dominance_tol
    if verdict.location is Location.FINITE:
        at_star = problem.evaluate(verdict.x_star)
        assert abs(at_star - verdict.value) <= 1e-10
        assert at_star >= grid_values.max() - 1e-12
    elif verdict.location is Location.AT_ZERO:
        assert verdict.value == pytest.approx(problem.evaluate(0.0), abs=1e-12)
    else:
        assert verdict.value == pytest.approx(problem.p / math.sqrt(problem.q), abs=1e-12)


class TestMaximizeSimple:

    def test_interior_maximum(self):
        v = maximize_simple(SimpleRatioProblem(1, 1, 1, 1))
        assert v.location is Location.FINITE
        assert v.x_star == pytest.approx(1.0)
        assert v.value == pytest.approx(math.sqrt(2), abs=1e-6)

    def test_monotone_increasing(self):
        v = maximize_simple(SimpleRatioProblem(0, 1, 1, 1))
        assert v.location is Location.AT_INFINITY
        assert v.value == pytest.approx(1.0)

    def test_decreasing_on_half_line(self):
        v = maximize_simple(SimpleRatioProblem(1, -1, 1, 1))
        assert v.location is Location.AT_ZERO
        assert v.value == pytest.approx(1.0)

    @pytest.mark.parametrize("s,q", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_invalid(self, s, q):
        with pytest.raises(InvalidProblemError):
            maximize_simple(SimpleRatioProblem(1, 1, s, q))

    def test_grid_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            problem = random_simple(rng)
            check_against_grid(problem, maximize_simple(problem))

    @pytest.mark.slow
    def test_grid_sweep(self):
        rng = np.random.default_rng(2018)
        locations = set()
        for _ in range(10_000):
            problem = random_simple(rng)
            verdict = maximize_simple(problem)
            check_against_grid(problem, verdict)
            locations.add(verdict.location)
        assert locations == set(Location)


class TestMaximizeShifted:

    def test_case_one(self):
        problem = ShiftedRatioProblem(1, 1, 3, 1, 1)
        assert shifted_case(problem) == 1
        v = maximize_shifted(problem)
        assert v.location is Location.AT_INFINITY
        assert v.value == pytest.approx(1.0)

    def test_case_three(self):
        problem = ShiftedRatioProblem(2, 1, 3, 1, 1)
        assert shifted_case(problem) == 3
        v = maximize_shifted(problem)
        assert v.location is Location.FINITE
        assert v.x_star == pytest.approx(1.0)
        assert v.value == pytest.approx(math.sqrt(1.5))
        assert problem.evaluate(1.0) == pytest.approx(3 / math.sqrt(6))

    def test_case_six(self):
        problem = ShiftedRatioProblem(0, -1, 2, 1, -1)
        assert shifted_case(problem) == 6
        v = maximize_shifted(problem)
        assert v.location is Location.AT_ZERO
        assert v.value == 0.0

    def test_case_six_tie_goes_to_zero(self):
        problem = ShiftedRatioProblem(-1, -1, 1, 1, 0.5)
        assert shifted_case(problem) == 6
        v = maximize_shifted(problem)
        assert v.location is Location.AT_ZERO
        assert v.value == pytest.approx(-1.0)

    def test_constant_function(self):
        problem = ShiftedRatioProblem(0.0, 0.0, 2.0, 1.0, 0.5)
        assert shifted_case(problem) == 0
        v = maximize_shifted(problem)
        assert v.location is Location.AT_ZERO
        assert v.value == 0.0

    def test_denominator_can_vanish(self):
        with pytest.raises(InvalidProblemError):
            maximize_shifted(ShiftedRatioProblem(1, 1, 1, 1, 1))
        with pytest.raises(InvalidProblemError):
            maximize_shifted(ShiftedRatioProblem(1, 1, 1, 0, 0))

    def test_evaluate_at_infinity(self):
        problem = ShiftedRatioProblem(1, 2, 3, 4, 0.1)
        assert problem.evaluate(math.inf) == pytest.approx(1.0)

    @pytest.mark.parametrize("case", [1, 2, 3, 4, 5, 6])
    def test_every_case_against_grid(self, case):
        rng = np.random.default_rng(100 + case)
        for _ in range(40):
            problem = random_shifted(rng, case)
            check_against_grid(problem, maximize_shifted(problem))

    def test_reduces_to_simple_when_unshifted(self):
        rng = np.random.default_rng(42)
        for _ in range(2000):
            r, p = float(rng.normal()), float(rng.normal())
            s, q = float(rng.uniform(0.1, 3)), float(rng.uniform(0.1, 3))
            simple = maximize_simple(SimpleRatioProblem(r, p, s, q))
            shifted = maximize_shifted(ShiftedRatioProblem(r, p, s, q, 0.0))
            assert simple.location is shifted.location
            assert shifted.value == pytest.approx(simple.value, abs=1e-12)

    @pytest.mark.slow
    def test_stratified_sweep(self):
        rng = np.random.default_rng(2017)
        for k in range(10_000):
            problem = random_shifted(rng, 1 + k % 6)
            check_against_grid(problem, maximize_shifted(problem))


class TestLocalCosineBound:

    def test_maximum_matches_shifted_optimizer(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            ell = float(rng.uniform(0.1, 5))
            nsa = float(rng.uniform(0.2, 4))
            gamma_i = float(rng.uniform(-0.95, 0.95)) * math.sqrt(nsa)
            problem = ShiftedRatioProblem(ell, 1.0, 1.0, nsa, gamma_i / nsa)
            verdict = maximize_shifted(problem)
            values = local_cosine_bound(ell, GRID, nsa, gamma_i)
            assert verdict.value >= values.max() - 1e-7
            if verdict.location is Location.FINITE:
                assert local_cosine_bound(ell, verdict.x_star, nsa, gamma_i) == pytest.approx(verdict.value, abs=1e-10)

    def test_additive_step_example(self):
        verdict = maximize_shifted(ShiftedRatioProblem(1.0, 1.0, 1.0, 4.0, 0.0))
        assert verdict.location is Location.FINITE
        assert verdict.x_star == pytest.approx(0.25)
        assert verdict.value == pytest.approx(math.sqrt(1.25))
