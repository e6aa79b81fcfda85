import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridanneal.classical import (
    BruteForceCapError,
    brute_force,
    greedy_search,
    inject_constraints,
    prefix_simplify,
)
from hybridanneal.qubo import QuboInstance, energies, energy


def enumerate_all(qubo):
    states = np.array(list(itertools.product([0, 1], repeat=qubo.n)), dtype=np.uint8)
    return states, energies(qubo, states)


def random_qubo(rng, n, scale=1.0):
    return QuboInstance(np.triu(rng.normal(scale=scale, size=(n, n))))


Q3 = QuboInstance([[3.0, -1.0], [0.0, 2.0]])


class TestGreedy:
    def test_single_negative_variable(self):
        q = greedy_search(QuboInstance([[-1.0]]))
        assert q.tolist() == [1]
        assert energy(QuboInstance([[-1.0]]), q) == -1.0

    def test_three_term_example(self):
        q = greedy_search(Q3)
        assert q.tolist() == [0, 0]
        assert energy(Q3, q) == brute_force(Q3).energy == 0.0

    @pytest.mark.parametrize("order", ["descending", "ascending"])
    def test_diagonal_qubo_is_solved_exactly(self, order):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = rng.normal(size=10)
            qubo = QuboInstance(np.diag(d))
            assert energy(qubo, greedy_search(qubo, order)) == pytest.approx(brute_force(qubo).energy)

    def test_zero_field_assigns_zero(self):
        assert greedy_search(QuboInstance(np.zeros((3, 3)))).tolist() == [0, 0, 0]

    def test_deterministic(self):
        qubo = random_qubo(np.random.default_rng(8), 12)
        np.testing.assert_array_equal(greedy_search(qubo), greedy_search(qubo))

    def test_visit_order_flag(self):
        # h = (-0.25, 1.75), J = -0.5: descending sets q2 = 0 first, which turns q1's field positive
        qubo = QuboInstance([[0.5, -2.0], [0.0, 4.5]])
        assert greedy_search(qubo, "descending").tolist() == [0, 0]
        assert greedy_search(qubo, "ascending").tolist() == [1, 0]
        with pytest.raises(ValueError):
            greedy_search(qubo, "sideways")


class TestBruteForce:
    def test_trivial_cases(self):
        gs = brute_force(QuboInstance([[1.0]]))
        assert gs.energy == 0.0 and gs.states.tolist() == [[0]]
        gs = brute_force(QuboInstance([[-1.0]]))
        assert gs.energy == -1.0 and gs.states.tolist() == [[1]]

    def test_flat_landscape_returns_every_state(self):
        gs = brute_force(QuboInstance(np.zeros((2, 2))))
        assert gs.energy == 0.0
        assert sorted(map(tuple, gs.states.tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_matches_plain_enumeration(self):
        rng = np.random.default_rng(4)
        for n in range(1, 11):
            qubo = QuboInstance(np.triu(rng.integers(-3, 4, size=(n, n)).astype(float)))
            states, e = enumerate_all(qubo)
            gs = brute_force(qubo)
            assert gs.energy == e.min()
            expect = {tuple(s) for s in states[e == e.min()]}
            assert {tuple(s) for s in gs.states} == expect

    def test_cap(self):
        with pytest.raises(BruteForceCapError):
            brute_force(QuboInstance(np.zeros((27, 27))))
        with pytest.raises(BruteForceCapError):
            brute_force(QuboInstance(np.zeros((5, 5))), max_vars=4)


class TestPrefixSimplify:
    def test_dominant_positive_fixes_then_cascades(self):
        s = prefix_simplify(Q3)
        assert s.fixed == {0: 0, 1: 0}
        assert s.reduced is None
        assert s.expand().tolist() == [0, 0]

    def test_dominant_negative_fixes_to_one(self):
        qubo = QuboInstance([[-3.0, 1.0], [0.0, 0.0]])
        s = prefix_simplify(qubo)
        assert s.fixed[0] == 1
        assert energy(qubo, s.expand(None if s.reduced is None else [0])) == brute_force(qubo).energy

    def test_nothing_to_fix(self):
        qubo = QuboInstance([[1.0, -2.0], [0.0, 1.0]])
        s = prefix_simplify(qubo)
        assert s.n_fixed == 0 and s.free == (0, 1)
        np.testing.assert_array_equal(s.reduced.coeffs, qubo.coeffs)

    def test_soundness_on_random_qubos(self):
        rng = np.random.default_rng(5)
        hits = 0
        for trial in range(200):
            n = int(rng.integers(1, 17))
            Q = np.triu(rng.normal(size=(n, n)) * (rng.random((n, n)) < 0.4))
            Q[np.diag_indices(n)] = rng.normal(scale=3.0, size=n)
            qubo = QuboInstance(Q, float(rng.normal()))
            s = prefix_simplify(qubo)
            hits += s.n_fixed > 0
            best = brute_force(qubo).energy + qubo.offset
            if s.reduced is None:
                assert energy(qubo, s.expand()) + qubo.offset == pytest.approx(best, abs=1e-9)
                continue
            red = brute_force(s.reduced)
            assert red.energy + s.reduced.offset == pytest.approx(best, abs=1e-9)
            for r in red.states:
                assert energy(qubo, s.expand(r)) + qubo.offset == pytest.approx(best, abs=1e-9)
        assert hits > 50

    def test_fixed_values_never_lose_against_a_flip(self):
        # for every completion, flipping a fixed variable away from its value never strictly helps
        rng = np.random.default_rng(6)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            Q = np.triu(rng.normal(size=(n, n)))
            Q[np.diag_indices(n)] = rng.normal(scale=3.0, size=n)
            qubo = QuboInstance(Q)
            s = prefix_simplify(qubo)
            if not s.n_fixed:
                continue
            first, value = next(iter(s.fixed.items()))
            states, e = enumerate_all(qubo)
            for k, st_ in enumerate(states):
                if st_[first] != value:
                    other = st_.copy()
                    other[first] = value
                    assert energy(qubo, other) <= e[k] + 1e-12


class TestConstraints:
    def test_target_one_one(self):
        q = inject_constraints(QuboInstance(np.zeros((2, 2))), [(0, 1, 1, 1)], 5.0)
        np.testing.assert_array_equal(q.coeffs, [[-5.0, 5.0], [0.0, -5.0]])
        assert q.offset == 5.0
        corners = {s: energy(q, s) + q.offset for s in itertools.product([0, 1], repeat=2)}
        assert corners == {(0, 0): 5.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 0.0}

    @pytest.mark.parametrize("b", list(itertools.product([0, 1], repeat=2)))
    def test_only_opposite_corner_is_penalised(self, b):
        q = inject_constraints(QuboInstance(np.zeros((2, 2))), [(0, 1, *b)], 2.0)
        for s in itertools.product([0, 1], repeat=2):
            both_wrong = s[0] != b[0] and s[1] != b[1]
            assert energy(q, s) + q.offset == (2.0 if both_wrong else 0.0)

    def test_zero_strength_leaves_qubo(self):
        base = random_qubo(np.random.default_rng(1), 4)
        q = inject_constraints(base, [(0, 3, 1, 0)], 0.0)
        np.testing.assert_array_equal(q.coeffs, base.coeffs)
        assert q.offset == base.offset

    def test_two_pairs_toward_1111(self):
        base = random_qubo(np.random.default_rng(2), 4, scale=0.1)
        q = inject_constraints(base, [(0, 1, 1, 1), (2, 3, 1, 1)], [10.0, 10.0])
        states, e = enumerate_all(q)
        assert states[np.argmin(e + q.offset)].tolist()[:2] != [0, 0]
        assert e[np.all(states == 1, axis=1)][0] == energy(base, [1, 1, 1, 1]) - 20.0

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_hint_matching_optimum_keeps_minimum(self, seed):
        rng = np.random.default_rng(seed)
        base = random_qubo(rng, 6)
        gs = brute_force(base)
        opt = gs.states[0]
        i, j = rng.choice(6, 2, replace=False)
        q = inject_constraints(base, [(int(i), int(j), int(opt[i]), int(opt[j]))], float(rng.uniform(0, 5)))
        assert brute_force(q).energy + q.offset == pytest.approx(gs.energy, abs=1e-9)

    @pytest.mark.parametrize(
        "hints,strength,exc",
        [([(0, 0, 1, 1)], 1.0, ValueError), ([(0, 1, 1, 1)], -1.0, ValueError),
         ([(0, 9, 1, 1)], 1.0, IndexError), ([(0, 1, 2, 1)], 1.0, ValueError),
         ([(0, 1, 1, 1)], [1.0, 2.0], ValueError)],
    )
    def test_rejects_bad_hints(self, hints, strength, exc):
        with pytest.raises(exc):
            inject_constraints(QuboInstance(np.zeros((3, 3))), hints, strength)
