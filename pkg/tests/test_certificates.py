import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from balancedyn.certificates import (
    FlipSchedule, bed_balancing_schedule, ctd_reaching_schedule, escape_certificate, good_bad_counts,
    jammed_fast_check, plant_condition1, plant_condition2, random_balanced, red_fast_check, red_fast_condition,
    validate_schedule,
)
from balancedyn.constructions import (
    PerturbationSet, apply_perturbation, j_prime, j_prime_reference, j_sizes, j_state, s2d, sample_perturbation,
    sparse_state,
)
from balancedyn.state import all_enmity, new_state, utopia

from conftest import signed_states, triangle


class TestValidator:
    def test_empty(self):
        assert validate_schedule(FlipSchedule([], "BED", utopia(5), utopia(5)))

    def test_bed_single_step(self):
        s = new_state(4, [(0, 1)])
        check = validate_schedule(FlipSchedule([((0, 2, 3), (2, 3))], "BED", s))
        assert check.ok and check.final.imbalanced == 0

    def test_ctd_rank_zero_rejected(self):
        # (0, 1) sits inside a cluster of J_12 with rank 0 < 5
        check = validate_schedule(FlipSchedule([((0, 1, 4), (0, 1))], "CTD", j_state(12)))
        assert not check.ok and check.index == 0 and "rank 0" in check.reason

    def test_balanced_triad_rejected(self):
        check = validate_schedule(FlipSchedule([((0, 1, 2), (0, 1))], "BED", utopia(4)))
        assert not check.ok and "balanced" in check.reason

    def test_edge_outside_triad(self):
        check = validate_schedule(FlipSchedule([((0, 2, 3), (0, 1))], "BED", new_state(4, [(0, 1)])))
        assert not check.ok

    def test_bed_non_max_rejected(self):
        check = validate_schedule(FlipSchedule([((0, 2, 3), (0, 2))], "BED", new_state(4, [(0, 1)])))
        assert not check.ok and check.index == 0

    def test_target_mismatch(self):
        check = validate_schedule(FlipSchedule([], "BED", triangle(), utopia(3)))
        assert not check.ok

    def test_unknown_regime(self):
        with pytest.raises(ValueError):
            validate_schedule(FlipSchedule([((0, 1, 2), (0, 1))], "LTD", triangle()))


class TestBedSchedule:
    def test_trivial(self):
        assert len(bed_balancing_schedule(utopia(6))) == 0
        sch = bed_balancing_schedule(triangle())
        assert len(sch) == 1 and validate_schedule(sch).final.imbalanced == 0

    @given(signed_states(max_n=12))
    def test_valid_and_short(self, state):
        sch = bed_balancing_schedule(state)
        check = validate_schedule(sch)
        assert check.ok, check.reason
        assert check.final.imbalanced == 0
        assert len(sch) <= state.n**3

    @pytest.mark.parametrize("make", [lambda: j_state(12), lambda: s2d(2), lambda: j_prime(72), lambda: all_enmity(20)])
    def test_named_states(self, make):
        s = make()
        check = validate_schedule(bed_balancing_schedule(s))
        assert check.ok and check.final.imbalanced == 0

    def test_does_not_mutate(self):
        s = j_state(12)
        bed_balancing_schedule(s)
        assert s == j_state(12)


class TestReaching:
    def test_from_all_enmity(self):
        sch = ctd_reaching_schedule(all_enmity(48))
        check = validate_schedule(sch)
        assert check.ok and check.final == j_state(48)

    def test_from_target_is_empty(self):
        assert len(ctd_reaching_schedule(j_state(48))) == 0

    @pytest.mark.parametrize("n", [24, 36, 47, 48, 49, 50, 61])
    def test_random_sparse(self, n, rng):
        bound = n // 12 - 1
        for _ in range(5):
            check = validate_schedule(ctd_reaching_schedule(sparse_state(n, bound, rng)))
            assert check.ok, check.reason

    def test_phase_structure(self, rng):
        s = sparse_state(48, 3, rng)
        sch = ctd_reaching_schedule(s)
        cluster = np.repeat(np.arange(3), j_sizes(48))
        inside = [cluster[u] == cluster[v] for _, (u, v) in sch.steps]
        k = inside.count(True)
        assert all(inside[:k]) and not any(inside[k:])
        assert k == int(np.count_nonzero(np.triu((s.sign < 0) & (cluster[:, None] == cluster[None, :]), 1)))

    def test_preconditions(self, rng):
        with pytest.raises(ValueError):
            ctd_reaching_schedule(all_enmity(10))
        with pytest.raises(ValueError):
            ctd_reaching_schedule(sparse_state(48, 4, np.random.default_rng(0)))


class TestEscaping:
    def test_empty(self):
        r = escape_certificate(48, PerturbationSet(frozenset(), 3), range(5))
        assert r.ok and r.perturbation_size == 0

    def test_single_cross_edge_rank(self):
        # a cross-cluster enmity turned friendship: rank >= n/2 in S_n
        s = apply_perturbation(j_state(48), {(0, 20)})
        assert s.rank[0, 20] >= 24
        assert escape_certificate(48, PerturbationSet(frozenset({(0, 20)}), 3), range(5)).ok

    def test_random(self, rng):
        for _ in range(10):
            r = escape_certificate(48, sample_perturbation(48, 3, rng), range(10))
            assert r.ok, (r.static_violations, r.failures)

    def test_bound_enforced(self, rng):
        with pytest.raises(ValueError):
            escape_certificate(48, sample_perturbation(48, 4, rng), range(2))

    def test_reports_static_violation_below_bound(self, rng):
        # n = 24 allows one E0 edge per vertex; the certificate still runs and reports
        r = escape_certificate(24, sample_perturbation(24, 1, rng), range(3))
        assert r.runs == 3 and isinstance(r.to_json()["ok"], bool)


class TestRedFast:
    def test_reference_itself(self, rng):
        ref = random_balanced(20, rng)
        r = red_fast_check(ref, ref, range(3))
        assert r.ok and r.flips == [0, 0, 0]

    @pytest.mark.parametrize("plant, condition", [(plant_condition1, 1), (plant_condition2, 2)])
    def test_planted(self, plant, condition, rng):
        for _ in range(10):
            state, ref = plant(32, rng)
            r = red_fast_check(state, ref, range(5))
            assert red_fast_condition(state, ref) >= 1
            assert r.ok, r.failures
            assert all(f == r.initial_red for f in r.flips)

    def test_condition_classification(self, rng):
        state, ref = plant_condition1(32, rng)
        assert red_fast_condition(state, ref) == 1
        assert red_fast_condition(all_enmity(32), utopia(32)) == 0
        with pytest.raises(ValueError):
            red_fast_check(all_enmity(32), utopia(32), range(2))


class TestJammedFast:
    def test_small_batch(self):
        r = jammed_fast_check(72, range(5))
        assert r.ok, r.failures
        assert r.x == 16 and r.audits > 0

    def test_initial_audit(self):
        good, bad = good_bad_counts(j_prime(72), j_prime_reference(72))
        assert good.size == 400
        assert good.min() >= 32 and bad.max() <= 16
