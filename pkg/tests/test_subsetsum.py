"""Subset-sum search: instances, factor codebooks, solver, baselines."""

import math

import numpy as np
import pytest

from residuehd.resonator import ResonatorConfig
from residuehd.subsetsum import (
    SubsetSumInstance,
    benchmark,
    brute_force_baseline,
    build_factors,
    consecutive_triple_moduli,
    exact_baseline,
    generate_instance,
    load_instance,
    make_subsetsum_system,
    save_instance,
    solve,
)


@pytest.fixture(scope="module")
def sys200():
    return make_subsetsum_system(200, 1024, seed=60)


class TestInstance:
    def test_validation(self):
        with pytest.raises(ValueError):
            SubsetSumInstance(items=(3, -1), target=2)
        with pytest.raises(ValueError):
            SubsetSumInstance(items=(3, 4), target=8)
        with pytest.raises(ValueError):
            SubsetSumInstance(items=(3, 4), target=5, ground_truth=(0,))

    def test_ground_truth_accepted(self):
        inst = SubsetSumInstance(items=(3, 4, 5), target=8, ground_truth=(0, 2))
        assert inst.ground_truth == (0, 2)


class TestModuliChoice:
    def test_even_anchor_kept(self):
        assert consecutive_triple_moduli(200) == (199, 200, 201)

    def test_odd_anchor_bumped(self):
        triple = consecutive_triple_moduli(199)
        assert triple == (199, 200, 201)
        for i in range(3):
            for j in range(i + 1, 3):
                assert math.gcd(triple[i], triple[j]) == 1

    def test_all_returned_triples_coprime(self):
        for m in range(4, 40):
            a, b, c = consecutive_triple_moduli(m)
            assert math.gcd(a, b) == math.gcd(b, c) == math.gcd(a, c) == 1


class TestGenerate:
    def test_sum_bounded_by_half_range(self, sys200):
        for seed in range(10):
            inst = generate_instance(6, sys200, seed=seed)
            assert sum(inst.items) <= sys200.range_M / 2
            assert sum(inst.items[i] for i in inst.ground_truth) == inst.target

    def test_deterministic(self, sys200):
        a = generate_instance(8, sys200, seed=5)
        b = generate_instance(8, sys200, seed=5)
        assert a.items == b.items and a.target == b.target

    def test_too_many_items_rejected(self):
        tiny = make_subsetsum_system(4, 16, seed=0)  # M = 60
        with pytest.raises(ValueError):
            generate_instance(50, tiny, seed=0)


class TestFactors:
    def test_structure(self, sys200):
        S = (18, 4, 5, 10, 2, 23)
        books = build_factors(S, sys200)
        assert len(books) == 6
        assert sum(cb.n_entries for cb in books) == 12
        for cb, s in zip(books, S):
            assert cb.labels == (0, 1)
            assert np.allclose(cb.matrix[0], sys200.encode(0).values)
            assert np.allclose(cb.matrix[1], sys200.encode(s).values)

    def test_memory_footprint_linear(self, sys200):
        books = build_factors(tuple(range(1, 9)), sys200)
        total = sum(cb.matrix.size for cb in books)
        assert total == 2 * 8 * sys200.dim

    def test_selected_product_encodes_sum(self, sys200):
        from residuehd.phasor import hadamard

        S = (18, 4, 5, 10, 2, 23)
        books = build_factors(S, sys200)
        chosen = (1, 3, 5)
        v = None
        for k in range(len(S)):
            entry = sys200.encode(S[k]) if k in chosen else sys200.encode(0)
            v = entry if v is None else hadamard(v, entry)
        assert v == sys200.encode(sum(S[k] for k in chosen))


class TestSolve:
    def test_figure_instance(self, sys200):
        inst = SubsetSumInstance(items=(18, 4, 5, 10, 2, 23), target=21)
        res = solve(inst, sys200, ResonatorConfig(max_iters=30, max_restarts=19, seed=1))
        assert res.success
        assert sum(inst.items[i] for i in res.subset) == 21
        # brute force confirms (4, 5, 10, 2) is the unique solution
        assert brute_force_baseline(inst.items, 21) == (1, 2, 3, 4)
        assert res.subset == (1, 2, 3, 4)

    def test_zero_target_empty_subset(self, sys200):
        inst = SubsetSumInstance(items=(7, 11, 13), target=0)
        res = solve(inst, sys200, ResonatorConfig(max_iters=20, max_restarts=9, seed=2))
        assert res.success and res.subset == ()

    def test_full_sum_full_subset(self, sys200):
        items = (7, 11, 13)
        inst = SubsetSumInstance(items=items, target=31)
        res = solve(inst, sys200, ResonatorConfig(max_iters=20, max_restarts=9, seed=3))
        assert res.success and res.subset == (0, 1, 2)

    def test_unsolvable_instance_fails_loudly(self, sys200):
        inst = SubsetSumInstance(items=(2, 4), target=1)
        res = solve(inst, sys200, ResonatorConfig(max_iters=10, max_restarts=4, seed=4))
        assert not res.success
        assert res.subset is None
        assert res.attempts == 5
        assert len(res.attempt_successes) == 5

    def test_soundness_every_success_verifies(self, sys200):
        for seed in range(15):
            inst = generate_instance(8, sys200, seed=100 + seed)
            res = solve(inst, sys200, ResonatorConfig(max_iters=30, max_restarts=9, seed=seed))
            if res.success:
                assert sum(inst.items[i] for i in res.subset) == inst.target

    def test_range_violation_rejected(self):
        tiny = make_subsetsum_system(4, 64, seed=0)  # M = 60
        inst = SubsetSumInstance(items=(30, 29, 28), target=59)
        with pytest.raises(ValueError):
            solve(inst, tiny)


class TestExactBaseline:
    def test_agrees_with_enumerator(self):
        rng = np.random.default_rng(0)
        for trial in range(200):
            n = int(rng.integers(1, 13))
            items = [int(v) for v in rng.integers(1, 60, size=n)]
            pick = rng.integers(0, 2, size=n).astype(bool)
            # half the trials query a planted target, half a random one
            target = int(sum(np.array(items)[pick])) if trial % 2 == 0 else int(rng.integers(0, sum(items) + 2))
            dp = exact_baseline(items, target)
            bf = brute_force_baseline(items, target)
            assert (dp is None) == (bf is None)
            if dp is not None:
                assert sum(items[i] for i in dp) == target

    def test_no_solution(self):
        assert exact_baseline([2, 4], 1) is None

    def test_figure_instance(self):
        sol = exact_baseline([18, 4, 5, 10, 2, 23], 21)
        assert sol is not None
        assert sum([18, 4, 5, 10, 2, 23][i] for i in sol) == 21

    def test_validation(self):
        with pytest.raises(ValueError):
            exact_baseline([0, 3], 2)
        with pytest.raises(ValueError):
            brute_force_baseline(list(range(1, 30)), 5)


class TestInstanceFiles:
    def test_round_trip(self, tmp_path, sys200):
        inst = generate_instance(6, sys200, seed=42)
        path = tmp_path / "instance.json"
        save_instance(inst, path)
        loaded = load_instance(path)
        assert loaded.items == inst.items
        assert loaded.target == inst.target
        assert loaded.seed == inst.seed


class TestBenchmark:
    def test_shapes_and_soundness(self):
        out = benchmark(
            sizes=[4],
            D_values=[512],
            m=30,
            trials=6,
            seed=0,
            config=ResonatorConfig(max_iters=20, max_restarts=9),
        )
        assert len(out["summary"]) == 1
        rec = out["summary"][0]
        assert rec["n"] == 4 and rec["D"] == 512
        assert 0.0 <= rec["first_attempt_success"] <= 1.0
        curve = rec["success_by_attempt"]
        assert all(b >= a for a, b in zip(curve, curve[1:]))
        assert rec["mean_solve_seconds"] > 0
        assert len(out["results"]) == 6
        for row in out["results"]:
            if row["success"]:
                assert row["subset"] is not None
