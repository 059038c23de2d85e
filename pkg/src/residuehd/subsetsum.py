"""Subset-sum search over residue-encoded targets.

Each item S_k becomes a two-entry factor codebook {z(0), z(S_k)}, the
binary decision to leave the item out or add it in. A product of one
entry per factor encodes the sum of the included items, so a subset
summing to T is a factorization of z(T). The resonator searches the
2^|S| configurations with O(D * |S|) memory; every candidate it returns
is verified by exact integer arithmetic before being reported, and
failed attempts restart from fresh random phases (success probabilities
compose across restarts like independent trials).

The residue system must satisfy M > sum(S) so sums cannot wrap. Moduli
default to a consecutive triple {m-1, m, m+1} with m even, which is
pairwise co-prime (odd m makes m-1 and m+1 share a factor of 2).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .residue import ResidueSystem, make_residue_system
from .resonator import Codebook, ResonatorConfig, resonator_factorize

__all__ = [
    "SubsetSumInstance",
    "SubsetSumResult",
    "consecutive_triple_moduli",
    "make_subsetsum_system",
    "generate_instance",
    "build_factors",
    "solve",
    "exact_baseline",
    "brute_force_baseline",
    "benchmark",
    "save_instance",
    "load_instance",
]


@dataclass(frozen=True)
class SubsetSumInstance:
    """A multiset of positive integers, a target, and (optionally) a planted subset."""

    items: tuple[int, ...]
    target: int
    ground_truth: tuple[int, ...] | None = None  # item indices
    seed: int | None = None

    def __post_init__(self):
        items = tuple(int(s) for s in self.items)
        object.__setattr__(self, "items", items)
        if any(s <= 0 for s in items):
            raise ValueError("items must be positive integers")
        if not 0 <= self.target <= sum(items):
            raise ValueError(f"target {self.target} outside [0, {sum(items)}]")
        if self.ground_truth is not None:
            gt = tuple(sorted(int(i) for i in self.ground_truth))
            object.__setattr__(self, "ground_truth", gt)
            if len(set(gt)) != len(gt) or any(not 0 <= i < len(items) for i in gt):
                raise ValueError("ground truth must be distinct valid item indices")
            if sum(items[i] for i in gt) != self.target:
                raise ValueError("ground truth does not sum to the target")


@dataclass
class SubsetSumResult:
    success: bool
    subset: tuple[int, ...] | None  # item indices, verified to sum to the target
    restarts_used: int
    evaluations: int
    attempts: int
    attempt_successes: tuple[bool, ...]  # per-attempt verified outcome


def consecutive_triple_moduli(m: int) -> tuple[int, int, int]:
    """{m-1, m, m+1} with m adjusted upward until pairwise co-prime.

    Odd m fails (m-1 and m+1 are both even), so the first even m >= max(m, 4)
    is used.
    """
    m = max(int(m), 4)
    while True:
        triple = (m - 1, m, m + 1)
        if all(
            math.gcd(triple[i], triple[j]) == 1
            for i in range(3)
            for j in range(i + 1, 3)
        ):
            return triple
        m += 1


def make_subsetsum_system(m: int, D: int, seed: int) -> ResidueSystem:
    return make_residue_system(consecutive_triple_moduli(m), D, seed)


def save_instance(instance: SubsetSumInstance, path) -> None:
    doc = {"items": list(instance.items), "target": instance.target, "seed": instance.seed}
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh)


def load_instance(path) -> SubsetSumInstance:
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    return SubsetSumInstance(
        items=tuple(doc["items"]),
        target=int(doc["target"]),
        seed=None if doc.get("seed") is None else int(doc["seed"]),
    )


def generate_instance(n: int, sys: ResidueSystem, seed: int) -> SubsetSumInstance:
    """Random instance with a planted subset; item sizes scale to a max sum of M/2.

    Items are uniform on [1, M/(2n)] so any subset stays well inside the
    representable range [0, M).
    """
    if n < 1:
        raise ValueError(f"set size must be >= 1, got {n}")
    M = sys.range_M
    item_max = (M // 2) // n
    if item_max < 1:
        raise ValueError(f"range M={M} too small for {n} items")
    rng = np.random.default_rng(seed)
    items = tuple(int(v) for v in rng.integers(1, item_max + 1, size=n))
    include = rng.integers(0, 2, size=n).astype(bool)
    subset = tuple(int(i) for i in np.flatnonzero(include))
    target = sum(items[i] for i in subset)
    if sum(items) >= M:
        raise ValueError("generated items exceed the representable range")
    return SubsetSumInstance(items=items, target=target, ground_truth=subset, seed=int(seed))


def build_factors(S: Sequence[int], sys: ResidueSystem) -> list[Codebook]:
    """One two-entry codebook per item: label 0 -> z(0), label 1 -> z(S_k)."""
    zero = sys.encode(0)
    books = []
    for s in S:
        books.append(Codebook.from_vectors([zero, sys.encode(int(s))], [0, 1]))
    return books


def solve(
    instance: SubsetSumInstance,
    sys: ResidueSystem,
    config: ResonatorConfig | None = None,
) -> SubsetSumResult:
    """Search for any subset summing to the target; never returns unverified output.

    Runs up to 1 + max_restarts resonator attempts, each from fresh
    random phases, and accepts an attempt only when the decoded subset
    sums to the target in exact integer arithmetic.
    """
    if sum(instance.items) >= sys.range_M:
        raise ValueError("instance violates M > sum(S)")
    config = config or ResonatorConfig(max_iters=30, max_restarts=19)
    books = build_factors(instance.items, sys)
    target_vec = sys.encode(instance.target)
    evaluations = 0
    outcomes = []
    for attempt in range(1 + config.max_restarts):
        attempt_seed = (
            int(np.random.SeedSequence(config.seed, spawn_key=(attempt,)).generate_state(1)[0])
            if config.seed is not None
            else None
        )
        cfg = ResonatorConfig(
            alpha=config.alpha,
            max_iters=config.max_iters,
            max_restarts=0,
            schedule=config.schedule,
            seed=attempt_seed,
            init="random",
        )
        state = resonator_factorize(target_vec, books, cfg)
        evaluations += state.codebook_evaluations
        subset = tuple(int(i) for i in np.flatnonzero(np.asarray(state.labels)))
        verified = sum(instance.items[i] for i in subset) == instance.target
        outcomes.append(verified)
        if verified:
            return SubsetSumResult(
                success=True,
                subset=subset,
                restarts_used=attempt,
                evaluations=evaluations,
                attempts=attempt + 1,
                attempt_successes=tuple(outcomes),
            )
    return SubsetSumResult(
        success=False,
        subset=None,
        restarts_used=config.max_restarts,
        evaluations=evaluations,
        attempts=1 + config.max_restarts,
        attempt_successes=tuple(outcomes),
    )


def exact_baseline(S: Sequence[int], T: int):
    """Dynamic program over reachable sums; returns item indices or None.

    Reachability is tracked in a single big-int bitset (bit s set iff
    sum s is reachable), and the subset is reconstructed by walking the
    per-prefix bitsets backward.
    """
    S = [int(s) for s in S]
    if any(s <= 0 for s in S):
        raise ValueError("items must be positive integers")
    T = int(T)
    if T < 0:
        return None
    prefix = [1]
    mask = 1
    for s in S:
        mask |= mask << s
        prefix.append(mask)
    if not (mask >> T) & 1:
        return None
    chosen = []
    t = T
    for i in range(len(S), 0, -1):
        if (prefix[i - 1] >> t) & 1:
            continue
        chosen.append(i - 1)
        t -= S[i - 1]
    assert t == 0
    return tuple(sorted(chosen))


def brute_force_baseline(S: Sequence[int], T: int):
    """2^|S| enumeration, the oracle of oracles for small instances."""
    S = [int(s) for s in S]
    n = len(S)
    if n > 22:
        raise ValueError("brute force limited to |S| <= 22")
    for mask in range(1 << n):
        total = 0
        for i in range(n):
            if mask >> i & 1:
                total += S[i]
        if total == T:
            return tuple(i for i in range(n) if mask >> i & 1)
    return None


def benchmark(
    sizes: Sequence[int],
    D_values: Sequence[int],
    m: int = 200,
    trials: int = 50,
    seed: int = 0,
    config: ResonatorConfig | None = None,
) -> dict:
    """Accuracy and evaluation counts per (set size, dimension) cell.

    Returns {"summary": [...], "results": [...]}. Summaries report
    first-attempt success p, success within the restart budget, the
    per-attempt success curve, accuracy-normalized evaluations, mean
    wall-clock time (hardware-dependent, informational only), and the
    brute-force comparison count 2^|S| expressed in resonator-sweep
    units (each sweep costs 2|S| inner products). Result rows carry one
    solved/failed record per instance.
    """
    summary = []
    result_rows = []
    base_cfg = config or ResonatorConfig(max_iters=30, max_restarts=19)
    for D in D_values:
        for n in sizes:
            sys = make_subsetsum_system(m, D, int(np.random.SeedSequence(seed, spawn_key=(D, n, 0)).generate_state(1)[0]))
            results = []
            seconds = []
            for t in range(trials):
                inst_seed = int(np.random.SeedSequence(seed, spawn_key=(D, n, 1, t)).generate_state(1)[0])
                inst = generate_instance(n, sys, inst_seed)
                cfg = ResonatorConfig(**{**base_cfg.__dict__, "seed": inst_seed})
                t0 = time.perf_counter()
                res = solve(inst, sys, cfg)
                seconds.append(time.perf_counter() - t0)
                results.append(res)
                result_rows.append(
                    {
                        "n": int(n),
                        "D": int(D),
                        "instance_seed": inst_seed,
                        "target": inst.target,
                        "success": res.success,
                        "subset": None if res.subset is None else list(res.subset),
                        "restarts_used": res.restarts_used,
                        "evaluations": res.evaluations,
                    }
                )
            first = float(np.mean([r.attempt_successes[0] for r in results]))
            solved = float(np.mean([r.success for r in results]))
            curve = []
            max_t = max(len(r.attempt_successes) for r in results)
            for t in range(1, max_t + 1):
                curve.append(float(np.mean([any(r.attempt_successes[:t]) for r in results])))
            mean_evals = float(np.mean([r.evaluations for r in results]))
            summary.append(
                {
                    "n": int(n),
                    "D": int(D),
                    "moduli": list(sys.moduli),
                    "M": sys.range_M,
                    "trials": int(trials),
                    "first_attempt_success": first,
                    "success_within_budget": solved,
                    "success_by_attempt": curve,
                    "mean_evaluations": mean_evals,
                    "evals_per_success": mean_evals / solved if solved > 0 else float("inf"),
                    "brute_force_sweep_equivalents": (2**int(n)) / (2 * int(n)),
                    "restart_budget": 1 + base_cfg.max_restarts,
                    "mean_solve_seconds": float(np.mean(seconds)),
                }
            )
    return {"summary": summary, "results": result_rows}
