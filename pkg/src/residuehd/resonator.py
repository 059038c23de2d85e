"""Resonator-network factorization and decoding.

A vector composed as a Hadamard product of one codebook entry per
factor is pulled apart by iterating, one factor at a time,

    est_j <- g( Z_j Z_j^H ( v (.) prod_{i != j} conj(est_i) ) )

where Z_j stacks factor j's codebook entries and g projects every
component back onto the unit circle. The loop runs asynchronous sweeps
(each factor once per sweep) until the cosine similarity between
successive full states reaches a threshold alpha.

Decoding a residue-encoded integer is factorization over the
per-modulus codebooks followed by Chinese-remainder reconstruction;
this costs sum(m_k) inner products per sweep instead of the prod(m_k)
of brute-force codebook decoding.

Also here: sub-integer decoding (the resonator's fixed points retain
fractional phase information even though codebooks hold only integer
encodings), the bits-per-vector information score, and the capacity /
noise sweep used to map how far a given dimension can be pushed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .phasor import NoiseModel, PhasorVector, add_phase_noise, encode_integer
from .residue import ResidueSystem, crt_reconstruct, make_residue_system

__all__ = [
    "Codebook",
    "ResonatorConfig",
    "ResonatorState",
    "build_residue_codebooks",
    "codebook_decode",
    "resonator_step",
    "resonator_factorize",
    "decode_residue_number",
    "sub_integer_decode",
    "bits_per_vector",
    "decode_accuracy",
    "capacity_experiment",
    "subinteger_experiment",
    "subinteger_overlay",
    "CapacityPoint",
    "CapacityResult",
    "consecutive_primes",
]


class Codebook:
    """Reference encodings with known labels, stacked as matrix rows."""

    __slots__ = ("matrix", "labels")

    def __init__(self, matrix: np.ndarray, labels: Sequence):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.ndim != 2:
            raise ValueError("codebook matrix must be 2-D (entries, dim)")
        labels = tuple(labels)
        if len(labels) != matrix.shape[0]:
            raise ValueError("one label per codebook entry required")
        if len(set(labels)) != len(labels):
            raise ValueError("codebook labels must be unique")
        self.matrix = matrix
        self.labels = labels

    @classmethod
    def from_vectors(cls, vectors: Sequence[PhasorVector], labels: Sequence) -> "Codebook":
        return cls(np.stack([v.values for v in vectors]), labels)

    @property
    def n_entries(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __repr__(self):
        return f"Codebook(n={self.n_entries}, D={self.dim})"


@dataclass
class ResonatorConfig:
    """Knobs for the factorization loop.

    alpha is the successive-state similarity threshold for convergence;
    verify additionally checks the composed product against the input
    (cosine >= verify_threshold) and restarts when the network settled
    on a fixed point that does not reproduce the input. init chooses
    the first attempt's estimates: "random" phases (default) or the
    unweighted "superposition" of each codebook, kept for ablation (for
    a full modular codebook that sum cancels to roughly the identity
    vector, which measurably slows convergence); restarts always use
    fresh random phases.
    """

    alpha: float = 0.95
    max_iters: int = 50
    max_restarts: int = 0
    schedule: tuple[int, ...] | None = None
    seed: int | None = None
    init: str = "random"
    verify: bool = False
    verify_threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if self.init not in ("superposition", "random"):
            raise ValueError(f"unknown init mode {self.init!r}")


@dataclass
class ResonatorState:
    """Per-factor estimates plus convergence and cost bookkeeping."""

    estimates: np.ndarray  # (K, D) complex, unit magnitude
    iteration: int = 0  # completed sweeps (cumulative across restarts)
    converged: bool = False
    codebook_evaluations: int = 0
    restarts_used: int = 0
    final_similarity: float = 0.0  # last successive-state similarity
    labels: tuple | None = None  # decoded label per factor
    label_idx: np.ndarray | None = None  # argmax row per factor

    @property
    def n_factors(self) -> int:
        return self.estimates.shape[0]

    def composed(self) -> np.ndarray:
        """Hadamard product of the current factor estimates."""
        return np.prod(self.estimates, axis=0)


def build_residue_codebooks(sys: ResidueSystem) -> list[Codebook]:
    """One codebook per modulus: entries z_m(0) .. z_m(m-1), labels 0..m-1."""
    books = []
    for base in sys.bases:
        vecs = [encode_integer(base, r) for r in range(base.modulus)]
        books.append(Codebook.from_vectors(vecs, list(range(base.modulus))))
    return books


def codebook_decode(v, codebook: Codebook, state: ResonatorState | None = None):
    """Label of the entry with the largest real inner product with v.

    Ties go to the lowest label. When a state is passed, its evaluation
    counter grows by the codebook size.
    """
    vals = v.values if isinstance(v, PhasorVector) else np.asarray(v)
    if vals.shape[0] != codebook.dim:
        raise ValueError(f"dimension mismatch: {vals.shape[0]} vs {codebook.dim}")
    scores = (codebook.matrix.conj() @ vals).real
    if state is not None:
        state.codebook_evaluations += codebook.n_entries
    best = np.flatnonzero(scores == scores.max())
    return min(codebook.labels[i] for i in best)


def _unit_normalize(vals: np.ndarray) -> np.ndarray:
    mags = np.abs(vals)
    return np.where(mags > 0.0, vals / np.where(mags > 0.0, mags, 1.0), 1.0 + 0.0j)


def _step_inplace(v_vals, state: ResonatorState, codebooks, j: int) -> None:
    est = state.estimates
    residual = v_vals.copy()
    for i in range(est.shape[0]):
        if i != j:
            residual *= est[i].conj()
    coeffs = codebooks[j].matrix.conj() @ residual
    cleaned = coeffs @ codebooks[j].matrix
    est[j] = _unit_normalize(cleaned)
    state.codebook_evaluations += codebooks[j].n_entries
    if state.label_idx is None:
        state.label_idx = np.zeros(est.shape[0], dtype=np.int64)
    # factor estimates settle only up to a global phase per factor (the
    # rotations cancel in the composed product), so the per-factor label
    # uses the gauge-invariant coefficient magnitude
    state.label_idx[j] = int(np.argmax(np.abs(coeffs)))


def resonator_step(v, state: ResonatorState, codebooks: Sequence[Codebook], j: int) -> ResonatorState:
    """Update factor j in place from the input and the other estimates."""
    vals = v.values if isinstance(v, PhasorVector) else np.asarray(v)
    if vals.shape[0] != state.estimates.shape[1]:
        raise ValueError("input dimension does not match state")
    if not 0 <= j < state.estimates.shape[0]:
        raise ValueError(f"factor index {j} out of range")
    _step_inplace(vals, state, codebooks, j)
    return state


def _superposition_init(codebooks) -> np.ndarray:
    return np.stack([_unit_normalize(cb.matrix.sum(axis=0)) for cb in codebooks])


def _random_init(codebooks, rng) -> np.ndarray:
    D = codebooks[0].dim
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(len(codebooks), D))
    return np.exp(1j * phases)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.real(np.vdot(a, b)) / (na * nb))


def resonator_factorize(v, codebooks: Sequence[Codebook], config: ResonatorConfig | None = None) -> ResonatorState:
    """Run asynchronous sweeps until the state settles, restarting on demand.

    Returns a state whose `converged` flag reports whether any attempt
    reached the similarity threshold (and passed verification when
    enabled). A failed run still carries the best estimates seen, with
    converged False, never a silent wrong claim.
    """
    config = config or ResonatorConfig()
    codebooks = list(codebooks)
    if not codebooks:
        raise ValueError("need at least one codebook")
    K = len(codebooks)
    D = codebooks[0].dim
    if any(cb.dim != D for cb in codebooks):
        raise ValueError("codebooks disagree on dimension")
    v_vals = v.values if isinstance(v, PhasorVector) else np.asarray(v, dtype=np.complex128)
    if v_vals.shape[0] != D:
        raise ValueError(f"input dimension {v_vals.shape[0]} does not match codebooks ({D})")
    schedule = config.schedule if config.schedule is not None else tuple(range(K))
    if sorted(schedule) != list(range(K)):
        raise ValueError("schedule must visit every factor exactly once")

    seed_root = np.random.SeedSequence(config.seed)
    state = ResonatorState(estimates=np.empty((K, D), dtype=np.complex128))
    best = None  # (quality, estimates, label_idx)

    for attempt in range(1 + config.max_restarts):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(attempt,))
                                    if config.seed is not None else seed_root.spawn(1)[0])
        if attempt == 0 and config.init == "superposition":
            state.estimates = _superposition_init(codebooks)
        else:
            state.estimates = _random_init(codebooks, rng)
        state.restarts_used = attempt
        reached_alpha = False
        for _ in range(config.max_iters):
            prev = state.estimates.copy()
            for j in schedule:
                _step_inplace(v_vals, state, codebooks, j)
            state.iteration += 1
            sim = float(np.real(np.vdot(prev.ravel(), state.estimates.ravel())) / (K * D))
            state.final_similarity = sim
            if sim >= config.alpha:
                reached_alpha = True
                break
        quality = _cosine(state.composed(), v_vals)
        if reached_alpha and (not config.verify or quality >= config.verify_threshold):
            state.converged = True
            state.labels = tuple(
                codebooks[j].labels[int(state.label_idx[j])] for j in range(K)
            )
            return state
        if best is None or quality > best[0]:
            best = (quality, state.estimates.copy(), None if state.label_idx is None else state.label_idx.copy())

    state.converged = False
    state.estimates = best[1]
    state.label_idx = best[2]
    state.labels = (
        None
        if state.label_idx is None
        else tuple(codebooks[j].labels[int(state.label_idx[j])] for j in range(K))
    )
    return state


def decode_residue_number(
    sys: ResidueSystem,
    v,
    config: ResonatorConfig | None = None,
    codebooks: Sequence[Codebook] | None = None,
):
    """Factorize a composed encoding and CRT-reconstruct x in [0, M).

    Returns (x, state); inspect state.converged before trusting x.
    Pass prebuilt codebooks to amortize their construction over trials.
    """
    books = codebooks if codebooks is not None else build_residue_codebooks(sys)
    state = resonator_factorize(v, books, config)
    if state.labels is None:
        return None, state
    return crt_reconstruct(state.labels, sys.moduli), state


def sub_integer_decode(
    sys: ResidueSystem,
    v,
    r: int,
    config: ResonatorConfig | None = None,
    codebooks: Sequence[Codebook] | None = None,
):
    """Decode a rational encoded on the grid of r partitions per unit.

    Three steps: run the resonator to a fixed point over the integer
    codebooks, find the nearest integer codebook entries per modulus
    and reconstruct candidate anchor integers, then codebook-decode the
    input against the encodings of all fractional grid values within
    range 1 of each anchor. Returns (value, state) with value a
    Fraction reduced into [0, M).

    A fractional value midway between integers makes "nearest" ambiguous
    per modulus, and mixing rounding directions across moduli would CRT
    to a far-off anchor, so the two top entries per modulus are combined
    into the consistent anchor candidates and scored jointly.
    """
    if r < 1:
        raise ValueError(f"partitions must be >= 1, got {r}")
    books = codebooks if codebooks is not None else build_residue_codebooks(sys)
    state = resonator_factorize(v, books, config)
    if state.labels is None:
        return None, state
    v_vals = v.values if isinstance(v, PhasorVector) else np.asarray(v)
    M = sys.range_M
    K = len(books)
    # nearest and runner-up integer per modulus, by gauge-invariant magnitude
    top2 = []
    for j in range(K):
        residual = v_vals.copy()
        for i in range(K):
            if i != j:
                residual *= state.estimates[i].conj()
        coeffs = np.abs(books[j].matrix.conj() @ residual)
        state.codebook_evaluations += books[j].n_entries
        order = np.argsort(-coeffs)
        top2.append([int(order[0])] if books[j].n_entries == 1 else [int(order[0]), int(order[1])])
    anchors = sorted(
        {
            crt_reconstruct([combo[j] for j in range(K)], sys.moduli)
            for combo in _combinations(top2)
        }
    )
    offsets = [Fraction(j, r) for j in range(-(r - 1), r)]
    best_value, best_score = None, -np.inf
    for anchor in anchors:
        for off in offsets:
            cand = sys.encode_rational(anchor + off.numerator / off.denominator)
            score = float(np.mean(np.real(v_vals * np.conj(cand.values))))
            state.codebook_evaluations += 1
            if score > best_score:
                best_value, best_score = anchor + off, score
    return Fraction(best_value.numerator % (M * best_value.denominator), best_value.denominator), state


def _combinations(choices_per_slot):
    if not choices_per_slot:
        yield []
        return
    for head in choices_per_slot[0]:
        for tail in _combinations(choices_per_slot[1:]):
            yield [head] + tail


def subinteger_overlay(
    sys: ResidueSystem,
    q: float,
    config: ResonatorConfig | None = None,
):
    """Converged-state inner products next to their kernel prediction.

    For a fractional input, the magnitude of the inner product between
    the settled factor state and integer entry r should follow the
    sinc-comb kernel |K_m(q - r)|. Returns (modulus, entry, measured,
    predicted) rows for plotting; qualitative, no tolerance attached.
    """
    from .kernels import analytic_kernel

    books = build_residue_codebooks(sys)
    v = sys.encode_rational(q)
    state = resonator_factorize(v, books, config or ResonatorConfig(max_iters=50))
    rows = []
    for j, (base, book) in enumerate(zip(sys.bases, books)):
        coeffs = np.abs(book.matrix.conj() @ state.estimates[j]) / sys.dim
        for r in range(base.modulus):
            predicted = abs(analytic_kernel(base.modulus, q - r))
            rows.append((base.modulus, r, float(coeffs[r]), float(predicted)))
    return rows


def bits_per_vector(a: float, P: int) -> float:
    """Information decoded per vector at accuracy a over P states.

    a log2(P a) + (1-a) log2(P (1-a) / (P-1)); zero at chance (a = 1/P),
    log2(P) at a = 1, with the a -> 0 and a -> 1 limits built in.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"accuracy must be in [0, 1], got {a}")
    if P < 2:
        raise ValueError(f"search space must be >= 2, got {P}")
    out = 0.0
    if a > 0.0:
        out += a * math.log2(P * a)
    if a < 1.0:
        out += (1.0 - a) * math.log2(P / (P - 1) * (1.0 - a))
    return out


# --- experiments ----------------------------------------------------------


def consecutive_primes(start: int, count: int) -> list[int]:
    """The first `count` primes >= start."""
    out = []
    n = max(2, start)
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n += 1
    return out


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _trial_seeds(seed: int, key: tuple[int, ...], n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed, spawn_key=key).generate_state(n)]


def decode_accuracy(
    sys: ResidueSystem,
    trials: int,
    kappa: float = math.inf,
    seed: int = 0,
    config: ResonatorConfig | None = None,
    threads: int = 1,
):
    """Round-trip decode accuracy over random integers, with optional phase noise.

    Returns (accuracy, mean_evaluations). Deterministic per seed and
    independent of the thread count.

    Without an explicit config, clean-input runs verify the composed
    product against the input and restart stuck attempts (the mismatch
    is unmistakable, roughly 0.1 vs 1.0 cosine); noisy runs skip
    verification because a correct fixed point only matches the noisy
    input at about I1(kappa)/I0(kappa), which can sit below any fixed
    threshold.
    """
    M = sys.range_M
    books = build_residue_codebooks(sys)
    base_cfg = config or ResonatorConfig(max_iters=30, max_restarts=3, verify=math.isinf(kappa))

    def run(t: int):
        s_x, s_noise, s_res = _trial_seeds(seed, (t,), 3)
        x = int(np.random.default_rng(s_x).integers(M))
        vec = sys.encode(x)
        if not math.isinf(kappa):
            vec = add_phase_noise(vec, NoiseModel(kappa, s_noise))
        cfg = ResonatorConfig(**{**base_cfg.__dict__, "seed": s_res})
        decoded, st = decode_residue_number(sys, vec, cfg, codebooks=books)
        return (decoded == x), st.codebook_evaluations

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, range(trials)))
    else:
        results = [run(t) for t in range(trials)]
    acc = float(np.mean([ok for ok, _ in results]))
    mean_evals = float(np.mean([ev for _, ev in results]))
    return acc, mean_evals


@dataclass
class CapacityPoint:
    moduli: tuple[int, ...]
    M: int
    accuracy: float
    mean_evaluations: float
    trials: int


@dataclass
class CapacityResult:
    D: int
    K: int
    kappa: float
    accuracy_threshold: float
    points: list[CapacityPoint] = field(default_factory=list)

    @property
    def capacity(self) -> int:
        """Largest tested range with accuracy at or above the threshold."""
        passing = [p.M for p in self.points if p.accuracy >= self.accuracy_threshold]
        return max(passing) if passing else 0

    def capacity_interpolated(self) -> float:
        """Threshold crossing of the accuracy curve, interpolated in log M.

        Less quantized than :attr:`capacity` when the prime windows are
        coarse: the crossing between the last window at or above the
        threshold and the next one below it is located on a log-M line.
        """
        thr = self.accuracy_threshold
        passing = [i for i, p in enumerate(self.points) if p.accuracy >= thr]
        if not passing:
            return 0.0
        i = max(passing)
        if i + 1 >= len(self.points):
            return float(self.points[i].M)
        lo, hi = self.points[i], self.points[i + 1]
        if lo.accuracy == hi.accuracy:
            return float(lo.M)
        frac = (lo.accuracy - thr) / (lo.accuracy - hi.accuracy)
        return float(math.exp(math.log(lo.M) + frac * math.log(hi.M / lo.M)))


def capacity_experiment(
    D: int,
    K: int,
    kappa: float = math.inf,
    accuracy_threshold: float = 0.95,
    stop_threshold: float | None = None,
    trials: int = 100,
    seed: int = 0,
    config: ResonatorConfig | None = None,
    growth: float = 1.5,
    max_M: int | None = None,
    threads: int = 1,
) -> CapacityResult:
    """Sweep K-consecutive-prime moduli windows upward in M and measure accuracy.

    Windows slide along the ascending prime list; to keep runtime sane
    the next measured window is the first one whose M grows by at least
    `growth`. The sweep stops once accuracy falls below stop_threshold
    (default: the accuracy threshold itself) or M exceeds max_M.
    """
    if stop_threshold is None:
        stop_threshold = accuracy_threshold
    result = CapacityResult(D=D, K=K, kappa=kappa, accuracy_threshold=accuracy_threshold)
    primes = consecutive_primes(2, K + 64)
    widx = 0
    last_M = 0
    window_number = 0
    while True:
        while widx + K > len(primes):
            primes += consecutive_primes(primes[-1] + 1, 64)
        moduli = tuple(primes[widx : widx + K])
        M = math.prod(moduli)
        if M < max(2, math.ceil(last_M * growth)):
            widx += 1
            continue
        if max_M is not None and M > max_M:
            break
        sys_seed = _trial_seeds(seed, (window_number, 0), 1)[0]
        sys = make_residue_system(moduli, D, sys_seed)
        acc, mean_evals = decode_accuracy(
            sys, trials, kappa=kappa, seed=_trial_seeds(seed, (window_number, 1), 1)[0],
            config=config, threads=threads,
        )
        result.points.append(
            CapacityPoint(moduli=moduli, M=M, accuracy=acc, mean_evaluations=mean_evals, trials=trials)
        )
        if acc < stop_threshold:
            break
        last_M = M
        widx += 1
        window_number += 1
    return result


def subinteger_experiment(
    sys: ResidueSystem,
    r: int,
    trials: int,
    kappa: float = math.inf,
    seed: int = 0,
    config: ResonatorConfig | None = None,
):
    """Accuracy and bits-per-vector for decoding values on the r-partition grid.

    Each trial draws x uniform on [0, M) and an offset j/r, encodes
    x + j/r, optionally adds phase noise, and requires the decoded
    Fraction to match exactly. Returns (accuracy, bits, P).
    """
    M = sys.range_M
    P = M * r
    books = build_residue_codebooks(sys)
    base_cfg = config or ResonatorConfig(max_iters=30)
    hits = 0
    for t in range(trials):
        s_x, s_noise, s_res = _trial_seeds(seed, (t,), 3)
        rng = np.random.default_rng(s_x)
        truth = Fraction(int(rng.integers(M)) * r + int(rng.integers(r)), r)
        vec = sys.encode_rational(float(truth))
        if not math.isinf(kappa):
            vec = add_phase_noise(vec, NoiseModel(kappa, s_noise))
        cfg = ResonatorConfig(**{**base_cfg.__dict__, "seed": s_res})
        decoded, _ = sub_integer_decode(sys, vec, r, cfg, codebooks=books)
        if decoded == truth:
            hits += 1
    acc = hits / trials
    return acc, bits_per_vector(acc, P), P
