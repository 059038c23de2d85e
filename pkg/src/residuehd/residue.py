"""Residue number composition and carry-free vector arithmetic.

An integer x is represented by the Hadamard product of per-modulus
encodings over pairwise co-prime moduli m_1..m_K:

    z(x) = z_{m_1}(x) (.) z_{m_2}(x) (.) ... (.) z_{m_K}(x)

which is unique on [0, M) with M = prod m_k while storing only
b = sum m_k codebook vectors. Componentwise operations implement the
ring arithmetic:

    addition:        z(x1) (.) z(x2)          = z(x1 + x2)
    multiplication:  f(f(z_m(x1), z_m(x2)), y_m) per modulus, where f
                     multiplies phase indices mod m and y_m is the
                     anti-base of modular multiplicative inverses.

Multiplicative binding requires every modulus to be prime and every
base phase index nonzero. Division is not provided; see
:func:`multiply_by_constant_inverse` for the invertible-constant case.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .phasor import (
    ModulusBase,
    PhasorVector,
    conjugate,
    encode_integer,
    encode_rational,
    hadamard,
    sample_base,
)

__all__ = [
    "ResidueSystem",
    "AntiBase",
    "make_residue_system",
    "add",
    "subtract",
    "anti_base",
    "f_op",
    "multiply",
    "multiply_by_constant_inverse",
    "crt_reconstruct",
    "landau_g",
    "system_to_dict",
    "system_from_dict",
    "save_system",
    "load_system",
]

# index arithmetic is done in int64; bindings are safe while period^2 < 2^63
_MAX_EXACT_PERIOD = math.isqrt(2**63 - 1)


def _check_pairwise_coprime(moduli: Sequence[int]) -> None:
    for i in range(len(moduli)):
        for j in range(i + 1, len(moduli)):
            g = math.gcd(moduli[i], moduli[j])
            if g != 1:
                raise ValueError(
                    f"moduli {moduli[i]} and {moduli[j]} are not co-prime (gcd {g})"
                )


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


class ResidueSystem:
    """Pairwise co-prime moduli with one random base vector per modulus."""

    __slots__ = ("moduli", "dim", "seed", "nonzero_only", "bases")

    def __init__(self, moduli, bases, seed=None, nonzero_only=False):
        moduli = tuple(int(m) for m in moduli)
        if len(moduli) < 1:
            raise ValueError("need at least one modulus")
        for m in moduli:
            if m < 2:
                raise ValueError(f"modulus must be >= 2, got {m}")
        _check_pairwise_coprime(moduli)
        bases = tuple(bases)
        if len(bases) != len(moduli):
            raise ValueError("one base per modulus required")
        dims = {b.dim for b in bases}
        if len(dims) != 1:
            raise ValueError(f"bases disagree on dimension: {sorted(dims)}")
        for m, b in zip(moduli, bases):
            if b.modulus != m:
                raise ValueError(f"base modulus {b.modulus} does not match {m}")
        self.moduli = moduli
        self.bases = bases
        self.dim = bases[0].dim
        self.seed = seed
        self.nonzero_only = nonzero_only

    @property
    def range_M(self) -> int:
        return math.prod(self.moduli)

    @property
    def codebook_budget_b(self) -> int:
        return sum(self.moduli)

    def encode_factors(self, x: int) -> list[PhasorVector]:
        """Per-modulus exact encodings [z_{m_1}(x), ..., z_{m_K}(x)]."""
        return [encode_integer(b, x) for b in self.bases]

    def encode(self, x: int) -> PhasorVector:
        """Composed exact encoding with period M = prod(moduli)."""
        if self.range_M > _MAX_EXACT_PERIOD:
            raise ValueError(f"range M={self.range_M} exceeds exact index arithmetic limit")
        out = None
        for f in self.encode_factors(x):
            out = f if out is None else hadamard(out, f)
        return out

    def encode_rational(self, q: float) -> PhasorVector:
        """Dense composed encoding of a real/rational value."""
        out = None
        for b in self.bases:
            f = encode_rational(b, q)
            out = f if out is None else hadamard(out, f)
        return out

    def __repr__(self):
        return f"ResidueSystem(moduli={self.moduli}, D={self.dim}, M={self.range_M})"


def make_residue_system(moduli, D: int, seed: int, nonzero_only: bool = False) -> ResidueSystem:
    """Sample K independent bases, one per modulus, from a single root seed.

    Child seeds are derived deterministically, so (moduli, D, seed,
    nonzero_only) fully reproduces the system.
    """
    moduli = tuple(int(m) for m in moduli)
    bases = []
    for k, m in enumerate(moduli):
        child = _child_seed(seed, k)
        bases.append(sample_base(m, D, child, nonzero_only=nonzero_only))
    return ResidueSystem(moduli, bases, seed=int(seed), nonzero_only=nonzero_only)


def _child_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(k,)).generate_state(1)[0])


def add(sys: ResidueSystem, a: PhasorVector, b: PhasorVector) -> PhasorVector:
    """z(x1) (.) z(x2) = z(x1 + x2 mod M), bit-exact on exact forms."""
    return hadamard(a, b)


def subtract(sys: ResidueSystem, a: PhasorVector, b: PhasorVector) -> PhasorVector:
    """z(x1) (.) conj(z(x2)) = z(x1 - x2 mod M)."""
    return hadamard(a, conjugate(b))


@dataclass(frozen=True, eq=False)
class AntiBase:
    """Componentwise modular multiplicative inverses of a base's indices."""

    modulus: int
    inverse_indices: np.ndarray

    def as_vector(self) -> PhasorVector:
        return PhasorVector.exact(self.inverse_indices, self.modulus)


def anti_base(base: ModulusBase) -> AntiBase:
    """v_j = u_j^(-1) mod m. Requires a prime modulus and nonzero indices."""
    m = base.modulus
    if not _is_prime(m):
        raise ValueError(f"anti-base requires a prime modulus, got {m}")
    if np.any(base.phase_indices == 0):
        raise ValueError("anti-base requires all phase indices nonzero (sample with nonzero_only)")
    inv_table = np.zeros(m, dtype=np.int64)
    for u in range(1, m):
        inv_table[u] = pow(u, -1, m)
    return AntiBase(modulus=m, inverse_indices=inv_table[base.phase_indices])


def f_op(a: PhasorVector, b: PhasorVector, table: np.ndarray | None = None) -> PhasorVector:
    """Discrete phase multiplication: indices r, s map to (r * s) mod m.

    Both inputs must be exact with the same period. When `table` is given
    (an m x m product lookup from :func:`f_op_table`) indices are mapped
    through it instead of multiplied; both paths agree bit-exactly.
    """
    if not (a.is_exact and b.is_exact):
        raise ValueError("f_op is defined on exact-form vectors only")
    if a.period != b.period:
        raise ValueError(f"period mismatch: {a.period} vs {b.period}")
    if table is not None:
        idx = table[a.indices, b.indices]
    else:
        idx = (a.indices * b.indices) % a.period
    return PhasorVector.exact(idx, a.period)


def f_op_table(m: int) -> np.ndarray:
    """Precomputed m x m index-product table for :func:`f_op`."""
    r = np.arange(m, dtype=np.int64)
    return (r[:, None] * r[None, :]) % m


def multiply(sys: ResidueSystem, a, b, config=None) -> PhasorVector:
    """Multiplicative binding: z(x1) * z(x2) -> z(x1 * x2 mod M).

    Two input modes:

    * per-modulus factor lists (the exact, primary path): `a` and `b`
      are sequences of K exact vectors as returned by
      :meth:`ResidueSystem.encode_factors`;
    * composed vectors: `a` and `b` are single PhasorVectors, and a
      resonator factorization recovers the per-modulus factors first
      (`config` is an optional resonator configuration).

    All moduli must be prime and bases sampled with nonzero_only.
    """
    for m in sys.moduli:
        if not _is_prime(m):
            raise ValueError(f"multiplicative binding requires prime moduli, got {m}")
    if isinstance(a, PhasorVector) or isinstance(b, PhasorVector):
        if not (isinstance(a, PhasorVector) and isinstance(b, PhasorVector)):
            raise ValueError("mix of composed vector and factor list is not supported")
        a = _recover_factors(sys, a, config)
        b = _recover_factors(sys, b, config)
    a = list(a)
    b = list(b)
    if len(a) != len(sys.moduli) or len(b) != len(sys.moduli):
        raise ValueError("need one factor vector per modulus")
    out = None
    for base, fa, fb in zip(sys.bases, a, b):
        if fa.period != base.modulus or fb.period != base.modulus:
            raise ValueError("factor period does not match its modulus")
        y = anti_base(base).as_vector()
        part = f_op(f_op(fa, fb), y)
        out = part if out is None else hadamard(out, part)
    return out


def _recover_factors(sys: ResidueSystem, v: PhasorVector, config) -> list[PhasorVector]:
    from .resonator import ResonatorConfig, build_residue_codebooks, resonator_factorize

    cfg = config if config is not None else ResonatorConfig()
    state = resonator_factorize(v, build_residue_codebooks(sys), cfg)
    if not state.converged:
        raise RuntimeError("resonator failed to factorize composed operand")
    return [encode_integer(base, r) for base, r in zip(sys.bases, state.labels)]


def multiply_by_constant_inverse(sys: ResidueSystem, v: PhasorVector, c: int) -> PhasorVector:
    """z(x) -> z(x * c^(-1) mod M) for a known constant c with gcd(c, M) = 1.

    Covers the invertible prime-modulus case only; general division is
    undefined in a residue system.
    """
    M = sys.range_M
    if not v.is_exact or v.period != M:
        raise ValueError("expected an exact composed vector with period M")
    if math.gcd(c % M, M) != 1:
        raise ValueError(f"constant {c} is not invertible modulo {M}")
    w = pow(c % M, -1, M)
    return PhasorVector.exact((v.indices * w) % M, M)


def crt_reconstruct(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Unique x in [0, M) with x = r_k (mod m_k) for all k."""
    residues = [int(r) for r in residues]
    moduli = [int(m) for m in moduli]
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli must have the same length")
    _check_pairwise_coprime(moduli)
    M = math.prod(moduli)
    x = 0
    for r, m in zip(residues, moduli):
        if not 0 <= r < m:
            raise ValueError(f"residue {r} out of range for modulus {m}")
        Mi = M // m
        x += r * Mi * pow(Mi, -1, m)
    return x % M


_LANDAU_MAX = 60


def landau_g(b: int) -> int:
    """Landau's function: the maximum lcm over integer partitions of b.

    Exact enumeration (the optimum is attained by pairwise co-prime prime
    powers padded with 1s); rejects b > 60 rather than approximating.
    """
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    if b > _LANDAU_MAX:
        raise ValueError(f"landau_g supports b <= {_LANDAU_MAX}, got {b}")
    primes = [p for p in range(2, b + 1) if _is_prime(p)]
    dp = [1] * (b + 1)
    for p in primes:
        for j in range(b, p - 1, -1):
            best = dp[j]
            q = p
            while q <= j:
                cand = dp[j - q] * q
                if cand > best:
                    best = cand
                q *= p
            dp[j] = best
    return max(dp)


# --- serialization ------------------------------------------------------

_SYSTEM_FORMAT = "residuehd/residue-system"
_SYSTEM_VERSION = 1


def system_to_dict(sys: ResidueSystem) -> dict:
    return {
        "format": _SYSTEM_FORMAT,
        "version": _SYSTEM_VERSION,
        "moduli": list(sys.moduli),
        "dim": sys.dim,
        "seeds": [b.seed for b in sys.bases],
        "nonzero_only": sys.nonzero_only,
    }


def system_from_dict(d: dict) -> ResidueSystem:
    if d.get("format") != _SYSTEM_FORMAT:
        raise ValueError(f"not a residue-system record: {d.get('format')!r}")
    if d.get("version") != _SYSTEM_VERSION:
        raise ValueError(f"unsupported residue-system version: {d.get('version')!r}")
    moduli = [int(m) for m in d["moduli"]]
    nonzero = bool(d["nonzero_only"])
    bases = [
        sample_base(m, int(d["dim"]), int(s), nonzero_only=nonzero)
        for m, s in zip(moduli, d["seeds"])
    ]
    return ResidueSystem(moduli, bases, seed=None, nonzero_only=nonzero)


def save_system(sys: ResidueSystem, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(system_to_dict(sys), fh)


def load_system(path) -> ResidueSystem:
    with open(path, "r", encoding="ascii") as fh:
        return system_from_dict(json.load(fh))
