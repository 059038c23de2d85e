"""Random phasor base vectors and the encoding substrate.

A code vector is a list of D unit-magnitude complex numbers (phasors).
Integers are encoded by componentwise exponentiation of a random base
vector whose phases are m-th roots of unity:

    base:        z = [e^{i 2pi u_1 / m}, ..., e^{i 2pi u_D / m}],  u_j in Z_m
    encoding:    z(x) = z^x, so component j carries phase index (u_j * x) mod m
    similarity:  K(a, b) = (1/D) Re <a, conj(b)>

Two concrete vector forms share these semantics:

* exact form: integer phase indices modulo a common period L. All
  integer algebra (binding, conjugation, composition) stays in integer
  arithmetic and is therefore bit-exact.
* dense form: complex float components, used for rational encodings and
  for vectors carrying phase noise.

Binding two exact vectors with periods L1, L2 yields period lcm(L1, L2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhasorVector",
    "ModulusBase",
    "NoiseModel",
    "sample_base",
    "encode_integer",
    "encode_rational",
    "similarity",
    "hadamard",
    "conjugate",
    "phase_normalize",
    "add_phase_noise",
    "identity_vector",
    "base_to_dict",
    "base_from_dict",
    "save_base",
    "load_base",
]

_UNIT_TOL = 1e-9


class PhasorVector:
    """A D-dimensional vector of unit-magnitude complex components.

    Construct with :meth:`exact` (integer phase indices mod a period) or
    :meth:`dense` (complex components). Equality is bitwise: two exact
    vectors are equal iff periods and index arrays match, two dense
    vectors iff their component arrays match exactly.
    """

    __slots__ = ("_indices", "_period", "_values")

    def __init__(self, indices, period, values):
        self._indices = indices
        self._period = period
        self._values = values

    @classmethod
    def exact(cls, indices, period: int) -> "PhasorVector":
        """Vector with component j at phase 2*pi*indices[j]/period."""
        if period < 1:
            raise ValueError(f"period must be >= 1, got {period}")
        idx = np.asarray(indices, dtype=np.int64) % period
        return cls(idx, int(period), None)

    @classmethod
    def dense(cls, values, validate: bool = True) -> "PhasorVector":
        """Vector from complex components, checked to unit magnitude."""
        vals = np.asarray(values, dtype=np.complex128)
        if validate:
            mags = np.abs(vals)
            if mags.size and (np.min(mags) < 1.0 - _UNIT_TOL or np.max(mags) > 1.0 + _UNIT_TOL):
                raise ValueError("dense phasor components must have unit magnitude")
        return cls(None, None, vals)

    @property
    def dim(self) -> int:
        return self._indices.shape[0] if self._indices is not None else self._values.shape[0]

    @property
    def is_exact(self) -> bool:
        return self._indices is not None

    @property
    def period(self) -> int:
        if not self.is_exact:
            raise AttributeError("dense vectors have no integer period")
        return self._period

    @property
    def indices(self) -> np.ndarray:
        if not self.is_exact:
            raise AttributeError("dense vectors have no phase indices")
        return self._indices

    @property
    def values(self) -> np.ndarray:
        """Complex components; computed from indices for exact vectors."""
        if self._values is None:
            angles = self._indices * (2.0 * np.pi / self._period)
            self._values = np.exp(1j * angles)
        return self._values

    def to_dense(self) -> "PhasorVector":
        return PhasorVector.dense(self.values, validate=False)

    def __eq__(self, other):
        if not isinstance(other, PhasorVector):
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self._period == other._period and np.array_equal(self._indices, other._indices)
        if not self.is_exact and not other.is_exact:
            return np.array_equal(self._values, other._values)
        return False

    def __repr__(self):
        form = f"exact, period={self._period}" if self.is_exact else "dense"
        return f"PhasorVector(dim={self.dim}, {form})"


@dataclass(frozen=True, eq=False)
class ModulusBase:
    """Random base vector for one modulus: D phase indices u_j in Z_m."""

    modulus: int
    dim: int
    phase_indices: np.ndarray
    seed: int
    nonzero_only: bool = False

    def __post_init__(self):
        idx = np.asarray(self.phase_indices, dtype=np.int64)
        if np.any(idx < 0) or np.any(idx >= self.modulus):
            raise ValueError("phase indices must lie in [0, modulus)")
        if self.nonzero_only and np.any(idx == 0):
            raise ValueError("nonzero_only base contains a zero phase index")
        object.__setattr__(self, "phase_indices", idx)


@dataclass(frozen=True)
class NoiseModel:
    """Von Mises phase noise with concentration kappa (inf = no noise)."""

    kappa: float
    seed: int = 0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")


def sample_base(m: int, D: int, seed: int, nonzero_only: bool = False) -> ModulusBase:
    """Draw D i.i.d. phase indices uniform over Z_m (or Z_m without 0).

    Deterministic for a fixed seed.
    """
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if D < 1:
        raise ValueError(f"dimension must be >= 1, got {D}")
    rng = np.random.default_rng(seed)
    if nonzero_only:
        idx = rng.integers(1, m, size=D, dtype=np.int64)
    else:
        idx = rng.integers(0, m, size=D, dtype=np.int64)
    return ModulusBase(modulus=m, dim=D, phase_indices=idx, seed=int(seed), nonzero_only=nonzero_only)


def identity_vector(D: int) -> PhasorVector:
    """The all-ones vector (phase 0 everywhere), exact with period 1."""
    return PhasorVector.exact(np.zeros(D, dtype=np.int64), 1)


def encode_integer(base: ModulusBase, x: int) -> PhasorVector:
    """z(x) = z^x in exact form: component j gets index (u_j * x) mod m.

    Periodic in x with period m, so x and x + m encode identically.
    """
    x_red = int(x) % base.modulus
    idx = (base.phase_indices * x_red) % base.modulus
    return PhasorVector.exact(idx, base.modulus)


def centered_indices(base: ModulusBase) -> np.ndarray:
    """Phase indices mapped to the principal branch: u - m for u > m/2.

    The resulting phases lie in (-pi, pi]. Integer encodings are
    indifferent to the representative, but fractional powers are not:
    the branch choice is what makes their similarity follow the
    sinc-comb kernel instead of a Dirichlet ripple.
    """
    u = base.phase_indices
    return np.where(u > base.modulus // 2, u - base.modulus, u)


def encode_rational(base: ModulusBase, q: float) -> PhasorVector:
    """Dense encoding of a real/rational value: component j is e^{i phi_j q}.

    phi_j is the principal (-pi, pi] representative of the base phase,
    so the encoding agrees with :func:`encode_integer` at integers and
    interpolates the sinc-comb kernel in between.
    """
    q_red = math.fmod(float(q), base.modulus)
    angles = centered_indices(base) * (2.0 * np.pi / base.modulus) * q_red
    return PhasorVector.dense(np.exp(1j * angles), validate=False)


def similarity(a: PhasorVector, b: PhasorVector) -> float:
    """(1/D) Re <a, conj(b)>, in [-1, 1]. Exactly 1.0 for identical exact vectors."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.is_exact and b.is_exact:
        L = math.lcm(a.period, b.period)
        delta = (a.indices * (L // a.period) - b.indices * (L // b.period)) % L
        return float(np.mean(np.cos(delta * (2.0 * np.pi / L))))
    return float(np.mean(np.real(a.values * np.conj(b.values))))


def hadamard(a: PhasorVector, b: PhasorVector) -> PhasorVector:
    """Componentwise product. Exact x exact stays exact with period lcm(L1, L2)."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.is_exact and b.is_exact:
        L = math.lcm(a.period, b.period)
        idx = (a.indices * (L // a.period) + b.indices * (L // b.period)) % L
        return PhasorVector.exact(idx, L)
    return PhasorVector.dense(a.values * b.values, validate=False)


def conjugate(v: PhasorVector) -> PhasorVector:
    """Componentwise complex conjugate (phase negation)."""
    if v.is_exact:
        return PhasorVector.exact((-v.indices) % v.period, v.period)
    return PhasorVector.dense(np.conj(v.values), validate=False)


def phase_normalize(v) -> PhasorVector:
    """Project complex components onto the unit circle, keeping phases.

    Zero components map to 1+0j so the output is always unit-magnitude.
    Accepts a PhasorVector or a raw complex array.
    """
    vals = v.values if isinstance(v, PhasorVector) else np.asarray(v, dtype=np.complex128)
    mags = np.abs(vals)
    out = np.where(mags > 0.0, vals / np.where(mags > 0.0, mags, 1.0), 1.0 + 0.0j)
    return PhasorVector.dense(out, validate=False)


def add_phase_noise(v: PhasorVector, noise: NoiseModel) -> PhasorVector:
    """Perturb each phase by an i.i.d. von Mises(0, kappa) sample.

    kappa = inf is the no-noise sentinel and returns the dense form of v
    unchanged.
    """
    if math.isinf(noise.kappa):
        return v.to_dense()
    rng = np.random.default_rng(noise.seed)
    theta = rng.vonmises(0.0, noise.kappa, size=v.dim)
    return PhasorVector.dense(v.values * np.exp(1j * theta), validate=False)


# --- serialization ------------------------------------------------------

_BASE_FORMAT = "residuehd/modulus-base"
_BASE_VERSION = 1


def base_to_dict(base: ModulusBase) -> dict:
    return {
        "format": _BASE_FORMAT,
        "version": _BASE_VERSION,
        "modulus": base.modulus,
        "dim": base.dim,
        "seed": base.seed,
        "nonzero_only": base.nonzero_only,
        "phase_indices": [int(u) for u in base.phase_indices],
    }


def base_from_dict(d: dict) -> ModulusBase:
    if d.get("format") != _BASE_FORMAT:
        raise ValueError(f"not a modulus-base record: {d.get('format')!r}")
    if d.get("version") != _BASE_VERSION:
        raise ValueError(f"unsupported modulus-base version: {d.get('version')!r}")
    return ModulusBase(
        modulus=int(d["modulus"]),
        dim=int(d["dim"]),
        phase_indices=np.asarray(d["phase_indices"], dtype=np.int64),
        seed=int(d["seed"]),
        nonzero_only=bool(d["nonzero_only"]),
    )


def save_base(base: ModulusBase, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(base_to_dict(base), fh)


def load_base(path) -> ModulusBase:
    with open(path, "r", encoding="ascii") as fh:
        return base_from_dict(json.load(fh))
