"""Residue composition, carry-free arithmetic, CRT, Landau's function."""

import math

import numpy as np
import pytest

from residuehd.phasor import ModulusBase, encode_integer
from residuehd.residue import (
    add,
    anti_base,
    crt_reconstruct,
    f_op,
    f_op_table,
    landau_g,
    make_residue_system,
    multiply,
    multiply_by_constant_inverse,
    subtract,
    system_from_dict,
    system_to_dict,
)


@pytest.fixture(scope="module")
def sys357():
    return make_residue_system([3, 5, 7], 64, seed=100)


@pytest.fixture(scope="module")
def prime_sys():
    return make_residue_system([3, 5, 7], 64, seed=101, nonzero_only=True)


class TestMakeResidueSystem:
    def test_range_and_budget(self, sys357):
        assert sys357.range_M == 105
        assert sys357.codebook_budget_b == 15

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError, match="4 and 6"):
            make_residue_system([4, 6], 16, seed=0)

    def test_consecutive_triple(self):
        sys = make_residue_system([199, 200, 201], 16, seed=1)
        assert sys.range_M == 7_999_800

    def test_reproducible(self):
        a = make_residue_system([3, 5], 32, seed=5)
        b = make_residue_system([3, 5], 32, seed=5)
        for ba, bb in zip(a.bases, b.bases):
            assert np.array_equal(ba.phase_indices, bb.phase_indices)


class TestEncode:
    def test_residues_of_20(self, sys357):
        factors = sys357.encode_factors(20)
        for factor, base, expected in zip(factors, sys357.bases, [2, 0, 6]):
            assert factor == encode_integer(base, expected)

    def test_zero_identity(self, sys357):
        assert np.all(sys357.encode(0).indices == 0)

    def test_period_M(self, sys357):
        assert sys357.encode(105) == sys357.encode(0)
        assert sys357.encode(313) == sys357.encode(313 % 105)

    def test_rational_matches_integer(self, sys357):
        assert np.allclose(sys357.encode_rational(17.0).values, sys357.encode(17).values, atol=1e-12)


class TestAddSubtract:
    def test_add_examples(self, sys357):
        assert add(sys357, sys357.encode(2), sys357.encode(3)) == sys357.encode(5)
        assert add(sys357, sys357.encode(104), sys357.encode(1)) == sys357.encode(0)

    def test_subtract_self_is_zero(self, sys357):
        v = sys357.encode(42)
        assert subtract(sys357, v, v) == sys357.encode(0)

    def test_random_pairs_bit_exact(self, sys357):
        rng = np.random.default_rng(0)
        for _ in range(200):
            x1, x2 = int(rng.integers(105)), int(rng.integers(105))
            assert add(sys357, sys357.encode(x1), sys357.encode(x2)) == sys357.encode((x1 + x2) % 105)
            assert subtract(sys357, sys357.encode(x1), sys357.encode(x2)) == sys357.encode((x1 - x2) % 105)


class TestAntiBase:
    def test_inverse_of_3_mod_5(self):
        base = ModulusBase(modulus=5, dim=4, phase_indices=np.array([3, 3, 3, 3]), seed=0, nonzero_only=True)
        assert np.all(anti_base(base).inverse_indices == 2)

    def test_inverse_of_1_is_1(self):
        base = ModulusBase(modulus=7, dim=3, phase_indices=np.array([1, 1, 1]), seed=0, nonzero_only=True)
        assert np.all(anti_base(base).inverse_indices == 1)

    def test_exhaustive_mod7(self):
        base = ModulusBase(
            modulus=7, dim=6, phase_indices=np.arange(1, 7, dtype=np.int64), seed=0, nonzero_only=True
        )
        ab = anti_base(base)
        assert np.all((base.phase_indices * ab.inverse_indices) % 7 == 1)

    def test_requires_prime(self):
        base = ModulusBase(modulus=6, dim=2, phase_indices=np.array([1, 5]), seed=0)
        with pytest.raises(ValueError, match="prime"):
            anti_base(base)

    def test_requires_nonzero(self):
        base = ModulusBase(modulus=5, dim=2, phase_indices=np.array([0, 2]), seed=0)
        with pytest.raises(ValueError, match="nonzero"):
            anti_base(base)


class TestFOp:
    def test_index_product(self):
        import residuehd.phasor as ph

        a = ph.PhasorVector.exact(np.array([2]), 5)
        b = ph.PhasorVector.exact(np.array([3]), 5)
        assert f_op(a, b).indices[0] == 1  # 6 mod 5

    def test_index_one_is_neutral(self, prime_sys):
        import residuehd.phasor as ph

        base = prime_sys.bases[1]
        v = encode_integer(base, 3)
        ones = ph.PhasorVector.exact(np.ones(base.dim, dtype=np.int64), base.modulus)
        assert f_op(v, ones) == v

    def test_full_route_matches_direct_indices(self, prime_sys):
        rng = np.random.default_rng(1)
        for _ in range(30):
            x1, x2 = int(rng.integers(105)), int(rng.integers(105))
            for base in prime_sys.bases:
                m = base.modulus
                y = anti_base(base).as_vector()
                out = f_op(f_op(encode_integer(base, x1), encode_integer(base, x2)), y)
                expected = (base.phase_indices * (x1 * x2)) % m
                assert np.array_equal(out.indices, expected)

    def test_table_path_agrees(self, prime_sys):
        base = prime_sys.bases[2]
        table = f_op_table(base.modulus)
        a = encode_integer(base, 4)
        b = encode_integer(base, 6)
        assert f_op(a, b, table=table) == f_op(a, b)

    def test_period_mismatch(self):
        import residuehd.phasor as ph

        with pytest.raises(ValueError):
            f_op(ph.PhasorVector.exact(np.array([1]), 5), ph.PhasorVector.exact(np.array([1]), 7))


class TestMultiply:
    def test_figure_values(self, prime_sys):
        from residuehd.resonator import Codebook, codebook_decode

        full = Codebook.from_vectors([prime_sys.encode(x) for x in range(105)], list(range(105)))
        prod = multiply(prime_sys, prime_sys.encode_factors(2), prime_sys.encode_factors(3))
        assert codebook_decode(prod, full) == 6

    def test_multiplicative_identity(self, prime_sys):
        rng = np.random.default_rng(2)
        ones = prime_sys.encode_factors(1)
        for _ in range(20):
            x = int(rng.integers(105))
            assert multiply(prime_sys, prime_sys.encode_factors(x), ones) == prime_sys.encode(x)

    def test_sampled_products_bit_exact(self, prime_sys):
        rng = np.random.default_rng(3)
        for _ in range(300):
            x1, x2 = int(rng.integers(105)), int(rng.integers(105))
            prod = multiply(prime_sys, prime_sys.encode_factors(x1), prime_sys.encode_factors(x2))
            assert prod == prime_sys.encode((x1 * x2) % 105)

    def test_composed_mode_uses_resonator(self):
        from residuehd.resonator import ResonatorConfig

        sys = make_residue_system([3, 5, 7], 512, seed=103, nonzero_only=True)
        cfg = ResonatorConfig(max_iters=30, max_restarts=3, verify=True, seed=0)
        prod = multiply(sys, sys.encode(4), sys.encode(9), config=cfg)
        assert prod == sys.encode(36)

    def test_composite_modulus_rejected(self):
        sys = make_residue_system([4, 9], 16, seed=104, nonzero_only=True)
        with pytest.raises(ValueError, match="prime"):
            multiply(sys, sys.encode_factors(1), sys.encode_factors(1))

    def test_distributivity(self, prime_sys):
        rng = np.random.default_rng(4)
        for _ in range(50):
            a, b, c = (int(rng.integers(105)) for _ in range(3))
            bc = add(prime_sys, prime_sys.encode(b), prime_sys.encode(c))
            left = multiply(prime_sys, prime_sys.encode_factors(a), prime_sys.encode_factors((b + c) % 105))
            right = add(
                prime_sys,
                multiply(prime_sys, prime_sys.encode_factors(a), prime_sys.encode_factors(b)),
                multiply(prime_sys, prime_sys.encode_factors(a), prime_sys.encode_factors(c)),
            )
            assert bc == prime_sys.encode((b + c) % 105)
            assert left == right

    def test_constant_inverse(self, prime_sys):
        rng = np.random.default_rng(5)
        c = 4
        c_inv = pow(c, -1, 105)
        for _ in range(20):
            x = int(rng.integers(105))
            out = multiply_by_constant_inverse(prime_sys, prime_sys.encode(x), c)
            assert out == prime_sys.encode((x * c_inv) % 105)
        with pytest.raises(ValueError, match="invertible"):
            multiply_by_constant_inverse(prime_sys, prime_sys.encode(1), 21)


class TestResidueKernel:
    def test_orthogonality_monte_carlo(self):
        D = 10_000
        sys = make_residue_system([3, 5, 7], D, seed=105)
        from residuehd.phasor import similarity

        rng = np.random.default_rng(6)
        bound = 4 / math.sqrt(D)
        violations = 0
        trials = 300
        for _ in range(trials):
            x1, x2 = int(rng.integers(105)), int(rng.integers(105))
            s = similarity(sys.encode(x1), sys.encode(x2))
            if x1 == x2:
                assert s == 1.0
            elif abs(s) > bound:
                violations += 1
        assert violations / trials <= 0.01


def _landau_brute_force(b):
    # maximum lcm over all integer partitions, by direct enumeration
    best = [1]

    def rec(remaining, max_part, current_lcm):
        if current_lcm > best[0]:
            best[0] = current_lcm
        for part in range(min(remaining, max_part), 1, -1):
            rec(remaining - part, part, math.lcm(current_lcm, part))

    rec(b, b, 1)
    return best[0]


class TestLandau:
    def test_small_values(self):
        assert landau_g(1) == 1
        assert landau_g(15) == 105

    def test_matches_brute_force(self):
        for b in range(1, 17):
            assert landau_g(b) == _landau_brute_force(b)

    def test_monotone(self):
        values = [landau_g(b) for b in range(1, 41)]
        assert all(v2 >= v1 for v1, v2 in zip(values, values[1:]))

    def test_budget_bound_for_coprime_sets(self):
        for moduli in ([3, 5, 7], [2, 3, 5], [4, 9, 5]):
            assert landau_g(sum(moduli)) >= math.prod(moduli)

    def test_too_large_rejected(self):
        with pytest.raises(ValueError):
            landau_g(61)
        with pytest.raises(ValueError):
            landau_g(0)


class TestCRT:
    def test_known_reconstruction(self):
        assert crt_reconstruct([2, 0, 6], [3, 5, 7]) == 20

    def test_zeros(self):
        assert crt_reconstruct([0, 0, 0], [3, 5, 7]) == 0

    def test_exhaustive_round_trip(self):
        for x in range(105):
            assert crt_reconstruct([x % 3, x % 5, x % 7], [3, 5, 7]) == x

    def test_errors(self):
        with pytest.raises(ValueError):
            crt_reconstruct([1, 1], [4, 6])
        with pytest.raises(ValueError):
            crt_reconstruct([5, 0], [3, 5])


class TestSerialization:
    def test_system_round_trip(self, tmp_path):
        sys = make_residue_system([3, 5, 7], 32, seed=106, nonzero_only=True)
        restored = system_from_dict(system_to_dict(sys))
        assert restored.moduli == sys.moduli
        for a, b in zip(restored.bases, sys.bases):
            assert np.array_equal(a.phase_indices, b.phase_indices)

    def test_bad_format(self):
        with pytest.raises(ValueError):
            system_from_dict({"format": "nope"})
