import numpy as np
import pytest

from wcbound import (
    ClosedLoopSystem,
    DisturbanceBounds,
    EigenClass,
    InputFormatError,
    UnstableSystemError,
    UnsupportedMultiplicityError,
    build_closed_loop,
    check_hurwitz,
    eigendecompose_and_classify,
)
from conftest import random_hurwitz


class TestBuildClosedLoop:
    def test_tfc_arithmetic(self):
        sys = build_closed_loop(
            a=[[0.0, 10.0], [0.0, 0.0]],
            b=[0.0, 10.0],
            k_gain=[0.3, 0.5],
            e_mat=[[0.0], [10.0]],
        )
        np.testing.assert_array_equal(sys.a_cl, [[0.0, 10.0], [-3.0, -5.0]])
        np.testing.assert_array_equal(sys.e_mat, [[0.0], [10.0]])
        assert sys.n_x == 2 and sys.n_z == 1

    def test_zero_gain_keeps_plant(self):
        a = [[1.0, 2.0], [3.0, 4.0]]
        sys = build_closed_loop(a, [1.0, 1.0], [0.0, 0.0], [[1.0], [0.0]])
        np.testing.assert_array_equal(sys.a_cl, a)

    def test_zero_input_vector_keeps_plant(self):
        a = [[1.0, 2.0], [3.0, 4.0]]
        sys = build_closed_loop(a, [0.0, 0.0], [7.0, -2.0], [[1.0], [0.0]])
        np.testing.assert_array_equal(sys.a_cl, a)

    def test_dimension_mismatch(self):
        with pytest.raises(InputFormatError):
            build_closed_loop([[0.0, 1.0], [0.0, 0.0]], [1.0], [0.1, 0.2], [[1.0], [0.0]])
        with pytest.raises(InputFormatError):
            build_closed_loop([[0.0, 1.0]], [1.0, 0.0], [0.1, 0.2], [[1.0], [0.0]])
        with pytest.raises(InputFormatError):
            ClosedLoopSystem(a_cl=np.eye(2), e_mat=np.ones((3, 1)))

    def test_column_vector_e(self):
        sys = build_closed_loop(np.eye(2), [0.0, 0.0], [0.0, 0.0], [1.0, 2.0])
        assert sys.e_mat.shape == (2, 1)


class TestDisturbanceBounds:
    def test_negative_rejected(self):
        with pytest.raises(InputFormatError):
            DisturbanceBounds([-0.1])

    def test_ok(self):
        z = DisturbanceBounds([0.0, 0.3])
        assert z.n_z == 2


class TestHurwitz:
    def test_tfc_stable(self):
        sys = ClosedLoopSystem(np.array([[0.0, 10.0], [-3.0, -5.0]]), np.array([[0.0], [10.0]]))
        assert check_hurwitz(sys)

    def test_integrator_unstable(self):
        sys = ClosedLoopSystem(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))
        assert not check_hurwitz(sys)

    def test_diagonal_stable(self):
        sys = ClosedLoopSystem(np.diag([-1.0, -2.0]), np.eye(2))
        assert check_hurwitz(sys)

    def test_tolerance_threshold(self):
        sys = ClosedLoopSystem(np.diag([-1.0, -0.5]), np.eye(2))
        assert check_hurwitz(sys, tol=0.4)
        assert not check_hurwitz(sys, tol=0.6)


class TestClassification:
    def test_complex_pair(self):
        sys = ClosedLoopSystem(np.array([[0.0, 10.0], [-3.0, -5.0]]), np.array([[0.0], [10.0]]))
        eig = eigendecompose_and_classify(sys)
        assert (eig.n_r, eig.n_d, eig.n_c) == (0, 0, 2)
        lam = eig.entries[0].value
        assert lam.imag > 0
        assert lam.real == pytest.approx(-2.5, abs=1e-12)
        assert lam.imag == pytest.approx(np.sqrt(30.0 - 6.25), abs=1e-10)
        assert eig.entries[1].value == np.conj(lam)
        assert eig.entries[0].partner_index == 1
        assert eig.entries[1].partner_index == 0

    def test_distinct_real(self):
        sys = ClosedLoopSystem(np.diag([-1.0, -2.0]), np.eye(2))
        eig = eigendecompose_and_classify(sys)
        assert (eig.n_r, eig.n_d, eig.n_c) == (2, 0, 0)
        # ascending order
        assert eig.entries[0].value.real < eig.entries[1].value.real
        assert all(e.klass is EigenClass.DISTINCT_REAL for e in eig.entries)

    def test_double_real_branch(self):
        # gains chosen on the repeated-eigenvalue parabola
        sys = ClosedLoopSystem(np.array([[0.0, 10.0], [-0.9, -6.0]]), np.array([[0.0], [10.0]]))
        eig = eigendecompose_and_classify(sys)
        assert (eig.n_r, eig.n_d, eig.n_c) == (0, 2, 0)
        assert eig.entries[0].value == pytest.approx(-3.0, abs=1e-9)
        assert eig.entries[0].klass is EigenClass.DOUBLE_REAL

    def test_multiplicity_three_rejected(self):
        sys = ClosedLoopSystem(-np.eye(3), np.ones((3, 1)))
        with pytest.raises(UnsupportedMultiplicityError):
            eigendecompose_and_classify(sys)

    def test_unstable_rejected(self):
        sys = ClosedLoopSystem(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))
        with pytest.raises(UnstableSystemError):
            eigendecompose_and_classify(sys)

    def test_ordering_convention(self, rng):
        # doubles first, complex pairs adjacent, distinct reals ascending last
        sys = random_hurwitz(rng, 4, kind="double")
        eig = eigendecompose_and_classify(sys)
        classes = [e.klass for e in eig.entries]
        assert classes[:2] == [EigenClass.DOUBLE_REAL, EigenClass.DOUBLE_REAL]
        assert classes[2:] == [EigenClass.DISTINCT_REAL, EigenClass.DISTINCT_REAL]
        reals = [e.value.real for e in eig.entries[2:]]
        assert reals == sorted(reals)

    def test_counts_sum(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 5))
            sys = random_hurwitz(rng, n)
            eig = eigendecompose_and_classify(sys)
            assert eig.n_r + eig.n_d + eig.n_c == n
            assert eig.n_d % 2 == 0 and eig.n_c % 2 == 0

    def test_permutation_stability(self, rng):
        for _ in range(15):
            n = int(rng.integers(2, 5))
            sys = random_hurwitz(rng, n)
            perm = rng.permutation(n)
            p = np.eye(n)[perm]
            sys_p = ClosedLoopSystem(p @ sys.a_cl @ p.T, p @ sys.e_mat)
            eig_a = eigendecompose_and_classify(sys)
            eig_b = eigendecompose_and_classify(sys_p)

            def key(e):
                return (round(e.value.real, 9), round(e.value.imag, 9), e.klass.value)

            assert sorted(map(key, eig_a.entries)) == sorted(map(key, eig_b.entries))

    def test_conjugate_symmetrized(self, rng):
        for _ in range(10):
            sys = random_hurwitz(rng, 4, kind="complex")
            eig = eigendecompose_and_classify(sys)
            for e in eig.entries:
                if e.klass is EigenClass.COMPLEX_PAIR and e.value.imag > 0:
                    partner = eig.entries[e.partner_index]
                    assert partner.value == np.conj(e.value)
