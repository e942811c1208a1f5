import math

import numpy as np
import pytest

from wcbound import (
    DisturbanceBounds,
    InputFormatError,
    antiderivative_F,
    assemble_channel_bound,
    bound_complex_pair,
    bound_distinct_real_pair,
    bound_double_real_pair,
    bound_singleton,
    build_tfc,
    complex_phase,
    loose_bound,
    make_complex_pair_work,
    make_double_real_work,
    make_real_pair_work,
    modal_coefficients,
    pair_terms,
    quadrature_bound,
    switch_time_real_pair,
    TfcParams,
    total_bound,
    zero_count,
    zero_locations,
)
from wcbound.bounds import distinct_real_pair_absorbed_base_form
from wcbound.systems import ClosedLoopSystem
from conftest import quad_piecewise, random_hurwitz


def mu_quad_real_pair(c_i, c_j, l_i, l_j, t):
    T = t if t is not None else math.log(1e15) / min(abs(l_i), abs(l_j))
    f = lambda x: abs(c_i * math.exp(l_i * x) + c_j * math.exp(l_j * x))
    ts = switch_time_real_pair(c_i, c_j, l_i, l_j)
    edges = [0.0, T] + ([ts] if ts is not None and 0 < ts < T else [])
    return quad_piecewise(f, edges)


def mu_quad_double(c_i, c_ip1, lam, t):
    T = t if t is not None else math.log(1e15) / abs(lam) + 5.0
    f = lambda x: abs((c_i * x + c_ip1) * math.exp(lam * x))
    ts = -c_ip1 / c_i if c_i != 0.0 else None
    edges = [0.0, T] + ([ts] if ts is not None and 0 < ts < T else [])
    return quad_piecewise(f, edges)


def mu_quad_complex(c, sigma, omega, t):
    T = t if t is not None else math.log(1e15) / abs(sigma)
    f = lambda x: abs(
        2.0 * math.exp(sigma * x) * (c.real * math.cos(omega * x) - c.imag * math.sin(omega * x))
    )
    w = make_complex_pair_work(c, sigma, omega)
    edges = [0.0, T] + zero_locations(w, T)
    return quad_piecewise(f, edges)


class TestSingleton:
    def test_unit_exponential(self):
        assert bound_singleton(1.0, -1.0, None) == pytest.approx(1.0)

    def test_ratio(self):
        assert bound_singleton(-2.0, -4.0, None) == pytest.approx(0.5)

    def test_finite_window(self):
        assert bound_singleton(1.0, -1.0, math.log(2.0)) == pytest.approx(0.5)

    def test_unstable_rejected(self):
        with pytest.raises(InputFormatError):
            bound_singleton(1.0, 0.0, None)


class TestSwitchTime:
    def test_log_two(self):
        ts = switch_time_real_pair(1.0, -2.0, -1.0, -2.0)
        assert ts == pytest.approx(math.log(2.0), rel=1e-14)

    def test_same_sign_none(self):
        assert switch_time_real_pair(1.0, 2.0, -1.0, -2.0) is None

    def test_boundary_root_excluded(self):
        assert switch_time_real_pair(-1.0, 1.0, -3.0, -1.0) is None

    def test_zero_coefficient_none(self):
        assert switch_time_real_pair(1.0, 0.0, -1.0, -2.0) is None

    def test_root_residual(self, rng):
        for _ in range(200):
            l_i, l_j = -rng.uniform(0.05, 10.0), -rng.uniform(0.05, 10.0)
            if abs(l_i - l_j) < 1e-3:
                continue
            c_i, c_j = rng.uniform(-10, 10), rng.uniform(-10, 10)
            ts = switch_time_real_pair(c_i, c_j, l_i, l_j)
            if ts is None:
                continue
            resid = c_i * math.exp(l_i * ts) + c_j * math.exp(l_j * ts)
            scale = abs(c_i * math.exp(l_i * ts)) + abs(c_j * math.exp(l_j * ts))
            assert abs(resid) <= 1e-10 * max(scale, 1e-30)


class TestDistinctRealPair:
    def test_no_switch_value(self):
        w = make_real_pair_work(1.0, 1.0, -1.0, -2.0)
        assert w.t_s is None
        assert bound_distinct_real_pair(w, None) == pytest.approx(1.5, rel=1e-14)

    def test_switch_value_frozen_by_quadrature(self):
        w = make_real_pair_work(1.0, -2.0, -1.0, -2.0)
        assert w.t_s == pytest.approx(math.log(2.0))
        got = bound_distinct_real_pair(w, None)
        assert got == pytest.approx(0.5, rel=1e-12)
        assert got == pytest.approx(mu_quad_real_pair(1.0, -2.0, -1.0, -2.0, None), rel=1e-10)

    def test_degenerate_reduces_to_singleton(self):
        w = make_real_pair_work(1.5, 0.0, -1.0, -2.0)
        for t in (None, 0.7):
            assert bound_distinct_real_pair(w, t) == pytest.approx(
                bound_singleton(1.5, -1.0, t), rel=1e-14
            )

    def test_oracle_equivalence(self, rng):
        for _ in range(200):
            l_i, l_j = -rng.uniform(0.05, 10.0), -rng.uniform(0.05, 10.0)
            if abs(l_i - l_j) < 1e-3:
                continue
            c_i, c_j = rng.uniform(-10, 10), rng.uniform(-10, 10)
            w = make_real_pair_work(c_i, c_j, l_i, l_j)
            t = float(rng.uniform(0.2, 4.0)) / abs(l_i)
            for horizon in (t, None):
                got = bound_distinct_real_pair(w, horizon)
                ref = mu_quad_real_pair(c_i, c_j, l_i, l_j, horizon)
                assert got == pytest.approx(ref, rel=1e-8, abs=1e-12)

    def test_absorbed_base_variant_fails_quadrature(self):
        # the rewrite that folds the factor 2 into the power base is not
        # the integral; guard against regressing to it
        w = make_real_pair_work(1.0, -2.0, -1.0, -2.0)
        alt = distinct_real_pair_absorbed_base_form(w, None)
        ref = mu_quad_real_pair(1.0, -2.0, -1.0, -2.0, None)
        assert abs(alt - ref) > 0.1 * ref
        assert bound_distinct_real_pair(w, None) == pytest.approx(ref, rel=1e-10)

    def test_scale_equivariance(self, rng):
        w = make_real_pair_work(1.3, -0.7, -0.9, -2.2)
        for alpha in (2.0, 10.0, 0.25):
            w2 = make_real_pair_work(alpha * 1.3, alpha * -0.7, -0.9, -2.2)
            assert bound_distinct_real_pair(w2, None) == pytest.approx(
                alpha * bound_distinct_real_pair(w, None), rel=1e-12
            )


class TestDoubleRealPair:
    def test_gamma_integral(self):
        # boundary root at the origin is not an interior switch
        w = make_double_real_work(1.0, 0.0, -1.0)
        assert w.t_s is None
        assert bound_double_real_pair(w, None) == pytest.approx(1.0, rel=1e-14)

    def test_no_switch(self):
        w = make_double_real_work(1.0, 1.0, -1.0)
        assert w.nu == pytest.approx(2.0)
        assert w.t_s is None
        assert bound_double_real_pair(w, None) == pytest.approx(2.0, rel=1e-14)

    def test_interior_switch_frozen_by_quadrature(self):
        # integral of |tau - 1| e^{-tau}: split quadrature gives 2/e
        w = make_double_real_work(1.0, -1.0, -1.0)
        assert w.t_s == pytest.approx(1.0)
        ref = mu_quad_double(1.0, -1.0, -1.0, None)
        assert ref == pytest.approx(2.0 / math.e, rel=1e-12)
        assert bound_double_real_pair(w, None) == pytest.approx(ref, rel=1e-12)

    def test_switch_time_index_order(self):
        # the root of c_i tau + c_ip1 is -c_ip1/c_i; the swapped ratio is not
        c_i, c_ip1 = 2.0, -0.5
        w = make_double_real_work(c_i, c_ip1, -1.0)
        assert w.t_s == pytest.approx(0.25)
        assert c_i * w.t_s + c_ip1 == pytest.approx(0.0, abs=1e-15)
        swapped = -c_i / c_ip1
        assert abs(c_i * swapped + c_ip1) > 1.0

    def test_finite_window(self):
        got = bound_double_real_pair(make_double_real_work(1.0, 1.0, -1.0), 1.0)
        assert got == pytest.approx(2.0 - 3.0 / math.e, rel=1e-12)

    def test_oracle_equivalence(self, rng):
        for _ in range(200):
            lam = -rng.uniform(0.05, 10.0)
            c_i, c_ip1 = rng.uniform(-10, 10), rng.uniform(-10, 10)
            w = make_double_real_work(c_i, c_ip1, lam)
            t = float(rng.uniform(0.2, 4.0)) / abs(lam)
            for horizon in (t, None):
                got = bound_double_real_pair(w, horizon)
                ref = mu_quad_double(c_i, c_ip1, lam, horizon)
                assert got == pytest.approx(ref, rel=1e-8, abs=1e-12)


class TestComplexPhase:
    def test_quarter_turn(self):
        phi, beta = complex_phase(1.0 + 1.0j)
        assert phi == pytest.approx(math.pi / 4)
        assert beta == 1.0

    def test_pure_negative_imaginary(self):
        phi, beta = complex_phase(-10.2597j)
        assert phi == pytest.approx(-math.pi / 2)
        assert beta == 1.0

    def test_real_positive(self):
        phi, beta = complex_phase(5.0 + 0.0j)
        assert phi == 0.0
        assert beta == 1.0

    def test_real_negative(self):
        phi, beta = complex_phase(-5.0 + 0.0j)
        assert phi == 0.0
        assert beta == -1.0

    def test_pure_positive_imaginary(self):
        phi, beta = complex_phase(3.0j)
        assert phi == pytest.approx(math.pi / 2)
        assert beta == -1.0

    def test_zero_rejected(self):
        with pytest.raises(InputFormatError):
            complex_phase(0.0j)


class TestZeroLattice:
    def test_cosine_zeros(self):
        w = make_complex_pair_work(0.5 + 0.0j, -1.0, math.pi)
        assert zero_locations(w, 3.2) == pytest.approx([0.5, 1.5, 2.5])
        assert zero_count(w, 3.2) == 2

    def test_origin_zero(self):
        w = make_complex_pair_work(2.0j, -1.0, 1.0)
        locs = zero_locations(w, 7.0)
        assert locs == pytest.approx([0.0, math.pi, 2 * math.pi])
        assert zero_count(w, 0.0) == 0

    def test_before_first_zero(self):
        w = make_complex_pair_work(0.5 + 0.0j, -1.0, math.pi)
        assert zero_locations(w, 0.4) == []
        assert zero_count(w, 0.4) == -1

    def test_count_matches_length(self, rng):
        for _ in range(100):
            sigma = -float(rng.uniform(0.05, 8.0))
            omega = float(rng.uniform(0.05, 20.0))
            c = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            if c == 0:
                continue
            w = make_complex_pair_work(c, sigma, omega)
            t = float(rng.uniform(0.01, 30.0)) / omega
            n = zero_count(w, t)
            locs = zero_locations(w, t)
            if n >= 0:
                assert len(locs) == n + 1
            else:
                assert locs == []
            if len(locs) > 1:
                assert np.allclose(np.diff(locs), math.pi / omega, rtol=0, atol=1e-12)

    def test_antiderivative_values_at_zeros(self, rng):
        for _ in range(50):
            sigma = -float(rng.uniform(0.1, 5.0))
            omega = float(rng.uniform(0.1, 10.0))
            c = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            if abs(c) < 1e-3:
                continue
            w = make_complex_pair_work(c, sigma, omega)
            lam2 = sigma * sigma + omega * omega
            locs = zero_locations(w, 6.0 / abs(sigma))
            signs = []
            for n_k in locs:
                val = antiderivative_F(w, n_k)
                assert abs(val) == pytest.approx(
                    (omega / lam2) * math.exp(sigma * n_k), rel=1e-9
                )
                signs.append(math.copysign(1.0, val))
            # alternating antiderivative signs at consecutive zeros
            assert all(a == -b for a, b in zip(signs, signs[1:]))


class TestAntiderivativeF:
    def test_simple_value(self):
        w = make_complex_pair_work(1.0 + 0.0j, -1.0, 1.0)
        assert antiderivative_F(w, 0.0) == pytest.approx(-0.5)

    def test_tfc_value(self):
        omega = math.sqrt(30.0 - 6.25)
        w = make_complex_pair_work(-1.0j, -2.5, omega)
        assert antiderivative_F(w, 0.0) == pytest.approx(-omega / 30.0, rel=1e-12)

    def test_decay(self):
        w = make_complex_pair_work(1.0 + 2.0j, -1.5, 3.0)
        assert abs(antiderivative_F(w, 50.0)) < 1e-20


class TestComplexPair:
    def test_tfc_time_independent(self):
        v = 10.0
        omega = math.sqrt(30.0 - 6.25)
        c = complex(0.0, -v * v / (2 * omega))
        w = make_complex_pair_work(c, -2.5, omega)
        got = bound_complex_pair(w, None)
        q = math.exp(-2.5 * math.pi / omega)
        want = (v * v / 30.0) * (1 + q) / (1 - q)
        assert got == pytest.approx(want, rel=1e-13)
        assert got == pytest.approx(4.9954966594607186, rel=1e-10)

    def test_real_coefficient_case(self):
        w = make_complex_pair_work(0.5 + 0.0j, -1.0, 1.0)
        got = bound_complex_pair(w, None)
        ref = mu_quad_complex(0.5 + 0.0j, -1.0, 1.0, None)
        assert got == pytest.approx(ref, rel=1e-10)

    def test_empty_window(self):
        w = make_complex_pair_work(1.0 + 1.0j, -1.0, 2.0)
        assert bound_complex_pair(w, 0.0) == 0.0

    def test_parameter_validation(self):
        with pytest.raises(InputFormatError):
            make_complex_pair_work(1.0 + 0.0j, 0.5, 1.0)
        with pytest.raises(InputFormatError):
            make_complex_pair_work(1.0 + 0.0j, -0.5, -1.0)

    def test_oracle_equivalence(self, rng):
        for trial in range(200):
            sigma = -float(rng.uniform(0.05, 10.0))
            omega = float(rng.uniform(0.05, 20.0))
            c = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
            if abs(c) < 1e-3:
                continue
            # boundary configurations every few draws
            if trial % 25 == 1:
                c = complex(0.0, c.imag if c.imag != 0 else 1.0)
            if trial % 25 == 2:
                c = complex(c.real if c.real != 0 else 1.0, 0.0)
            w = make_complex_pair_work(c, sigma, omega)
            t = float(rng.uniform(0.2, 5.0)) / abs(sigma)
            for horizon in (t, None):
                got = bound_complex_pair(w, horizon)
                ref = mu_quad_complex(c, sigma, omega, horizon)
                assert got == pytest.approx(ref, rel=1e-8, abs=1e-12)

    def test_monotone_and_convergent(self, rng):
        for _ in range(30):
            sigma = -float(rng.uniform(0.1, 5.0))
            omega = float(rng.uniform(0.1, 10.0))
            c = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            if abs(c) < 1e-3:
                continue
            w = make_complex_pair_work(c, sigma, omega)
            ts = np.linspace(0.0, 8.0 / abs(sigma), 40)
            vals = [bound_complex_pair(w, float(t)) for t in ts]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
            inf_val = bound_complex_pair(w, None)
            T = 6.0 / abs(sigma)
            tail = (2.0 * abs(c) / abs(sigma)) * math.exp(sigma * T)
            assert abs(bound_complex_pair(w, T) - inf_val) < tail + 1e-12
            assert vals[-1] <= inf_val + 1e-12

    def test_scale_equivariance(self, rng):
        w = make_complex_pair_work(1.2 - 0.8j, -0.7, 3.3)
        base = bound_complex_pair(w, None)
        for alpha in (3.0, 0.1):
            w2 = make_complex_pair_work(alpha * (1.2 - 0.8j), -0.7, 3.3)
            assert bound_complex_pair(w2, None) == pytest.approx(alpha * base, rel=1e-12)


class TestAssembly:
    def tfc(self, k_theta=0.5):
        return build_tfc(TfcParams(v=10.0, k_d=0.3, k_theta=k_theta, z_max=0.1))

    def test_tfc_complex_channel(self):
        paired = pair_terms(modal_coefficients(self.tfc(), 0, 0))
        res = assemble_channel_bound(paired, 0.1, None)
        assert res.value == pytest.approx(0.49954966594607186, rel=1e-10)
        assert all(mu >= 0.0 for _, mu in res.per_group)
        assert res.value == pytest.approx(0.1 * sum(mu for _, mu in res.per_group))

    def test_zero_amplitude(self):
        paired = pair_terms(modal_coefficients(self.tfc(), 0, 0))
        assert assemble_channel_bound(paired, 0.0, None).value == 0.0

    def test_tfc_real_regime_is_dc_gain(self):
        sys = self.tfc(k_theta=1.2)
        paired = pair_terms(modal_coefficients(sys, 0, 0))
        res = assemble_channel_bound(paired, 0.1, None)
        assert res.value == pytest.approx(0.1 / 0.3, rel=1e-12)

    def test_loose_at_least_pairwise(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 6))
            sys = random_hurwitz(rng, n)
            paired = pair_terms(modal_coefficients(sys, int(rng.integers(0, n)), 0))
            t = float(rng.uniform(0.5, 5.0))
            for horizon in (t, None):
                lo = assemble_channel_bound(paired, 1.0, horizon).value
                hi = loose_bound(paired, 1.0, horizon)
                assert hi >= lo * (1.0 - 1e-12)

    def test_loose_equals_pairwise_for_single_group(self):
        paired = pair_terms(modal_coefficients(self.tfc(), 0, 0))
        assert loose_bound(paired, 0.1, None) == pytest.approx(
            assemble_channel_bound(paired, 0.1, None).value, rel=1e-14
        )

    def test_loose_triangle_inequality_tfc_real(self):
        sys = self.tfc(k_theta=1.2)
        paired = pair_terms(modal_coefficients(sys, 0, 0))
        loose = loose_bound(paired, 0.1, None)
        assert loose >= 0.1 / 0.3 - 1e-12


class TestTotalBound:
    def test_single_channel_equals_assembled(self):
        sys = build_tfc(TfcParams(v=10.0, k_d=0.3, k_theta=0.5, z_max=0.1))
        tb = total_bound(sys, 0, DisturbanceBounds([0.1]), None)
        paired = pair_terms(modal_coefficients(sys, 0, 0))
        assert tb.value == pytest.approx(
            assemble_channel_bound(paired, 0.1, None).value, rel=1e-14
        )

    def test_duplicated_column_doubles(self):
        base = build_tfc(TfcParams(v=10.0, k_d=0.3, k_theta=0.5, z_max=0.1))
        e2 = np.hstack([base.e_mat, base.e_mat])
        sys2 = ClosedLoopSystem(base.a_cl, e2)
        one = total_bound(base, 0, DisturbanceBounds([0.1]), None).value
        two = total_bound(sys2, 0, DisturbanceBounds([0.1, 0.1]), None).value
        assert two == pytest.approx(2.0 * one, rel=1e-13)

    def test_dominates_quadrature_n3(self, rng):
        for _ in range(5):
            sys = random_hurwitz(rng, 3)
            k = int(rng.integers(0, 3))
            tb = total_bound(sys, k, DisturbanceBounds([1.0]), None).value
            q = quadrature_bound(sys, k, 0, None)
            assert tb >= q * (1.0 - 1e-9)

    def test_monotone_in_time(self):
        sys = build_tfc(TfcParams(v=10.0, k_d=0.3, k_theta=0.5, z_max=0.1))
        z = DisturbanceBounds([0.1])
        ts = np.linspace(0.0, 5.0, 26)
        vals = [total_bound(sys, 0, z, float(t)).value for t in ts]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= total_bound(sys, 0, z, None).value + 1e-12

    def test_channel_count_mismatch(self):
        sys = build_tfc(TfcParams(v=10.0, k_d=0.3, k_theta=0.5, z_max=0.1))
        with pytest.raises(InputFormatError):
            total_bound(sys, 0, DisturbanceBounds([0.1, 0.2]), None)
