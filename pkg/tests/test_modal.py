import math

import numpy as np
import pytest

from wcbound import (
    ComplexPairGroup,
    DoubleRealPair,
    InputFormatError,
    PairingStrategy,
    RealPair,
    Singleton,
    TermKind,
    build_tfc,
    evaluate_impulse_channel,
    modal_coefficients,
    pair_terms,
    TfcParams,
)
from wcbound.modal import ModalExpansion, ModalTerm
from wcbound.oracle import matrix_exponential
from conftest import random_hurwitz


def tfc_sys(v=10.0, k_d=0.3, k_theta=0.5):
    return build_tfc(TfcParams(v=v, k_d=k_d, k_theta=k_theta, z_max=0.1))


class TestCoefficients:
    def test_tfc_distinct_real(self):
        v, k_d, k_theta = 10.0, 0.3, 1.2
        exp = modal_coefficients(tfc_sys(v, k_d, k_theta), 0, 0)
        assert len(exp.terms) == 2
        lam1 = exp.terms[0].lam.real
        lam2 = exp.terms[1].lam.real
        assert exp.terms[0].coeff.real == pytest.approx(v * v / (lam1 - lam2), rel=1e-12)
        assert exp.terms[1].coeff.real == pytest.approx(v * v / (lam2 - lam1), rel=1e-12)

    def test_tfc_double_real(self):
        v = 10.0
        exp = modal_coefficients(tfc_sys(v, 0.09, 0.6), 0, 0)
        kinds = [t.kind for t in exp.terms]
        assert kinds == [TermKind.POLY_REAL, TermKind.PLAIN_REAL]
        assert exp.terms[0].coeff.real == pytest.approx(v * v, rel=1e-9)
        assert exp.terms[1].coeff.real == pytest.approx(0.0, abs=1e-7)

    def test_tfc_complex(self):
        v = 10.0
        exp = modal_coefficients(tfc_sys(v), 0, 0)
        omega = math.sqrt(30.0 - 6.25)
        c = exp.terms[0].coeff
        assert c.real == pytest.approx(0.0, abs=1e-12)
        assert c.imag == pytest.approx(-v * v / (2 * omega), rel=1e-12)
        assert abs(c) == pytest.approx(10.259783520851542, rel=1e-10)
        assert exp.terms[1].coeff == np.conj(c)

    def test_real_coefficients_are_exactly_real(self, rng):
        for _ in range(15):
            n = int(rng.integers(2, 5))
            sys = random_hurwitz(rng, n)
            exp = modal_coefficients(sys, int(rng.integers(0, n)), 0)
            for t in exp.terms:
                if t.kind is not TermKind.COMPLEX_HALF:
                    assert t.coeff.imag == 0.0
                    assert t.lam.imag == 0.0

    def test_reconstruction_against_expm(self, rng):
        # 50 random Hurwitz systems: modal sum equals the expm channel
        worst = 0.0
        for _ in range(50):
            n = int(rng.integers(2, 5))
            sys = random_hurwitz(rng, n, n_z=2)
            k = int(rng.integers(0, n))
            j = int(rng.integers(0, 2))
            exp = modal_coefficients(sys, k, j)
            taus = np.linspace(0.0, 5.0, 21)
            got = evaluate_impulse_channel(exp, taus)
            ref = np.array(
                [(matrix_exponential(sys.a_cl, t) @ sys.disturbance_column(j))[k] for t in taus]
            )
            scale = max(np.max(np.abs(ref)), 1.0)
            worst = max(worst, float(np.max(np.abs(got - ref))) / scale)
        assert worst < 1e-8


class TestEvaluate:
    def test_value_at_zero_matches_e_entry(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 5))
            sys = random_hurwitz(rng, n, n_z=2)
            k = int(rng.integers(0, n))
            j = int(rng.integers(0, 2))
            exp = modal_coefficients(sys, k, j)
            assert evaluate_impulse_channel(exp, 0.0) == pytest.approx(
                sys.e_mat[k, j], rel=1e-9, abs=1e-9
            )

    def test_tfc_complex_at_zero(self):
        exp = modal_coefficients(tfc_sys(), 0, 0)
        assert evaluate_impulse_channel(exp, 0.0) == pytest.approx(0.0, abs=1e-10)

    def test_tfc_complex_quarter_period(self):
        # channel equals (v^2/omega) e^{sigma tau} sin(omega tau)
        v, sigma = 10.0, -2.5
        omega = math.sqrt(30.0 - 6.25)
        exp = modal_coefficients(tfc_sys(), 0, 0)
        tau = math.pi / (2 * omega)
        want = (v * v / omega) * math.exp(sigma * tau)
        assert evaluate_impulse_channel(exp, tau) == pytest.approx(want, rel=1e-12)

    def test_decay_to_zero(self):
        exp = modal_coefficients(tfc_sys(), 0, 0)
        assert abs(evaluate_impulse_channel(exp, 40.0)) < 1e-12

    def test_negative_tau_rejected(self):
        exp = modal_coefficients(tfc_sys(), 0, 0)
        with pytest.raises(InputFormatError):
            evaluate_impulse_channel(exp, -1.0)

    def test_imaginary_residue_guard(self):
        # a lone complex half is not conjugate symmetric
        bad = ModalExpansion(
            terms=(ModalTerm(TermKind.COMPLEX_HALF, 1.0 + 1.0j, -1.0 + 2.0j),),
            output_index=0,
            disturbance_index=0,
        )
        with pytest.raises(InputFormatError):
            evaluate_impulse_channel(bad, 1.0)


class TestPairing:
    def test_complex_pair_group(self):
        paired = pair_terms(modal_coefficients(tfc_sys(), 0, 0))
        assert len(paired.groups) == 1
        g = paired.groups[0]
        assert isinstance(g, ComplexPairGroup)
        assert g.omega > 0 and g.sigma < 0

    def test_three_distinct_reals_gives_pair_plus_singleton(self, rng):
        sys = random_hurwitz(rng, 3, kind="distinct")
        paired = pair_terms(modal_coefficients(sys, 0, 0))
        kinds = sorted(type(g).__name__ for g in paired.groups)
        assert kinds == ["RealPair", "Singleton"]

    def test_double_plus_two_distinct(self, rng):
        sys = random_hurwitz(rng, 4, kind="double")
        paired = pair_terms(modal_coefficients(sys, 0, 0))
        kinds = sorted(type(g).__name__ for g in paired.groups)
        assert kinds == ["DoubleRealPair", "RealPair"]

    def test_groups_cover_terms_exactly_once(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 6))
            sys = random_hurwitz(rng, n)
            exp = modal_coefficients(sys, int(rng.integers(0, n)), 0)
            paired = pair_terms(exp)
            rebuilt = []
            for g in paired.groups:
                if isinstance(g, RealPair):
                    rebuilt += [(g.c_i, g.lam_i), (g.c_j, g.lam_j)]
                elif isinstance(g, DoubleRealPair):
                    rebuilt += [(g.c_i, g.lam), (g.c_ip1, g.lam)]
                elif isinstance(g, ComplexPairGroup):
                    rebuilt += [
                        (g.c, complex(g.sigma, g.omega)),
                        (np.conj(g.c), complex(g.sigma, -g.omega)),
                    ]
                else:
                    rebuilt.append((g.c, g.lam))
            original = [(t.coeff, t.lam) for t in exp.terms]

            def key(p):
                c, l = complex(p[0]), complex(p[1])
                return (round(l.real, 10), round(l.imag, 10), round(c.real, 10), round(c.imag, 10))

            assert sorted(map(key, rebuilt)) == sorted(map(key, original))

    def test_optimal_not_worse_than_default(self, rng):
        from wcbound.bounds import assemble_channel_bound

        for _ in range(10):
            n = int(rng.integers(3, 6))
            sys = random_hurwitz(rng, n, kind="distinct")
            exp = modal_coefficients(sys, 0, 0)
            v_def = assemble_channel_bound(pair_terms(exp), 1.0).value
            v_opt = assemble_channel_bound(
                pair_terms(exp, PairingStrategy.OPTIMAL), 1.0
            ).value
            assert v_opt <= v_def * (1.0 + 1e-12)
