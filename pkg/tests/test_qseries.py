from fractions import Fraction

import pytest

from siegel.qseries import (ModularBasis, QSeries, SL2_WORDS, TaggedSeries,
                            TruncationError, anomaly_residual,
                            bracket1_classical, delta, dim_modular_forms,
                            eisenstein, evaluate, g2_series, membership_in_Mw,
                            serre_derivative)


def test_eisenstein_heads():
    e2 = eisenstein(2, 4)
    assert e2.coeffs == (Fraction(1), Fraction(-24), Fraction(-72),
                         Fraction(-96))
    e4 = eisenstein(4, 3)
    assert e4.coeffs == (Fraction(1), Fraction(240), Fraction(2160))
    e6 = eisenstein(6, 3)
    assert e6.coeffs == (Fraction(1), Fraction(-504), Fraction(-16632))
    with pytest.raises(ValueError):
        eisenstein(8, 5)
    with pytest.raises(ValueError):
        eisenstein(4, 0)


def test_delta_head_and_relation():
    d = delta(5)
    assert d.coeffs == (Fraction(0), Fraction(1), Fraction(-24),
                        Fraction(252), Fraction(-1472))
    n = 120
    d, e4, e6 = delta(n), eisenstein(4, n), eisenstein(6, n)
    assert (d.scale(1728) + e6 * e6) == e4 * e4 * e4
    assert d.coeffs[0] == 0


def test_series_arithmetic_is_exact_and_truncation_aware():
    a = QSeries([1, Fraction(1, 2), 3], weight=4)
    b = QSeries([2, 0, -1, 7], weight=4)
    total = a + b
    assert len(total) == 3
    assert total.weight == 4
    prod = a * b
    assert len(prod) == 3
    assert prod.coeffs[1] == Fraction(1)  # 1*0 + 1/2*2
    assert prod.weight == 8
    assert a.theta().coeffs == (Fraction(0), Fraction(1, 2), Fraction(6))


def test_multiplication_commutative_associative_up_to_truncation():
    import numpy as np
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = QSeries([int(v) for v in rng.integers(-5, 6, size=12)])
        b = QSeries([int(v) for v in rng.integers(-5, 6, size=15)])
        c = QSeries([int(v) for v in rng.integers(-5, 6, size=10)])
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("n", [200])
def test_weight_raising_identities(n):
    e4, e6, d = eisenstein(4, n), eisenstein(6, n), delta(n)
    assert serre_derivative(e4) == e6.scale(Fraction(-1, 3))
    assert serre_derivative(e6) == (e4 * e4).scale(Fraction(-1, 2))
    assert serre_derivative(d).is_zero()


def test_serre_derivative_requires_weight():
    with pytest.raises(ValueError):
        serre_derivative(QSeries([1, 2, 3]))


def test_basis_and_membership():
    ok, coords = membership_in_Mw(eisenstein(4, 40), 4)
    assert ok and coords == [Fraction(1)]
    ok, coords = membership_in_Mw(serre_derivative(eisenstein(4, 40)), 6)
    assert ok and coords == [Fraction(-1, 3)]
    ok, _ = membership_in_Mw(eisenstein(2, 40), 2)
    assert not ok
    ok, coords = membership_in_Mw(QSeries([0] * 40), 2)
    assert ok and coords == []
    with pytest.raises(ValueError):
        membership_in_Mw(QSeries([1, 2]), 12)


def test_basis_dimensions_match_classical_formula():
    for w, dim in ((0, 1), (2, 0), (4, 1), (6, 1), (8, 1), (10, 1), (12, 2),
                   (14, 1), (26, 2), (24, 3)):
        assert dim_modular_forms(w) == dim
        assert len(ModularBasis(w, 40)) == dim


def test_weight_raising_stays_modular():
    for w in (4, 6, 8, 10, 12, 16, 20, 24):
        basis = ModularBasis(w, 60)
        for element in basis.elements:
            ok, _ = membership_in_Mw(serre_derivative(element), w + 2)
            assert ok


def test_evaluate_constant_and_discriminant():
    one = QSeries([1], weight=0)
    assert evaluate(one, 0.5 + 2j) == 1
    d = delta(150)
    value = evaluate(d, 1j)
    assert abs(value.imag) < 1e-12
    assert value.real > 0


def test_evaluate_modularity_of_eisenstein():
    z = 0.3 + 1.2j
    e4 = eisenstein(4, 250)
    lhs = evaluate(e4, -1 / z)
    rhs = z ** 4 * evaluate(e4, z)
    assert abs(lhs - rhs) < 1e-8 * abs(rhs)


def test_evaluate_tail_guard():
    short = QSeries([1] * 5, weight=12)
    with pytest.raises(TruncationError) as info:
        evaluate(short, 0.0 + 0.05j)
    assert info.value.required > 5
    with pytest.raises(ValueError):
        evaluate(short, 0.3 - 1j)


def test_g2_normalization_and_anomaly():
    tagged = g2_series(50)
    assert isinstance(tagged, TaggedSeries)
    assert tagged.rational == Fraction(1, 3)
    assert tagged.pi_power == 1
    # leading term pi/3 at deep imaginary points
    import math
    value = evaluate(tagged, 0.0 + 40j)
    assert abs(value - math.pi / 3) < 1e-12

    zs = [complex(0.05 * t - 0.2, 0.9 + 0.1 * t) for t in range(10)]
    for name, word in SL2_WORDS.items():
        for z in zs:
            assert anomaly_residual(word, z, 300) < 1e-6


def test_anomaly_translation_is_periodicity():
    # c = 0: both sides differ by q-periodicity only
    assert anomaly_residual(SL2_WORDS["T"], 0.2 + 1.1j, 200) < 1e-12
    with pytest.raises(ValueError):
        anomaly_residual((1, 1, 1, 1), 0.2 + 1.1j, 50)


def test_classical_bracket_cusp_form():
    n = 60
    e4, d = eisenstein(4, n), delta(n)
    assert bracket1_classical(e4, e4).is_zero()
    f = e4 * e4 * e4  # weight 12
    b = bracket1_classical(f, d)
    assert b.weight == 26
    ok, _ = membership_in_Mw(b, 26)
    assert ok
    assert b.coeffs[0] == 0
    with pytest.raises(ValueError):
        bracket1_classical(QSeries([1, 2, 3]), d)
