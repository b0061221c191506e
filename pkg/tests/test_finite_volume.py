import io
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from hardrods import (ActivityModel, CapExceeded, MultiIndex, NotFluid, Scaled, StretchedExp,
                      ZeroLengthSpecies, canonical_Z_continuous, packing_distribution,
                      packing_fraction, pressure, renewal_asymptotics_check, xi_continuous,
                      xi_discrete, xi_discrete_bruteforce)
from hardrods.finite_volume import (HISTOGRAM_CSV_COLUMNS, XI_CSV_COLUMNS,
                                    write_histogram_csv, write_xi_csv)

from conftest import cont, disc


def test_small_lattice_values():
    assert xi_discrete(disc((1, 1.0)), 1).value == 2
    assert xi_discrete(disc((1, 1.0), (2, 0.5)), 2, exact=True).value == Fraction(9, 2)
    assert xi_discrete_bruteforce(disc((1, 1.0), (2, 0.5)), 2).value == Fraction(9, 2)
    assert xi_discrete(disc((1, 1.0)), 0).value == 1


def test_monomer_powers_of_two():
    m = disc((1, 1.0))
    for L in range(31):
        assert xi_discrete(m, L, exact=True).value == 2 ** L


def test_bruteforce_cap():
    with pytest.raises(CapExceeded):
        xi_discrete_bruteforce(disc((1, 1.0)), 23)


def test_duplicate_lengths_merge():
    a = xi_discrete(disc((2, 0.25), (2, 0.25), (1, 0.5)), 9, exact=True).value
    b = xi_discrete(disc((2, 0.5), (1, 0.5)), 9, exact=True).value
    assert a == b == xi_discrete_bruteforce(disc((2, 0.25), (2, 0.25), (1, 0.5)), 9).value


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 5), st.sampled_from([0.125, 0.25, 0.5, 1.0, 1.5])),
                min_size=1, max_size=4),
       st.integers(0, 12))
def test_recurrence_equals_enumeration(entries, L):
    m = disc(*entries)
    assert xi_discrete(m, L, exact=True).value == xi_discrete_bruteforce(m, L).value


def test_canonical_values(frozen):
    assert canonical_Z_continuous(MultiIndex({1: 1}), [1], 2) == 1
    assert canonical_Z_continuous(MultiIndex({1: 2}), [1], 3) == Fraction(1, 2)
    assert float(canonical_Z_continuous(MultiIndex({1: 2}), [1], 3)) == pytest.approx(
        frozen["two_rods_L3"], abs=1e-10)
    assert canonical_Z_continuous(MultiIndex({1: 1}), [Fraction(5, 2)], Fraction(5, 2)) == 0


def test_continuous_partition_small():
    m = cont((1.0, 0.2))
    assert float(xi_continuous(m, 2).value) == pytest.approx(1.2, abs=1e-15)
    assert float(xi_continuous(m, 3).value) == pytest.approx(1.42, abs=1e-15)
    assert xi_continuous(cont(), 7.5).value == 1


def test_continuous_truncation_bound():
    m = cont((1.0, 0.2))
    full = xi_continuous(m, 12)
    cut = xi_continuous(m, 12, degree_cap=3)
    assert full.truncation_bound == 0
    assert 0 < full.value - cut.value <= cut.truncation_bound


def test_zero_length_rejected():
    with pytest.raises(ZeroLengthSpecies):
        xi_continuous(cont((0.0, 0.1), (1.0, 0.2)), 3)


def test_continuous_pressure_limit(frozen):
    m = cont((1.0, 0.2))
    errs = [abs(xi_continuous(m, L).log / L - frozen["p_cont_monomer_0.2"]) for L in (10, 20, 40)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.05


def test_lattice_pressure_limit():
    m = disc((1, 1.0), (2, 0.5))
    rep = renewal_asymptotics_check(m, [50])
    p = pressure(m).p
    for L in (50, 200, 800):
        bound = 5 / L * abs(math.log(rep.mu)) + 1e-9
        assert abs(xi_discrete(m, L).log / L - p) <= bound


def test_renewal_constants(frozen):
    rep = renewal_asymptotics_check(disc((1, 1.0), (2, 0.5)), [10, 100, 1000, 2000])
    assert rep.xi == pytest.approx(frozen["lattice_dimer_xi"], abs=1e-15)
    assert rep.mu == pytest.approx(frozen["lattice_dimer_mu"], abs=1e-14)
    assert rep.epsilon[-1] < 1e-8
    assert rep.epsilon[0] > rep.epsilon[1]


def test_renewal_trivial_cases():
    assert max(renewal_asymptotics_check(disc((1, 1.0)), [1, 5, 30]).epsilon) < 1e-40
    zero = renewal_asymptotics_check(disc(), [1, 5, 30])
    assert zero.p == 0 and zero.mu == 1 and max(zero.epsilon) == 0


def test_renewal_not_fluid():
    with pytest.raises(NotFluid):
        renewal_asymptotics_check(ActivityModel("discrete", Scaled(0.1, StretchedExp(0.5))), [10])


def test_histogram_small():
    h = packing_distribution(disc((1, 1.0), (2, 0.5)), 2)
    assert h.sigma == (0.0, 0.5, 1.0)
    for got, want in zip(h.mass, (1 / 4.5, 2 / 4.5, 1.5 / 4.5)):
        assert got == pytest.approx(want, abs=1e-15)


def test_histogram_zero_model():
    h = packing_distribution(disc(), 10)
    assert h.mass[0] == 1.0 and sum(h.mass) == 1.0
    hc = packing_distribution(cont(), 3.0)
    assert hc.sigma == (0.0,) and hc.mass == (1.0,)


def test_histogram_mean_monomer():
    m = disc((1, 1.0))
    h = packing_distribution(m, 400)
    assert abs(sum(h.mass) - 1) < 1e-12
    assert abs(h.mean() - packing_fraction(m)) < 0.01


def test_continuous_histogram_matches_partition_function():
    m = cont((1.0, 0.2), (0.5, 0.3))
    L = 4.0
    h = packing_distribution(m, L)
    xi = xi_continuous(m, L).value
    # mass at sigma = 0 is 1/Xi
    assert h.mass[0] == pytest.approx(float(1 / xi), rel=1e-12)
    assert abs(sum(h.mass) - 1) < 1e-12


def test_close_packing_concentration():
    cp = ActivityModel("discrete", Scaled(0.1, StretchedExp(0.5)))
    below = []
    for L in (100, 200, 400):
        trunc = cp.truncated(L)
        # omitted rods are longer than the box, so they carry zero weight
        below.append(packing_distribution(trunc, L).mass_below(0.95))
    assert below[0] > below[1] > below[2]


def test_csv_writers():
    fh = io.StringIO()
    write_xi_csv(fh, [{"L": 1, "Xi": "2", "log_Xi": 0.69, "log_Xi_over_L": 0.69,
                       "p_infinity": 0.69, "epsilon_renewal": 0.0}])
    assert fh.getvalue().splitlines()[0] == ",".join(XI_CSV_COLUMNS)
    fh = io.StringIO()
    write_histogram_csv(fh, packing_distribution(disc((1, 1.0), (2, 0.5)), 2))
    lines = fh.getvalue().splitlines()
    assert lines[0] == ",".join(HISTOGRAM_CSV_COLUMNS)
    assert lines[1] == "2,0.0,0.2222222222222222"


def test_high_precision_is_needed():
    # log Xi_5000 ~ 4000 overflows doubles; the DP value still has 50 digits
    v = xi_discrete(disc((1, 1.0), (2, 0.5)), 5000).value
    assert isinstance(v, mpmath.mpf)
    assert float(mpmath.log(v)) > 3000
