import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halpern.schedules import (COMPLEMENT_SUMMABLE, LIMINF_PRODUCT_POSITIVE, SUM_DIVERGES,
                               SUMMABLE, TENDS_TO_ZERO, UNVERIFIED, CaseRejected, Constant,
                               Explicit, Harmonic, InversePower, OneMinusInversePower, Power,
                               check_case, schedule_from_spec, validate_case)

N_SUM = 10**6


def test_value_examples():
    assert Power(0.5).value_at(4) == pytest.approx(0.5, abs=1e-15)
    assert Harmonic(1, 1).value_at(9) == pytest.approx(0.1, abs=1e-15)
    assert InversePower(2).value_at(3) == 1 / 16
    assert OneMinusInversePower(2).value_at(1) == 0.75
    assert Harmonic(5, 0).value_at(2) == 1.0  # clamped


def test_one_based():
    with pytest.raises(ValueError):
        Power(0.5).value_at(0)
    np.testing.assert_array_equal(Harmonic(1, 0).first(3), [1.0, 0.5, 1 / 3])


def test_tag_lists():
    assert Power(0.7).tags() == {TENDS_TO_ZERO, SUM_DIVERGES}
    assert Harmonic(2, 3).tags() == {TENDS_TO_ZERO, SUM_DIVERGES}
    assert Constant(0.5).tags() == {LIMINF_PRODUCT_POSITIVE}
    assert Constant(0.0).tags() == {SUMMABLE}
    assert Constant(1.0).tags() == {COMPLEMENT_SUMMABLE}
    assert InversePower(2).tags() == {SUMMABLE, TENDS_TO_ZERO}
    assert OneMinusInversePower(3).tags() == {COMPLEMENT_SUMMABLE}
    assert Explicit((0.1, 0.2)).tags() == {UNVERIFIED}


@pytest.mark.parametrize("bad", [
    lambda: Power(0.0), lambda: Power(1.0), lambda: Harmonic(0, 1), lambda: Harmonic(1, -1),
    lambda: Constant(1.5), lambda: InversePower(1.0), lambda: OneMinusInversePower(0.5),
    lambda: Explicit((0.5, 2.0)),
])
def test_parameter_checks(bad):
    with pytest.raises(ValueError):
        bad()


def test_validate_case_examples():
    assert check_case(Power(0.7), OneMinusInversePower(2), "i") is None
    assert check_case(Harmonic(1, 1), InversePower(2), "ii") is None
    assert check_case(InversePower(2), Constant(0.5), "iii") == "alpha lacks sum_diverges"
    with pytest.raises(CaseRejected, match="alpha lacks sum_diverges"):
        validate_case(InversePower(2), Constant(0.5), "iii")
    assert "complement_summable" in check_case(Harmonic(1, 1), Constant(0.5), "i")
    assert check_case(Explicit((0.5,)), Constant(0.5), "iii") == "alpha lacks tends_to_zero"
    with pytest.raises(ValueError):
        check_case(Harmonic(1, 1), Constant(0.5), "iv")


def test_spec_round_trip():
    for s in (Power(0.7), Harmonic(1, 1), Constant(0.25), InversePower(2),
              OneMinusInversePower(2.5), Explicit((0.1, 0.3))):
        assert schedule_from_spec(s.to_spec()) == s
    with pytest.raises(ValueError):
        schedule_from_spec({"family": "power", "theta": 0.5, "extra": 1})
    with pytest.raises(ValueError):
        schedule_from_spec({"family": "nope"})


schedules = st.one_of(
    st.floats(0.01, 0.99).map(Power),
    st.builds(Harmonic, st.floats(0.01, 10), st.floats(0, 100)),
    st.floats(0, 1).map(Constant),
    st.floats(1.01, 5).map(InversePower),
    st.floats(1.01, 5).map(OneMinusInversePower),
)


@given(schedules)
def test_values_in_unit_interval(s):
    n = np.array([1, 2, 3, 10, 10**3, 10**6, 10**7 - 1, 10**7])
    v = s.values(n)
    assert np.all((v >= 0) & (v <= 1))


def _tail_bound(p):
    # sum_{n>=1} (n+1)^-p <= 2^-p + integral_2^inf x^-p dx
    return 2.0 ** -p + 2.0 ** (1 - p) / (p - 1)


@settings(max_examples=20, deadline=None)
@given(st.floats(1.05, 4))
def test_summable_partial_sums_bounded(p):
    n = np.arange(1, N_SUM + 1)
    assert InversePower(p).values(n).sum() <= _tail_bound(p) + 0.01
    assert (1 - OneMinusInversePower(p).values(n)).sum() <= _tail_bound(p) + 0.01
    assert Constant(0).values(n).sum() == 0


@settings(max_examples=20, deadline=None)
@given(st.one_of(st.floats(0.05, 0.9).map(Power),
                 st.builds(Harmonic, st.floats(1, 10), st.floats(0, 100))))
def test_divergent_partial_sums_grow(s):
    assert SUM_DIVERGES in s.tags()
    assert s.first(N_SUM).sum() > 5
