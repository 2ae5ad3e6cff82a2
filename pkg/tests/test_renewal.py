import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from mcaoi.errors import NonConvergenceError, OutOfDomainError
from mcaoi.renewal import Backend, geometric_moments, moments_series_oracle

P_GRID = [round(0.05 * i, 2) for i in range(20)]


@pytest.mark.parametrize("backend", list(Backend))
def test_certain_success(backend):
    mom = geometric_moments(0.0, backend)
    assert (mom.m1, mom.m2, mom.m3) == (1.0, 1.0, 1.0)
    assert mom.ok


def test_rederived_half():
    mom = geometric_moments(0.5, Backend.REDERIVED)
    assert (mom.m1, mom.m2, mom.m3) == pytest.approx((2.0, 6.0, 26.0), rel=1e-15)
    assert mom.ok


def test_printed_half_is_flagged_not_raised():
    mom = geometric_moments(0.5, Backend.AS_PRINTED)
    assert (mom.m1, mom.m2, mom.m3) == pytest.approx((2.0, 6.0, 2.0), rel=1e-15)
    assert not mom.ok
    assert [d.code for d in mom.diagnostics] == ["third_below_second"]


def test_printed_third_moment_breaks_invariant_somewhere():
    assert any(not geometric_moments(p, Backend.AS_PRINTED).ok for p in P_GRID[1:])


def test_backend_parse_aliases():
    assert Backend.parse("as-printed") is Backend.AS_PRINTED
    assert Backend.parse("AsPrinted") is Backend.AS_PRINTED
    assert Backend.parse("rederived") is Backend.REDERIVED


def test_oracle_examples():
    assert moments_series_oracle(0.0, 3) == 1.0
    assert moments_series_oracle(0.5, 2) == pytest.approx(6.0, abs=1e-9)
    assert moments_series_oracle(0.9, 1) == pytest.approx(10.0, abs=1e-9)


@pytest.mark.parametrize("p", P_GRID)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_rederived_matches_series(p, k):
    mom = geometric_moments(p)
    oracle = moments_series_oracle(p, k, tail_tol=1e-13)
    assert abs((mom.m1, mom.m2, mom.m3)[k - 1] - oracle) / oracle < 1e-9


@pytest.mark.parametrize("p", [0.05, 0.3, 0.75, 0.95])
def test_rederived_matches_scipy_raw_moments(p):
    mom = geometric_moments(p)
    dist = stats.geom(1 - p)
    assert (mom.m1, mom.m2, mom.m3) == pytest.approx([dist.moment(k) for k in (1, 2, 3)], rel=1e-10)


def test_oracle_agrees_within_ten_tail_tols():
    tol = 1e-10
    for p in (0.2, 0.6, 0.9):
        assert abs(moments_series_oracle(p, 3, tol) - geometric_moments(p).m3) < 10 * tol


def test_oracle_non_convergence():
    with pytest.raises(NonConvergenceError):
        moments_series_oracle(0.99, 3, tail_tol=1e-12, max_terms=50)


@pytest.mark.parametrize("p", [-0.1, 1.0, 1.5])
def test_out_of_domain(p):
    with pytest.raises(OutOfDomainError):
        geometric_moments(p)
    with pytest.raises(OutOfDomainError):
        moments_series_oracle(p, 1)


def test_oracle_rejects_bad_order():
    with pytest.raises(ValueError):
        moments_series_oracle(0.5, 4)


@given(st.floats(0.0, 0.999))
def test_rederived_invariants(p):
    mom = geometric_moments(p)
    assert mom.m1 >= 1.0
    assert mom.m2 >= mom.m1**2 * (1 - 1e-12)
    assert mom.m3 >= mom.m2 * (1 - 1e-12)
    assert mom.ok
