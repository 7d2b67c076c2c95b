import math

import numpy as np
import pytest

from windowmax import laws


def test_bernoulli_metadata():
    b = laws.bernoulli_pm1()
    assert b.mean == 0.0
    assert b.variance == 1.0
    assert b.ess_sup == 1.0
    lo, hi = b.cgf_domain
    # the positive part of the domain is all of (0, inf)
    assert lo < 0 < hi and math.isinf(hi)


def test_gaussian_rejects_bad_variance():
    with pytest.raises(ValueError):
        laws.gaussian(0.0)
    with pytest.raises(ValueError):
        laws.gaussian(-1.0)


def test_squared_gaussian_domain_edge():
    law = laws.squared_gaussian_weight(2.0)
    assert law.mean == 2.0
    assert law.cgf_domain[1] == pytest.approx(1.0 / 4.0)
    assert math.isinf(law.ess_sup)


def test_constant_law():
    law = laws.constant(3.5)
    assert law.mean == 3.5
    assert law.variance == 0.0
    assert law.ess_sup == 3.5


def _gaussian_grid(sigma2=1.0, lo=-2.0, hi=4.0, num=301):
    taus = np.linspace(lo, hi, num)
    return taus, 0.5 * sigma2 * taus**2


def test_tabulated_matches_its_source_curve():
    taus, logphis = _gaussian_grid()
    law = laws.tabulated(taus, logphis)
    from windowmax.rates import cgf

    assert cgf(law, 0.0) == 0.0
    # monotone cubic interpolation error is O(h^3) on the 0.02 grid
    for tau in (0.1, 0.5, 1.0, 3.33):
        assert cgf(law, tau) == pytest.approx(0.5 * tau**2, abs=1e-4)
    assert law.mean == pytest.approx(0.0, abs=1e-8)
    assert law.variance == pytest.approx(1.0, rel=1e-3)


def test_tabulated_shift_enforces_zero_at_origin():
    taus, logphis = _gaussian_grid()
    law = laws.tabulated(taus, logphis + 0.7)  # offset curve
    from windowmax.rates import cgf

    assert cgf(law, 0.0) == 0.0
    assert cgf(law, 1.0) == pytest.approx(0.5, abs=1e-4)


def test_tabulated_grid_validation():
    with pytest.raises(ValueError):
        laws.tabulated([0.0, 1.0], [0.0, 0.5])  # too few points
    with pytest.raises(ValueError):
        laws.tabulated([0.0, 1.0, 0.5], [0.0, 0.1, 0.2])  # not increasing
    with pytest.raises(ValueError):
        laws.tabulated([1.0, 2.0, 3.0], [0.0, 0.1, 0.3])  # does not bracket 0


def test_tabulated_nonconvex_grid_warns():
    taus = np.array([-1.0, 0.0, 1.0, 2.0])
    logphis = np.array([0.5, 0.0, 1.0, 1.2])  # concave kink past tau=1
    with pytest.warns(laws.NonConvexGridWarning):
        laws.tabulated(taus, logphis)


def test_tabulated_csv_round_trip(tmp_path):
    taus, logphis = _gaussian_grid(num=121)
    path = tmp_path / "curve.csv"
    lines = ["tau,logphi"] + [f"{float(t)!r},{float(v)!r}" for t, v in zip(taus, logphis)]
    path.write_text("\n".join(lines) + "\n")
    law = laws.tabulated_from_csv(str(path))
    from windowmax.rates import cgf

    assert cgf(law, 2.0) == pytest.approx(2.0, abs=1e-4)


def test_tabulated_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0,0\n1,0.5\n")
    with pytest.raises(ValueError, match="tau,logphi"):
        laws.tabulated_from_csv(str(path))


def test_window_law_validation():
    with pytest.raises(ValueError):
        laws.poisson_window(0.0)
    with pytest.raises(ValueError):
        laws.bounded_support_window(10.0, (1.2, 2.0))  # must straddle 1
    w = laws.deterministic_window(7.0)
    assert w.k == 7.0
    w = laws.deterministic_window(7.0, k=3)
    assert w.k == 3.0
    with pytest.raises(ValueError):
        laws.deterministic_window(7.0, k=-1)
