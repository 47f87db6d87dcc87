import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from convexdom.core import StateLevels
from convexdom.densities import (
    Exponential,
    Gamma,
    Gaussian,
    PowerLaw,
    Uniform,
    check_dispersive,
    check_hazard_rate,
    check_theorem4_ratio,
    discretize_to_kernel,
    evaluate,
    is_log_concave,
    moments,
)
from convexdom.errors import InsufficientCoverage, OutOfSupport, QuantileOutOfRange, WrongFamilies
from convexdom.orders import check_tp2

# scipy.stats parametrizations of the same laws
ORACLES = [
    (Gaussian(1.7), stats.norm(scale=1.7)),
    (Exponential(0.4), stats.expon(scale=1 / 0.4)),
    (Gamma(2.5), stats.gamma(2.5)),
    (PowerLaw(3.1), stats.lomax(2.1)),
    (Uniform(3.0), stats.uniform(loc=-1.5, scale=3.0)),
]


@pytest.mark.parametrize("fam,ref", ORACLES, ids=lambda v: getattr(v, "name", ""))
class TestAgainstScipy:
    def test_pdf_cdf(self, fam, ref):
        w = ref.ppf(np.linspace(0.01, 0.99, 37))
        assert np.allclose(fam.pdf(w), ref.pdf(w), rtol=1e-10, atol=1e-14)
        assert np.allclose(fam.cdf(w), ref.cdf(w), rtol=1e-10, atol=1e-14)
        assert np.allclose(fam.ccdf(w), ref.sf(w), rtol=1e-9, atol=1e-14)

    def test_quantile(self, fam, ref):
        q = np.linspace(0.001, 0.999, 41)
        assert np.allclose(fam.quantile(q), ref.ppf(q), rtol=1e-8, atol=1e-10)

    def test_moments(self, fam, ref):
        m = moments(fam)
        assert m.mean == pytest.approx(ref.mean(), rel=1e-9, abs=1e-12)
        assert m.variance == pytest.approx(ref.var(), rel=1e-9)
        assert m.differential_entropy == pytest.approx(float(ref.entropy()), abs=1e-6)


class TestEvaluate:
    def test_outside_support(self):
        with pytest.raises(OutOfSupport):
            evaluate(Exponential(1.0), "pdf", -1.0)

    def test_bad_quantile(self):
        with pytest.raises(QuantileOutOfRange):
            evaluate(Gaussian(1.0), "quantile", 1.0)

    @given(st.floats(0.01, 0.99))
    def test_quantile_roundtrip(self, q):
        for fam in (Gaussian(0.7), Exponential(2.0), Gamma(3.0), PowerLaw(4.0)):
            assert evaluate(fam, "cdf", evaluate(fam, "quantile", q)) == pytest.approx(q, abs=1e-9)


class TestOrders:
    def test_log_concavity(self):
        assert is_log_concave(Gaussian(1.0))
        assert is_log_concave(Gamma(2.0))
        assert not is_log_concave(PowerLaw(3.1))

    def test_scale_families_dispersive(self):
        assert check_dispersive(Gaussian(2.0), Gaussian(1.0)).holds
        assert check_dispersive(Gaussian(1.0), Gaussian(2.0)).fails

    def test_exponential_hazard(self):
        assert check_hazard_rate(Exponential(1.0), Exponential(2.0)).holds
        assert check_hazard_rate(Exponential(2.0), Exponential(1.0)).fails

    def test_centered_normal_ccdf_ratio_not_monotone(self):
        # the ratio is 1 at -inf and at 0, larger in between
        w = np.array([-8.0, -2.0, 0.0])
        r = Gaussian(1.0).ccdf(w) / Gaussian(2.0).ccdf(w)
        assert r[1] > r[0] and r[1] > r[2] and r[2] == pytest.approx(1.0)
        assert check_hazard_rate(Gaussian(2.0), Gaussian(1.0)).fails

    def test_theorem4_ratio_wrong_families(self):
        with pytest.raises(WrongFamilies):
            check_theorem4_ratio(Exponential(1.0), Exponential(1.0))

    def test_powerlaw_variance(self):
        assert moments(PowerLaw(3.1)).variance == pytest.approx(2.1 / (1.21 * 0.1))
        assert math.isinf(moments(PowerLaw(2.5)).variance)


class TestDiscretize:
    def test_rows_stochastic_and_tp2(self):
        d = discretize_to_kernel(Gaussian(1.0), StateLevels([0.0, 1.0, 2.0]), (-7.0, 9.0, 40))
        assert np.allclose(d.kernel.matrix.sum(axis=1), 1.0)
        assert check_tp2(d.kernel).holds
        assert np.all(d.truncated < 1e-6)

    def test_drops_empty_bins(self):
        d = discretize_to_kernel(Exponential(5.0), StateLevels([0.0, 1.0]), (-3.0, 8.0, 11))
        assert d.dropped_bins[:3] == (0, 1, 2)
        assert d.kernel.n_obs == 11 - len(d.dropped_bins)

    def test_coverage(self):
        with pytest.raises(InsufficientCoverage):
            discretize_to_kernel(Gaussian(1.0), StateLevels([0.0, 5.0]), (-1.0, 1.0, 10))
