import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from shimsign.arith import sieve_primes
from shimsign.characters import principal
from shimsign.estimators import ErrorTermRegressor, ProgressionSignDensity, SatoTateGoodnessOfFit, ShimuraLift
from shimsign.satotate import geometric_checkpoints, st_sample
from shimsign.shimura import invert_lift, synth_hecke_form


def test_params_and_clone():
    est = ShimuraLift(t=3, level=8, k=4, character="8:0,0")
    assert est.get_params() == {"t": 3, "level": 8, "k": 4, "character": "8:0,0"}
    other = clone(est).set_params(t=5)
    assert other.t == 5 and est.t == 3
    for cls in (ErrorTermRegressor, SatoTateGoodnessOfFit, ProgressionSignDensity):
        assert clone(cls()).get_params() == cls().get_params()


def test_shimura_lift_roundtrip():
    A = synth_hecke_form(4, 7, 300)
    values = invert_lift(A, 1, principal(4), 4, 4)[1:]
    est = ShimuraLift(k=4).fit()
    assert est.transform(values) == list(A.coeffs[1:])
    assert est.inverse_transform(A.coeffs[1:]) == values
    assert est.fit_transform(values) == list(A.coeffs[1:])


def test_shimura_lift_validation():
    with pytest.raises(NotFittedError):
        ShimuraLift().transform([1, 2])
    with pytest.raises(ValueError):
        ShimuraLift(level=6).fit()
    with pytest.raises(ValueError):
        ShimuraLift(level=8, character="4:0").fit()
    with pytest.raises(TypeError):
        ShimuraLift(t=1.5).fit()


def test_error_term_regressor():
    x = np.array(geometric_checkpoints(10**6), dtype=float)
    reg = ErrorTermRegressor().fit(x, 2 * x**-0.5)
    assert reg.C_ == pytest.approx(2, abs=1e-9) and reg.alpha_ == pytest.approx(0.5, abs=1e-9)
    assert np.allclose(reg.predict(x), 2 * x**-0.5)
    assert reg.score(x, 2 * x**-0.5) == pytest.approx(1)
    with pytest.raises(ValueError):
        ErrorTermRegressor().fit([1, 2], [1])


def test_sato_tate_goodness_of_fit():
    primes = np.array(list(sieve_primes(200_000)))[:10_000]
    B = st_sample(4, primes.size)
    gof = SatoTateGoodnessOfFit().fit(B, primes)
    assert gof.n_sample_ == 10_000 and gof.ks_ <= 0.03 and gof.dof_ == 19
    assert sum(row[2] for row in gof.interval_table_) == pytest.approx(1)
    restricted = SatoTateGoodnessOfFit(q=4, d=3).fit(B, primes)
    assert restricted.n_sample_ == np.count_nonzero(primes % 4 == 3)
    assert restricted.score(B, primes) == -restricted.ks_
    with pytest.raises(ValueError):
        SatoTateGoodnessOfFit().fit([1.5])
    with pytest.raises(ValueError):
        SatoTateGoodnessOfFit(q=4, d=2).fit(B, primes)


def test_progression_sign_density(delta_preimage):
    est = ProgressionSignDensity(q=5, d=2, level=4).fit(delta_preimage[1:])
    assert 0.45 <= est.pos_ratio_ <= 0.55
    assert est.positive_ + est.negative_ == est.report_.nonzero
