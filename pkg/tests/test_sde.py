import numpy as np
import pytest

from opa_photothermal.config import DEFAULTS
from opa_photothermal.errors import UnstableIntegration
from opa_photothermal.sde import LinearSDE, _discretize, langevin_system, sde_oracle
from opa_photothermal.spectra import build_model, variance_spectrum


def test_drift_matches_frequency_domain_matrix():
    # the intra-cavity block has the same poles as the frequency-domain model
    p = DEFAULTS.replace(sigma_a_abs=0.0, sigma_b_abs=0.0)
    A = langevin_system(p).A
    ref = np.sort_complex(np.linalg.eigvals(build_model(p).system.M_c))
    got = np.sort_complex(np.linalg.eigvals(A[:4, :4]))
    assert np.allclose(got, ref, rtol=1e-10)


def test_passive_vacuum_is_shot_noise():
    p = DEFAULTS.replace(kappa0=0.0, P_pump=0.5, sigma_a_abs=0.0, sigma_b_abs=0.0)
    for est in sde_oracle(p, [1e5], replicas=6):
        for V, err in ((est.V1, est.V1_err), (est.V2, est.V2_err)):
            assert abs(V - 1) < 4 * err + 0.02


def test_same_seed_same_numbers():
    a = sde_oracle(DEFAULTS, [2e3], rng_seed=7, replicas=2, segments=64)
    b = sde_oracle(DEFAULTS, [2e3], rng_seed=7, replicas=2, segments=64)
    c = sde_oracle(DEFAULTS, [2e3], rng_seed=8, replicas=2, segments=64)
    assert a == b
    assert a != c


def test_agrees_with_frequency_domain_in_squeezing_band():
    f = 2e5
    (est,) = sde_oracle(DEFAULTS, [f], replicas=8)
    V1, V2 = variance_spectrum(DEFAULTS, np.array([2 * np.pi * f]))
    assert est.V1 == pytest.approx(V1[0], rel=0.1)
    assert est.V2 == pytest.approx(V2[0], rel=0.1)
    assert est.segments >= 64 and est.replicas == 8


def test_short_duration_rejected():
    with pytest.raises(ValueError):
        sde_oracle(DEFAULTS, [1e3], duration=1e-3)


def test_unstable_drift_reported():
    sys = LinearSDE(np.diag([-1.0, 0.5]), np.eye(2), np.ones(2), np.eye(2), np.zeros((2, 2)))
    with pytest.raises(UnstableIntegration):
        _discretize(sys, 0.1)
