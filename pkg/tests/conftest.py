import pytest

from augdesign import data


@pytest.fixture(scope="session")
def local_ensembles():
    """One single-scenario ensemble per response, with the published local
    optima installed as the efficiency denominators."""
    out = {}
    for name in data.RESPONSES:
        ens = data.single_scenario_ensemble(name)
        ens.set_optimal(0, data.LOCAL_D_OPTIMAL[name], data.LOCAL_D1_OPTIMAL[name])
        out[name] = ens
    return out


@pytest.fixture(scope="session")
def fixed_gamma_ensemble():
    """Equal-weight four-model ensemble with published-design caches."""
    ens = data.model_ensemble("fixed")
    for i, name in enumerate(data.RESPONSES):
        ens.set_optimal(i, data.LOCAL_D_OPTIMAL[name], data.LOCAL_D1_OPTIMAL[name])
    return ens
