import pytest

from epibarrier import (
    Case,
    ConstraintCaps,
    ModelParams,
    compute_regions,
)

# Dengue outbreak estimates for Cali, Colombia (daily rates).
CALI = dict(A_m=0.076608, A_h=0.0722633, gamma=0.1, u_min=0.0333, u_max=0.05)

CAPS = {
    "comfortable": (0.7, 0.7),
    "comfortable_viable": (0.7, 0.2),
    "viable": (0.15, 0.2),
    "desperate": (0.15, 0.04),
}


@pytest.fixture(scope="session")
def cali() -> ModelParams:
    return ModelParams(**CALI)


@pytest.fixture(scope="session")
def caps_comfortable() -> ConstraintCaps:
    return ConstraintCaps(*CAPS["comfortable"])


@pytest.fixture(scope="session")
def caps_cv() -> ConstraintCaps:
    return ConstraintCaps(*CAPS["comfortable_viable"])


@pytest.fixture(scope="session")
def caps_viable() -> ConstraintCaps:
    return ConstraintCaps(*CAPS["viable"])


@pytest.fixture(scope="session")
def caps_desperate() -> ConstraintCaps:
    return ConstraintCaps(*CAPS["desperate"])


@pytest.fixture(scope="session")
def pipelines(cali):
    """Classification, curves and regions for all four study scenarios."""
    out = {}
    for name, caps in CAPS.items():
        c = ConstraintCaps(*caps)
        cls, curves, adm, mrpi = compute_regions(cali, c)
        out[name] = dict(caps=c, cls=cls, curves=curves, adm=adm, mrpi=mrpi)
    assert {v["cls"].case for v in out.values()} == set(Case)
    return out
