# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import pytest

from dcb_allocation_core.core.mac_phy import default_activity_model
from dcb_allocation_core.core.models.params import MacPhyParams
from dcb_allocation_core.core.models.scheme import ProblemInstance
from dcb_allocation_core.core.scenarios import preset
from dcb_allocation_core.services.optimizer_service import OptimizerService


@pytest.fixture
def params():
    return MacPhyParams()


@pytest.fixture
def model():
    return default_activity_model()


@pytest.fixture
def optimizer():
    return OptimizerService()


@pytest.fixture
def pair_net():
    return preset("bonding-pair")


@pytest.fixture
def instance_factory(model, params):
    def build(num_wlans: int, num_channels: int) -> ProblemInstance:
        return ProblemInstance(num_wlans, num_channels, model, params.fit)
    return build
