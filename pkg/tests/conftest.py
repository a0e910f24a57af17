import logging

import pytest

from roughiso.libs.seeding import Seed
from roughiso.services.construct import Params, default_params
from roughiso.services.pointsets import PointSet


@pytest.fixture(autouse=True)
def _quiet_parameter_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="roughiso.services.construct")


@pytest.fixture
def seed() -> Seed:
    return Seed(20240917)


@pytest.fixture
def small_params() -> Params:
    """Desk-scale parameters: long gaps are rare and blue runs average 256 gaps."""

    return default_params(16).with_overrides(M=8, F=8, R=8, K=8)


@pytest.fixture
def unit_block() -> tuple[PointSet, PointSet, PointSet]:
    """``U1`` with eight unit gaps, a single long gap ``V`` and ``U2`` with gaps of 3."""

    U1 = PointSet(tuple(range(9)))
    V = PointSet((0, 20))
    U2 = PointSet(tuple(range(0, 31, 3)))
    return U1, V, U2
