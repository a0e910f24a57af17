from fractions import Fraction

import pytest
from pydantic import ValidationError

from roughiso.models import (
    ConstantsModel,
    ExperimentSpec,
    InstanceModel,
    MappingModel,
    PointSetModel,
    ViolationModel,
)
from roughiso.services.pointsets import Mapping, PointSet
from roughiso.services.verify import MarkovConstants, RiConstants, Violation, ViolationKind


def test_constants_parse_rationals():
    model = ConstantsModel(M="3/2", D="1/2", R=1)
    assert model.ri() == RiConstants(Fraction(3, 2), Fraction(1, 2), 1)
    assert ConstantsModel(M=4, F=2).markov() == MarkovConstants(4, 2, 0)
    assert ConstantsModel.from_domain(MarkovConstants(4, 2, 1)).model_dump() == {
        "M": "4",
        "D": None,
        "F": "2",
        "R": "1",
    }


@pytest.mark.parametrize("payload", [{"M": "x/2"}, {"M": 1, "Q": 1}, {"M": 1.5}])
def test_constants_reject_bad_input(payload):
    with pytest.raises(ValidationError):
        ConstantsModel.model_validate(payload)


def test_mapping_model_keeps_fractions():
    T = Mapping((0, 1), (0, Fraction(1, 2)), (0, Fraction(1, 2)))
    model = MappingModel.from_domain(T)
    assert model.image == [0, "1/2"]
    assert model.to_domain() == T


def test_instance_model_builds_domain_objects():
    instance = InstanceModel.model_validate(
        {"A": {"points": [0, 2]}, "B": {"points": [0, 3]}, "mapping": {"domain": [0, 2], "image": [0, 3], "codomain": [0, 3]}}
    )
    assert instance.A.to_domain() == PointSet((0, 2))
    assert instance.mapping.to_domain().image == (0, 3)
    assert PointSetModel.from_domain(PointSet((0, 2))).points == [0, 2]


def test_violation_model():
    model = ViolationModel.from_domain(Violation(ViolationKind.DENSITY, (10,), (2,)))
    assert model.model_dump() == {"kind": "Density", "witness": ["10"], "indices": [2]}


@pytest.mark.parametrize(
    "change",
    [{"grid": []}, {"trials": 0}, {"kind": "unknown"}, {"seed": -1}, {"extra": True}],
)
def test_experiment_spec_validation(change):
    payload = {"name": "x", "kind": "comb_tails", "grid": [{"m": 1}], "trials": 5, "seed": 1}
    payload.update(change)
    with pytest.raises(ValidationError):
        ExperimentSpec.model_validate(payload)
