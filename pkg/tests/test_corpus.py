from pathlib import Path

import pytest

from roughiso.libs.utils import read_json
from roughiso.models import InstanceModel
from roughiso.services.oracle import analytic_counterexample, minimal_multiplicative_constant
from roughiso.services.verify import verify_rough_isometry

CORPUS = Path(__file__).resolve().parents[1] / "corpus" / "v1" / "counterexamples"


@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_counterexample_files_match_family(L):
    raw = read_json(CORPUS / f"L{L}.json")
    instance = InstanceModel.model_validate(raw)
    A, B, witness = analytic_counterexample(L)

    assert instance.A.to_domain() == A
    assert instance.B.to_domain() == B
    assert instance.mapping is not None and instance.mapping.to_domain() == witness
    assert instance.constants is not None
    assert verify_rough_isometry(A, B, witness, instance.constants.ri()) is None
    assert minimal_multiplicative_constant(A, B, "increasing") == raw["minimal_increasing_M"]
