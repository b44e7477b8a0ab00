import numpy as np
import pytest

from octahedral.errors import CaseMismatch
from octahedral.singularity import closed_form_factors, factor_agreement, fit_common_scale
from octahedral.singularity.factors import CASES, case_instances

K = 81 * np.sqrt(3) / 4


@pytest.mark.parametrize("case", CASES)
def test_factor_agreement(case):
    rng = np.random.default_rng(CASES.index(case))
    out = factor_agreement(case, case_instances(case, rng, 40))
    zeros = out.pop("zeros")
    assert out
    for key, (k, rel) in out.items():
        assert rel < 1e-8, (case, key)
        assert abs(k) == pytest.approx(K, rel=1e-10), (case, key)
    for key, z in zeros.items():
        assert z < 1e-10, (case, key)


def test_signs_of_the_common_constant():
    rng = np.random.default_rng(0)
    signs = {}
    for case in CASES:
        out = factor_agreement(case, case_instances(case, rng, 10))
        out.pop("zeros")
        signs.update({(case, key): np.sign(k) for key, (k, _) in out.items()})
    assert signs == {("1a", "c0"): -1, ("2", "c2"): 1, ("2a", "c1"): 1, ("2a", "c0"): -1,
                     ("general", "dc1_dx"): 1}


def test_wrong_case_is_rejected():
    with pytest.raises(CaseMismatch):
        closed_form_factors("1a", (1, 0.2, 0, 0.3), (0, 0, 1))
    with pytest.raises(CaseMismatch):
        closed_form_factors("2", (1, 0.2, 0.1, 0.3), (0, 0, 1))
    with pytest.raises(CaseMismatch):
        closed_form_factors("nonsense", (1, 0, 0, 0), (0, 0, 1))


def test_fit_common_scale():
    k, rel = fit_common_scale([1, 2, 3], [2.5, 5, 7.5])
    assert k == pytest.approx(2.5) and rel < 1e-15
