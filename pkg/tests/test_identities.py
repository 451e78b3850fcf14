import cmath
import json
import math

import numpy as np
import pytest

from dliouville import identities as ids
from dliouville.errors import AdmissibilityError
from dliouville.qdilog import CouplingParams

B1 = CouplingParams(1.0)
B08 = CouplingParams(0.8)


def test_psi_residue_forms_agree():
    for P in (B1, B08):
        for p in ids.sample_points("psi_consistency", P, 5, seed=3):
            a = ids.psi_closed(P, p["u"], p["v"], p["w"], "res1")
            b = ids.psi_closed(P, p["u"], p["v"], p["w"], "res2")
            assert ids.residual(a, b) < 1e-10


def test_psi_integral_matches_closed_form():
    for p in ids.sample_points("psi_consistency", B1, 3, seed=5):
        assert ids.verify_identity("psi_consistency", B1, p) < 1e-6


@pytest.mark.parametrize("idn", ["raman", "ramanbar", "fourier_plus", "fourier_minus",
                                 "fourier_inverse"])
def test_single_integral_identities(idn):
    for P in (B1, B08):
        for p in ids.sample_points(idn, P, 2, seed=1):
            assert ids.verify_identity(idn, P, p) < ids.TOLERANCES[ids.IdentityId(idn)]


def test_fourier_closed_forms_agree():
    # the two closed forms are related by the inversion relation
    for P in (B1, B08):
        for p in ids.sample_points("fourier_plus", P, 4, seed=2):
            for sg in (1, -1):
                a = ids.fourier_closed(P, p["w"], sg, 0)
                b = ids.fourier_closed(P, p["w"], sg, 1)
                assert ids.residual(a, b) < 1e-10


def test_heine():
    p = ids.sample_points("heine", B1, 1, seed=4)[0]
    assert ids.verify_identity("heine", B1, p) < 1e-5


def test_psi2_symmetric_in_numerator_parameters():
    p = ids.sample_points("heine", B1, 1, seed=9)[0]
    a, b, c, w = p["a"], p["b"], p["c"], p["w"]
    x = ids.ihg(B1, [a, b], [c], w).value
    y = ids.ihg(B1, [b, a], [c], w).value
    assert ids.residual(x, y) < 1e-8


def test_inadmissible_point_names_condition():
    bad = ids.SamplePoint({"w": 0.1 + 0.3j})
    with pytest.raises(AdmissibilityError) as e:
        ids.verify_identity("fourier_plus", B1, bad)
    assert e.value.violated == "Im w < 0"
    with pytest.raises(AdmissibilityError) as e:
        ids.ihg(B1, [B1.c_b + 0.1j], [], -0.5j)
    assert "a_1" in e.value.violated


def test_unitarity_requires_unitary_coupling():
    P = CouplingParams(cmath.exp(1j * math.pi / 6) * 1.1)
    with pytest.raises(AdmissibilityError):
        ids.verify_identity("unitarity", P, ids.SamplePoint({"z": 0.1j}))


def test_sampling_is_deterministic():
    a = [p.to_json() for p in ids.sample_points("heine", B08, 3, seed=17)]
    b = [p.to_json() for p in ids.sample_points("heine", B08, 3, seed=17)]
    c = [p.to_json() for p in ids.sample_points("heine", B08, 3, seed=18)]
    assert a == b and a != c


def test_report_lines_are_json():
    lines = list(ids.report_lines([{"id": "x", "residual": 1e-12}], {"b": [1.0, 0.0]}))
    head = json.loads(lines[0])
    assert head["schema"] == ids.REPORT_SCHEMA
    assert json.loads(lines[1])["id"] == "x"


def test_alpha_component_domain():
    with pytest.raises(ValueError):
        ids.alpha_component(B1, -0.1, 0.0)
    with pytest.raises(ValueError):
        ids.alpha_component(B1, 0.3, 0.0, eps=-1.0)
    # on the real line the two phi factors are unimodular conjugates
    v = ids.alpha_component(B1, 0.3, np.array([-0.7, 0.2, 1.1]), eps=0.0)
    assert np.all(np.isfinite(v))


def test_q_eigen_eps_limit_matches_richardson():
    s, z = 0.3, 0.2 + 0.1j
    direct = ids.q_eigen_transform(B1, s, z).value
    extrap = ids.q_eigen_richardson(B1, s, z, eps=1e-2)
    assert abs(direct - extrap) / abs(direct) < 1e-5


def test_q_eigen_rejects_negative_s():
    with pytest.raises(ValueError):
        ids.q_eigen_transform(B1, -0.2, 0.1j)


def test_baxter_at_s_zero():
    assert ids.check_baxter_n1(B1, 0.0, 0.1 + 0.2j) < 1e-8
