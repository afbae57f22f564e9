import math
from types import SimpleNamespace

import numpy as np
import pytest

from momentcert.moment_cone import NECESSARY, expand_inequalities
from momentcert.spin import (
    CERTIFIED,
    DETECTED,
    INCONCLUSIVE,
    PATTERN_LABELS,
    SymmetricState,
    coherent_state,
    collective_operators,
    dicke_state,
    entanglement_witness,
    ghz_state,
    mixed,
    moments_from_spin,
    random_state,
    spin_form_residuals,
    spin_form_scale,
    spin_moments,
)


def test_state_validation():
    SymmetricState(2, np.eye(3) / 3.0)
    with pytest.raises(ValueError):
        SymmetricState(2, np.eye(4) / 4.0)  # wrong shape
    with pytest.raises(ValueError):
        SymmetricState(2, np.eye(3))  # trace 3
    bad = np.diag([1.5, -0.5, 0.0]).astype(complex)
    with pytest.raises(ValueError):
        SymmetricState(2, bad)  # negative eigenvalue
    nh = np.eye(3, dtype=complex) / 3.0
    nh[0, 1] = 1j * 1e-3
    with pytest.raises(ValueError):
        SymmetricState(2, nh)  # not Hermitian


def test_operator_algebra():
    for n in (1, 2, 5):
        jx, jy, jz = collective_operators(n)
        j = n / 2.0
        assert np.allclose(jx @ jy - jy @ jx, 1j * jz, atol=1e-12)
        assert np.allclose(jy @ jz - jz @ jy, 1j * jx, atol=1e-12)
        casimir = jx @ jx + jy @ jy + jz @ jz
        assert np.allclose(casimir, j * (j + 1) * np.eye(n + 1), atol=1e-12)


def test_coherent_state_moments():
    n = 6
    sm = spin_moments(coherent_state(n, 0.0, 0.0))  # along +z
    j = n / 2.0
    assert abs(sm.jz - j) < 1e-12 and abs(sm.jz2 - j * j) < 1e-12
    assert abs(sm.jx) < 1e-12 and abs(sm.jy) < 1e-12
    # transverse variance of a spin-j coherent state is j/2
    assert abs(sm.jx2 - j / 2.0) < 1e-12
    sm = spin_moments(coherent_state(n, math.pi / 2.0, 0.0))  # along +x
    assert abs(sm.jx - j) < 1e-12 and abs(sm.jz) < 1e-12


def test_dicke_state_moments_and_validation():
    n = 4
    sm = spin_moments(dicke_state(n, 0.0))
    j = n / 2.0
    assert sm.jz == 0.0 and sm.jz2 == 0.0
    assert abs(sm.jx2 - j * (j + 1) / 2.0) < 1e-12
    with pytest.raises(ValueError):
        dicke_state(4, 0.5)
    with pytest.raises(ValueError):
        dicke_state(4, 3.0)


def test_moment_dictionary():
    n = 4
    m = moments_from_spin(spin_moments(coherent_state(n, 0.0, 0.0)), n)
    # all spins up: z = (0, 0, n), z_aa = (0, 0, n(n-1)) up to the dictionary
    assert np.allclose(m.z, [0.0, 0.0, float(n)])
    assert abs(m.zz[2] - n * (n - 1)) < 1e-12
    assert abs(m.zz[0] - (4.0 * n / 4.0 - n)) < 1e-12  # <Jx^2> = j/2


def test_spin_form_equals_scaled_moment_form():
    """Each spin-language residual is exactly kappa times the moment-language
    expanded inequality residual."""
    rng = np.random.default_rng(41)
    for trial in range(60):
        n = int(rng.integers(2, 12))
        st = random_state(n, seed=trial)
        sm = spin_moments(st)
        m = moments_from_spin(sm, n)
        res = expand_inequalities(m, NECESSARY)
        spin_res = spin_form_residuals(sm, n)
        for idx in range(8):
            pattern = tuple((idx >> a) & 1 for a in range(3))
            kappa = spin_form_scale(pattern, n)
            assert abs(spin_res[pattern] - kappa * res[idx]) < 1e-10 * max(
                1.0, n * n * abs(res[idx]) + n * n)


def test_coherent_states_never_detected():
    rng = np.random.default_rng(42)
    for trial in range(40):
        n = int(rng.integers(2, 16))
        theta = math.acos(2 * rng.uniform() - 1)
        phi = 2 * math.pi * rng.uniform()
        rep = entanglement_witness(coherent_state(n, theta, phi))
        assert rep.verdict != DETECTED, (n, theta, phi)


def test_coherent_mixtures_never_detected():
    rng = np.random.default_rng(43)
    for trial in range(20):
        n = int(rng.integers(2, 10))
        comps = [coherent_state(n, math.acos(2 * rng.uniform() - 1),
                                2 * math.pi * rng.uniform()) for _ in range(3)]
        rep = entanglement_witness(mixed(comps, rng.uniform(size=3) + 0.1))
        assert rep.verdict != DETECTED


def test_balanced_dicke_detected_by_squeezing():
    for n in (2, 4, 6, 8, 10):
        rep = entanglement_witness(dicke_state(n, 0.0))
        assert rep.verdict == DETECTED
        hits = [r for r in rep.necessary if r.violated]
        assert [r.label for r in hits] == ["squeezing-z"]
        assert abs(hits[0].spin_residual + n * n) < 1e-9 * n * n


def test_ghz_two_qubits_detected():
    rep = entanglement_witness(ghz_state(2))
    assert rep.verdict == DETECTED
    assert any(r.label.startswith("squeezing") for r in rep.necessary if r.violated)


def test_random_states_respect_universal_constraints():
    """The two trivial inequalities hold for every density matrix, so the
    witness never raises on a valid state."""
    for trial in range(100):
        n = 2 + trial % 9
        rep = entanglement_witness(random_state(n, seed=trial))
        assert rep.verdict in (DETECTED, CERTIFIED, INCONCLUSIVE)
        for r in rep.necessary:
            if r.pattern in ((0, 0, 0), (1, 1, 1)):
                assert not r.violated


def test_invalid_moments_raise_universal_violation():
    # duck-typed object whose "moments" violate the Casimir bound
    fake = SimpleNamespace(n=4, rho=np.diag([2.0, 0, 0, 0, -1.0]).astype(complex))
    with pytest.raises(ValueError):
        entanglement_witness(fake)


def test_witness_requires_two_qubits():
    with pytest.raises(ValueError):
        entanglement_witness(coherent_state(1, 0.0, 0.0))


def test_report_rows_and_json():
    rep = entanglement_witness(dicke_state(4, 0.0))
    assert len(rep.necessary) == 8 and len(rep.sufficient) == 8
    assert {r.pattern for r in rep.necessary} == set(PATTERN_LABELS)
    for r in rep.necessary:
        assert abs((r.rhs - r.lhs) - r.residual) < 1e-12
    obj = rep.to_json_dict()
    assert set(obj) == {"verdict", "moments", "necessary", "sufficient"}
    assert obj["verdict"] == DETECTED


def test_state_json_round_trip():
    st = ghz_state(3)
    st2 = SymmetricState.from_json_dict(st.to_json_dict())
    assert st2.n == 3 and np.allclose(st2.rho, st.rho)


def test_mixed_validation():
    a, b = coherent_state(2, 0.0, 0.0), coherent_state(2, 1.0, 0.0)
    with pytest.raises(ValueError):
        mixed([a, b], [1.0])
    with pytest.raises(ValueError):
        mixed([a, b], [1.0, -1.0])
