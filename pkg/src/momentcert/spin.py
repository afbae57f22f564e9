"""Collective-spin entanglement witness for symmetric n-qubit states (d=3).

States live in the n+1 dimensional Dicke basis |j,m>, j = n/2, ordered
m = j, j-1, ..., -j.  The moment dictionary maps first and second collective
spin moments to a d=3 moment vector; the eight necessary-for-separability
inequalities and their sufficient-side counterparts then decide detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MomentVector, ProblemDims
from .moment_cone import (
    NECESSARY,
    SUFFICIENT,
    expand_inequalities,
    pattern_of_index,
    sufficient_condition,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_TOL = 1e-10
WITNESS_TOL = 1e-9

DETECTED = "EntanglementDetected"
CERTIFIED = "SeparabilityCertified"
INCONCLUSIVE = "Inconclusive"

#: human-readable labels for the eight sign patterns (t1, t2, t3)
PATTERN_LABELS = {
    (0, 0, 0): "variance-sum (trivial)",
    (1, 0, 0): "planar-x",
    (0, 1, 0): "planar-y",
    (0, 0, 1): "planar-z",
    (0, 1, 1): "squeezing-x",
    (1, 0, 1): "squeezing-y",
    (1, 1, 0): "squeezing-z",
    (1, 1, 1): "second-moment-sum (trivial)",
}


@dataclass(frozen=True)
class SymmetricState:
    """Hermitian PSD unit-trace matrix on the symmetric subspace."""

    n: int
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        n = int(self.n)
        if n < 1:
            raise ValueError("n must be >= 1")
        if rho.shape != (n + 1, n + 1):
            raise ValueError(f"rho must be {(n + 1, n + 1)}, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("rho is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
            raise ValueError("rho does not have unit trace")
        if float(np.linalg.eigvalsh(rho)[0]) < -EIGENVALUE_TOL:
            raise ValueError("rho has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rho", rho)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "re": self.rho.real.tolist(),
                "im": self.rho.imag.tolist()}

    @staticmethod
    def from_json_dict(obj: dict) -> "SymmetricState":
        rho = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
        return SymmetricState(int(obj["n"]), rho)


@dataclass(frozen=True)
class SpinMoments:
    jx: float
    jy: float
    jz: float
    jx2: float
    jy2: float
    jz2: float


def collective_operators(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-j matrices (Jx, Jy, Jz) in the Dicke basis, j = n/2."""
    j = n / 2.0
    m = j - np.arange(n + 1)
    jz = np.diag(m).astype(complex)
    # J+ raises m by one: index i maps to i-1
    ladder = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.zeros((n + 1, n + 1), dtype=complex)
    jp[np.arange(n), np.arange(1, n + 1)] = ladder
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    return jx, jy, jz


def coherent_state(n: int, theta: float, phi: float) -> SymmetricState:
    """Product state of n identical qubits pointing along (theta, phi)."""
    k = np.arange(n + 1)
    amps = (np.sqrt([math.comb(n, int(i)) for i in k])
            * np.cos(theta / 2.0) ** (n - k)
            * (np.sin(theta / 2.0) * np.exp(1j * phi)) ** k)
    return SymmetricState(n, np.outer(amps, amps.conj()))


def dicke_state(n: int, m: float) -> SymmetricState:
    """The basis state |j, m>."""
    j = n / 2.0
    idx = j - m
    if abs(m) > j or abs(idx - round(idx)) > 0:
        raise ValueError(f"invalid magnetic number m={m} for n={n}")
    vec = np.zeros(n + 1, dtype=complex)
    vec[int(round(idx))] = 1.0
    return SymmetricState(n, np.outer(vec, vec.conj()))


def ghz_state(n: int) -> SymmetricState:
    vec = np.zeros(n + 1, dtype=complex)
    vec[0] = vec[n] = 1.0 / math.sqrt(2.0)
    return SymmetricState(n, np.outer(vec, vec.conj()))


def mixed(states: list[SymmetricState], weights) -> SymmetricState:
    w = np.asarray(weights, dtype=float)
    if w.size != len(states) or np.any(w < 0):
        raise ValueError("weights must be nonnegative, one per state")
    w = w / w.sum()
    n = states[0].n
    rho = sum(wi * st.rho for wi, st in zip(w, states))
    return SymmetricState(n, rho)


def random_state(n: int, seed: int) -> SymmetricState:
    """Full-rank random state: shifted Gaussian Hermitian, trace-normalized."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
    h = (a + a.conj().T) / 2.0
    h = h - (float(np.linalg.eigvalsh(h)[0]) - 1e-3) * np.eye(n + 1)
    return SymmetricState(n, h / np.trace(h).real)


def spin_moments(state: SymmetricState) -> SpinMoments:
    jx, jy, jz = collective_operators(state.n)
    rho = state.rho

    def ev(op):
        return float(np.trace(rho @ op).real)

    return SpinMoments(ev(jx), ev(jy), ev(jz),
                       ev(jx @ jx), ev(jy @ jy), ev(jz @ jz))


def moments_from_spin(sm: SpinMoments, n: int) -> MomentVector:
    """The spin-moment dictionary: z_α = 2<J_α>, z_αα = 4<J_α²> - n."""
    return MomentVector(ProblemDims(n, 3), 1.0,
                        [2.0 * sm.jx, 2.0 * sm.jy, 2.0 * sm.jz],
                        [4.0 * sm.jx2 - n, 4.0 * sm.jy2 - n, 4.0 * sm.jz2 - n])


def spin_form_residuals(sm: SpinMoments, n: int) -> dict[tuple[int, ...], float]:
    """The eight necessary inequalities written directly in spin language,
    as (LHS - RHS) residuals of the 'separable implies >=' forms."""
    vx = sm.jx2 - sm.jx ** 2
    vy = sm.jy2 - sm.jy ** 2
    vz = sm.jz2 - sm.jz ** 2
    s2 = sm.jx2 + sm.jy2 + sm.jz2
    return {
        (0, 0, 0): 2.0 * (vx + vy + vz) - n,
        (1, 0, 0): 4.0 * (n - 1) * (vy + vz) - n * (n - 2) - 4.0 * sm.jx2,
        (0, 1, 0): 4.0 * (n - 1) * (vx + vz) - n * (n - 2) - 4.0 * sm.jy2,
        (0, 0, 1): 4.0 * (n - 1) * (vy + vx) - n * (n - 2) - 4.0 * sm.jz2,
        (0, 1, 1): 4.0 * (n - 1) * vx - 4.0 * (sm.jy2 + sm.jz2) + 2.0 * n,
        (1, 0, 1): 4.0 * (n - 1) * vy - 4.0 * (sm.jx2 + sm.jz2) + 2.0 * n,
        (1, 1, 0): 4.0 * (n - 1) * vz - 4.0 * (sm.jy2 + sm.jx2) + 2.0 * n,
        (1, 1, 1): n * (n + 2) - 4.0 * s2,
    }


def spin_form_scale(pattern: tuple[int, ...], n: int) -> float:
    """Ratio spin-form residual / expanded moment-form residual (z0 = 1)."""
    if pattern == (0, 0, 0):
        return n / 2.0
    return float(n * (n - 1))


def moment_form_sides(m: MomentVector, side: str) -> tuple[np.ndarray, np.ndarray]:
    """LHS and RHS of each of the 2^d inequalities, indexed like
    expand_inequalities (residual = rhs - lhs)."""
    n, d = m.dims.n, m.dims.d
    z0 = m.z0 if side == NECESSARY else m.z0 * (n - 1) / n
    rhs = z0 * z0 + z0 * float(m.zz.sum()) / n
    lhs = np.empty(1 << d)
    for idx in range(1 << d):
        pattern = pattern_of_index(idx, d)
        lhs[idx] = sum(z0 * m.zz[a] / (n - 1) if pattern[a] else
                       m.z[a] ** 2 / n for a in range(d))
    return lhs, np.full(1 << d, rhs)


@dataclass(frozen=True)
class InequalityResult:
    pattern: tuple[int, ...]
    label: str
    lhs: float
    rhs: float
    residual: float
    spin_residual: float
    violated: bool


@dataclass
class WitnessReport:
    verdict: str
    moments: MomentVector
    necessary: list[InequalityResult]
    sufficient: list[InequalityResult]

    def to_json_dict(self) -> dict:
        def rows(items):
            return [{"pattern": list(r.pattern), "label": r.label,
                     "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual,
                     "spin_residual": r.spin_residual, "violated": r.violated}
                    for r in items]

        return {"verdict": self.verdict,
                "moments": self.moments.to_json_dict(),
                "necessary": rows(self.necessary),
                "sufficient": rows(self.sufficient)}


def entanglement_witness(state: SymmetricState, tol: float = WITNESS_TOL) -> WitnessReport:
    """Evaluate the eight necessary-for-separability inequalities and their
    sufficient-side counterparts on the state's projected moments.

    A SeparabilityCertified verdict means the projected quadratic moments admit
    a representing measure: nothing detectable from these moments.
    """
    n = state.n
    if n < 2:
        raise ValueError("witness needs n >= 2")
    sm = spin_moments(state)
    m = moments_from_spin(sm, n)
    t = tol * n * n

    def rows(side):
        res = expand_inequalities(m, side)
        lhs, rhs = moment_form_sides(m, side)
        out = []
        for idx in range(res.size):
            pattern = pattern_of_index(idx, 3)
            kappa = spin_form_scale(pattern, n) if side == NECESSARY else float(n * n)
            spin_res = kappa * float(res[idx])
            out.append(InequalityResult(pattern, PATTERN_LABELS[pattern],
                                        float(lhs[idx]), float(rhs[idx]),
                                        float(res[idx]), spin_res,
                                        bool(spin_res < -t)))
        return out

    nec_rows, suf_rows = rows(NECESSARY), rows(SUFFICIENT)
    trivial = [r for r in nec_rows if r.pattern in ((0, 0, 0), (1, 1, 1))]
    if any(r.violated for r in trivial):
        raise ValueError("state moments violate a universal quantum constraint; "
                         "the input is not a valid density matrix")
    if any(r.violated for r in nec_rows):
        verdict = DETECTED
    elif sufficient_condition(m, tol=tol)[0]:
        verdict = CERTIFIED
    else:
        verdict = INCONCLUSIVE
    return WitnessReport(verdict, m, nec_rows, suf_rows)
