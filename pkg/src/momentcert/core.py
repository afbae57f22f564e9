"""Domain types, polynomial evaluation, moment extraction and the duality pairing.

Everything downstream works with three kinds of objects: symmetric square-free
quadratics on a product of n unit d-balls, candidate moment vectors, and point
configurations (the support atoms of measures).  All values are plain 64-bit
floats; certificates are re-validated numerically with explicit tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

#: slack allowed when validating that configuration points lie in the unit ball
BALL_TOL = 1e-12


def _frozen_vector(obj, name, values, d):
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (d,):
        raise ValueError(f"{name} must have length {d}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    object.__setattr__(obj, name, arr)


@dataclass(frozen=True)
class ProblemDims:
    """Number of balls/particles n and ball dimension d."""

    n: int
    d: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be an integer >= 1, got {self.d}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))


@dataclass(frozen=True)
class SymmetricQuadratic:
    """Coefficients (a0, a, aa) of a0 + sum a[α] s_α + sum aa[α] s_αα."""

    dims: ProblemDims
    a0: float
    a: np.ndarray
    aa: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a0", float(self.a0))
        if not math.isfinite(self.a0):
            raise ValueError("a0 must be finite")
        _frozen_vector(self, "a", self.a, self.dims.d)
        _frozen_vector(self, "aa", self.aa, self.dims.d)

    def coeff_scale(self) -> float:
        """Magnitude used to normalize residual tolerances."""
        return max(1.0, abs(self.a0),
                   float(np.max(np.abs(self.a))), float(np.max(np.abs(self.aa))))

    def to_json_dict(self) -> dict:
        return {"n": self.dims.n, "d": self.dims.d, "a0": self.a0,
                "a": list(self.a), "aa": list(self.aa)}

    @staticmethod
    def from_json_dict(obj: dict) -> "SymmetricQuadratic":
        dims = ProblemDims(int(obj["n"]), int(obj["d"]))
        return SymmetricQuadratic(dims, float(obj["a0"]), obj["a"], obj["aa"])


@dataclass(frozen=True)
class MomentVector:
    """Candidate moments (z0, z, zz) of a symmetric measure on the ball product."""

    dims: ProblemDims
    z0: float
    z: np.ndarray
    zz: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z0", float(self.z0))
        if not math.isfinite(self.z0):
            raise ValueError("z0 must be finite")
        _frozen_vector(self, "z", self.z, self.dims.d)
        _frozen_vector(self, "zz", self.zz, self.dims.d)

    def moment_scale(self) -> float:
        return max(1.0, abs(self.z0),
                   float(np.max(np.abs(self.z))), float(np.max(np.abs(self.zz))))

    def is_zero(self) -> bool:
        return self.z0 == 0.0 and not self.z.any() and not self.zz.any()

    def to_json_dict(self) -> dict:
        return {"n": self.dims.n, "d": self.dims.d, "z0": self.z0,
                "z": list(self.z), "zz": list(self.zz)}

    @staticmethod
    def from_json_dict(obj: dict) -> "MomentVector":
        dims = ProblemDims(int(obj["n"]), int(obj["d"]))
        return MomentVector(dims, float(obj["z0"]), obj["z"], obj["zz"])


@dataclass(frozen=True)
class Configuration:
    """n points in the closed unit d-ball, stored as an (n, d) array."""

    dims: ProblemDims
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.shape != (self.dims.n, self.dims.d):
            raise ValueError(
                f"points must have shape {(self.dims.n, self.dims.d)}, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite entries")
        norms = np.sqrt(np.sum(pts * pts, axis=1))
        worst = float(np.max(norms))
        if worst > 1.0 + BALL_TOL:
            raise ValueError(f"point norm {worst} exceeds 1 + {BALL_TOL}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class RescaledMomentVector:
    """Moments in the large-n coordinates z̃_α = z_α/√n, z̃_αα = z_αα/n."""

    z0: float
    zt: np.ndarray
    zzt: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z0", float(self.z0))
        if not math.isfinite(self.z0):
            raise ValueError("z0 must be finite")
        d = np.asarray(self.zt, dtype=float).size
        _frozen_vector(self, "zt", self.zt, d)
        _frozen_vector(self, "zzt", self.zzt, d)


class Status(str, Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    INDETERMINATE = "Indeterminate"


@dataclass
class ConeVerdict:
    """Membership verdict plus a witness an independent checker can validate.

    Member and NonMember verdicts always carry a witness payload; Indeterminate
    carries the residual gap.  ``boundary`` marks verdicts decided within
    tolerance of the cone boundary (cones are closed, so these report Member).
    """

    status: Status
    witness: dict | None = None
    boundary: bool = False

    def __post_init__(self):
        if self.status in (Status.MEMBER, Status.NON_MEMBER) and self.witness is None:
            raise ValueError(f"{self.status.value} verdict requires a witness")

    @property
    def is_member(self) -> bool:
        return self.status is Status.MEMBER


# ---------------------------------------------------------------------------
# operations


def power_sums(config: Configuration) -> tuple[np.ndarray, np.ndarray]:
    """Power sums s_α = Σ_i ξ_iα and ss_α = Σ_{i≠j} ξ_iα ξ_jα (ordered pairs)."""
    pts = config.points
    s = pts.sum(axis=0)
    ss = s * s - np.sum(pts * pts, axis=0)
    return s, ss


def evaluate(q: SymmetricQuadratic, config: Configuration) -> float:
    """Value of the quadratic at a configuration."""
    if q.dims != config.dims:
        raise ValueError(f"dimension mismatch: {q.dims} vs {config.dims}")
    s, ss = power_sums(config)
    return q.a0 + float(q.a @ s) + float(q.aa @ ss)


def moments_of_configuration(config: Configuration) -> MomentVector:
    """Moments of the unit-mass atom sitting at this configuration."""
    s, ss = power_sums(config)
    return MomentVector(config.dims, 1.0, s, ss)


def pair(q: SymmetricQuadratic, m: MomentVector) -> float:
    """Duality pairing a0 z0 + Σ a_α z_α + Σ aa_α zz_α."""
    if q.dims != m.dims:
        raise ValueError(f"dimension mismatch: {q.dims} vs {m.dims}")
    return q.a0 * m.z0 + float(q.a @ m.z) + float(q.aa @ m.zz)


def rescale_moments(m: MomentVector) -> RescaledMomentVector:
    n = m.dims.n
    return RescaledMomentVector(m.z0, m.z / math.sqrt(n), m.zz / n)


def unrescale_moments(rm: RescaledMomentVector, dims: ProblemDims) -> MomentVector:
    n = dims.n
    return MomentVector(dims, rm.z0, rm.zt * math.sqrt(n), rm.zzt * n)


def rescale_coeffs(q: SymmetricQuadratic) -> tuple[float, float, float]:
    """d=1 coefficient rescaling (B0, B1, B11) = (A0, √n A1, n A11)."""
    if q.dims.d != 1:
        raise ValueError("coefficient rescaling is defined for d=1 only")
    n = q.dims.n
    return q.a0, math.sqrt(n) * float(q.a[0]), n * float(q.aa[0])


def coeffs_from_rescaled(b: tuple[float, float, float], n: int) -> SymmetricQuadratic:
    """Inverse of :func:`rescale_coeffs`."""
    b0, b1, b11 = b
    return SymmetricQuadratic(ProblemDims(n, 1), b0,
                              [b1 / math.sqrt(n)], [b11 / n])
