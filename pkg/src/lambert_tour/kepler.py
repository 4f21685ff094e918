"""Two-body orbital mechanics: element/state conversions and Keplerian
propagation via Lagrange coefficients (universal-variable formulation).

All operations are pure functions; km, s, rad throughout.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import ConvergenceError, ValidationError

TWO_PI = 2.0 * math.pi

# degenerate-element conventions: below these, angles are re-anchored so the
# representation is unique (e ~ 0: argp := 0; i ~ 0: raan := 0)
ECC_TINY = 1e-10
INC_TINY = 1e-10


@dataclass(frozen=True)
class OrbitalElements:
    """Classical Keplerian elements of a bound orbit.

    anomaly_kind selects how `anomaly` is interpreted ("true" or "mean");
    epoch is seconds past the mission reference.
    """

    semi_major_axis: float
    eccentricity: float
    inclination: float
    raan: float
    arg_perigee: float
    anomaly: float
    anomaly_kind: str = "true"
    epoch: float = 0.0

    def __post_init__(self):
        if not self.semi_major_axis > 0.0:
            raise ValidationError(
                f"semi_major_axis must be > 0, got {self.semi_major_axis}")
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValidationError(
                f"eccentricity must be in [0, 1), got {self.eccentricity}")
        if not 0.0 <= self.inclination <= math.pi:
            raise ValidationError(
                f"inclination must be in [0, pi], got {self.inclination}")
        if self.anomaly_kind not in ("true", "mean"):
            raise ValidationError(
                f"anomaly_kind must be 'true' or 'mean', got {self.anomaly_kind!r}")

    def mean_anomaly(self) -> float:
        if self.anomaly_kind == "mean":
            return self.anomaly
        return true_to_mean(self.anomaly, self.eccentricity)

    def true_anomaly(self) -> float:
        if self.anomaly_kind == "true":
            return self.anomaly
        return mean_to_true(self.anomaly, self.eccentricity)


@dataclass(frozen=True)
class StateVector:
    """Cartesian position/velocity at time t (km, km/s, s)."""

    r: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.r.shape != (3,) or self.v.shape != (3,):
            raise ValidationError("r and v must be 3-vectors")


def mean_motion(a: float, mu: float) -> float:
    """Mean motion n = sqrt(mu / a^3) in rad/s."""
    if a <= 0.0:
        raise ValidationError(f"semi-major axis must be > 0, got {a}")
    return math.sqrt(mu / a**3)


def period(a: float, mu: float) -> float:
    """Orbital period 2*pi/n in s."""
    return TWO_PI / mean_motion(a, mu)


def true_to_mean(nu: float, e: float) -> float:
    """Mean anomaly from true anomaly (elliptic)."""
    E = 2.0 * math.atan2(math.sqrt(1.0 - e) * math.sin(0.5 * nu),
                         math.sqrt(1.0 + e) * math.cos(0.5 * nu))
    return E - e * math.sin(E)


def mean_to_true(M: float, e: float) -> float:
    """True anomaly from mean anomaly (elliptic Kepler solve)."""
    E = K._kepler_E(M, e)
    return 2.0 * math.atan2(math.sqrt(1.0 + e) * math.sin(0.5 * E),
                            math.sqrt(1.0 - e) * math.cos(0.5 * E))


def elements_to_state(el: OrbitalElements, mu: float) -> StateVector:
    """Cartesian state on the conic defined by el, at t = el.epoch."""
    nu = el.true_anomaly()
    rx, ry, rz, vx, vy, vz = K._els_state(
        el.semi_major_axis, el.eccentricity, el.inclination,
        el.raan, el.arg_perigee, nu, mu)
    return StateVector(np.array([rx, ry, rz]), np.array([vx, vy, vz]),
                       t=el.epoch)


def state_to_elements(sv: StateVector, mu: float) -> OrbitalElements:
    """Inverse of elements_to_state (true anomaly, epoch = sv.t).

    Degenerate orbits follow fixed conventions: near-circular measures the
    anomaly from the ascending node with arg_perigee := 0; near-equatorial
    anchors the node at +x with raan := 0.
    """
    r = sv.r
    v = sv.v
    rn = float(np.linalg.norm(r))
    vn2 = float(v @ v)
    if rn <= 0.0:
        raise ValidationError("zero position vector")
    energy = 0.5 * vn2 - mu / rn
    if energy >= 0.0:
        raise ValidationError("state is not a bound orbit")
    a = -mu / (2.0 * energy)

    h = np.cross(r, v)
    hn = float(np.linalg.norm(h))
    e_vec = ((vn2 - mu / rn) * r - float(r @ v) * v) / mu
    e = float(np.linalg.norm(e_vec))
    inc = math.acos(max(-1.0, min(1.0, h[2] / hn)))

    node = np.array([-h[1], h[0], 0.0])  # z_hat x h
    nn = float(np.linalg.norm(node))
    if inc < INC_TINY or nn == 0.0:
        raan = 0.0
        node = np.array([1.0, 0.0, 0.0])
    else:
        raan = math.atan2(node[1], node[0]) % TWO_PI
        node = node / nn

    h_hat = h / hn
    if e < ECC_TINY:
        argp = 0.0
        # anomaly from the node, signed around h
        nu = math.atan2(float(np.cross(node, r) @ h_hat), float(node @ r))
    else:
        e_hat = e_vec / e
        argp = math.atan2(float(np.cross(node, e_vec) @ h_hat),
                          float(node @ e_vec)) % TWO_PI
        nu = math.atan2(float(np.cross(e_vec, r) @ h_hat), float(e_vec @ r))
    nu %= TWO_PI

    return OrbitalElements(a, e, inc, raan, argp, nu,
                           anomaly_kind="true", epoch=sv.t)


def propagate(sv: StateVector, dt: float, mu: float) -> StateVector:
    """Keplerian propagation by dt (any sign) via Lagrange F and G."""
    st, rx, ry, rz, vx, vy, vz = K._propagate_uv(
        sv.r[0], sv.r[1], sv.r[2], sv.v[0], sv.v[1], sv.v[2], dt, mu)
    if st == K.ST_NOCONV:
        raise ConvergenceError("universal Kepler iteration did not converge")
    if st != K.ST_OK:
        raise ValidationError("invalid state for propagation")
    return StateVector(np.array([rx, ry, rz]), np.array([vx, vy, vz]),
                       t=sv.t + dt)


def specific_energy(sv: StateVector, mu: float) -> float:
    return 0.5 * float(sv.v @ sv.v) - mu / float(np.linalg.norm(sv.r))


def angular_momentum(sv: StateVector) -> np.ndarray:
    return np.cross(sv.r, sv.v)
