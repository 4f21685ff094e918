"""Multiple-revolution Lambert boundary-value solver.

For a geometry (r1, r2, dt) there are 2*N_max + 1 trajectories: one
zero-revolution solution plus a short-period/long-period pair for each
feasible revolution count m >= 1.  Branch labels follow the transfer-orbit
period: the m-rev solution with the smaller semi-major axis is
"short_period".

Infeasibility (dt below the m-rev minimum transfer time) is a legitimate
outcome and is reported as None, not an exception.  Collinear endpoints
(transfer angle within 1e-8 rad of 0 or pi) leave the transfer plane
undefined and raise GeometryError.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConvergenceError, GeometryError, ValidationError

SHORT_PERIOD = "short_period"
LONG_PERIOD = "long_period"
PROGRADE = "prograde"
RETROGRADE = "retrograde"

_BRANCHES = (SHORT_PERIOD, LONG_PERIOD)
_DIRECTIONS = (PROGRADE, RETROGRADE)


@dataclass(frozen=True)
class LambertQuery:
    """One boundary-value query: positions, transfer time, revolution count."""

    r1: np.ndarray
    r2: np.ndarray
    dt: float
    revolutions: int = 0
    branch: str = SHORT_PERIOD
    direction: str = PROGRADE

    def __post_init__(self):
        object.__setattr__(self, "r1", np.asarray(self.r1, dtype=float))
        object.__setattr__(self, "r2", np.asarray(self.r2, dtype=float))
        if self.r1.shape != (3,) or self.r2.shape != (3,):
            raise ValidationError("r1 and r2 must be 3-vectors")
        if not self.dt > 0.0:
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if self.revolutions < 0:
            raise ValidationError("revolutions must be >= 0")
        if self.branch not in _BRANCHES:
            raise ValidationError(f"unknown branch {self.branch!r}")
        if self.direction not in _DIRECTIONS:
            raise ValidationError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class LambertSolution:
    """Terminal velocities of one transfer (km/s)."""

    v1: np.ndarray
    v2: np.ndarray
    revolutions: int
    branch: str


def _check_status(st):
    if st == K.ST_COLLINEAR:
        raise GeometryError(
            "transfer plane undefined: endpoints within 1e-8 rad of collinear")
    if st == K.ST_BAD_INPUT:
        raise ValidationError("invalid Lambert geometry inputs")
    if st == K.ST_NOCONV:
        raise ConvergenceError("Lambert iteration did not converge")


def solve(q: LambertQuery, mu: float) -> LambertSolution | None:
    """Solve one (m, branch) query; None when the m-rev transfer is
    infeasible within q.dt."""
    sols = enumerate_all(q.r1, q.r2, q.dt, mu, direction=q.direction,
                         rev_cap=q.revolutions)
    for s in sols:
        if s.revolutions == q.revolutions and (
                q.revolutions == 0 or s.branch == q.branch):
            return s
    return None


def max_revolutions(r1, r2, dt: float, mu: float,
                    direction: str = PROGRADE) -> int:
    """Largest m whose minimum m-rev transfer time is <= dt."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if dt <= 0.0:
        raise ValidationError(f"dt must be > 0, got {dt}")
    st, T, lam = K._nondim_T(r1, r2, dt, mu, direction == RETROGRADE)
    _check_status(st)
    return int(K._max_revs(T, lam, -1))


def min_transfer_time(r1, r2, m: int, mu: float,
                      direction: str = PROGRADE) -> float:
    """Minimum transfer time (s) admitting an m-revolution solution."""
    if m < 1:
        return 0.0
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    st, scale, lam = K._time_scale(r1, r2, mu, direction == RETROGRADE)
    _check_status(st)
    _, Tm = K._tmin_mrev(lam, m)
    return Tm * scale


def enumerate_all(r1, r2, dt: float, mu: float, direction: str = PROGRADE,
                  rev_cap: int | None = None) -> list[LambertSolution]:
    """All 2*N_max+1 solutions, sorted by (m, short before long)."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if dt <= 0.0:
        raise ValidationError(f"dt must be > 0, got {dt}")
    mcap = -1 if rev_cap is None else int(rev_cap)
    st, count, ms, sides, xs, v1s, v2s = K._lambert_all(
        r1, r2, dt, mu, mcap, direction == RETROGRADE)
    _check_status(st)

    out: list[LambertSolution] = []
    k = 0
    while k < count:
        m = int(ms[k])
        if m == 0:
            out.append(LambertSolution(v1s[k].copy(), v2s[k].copy(), 0,
                                       SHORT_PERIOD))
            k += 1
            continue
        # left/right pair for this m; label by |x| (smaller -> smaller a)
        xl, xr = xs[k], xs[k + 1]
        left_short = abs(xl) <= abs(xr)
        for j, side_is_left in ((k, True), (k + 1, False)):
            short = side_is_left == left_short
            out.append(LambertSolution(
                v1s[j].copy(), v2s[j].copy(), m,
                SHORT_PERIOD if short else LONG_PERIOD))
        k += 2
    out.sort(key=lambda s: (s.revolutions, s.branch != SHORT_PERIOD))
    return out
