"""Body catalog ingestion and unperturbed target ephemerides.

Catalogs are delimited text with a header row; mission parameters live in a
separate JSON config.  All angles are converted to rad and semi-major axes
to km on ingest; catalog epochs stay in Julian Date until a mission start
epoch binds them to mission-relative seconds.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import _kernels as K
from .constants import AU, DAY, FRAME_MU, YEAR
from .errors import ValidationError
from .kepler import OrbitalElements, StateVector, mean_motion

_FRAMES = ("geocentric", "heliocentric")
_DEG = math.pi / 180.0

_REQUIRED_COLUMNS = ("id", "name", "epoch_jd", "e", "i_deg", "raan_deg",
                     "argp_deg", "M_deg")


@dataclass(frozen=True)
class Body:
    """A catalog object: orbital elements plus its reference epoch.

    elements.epoch is mission-relative seconds once bound (bind_epoch);
    straight from the catalog it is 0 and epoch_jd carries the reference.
    """

    id: int
    name: str
    elements: OrbitalElements
    frame: str
    epoch_jd: float

    def bind_epoch(self, t0_jd: float) -> "Body":
        """Re-reference the element epoch to seconds past t0_jd."""
        rel = (self.epoch_jd - t0_jd) * DAY
        return replace(self, elements=replace(self.elements, epoch=rel))


def parse_catalog(source) -> list[Body]:
    """Parse a delimited body catalog.

    Columns: id, name, epoch_jd, a_au or a_km, e, i_deg, raan_deg, argp_deg,
    M_deg.  Raises ValidationError naming the offending row and column.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text()
    else:
        text = str(source)
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        return []
    header = rows[0].keys()
    if "a_au" in header:
        a_col, a_scale = "a_au", AU
    elif "a_km" in header:
        a_col, a_scale = "a_km", 1.0
    else:
        raise ValidationError("catalog needs an 'a_au' or 'a_km' column")
    for col in _REQUIRED_COLUMNS:
        if col not in header:
            raise ValidationError(f"catalog missing column {col!r}")

    bodies = []
    seen = set()
    for idx, row in enumerate(rows, start=2):  # header is line 1
        def fval(col, row=row, idx=idx):
            try:
                return float(row[col])
            except (TypeError, ValueError):
                raise ValidationError(
                    f"catalog row {idx}, column {col!r}: "
                    f"cannot parse {row[col]!r}") from None

        try:
            bid = int(row["id"])
        except (TypeError, ValueError):
            raise ValidationError(
                f"catalog row {idx}, column 'id': cannot parse "
                f"{row['id']!r}") from None
        if bid in seen:
            raise ValidationError(f"catalog row {idx}: duplicate id {bid}")
        seen.add(bid)
        try:
            el = OrbitalElements(
                semi_major_axis=fval(a_col) * a_scale,
                eccentricity=fval("e"),
                inclination=fval("i_deg") * _DEG,
                raan=fval("raan_deg") * _DEG % (2 * math.pi),
                arg_perigee=fval("argp_deg") * _DEG % (2 * math.pi),
                anomaly=fval("M_deg") * _DEG % (2 * math.pi),
                anomaly_kind="mean",
            )
        except ValidationError as exc:
            raise ValidationError(f"catalog row {idx}: {exc}") from None
        bodies.append(Body(id=bid, name=row["name"].strip(),
                           elements=el, frame="heliocentric",
                           epoch_jd=fval("epoch_jd")))
    return bodies


def body_elements_array(b: Body) -> np.ndarray:
    """Packed (a, e, i, raan, argp, M0, epoch) for the compiled kernels."""
    el = b.elements
    return np.array([el.semi_major_axis, el.eccentricity, el.inclination,
                     el.raan, el.arg_perigee, el.mean_anomaly(), el.epoch])


def state_at(b: Body, t: float, mu: float) -> StateVector:
    """Unperturbed two-body state of b at mission time t (s)."""
    arr = body_elements_array(b)
    rx, ry, rz, vx, vy, vz = K._body_rv(arr, t, mu)
    return StateVector(np.array([rx, ry, rz]), np.array([vx, vy, vz]), t=t)


# ---------------------------------------------------------------------------
# Mission configuration
# ---------------------------------------------------------------------------

_UNIT_SECONDS = {
    "s": 1.0, "sec": 1.0,
    "min": 60.0,
    "h": 3600.0, "hr": 3600.0,
    "d": DAY, "day": DAY, "days": DAY,
    "yr": YEAR, "year": YEAR, "years": YEAR,
}


def parse_duration(value) -> float:
    """Duration in seconds from a number or a '<value> <unit>' string."""
    if isinstance(value, (int, float)):
        return float(value)
    parts = str(value).split()
    if len(parts) == 2 and parts[1] in _UNIT_SECONDS:
        try:
            return float(parts[0]) * _UNIT_SECONDS[parts[1]]
        except ValueError:
            pass
    raise ValidationError(f"cannot parse duration {value!r}")


@dataclass(frozen=True)
class MissionConfig:
    """Mission-level parameters shared by both planning phases."""

    t0_jd: float
    t_max: float          # s
    t_ser: float          # s
    frame: str
    mu: float
    target_ids: tuple[int, ...]
    chaser_initial: Body  # node 0, epoch-bound
    phase_a: dict         # phase-a tuning knob overrides

    def __post_init__(self):
        if self.t_max <= 0.0:
            raise ValidationError("t_max must be > 0")
        if self.t_ser < 0.0:
            raise ValidationError("t_ser must be >= 0")
        if not self.target_ids:
            raise ValidationError("targets must be non-empty")
        if self.frame not in _FRAMES:
            raise ValidationError(f"unknown frame {self.frame!r}")


@dataclass(frozen=True)
class Mission:
    """A bound mission: config plus epoch-referenced bodies."""

    config: MissionConfig
    bodies: dict  # id -> Body, epochs bound to t0

    @property
    def chaser(self) -> Body:
        return self.config.chaser_initial

    def body(self, node: int) -> Body:
        return self.chaser if node == 0 else self.bodies[node]


def _chaser_from_spec(spec, bodies, frame, t0_jd) -> Body:
    if spec is None:
        if frame != "heliocentric":
            raise ValidationError(
                "chaser_initial is required for geocentric missions")
        # Earth-like circular heliocentric orbit at the mission start
        el = OrbitalElements(AU, 0.0, 0.0, 0.0, 0.0, 0.0,
                             anomaly_kind="mean")
        return Body(0, "chaser", el, frame, t0_jd).bind_epoch(t0_jd)
    if "body_id" in spec:
        src = bodies.get(int(spec["body_id"]))
        if src is None:
            raise ValidationError(
                f"chaser_initial body_id {spec['body_id']} not in catalog")
        return replace(src, id=0, name="chaser")
    try:
        if "a_au" in spec:
            a = float(spec["a_au"]) * AU
        else:
            a = float(spec["a_km"])
        if "nu_deg" in spec:
            anomaly, kind = float(spec["nu_deg"]) * _DEG, "true"
        else:
            anomaly, kind = float(spec["M_deg"]) * _DEG, "mean"
        el = OrbitalElements(
            a, float(spec["e"]), float(spec["i_deg"]) * _DEG,
            float(spec["raan_deg"]) * _DEG % (2 * math.pi),
            float(spec["argp_deg"]) * _DEG % (2 * math.pi),
            anomaly % (2 * math.pi), anomaly_kind=kind)
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"bad chaser_initial spec: {exc}") from None
    epoch_jd = float(spec.get("epoch_jd", t0_jd))
    return Body(0, "chaser", el, frame, epoch_jd).bind_epoch(t0_jd)


def load_mission(config_path, catalog_path) -> Mission:
    """Load and bind a mission from a JSON config and a catalog file."""
    try:
        cfg = json.loads(Path(config_path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {config_path}: {exc}") from None
    for key in ("t0_jd", "t_max", "frame", "target_ids"):
        if key not in cfg:
            raise ValidationError(f"config missing key {key!r}")
    frame = cfg["frame"]
    if frame not in _FRAMES:
        raise ValidationError(f"unknown frame {frame!r}")
    t0_jd = float(cfg["t0_jd"])
    mu = float(cfg.get("mu", FRAME_MU[frame]))

    catalog = parse_catalog(catalog_path)
    bound = {}
    for b in catalog:
        bound[b.id] = replace(b, frame=frame).bind_epoch(t0_jd)

    target_ids = tuple(int(t) for t in cfg["target_ids"])
    for t in target_ids:
        if t not in bound:
            raise ValidationError(f"target id {t} not in catalog")
    if len(set(target_ids)) != len(target_ids):
        raise ValidationError("duplicate target ids")

    chaser = _chaser_from_spec(cfg.get("chaser_initial"), bound, frame, t0_jd)

    config = MissionConfig(
        t0_jd=t0_jd,
        t_max=parse_duration(cfg["t_max"]),
        t_ser=parse_duration(cfg.get("t_ser", 0.0)),
        frame=frame,
        mu=mu,
        target_ids=target_ids,
        chaser_initial=chaser,
        phase_a=dict(cfg.get("phase_a", {})),
    )
    return Mission(config=config, bodies=bound)


def orbital_period(b: Body, mu: float) -> float:
    return 2.0 * math.pi / mean_motion(b.elements.semi_major_axis, mu)
