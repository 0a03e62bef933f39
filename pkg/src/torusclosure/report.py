"""Report assembly and rendering (JSON and plain text)."""

import enum
import json
from decimal import Decimal, localcontext
from dataclasses import dataclass, field as dc_field, fields, is_dataclass
from fractions import Fraction

from .arith import Ball
from .field import FieldElement, NumberField
from .relations import Status
from .torus import TorusSpec

SCHEMA_VERSION = "1.0.0"

# verdict strings that make the run exit with code 2
UNKNOWN_VERDICTS = {"Unknown", "RANK-UNKNOWN", "DET-UNKNOWN", "PrecisionExhausted"}


def ball_to_json(b):
    mid, rad = b.to_strings()
    return {"mid": mid, "rad": rad, "precBits": b.prec}


def ball_from_json(d):
    return Ball.from_decimal(d["mid"], d["rad"], d["precBits"])


def to_jsonable(obj):
    """Convert library objects into plain JSON values (deterministically)."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        # floats only appear in timings
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Ball):
        return ball_to_json(obj)
    if isinstance(obj, Status):
        return obj.to_dict()
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, FieldElement):
        return obj.to_str()
    if isinstance(obj, NumberField):
        return [str(c) for c in obj.poly]
    if isinstance(obj, TorusSpec):
        return obj.describe()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    return str(obj)


@dataclass
class Report:
    verb: str
    argv: list
    options: dict
    results: dict = dc_field(default_factory=dict)
    verdicts: dict = dc_field(default_factory=dict)
    statuses: dict = dc_field(default_factory=dict)
    timings: dict = dc_field(default_factory=dict)
    error: dict = None
    exit_code: int = 0

    def verdict(self, name, value, status=None):
        self.verdicts[name] = to_jsonable(value)
        if status is not None:
            self.statuses[name] = status

    def to_dict(self):
        return {
            "schemaVersion": SCHEMA_VERSION,
            "command": {"verb": self.verb, "argv": list(self.argv), "options": to_jsonable(self.options)},
            "results": to_jsonable(self.results),
            "verdicts": to_jsonable(self.verdicts),
            "statuses": {k: _status_json(v) for k, v in self.statuses.items()},
            "error": self.error,
            "exitCode": self.exit_code,
            "timings": self.timings,
        }


def _status_json(s):
    if isinstance(s, Status):
        return s.to_dict()
    return {"kind": str(s)}


def render_json(report, indent=2):
    return json.dumps(report.to_dict(), indent=indent, ensure_ascii=False)


def _status_text(d):
    if d["kind"] == "NumericOnly":
        return f"NumericOnly(H={d.get('heightBound')}, prec={d.get('prec')})"
    return d["kind"]


def _is_ball(v):
    return isinstance(v, dict) and set(v) == {"mid", "rad", "precBits"}


def _shorten(v):
    if _is_ball(v):
        return f"{_short(v['mid'])} +/- {v['rad']}"
    if isinstance(v, dict):
        return {k: _shorten(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_shorten(x) for x in v]
    return v


def _value_text(v):
    if _is_ball(v):
        return f"{_short(v['mid'])} +/- {v['rad']} ({v['precBits']} bits)"
    if isinstance(v, (dict, list)):
        return json.dumps(_shorten(v), ensure_ascii=False)
    return str(v)


def _short(mid, digits=25):
    # readable mantissa; the JSON output keeps every digit
    with localcontext() as ctx:
        ctx.prec = digits
        return str(+Decimal(mid))


def render_text(report):
    d = report.to_dict()
    lines = [f"torusclosure {d['command']['verb']} (schema {d['schemaVersion']})"]
    if d["error"]:
        e = d["error"]
        lines.append(f"error: {e['type']}: {e['message']}")
    if d["verdicts"]:
        lines.append("verdicts:")
        for k, v in d["verdicts"].items():
            st = d["statuses"].get(k)
            suffix = f"  [{_status_text(st)}]" if st else ""
            lines.append(f"  {k}: {_value_text(v)}{suffix}")
    if d["results"]:
        lines.append("results:")
        for k, v in d["results"].items():
            lines.append(f"  {k}: {_value_text(v)}")
    lines.append(f"exit code: {d['exitCode']}")
    return "\n".join(lines)
