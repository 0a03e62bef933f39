import io
import json
from fractions import Fraction
from importlib import resources

import jsonschema
import pytest

from torusclosure.cli import run
from torusclosure.errors import DivisionByZero, ParseError, ReducibleError
from torusclosure.parsing import parse_element, parse_field, parse_polynomial
from torusclosure.report import ball_from_json, ball_to_json


def schema():
    return json.loads((resources.files("torusclosure") / "schema" / "report.schema.json").read_text())


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, schema())
    return code, doc


def test_parse_field_examples():
    assert parse_field("x^2 - 2").poly == (-2, 0, 1)
    assert parse_field("x^3 - 3*x - 1").poly == (-1, -3, 0, 1)
    assert parse_polynomial("2*x^2+x-3") == [-3, 1, 2]
    with pytest.raises(ReducibleError):
        parse_field("x^2 - 1")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_field("x^2 - 2 y")
    assert e.value.position == 8 and e.value.token == "y"


def test_parse_element_examples(q2):
    assert parse_element("1 + a", q2) == q2([1, 1])
    assert parse_element("(3+a)/(3-a)", q2) == q2([Fraction(11, 7), Fraction(6, 7)])
    assert parse_element("a^2 - 1/2", q2) == q2(Fraction(3, 2))
    assert parse_element("-a^-1", q2) == q2([0, Fraction(-1, 2)])
    with pytest.raises(DivisionByZero):
        parse_element("a/0", q2)
    with pytest.raises(ParseError):
        parse_element("(1 + a", q2)


def test_density_command():
    code, doc = call_json("density", "--field", "x^2 - 2", "--element", "(3+a)/(3-a)")
    assert code == 0
    assert doc["verdicts"]["dense"] is True
    assert doc["statuses"]["dense"] == {"kind": "NumericOnly", "heightBound": 1000000, "prec": 256}


def test_reducible_field_exit_code():
    code, out, err = call("closure", "--field", "x^2 - 1", "--element", "2")
    assert code == 1 and "ReducibleError" in err


def test_parse_error_exit_code():
    code, doc = call_json("closure", "--field", "x^2 - 2", "--element", "3 +* a")
    assert code == 1
    assert doc["error"]["position"] == 3 and doc["error"]["token"] == "*"


def test_scenario_counterexample_json():
    code, doc = call_json("scenario", "counterexample")
    assert code == 0
    assert doc["verdicts"]["closureDim"] == 2
    assert doc["verdicts"]["algebraicity"] == "NotAlgebraic"


def test_text_and_json_have_same_verdicts():
    argv = ("fourexp", "--matrix", "2,3;3,2")
    _, doc = call_json(*argv)
    code, text, _ = call(*argv)
    for k in doc["verdicts"]:
        assert f"  {k}: " in text


def test_embed_and_zariski_commands():
    code, doc = call_json("embed", "--field", "x^2 - 2", "--field", "x^3 - 3*x - 1")
    assert code == 0 and doc["verdicts"] == {"surjective": True, "equivariant": True}
    code, doc = call_json("embed", "--torus", "split")
    assert code == 1 and doc["error"]["type"] == "IsotropicError"
    code, doc = call_json("zariski", "--field", "x^2 - 2", "--element", "2")
    assert code == 0 and doc["verdicts"]["zariskiDim"] == 1


def test_conjecture2_command():
    code, doc = call_json("conjecture2", "--field", "x^2 - 2", "--element", "(3+a)/(3-a)")
    assert code == 0 and doc["verdicts"]["conjecture2"] == "CONSISTENT"


def test_user_units_are_verified():
    code, doc = call_json("closure", "--field", "x^2 - 2", "--element", "3+2*a", "--units", "3+a")
    assert code == 1 and doc["error"]["type"] == "NotUnitError"


def test_precision_cap_exit_code():
    # height 10^6 cannot be resolved at a 48-bit cap
    code, doc = call_json("fourexp", "--matrix", "2,3;3,2", "--prec-bits", "48", "--max-prec-bits", "48")
    assert code == 2 and doc["error"]["type"] == "PrecisionExhausted"
    code, doc = call_json("fourexp", "--matrix", "2,3;3,2", "--height-bound", "100", "--prec-bits", "48",
                          "--max-prec-bits", "48")
    assert code == 0 and doc["verdicts"]["verdict"] == "DET-NEGATIVE"


def test_batch(tmp_path):
    p = tmp_path / "cmds.txt"
    p.write_text("# sweep\nfourexp --matrix 2,3;3,2\n\nclosure --field 'x^2 - 1' --element 2\n", encoding="utf-8")
    code, out, err = call("--batch", str(p))
    assert code == 1
    assert out.index("torusclosure fourexp") < out.index("torusclosure closure")


def test_ball_json_round_trip():
    from torusclosure.arith import Ball, ball_log
    b = ball_log(Ball.exact(3, 320), 256)
    back = ball_from_json(ball_to_json(b))
    assert back.lower <= b.lower and b.upper <= back.upper
