from pathlib import Path

import pytest

from fold2d.expr import canonical_equal, differentiate, parse_expr
from fold2d.folding import delta_from_linear
from fold2d.sysfile import SystemFileError, load_system_file, parse_system_text

from helpers import DES1_F, DES1_G

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"
VARS = ("t", "x", "y")


def test_load_des1():
    sf = load_system_file(SYSTEMS / "des1.sys")
    sys = sf.system()
    assert sf.params == {"a": 1.0, "b": 2.0, "c": -1.0}
    assert canonical_equal(sys.f, parse_expr(DES1_F, VARS, "abc"))
    assert canonical_equal(sys.g, parse_expr(DES1_G, VARS, "abc"))
    assert sys.domain["t"] == (0.0, 2.0)
    assert sf.number("simulate", "x0") == 0.5


def test_forcing_expanded():
    sf = load_system_file(SYSTEMS / "dufs.sys")
    sys = sf.system()
    delta = delta_from_linear(0, 0.3, 1.25, 1)
    assert canonical_equal(sys.f, parse_expr("x + y", VARS) + delta)
    phi = sf.target_expression("phi", sf.params)
    assert phi.kind and "xdot" not in str(phi)
    expected = parse_expr("-(c - 1)*w + (a + c)*u - b*u^3", ("t", "u", "w"), "abc")
    expected = expected + differentiate(delta, "t") + parse_expr("c", (), "c") * delta
    assert canonical_equal(phi, expected)


def test_forcing_uses_overridden_param():
    sf = load_system_file(SYSTEMS / "dufs.sys")
    f = sf.system({**sf.params, "c": 0.5}).f
    assert canonical_equal(f, parse_expr("x + y", VARS) + delta_from_linear(0, 0.3, 0.5, 1))


def test_every_shipped_file_parses():
    for path in SYSTEMS.glob("*.sys"):
        sf = load_system_file(path)
        sf.system(require_g=False)


def err(text):
    with pytest.raises(SystemFileError) as info:
        parse_system_text(text, "demo.sys").system()
    return str(info.value)


def test_comments_and_blank_lines():
    sf = parse_system_text("# hi\n\n[system]\nf = y  # trailing\ng = -x\n")
    assert str(sf.system().f) == str(parse_expr("y", VARS))


def test_errors_carry_location():
    assert err("[system]\nf = y\ng = -x\nh = 1\n").startswith("demo.sys:4")
    assert "unknown section" in err("[system]\nf = y\ng = -x\n[nope]\n")
    assert "duplicate key" in err("[system]\nf = y\nf = x\ng = 1\n")
    assert "duplicate section" in err("[system]\nf = y\ng = x\n[system]\n")
    assert "outside" in err("f = y\n")
    assert "missing [system]" in err("[params]\na = 1\n")
    assert "key = value" in err("[system]\nf y\n")
    assert "empty value" in err("[system]\nf =\n")
    assert "needs f" in err("[system]\ng = x\n")


def test_g_required_unless_synth():
    sf = parse_system_text("[system]\nf = y\n")
    with pytest.raises(SystemFileError, match="needs g"):
        sf.system()
    assert str(sf.system(require_g=False).g) == str(parse_expr("0"))


def test_params_validated():
    assert "invalid parameter name" in err("[system]\nf = y\ng = x\n[params]\nx = 1\n")
    assert "invalid parameter name" in err("[system]\nf = y\ng = x\n[params]\nsin = 1\n")
    assert "must be a number" in err("[system]\nf = y\ng = x\n[params]\na = one\n")


def test_undefined_parameter_is_an_error():
    msg = err("[system]\nf = y + k\ng = x\n")
    assert "demo.sys:2" in msg and "k" in msg


def test_expression_error_located():
    assert err("[system]\nf = y +\ng = x\n").startswith("demo.sys:2")


def test_domain_intervals():
    sf = parse_system_text("[system]\nf = y\ng = x\n[domain]\nx = [-1, 3]\n")
    assert sf.system().domain["x"] == (-1.0, 3.0)
    assert "interval" in err("[system]\nf = y\ng = x\n[domain]\nx = 1\n")
    assert "empty interval" in err("[system]\nf = y\ng = x\n[domain]\nx = 3, 1\n")


def test_forcing_requires_all_keys():
    with pytest.raises(SystemFileError, match="needs omega"):
        parse_system_text("[system]\nf = y + delta\ng = x\n[forcing]\nK = 0\nA = 1\nc = 1\n").system()


def test_missing_file():
    with pytest.raises(SystemFileError, match="cannot read"):
        load_system_file("/nonexistent/none.sys")
