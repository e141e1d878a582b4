import pytest

from acol import backends
from acol.backends import BACKEND_NAMES, check_equivalent, first_difference, get_backend, run
from acol.errors import BackendMismatch, UnboundVariable
from acol.frontend import parse_program
from acol.objspace import ObjectSpace
from acol.programs import FIB, POWER, PRIME

EXPECTED = {"base": 2, "exponent": 0, "val": 32}


def test_registry():
    assert BACKEND_NAMES == ("ast", "linear", "decoded", "blocks", "threaded-ast", "threaded-bc")
    with pytest.raises(ValueError):
        get_backend("jit")


@pytest.mark.parametrize("name", BACKEND_NAMES)
@pytest.mark.parametrize("boundary", ["static", "dynamic"])
def test_power_everywhere(name, boundary):
    prog = parse_program(POWER)
    assert run(name, prog, {"base": 2, "exponent": 5}, boundary=boundary) == EXPECTED


@pytest.mark.parametrize("name", BACKEND_NAMES)
def test_unbound_everywhere(name):
    with pytest.raises(UnboundVariable):
        run(name, parse_program(POWER), {})


@pytest.mark.parametrize("name", BACKEND_NAMES)
def test_custom_space_everywhere(name):
    class Doubling(ObjectSpace):
        def create_integer(self, k):
            return 2 * k

    # every literal doubles: val starts at 2 and the exponent steps by 2
    env = run(name, parse_program(POWER), {"base": 3, "exponent": 4}, boundary="dynamic", space=Doubling())
    assert env == {"base": 3, "exponent": 0, "val": 2 * 3 * 3}


def test_prime_and_fib_agree():
    check_equivalent(parse_program(PRIME), {"is_prime": 1, "start": 2, "V": 1013})
    ref = check_equivalent(parse_program(FIB), {"a": 0, "b": 1, "n": 200})
    a, b = 0, 1
    for _ in range(199):
        a, b = b, a + b
    assert ref["b"] == b


def test_first_difference():
    assert first_difference({"a": 1, "b": 2}, {"a": 1, "b": 2}) is None
    assert first_difference({"a": 1, "b": 2, "c": 3}, {"a": 1, "b": 5, "c": 4}) == ("b", 2, 5)
    assert first_difference({"a": 1}, {}) == ("a", 1, None)


def test_mismatch_is_reported(monkeypatch):
    good = backends.BACKENDS["blocks"]

    def broken(prepared, env=None, boundary="static", space=None):
        out = good.execute(prepared, env, boundary=boundary, space=space)
        out["val"] += 1
        return out

    monkeypatch.setitem(backends.BACKENDS, "blocks", backends.Backend("blocks", good.prepare, broken))
    with pytest.raises(BackendMismatch) as info:
        check_equivalent(parse_program(POWER), {"base": 2, "exponent": 5}, context="power")
    err = info.value
    assert (err.backend, err.variable, err.expected, err.actual) == ("blocks", "val", 32, 33)
    assert "power" in str(err)
