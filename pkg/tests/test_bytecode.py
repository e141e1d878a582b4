import pytest

from acol.bytecode import (
    BytecodeImage, assemble, compile_linear, decode, disassemble, dump_acbc, load_acbc,
    read_acbc, validate, write_acbc,
)
from acol.errors import AsmError, LiteralOutOfRange, MalformedImage
from acol.frontend import parse_program
from acol.nodes import Assign, IntLit
from acol.programs import POWER
from acol.progen import GenConfig, generate
from acol.vm import run_linear

POWER_LAYOUT = [
    (0, 20, 1), (2, 45, "val"), (7, 40, "exponent"), (12, 20, 0), (14, 255, None),
    (15, 11, 54), (20, 40, "val"), (25, 40, "base"), (30, 198, None), (31, 45, "val"),
    (36, 40, "exponent"), (41, 20, 1), (43, 199, None), (44, 45, "exponent"), (49, 10, 7),
    (54, 0, None),
]


def named(image):
    out = []
    for off, op, arg in decode(image.code):
        if op in (40, 45):
            arg = image.symbols[arg]
        out.append((off, op, arg))
    return out


def test_power_layout():
    image = compile_linear(parse_program(POWER))
    assert named(image) == POWER_LAYOUT
    assert image.symbols == ("val", "exponent", "base")
    assert len(image.code) == 55


def test_empty_program():
    image = compile_linear([])
    assert image.code == b"\x00" and image.symbols == ()
    assert disassemble(image) == "0: end\n"


def test_assign_sum():
    image = compile_linear(parse_program("x = 1 + 2;"))
    assert disassemble(image) == "0: push1 1\n2: push1 2\n4: add\n5: assign x\n10: end\n"
    assert run_linear(image) == {"x": 3}


def test_push_width_choice():
    image = compile_linear(parse_program("x := 127; y := -128; z := 128; w := -129;"))
    ops = [(op, arg) for _, op, arg in decode(image.code) if op in (20, 21)]
    assert ops == [(20, 127), (20, -128), (21, 128), (21, -129)]


def test_if_else_layout():
    image = compile_linear(parse_program("if a < 1 { b := 1; } else { b := 2; }"))
    text = disassemble(image)
    assert text.splitlines() == [
        "0: load a", "5: push1 1", "7: lt", "8: jump_if_false 25", "13: push1 1",
        "15: assign b", "20: jump 32", "25: push1 2", "27: assign b", "32: end",
    ]


def test_literal_out_of_range():
    with pytest.raises(LiteralOutOfRange):
        compile_linear([Assign("x", IntLit(2 ** 31))])


def test_little_endian_fixtures():
    # push4 0x01020304, assign id 0, jump 0, end
    code = bytes([21, 4, 3, 2, 1, 45, 0, 0, 0, 0, 10, 0, 0, 0, 0, 0])
    assert decode(code) == [(0, 21, 0x01020304), (5, 45, 0), (10, 10, 0), (15, 0, None)]
    image = compile_linear(parse_program("x := -2;  y := 100000;"))
    assert image.code[:2] == bytes([20, 0xFE])
    assert image.code[7:12] == bytes([21, 0xA0, 0x86, 0x01, 0x00])
    assert image.code[12:17] == bytes([45, 1, 0, 0, 0])
    # jump target of the power loop: 7 stored least-significant byte first
    power = compile_linear(parse_program(POWER))
    assert power.code[49:54] == bytes([10, 7, 0, 0, 0])
    assert power.code[15:20] == bytes([11, 54, 0, 0, 0])


def test_decode_errors():
    with pytest.raises(MalformedImage, match="unknown opcode 99"):
        decode(bytes([99]))
    with pytest.raises(MalformedImage, match="truncated"):
        decode(bytes([21, 1, 2]))


def test_validate():
    with pytest.raises(MalformedImage):
        validate(BytecodeImage(bytes([10, 3, 0, 0, 0, 0]), ()))  # mid-instruction target
    with pytest.raises(MalformedImage):
        validate(BytecodeImage(bytes([40, 1, 0, 0, 0, 0]), ("x",)))  # bad variable id
    with pytest.raises(MalformedImage):
        validate(BytecodeImage(bytes([20, 1]), ()))  # no end sentinel
    validate(BytecodeImage(bytes([10, 5, 0, 0, 0, 0]), ()))


def test_assemble_examples():
    assert assemble("0: push1 1\n2: end\n").code == bytes([20, 1, 0])
    assert assemble("push1 1\nend").code == bytes([20, 1, 0])
    with pytest.raises(AsmError, match="invalid jump target"):
        assemble("0: jump 999\n5: end\n")
    with pytest.raises(AsmError) as info:
        assemble("0: push1 1\n3: end\n")
    assert info.value.line == 2
    with pytest.raises(AsmError):
        assemble("frobnicate 1")
    with pytest.raises(AsmError):
        assemble("push1 300")


def test_power_round_trip():
    image = compile_linear(parse_program(POWER))
    assert assemble(disassemble(image)) == image


def test_symbols_directive_preserves_order():
    image = BytecodeImage(bytes([40, 1, 0, 0, 0, 45, 0, 0, 0, 0, 0]), ("a", "b"))
    text = disassemble(image)
    assert text.startswith(".symbols a b\n")
    assert assemble(text) == image
    unused = BytecodeImage(b"\x00", ("ghost",))
    assert assemble(disassemble(unused)) == unused


@pytest.mark.parametrize("seed", range(1, 21))
def test_generated_round_trip(seed):
    image = compile_linear(generate(GenConfig.small(seed)))
    assert assemble(disassemble(image)) == image


def test_acbc_round_trip(tmp_path):
    image = compile_linear(parse_program(POWER))
    path = tmp_path / "power.acbc"
    write_acbc(path, image)
    assert read_acbc(path) == image
    data = dump_acbc(image)
    assert data[:5] == b"ACBC\x01"
    assert data[5:9] == bytes([3, 0, 0, 0])
    assert data[9:11] == bytes([3, 0]) and data[11:14] == b"val"


def test_acbc_fixture_bytes():
    image = BytecodeImage(bytes([20, 1, 45, 0, 0, 0, 0, 0]), ("x",))
    assert dump_acbc(image) == (b"ACBC\x01" + bytes([1, 0, 0, 0]) + bytes([1, 0]) + b"x"
                                + bytes([8, 0, 0, 0]) + image.code)


def test_acbc_malformed():
    data = dump_acbc(compile_linear(parse_program(POWER)))
    with pytest.raises(MalformedImage):
        load_acbc(data[:-3])
    with pytest.raises(MalformedImage):
        load_acbc(b"XXXX" + data[4:])
    with pytest.raises(MalformedImage):
        load_acbc(data + b"\x00")
    with pytest.raises(MalformedImage):
        load_acbc(data[:4] + b"\x02" + data[5:])
