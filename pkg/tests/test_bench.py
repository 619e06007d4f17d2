import pytest

from ghzbeam.bench import BenchParseError, parse


def test_four_statement_program():
    program = parse("swp; bs; hwp@0 on arm0; hwp@-45 on arm1")
    assert len(program) == 4
    kinds = [s.kind for s in program]
    assert kinds == ["swp", "bs", "hwp", "hwp"]
    assert program.statements[2].angle_deg == 0.0
    assert program.statements[2].arm == 0
    assert program.statements[3].angle_deg == -45.0
    assert program.statements[3].arm == 1


def test_empty_source_is_a_valid_empty_program():
    assert len(parse("")) == 0
    assert len(parse("\n\n  # only a comment\n")) == 0


def test_statements_split_across_lines_and_comments():
    text = """
    # preparation
    swp
    bs          # splits the beam
    hwp@0 on arm0; hwp@-45 on arm1
    """
    program = parse(text)
    assert [s.kind for s in program] == ["swp", "bs", "hwp", "hwp"]
    assert program.statements[0].line == 3


def test_missing_angle_is_a_parameter_error_with_position():
    with pytest.raises(BenchParseError) as err:
        parse("hwp on arm0")
    assert "requires an angle" in str(err.value)
    assert err.value.line == 1
    assert err.value.col == 1


def test_unknown_element():
    with pytest.raises(BenchParseError) as err:
        parse("bs\nqwp@45")
    assert "unknown element" in str(err.value)
    assert err.value.line == 2


def test_undeclared_arm():
    with pytest.raises(BenchParseError) as err:
        parse("hwp@10 on arm2")
    assert "undeclared arm" in str(err.value)


def test_arm_annotation_rejected_for_whole_bench_elements():
    for bad in ("bs on arm0", "swp on arm1", "mirrors on arm0", "mzim(phi=0) on arm1"):
        with pytest.raises(BenchParseError):
            parse(bad)


def test_lexical_garbage_reports_position():
    with pytest.raises(BenchParseError) as err:
        parse("bs; hwp@@3")
    assert err.value.line == 1
    assert err.value.col == 5


def test_phase_parameter_forms():
    program = parse("phase@phi=1.5 on arm1\nmzim(phi=0.25)")
    assert program.statements[0].phi == 1.5
    assert program.statements[0].arm == 1
    assert program.statements[1].kind == "mzim"
    assert program.statements[1].phi == 0.25


def test_phase_requires_phi_and_rejects_angle_form():
    with pytest.raises(BenchParseError):
        parse("phase")
    with pytest.raises(BenchParseError):
        parse("mzim")
    with pytest.raises(BenchParseError):
        parse("bs@45")


def test_call_syntax_restricted_to_mzim():
    with pytest.raises(BenchParseError):
        parse("hwp(phi=0.3)")


def test_block_requires_an_arm():
    with pytest.raises(BenchParseError):
        parse("block")
    program = parse("block on arm1")
    assert program.statements[0].kind == "block"
    assert program.statements[0].arm == 1


def test_scientific_notation_and_signs():
    program = parse("hwp@-2.25e1; phase@phi=+3.14159e0")
    assert program.statements[0].angle_deg == -22.5
    assert program.statements[1].phi == pytest.approx(3.14159)


def test_default_port_names():
    program = parse("bs")
    assert program.input_ports == ("in0", "in1")
    assert program.output_ports == ("out0", "out1")
