from __future__ import annotations

import pytest

from app.core.classify import is_trivial_fibration
from app.core.corpus import builtin_double
from app.core.dblcat import validate_double_category, validate_double_functor
from app.core.errors import FormatError, UnknownBuiltin
from app.core.nerve import builtin_diagram, nerve
from app.core.presheaf import validate_presheaf
from app.core.signature import builtin_signature, validate_signature
from app.core.textio import (
    detect_format,
    format_double_category,
    format_presheaf,
    format_signature,
    load_any,
    load_span,
    parse_double_category,
    parse_presheaf,
    parse_signature,
    read_text,
    write_text,
)


@pytest.mark.parametrize(
    "filename, fmt",
    [
        ("reflexive_graph.sig", "signature"),
        ("one_loop.psh", "presheaf"),
        ("walking_arrow.dbl", "dblcat"),
        ("broken_unit.dbl", "dblcat"),
        ("walking_arrow_to_point.fun", "functor"),
        ("sqi_to_point.span", "span"),
    ],
)
def test_data_files_are_recognised(data_dir, filename, fmt):
    assert detect_format(read_text(data_dir / filename)) == fmt
    assert load_any(str(data_dir / filename))[0] == fmt


def test_signature_file(data_dir):
    _, sig = load_any(str(data_dir / "reflexive_graph.sig"))
    assert validate_signature(sig).ok
    assert sig.name == "reflexive_graph"
    assert set(sig.relation_kinds) == {"I"}
    assert sig.degree("I") == 2


def test_presheaf_file_resolves_its_signature(data_dir):
    _, X = load_any(str(data_dir / "one_loop.psh"))
    assert X.signature.name == "reflexive_graph"
    assert validate_presheaf(X).ok
    assert X.fiber("A", ("x", "x")) == ("l", "m")


def test_walking_arrow_file_matches_the_builtin(data_dir):
    _, A = load_any(str(data_dir / "walking_arrow.dbl"))
    assert validate_double_category(A).ok
    assert A.size() == builtin_double("H2").size()


def test_broken_unit_law_is_reported(data_dir):
    _, A = load_any(str(data_dir / "broken_unit.dbl"))
    report = validate_double_category(A)
    assert not report.ok


def test_functor_file(data_dir):
    _, F = load_any(str(data_dir / "walking_arrow_to_point.fun"))
    assert F.name == "walking_arrow_to_point"
    assert validate_double_functor(F).ok
    assert is_trivial_fibration(F).failing == "full_vertical"


def test_span_file(data_dir):
    span = load_span(str(data_dir / "sqi_to_point.span"))
    assert span.diagram == "dblcat"
    assert span.left.target.name == "SqI"
    assert span.right.target.name == "1"


def test_detect_format_from_headers():
    assert detect_format("kinds: O A\n") == "signature"
    assert detect_format("signature: builtin:cat\nO: x\n") == "presheaf"
    assert detect_format("source: a.dbl\ntarget: b.dbl\nobj: 0 |-> *\n") == "functor"
    assert detect_format("source: a.psh\ntarget: b.psh\nat x: y\n") == "nattransf"
    assert detect_format("objects: 0\nidh: 0 = id0\n") == "dblcat"
    assert detect_format("objects: a\nhmor: f: a -> a\n") == "presentation"
    assert detect_format("format: inclusion\n") == "inclusion"


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltin):
        load_any("builtin:no-such-thing")


def test_bad_lines_carry_their_position():
    with pytest.raises(FormatError, match="line 2"):
        parse_double_category("objects: 0\nhmor: f 0 1\n")
    with pytest.raises(FormatError):
        parse_double_category("objects: 0\nwhatever: 1\n")
    with pytest.raises(FormatError):
        parse_signature("name: empty\n")


def test_written_double_category_reads_back(tmp_path):
    A = builtin_double("Sq2")
    path = write_text(tmp_path / "nested" / "sq2.dbl", format_double_category(A))
    B = parse_double_category(read_text(path), path=str(path))
    assert validate_double_category(B).ok
    assert dict(B.squares) == dict(A.squares)
    assert dict(B.hcomp_sq) == dict(A.hcomp_sq)
    assert dict(B.esq) == dict(A.esq)


def test_written_nerve_reads_back():
    N = nerve(builtin_double("H2"), builtin_diagram("cat")).presheaf
    X = parse_presheaf(format_presheaf(N, "builtin:cat"))
    assert validate_presheaf(X).ok
    assert dict(X.carrier) == dict(N.carrier)
    assert dict(X.action) == dict(N.action)


def test_written_signature_reads_back():
    sig = builtin_signature("dblcat")
    again = parse_signature(format_signature(sig))
    assert again.kinds == sig.kinds
    assert again.degrees == sig.degrees
    assert {str(r) for r in again.relations} == {str(r) for r in sig.relations}


def test_file_suffix_overrides_directive_sniffing(tmp_path):
    text = "name: X\nobjects: a b\nhmor: f: a -> b\n"
    assert detect_format(text) == "presentation"
    path = write_text(tmp_path / "no_units.dbl", text)
    assert detect_format(text, path) == "dblcat"
    fmt, A = load_any(str(path))
    assert fmt == "dblcat"
    report = validate_double_category(A)
    assert not report.ok
    assert report.first.code == "LawViolation"


def test_format_header_is_accepted_by_the_double_category_reader(tmp_path):
    text = "format: dblcat\n" + format_double_category(builtin_double("H2"))
    path = write_text(tmp_path / "h2.txt", text)
    fmt, A = load_any(str(path))
    assert fmt == "dblcat"
    assert validate_double_category(A).ok


def test_undecodable_bytes_are_a_format_error(tmp_path):
    path = tmp_path / "garbage.dbl"
    path.write_bytes(b"\xff\xfe\x00objects: a\n")
    with pytest.raises(FormatError, match="UTF-8"):
        read_text(path)
    with pytest.raises(FormatError):
        load_any(str(path))
