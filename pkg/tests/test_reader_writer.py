import json
import os

import pandas as pd
import pytest

from momentforge.errors import (
    BoundaryMissError,
    GenericityError,
    InjectivityViolation,
    NotSurjectiveError,
    ParseError,
    PoleOnCircleError,
    TangencyError,
    TriplePointError,
    ValidationError,
    ValidationReport,
)
from momentforge.fixtures import VALID_PLANAR, fixture_document, fixture_names, fixture_text, load_fixture
from momentforge.moment_map import GeneralRegion, strata_table
from momentforge.numeric_verify import Tolerances
from momentforge.reader import (
    construct_directive,
    document_from_data,
    ensure_file_exists,
    load_input,
    load_tolerance_config,
    parse_alloc,
    parse_input,
)
from momentforge.writer import print_auto, write_auto, write_csv, write_json, write_jsonl, write_xlsx

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _text(doc):
    return json.dumps(doc)


@pytest.mark.parametrize("name", VALID_PLANAR)
def test_document_round_trip(name):
    d = load_fixture(name)
    doc = document_from_data(d)
    again = document_from_data(parse_input(_text(doc)))
    assert again == doc


def test_general_region_round_trip():
    d = load_fixture("tangent", validate=False)
    assert isinstance(d.region, GeneralRegion)
    doc = document_from_data(d)
    assert doc["region"]["polynomials"] == ["1 - 1*x1^2 - 1*x2^2", "3 - 4*x1 + 1*x1^2 + 1*x2^2"]
    assert document_from_data(parse_input(_text(doc), validate=False)) == doc


def test_syntax_error_carries_line():
    with pytest.raises(ParseError) as exc:
        parse_input('{\n  "circles": [\n    oops\n  ]\n}')
    assert exc.value.line == 3


def test_duplicate_circle_id():
    doc = fixture_document("annulus")
    doc["circles"][1]["id"] = 1
    with pytest.raises(ParseError) as exc:
        parse_input(_text(doc))
    assert exc.value.field == "circles[1].id"


@pytest.mark.parametrize("mutate, field", [
    (lambda doc: doc["maps"].pop("m_l2"), "maps.m_l2"),
    (lambda doc: doc["circles"][0].update(radius="-1"), "circles[0].radius"),
    (lambda doc: doc["circles"][0].update(radius="1/0"), "circles[0].radius"),
    (lambda doc: doc["circles"][0].update(orientation="sideways"), "circles[0].orientation"),
    (lambda doc: doc["region"].update(seed=["0"]), "region.seed"),
    (lambda doc: doc["maps"].update(m_l1_l2=[1, "a"]), "maps.m_l1_l2"),
    (lambda doc: doc["maps"].update(m_l1_l2=[1, 3]), "maps"),
])
def test_field_errors(mutate, field):
    doc = fixture_document("annulus")
    mutate(doc)
    with pytest.raises(ParseError) as exc:
        parse_input(_text(doc))
    assert exc.value.field == field


def test_validation_error_carries_report():
    with pytest.raises(ValidationError) as exc:
        parse_input(fixture_text("shared_x"))
    assert exc.value.report.has("genericity")
    assert parse_input(fixture_text("shared_x"), validate=False).l1 == 2


def test_construct_directive():
    doc = fixture_document("annulus")
    doc["construct"] = {"kind": "mt2", "alloc": {"0": 1}, "total_dim": 4}
    assert construct_directive(_text(doc))["kind"] == "mt2"
    assert construct_directive(fixture_text("disk")) is None


@pytest.mark.parametrize("text, expected", [("", {}), ("0:1", {0: 1}), ("0:1,2:3,0:1", {0: 2, 2: 3})])
def test_parse_alloc(text, expected):
    assert parse_alloc(text) == expected


def test_parse_alloc_rejects():
    with pytest.raises(ParseError):
        parse_alloc("0-1")


def test_unknown_fixture():
    assert "annulus" in fixture_names()
    with pytest.raises(KeyError):
        fixture_document("torus")


def test_load_input_from_file(tmp_path):
    path = tmp_path / "annulus.json"
    path.write_text(fixture_text("annulus"), encoding="utf-8")
    assert load_input(str(path)).l1 == 2
    with pytest.raises(FileNotFoundError):
        ensure_file_exists(str(tmp_path / "missing.json"))


def test_tolerance_profiles():
    config = os.path.join(REPO_ROOT, "tolerance_config.json")
    assert load_tolerance_config(config) == Tolerances()
    quick = load_tolerance_config(config, "quick")
    assert (quick.grid, quick.samples, quick.oracle_resolution) == (60, 20, 4)
    assert quick.tol_rank == Tolerances().tol_rank
    assert load_tolerance_config(config, "strict").grid == 400


def test_tolerance_config_fallbacks(tmp_path):
    assert load_tolerance_config(str(tmp_path / "none.json")) == Tolerances()
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert load_tolerance_config(str(broken)) == Tolerances()
    assert load_tolerance_config(os.path.join(REPO_ROOT, "tolerance_config.json"), "nope") == Tolerances()


def test_write_json_is_stable(tmp_path, annulus):
    path = tmp_path / "doc.json"
    write_json(document_from_data(annulus), str(path))
    first = path.read_text(encoding="utf-8")
    write_json(document_from_data(annulus), str(path))
    assert path.read_text(encoding="utf-8") == first
    assert first.endswith("}\n")


def test_strata_csv_and_xlsx(tmp_path, lens):
    rows = strata_table(lens)
    csv_path = tmp_path / "strata.csv"
    xlsx_path = tmp_path / "strata.xlsx"
    write_csv(rows, str(csv_path))
    write_xlsx(rows, str(xlsx_path))
    from_csv = pd.read_csv(csv_path, keep_default_na=False, dtype=str)
    from_xlsx = pd.read_excel(xlsx_path, sheet_name="strata", engine="openpyxl", dtype=str).fillna("")
    assert list(from_csv.columns) == ["stratum", "circles", "x", "fiber", "dims", "dim"]
    assert from_csv.loc[0, "dims"] == "1 2"
    assert from_csv.loc[0, "fiber"] == "S^1 x S^2"
    assert len(from_xlsx) == len(rows)


def test_write_jsonl(tmp_path):
    path = tmp_path / "rows.jsonl"
    write_jsonl([{"a": 1}, {"a": 2}], str(path))
    assert [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()] == [{"a": 1}, {"a": 2}]


def test_write_auto_dispatch(tmp_path):
    write_auto("graph g {\n}\n", str(tmp_path / "g.dot"))
    assert (tmp_path / "g.dot").read_text(encoding="utf-8") == "graph g {\n}\n"
    with pytest.raises(ValueError):
        write_auto({"a": 1}, str(tmp_path / "x.csv"))
    with pytest.raises(ValueError):
        write_auto("text", str(tmp_path / "x.bin"))


def test_print_auto(capsys):
    print_auto("V 2\n0 1\n", mode="text")
    print_auto({"a": 1})
    out = capsys.readouterr().out
    assert out.startswith("V 2\n0 1\n")
    assert '"a": 1' in out


def _circle(cid, cx, cy, r, orientation):
    return {"id": cid, "center": [cx, cy], "radius": r, "orientation": orientation}


def _document(circles, seed, group_map, dim_map):
    return {"circles": circles, "region": {"seed": seed}, "maps": {"m_l1_l2": group_map, "m_l2": dim_map}}


def _with_maps(name, group_map, dim_map):
    doc = fixture_document(name)
    doc["maps"] = {"m_l1_l2": group_map, "m_l2": dim_map}
    return doc


@pytest.mark.parametrize("doc, error_class", [
    (fixture_document("shared_x"), GenericityError),
    # 圆 2 经过圆 1 的右极点 (2, 0)
    (_document([_circle(1, "0", "0", "2", "inside"), _circle(2, "2", "1", "1", "outside")],
               ["-1", "0"], [1, 2], [1, 1]), PoleOnCircleError),
    # 圆 1、2、4 共点 (1, 0)，同时带有相切
    (_document([_circle(1, "0", "0", "1", "outside"), _circle(2, "2", "0", "1", "outside"),
                _circle(3, "1", "0", "2", "inside"), _circle(4, "1", "1", "1", "outside")],
               ["1", "-3/2"], [1, 2, 3, 4], [1, 1, 1, 1]), TriplePointError),
    (_document([_circle(1, "0", "0", "2", "inside"), _circle(2, "5", "5", "1", "outside")],
               ["0", "0"], [1, 2], [1, 1]), BoundaryMissError),
    (_with_maps("disk", [1], [1, 1]), NotSurjectiveError),
    (_with_maps("lens", [1, 1], [1]), InjectivityViolation),
])
def test_validation_raises_issue_class(doc, error_class):
    with pytest.raises(error_class) as exc:
        parse_input(_text(doc))
    assert isinstance(exc.value, ValidationError)
    assert exc.value.report.has(error_class.error_type)


def test_raise_for_issues_precedence():
    report = ValidationReport()
    report.raise_for_issues()
    report.add("tangency", "circles 1 and 2 touch", "(1, 0)")
    report.add("genericity", "shared x-coordinate", "x = 1")
    with pytest.raises(TangencyError) as exc:
        report.raise_for_issues()
    assert exc.value.report is report


def test_validation_error_from_message():
    error = GenericityError("two poles share x = 1", "x = 1")
    assert str(error) == "two poles share x = 1"
    assert [i.error_type for i in error.report.issues] == ["genericity"]
    assert error.report.issues[0].witness == "x = 1"
