"""Tests for exporter module."""

import json

import pandas as pd
import pytest
from src.classrep import __version__
from src.classrep.errors import ConfigurationError
from src.classrep.exporter import (
    MANIFEST_NAME,
    ResultExporter,
    TaskFailure,
    load_manifest,
    sha256_file,
    verify_manifest,
)

pytestmark = pytest.mark.unit


@pytest.fixture
def frame():
    """Small table with values that need all 17 digits."""
    return pd.DataFrame({"m": [1, 1], "n": [0, 1], "epsilon": [1.0, 0.1 + 0.2]})


def test_write_csv_format(tmp_path, frame):
    """Test CSV output: header, 17 significant digits and LF line endings."""
    exporter = ResultExporter(tmp_path, "csv")
    path = exporter.write_table("eigenvalues", frame)

    raw = path.read_bytes()
    assert path.name == "eigenvalues.csv"
    assert b"\r\n" not in raw
    assert raw.decode().splitlines() == ["m,n,epsilon", "1,0,1", "1,1,0.30000000000000004"]


def test_write_json_records(tmp_path, frame):
    """Test JSON records keep the shortest round-trip floats."""
    exporter = ResultExporter(tmp_path, "json")
    path = exporter.write_table("eigenvalues", frame)

    records = json.loads(path.read_text())
    assert records[1] == {"m": 1, "n": 1, "epsilon": 0.30000000000000004}


def test_write_table_subdirectory(tmp_path, frame):
    """Test names with a directory part create the directory."""
    exporter = ResultExporter(tmp_path)
    path = exporter.write_table("density/m1_n0", frame)

    assert path == tmp_path / "density" / "m1_n0.csv"
    assert exporter.files[0].path == "density/m1_n0.csv"
    assert exporter.files[0].rows == 2


def test_rewriting_replaces_manifest_entry(tmp_path, frame):
    """Test that writing the same name twice keeps one entry with the new checksum."""
    exporter = ResultExporter(tmp_path)
    exporter.write_table("table", frame)
    path = exporter.write_table("table", frame.head(1))

    assert len(exporter.files) == 1
    assert exporter.files[0].sha256 == sha256_file(path)


def test_manifest_contents(tmp_path, frame):
    """Test that the manifest lists files sorted, with failures and version."""
    exporter = ResultExporter(tmp_path)
    exporter.write_table("b", frame)
    exporter.write_table("a", frame)
    failure = TaskFailure(m="infinite", n=0, stage="distribution", error_type="IntegrabilityError",
                          message="not integrable", expected=True)
    path = exporter.write_manifest("eigen", {"m": [1]}, summary=[{"m": 1}], failures=[failure])

    manifest = load_manifest(path)
    assert path.name == MANIFEST_NAME
    assert [f.path for f in manifest.files] == ["a.csv", "b.csv"]
    assert manifest.command == "eigen"
    assert manifest.tool_version == __version__
    assert manifest.failures[0].expected is True


def test_manifest_is_deterministic(tmp_path, frame):
    """Test that two identical runs produce byte-identical manifests."""
    outputs = []
    for name in ("first", "second"):
        exporter = ResultExporter(tmp_path / name)
        exporter.write_table("table", frame)
        outputs.append(exporter.write_manifest("eigen", {"m": [1]}).read_bytes())

    assert outputs[0] == outputs[1]


def test_verify_manifest_clean(tmp_path, frame):
    """Test that an untouched output directory verifies."""
    exporter = ResultExporter(tmp_path)
    exporter.write_table("table", frame)
    path = exporter.write_manifest("eigen", {})

    assert verify_manifest(path) == []


def test_verify_manifest_detects_changes(tmp_path, frame):
    """Test checksum mismatch and missing file reports."""
    exporter = ResultExporter(tmp_path)
    changed = exporter.write_table("changed", frame)
    removed = exporter.write_table("removed", frame)
    path = exporter.write_manifest("eigen", {})
    changed.write_text("m,n,epsilon\n1,0,2\n")
    removed.unlink()

    assert verify_manifest(path) == ["changed.csv: checksum mismatch", "removed.csv: missing"]


def test_load_manifest_errors(tmp_path):
    """Test missing and malformed manifests raise ConfigurationError."""
    with pytest.raises(ConfigurationError):
        load_manifest(tmp_path / MANIFEST_NAME)

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_manifest(bad)


def test_exporter_unwritable_directory(tmp_path):
    """Test that an output path below a regular file is a configuration error."""
    blocker = tmp_path / "file"
    blocker.write_text("")

    with pytest.raises(ConfigurationError):
        ResultExporter(blocker / "out")
