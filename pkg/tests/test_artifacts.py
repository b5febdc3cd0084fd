"""Tests for document models and artifact writers."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from src import artifacts
from src.curves import circle
from src.errors import InputError
from src.models import CurveDocument, PolygonDocument, PotentialDocument, RunManifest
from src.polygons import CentroaffinePolygon, SymmetricPolygon, regular_polygon


class TestCurveDocument:
    """Tests for the curve file model."""

    def test_from_curve_uses_alias(self):
        """Test the sample count is serialized as N."""
        document = CurveDocument.from_curve(circle(256))
        data = json.loads(document.model_dump_json(by_alias=True))
        assert data["N"] == 256
        assert data["closed"] is True

    def test_to_curve(self):
        """Test a written circle reads back as the same curve."""
        curve = CurveDocument.from_curve(circle(256)).to_curve()
        assert curve.size == 256
        assert np.allclose(curve.samples, circle(256).samples)

    def test_sample_count_mismatch(self):
        """Test N must match the number of samples."""
        with pytest.raises(ValidationError):
            CurveDocument(N=3, samples=[[1.0, 0.0], [0.0, 1.0]])

    def test_points_must_be_pairs(self):
        """Test every sample has two coordinates."""
        with pytest.raises(ValidationError):
            CurveDocument(N=2, samples=[[1.0, 0.0], [0.0, 1.0, 2.0]])


class TestPolygonDocument:
    """Tests for the polygon file model."""

    def test_unit_sides_give_centroaffine_polygon(self):
        """Test a regular polygon reads back as a CentroaffinePolygon."""
        polygon = PolygonDocument.from_polygon(regular_polygon(5)).to_polygon()
        assert isinstance(polygon, CentroaffinePolygon)

    def test_other_sides_give_symmetric_polygon(self):
        """Test scaled vertices fall back to a SymmetricPolygon."""
        vertices = 2.0 * regular_polygon(4).vertices
        polygon = PolygonDocument(n=4, vertices=vertices.tolist()).to_polygon()
        assert isinstance(polygon, SymmetricPolygon)
        assert not isinstance(polygon, CentroaffinePolygon)

    def test_vertex_count(self):
        """Test 2n vertices are required."""
        with pytest.raises(ValidationError):
            PolygonDocument(n=3, vertices=[[1.0, 0.0]] * 5)


class TestReadJson:
    """Tests for reading input files."""

    def test_missing_file(self, tmp_path):
        """Test a missing file raises InputError."""
        with pytest.raises(InputError):
            artifacts.read_json(tmp_path / "absent.json", CurveDocument)

    def test_not_json(self, tmp_path):
        """Test malformed JSON raises InputError."""
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(InputError):
            artifacts.read_json(path, CurveDocument)

    def test_validation_failure(self, tmp_path):
        """Test a schema violation raises InputError."""
        path = tmp_path / "short.json"
        path.write_text(json.dumps({"samples": [0.0, 1.0]}), encoding="utf-8")
        with pytest.raises(InputError):
            artifacts.read_json(path, PotentialDocument)

    def test_round_trip(self, tmp_path):
        """Test write_json output is accepted by read_json."""
        path = artifacts.write_json(tmp_path / "p.json",
                                    PotentialDocument(samples=[1.0] * 8))
        assert artifacts.read_json(path, PotentialDocument).samples == [1.0] * 8


class TestWriters:
    """Tests for atomic writers."""

    def test_atomic_write_leaves_no_temporaries(self, tmp_path):
        """Test only the target remains after a write."""
        target = tmp_path / "nested" / "file.txt"
        artifacts.atomic_write_text(target, "hello\n")
        assert target.read_text(encoding="utf-8") == "hello\n"
        assert [p.name for p in target.parent.iterdir()] == ["file.txt"]

    def test_csv_full_precision(self, tmp_path):
        """Test CSV values survive a text round trip."""
        rows = np.array([[np.pi, 1.0 / 3.0]])
        path = artifacts.write_csv(tmp_path / "a.csv", ["x", "y"], rows)
        header, line = path.read_text(encoding="utf-8").splitlines()
        assert header == "x,y"
        assert [float(v) for v in line.split(",")] == [np.pi, 1.0 / 3.0]

    def test_csv_column_mismatch(self, tmp_path):
        """Test a header of the wrong width raises ValueError."""
        with pytest.raises(ValueError):
            artifacts.write_csv(tmp_path / "a.csv", ["x"], np.zeros((2, 2)))

    def test_manifest_records_versions(self, tmp_path):
        """Test write_manifest fills in package versions."""
        path = artifacts.write_manifest(tmp_path, RunManifest(command="poly rigidity"))
        manifest = artifacts.read_json(path, RunManifest)
        assert path.name == "manifest.json"
        assert {"sb-curves", "numpy", "scipy"} <= set(manifest.versions)

    def test_manifest_is_deterministic(self, tmp_path):
        """Test two identical manifests produce identical bytes."""
        manifest = RunManifest(command="curve roots", parameters={"u": 0.5},
                               results={"count": 3})
        first = artifacts.write_manifest(tmp_path / "a", manifest).read_bytes()
        second = artifacts.write_manifest(tmp_path / "b", manifest).read_bytes()
        assert first == second
