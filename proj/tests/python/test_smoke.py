import math
import pathlib

import numpy as np
import pytest

import mortgeom as mg

DATA = pathlib.Path(__file__).resolve().parents[1] / "data" / "sample.Mx_1x1.txt"


def test_plane_has_no_curvature():
    s = mg.plane(2e-4, 3e-4, 0.01).materialize(1900, 1949, 0, 49)
    field = mg.compute_geometry(s)
    nc = field.normal_curvatures()
    assert nc.shape == (50, 50, 4)
    assert np.nanmax(np.abs(nc)) < 1e-12
    series = mg.cei_series(field, s)
    assert max(series.values) < 1e-12


def test_sample_pipeline():
    table = mg.read_hmd(str(DATA))
    assert table.total.missing_count == 9
    assert np.isnan(table.total.rates()).sum() == 9
    field = mg.compute_geometry(table.total)
    series = mg.trim_series(mg.cei_series(field, table.total))
    assert series.last_birth_year == 1970
    report = mg.analyze(series)
    assert report.aice > 0
    assert any(p.start_year <= 1925 <= p.end_year for p in report.peaks)
    assert "birth_year,cei,point_count" in series.to_csv()


def test_round_trip_through_numpy():
    table = mg.read_hmd(str(DATA))
    s = table.female
    back = mg.MortalitySurface(s.rates(), s.first_year, s.first_age, s.sex, s.label)
    assert back == s
    assert mg.parse_surface_json(s.to_json()) == s


def test_aice_scale_invariant():
    s = mg.gaussian_ridge(50.0, offset=1940.0).materialize(1900, 1999, 0, 99)
    series = mg.cei_series(mg.compute_geometry(s), s)
    a = mg.aice(series).aice
    b = mg.aice(mg.scale_series(series, 7.5)).aice
    assert math.isclose(a, b, rel_tol=1e-12)


def test_ridge_matches_smooth_integral():
    ridge = mg.gaussian_ridge(50.0)
    s = ridge.materialize(0, 99, 0, 99)
    series = mg.cei_series(mg.compute_geometry(s), s)
    discrete = series[0] * math.sqrt(2.0)
    assert discrete == pytest.approx(ridge.cei(0.0, 0.5, 98.5), rel=0.1)


def test_errors_are_typed():
    with pytest.raises(mg.FormatError):
        mg.parse_hmd("title\n\nYear Age Female Male\n")
    with pytest.raises(mg.ParseError):
        mg.parse_csv_matrix("1,2\n3\n", 1900, 0)
    with pytest.raises(mg.AnalyticsError):
        mg.render_svg([])


def test_normal_is_unit():
    n = mg.estimate_normal([[1, 0, 0.1], [0, 1, 0.2], [1, 1, 0.3], [1, -1, -0.1]])
    assert np.linalg.norm(n) == pytest.approx(1.0)
    assert n[2] >= 0
