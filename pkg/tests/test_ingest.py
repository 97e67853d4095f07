import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metrorisk.ingest import (
    Activity, ConfigError, FrameObservation, GridSpec, OrderingError, PersonTimeline, SceneConfig,
    SchemaError, StreamParseError, derive_foot_point, dump_scene, load_scene, parse_stream,
    serialize_stream,
)
from metrorisk.projection import Homography

from conftest import unit_square_scene


def rec(f, pid, ll=(5, 9), rl=(6, 9), act="Walk", **extra):
    d = {"f": f, "id": pid, "bbox": [0, 0, 10, 10], "ll": ll, "rl": rl, "act": act}
    d.update(extra)
    return json.dumps(d)


def test_empty_stream():
    assert parse_stream("") == []
    assert parse_stream([]) == []


def test_grouping_by_id():
    tls = parse_stream([rec(0, 0), rec(1, 0), rec(0, 1)])
    assert sorted(len(t) for t in tls) == [1, 2]
    assert {t.person_id for t in tls} == {0, 1}


def test_ordering_error_names_line():
    with pytest.raises(OrderingError) as ei:
        parse_stream([rec(5, 0), rec(4, 0)])
    assert ei.value.line == 2


def test_duplicate_frame_is_ordering_error():
    with pytest.raises(OrderingError):
        parse_stream([rec(3, 0), rec(3, 0)])


def test_malformed_record_line_number():
    with pytest.raises(StreamParseError) as ei:
        parse_stream([rec(0, 0), "{not json"])
    assert ei.value.line == 2


@pytest.mark.parametrize("drop", ["f", "id", "bbox"])
def test_missing_mandatory_field(drop):
    d = json.loads(rec(0, 0))
    del d[drop]
    with pytest.raises(SchemaError):
        parse_stream([json.dumps(d)])


def test_unknown_fields_ignored():
    tls = parse_stream([rec(0, 0, conf=0.93, extra={"x": 1})])
    assert len(tls) == 1


def test_keypoint_outside_expanded_bbox():
    with pytest.raises(SchemaError):
        parse_stream([rec(0, 0, ll=(40, 40))])
    # just inside the 1.5x box (x in [-2.5, 12.5])
    parse_stream([rec(0, 0, ll=(12.4, 5))])


def test_unknown_activity_maps_to_none():
    tl = parse_stream([rec(0, 0, act="Dance"), rec(1, 0, act=None)])[0]
    assert list(tl.activity) == [Activity.NONE, Activity.NONE]


def test_foot_point_examples():
    bbox = (0.0, 0.0, 10.0, 50.0)
    assert derive_foot_point(FrameObservation(0, 0, bbox, (10, 100), (20, 100))) == (15, 100)
    assert derive_foot_point(FrameObservation(0, 0, bbox)) == (5, 50)
    assert derive_foot_point(FrameObservation(0, 0, bbox, (7, 90), None)) == (7, 90)
    assert derive_foot_point(FrameObservation(0, 0, bbox, None, (8, 91))) == (8, 91)


def test_vectorized_foot_points_match_scalar():
    lines = [rec(0, 0), rec(1, 0, ll=None), rec(2, 0, rl=None), rec(3, 0, ll=None, rl=None)]
    tl = parse_stream(lines)[0]
    expect = [derive_foot_point(s) for s in tl.samples]
    assert np.allclose(tl.foot_points, expect, rtol=0, atol=0)


coord = st.floats(-1e4, 1e4, allow_nan=False, width=32)


@st.composite
def timelines(draw):
    n_people = draw(st.integers(0, 4))
    out = []
    for pid in range(n_people):
        frames = sorted(draw(st.sets(st.integers(0, 500), min_size=1, max_size=12)))
        samples = []
        for f in frames:
            x, y = draw(coord), draw(coord)
            w, h = draw(st.floats(1, 100, width=32)), draw(st.floats(1, 200, width=32))
            ll = (x + w / 2, y + h) if draw(st.booleans()) else None
            rl = (x + w / 3, y + h) if draw(st.booleans()) else None
            act = draw(st.sampled_from(list(Activity)))
            samples.append(FrameObservation(f, pid, (x, y, w, h), ll, rl, act))
        out.append(PersonTimeline.from_samples(samples, video_id="v"))
    return out


@given(timelines())
def test_parse_serialize_round_trip(tls):
    back = parse_stream(serialize_stream(tls), video_id="v")
    assert len(back) == len(tls)
    by_id = {t.person_id: t for t in back}
    for t in tls:
        assert by_id[t.person_id] == t


@given(timelines())
def test_timeline_count_equals_distinct_ids(tls):
    text = serialize_stream(tls)
    ids = {json.loads(line)["id"] for line in text.splitlines()}
    assert len(parse_stream(text)) == len(ids)


def test_scene_round_trip(tmp_path):
    cfg = unit_square_scene(alpha=0.25, yellow_boundary_override=[(1, 0), (1, 0.5), (1, 1)])
    dump_scene(cfg, tmp_path / "s.json")
    back = load_scene(tmp_path / "s.json")
    assert back.to_dict() == cfg.to_dict()


@pytest.mark.parametrize("change", [
    {"alpha": 0.5}, {"beta": 0.0}, {"offset_d": 0.0}, {"fps": 0.0},
    {"corners": {"T_L": (0, 0), "T_R": (1, 1), "B_L": (1, 0), "B_R": (0, 1)}},  # bow-tie
])
def test_scene_invariants(change):
    with pytest.raises(ConfigError):
        unit_square_scene().replace(**change)


def test_grid_spec_shape():
    assert GridSpec(0, 1, 0, 2, 0.1).shape == (20, 10)
    assert GridSpec(0, 1.05, 0, 1, 0.1).shape == (10, 11)
    with pytest.raises(ConfigError):
        GridSpec(0, 1, 0, 1, 0.0)


def test_singular_homography_rejected():
    with pytest.raises(ValueError):
        SceneConfig(corners=unit_square_scene().corners, homography=Homography(np.zeros((3, 3))),
                    offset_d=0.1, fps=10, grid=GridSpec(0, 1, 0, 1, 0.1))


def test_missing_config_field():
    doc = unit_square_scene().to_dict()
    del doc["fps"]
    with pytest.raises(ConfigError):
        SceneConfig.from_dict(doc)


def test_nan_leg_rows():
    tl = parse_stream([rec(0, 0, ll=None)])[0]
    assert math.isnan(tl.left_leg[0, 0])
    assert tl.samples[0].left_leg is None
