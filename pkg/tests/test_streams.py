import math

import numpy as np
import pytest

from curie.errors import ConfigError, RowError, SchemaError
from curie.streams import (
    FAMILIES,
    ConceptSpec,
    DriftScenario,
    StreamSchema,
    concept_label,
    generate_stream,
    load_csv,
    new_concept,
    old_concept,
    preprocess_split,
    scenario,
)


# ----------------------------------------------------------- concept rules

def test_circle_examples():
    c = ConceptSpec("circle", (0.5, 0.5, 0.3))
    assert concept_label(c, np.array([0.5, 0.5])) == 1
    assert concept_label(c, np.array([0.0, 0.0])) == 0


def test_line_example():
    c = ConceptSpec("line", (0.5,))
    assert concept_label(c, np.array([0.2, 0.2])) == 1  # 0.2 <= -0.2 + 0.5
    assert concept_label(c, np.array([0.4, 0.2])) == 0


def test_sine_families():
    v = ConceptSpec("sinev", (0.4,))
    assert concept_label(v, np.array([0.0, 0.39])) == 1
    assert concept_label(v, np.array([0.0, 0.41])) == 0
    h = ConceptSpec("sineh", (0.0,))
    assert concept_label(h, np.array([0.0, 0.49])) == 1
    assert concept_label(h, np.array([0.0, 0.51])) == 0


def test_concept_rejects_out_of_range():
    c = ConceptSpec("circle", (0.5, 0.5, 0.3))
    with pytest.raises(ValueError):
        concept_label(c, np.array([1.2, 0.5]))
    with pytest.raises(ValueError):
        concept_label(c, np.array([0.5, -0.1]))


def test_concept_validation():
    with pytest.raises(ConfigError):
        ConceptSpec("blob", (1.0,))
    with pytest.raises(ConfigError):
        ConceptSpec("circle", (0.5,))


def test_default_concepts_are_balanced():
    # 35-65% positive under uniform sampling, for old and new of each family
    rng = np.random.default_rng(123)
    pts = rng.random((10_000, 2))
    for family in FAMILIES:
        for concept in (old_concept(family), new_concept(family)):
            pos = sum(concept_label(concept, p) for p in pts) / len(pts)
            assert 0.35 <= pos <= 0.65, (family, concept.params, pos)


# -------------------------------------------------------------- generation

def test_scenario_validation():
    with pytest.raises(ConfigError):
        DriftScenario(old_concept("circle"), new_concept("circle"),
                      length=100, drift_at=90, drift_width=20)
    with pytest.raises(ConfigError):
        DriftScenario(old_concept("circle"), new_concept("circle"), drift_width=0)


def test_stream_determinism():
    a = generate_stream(scenario("circle", seed=7))
    b = generate_stream(scenario("circle", seed=7))
    assert len(a) == len(b) == 2000
    for x, y in zip(a, b):
        assert np.array_equal(x.features, y.features) and x.label == y.label
    c = generate_stream(scenario("circle", seed=8))
    assert any(not np.array_equal(x.features, y.features) for x, y in zip(a, c))


def test_abrupt_switch_is_exact():
    sc = scenario("line", drift_width=1, seed=3)
    stream = generate_stream(sc)
    for t, instance in enumerate(stream):
        concept = sc.old if t < sc.drift_at else sc.new
        assert instance.label == concept_label(concept, instance.features), t


def test_gradual_mixing_ramp():
    # over the whole window the expected share of new-concept draws is ~0.5
    new_share = []
    for seed in range(10):
        sc = scenario("circle", drift_width=500, seed=seed)
        stream = generate_stream(sc)
        n_new = 0
        n_disagree = 0
        for t in range(1000, 1500):
            instance = stream[t]
            old_l = concept_label(sc.old, instance.features)
            new_l = concept_label(sc.new, instance.features)
            if old_l != new_l:
                n_disagree += 1
                n_new += instance.label == new_l
        new_share.append(n_new / n_disagree)
    assert abs(np.mean(new_share) - 0.5) <= 0.05


def test_features_are_uniform_unit_square():
    stream = generate_stream(scenario("sineh", seed=1))
    feats = np.stack([i.features for i in stream])
    assert feats.min() >= 0.0 and feats.max() <= 1.0
    assert abs(feats.mean() - 0.5) < 0.02


# --------------------------------------------------------------- ingestion

SCHEMA = StreamSchema(
    feature_columns=("a", "b"), label_column="y", class_count=2
)


def write_csv(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_csv_order_and_limit(tmp_path):
    rows = "\n".join(f"{i * 0.1},{i * 0.2},{i % 2}" for i in range(10))
    p = write_csv(tmp_path, "a,b,y\n" + rows + "\n")
    instances = load_csv(p, SCHEMA, limit=6)
    assert len(instances) == 6
    for i, instance in enumerate(instances):
        assert instance.features[0] == pytest.approx(i * 0.1)
        assert instance.label == i % 2


def test_load_csv_missing_column(tmp_path):
    p = write_csv(tmp_path, "a,z,y\n1,2,0\n")
    with pytest.raises(SchemaError):
        load_csv(p, SCHEMA)


def test_load_csv_fail_fast_on_marker(tmp_path):
    p = write_csv(tmp_path, "a,b,y\n1,?,0\n")
    with pytest.raises(RowError):
        load_csv(p, SCHEMA)


def test_load_csv_drop_row_policy(tmp_path, caplog):
    import logging

    schema = StreamSchema(
        feature_columns=("a", "b"), label_column="y", class_count=2,
        missing_policy="drop_row",
    )
    p = write_csv(tmp_path, "a,b,y\n1,?,0\n2,3,1\n4,5,0\n")
    with caplog.at_level(logging.INFO, logger="curie.streams"):
        instances = load_csv(p, schema, limit=2)
    assert len(instances) == 2
    assert instances[0].features[0] == 2.0  # marker row dropped before the cut
    assert "dropped 1 row(s)" in caplog.text


def test_load_csv_nan_policy(tmp_path):
    schema = StreamSchema(
        feature_columns=("a", "b"), label_column="y", class_count=2,
        missing_policy="nan",
    )
    p = write_csv(tmp_path, "a,b,y\n1,NA,0\n2,3,1\n")
    instances = load_csv(p, schema)
    assert math.isnan(instances[0].features[1])
    assert instances[1].features[1] == 3.0


def test_load_csv_label_map_and_range(tmp_path):
    schema = StreamSchema(
        feature_columns=("a", "b"), label_column="y", class_count=2,
        label_map={"UP": 1, "DOWN": 0},
    )
    p = write_csv(tmp_path, "a,b,y\n1,2,UP\n3,4,DOWN\n")
    instances = load_csv(p, schema)
    assert [i.label for i in instances] == [1, 0]
    bad = write_csv(tmp_path, "a,b,y\n1,2,7\n", name="bad.csv")
    with pytest.raises(RowError):
        load_csv(bad, SCHEMA)


def test_load_csv_malformed_numeric(tmp_path):
    p = write_csv(tmp_path, "a,b,y\n1,junk,0\n")
    with pytest.raises(RowError):
        load_csv(p, SCHEMA)


# ------------------------------------------------------------ preprocessing

def test_preprocess_minmax_fits_on_preparatory_only():
    from curie.types import LabeledInstance

    schema = StreamSchema(
        feature_columns=("a",), label_column="y", class_count=2,
        normalization="minmax_preparatory",
    )
    instances = [LabeledInstance(np.array([v]), 0) for v in [0.0, 10.0, 20.0, 40.0]]
    out = preprocess_split(instances, p_count=2, schema=schema)
    got = [i.features[0] for i in out]
    # fitted on [0, 10]: stream half scales past 1.0 (no clamping)
    assert got == pytest.approx([0.0, 1.0, 2.0, 4.0])


def test_preprocess_imputes_with_preparatory_median():
    from curie.types import LabeledInstance

    schema = StreamSchema(
        feature_columns=("a",), label_column="y", class_count=2,
        missing_policy="nan",
    )
    vals = [1.0, 3.0, math.nan, 100.0, math.nan]
    instances = [LabeledInstance(np.array([v]), 0) for v in vals]
    out = preprocess_split(instances, p_count=3, schema=schema)
    got = [i.features[0] for i in out]
    # preparatory half = [1, 3, nan] -> median 2.0 fills both NaNs
    assert got == pytest.approx([1.0, 3.0, 2.0, 100.0, 2.0])
