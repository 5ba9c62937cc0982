import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import binary_space, full_binary_dataset, full_grid, make_dataset
from tunescape import (
    DataFormatError,
    MODEL_KINDS,
    ConfigurationSpace,
    OptionSchema,
    PredictionSet,
    emulated_view,
    encode_configs,
    load_external_predictions,
    load_model,
    predict,
    save_model,
    train,
    write_predictions,
)


def mixed_space():
    return ConfigurationSpace(
        [
            OptionSchema("flag", "binary", (0, 1)),
            OptionSchema("size", "numeric", (2, 4, 8)),
            OptionSchema("mode", "enumerated", ("a", "b", "c")),
        ]
    )


class TestEncodeConfigs:
    def test_binary_passes_through(self):
        space = binary_space(3)
        configs = [space.configuration(v) for v in [(0, 1, 0), (1, 1, 1)]]
        np.testing.assert_array_equal(
            encode_configs(space, configs), [[0.0, 1.0, 0.0], [1.0, 1.0, 1.0]]
        )

    def test_numeric_is_min_max_scaled(self):
        space = mixed_space()
        configs = [space.configuration((0, i, 0)) for i in range(3)]
        col = encode_configs(space, configs)[:, 1]
        np.testing.assert_allclose(col, [0.0, (4 - 2) / 6, 1.0])

    def test_enumerated_is_one_hot(self):
        space = mixed_space()
        configs = [space.configuration((0, 0, i)) for i in range(3)]
        block = encode_configs(space, configs)[:, 2:]
        np.testing.assert_array_equal(block, np.eye(3))

    def test_width_is_binary_plus_numeric_plus_cardinalities(self):
        space = mixed_space()
        x = encode_configs(space, [space.configuration((1, 2, 1))])
        assert x.shape == (1, 1 + 1 + 3)


class TestLinear:
    def test_exact_on_linear_targets(self):
        ds = full_binary_dataset(
            4, [3.0 + 2.0 * g[0] - 1.5 * g[2] for g in full_grid(4)]
        )
        model = train("linear", ds)
        np.testing.assert_allclose(
            model.predict_values(ds.configurations), ds.performances, atol=1e-10
        )

    def test_rank_deficient_design_warns(self):
        grid = [g for g in full_grid(3) if g[2] == 0]
        ds = make_dataset(binary_space(3), grid, [float(sum(g)) for g in grid])
        with pytest.warns(UserWarning, match="rank-deficient"):
            train("linear", ds)

    def test_trains_on_raw_performance_even_when_maximizing(self):
        grid = full_grid(3)
        perf = [5.0 + 3.0 * g[1] for g in grid]
        ds = make_dataset(binary_space(3, direction="maximize"), grid, perf)
        model = train("linear", ds)
        np.testing.assert_allclose(
            model.predict_values(ds.configurations), perf, atol=1e-10
        )


class TestCart:
    def test_memorizes_with_min_leaf_one(self):
        rng = np.random.default_rng(0)
        ds = full_binary_dataset(5, rng.normal(size=32))
        model = train("cart", ds, params={"min_leaf": 1})
        np.testing.assert_allclose(
            model.predict_values(ds.configurations), ds.performances, atol=1e-12
        )

    def test_default_min_leaf_is_two(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        model = train("cart", ds)
        assert model.params.get("min_leaf", 2) == 2
        # leaves of size 2 average their pair, so the step function has 4 levels
        pred = model.predict_values(ds.configurations)
        assert len(set(np.round(pred, 9))) == 4

    def test_constant_targets_collapse_to_one_leaf(self):
        ds = full_binary_dataset(3, np.full(8, 2.5))
        model = train("cart", ds, params={"min_leaf": 1})
        assert model.tree == {"value": 2.5}

    def test_splits_on_the_informative_feature(self):
        grid = full_grid(4)
        ds = full_binary_dataset(4, [10.0 * g[2] for g in grid])
        model = train("cart", ds)
        assert model.tree["feature"] == 2
        assert model.tree["left"] == {"value": 0.0}
        assert model.tree["right"] == {"value": 10.0}

    def test_max_depth_limits_tree(self):
        rng = np.random.default_rng(1)
        ds = full_binary_dataset(5, rng.normal(size=32))
        model = train("cart", ds, params={"min_leaf": 1, "max_depth": 1})
        assert set(model.tree) == {"feature", "threshold", "left", "right"}
        assert "value" in model.tree["left"]
        assert "value" in model.tree["right"]

    def test_min_leaf_validated(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        with pytest.raises(ValueError):
            train("cart", ds, params={"min_leaf": 0})


class TestForest:
    def test_prediction_is_mean_of_trees(self):
        rng = np.random.default_rng(2)
        ds = full_binary_dataset(5, rng.normal(size=32))
        model = train("forest", ds, params={"n_trees": 7})
        per_tree = model.tree_predictions(ds.configurations)
        assert per_tree.shape == (7, 32)
        np.testing.assert_allclose(
            model.predict_values(ds.configurations), per_tree.mean(axis=0), atol=1e-12
        )

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(3)
        ds = full_binary_dataset(5, rng.normal(size=32))
        a = train("forest", ds, seed=11, params={"n_trees": 5})
        b = train("forest", ds, seed=11, params={"n_trees": 5})
        c = train("forest", ds, seed=12, params={"n_trees": 5})
        probe = ds.configurations[:10]
        np.testing.assert_array_equal(a.predict_values(probe), b.predict_values(probe))
        assert not np.array_equal(a.predict_values(probe), c.predict_values(probe))

    def test_n_trees_validated(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        with pytest.raises(ValueError):
            train("forest", ds, params={"n_trees": 0})


class TestKnn:
    def test_k1_memorizes_training_points(self):
        rng = np.random.default_rng(4)
        ds = full_binary_dataset(4, rng.normal(size=16))
        model = train("knn", ds, params={"k": 1})
        np.testing.assert_allclose(
            model.predict_values(ds.configurations), ds.performances, atol=1e-12
        )

    def test_k3_averages_nearest(self):
        # query 000: distances to 000,001,011,111 are 0,1,2,3
        ds = make_dataset(
            binary_space(3),
            [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)],
            [1.0, 2.0, 4.0, 8.0],
        )
        model = train("knn", ds)
        q = [ds.space.configuration((0, 0, 0))]
        assert model.predict_values(q)[0] == pytest.approx((1.0 + 2.0 + 4.0) / 3.0)

    def test_ties_break_by_training_row_order(self):
        space = binary_space(2)
        ds_ab = make_dataset(space, [(0, 0), (1, 1)], [0.0, 10.0])
        ds_ba = make_dataset(space, [(1, 1), (0, 0)], [10.0, 0.0])
        q = [space.configuration((0, 1))]
        assert train("knn", ds_ab, params={"k": 1}).predict_values(q)[0] == 0.0
        assert train("knn", ds_ba, params={"k": 1}).predict_values(q)[0] == 10.0

    def test_model_id_ignores_training_row_order(self):
        space = binary_space(2)
        ds_ab = make_dataset(space, [(0, 0), (1, 1)], [0.0, 10.0])
        ds_ba = make_dataset(space, [(1, 1), (0, 0)], [10.0, 0.0])
        assert train("knn", ds_ab).model_id == train("knn", ds_ba).model_id

    def test_k_capped_at_training_size(self):
        ds = make_dataset(binary_space(2), [(0, 0), (1, 1)], [2.0, 4.0])
        model = train("knn", ds, params={"k": 50})
        q = [ds.space.configuration((0, 1))]
        assert model.predict_values(q)[0] == pytest.approx(3.0)

    def test_k_validated(self):
        ds = make_dataset(binary_space(2), [(0, 0), (1, 1)], [2.0, 4.0])
        with pytest.raises(ValueError):
            train("knn", ds, params={"k": 0})


class TestTrainDispatch:
    def test_unknown_kind_rejected(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        with pytest.raises(ValueError, match="unknown model kind"):
            train("gp", ds)

    def test_model_id_prefixes_kind(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        for kind in MODEL_KINDS:
            assert train(kind, ds).model_id.startswith(f"{kind}:")

    def test_same_data_same_fingerprint(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        assert (
            train("cart", ds).train_fingerprint == train("linear", ds).train_fingerprint
        )

    def test_different_data_different_fingerprint(self):
        a = full_binary_dataset(3, np.arange(8.0))
        b = full_binary_dataset(3, np.arange(8.0) + 1.0)
        assert train("cart", a).train_fingerprint != train("cart", b).train_fingerprint


class TestPredictionSet:
    def test_alignment_enforced(self):
        space = binary_space(2)
        configs = (space.configuration((0, 0)),)
        with pytest.raises(ValueError):
            PredictionSet(configs, np.array([1.0, 2.0]), "m")

    def test_predict_wraps_model(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        model = train("knn", ds, params={"k": 1})
        ps = predict(model, ds.configurations)
        assert ps.model_id == model.model_id
        np.testing.assert_allclose(ps.predicted, ds.performances)
        with pytest.raises(ValueError):
            ps.predicted[0] = 99.0


class TestEmulatedView:
    def test_maximize_negates_predictions(self):
        grid = full_grid(3)
        perf = [float(1 + sum(g)) for g in grid]
        ds = make_dataset(binary_space(3, direction="maximize"), grid, perf)
        model = train("knn", ds, params={"k": 1})
        view = emulated_view(model, ds.configurations, "maximize")
        np.testing.assert_allclose(view.fitness, [-p for p in perf])
        assert view.source.startswith("model:knn:")

    def test_minimize_keeps_predictions(self):
        ds = full_binary_dataset(3, np.arange(8.0) + 1.0)
        model = train("knn", ds, params={"k": 1})
        view = emulated_view(model, ds.configurations, "minimize")
        np.testing.assert_allclose(view.fitness, ds.performances)

    def test_accepts_prediction_set(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        ps = predict(train("knn", ds, params={"k": 1}), ds.configurations)
        view = emulated_view(ps, ds.configurations, "minimize")
        np.testing.assert_allclose(view.fitness, ds.performances)
        with pytest.raises(ValueError):
            emulated_view(ps, ds.configurations[:4], "minimize")

    def test_direction_validated(self):
        ds = full_binary_dataset(3, np.arange(8.0))
        model = train("knn", ds)
        with pytest.raises(ValueError):
            emulated_view(model, ds.configurations, "up")


class TestSaveLoad:
    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_round_trip_preserves_predictions(self, kind, tmp_path):
        rng = np.random.default_rng(5)
        ds = full_binary_dataset(5, rng.normal(size=32))
        params = {"n_trees": 5} if kind == "forest" else None
        model = train(kind, ds, seed=3, params=params)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == kind
        assert loaded.model_id == model.model_id
        np.testing.assert_allclose(
            loaded.predict_values(ds.configurations),
            model.predict_values(ds.configurations),
            atol=0,
        )

    def test_version_mismatch_rejected(self, tmp_path):
        ds = full_binary_dataset(3, np.arange(8.0))
        path = tmp_path / "model.json"
        save_model(train("cart", ds), path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(DataFormatError, match="format version"):
            load_model(path)

    def test_unknown_kind_rejected(self, tmp_path):
        ds = full_binary_dataset(3, np.arange(8.0))
        path = tmp_path / "model.json"
        save_model(train("cart", ds), path)
        doc = json.loads(path.read_text())
        doc["kind"] = "gp"
        path.write_text(json.dumps(doc))
        with pytest.raises(DataFormatError, match="unknown model kind"):
            load_model(path)

    def test_garbage_file_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("not json {")
        with pytest.raises(DataFormatError, match="not valid JSON"):
            load_model(path)
        with pytest.raises(DataFormatError, match="cannot read"):
            load_model(tmp_path / "missing.json")


class TestExternalPredictions:
    def test_write_read_round_trip(self, tmp_path):
        ds = full_binary_dataset(3, np.arange(8.0))
        ps = predict(train("knn", ds, params={"k": 1}), ds.configurations)
        path = tmp_path / "pred.csv"
        write_predictions(ds.space, ps, path)
        loaded = load_external_predictions(path, ds.space, model_id="mine")
        assert loaded.configurations == ps.configurations
        np.testing.assert_array_equal(loaded.predicted, ps.predicted)
        assert loaded.model_id == "mine"
        assert load_external_predictions(path, ds.space).model_id == "external"

    def test_header_must_match_space(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text("x01,x02,value\n0,0,1.0\n")
        with pytest.raises(DataFormatError, match="columns"):
            load_external_predictions(path, binary_space(2))

    def test_row_errors_carry_position(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text("x01,x02,predicted\n0,0,1.0\n0,1,oops\n")
        with pytest.raises(DataFormatError, match="row 3"):
            load_external_predictions(path, binary_space(2))

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text("x01,x02,predicted\n0,0,inf\n")
        with pytest.raises(DataFormatError, match="finite"):
            load_external_predictions(path, binary_space(2))

    def test_duplicates_rejected(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text("x01,x02,predicted\n0,0,1.0\n0,0,2.0\n")
        with pytest.raises(DataFormatError, match="duplicate"):
            load_external_predictions(path, binary_space(2))

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text("")
        with pytest.raises(DataFormatError, match="empty"):
            load_external_predictions(path, binary_space(2))
        path.write_text("x01,x02,predicted\n")
        with pytest.raises(DataFormatError, match="no rows"):
            load_external_predictions(path, binary_space(2))


class TestInterpolationProperty:
    @given(st.integers(0, 10**6))
    @settings(max_examples=20, deadline=None)
    def test_k1_knn_and_deep_cart_interpolate(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 5))
        grid = full_grid(n)
        rows = sorted(
            int(i)
            for i in rng.choice(len(grid), size=int(rng.integers(4, len(grid) + 1)), replace=False)
        )
        perf = rng.normal(size=len(rows)) + 10.0
        ds = make_dataset(binary_space(n), [grid[i] for i in rows], perf)
        for kind, params in (("knn", {"k": 1}), ("cart", {"min_leaf": 1})):
            model = train(kind, ds, params=params)
            np.testing.assert_allclose(
                model.predict_values(ds.configurations), perf, atol=1e-9
            )
