import itertools
import math

import numpy as np
import pytest

import oracles
from tunescape import (
    AccuracyReport,
    BATCH_DOMAIN,
    BATCH_HEURISTIC,
    FeatureProfile,
    RankerParams,
    RankingRecord,
    SEQ_ACQUISITION,
    SEQ_HEURISTIC,
    SEQ_REDUCTION,
    TunerCharacteristics,
    UndefinedMetricError,
    ap_at_k,
    assemble_records,
    decode_tuner,
    encode_tuner,
    load_ranker,
    loo_evaluate,
    ndcg_at_k,
    predict_ranker,
    rank_by_scores,
    read_records,
    record_columns,
    save_ranker,
    top_half_relevance,
    train_ranker,
    write_records,
)


def seq_tc(reduction="none", acquisition="ei", heuristic="greedy"):
    return TunerCharacteristics(
        pattern="sequential", heuristic=heuristic,
        reduction=reduction, acquisition=acquisition,
    )


def batch_tc(domain="general", incremental=True, heuristic="evolutionary"):
    return TunerCharacteristics(
        pattern="batch", heuristic=heuristic, domain=domain, incremental=incremental
    )


def murd_ranked_corpus(n_systems=4, per_system=6, seed=0):
    """Records whose true rank follows the murd accuracy feature."""
    rng = np.random.default_rng(seed)
    tcs = [seq_tc(), seq_tc("gini", "ucb", "local-search")]
    out = {}
    for s in range(n_systems):
        recs = []
        murds = rng.uniform(0, 50, per_system)
        order = np.argsort(np.argsort(murds))
        for i in range(per_system):
            recs.append(
                RankingRecord(
                    system=f"s{s}", model=f"m{i}", tuner="t",
                    f_l=(float(rng.normal()), float(rng.normal())),
                    f_a=(float(rng.uniform(1, 30)), float(murds[i])),
                    f_t=encode_tuner(tcs[i % 2]),
                    y=float(order[i] + 1),
                )
            )
        out[f"s{s}"] = recs
    return out


class TestTunerCharacteristics:
    def test_sequential_trait_vocabularies(self):
        seq_tc("lasso", "hedge", "gradient-descent")
        with pytest.raises(ValueError):
            seq_tc(reduction="pca")
        with pytest.raises(ValueError):
            seq_tc(acquisition="ts")
        with pytest.raises(ValueError):
            seq_tc(heuristic="evolutionary")

    def test_batch_trait_vocabularies(self):
        batch_tc("database", False, "sampling")
        with pytest.raises(ValueError):
            batch_tc(domain="gaming")
        with pytest.raises(ValueError):
            batch_tc(incremental=None)
        with pytest.raises(ValueError):
            batch_tc(heuristic="greedy")

    def test_cross_pattern_traits_rejected(self):
        with pytest.raises(ValueError):
            TunerCharacteristics(
                pattern="sequential", heuristic="greedy",
                reduction="none", acquisition="ei", domain="general",
            )
        with pytest.raises(ValueError):
            TunerCharacteristics(
                pattern="batch", heuristic="random", domain="general",
                incremental=True, reduction="none",
            )
        with pytest.raises(ValueError):
            TunerCharacteristics(pattern="online", heuristic="greedy")


class TestEncoding:
    def test_sequential_is_12_bits_batch_is_9(self):
        assert len(encode_tuner(seq_tc())) == 12
        assert len(encode_tuner(batch_tc())) == 9

    def test_known_encodings(self):
        boca = seq_tc(reduction="gini", acquisition="ei", heuristic="selective-exploration")
        assert encode_tuner(boca) == (0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1)
        ga = batch_tc(domain="general", incremental=True, heuristic="evolutionary")
        assert encode_tuner(ga) == (0, 0, 0, 1, 1, 1, 0, 0, 0)

    def test_round_trip_over_all_sequential_tuners(self):
        for red, acq, heur in itertools.product(SEQ_REDUCTION, SEQ_ACQUISITION, SEQ_HEURISTIC):
            tc = seq_tc(red, acq, heur)
            assert decode_tuner(encode_tuner(tc), "sequential") == tc

    def test_round_trip_over_all_batch_tuners(self):
        for dom, inc, heur in itertools.product(BATCH_DOMAIN, (False, True), BATCH_HEURISTIC):
            tc = batch_tc(dom, inc, heur)
            assert decode_tuner(encode_tuner(tc), "batch") == tc

    def test_malformed_segments_rejected(self):
        with pytest.raises(ValueError, match="one-hot"):
            decode_tuner((1, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0), "sequential")
        with pytest.raises(ValueError, match="one-hot"):
            decode_tuner((0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0), "sequential")
        with pytest.raises(ValueError, match="12 bits"):
            decode_tuner((1, 0, 0, 0), "sequential")
        with pytest.raises(ValueError, match="9 bits"):
            decode_tuner((1, 0, 0, 0), "batch")
        with pytest.raises(ValueError, match="pattern"):
            decode_tuner((1, 0, 0, 0), "online")


class TestRankByScores:
    def test_descending_order(self):
        assert rank_by_scores([0.1, 0.9, 0.5]) == [1, 2, 0]

    def test_ties_keep_input_order(self):
        assert rank_by_scores([1.0, 2.0, 2.0]) == [1, 2, 0]
        assert rank_by_scores([3.0, 3.0, 3.0]) == [0, 1, 2]


class TestNdcg:
    def test_worked_two_item_reversal(self):
        # ranks y=[1,2]: relevances [1,0]; predicted order reversed puts
        # the relevant item at position 2: dcg=1/log2(3), idcg=1
        value = ndcg_at_k([1, 0], [1.0, 2.0], k=2)
        assert value == pytest.approx(1.0 / math.log2(3.0), abs=1e-12)
        assert value == pytest.approx(0.6309297535714574, abs=1e-12)

    def test_perfect_order_scores_one(self):
        y = [2.0, 1.0, 3.0]
        assert ndcg_at_k([1, 0, 2], y) == pytest.approx(1.0, abs=1e-12)

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(15):
            n = int(rng.integers(2, 7))
            y = rng.permutation(np.arange(1.0, n + 1.0))
            if rng.random() < 0.4:
                y[int(rng.integers(n))] = y[int(rng.integers(n))]
            if np.all(y == y[0]):
                continue
            k = int(rng.integers(1, n + 1))
            order = [int(i) for i in rng.permutation(n)]
            assert ndcg_at_k(order, y, k) == pytest.approx(
                oracles.o_ndcg(order, y, k), abs=1e-12
            )

    def test_best_order_is_optimal_among_permutations(self):
        rng = np.random.default_rng(1)
        y = rng.permutation(np.arange(1.0, 6.0))
        best, _ = oracles.o_best_ndcg_order(y, k=5)
        predicted = rank_by_scores(-y)
        assert ndcg_at_k(predicted, y, 5) == pytest.approx(best, abs=1e-12)
        assert best == pytest.approx(1.0, abs=1e-12)

    def test_all_tied_relevance_undefined(self):
        with pytest.raises(UndefinedMetricError):
            ndcg_at_k([0, 1], [1.0, 1.0])

    def test_bad_inputs(self):
        with pytest.raises(ValueError, match="permutation"):
            ndcg_at_k([0, 0], [1.0, 2.0])
        with pytest.raises(ValueError, match="k"):
            ndcg_at_k([0, 1], [1.0, 2.0], k=0)

    def test_k_beyond_list_truncates(self):
        assert ndcg_at_k([1, 0], [1.0, 2.0], k=50) == ndcg_at_k([1, 0], [1.0, 2.0], k=2)


class TestAveragePrecision:
    def test_worked_four_item_example(self):
        relevant = [False, True, True, False]
        value = ap_at_k([0, 1, 2, 3], relevant, k=4)
        assert value == pytest.approx((1.0 / 2.0 + 2.0 / 3.0) / 2.0, abs=1e-12)
        assert value == pytest.approx(7.0 / 12.0, abs=1e-12)

    def test_k_one_with_hit_is_full_score(self):
        relevant = [True, True, True, False]
        assert ap_at_k([0, 1, 2, 3], relevant, k=1) == 1.0

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(15):
            n = int(rng.integers(2, 7))
            relevant = rng.random(n) < 0.5
            if not relevant.any():
                relevant[0] = True
            k = int(rng.integers(1, n + 1))
            order = [int(i) for i in rng.permutation(n)]
            assert ap_at_k(order, relevant, k) == pytest.approx(
                oracles.o_ap(order, relevant, k), abs=1e-12
            )

    def test_no_relevant_items_undefined(self):
        with pytest.raises(UndefinedMetricError):
            ap_at_k([0, 1], [False, False])


class TestTopHalfRelevance:
    def test_even_split(self):
        np.testing.assert_array_equal(
            top_half_relevance([1.0, 2.0, 3.0, 4.0]), [True, True, False, False]
        )

    def test_ties_widen_the_set(self):
        np.testing.assert_array_equal(
            top_half_relevance([1.0, 2.0, 2.0, 4.0]), [True, True, True, False]
        )

    def test_single_item(self):
        np.testing.assert_array_equal(top_half_relevance([1.0]), [True])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            top_half_relevance([])


class TestTrainRanker:
    def test_memorizes_a_learnable_corpus(self):
        by_system = murd_ranked_corpus()
        records = [r for recs in by_system.values() for r in recs]
        model = train_ranker(
            records,
            RankerParams(rounds=60, max_depth=3, learning_rate=0.2, min_leaf=2, seed=1),
        )
        assert model.pattern == "sequential"
        assert model.n_records == 24
        assert model.n_queries == 4
        for recs in by_system.values():
            order = rank_by_scores(predict_ranker(model, recs))
            y = np.array([r.y for r in recs])
            assert ndcg_at_k(order, y) == pytest.approx(1.0, abs=1e-12)

    def test_loss_is_non_increasing(self):
        records = [r for recs in murd_ranked_corpus().values() for r in recs]
        model = train_ranker(
            records,
            RankerParams(rounds=60, max_depth=3, learning_rate=0.2, min_leaf=2, seed=1),
        )
        losses = model.training_loss
        assert len(losses) == 60
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))
        assert losses[-1] < losses[0]

    def test_deterministic(self):
        records = [r for recs in murd_ranked_corpus().values() for r in recs]
        a = train_ranker(records, RankerParams(rounds=10, seed=3))
        b = train_ranker(records, RankerParams(rounds=10, seed=3))
        assert a.trees == b.trees

    def test_single_query_rejected(self):
        recs = murd_ranked_corpus(n_systems=1)["s0"]
        with pytest.raises(ValueError, match="at least 2 systems"):
            train_ranker(recs)

    def test_tiny_query_rejected(self):
        by_system = murd_ranked_corpus(n_systems=2)
        records = by_system["s0"] + by_system["s1"][:1]
        with pytest.raises(ValueError, match="fewer than 2 records"):
            train_ranker(records)

    def test_unlabeled_record_rejected(self):
        by_system = murd_ranked_corpus(n_systems=2)
        records = [r for recs in by_system.values() for r in recs]
        bad = RankingRecord(
            system="s0", model="mx", tuner="t", f_l=(0.0, 0.0),
            f_a=(1.0, 1.0), f_t=encode_tuner(seq_tc()), y=None,
        )
        with pytest.raises(ValueError, match="no rank"):
            train_ranker(records + [bad])

    def test_mixed_patterns_rejected(self):
        by_system = murd_ranked_corpus(n_systems=2)
        records = [r for recs in by_system.values() for r in recs]
        odd = RankingRecord(
            system="s0", model="mb", tuner="t", f_l=(0.0, 0.0),
            f_a=(1.0, 1.0), f_t=encode_tuner(batch_tc()), y=1.0,
        )
        with pytest.raises(ValueError, match="width"):
            train_ranker(records + [odd])

    def test_predict_rejects_wrong_width(self):
        records = [r for recs in murd_ranked_corpus(n_systems=2).values() for r in recs]
        model = train_ranker(records, RankerParams(rounds=5))
        odd = RankingRecord(
            system="sx", model="m", tuner="t", f_l=(0.0, 0.0),
            f_a=(1.0, 1.0), f_t=encode_tuner(batch_tc()),
        )
        with pytest.raises(ValueError, match="features"):
            predict_ranker(model, [odd])


class TestAssembleRecords:
    def profiles(self):
        def prof(**kw):
            base = dict(
                fdc=0.5, fbd=2.0, ske=0.1, kur=3.0, plo=0.2, cl=1.5, mie=0.4, nbc=1.0,
                coverage=1.0, n_points=32, source="t", walk_length=10, n_walks=5, seed=0,
            )
            base.update(kw)
            return FeatureProfile(absent={}, **base)

        system = prof()
        models = {"cart": prof(kur=3.4, mie=0.1), "knn": prof(kur=2.0, mie=0.9)}
        accuracy = {
            "cart": AccuracyReport(mape=12.0, murd=1.5, n_test=10),
            "knn": AccuracyReport(mape=8.0, murd=2.5, n_test=10),
        }
        chars = {"boca": seq_tc("gini", "ei", "selective-exploration")}
        return system, models, accuracy, chars

    def test_signed_deltas_and_defaults(self):
        system, models, accuracy, chars = self.profiles()
        ranks = {("cart", "boca"): 1.0, ("knn", "boca"): 2.0}
        records = assemble_records(
            "sys1", ranks, models, system, accuracy, chars, "sequential"
        )
        by_model = {r.model: r for r in records}
        assert by_model["cart"].f_l == pytest.approx((3.4 - 3.0, 0.1 - 0.4))
        assert by_model["knn"].f_l == pytest.approx((2.0 - 3.0, 0.9 - 0.4))
        assert by_model["cart"].f_a == (12.0, 1.5)
        assert by_model["cart"].f_t == encode_tuner(chars["boca"])
        assert by_model["cart"].y == 1.0
        assert all(r.system == "sys1" for r in records)

    def test_explicit_feature_choice(self):
        system, models, accuracy, chars = self.profiles()
        ranks = {("cart", "boca"): 1.0}
        records = assemble_records(
            "sys1", ranks, models, system, accuracy, chars, "sequential",
            g_feature="ske", l_feature="plo",
        )
        assert records[0].f_l == pytest.approx((0.0, 0.0))

    def test_missing_inputs_name_the_record(self):
        system, models, accuracy, chars = self.profiles()
        with pytest.raises(KeyError, match="no profile for model 'forest'"):
            assemble_records(
                "sys1", {("forest", "boca"): 1.0}, models, system, accuracy, chars,
                "sequential",
            )
        with pytest.raises(KeyError, match="no characteristics for tuner 'flash'"):
            assemble_records(
                "sys1", {("cart", "flash"): 1.0}, models, system, accuracy, chars,
                "sequential",
            )
        missing_acc = dict(accuracy)
        del missing_acc["cart"]
        with pytest.raises(KeyError, match="no accuracy report"):
            assemble_records(
                "sys1", {("cart", "boca"): 1.0}, models, system, missing_acc, chars,
                "sequential",
            )

    def test_undefined_mape_rejected(self):
        system, models, accuracy, chars = self.profiles()
        accuracy["cart"] = AccuracyReport(mape=None, murd=1.0, n_test=5)
        with pytest.raises(ValueError, match="mape is undefined"):
            assemble_records(
                "sys1", {("cart", "boca"): 1.0}, models, system, accuracy, chars,
                "sequential",
            )

    def test_pattern_mismatch_rejected(self):
        system, models, accuracy, _ = self.profiles()
        chars = {"ga": batch_tc()}
        with pytest.raises(ValueError, match="pattern"):
            assemble_records(
                "sys1", {("cart", "ga"): 1.0}, models, system, accuracy, chars,
                "sequential",
            )


class TestRecordsIo:
    def test_round_trip(self, tmp_path):
        records = [r for recs in murd_ranked_corpus(n_systems=2).values() for r in recs]
        unlabeled = RankingRecord(
            system="sx", model="m", tuner="t", f_l=(0.5, -0.5),
            f_a=(1.0, 2.0), f_t=encode_tuner(seq_tc()), y=None,
        )
        path = tmp_path / "records.csv"
        write_records(records + [unlabeled], path)
        loaded = read_records(path)
        assert loaded == records + [unlabeled]

    def test_header_matches_record_columns(self, tmp_path):
        records = murd_ranked_corpus(n_systems=2)["s0"]
        path = tmp_path / "records.csv"
        write_records(records, path)
        header = path.read_text().splitlines()[0].split(",")
        assert header == record_columns("sequential")

    def test_malformed_rows_rejected(self, tmp_path):
        records = murd_ranked_corpus(n_systems=2)["s0"][:2]
        path = tmp_path / "records.csv"
        write_records(records, path)
        lines = path.read_text().splitlines()

        def write_variant(row):
            path.write_text("\n".join([lines[0], row]) + "\n")

        cells = lines[1].split(",")
        bad_bits = cells.copy()
        bad_bits[-2] = "1100"
        write_variant(",".join(bad_bits))
        from tunescape import DataFormatError

        with pytest.raises(DataFormatError, match="one-hot"):
            read_records(path)
        bad_float = cells.copy()
        bad_float[3] = "not-a-number"
        write_variant(",".join(bad_float))
        with pytest.raises(DataFormatError):
            read_records(path)

    def test_unknown_header_rejected(self, tmp_path):
        path = tmp_path / "records.csv"
        path.write_text("a,b,c\n1,2,3\n")
        from tunescape import DataFormatError

        with pytest.raises(DataFormatError):
            read_records(path)


class TestRankerIo:
    def test_round_trip_preserves_scores(self, tmp_path):
        by_system = murd_ranked_corpus()
        records = [r for recs in by_system.values() for r in recs]
        model = train_ranker(records, RankerParams(rounds=15, seed=2))
        path = tmp_path / "ranker.json"
        save_ranker(model, path)
        loaded = load_ranker(path)
        assert loaded.pattern == model.pattern
        assert loaded.feature_layout == model.feature_layout
        np.testing.assert_allclose(
            predict_ranker(loaded, records), predict_ranker(model, records), atol=0
        )

    def test_version_checked(self, tmp_path):
        import json

        records = [r for recs in murd_ranked_corpus(n_systems=2).values() for r in recs]
        model = train_ranker(records, RankerParams(rounds=2))
        path = tmp_path / "ranker.json"
        save_ranker(model, path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 42
        path.write_text(json.dumps(doc))
        from tunescape import DataFormatError

        with pytest.raises(DataFormatError, match="version"):
            load_ranker(path)


class TestLooEvaluate:
    def test_learnable_corpus_beats_baseline(self):
        by_system = murd_ranked_corpus(n_systems=4, per_system=6, seed=3)
        report = loo_evaluate(
            by_system,
            RankerParams(rounds=25, max_depth=3, learning_rate=0.2, min_leaf=2),
            repeats=3,
            seed=0,
            ks=(1, None),
            baseline_permutations=100,
        )
        assert len(report.folds) == 4
        assert set(report.summary) == {"ndcg@1", "ndcg@all", "ap@1", "ap@all"}
        assert report.summary["ndcg@all"]["mean"] > report.summary["ndcg@all"]["baseline"]
        assert report.summary["ndcg@all"]["folds_above_baseline"] >= 3
        for fold in report.folds:
            assert set(fold.metrics) == {"ndcg@1", "ndcg@all", "ap@1", "ap@all"}
            assert fold.n_records == 6

    def test_reproducible(self):
        by_system = murd_ranked_corpus(n_systems=3, per_system=4, seed=4)
        kw = dict(
            params=RankerParams(rounds=5, min_leaf=2), repeats=2, seed=7,
            ks=(1,), baseline_permutations=50,
        )
        assert loo_evaluate(by_system, **kw).to_record() == loo_evaluate(by_system, **kw).to_record()

    def test_needs_three_systems(self):
        by_system = murd_ranked_corpus(n_systems=2)
        with pytest.raises(ValueError, match="at least 3 systems"):
            loo_evaluate(by_system)

    def test_leak_detection(self):
        by_system = murd_ranked_corpus(n_systems=3)
        # mislabel one record so the held-out system shows up in training
        r = by_system["s1"][0]
        by_system["s1"][0] = RankingRecord(
            system="s0", model=r.model, tuner=r.tuner, f_l=r.f_l,
            f_a=r.f_a, f_t=r.f_t, y=r.y,
        )
        with pytest.raises(RuntimeError, match="appears in the training"):
            loo_evaluate(by_system, RankerParams(rounds=2, min_leaf=2), repeats=1)

    def test_small_systems_rejected(self):
        by_system = murd_ranked_corpus(n_systems=3, per_system=2)
        by_system["s0"] = by_system["s0"][:1]
        with pytest.raises(ValueError, match="fewer than 2 records"):
            loo_evaluate(by_system)
