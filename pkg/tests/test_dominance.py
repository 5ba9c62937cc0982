import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunescape import (
    DeltaPReport,
    FeatureProfile,
    GLOBAL_FEATURES,
    LOCAL_FEATURES,
    ObjectivePair,
    all_objectives,
    delta_p,
    dg_dd_pairs,
    dominates,
    fidelity_report,
    objective_pair,
)


def make_profile(**overrides):
    base = dict(
        fdc=0.5, fbd=2.0, ske=0.1, kur=3.0, plo=0.2, cl=1.5, mie=0.4, nbc=1.0,
        coverage=1.0, n_points=32, source="test", walk_length=10, n_walks=5, seed=0,
    )
    absent = overrides.pop("absent", {})
    base.update(overrides)
    return FeatureProfile(absent=absent, **base)


def pair(delta_g, l, model="m", g="fdc", lf="plo"):
    return ObjectivePair(model=model, g_feature=g, l_feature=lf, delta_g=delta_g, l=l)


class TestObjectivePair:
    def test_delta_is_absolute_and_local_is_oriented(self):
        sys_p = make_profile(fdc=0.8, cl=2.0)
        mod_p = make_profile(fdc=0.3, cl=5.0)
        op = objective_pair("m", mod_p, sys_p, "fdc", "cl")
        assert op.delta_g == pytest.approx(0.5)
        assert op.l == -5.0

    def test_pass_through_locals_not_negated(self):
        sys_p = make_profile()
        mod_p = make_profile(plo=0.7)
        assert objective_pair("m", mod_p, sys_p, "ske", "plo").l == 0.7

    def test_feature_roles_validated(self):
        with pytest.raises(ValueError):
            pair(0.1, 0.2, g="plo")
        with pytest.raises(ValueError):
            pair(0.1, 0.2, lf="fdc")
        with pytest.raises(ValueError):
            pair(-0.1, 0.2)


class TestDominates:
    def test_strictly_better_on_both(self):
        assert dominates(pair(0.1, 0.5), pair(0.2, 0.6))

    def test_equal_on_one_better_on_other(self):
        assert dominates(pair(0.1, 0.5), pair(0.1, 0.6))
        assert dominates(pair(0.1, 0.5), pair(0.2, 0.5))

    def test_equal_pairs_do_not_dominate(self):
        assert not dominates(pair(0.1, 0.5), pair(0.1, 0.5))

    def test_trade_offs_are_incomparable(self):
        a, b = pair(0.1, 0.9), pair(0.3, 0.2)
        assert not dominates(a, b)
        assert not dominates(b, a)

    def test_cross_objective_comparison_rejected(self):
        with pytest.raises(ValueError):
            dominates(pair(0.1, 0.5, g="fdc"), pair(0.2, 0.6, g="ske"))

    @given(
        st.lists(
            st.tuples(st.floats(0, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False)),
            min_size=3,
            max_size=3,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_strict_partial_order(self, triples):
        a, b, c = (pair(dg, l) for dg, l in triples)
        assert not dominates(a, a)
        if dominates(a, b):
            assert not dominates(b, a)
        if dominates(a, b) and dominates(b, c):
            assert dominates(a, c)


class TestAllObjectives:
    def test_sixteen_global_local_products(self):
        objs = all_objectives()
        assert len(objs) == 16
        assert len(set(objs)) == 16
        for g, l in objs:
            assert g in GLOBAL_FEATURES
            assert l in LOCAL_FEATURES


class TestDgDdPairs:
    def test_single_objective_clear_winner(self):
        sys_p = make_profile(fdc=1.0)
        models = {
            "good": make_profile(fdc=0.9, plo=0.1),
            "bad": make_profile(fdc=0.2, plo=0.6),
        }
        pairs = dg_dd_pairs(models, sys_p, tuners=["t1", "t2"], objectives=[("fdc", "plo")])
        assert len(pairs) == 2
        assert all(p.dominating == "good" and p.dominated == "bad" for p in pairs)
        assert sorted(p.tuner for p in pairs) == ["t1", "t2"]

    def test_dg_and_dd_sides_have_equal_size(self):
        rng = np.random.default_rng(0)
        models = {
            f"m{i}": make_profile(
                fdc=rng.uniform(-1, 1), ske=rng.normal(), kur=rng.uniform(1, 5),
                fbd=float(rng.integers(0, 6)), plo=rng.uniform(0, 1),
                cl=rng.uniform(0.1, 4), mie=rng.uniform(0, 1), nbc=rng.uniform(0.3, 2),
            )
            for i in range(4)
        }
        pairs = dg_dd_pairs(models, make_profile(), tuners=["t"])
        assert pairs
        dg = [p.dominating for p in pairs]
        dd = [p.dominated for p in pairs]
        assert len(dg) == len(dd)

    def test_missing_feature_skips_that_objective_only(self):
        sys_p = make_profile()
        models = {
            "full": make_profile(fdc=0.49, plo=0.1, mie=0.3),
            "nocl": make_profile(cl=None, fdc=0.51, plo=0.3, mie=0.5, absent={"cl": "x"}),
        }
        pairs = dg_dd_pairs(models, sys_p, tuners=["t"])
        assert any(p.l_feature != "cl" for p in pairs)
        assert all(p.l_feature != "cl" for p in pairs)

    def test_requires_a_tuner(self):
        with pytest.raises(ValueError):
            dg_dd_pairs({"m": make_profile()}, make_profile(), tuners=[])

    def test_incomparable_models_produce_no_pairs(self):
        sys_p = make_profile(fdc=0.0)
        models = {
            "a": make_profile(fdc=0.1, plo=0.9),
            "b": make_profile(fdc=0.2, plo=0.1),
        }
        pairs = dg_dd_pairs(models, sys_p, tuners=["t"], objectives=[("fdc", "plo")])
        assert pairs == []


class TestDeltaP:
    def test_negative_delta_counts_as_win(self):
        sys_p = make_profile(fdc=1.0)
        models = {
            "good": make_profile(fdc=0.9, plo=0.1),
            "bad": make_profile(fdc=0.2, plo=0.6),
        }
        pairs = dg_dd_pairs(models, sys_p, tuners=["t"], objectives=[("fdc", "plo")])
        report = delta_p(pairs, {("good", "t"): 1.0, ("bad", "t"): 3.0})
        assert report.delta_p == pytest.approx(-2.0)
        assert report.win_pct == 100.0
        assert report.lose_pct == 0.0
        assert report.n_pairs == 1
        assert report.small_sample

    def test_tie_credits_neither_side(self):
        sys_p = make_profile(fdc=1.0)
        models = {
            "good": make_profile(fdc=0.9, plo=0.1),
            "bad": make_profile(fdc=0.2, plo=0.6),
        }
        pairs = dg_dd_pairs(models, sys_p, tuners=["t"], objectives=[("fdc", "plo")])
        report = delta_p(pairs, {("good", "t"): 2.0, ("bad", "t"): 2.0})
        assert report.delta_p == 0.0
        assert report.win_pct == 0.0
        assert report.lose_pct == 0.0
        assert report.tie_pct == 100.0

    def test_signed_rank_over_many_pairs(self):
        pairs = dg_dd_pairs(
            {
                "good": make_profile(fdc=0.9, plo=0.1),
                "bad": make_profile(fdc=0.2, plo=0.6),
            },
            make_profile(fdc=1.0),
            tuners=[f"t{i}" for i in range(10)],
            objectives=[("fdc", "plo")],
        )
        results = {}
        for i in range(10):
            results[("good", f"t{i}")] = 1.0 + 0.01 * i
            results[("bad", f"t{i}")] = 2.0 + 0.1 * i
        report = delta_p(pairs, results)
        assert report.win_pct == 100.0
        assert not report.small_sample
        assert report.p_value < 0.05

    def test_missing_result_named_in_error(self):
        pairs = dg_dd_pairs(
            {
                "good": make_profile(fdc=0.9, plo=0.1),
                "bad": make_profile(fdc=0.2, plo=0.6),
            },
            make_profile(fdc=1.0),
            tuners=["t"],
            objectives=[("fdc", "plo")],
        )
        with pytest.raises(KeyError, match="missing tuning result"):
            delta_p(pairs, {("good", "t"): 1.0})

    def test_empty_pairs_rejected(self):
        with pytest.raises(ValueError):
            delta_p([], {})

    def test_record_shape(self):
        rec = DeltaPReport(
            delta_p=-1.0, win_pct=60.0, lose_pct=30.0, tie_pct=10.0,
            p_value=0.04, small_sample=False, n_pairs=10,
        ).to_record()
        assert set(rec) == {
            "delta_p", "win_pct", "lose_pct", "tie_pct", "p_value",
            "small_sample", "n_pairs",
        }


class TestFidelityReport:
    def test_single_profile_broadcasts_against_repeats(self):
        sys_p = make_profile(fdc=0.5)
        model_reps = [make_profile(fdc=0.7), make_profile(fdc=0.8)]
        report = fidelity_report(sys_p, {"m": model_reps})
        by_feature = {r.feature: r for r in report}
        fdc_row = by_feature["fdc"]
        assert fdc_row.mean_positive == pytest.approx(0.25)
        assert fdc_row.mean_negative is None
        assert fdc_row.n_cases == 2
        assert fdc_row.n_models == 1

    def test_positive_and_negative_deviations_split(self):
        sys_p = make_profile(ske=0.0)
        model_reps = [make_profile(ske=0.4), make_profile(ske=-0.2)]
        report = {r.feature: r for r in fidelity_report(sys_p, {"m": model_reps})}
        assert report["ske"].mean_positive == pytest.approx(0.4)
        assert report["ske"].mean_negative == pytest.approx(-0.2)

    def test_zero_deviation_lands_in_both_means(self):
        sys_p = make_profile(kur=3.0)
        report = {r.feature: r for r in fidelity_report(sys_p, {"m": [make_profile(kur=3.0)]})}
        assert report["kur"].mean_positive == 0.0
        assert report["kur"].mean_negative == 0.0

    def test_absent_feature_everywhere_yields_empty_row(self):
        sys_p = make_profile(nbc=None, absent={"nbc": "constant"})
        report = {r.feature: r for r in fidelity_report(sys_p, {"m": [make_profile()]})}
        assert report["nbc"].n_models == 0
        assert report["nbc"].ss_pct is None
        assert report["nbc"].mean_positive is None

    def test_ss_pct_detects_separated_distributions(self):
        rng = np.random.default_rng(1)
        sys_reps = [make_profile(fdc=float(v)) for v in rng.normal(0.2, 0.01, size=8)]
        far = [make_profile(fdc=float(v)) for v in rng.normal(0.9, 0.01, size=8)]
        near = [make_profile(fdc=float(v)) for v in rng.normal(0.2, 0.01, size=8)]
        report = {
            r.feature: r
            for r in fidelity_report(sys_reps, {"far": far, "near": near})
        }
        assert report["fdc"].ss_pct == pytest.approx(50.0)
        assert report["fdc"].n_models == 2
        assert report["fdc"].n_cases == 16

    def test_mismatched_repeat_counts_rejected(self):
        sys_reps = [make_profile(), make_profile()]
        with pytest.raises(ValueError, match="repeats"):
            fidelity_report(sys_reps, {"m": [make_profile()] * 3})

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            fidelity_report([], {"m": [make_profile()]})
        with pytest.raises(ValueError):
            fidelity_report(make_profile(), {})
        with pytest.raises(ValueError):
            fidelity_report(make_profile(), {"m": []})
