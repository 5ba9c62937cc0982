"""Landscape dominance between surrogate models and fidelity summaries.

A model's usefulness for tuning is judged on two axes at once: how close
its emulated landscape is to the measured one on a global feature
(deviation magnitude), and how easy its emulated terrain is to search on
an oriented local feature. One model dominates another only when it is no
worse on both axes and strictly better on at least one, which keeps the
relation a strict partial order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .landscape import ALL_FEATURES, GLOBAL_FEATURES, LOCAL_FEATURES, FeatureProfile, orient_local
from .metrics import wilcoxon_rank_sum, wilcoxon_signed_rank


@dataclass(frozen=True)
class ObjectivePair:
    """One model's (deviation, oriented local value) under one objective."""

    model: str
    g_feature: str
    l_feature: str
    delta_g: float
    l: float

    def __post_init__(self):
        if self.g_feature not in GLOBAL_FEATURES:
            raise ValueError(f"{self.g_feature!r} is not a global feature")
        if self.l_feature not in LOCAL_FEATURES:
            raise ValueError(f"{self.l_feature!r} is not a local feature")
        if self.delta_g < 0:
            raise ValueError("delta_g is a deviation magnitude and must be >= 0")

    @property
    def objective(self) -> tuple[str, str]:
        return (self.g_feature, self.l_feature)


def objective_pair(
    model_name: str,
    model_profile: FeatureProfile,
    system_profile: FeatureProfile,
    g_feature: str,
    l_feature: str,
) -> ObjectivePair:
    """Build a model's objective pair against the measured system profile."""
    delta_g = abs(model_profile.value(g_feature) - system_profile.value(g_feature))
    l = orient_local(l_feature, model_profile.value(l_feature))
    return ObjectivePair(
        model=model_name,
        g_feature=g_feature,
        l_feature=l_feature,
        delta_g=delta_g,
        l=l,
    )


def dominates(a: ObjectivePair, b: ObjectivePair) -> bool:
    """True when `a` is no worse than `b` on both axes and better on one."""
    if a.objective != b.objective:
        raise ValueError("objective pairs under different objectives are incomparable")
    return (a.delta_g <= b.delta_g and a.l < b.l) or (
        a.delta_g < b.delta_g and a.l <= b.l
    )


@dataclass(frozen=True)
class DominancePair:
    """An ordered (dominating, dominated) model pair under one tuner and objective."""

    dominating: str
    dominated: str
    tuner: str
    g_feature: str
    l_feature: str


def all_objectives() -> tuple[tuple[str, str], ...]:
    """All 16 combinations of one global and one local feature."""
    return tuple(product(GLOBAL_FEATURES, LOCAL_FEATURES))


def dg_dd_pairs(
    model_profiles,
    system_profile: FeatureProfile,
    tuners,
    objectives=None,
) -> list[DominancePair]:
    """Extract dominating/dominated pairs across tuners and objectives.

    Models missing a feature under some objective are skipped for that
    objective only. The DG and DD groups are the two sides of the
    returned pairs, so they are equal-sized by construction.
    """
    if objectives is None:
        objectives = all_objectives()
    tuners = list(tuners)
    if not tuners:
        raise ValueError("at least one tuner is required")
    pairs = []
    for g_feature, l_feature in objectives:
        candidates = []
        for name, profile in model_profiles.items():
            if profile.has(g_feature) and profile.has(l_feature) and system_profile.has(g_feature):
                candidates.append(
                    objective_pair(name, profile, system_profile, g_feature, l_feature)
                )
        for a, b in product(candidates, candidates):
            if a.model == b.model:
                continue
            if dominates(a, b):
                for tuner in tuners:
                    pairs.append(
                        DominancePair(
                            dominating=a.model,
                            dominated=b.model,
                            tuner=tuner,
                            g_feature=g_feature,
                            l_feature=l_feature,
                        )
                    )
    return pairs


@dataclass(frozen=True)
class DeltaPReport:
    """Tuned-performance gap between the DG and DD groups."""

    delta_p: float
    win_pct: float
    lose_pct: float
    tie_pct: float
    p_value: float
    small_sample: bool
    n_pairs: int

    def to_record(self) -> dict:
        return {
            "delta_p": self.delta_p,
            "win_pct": self.win_pct,
            "lose_pct": self.lose_pct,
            "tie_pct": self.tie_pct,
            "p_value": self.p_value,
            "small_sample": self.small_sample,
            "n_pairs": self.n_pairs,
        }


def delta_p(pairs, tuning_results) -> DeltaPReport:
    """Mean tuned-performance difference p_DG - p_DD over dominance pairs.

    `tuning_results` maps (model, tuner) to mean tuned performance
    (minimized orientation), so negative delta_p means the dominating
    group actually tuned better. Wins are counted per pair with ties
    credited to neither side; the p-value is a signed-rank test over the
    paired differences.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no dominance pairs to evaluate")
    diffs = []
    for pair in pairs:
        try:
            p_dg = tuning_results[(pair.dominating, pair.tuner)]
            p_dd = tuning_results[(pair.dominated, pair.tuner)]
        except KeyError as exc:
            raise KeyError(
                f"missing tuning result for {exc.args[0]!r}; "
                "every (model, tuner) in the pairs needs a result"
            )
        diffs.append(float(p_dg) - float(p_dd))
    diffs = np.array(diffs)
    n = len(diffs)
    wins = int(np.count_nonzero(diffs < 0))
    losses = int(np.count_nonzero(diffs > 0))
    ties = n - wins - losses
    test = wilcoxon_signed_rank(diffs)
    return DeltaPReport(
        delta_p=float(diffs.mean()),
        win_pct=100.0 * wins / n,
        lose_pct=100.0 * losses / n,
        tie_pct=100.0 * ties / n,
        p_value=test.p_value,
        small_sample=test.small_sample,
        n_pairs=n,
    )


@dataclass(frozen=True)
class FeatureFidelity:
    """Per-feature deviation summary of emulated landscapes vs the system."""

    feature: str
    mean_positive: float | None
    mean_negative: float | None
    ss_pct: float | None
    n_cases: int
    n_models: int

    def to_record(self) -> dict:
        return {
            "feature": self.feature,
            "mean_positive": self.mean_positive,
            "mean_negative": self.mean_negative,
            "ss_pct": self.ss_pct,
            "n_cases": self.n_cases,
            "n_models": self.n_models,
        }


def fidelity_report(system_profiles, model_profiles) -> list[FeatureFidelity]:
    """Summarize how emulated profiles deviate from the measured one.

    `system_profiles` is one profile or one per repeat; `model_profiles`
    maps each model to its per-repeat profiles. Per feature the report
    carries the mean of non-negative deviations, the mean of non-positive
    deviations, and the percentage of models whose feature distribution
    differs significantly from the system's (rank-sum p < 0.05).
    """
    if isinstance(system_profiles, FeatureProfile):
        system_profiles = [system_profiles]
    else:
        system_profiles = list(system_profiles)
    if not system_profiles:
        raise ValueError("at least one system profile is required")
    if not model_profiles:
        raise ValueError("at least one model is required")
    normalized = {}
    for model, profiles in model_profiles.items():
        if isinstance(profiles, FeatureProfile):
            profiles = [profiles]
        else:
            profiles = list(profiles)
        if not profiles:
            raise ValueError(f"model {model!r} has no profiles")
        sys_side = system_profiles
        if len(sys_side) == 1 and len(profiles) > 1:
            sys_side = system_profiles * len(profiles)
        if len(sys_side) != len(profiles):
            raise ValueError(
                f"model {model!r}: {len(profiles)} repeats vs {len(sys_side)} system profiles"
            )
        normalized[model] = (profiles, sys_side)

    report = []
    for feature in ALL_FEATURES:
        deltas = []
        n_models = 0
        n_significant = 0
        for model, (profiles, sys_side) in normalized.items():
            model_vals = []
            sys_vals = []
            for mp, sp in zip(profiles, sys_side):
                if mp.has(feature) and sp.has(feature):
                    model_vals.append(mp.value(feature))
                    sys_vals.append(sp.value(feature))
            if not model_vals:
                continue
            n_models += 1
            deltas.extend(m - s for m, s in zip(model_vals, sys_vals))
            test = wilcoxon_rank_sum(model_vals, sys_vals)
            if not test.small_sample and test.p_value < 0.05:
                n_significant += 1
        if n_models == 0:
            report.append(
                FeatureFidelity(feature, None, None, None, n_cases=0, n_models=0)
            )
            continue
        arr = np.array(deltas)
        pos = arr[arr >= 0]
        neg = arr[arr <= 0]
        report.append(
            FeatureFidelity(
                feature=feature,
                mean_positive=float(pos.mean()) if pos.size else None,
                mean_negative=float(neg.mean()) if neg.size else None,
                ss_pct=100.0 * n_significant / n_models,
                n_cases=int(arr.size),
                n_models=n_models,
            )
        )
    return report
