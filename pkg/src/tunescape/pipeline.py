"""End-to-end study orchestration: split, train, emulate, profile.

One repeat of a study splits the dataset, fits each surrogate kind on
the training rows, and profiles both the measured landscape and each
model-emulated landscape on the same held-out points with the same walk
seed, so the walks visit identical index sequences and feature
deviations isolate model error. Accuracy metrics are computed on raw
performance, never on oriented fitness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .landscape import (
    ALL_FEATURES,
    DEFAULT_WALKS,
    DEFAULT_WALK_LENGTH,
    FeatureProfile,
    build_view,
    feature_profile,
)
from .metrics import AccuracyReport, accuracy_report
from .space import PerformanceDataset, split_train_test
from .surrogate import MODEL_KINDS, emulated_view, train


@dataclass(frozen=True)
class ModelRun:
    """One surrogate's profile and accuracy for one repeat."""

    kind: str
    profile: FeatureProfile
    accuracy: AccuracyReport

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "profile": self.profile.to_record(),
            "accuracy": self.accuracy.to_record(),
        }


@dataclass(frozen=True)
class RepeatResult:
    repeat: int
    seed: int
    n_train: int
    n_test: int
    system_profile: FeatureProfile
    models: dict

    def to_record(self) -> dict:
        return {
            "repeat": self.repeat,
            "seed": self.seed,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "system_profile": self.system_profile.to_record(),
            "models": {kind: run.to_record() for kind, run in sorted(self.models.items())},
        }


@dataclass(frozen=True)
class ProfileStudy:
    """Repeated paired profiles of a measured landscape and its surrogates."""

    repeats: tuple
    model_kinds: tuple
    split: object
    seed: int
    walk_length: int
    n_walks: int
    radius: int
    direction: str

    def system_profiles(self) -> list[FeatureProfile]:
        return [r.system_profile for r in self.repeats]

    def model_profiles(self, kind: str) -> list[FeatureProfile]:
        return [r.models[kind].profile for r in self.repeats]

    def accuracy(self, kind: str) -> list[AccuracyReport]:
        return [r.models[kind].accuracy for r in self.repeats]

    def to_record(self) -> dict:
        return {
            "repeats": [r.to_record() for r in self.repeats],
            "model_kinds": list(self.model_kinds),
            "split": self.split,
            "seed": self.seed,
            "walk_length": self.walk_length,
            "n_walks": self.n_walks,
            "radius": self.radius,
            "direction": self.direction,
        }


def repeat_seed(seed: int, repeat: int) -> int:
    """Derived integer seed for one repeat of a study."""
    return int(np.random.default_rng([seed, repeat]).integers(2**31))


def profile_models(
    dataset: PerformanceDataset,
    model_kinds=MODEL_KINDS,
    split="binary-5n",
    repeats: int = 1,
    seed: int = 0,
    walk_length: int = DEFAULT_WALK_LENGTH,
    n_walks: int = DEFAULT_WALKS,
    radius: int = 1,
    model_params: dict | None = None,
) -> ProfileStudy:
    """Run the paired profiling study.

    Per repeat: split the rows, fit every model kind on the training
    rows, profile the measured test view and each emulated view with the
    same walk seed, and score raw prediction accuracy on the test rows.
    `model_params` maps a model kind to extra constructor parameters.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    model_kinds = tuple(model_kinds)
    if not model_kinds:
        raise ValueError("at least one model kind is required")
    model_params = model_params or {}
    results = []
    for rep in range(repeats):
        rs = repeat_seed(seed, rep)
        train_data, test_data = split_train_test(dataset, split, seed=rs)
        system_view = build_view(test_data, radius=radius)
        system_profile = feature_profile(system_view, walk_length, n_walks, seed=rs)
        runs = {}
        for kind in model_kinds:
            model = train(kind, train_data, seed=rs, params=model_params.get(kind))
            view = emulated_view(
                model, test_data.configurations, dataset.space.direction, radius=radius
            )
            profile = feature_profile(view, walk_length, n_walks, seed=rs)
            predicted = model.predict_values(test_data.configurations)
            runs[kind] = ModelRun(
                kind=kind,
                profile=profile,
                accuracy=accuracy_report(test_data.performances, predicted),
            )
        results.append(
            RepeatResult(
                repeat=rep,
                seed=rs,
                n_train=len(train_data),
                n_test=len(test_data),
                system_profile=system_profile,
                models=runs,
            )
        )
    return ProfileStudy(
        repeats=tuple(results),
        model_kinds=model_kinds,
        split=split,
        seed=seed,
        walk_length=walk_length,
        n_walks=n_walks,
        radius=radius,
        direction=dataset.space.direction,
    )


def aggregate_profiles(profiles) -> FeatureProfile:
    """Mean profile over repeats.

    Each feature averages over the repeats where it is defined and is
    absent only if it is absent everywhere. Walk parameters are carried
    from the first profile; the source is marked as a mean.
    """
    profiles = list(profiles)
    if not profiles:
        raise ValueError("no profiles to aggregate")
    values: dict[str, float | None] = {}
    absent: dict[str, str] = {}
    for name in ALL_FEATURES:
        defined = [p.value(name) for p in profiles if p.has(name)]
        if defined:
            values[name] = float(np.mean(defined))
        else:
            values[name] = None
            absent[name] = profiles[0].absent.get(name, "absent in every repeat")
    first = profiles[0]
    return FeatureProfile(
        coverage=float(np.mean([p.coverage for p in profiles])),
        n_points=first.n_points,
        source=f"mean[{len(profiles)}]:{first.source}",
        walk_length=first.walk_length,
        n_walks=first.n_walks,
        seed=first.seed,
        absent=absent,
        **values,
    )


def mean_accuracy(reports) -> AccuracyReport:
    """Mean accuracy over repeats; MAPE averages over repeats where defined."""
    reports = list(reports)
    if not reports:
        raise ValueError("no accuracy reports to aggregate")
    mapes = [r.mape for r in reports if r.mape is not None]
    return AccuracyReport(
        mape=float(np.mean(mapes)) if mapes else None,
        murd=float(np.mean([r.murd for r in reports])),
        n_test=int(np.mean([r.n_test for r in reports])),
    )
