"""Command line interface.

Every command supports two output formats. "table" renders aligned text
for people; "machine" renders canonical JSON (sorted keys, two-space
indent, one trailing newline, no timestamps) so that identical inputs
produce byte-identical reports. Exit codes: 0 success, 2 input or usage
error, 3 degenerate analysis, 4 internal error.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from .dominance import delta_p, dg_dd_pairs, fidelity_report
from .errors import AnalysisError, DataFormatError
from .influence import build_matrices, influential_options
from .landscape import (
    ALL_FEATURES,
    DEFAULT_WALKS,
    DEFAULT_WALK_LENGTH,
    GLOBAL_FEATURES,
    LOCAL_FEATURES,
    build_view,
    feature_profile,
)
from .pipeline import aggregate_profiles, mean_accuracy, profile_models, repeat_seed
from .ranking import (
    RankerParams,
    ap_at_k,
    load_ranker,
    ndcg_at_k,
    predict_ranker,
    rank_by_scores,
    read_records,
    save_ranker,
    top_half_relevance,
    train_ranker,
)
from .reporting import PACKAGE_VERSION, machine_report, render_table
from .space import load_dataset, write_dataset
from .surrogate import MODEL_KINDS, train
from .tuning import (
    BATCH_ALGORITHMS,
    BUDGET_PRESETS,
    DEFAULT_FINAL_MEASURE,
    DEFAULT_HOTSTART,
    SEQUENTIAL_ALGORITHMS,
    TunerSpec,
    rank_pairs,
    run_batch,
    run_sequential,
    synth_system,
)
from .space import split_train_test


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DataFormatError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except AnalysisError as exc:
            click.echo(f"degenerate analysis: {exc}", err=True)
            sys.exit(3)
        except click.ClickException:
            raise
        except (ValueError, KeyError) as exc:
            message = exc.args[0] if exc.args else str(exc)
            click.echo(f"error: {message}", err=True)
            sys.exit(2)
        except SystemExit:
            raise
        except Exception as exc:
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _emit(text: str, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt_option(fn):
    fn = click.option(
        "--format",
        "fmt",
        type=click.Choice(("table", "machine")),
        default="table",
        show_default=True,
        help="Report format: human table or canonical JSON.",
    )(fn)
    return click.option(
        "--out", type=click.Path(dir_okay=False), default=None, help="Write the report here instead of stdout."
    )(fn)


def _data_options(fn):
    fn = click.option("--data", required=True, type=click.Path(dir_okay=False), help="Dataset CSV.")(fn)
    return click.option("--meta", required=True, type=click.Path(dir_okay=False), help="Metadata JSON.")(fn)


def _study_options(fn):
    for deco in (
        click.option("--split", default="binary-5n", show_default=True, help="Training rows: a count or binary-5n."),
        click.option("--seed", default=0, show_default=True, type=int),
        click.option("--walk-length", default=DEFAULT_WALK_LENGTH, show_default=True, type=int),
        click.option("--n-walks", default=DEFAULT_WALKS, show_default=True, type=int),
        click.option("--radius", default=1, show_default=True, type=int),
    ):
        fn = deco(fn)
    return fn


@click.group(name="tunescape")
@click.version_option(version=PACKAGE_VERSION, prog_name="tunescape")
def main():
    """Landscape-aware assessment of surrogate models for configuration tuning."""


@main.command()
@_data_options
@click.option("--model", "models", multiple=True, type=click.Choice(MODEL_KINDS), help="Also profile this surrogate (repeatable).")
@click.option("--repeats", default=1, show_default=True, type=int)
@_study_options
@_fmt_option
@_guarded
def features(data, meta, models, repeats, split, seed, walk_length, n_walks, radius, fmt, out):
    """Landscape feature profile of a dataset, optionally with surrogate emulations."""
    dataset = load_dataset(data, meta)
    parameters = {
        "data": data,
        "meta": meta,
        "models": sorted(models),
        "repeats": repeats,
        "split": split,
        "walk_length": walk_length,
        "n_walks": n_walks,
        "radius": radius,
    }
    if not models:
        view = build_view(dataset, radius=radius)
        profile = feature_profile(view, walk_length, n_walks, seed=seed)
        body = {"system": profile.to_record()}
        if fmt == "machine":
            _emit(machine_report("features", parameters, seed, body), out)
            return
        rows = []
        for name in ALL_FEATURES:
            if profile.has(name):
                rows.append([name, profile.value(name), ""])
            else:
                rows.append([name, None, profile.absent.get(name, "absent")])
        text = render_table(["feature", "value", "note"], rows)
        text += (
            f"\npoints: {profile.n_points}  coverage: {profile.coverage:.6g}"
            f"  walks: {profile.n_walks} x {profile.walk_length}  seed: {seed}\n"
        )
        _emit(text, out)
        return

    study = profile_models(
        dataset,
        model_kinds=sorted(models),
        split=split,
        repeats=repeats,
        seed=seed,
        walk_length=walk_length,
        n_walks=n_walks,
        radius=radius,
    )
    system_mean = aggregate_profiles(study.system_profiles())
    model_means = {k: aggregate_profiles(study.model_profiles(k)) for k in study.model_kinds}
    accuracy_means = {k: mean_accuracy(study.accuracy(k)) for k in study.model_kinds}
    body = {
        "system": system_mean.to_record(),
        "models": {
            k: {"profile": model_means[k].to_record(), "accuracy": accuracy_means[k].to_record()}
            for k in study.model_kinds
        },
        "repeats": [r.to_record() for r in study.repeats],
    }
    if fmt == "machine":
        _emit(machine_report("features", parameters, seed, body), out)
        return
    headers = ["feature", "system"] + list(study.model_kinds)
    rows = []
    for name in ALL_FEATURES:
        row = [name, system_mean.value(name) if system_mean.has(name) else None]
        for k in study.model_kinds:
            row.append(model_means[k].value(name) if model_means[k].has(name) else None)
        rows.append(row)
    text = render_table(headers, rows)
    acc_rows = [
        [k, accuracy_means[k].mape, accuracy_means[k].murd, accuracy_means[k].n_test]
        for k in study.model_kinds
    ]
    text += "\n" + render_table(["model", "mape", "murd", "n_test"], acc_rows)
    text += f"\nmeans over {repeats} repeat(s), seed {seed}\n"
    _emit(text, out)


@main.command()
@_data_options
@click.option("--model", "models", multiple=True, type=click.Choice(MODEL_KINDS), help="Surrogates to assess (default: all).")
@click.option("--repeats", default=30, show_default=True, type=int)
@_study_options
@_fmt_option
@_guarded
def fidelity(data, meta, models, repeats, split, seed, walk_length, n_walks, radius, fmt, out):
    """Per-feature deviation of emulated landscapes from the measured one."""
    dataset = load_dataset(data, meta)
    kinds = sorted(models) if models else list(MODEL_KINDS)
    parameters = {
        "data": data,
        "meta": meta,
        "models": kinds,
        "repeats": repeats,
        "split": split,
        "walk_length": walk_length,
        "n_walks": n_walks,
        "radius": radius,
    }
    study = profile_models(
        dataset,
        model_kinds=kinds,
        split=split,
        repeats=repeats,
        seed=seed,
        walk_length=walk_length,
        n_walks=n_walks,
        radius=radius,
    )
    reports = fidelity_report(
        study.system_profiles(), {k: study.model_profiles(k) for k in kinds}
    )
    accuracy_means = {k: mean_accuracy(study.accuracy(k)) for k in kinds}
    body = {
        "fidelity": [r.to_record() for r in reports],
        "accuracy": {k: accuracy_means[k].to_record() for k in kinds},
    }
    if fmt == "machine":
        _emit(machine_report("fidelity", parameters, seed, body), out)
        return
    rows = [
        [r.feature, r.mean_positive, r.mean_negative, r.ss_pct, r.n_models, r.n_cases]
        for r in reports
    ]
    text = render_table(
        ["feature", "mean_dev+", "mean_dev-", "ss_pct", "n_models", "n_cases"], rows
    )
    acc_rows = [[k, accuracy_means[k].mape, accuracy_means[k].murd] for k in kinds]
    text += "\n" + render_table(["model", "mape", "murd"], acc_rows)
    text += f"\nmeans over {repeats} repeat(s), seed {seed}\n"
    _emit(text, out)


@main.command()
@_data_options
@click.option("--pattern", required=True, type=click.Choice(("sequential", "batch")))
@click.option("--algorithm", "algorithms", multiple=True, help="Tuner algorithm for the pattern (repeatable; default: all).")
@click.option("--model", "models", multiple=True, type=click.Choice(MODEL_KINDS), help="Surrogate kinds to drive (default: all).")
@click.option("--budget", type=int, default=None, help="Tuning budget (measurements or model evaluations).")
@click.option("--budget-preset", type=click.Choice(sorted(BUDGET_PRESETS)), default=None, help="Named per-system budget.")
@click.option("--hotstart", default=DEFAULT_HOTSTART, show_default=True, type=int, help="Sequential warm-up measurements.")
@click.option("--final-measure", default=DEFAULT_FINAL_MEASURE, show_default=True, type=int, help="Batch shortlist size that gets measured.")
@click.option("--split", default="binary-5n", show_default=True, help="Training rows for batch models.")
@click.option("--repeats", default=30, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@_fmt_option
@_guarded
def tune(data, meta, pattern, algorithms, models, budget, budget_preset, hotstart, final_measure, split, repeats, seed, fmt, out):
    """Run tuners against surrogate models and rank the pairings."""
    if (budget is None) == (budget_preset is None):
        raise click.UsageError("exactly one of --budget or --budget-preset is required")
    if budget_preset is not None:
        budget = BUDGET_PRESETS[budget_preset]
    allowed = SEQUENTIAL_ALGORITHMS if pattern == "sequential" else BATCH_ALGORITHMS
    algorithms = list(algorithms) if algorithms else list(allowed)
    for a in algorithms:
        if a not in allowed:
            raise click.UsageError(f"{pattern} tuners support {allowed}, got {a!r}")
    kinds = sorted(models) if models else list(MODEL_KINDS)
    dataset = load_dataset(data, meta)
    parameters = {
        "data": data,
        "meta": meta,
        "pattern": pattern,
        "algorithms": algorithms,
        "models": kinds,
        "budget": budget,
        "budget_preset": budget_preset,
        "hotstart": hotstart,
        "final_measure": final_measure,
        "split": split,
        "repeats": repeats,
    }
    runs: dict[tuple[str, str], list] = {}
    notes: dict[tuple[str, str], set] = {}
    for kind in kinds:
        for algorithm in algorithms:
            tuner = TunerSpec(id=algorithm, pattern=pattern, algorithm=algorithm)
            key = (kind, algorithm)
            runs[key] = []
            notes[key] = set()
            for rep in range(repeats):
                rs = repeat_seed(seed, rep)
                if pattern == "sequential":
                    result = run_sequential(
                        tuner, kind, dataset, budget, hotstart=hotstart, seed=rs
                    )
                else:
                    train_data, _ = split_train_test(dataset, split, seed=rs)
                    model = train(kind, train_data, seed=rs)
                    result = run_batch(
                        tuner, model, dataset, budget, final_measure=final_measure, seed=rs
                    )
                runs[key].append(result)
                notes[key].update(result.notes)
    ranks = rank_pairs(runs)
    results = []
    for (kind, algorithm), run_list in runs.items():
        results.append(
            {
                "model": kind,
                "tuner": algorithm,
                "mean_best": float(np.mean([r.best_measured for r in run_list])),
                "rank": ranks[(kind, algorithm)],
                "repeats": repeats,
                "notes": sorted(notes[(kind, algorithm)]),
                "runs": [
                    {
                        "best_measured": r.best_measured,
                        "budget_used": r.budget_used,
                        "measurements_used": r.measurements_used,
                        "seed": r.seed,
                    }
                    for r in run_list
                ],
            }
        )
    results.sort(key=lambda r: (r["rank"], r["model"], r["tuner"]))
    body = {"pattern": pattern, "budget": budget, "results": results}
    if fmt == "machine":
        _emit(machine_report("tune", parameters, seed, body), out)
        return
    rows = [
        [r["rank"], r["model"], r["tuner"], r["mean_best"], "; ".join(r["notes"])]
        for r in results
    ]
    text = render_table(["rank", "model", "tuner", "mean_best", "notes"], rows)
    text += f"\nbudget {budget}, {repeats} repeat(s), seed {seed} (best is minimized fitness)\n"
    _emit(text, out)


def _load_tuning_results(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read tuning results: {exc}", path=path)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"tuning results are not valid JSON: {exc}", path=path)
    if not isinstance(doc, dict) or "results" not in doc:
        raise DataFormatError("tuning results must be a tune machine report", path=path)
    mapping = {}
    for entry in doc["results"]:
        try:
            mapping[(entry["model"], entry["tuner"])] = float(entry["mean_best"])
        except (TypeError, KeyError):
            raise DataFormatError(
                "each tuning result needs model, tuner, and mean_best fields", path=path
            )
    if not mapping:
        raise DataFormatError("tuning results are empty", path=path)
    return mapping


@main.command()
@_data_options
@click.option("--results", "results_path", required=True, type=click.Path(dir_okay=False), help="Machine report from the tune command.")
@click.option("--repeats", default=30, show_default=True, type=int, help="Profiling repeats.")
@click.option("--global-feature", type=click.Choice(GLOBAL_FEATURES), default=None, help="Restrict objectives to this global feature.")
@click.option("--local-feature", type=click.Choice(LOCAL_FEATURES), default=None, help="Restrict objectives to this local feature.")
@_study_options
@_fmt_option
@_guarded
def dominate(data, meta, results_path, repeats, global_feature, local_feature, split, seed, walk_length, n_walks, radius, fmt, out):
    """Do landscape-dominating models tune better than dominated ones?"""
    if (global_feature is None) != (local_feature is None):
        raise click.UsageError("--global-feature and --local-feature go together")
    tuning_results = _load_tuning_results(results_path)
    models = sorted({m for m, _ in tuning_results})
    tuners = sorted({t for _, t in tuning_results})
    dataset = load_dataset(data, meta)
    parameters = {
        "data": data,
        "meta": meta,
        "results": results_path,
        "repeats": repeats,
        "global_feature": global_feature,
        "local_feature": local_feature,
        "split": split,
        "walk_length": walk_length,
        "n_walks": n_walks,
        "radius": radius,
    }
    study = profile_models(
        dataset,
        model_kinds=models,
        split=split,
        repeats=repeats,
        seed=seed,
        walk_length=walk_length,
        n_walks=n_walks,
        radius=radius,
    )
    system_profile = aggregate_profiles(study.system_profiles())
    model_profiles = {k: aggregate_profiles(study.model_profiles(k)) for k in models}
    objectives = None
    if global_feature is not None:
        objectives = [(global_feature, local_feature)]
    pairs = dg_dd_pairs(model_profiles, system_profile, tuners, objectives=objectives)
    if not pairs:
        raise AnalysisError(
            "no dominance pairs: no model dominates another on the chosen objectives"
        )
    overall = delta_p(pairs, tuning_results)
    per_tuner = {}
    for tuner in tuners:
        subset = [p for p in pairs if p.tuner == tuner]
        if subset:
            per_tuner[tuner] = delta_p(subset, tuning_results)
    body = {
        "overall": overall.to_record(),
        "per_tuner": {t: r.to_record() for t, r in per_tuner.items()},
        "models": models,
        "tuners": tuners,
    }
    if fmt == "machine":
        _emit(machine_report("dominate", parameters, seed, body), out)
        return
    rows = []
    for tuner in tuners:
        if tuner in per_tuner:
            r = per_tuner[tuner]
            rows.append([tuner, r.n_pairs, r.delta_p, r.win_pct, r.tie_pct, r.lose_pct, r.p_value])
    rows.append(
        ["overall", overall.n_pairs, overall.delta_p, overall.win_pct, overall.tie_pct, overall.lose_pct, overall.p_value]
    )
    text = render_table(
        ["scope", "n_pairs", "delta_p", "win_pct", "tie_pct", "lose_pct", "p_value"], rows
    )
    text += "\nnegative delta_p means dominating models tuned better\n"
    _emit(text, out)


@main.command()
@_data_options
@click.option("--model", "models", multiple=True, type=click.Choice(MODEL_KINDS), help="Model rows of the matrices (default: all).")
@click.option("--feature", "features_opt", multiple=True, type=click.Choice(ALL_FEATURES), help="Features to screen (default: all).")
@click.option("--invert", is_flag=True, help="Read the same cluster as the full system instead of the opposite one.")
@_study_options
@_fmt_option
@_guarded
def influence(data, meta, models, features_opt, invert, split, seed, walk_length, n_walks, radius, fmt, out):
    """Screen options for influence by ablation, feature matrices, and 2-means."""
    dataset = load_dataset(data, meta)
    kinds = sorted(models) if models else list(MODEL_KINDS)
    chosen = list(features_opt) if features_opt else list(ALL_FEATURES)
    parameters = {
        "data": data,
        "meta": meta,
        "models": kinds,
        "features": chosen,
        "invert": invert,
        "split": split,
        "walk_length": walk_length,
        "n_walks": n_walks,
        "radius": radius,
    }
    matrices = build_matrices(
        dataset,
        kinds,
        features=chosen,
        split=split,
        seed=seed,
        walk_length=walk_length,
        n_walks=n_walks,
    )
    results = {name: influential_options(matrices[name], seed=seed, invert=invert) for name in chosen}
    body = {
        "influence": {name: results[name].to_record() for name in chosen},
        "matrices": {name: matrices[name].to_record() for name in chosen},
    }
    if fmt == "machine":
        _emit(machine_report("influence", parameters, seed, body), out)
        return
    rows = [
        [name, ", ".join(results[name].options) or "-", results[name].degenerate]
        for name in chosen
    ]
    text = render_table(["feature", "influential_options", "degenerate"], rows)
    text += f"\nmodels: {', '.join(kinds)}; seed {seed}\n"
    _emit(text, out)


@main.command(name="rank-train")
@click.option("--records", "records_path", required=True, type=click.Path(dir_okay=False), help="Labeled record CSV.")
@click.option("--ranker-out", required=True, type=click.Path(dir_okay=False), help="Where to save the trained ranker.")
@click.option("--rounds", default=100, show_default=True, type=int)
@click.option("--max-depth", default=4, show_default=True, type=int)
@click.option("--learning-rate", default=0.1, show_default=True, type=float)
@click.option("--min-leaf", default=5, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@_fmt_option
@_guarded
def rank_train(records_path, ranker_out, rounds, max_depth, learning_rate, min_leaf, seed, fmt, out):
    """Train the (model, tuner) ranker on labeled records."""
    records = read_records(records_path)
    params = RankerParams(
        rounds=rounds,
        max_depth=max_depth,
        learning_rate=learning_rate,
        min_leaf=min_leaf,
        seed=seed,
    )
    model = train_ranker(records, params)
    save_ranker(model, ranker_out)
    parameters = {
        "records": records_path,
        "ranker_out": ranker_out,
        "rounds": rounds,
        "max_depth": max_depth,
        "learning_rate": learning_rate,
        "min_leaf": min_leaf,
    }
    body = {
        "pattern": model.pattern,
        "n_records": model.n_records,
        "n_queries": model.n_queries,
        "training_loss": list(model.training_loss),
    }
    if fmt == "machine":
        _emit(machine_report("rank-train", parameters, seed, body), out)
        return
    rows = [
        ["pattern", model.pattern],
        ["records", model.n_records],
        ["systems", model.n_queries],
        ["rounds", rounds],
        ["initial_loss", model.training_loss[0] if model.training_loss else None],
        ["final_loss", model.training_loss[-1] if model.training_loss else None],
        ["saved_to", ranker_out],
    ]
    _emit(render_table(["key", "value"], rows), out)


@main.command(name="rank-predict")
@click.option("--records", "records_path", required=True, type=click.Path(dir_okay=False), help="Record CSV to score (y optional).")
@click.option("--ranker", "ranker_path", required=True, type=click.Path(dir_okay=False), help="Trained ranker file.")
@_fmt_option
@_guarded
def rank_predict(records_path, ranker_path, fmt, out):
    """Order (model, tuner) records per system with a trained ranker."""
    records = read_records(records_path)
    model = load_ranker(ranker_path)
    parameters = {"records": records_path, "ranker": ranker_path}
    systems: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        systems.setdefault(r.system, []).append(i)
    scores = predict_ranker(model, records)
    rankings = {}
    metrics = {}
    for system in sorted(systems):
        rows = systems[system]
        order = rank_by_scores(scores[rows])
        ranked = []
        for position, local_idx in enumerate(order, start=1):
            r = records[rows[local_idx]]
            ranked.append(
                {
                    "position": position,
                    "model": r.model,
                    "tuner": r.tuner,
                    "score": float(scores[rows[local_idx]]),
                    "y": r.y,
                }
            )
        rankings[system] = ranked
        ys = [records[i].y for i in rows]
        if all(y is not None for y in ys) and len(ys) > 1:
            y_arr = np.array(ys, dtype=float)
            try:
                metrics[system] = {
                    "ndcg": ndcg_at_k(order, y_arr),
                    "ap": ap_at_k(order, top_half_relevance(y_arr)),
                }
            except AnalysisError:
                metrics[system] = None
    body = {"pattern": model.pattern, "rankings": rankings, "metrics": metrics}
    if fmt == "machine":
        _emit(machine_report("rank-predict", parameters, None, body), out)
        return
    rows_out = []
    for system in sorted(rankings):
        for entry in rankings[system]:
            rows_out.append(
                [system, entry["position"], entry["model"], entry["tuner"], entry["score"], entry["y"]]
            )
    text = render_table(["system", "position", "model", "tuner", "score", "true_rank"], rows_out)
    if metrics:
        metric_rows = [
            [system, m["ndcg"] if m else None, m["ap"] if m else None]
            for system, m in sorted(metrics.items())
        ]
        text += "\n" + render_table(["system", "ndcg", "ap_top_half"], metric_rows)
    _emit(text, out)


@main.command()
@click.option("--kind", required=True, type=click.Choice(("unimodal", "rugged", "deceptive")))
@click.option("--n-options", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--noise", default=0.0, show_default=True, type=float, help="Gaussian noise scale added to performance.")
@click.option("--k", default=None, type=int, help="Subfunction arity (rugged only).")
@click.option("--basin", default=None, type=int, help="Deceptive basin radius (deceptive only).")
@click.option("--data-out", required=True, type=click.Path(dir_okay=False))
@click.option("--meta-out", required=True, type=click.Path(dir_okay=False))
@_fmt_option
@_guarded
def synth(kind, n_options, seed, noise, k, basin, data_out, meta_out, fmt, out):
    """Generate a fully enumerated synthetic benchmark system."""
    if k is not None and kind != "rugged":
        raise click.UsageError("--k only applies to rugged systems")
    if basin is not None and kind != "deceptive":
        raise click.UsageError("--basin only applies to deceptive systems")
    params = {}
    if noise:
        params["noise"] = noise
    if k is not None:
        params["k"] = k
    if basin is not None:
        params["basin"] = basin
    system = synth_system(kind, n_options, seed=seed, **params)
    write_dataset(system.dataset, data_out, meta_out)
    parameters = {
        "kind": kind,
        "n_options": n_options,
        "noise": noise,
        "k": k,
        "basin": basin,
        "data_out": data_out,
        "meta_out": meta_out,
    }
    body = {
        "kind": kind,
        "n_options": n_options,
        "n_rows": len(system.dataset),
        "optimum": list(system.optimum.values),
        "optimum_performance": float(
            system.dataset.performance_of(system.optimum)
        ),
        "params": system.params,
        "data": data_out,
        "meta": meta_out,
    }
    if fmt == "machine":
        _emit(machine_report("synth", parameters, seed, body), out)
        return
    rows = [
        ["kind", kind],
        ["options", n_options],
        ["rows", len(system.dataset)],
        ["optimum", "".join(str(v) for v in system.optimum.values)],
        ["optimum_performance", body["optimum_performance"]],
        ["data", data_out],
        ["meta", meta_out],
    ]
    _emit(render_table(["key", "value"], rows), out)


if __name__ == "__main__":
    main()
