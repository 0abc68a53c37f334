"""Command-line interface: data generation, fitting, boundaries, benchmark."""

from __future__ import annotations

import json
import time
from pathlib import Path

import click

from . import bench, datasets
from .agents import EngineConfig
from .engine import Engine
from .linear import LinearModelConfig, ModelKind, OnlineLinearModel

_KIND_CHOICE = click.Choice([k.value for k in bench.KINDS])


@click.group()
def main():
    """Cooperative-tiling classifier toolkit."""


@main.command("gen-data")
@click.option("--dataset", type=click.Choice(["moons", "circles", "linear"]), required=True)
@click.option("--n", default=100, show_default=True)
@click.option("--noise", default=None, type=float, help="Jitter sigma (moons: 0.3, circles: 0.2).")
@click.option("--factor", default=0.5, show_default=True, help="Inner/outer radius ratio (circles).")
@click.option("--seed", default=0, show_default=True)
@click.option("--standardize", "do_standardize", is_flag=True, help="Z-score the columns.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen_data(dataset, n, noise, factor, seed, do_standardize, out):
    """Generate one benchmark dataset as CSV (plus a sidecar manifest)."""
    if dataset == "moons":
        ds = datasets.gen_moons(n, 0.3 if noise is None else noise, seed)
    elif dataset == "circles":
        ds = datasets.gen_circles(n, 0.2 if noise is None else noise, factor, seed)
    else:
        ds = datasets.gen_linear(n, seed)
    if do_standardize:
        ds = datasets.standardize(ds)
    datasets.save_csv(ds, out)
    click.echo(f"wrote {ds.n} points to {out}")


@main.command("fit-linear")
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--kind", type=_KIND_CHOICE, required=True)
@click.option("--grid", default="default", show_default=True, help="Grid name (only 'default').")
@click.option("--cv", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--epochs", default=100, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Result record JSON.")
@click.option("--model-out", type=click.Path(dir_okay=False), default=None,
              help="Also save the best model refit on the full data.")
@click.option("--trace", type=click.Path(dir_okay=False), default=None,
              help="JSON-lines grid progress log.")
def fit_linear(data, kind, grid, cv, seed, epochs, out, model_out, trace):
    """Step 1: cross-validated grid search for one bare linear classifier."""
    if grid != "default":
        raise click.BadParameter("only the 'default' grid is available")
    ds = datasets.load_csv(data)
    record = bench.grid_search_linear(ds, ModelKind(kind), n_folds=cv, cv_seed=seed,
                                      fit_seed=seed, epochs=epochs)
    _write_json(out, record.to_dict())
    if trace:
        with open(trace, "w") as f:
            f.write(json.dumps({"stage": "ALONE", "record": record.to_dict()}, sort_keys=True) + "\n")
    if model_out:
        model = LinearModelConfig(kind=ModelKind(kind), **record.best_params).build(ds.X.shape[1])
        model.fit(ds.X, ds.Y, epochs=epochs, seed=seed)
        _write_json(model_out, {"type": "linear", "model": model.to_dict()})
    click.echo(f"{kind} alone: mean accuracy {record.mean_accuracy:.4f} ({out})")


@main.command("fit-mas")
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--kind", type=_KIND_CHOICE, required=True)
@click.option("--linear-params", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Result record JSON from fit-linear (its best_params are frozen).")
@click.option("--cv", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--passes", default=2, show_default=True, help="Exploration passes over the data.")
@click.option("--jobs", default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Result record JSON.")
@click.option("--engine-out", type=click.Path(dir_okay=False), default=None,
              help="Also save the best engine retrained on the full data.")
@click.option("--trace", type=click.Path(dir_okay=False), default=None,
              help="JSON-lines cycle log of the final full-data training.")
def fit_mas(data, kind, linear_params, cv, seed, passes, jobs, out, engine_out, trace):
    """Step 2: engine-parameter grid search with a frozen linear model."""
    ds = datasets.load_csv(data)
    with open(linear_params) as f:
        alone = json.load(f)
    params = alone["best_params"] if "best_params" in alone else alone
    record = bench.grid_search_mas(ds, ModelKind(kind), params, n_folds=cv, cv_seed=seed,
                                   fit_seed=seed, passes=passes, jobs=jobs)
    _write_json(out, record.to_dict())
    if engine_out or trace:
        cfg = EngineConfig(**record.best_params["engine"], seed=seed, exploration_passes=passes)
        model_cfg = LinearModelConfig.from_dict({"kind": kind, **params})
        engine = Engine(cfg, model_cfg, dim=ds.X.shape[1])
        if trace:
            with open(trace, "w") as f:
                engine.train(ds.X, ds.Y, trace=f)
        else:
            engine.train(ds.X, ds.Y)
        if engine_out:
            _write_json(engine_out, {"type": "engine", "snapshot": engine.snapshot()})
    click.echo(f"{kind} in MAS: mean accuracy {record.mean_accuracy:.4f} ({out})")


@main.command("boundary")
@click.option("--model", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Model file from fit-linear --model-out or fit-mas --engine-out.")
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Dataset CSV fixing the lattice bounds.")
@click.option("--step", default=0.02, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def boundary(model, data, step, out):
    """Export predictions on a lattice around the data as x1,x2,yhat CSV."""
    ds = datasets.load_csv(data)
    with open(model) as f:
        saved = json.load(f)
    if saved.get("type") == "linear":
        predict = OnlineLinearModel.from_dict(saved["model"]).predict_batch
    elif saved.get("type") == "engine":
        predict = Engine.from_snapshot(saved["snapshot"]).predict_batch
    else:
        raise click.BadParameter(f"{model}: unknown model file type {saved.get('type')!r}")
    grid = bench.boundary_grid(predict, ds.X, step=step)
    grid.to_csv(out)
    click.echo(f"wrote {grid.labels.size} lattice predictions to {out}")


@main.command("reproduce")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", default=None, type=int, help="Override config worker count.")
def reproduce(config_path, out_dir, jobs):
    """Run the full three-dataset benchmark and write the accuracy table."""
    overrides = {}
    if config_path:
        with open(config_path) as f:
            overrides = json.load(f)
    if jobs is not None:
        overrides["jobs"] = jobs
    config = bench.experiment_config(overrides)  # validate before any compute
    started = time.perf_counter()
    records = bench.run_experiment(config, out_dir=out_dir)
    elapsed = time.perf_counter() - started
    click.echo(f"{len(records)} records in {elapsed:.1f}s -> {out_dir}/results.json")
    by_key = {(r.dataset, r.kind, r.stage): r.mean_accuracy for r in records}
    width = max(len(k.value) for k in bench.KINDS)
    header = " " * width + "  " + "  ".join(f"{n:>14}" for n in bench.DATASET_NAMES)
    click.echo(header + "   (alone / mas)")
    for kind in bench.KINDS:
        cells = []
        for name in bench.DATASET_NAMES:
            a = by_key[(name, kind.value, "ALONE")]
            m = by_key[(name, kind.value, "MAS")]
            cells.append(f"{a:.2f} / {m:.2f}")
        click.echo(f"{kind.value:<{width}}  " + "  ".join(f"{c:>14}" for c in cells))


def _write_json(path, payload) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
