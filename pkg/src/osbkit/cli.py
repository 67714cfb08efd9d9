"""Operator CLI: dataset generation, single-classifier training, grid search,
repeated cross-validation, local prediction, and the HTTP service.

Option precedence is flags > environment variables (prefix ACCU_) > values
from --config (a JSON file used as the default map).
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from . import service as svc
from .classical import KnnModel, lda_fit, lr_train
from .core_data import (
    BiomarkerVector,
    Dataset,
    normalize_apply,
    normalize_dataset,
    normalize_fit,
    parse_dataset_csv,
    serialize_dataset_csv,
)
from .evaluation import cross_validate, rounds_csv
from .honn import HyperGrid, grid_search, search_log_csv
from .neural import ActivationKind
from .server import create_app
from .synthgen import PRESETS, generate, preset
from .trainers import (
    honn_winner_trainer,
    make_knn_trainer,
    make_lda_trainer,
    make_lr_trainer,
    make_network_trainer,
)


def load_grid(grid_config: str | None) -> HyperGrid:
    if not grid_config:
        return HyperGrid()
    doc = json.loads(Path(grid_config).read_text())
    kwargs = {}
    if "activations" in doc:
        kwargs["activations"] = tuple(ActivationKind(a) for a in doc["activations"])
    if "step_sizes" in doc:
        kwargs["step_sizes"] = tuple(float(v) for v in doc["step_sizes"])
    if "epoch_list" in doc:
        kwargs["epoch_list"] = tuple(int(v) for v in doc["epoch_list"])
    if "unit_range" in doc:
        kwargs["unit_range"] = tuple(int(v) for v in doc["unit_range"])
    if "hidden_layer_counts" in doc:
        kwargs["hidden_layer_counts"] = tuple(int(v) for v in doc["hidden_layer_counts"])
    return HyperGrid(**kwargs)


@click.group(context_settings={"auto_envvar_prefix": "ACCU"})
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON config file supplying option defaults.")
@click.pass_context
def main(ctx, config):
    if config:
        ctx.default_map = json.loads(Path(config).read_text())


@main.command()
@click.option("--preset", "preset_name", type=click.Choice(sorted(PRESETS)), default="separable")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default="-", help="Output CSV path ('-' for stdout).")
def gen(preset_name, seed, out):
    """Generate a synthetic biomarker dataset CSV from a named preset."""
    text = serialize_dataset_csv(generate(preset(preset_name, seed)))
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")


def _build_record(kind, data, seed, rho, epochs, knn_k, topology):
    params = normalize_fit(data)
    norm_data = normalize_dataset(params, data)
    if kind == "lr":
        model = lr_train(norm_data, rho=rho, seed=seed)
        model_params = svc.logistic_params(model)
    elif kind == "lda":
        model = lda_fit(norm_data)
        model_params = svc.lda_params(model)
    elif kind == "knn":
        model = KnnModel(norm_data, knn_k)
        model_params = svc.knn_params(model)
    else:  # ann
        from .neural import NetworkModel, TrainConfig, train as nn_train

        net = NetworkModel(tuple(topology))
        weights, _ = nn_train(net, norm_data, TrainConfig(rho=rho, epochs=epochs, seed=seed))
        model_params = svc.network_params(net, weights)
    return svc.ModelRecord(
        version=1,
        created_at=time.time(),
        kind=kind.upper() if kind != "ann" else "ANN",
        params=model_params,
        normalization=params,
        metadata={"dataset_size": len(data), "seed": seed},
    )


@main.command()
@click.option("--kind", type=click.Choice(["lr", "lda", "knn", "ann"]), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True, help="Model record output path.")
@click.option("--seed", type=int, default=0)
@click.option("--rho", type=float, default=0.005)
@click.option("--epochs", type=int, default=10000)
@click.option("--knn-k", type=int, default=5)
@click.option("--topology", default="5,6,3", help="ANN layer sizes, comma separated.")
def train(kind, data_path, out, seed, rho, epochs, knn_k, topology):
    """Train one classifier on a CSV dataset and write a model record."""
    data = parse_dataset_csv(Path(data_path).read_text())
    topo = tuple(int(n) for n in topology.split(","))
    record = _build_record(kind, data, seed, rho, epochs, knn_k, topo)
    Path(out).write_text(record.to_json())
    click.echo(f"wrote {out} (kind={record.kind}, N={len(data)})")


@main.command("grid-search")
@click.option("--train", "train_path", type=click.Path(exists=True), default=None,
              help="Training CSV; with --test, used as-is.")
@click.option("--test", "test_path", type=click.Path(exists=True), default=None)
@click.option("--data", "data_path", type=click.Path(exists=True), default=None,
              help="Single CSV to split 2:1 (stratified, seeded).")
@click.option("--grid-config", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True, help="Model record output path.")
@click.option("--log-out", type=click.Path(), default=None, help="Candidate log CSV path.")
def grid_search_cmd(train_path, test_path, data_path, grid_config, seed, out, log_out):
    """Search activation, step size, epochs, and topology; keep the best model."""
    grid = load_grid(grid_config)
    if data_path:
        data = parse_dataset_csv(Path(data_path).read_text())
        tp_raw, td_raw = svc.stratified_split(data, seed)
    elif train_path and test_path:
        tp_raw = parse_dataset_csv(Path(train_path).read_text())
        td_raw = parse_dataset_csv(Path(test_path).read_text())
    else:
        raise click.UsageError("supply --data, or both --train and --test")
    params = normalize_fit(tp_raw)
    result = grid_search(
        normalize_dataset(params, tp_raw), normalize_dataset(params, td_raw), grid, seed=seed
    )
    record = svc.ModelRecord(
        version=1,
        created_at=time.time(),
        kind="HONN",
        params=svc.network_params(result.best_model, result.best_weights),
        normalization=params,
        metadata={
            "dataset_size": len(tp_raw) + len(td_raw),
            "seed": seed,
            "grid_config_hash": svc.grid_config_hash(grid),
            "best_test_accuracy": result.best_accuracy,
        },
    )
    Path(out).write_text(record.to_json())
    if log_out:
        Path(log_out).write_text(search_log_csv(result.log))
    click.echo(
        f"best topology {result.best_model.topology_string()} "
        f"accuracy {result.best_accuracy:.4f} -> {out}"
    )


@main.command()
@click.option("--kind", type=click.Choice(["lr", "lda", "knn", "ann", "honn"]), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--k", type=int, default=3, help="Folds per repeat.")
@click.option("--repeats", type=int, default=3)
@click.option("--seed", type=int, default=0)
@click.option("--rho", type=float, default=0.005)
@click.option("--epochs", type=int, default=10000)
@click.option("--knn-k", type=int, default=5)
@click.option("--topology", default="5,6,3")
@click.option("--grid-config", type=click.Path(exists=True), default=None)
@click.option("--rounds-out", type=click.Path(), default=None, help="Per-round CSV path.")
def evaluate(kind, data_path, k, repeats, seed, rho, epochs, knn_k, topology, grid_config,
             rounds_out):
    """Repeated k-fold cross-validation; prints the mean of each metric."""
    data = parse_dataset_csv(Path(data_path).read_text())
    if kind == "lr":
        trainer = make_lr_trainer(rho=rho, max_iter=epochs)
    elif kind == "lda":
        trainer = make_lda_trainer()
    elif kind == "knn":
        trainer = make_knn_trainer(knn_k)
    elif kind == "ann":
        topo = tuple(int(n) for n in topology.split(","))
        trainer = make_network_trainer(topology=topo, rho=rho, epochs=epochs)
    else:
        trainer = honn_winner_trainer(data, load_grid(grid_config), seed=seed)
    report = cross_validate(trainer, data, k=k, repeats=repeats, seed=seed)
    click.echo(f"{kind.upper()} over {k}-fold x {repeats} repeats ({k * repeats} rounds):")
    for name, value in report.mean.items():
        click.echo(f"  {name:>16}: {value:.6f}")
    if rounds_out:
        Path(rounds_out).write_text(rounds_csv(report))


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--sd", type=float, required=True)
@click.option("--gp", type=float, required=True)
@click.option("--cat", type=float, required=True)
@click.option("--mal", type=float, required=True)
@click.option("--sc", type=float, required=True)
def predict(model_path, sd, gp, cat, mal, sc):
    """Classify one biomarker vector with a local model record file."""
    record = svc.ModelRecord.from_json(Path(model_path).read_text())
    cls, scores = svc.record_predict(record, BiomarkerVector(sd, gp, cat, mal, sc))
    click.echo(json.dumps({"class": cls.name, "scores": scores, "model_version": record.version}))


@main.command()
@click.option("--bind", default="127.0.0.1:8000", help="host:port to listen on.")
@click.option("--store-dir", type=click.Path(), default="./osbkit-store")
@click.option("--threshold", type=int, default=svc.DEFAULT_THRESHOLD,
              help="New samples required before automatic retraining.")
@click.option("--seed", type=int, default=0)
@click.option("--grid-config", type=click.Path(exists=True), default=None)
def serve(bind, store_dir, threshold, seed, grid_config):
    """Run the ingestion/prediction HTTP service."""
    import uvicorn

    host, _, port = bind.partition(":")
    service = OcdServiceFactory(store_dir, grid_config, threshold, seed)
    uvicorn.run(create_app(service), host=host or "127.0.0.1", port=int(port or 8000))


def OcdServiceFactory(store_dir, grid_config, threshold, seed) -> svc.OcdService:
    return svc.OcdService(
        store_dir, grid=load_grid(grid_config), threshold=threshold, seed=seed
    )


if __name__ == "__main__":
    main()
