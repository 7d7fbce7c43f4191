"""Command-line interface.

Commands: synth, features, train, sweep, analyze, report. Global flags
--config/--seed/--out/--jobs sit on the group and apply to every
command; flag values override config-file values, which override
defaults. Exit codes: 0 success, 1 pipeline failure, 2 usage or config
error. Every artifact write is atomic and byte-deterministic.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

import click

from .config import RunConfig, load_config
from .errors import ConfigError, EegkanError
from .features import PipelineConfig, build_dataset, read_features, split, write_features
from .ioutil import atomic_write_text
from .nn import KanConfig, ModelSpec, param_count, save_checkpoint, train
from .ols import loss_regression
from .recordings import ManifestEntry, save_recording, write_manifest
from .svgplot import confusion_heatmap, sweep_loss_chart
from .sweep import (
    SweepGrid,
    best_config,
    confusion,
    read_sweep,
    run_sweep,
    write_sweep,
)
from .synthetic import synthesize_dataset

KIND_CHOICE = click.Choice(["ann", "kan"])


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _int_list(_ctx, _param, value):
    if value is None:
        return None
    try:
        return tuple(int(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def _float_list(_ctx, _param, value):
    if value is None:
        return None
    try:
        return tuple(float(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def _str_list(_ctx, _param, value):
    if value is None:
        return None
    return tuple(v.strip() for v in value.split(",") if v.strip())


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; flags override its values.")
@click.option("--seed", type=int, default=None, help="Seed for generation and splits.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Output directory (default from config, then ./out).")
@click.option("--jobs", type=click.IntRange(min=1), default=None,
              help="Worker processes for the sweep (default: CPU count).")
@click.pass_context
def main(ctx, config_path, seed, out_dir, jobs):
    """EEG band-power features and ANN/KAN training experiments."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if out_dir is not None:
        cfg = dataclasses.replace(cfg, out_dir=out_dir)
    ctx.obj = {"cfg": cfg, "jobs": jobs}


def _cfg(ctx) -> RunConfig:
    return ctx.obj["cfg"]


def _out(ctx) -> Path:
    out = Path(_cfg(ctx).out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _pipeline_config(cfg: RunConfig, with_gender: bool) -> PipelineConfig:
    return PipelineConfig(
        filter_order=cfg.filter.order,
        filter_low_hz=cfg.filter.low_hz,
        filter_high_hz=cfg.filter.high_hz,
        segment_len=cfg.welch.segment_len,
        overlap=cfg.welch.overlap,
        bands=cfg.bands,
        with_gender=with_gender,
    )


def _model_template(cfg: RunConfig, input_dim: int, kind: str = "ann",
                    nodes: int = 16) -> ModelSpec:
    m = cfg.model
    return ModelSpec(
        kind=kind,
        input_dim=input_dim,
        hidden_nodes=nodes,
        output_dim=m.output_dim,
        dropout_rate=m.dropout_rate,
        kan=KanConfig(grid_size=m.grid_size, spline_degree=m.spline_degree,
                      grid_range=m.grid_range),
    )


def _split_features(path, cfg: RunConfig):
    dataset = read_features(path)
    return split(dataset, cfg.test_frac, cfg.seed)


@main.command()
@click.option("--n-per-class", type=click.IntRange(min=1), default=None,
              help="Recordings per class (default from config: 20).")
@click.option("--noise-level", type=click.FloatRange(min=0), default=None)
@click.option("--sample-rate", type=click.FloatRange(min_open=True, min=0), default=None)
@click.option("--duration", type=click.FloatRange(min_open=True, min=0), default=None)
@click.pass_context
def synth(ctx, n_per_class, noise_level, sample_rate, duration):
    """Generate a synthetic recording corpus plus its manifest."""
    cfg = _cfg(ctx)
    s = cfg.synth
    out = _out(ctx)
    rec_dir = out / "recordings"
    rec_dir.mkdir(parents=True, exist_ok=True)
    try:
        recordings = synthesize_dataset(
            n_per_class=n_per_class if n_per_class is not None else s.n_per_class,
            profiles=s.profiles,
            noise_level=noise_level if noise_level is not None else s.noise_level,
            sample_rate_hz=sample_rate if sample_rate is not None else s.sample_rate_hz,
            duration_s=duration if duration is not None else s.duration_s,
            seed=cfg.seed,
            channel_names=cfg.channel_names,
            bands=cfg.bands,
        )
        entries = []
        for rec in recordings:
            path = rec_dir / f"{rec.subject_id}.rec"
            save_recording(path, rec)
            entries.append(ManifestEntry(path, rec.label, False))
            click.echo(f"wrote {path}", err=True)
        manifest = out / "manifest.csv"
        write_manifest(manifest, entries)
    except (EegkanError, OSError, ValueError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {manifest}", err=True)


@main.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--with-gender", is_flag=True, default=None,
              help="Append gender as an extra feature column.")
@click.pass_context
def features(ctx, manifest, with_gender):
    """Extract the band-power feature table from a manifest."""
    cfg = _cfg(ctx)
    gender = cfg.with_gender if with_gender is None else with_gender
    out = _out(ctx)
    try:
        dataset = build_dataset(
            manifest,
            channel_names=cfg.channel_names,
            config=_pipeline_config(cfg, gender),
            progress=lambda sid: click.echo(f"extracted {sid}", err=True),
        )
        path = out / "features.csv"
        write_features(path, dataset)
    except (EegkanError, OSError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {path}", err=True)


@main.command(name="train")
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=KIND_CHOICE, default="ann", show_default=True)
@click.option("--epochs", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--lr", type=click.FloatRange(min_open=True, min=0), default=0.01,
              show_default=True)
@click.option("--nodes", type=click.IntRange(min=1), default=16, show_default=True)
@click.pass_context
def train_cmd(ctx, features_csv, kind, epochs, lr, nodes):
    """Train one model on a feature table and checkpoint it."""
    cfg = _cfg(ctx)
    out = _out(ctx)
    try:
        train_set, test_set = _split_features(features_csv, cfg)
        spec = _model_template(cfg, train_set.n_features, kind=kind, nodes=nodes)
        params, report = train(
            spec,
            (train_set.feature_matrix(), train_set.labels()),
            (test_set.feature_matrix(), test_set.labels()),
            epochs=epochs, lr=lr, seed=cfg.seed,
        )
        ckpt = out / f"model-{kind}.ckpt"
        save_checkpoint(ckpt, spec, params, seed=cfg.seed, epoch=epochs)
        summary = report.to_dict()
        summary["param_count"] = param_count(spec)
        summary["n_train"] = len(train_set.rows)
        summary["n_test"] = len(test_set.rows)
        report_path = out / f"train-{kind}.json"
        atomic_write_text(report_path, _json_text(summary))
    except (EegkanError, OSError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {ckpt}", err=True)
    click.echo(f"wrote {report_path}", err=True)
    click.echo(
        f"{kind}: train_loss={report.final_train_loss:.6f} "
        f"test_loss={report.final_test_loss:.6f} "
        f"test_accuracy={report.final_test_accuracy:.4f}"
    )


@main.command(name="sweep")
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--kinds", callback=_str_list, default=None,
              help="Comma-separated subset of ann,kan.")
@click.option("--epochs", callback=_int_list, default=None,
              help="Comma-separated epoch counts.")
@click.option("--lr", callback=_float_list, default=None,
              help="Comma-separated learning rates.")
@click.option("--nodes", callback=_int_list, default=None,
              help="Comma-separated hidden node counts.")
@click.option("--seeds", callback=_int_list, default=None,
              help="Comma-separated training seeds.")
@click.option("--objective", type=click.Choice(["test_loss", "train_loss"]),
              default="test_loss", show_default=True)
@click.pass_context
def sweep_cmd(ctx, features_csv, kinds, epochs, lr, nodes, seeds, objective):
    """Run the hyperparameter grid for both kinds and plot the losses."""
    cfg = _cfg(ctx)
    out = _out(ctx)
    g = cfg.sweep
    try:
        grid = SweepGrid(
            kinds=kinds if kinds is not None else g.kinds,
            epochs_values=epochs if epochs is not None else g.epochs,
            lr_values=lr if lr is not None else g.lr,
            nodes_values=nodes if nodes is not None else g.nodes,
            seeds=seeds if seeds is not None else g.seeds,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        train_set, test_set = _split_features(features_csv, cfg)
        template = _model_template(cfg, train_set.n_features)
        result = run_sweep(
            grid, train_set, test_set, template,
            jobs=ctx.obj["jobs"],
            progress=lambda row: click.echo(
                f"{row.kind} epochs={row.epochs} lr={row.lr:g} nodes={row.nodes} "
                f"seed={row.seed}: {row.status}"
                + (f" test_loss={row.test_loss:.6f}" if row.status == "ok" else ""),
                err=True,
            ),
        )
        csv_path = out / "sweep.csv"
        write_sweep(csv_path, result)
        click.echo(f"wrote {csv_path}", err=True)

        dead = []
        for kind in grid.kinds:
            if not result.successful(kind):
                dead.append(kind)
                continue
            e, l, n, mean_loss = best_config(result, kind, objective=objective)
            best_path = out / f"best-{kind}.json"
            atomic_write_text(best_path, _json_text({
                "kind": kind, "objective": objective,
                "epochs": e, "lr": l, "nodes": n, "mean_loss": mean_loss,
            }))
            svg_path = out / f"loss-vs-lr-{kind}.svg"
            atomic_write_text(svg_path, sweep_loss_chart(result, kind, objective))
            click.echo(f"wrote {best_path}", err=True)
            click.echo(f"wrote {svg_path}", err=True)
            click.echo(
                f"best {kind}: epochs={e} lr={l:g} nodes={n} mean_{objective}={mean_loss:.6f}"
            )
    except (EegkanError, OSError) as exc:
        raise click.ClickException(str(exc))
    if dead:
        raise click.ClickException(
            f"no successful runs for kind(s): {', '.join(dead)}; see {csv_path}"
        )


@main.command()
@click.argument("sweep_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--features", "features_csv", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Feature table used for the sweep; needed to retrain "
                   "the best configs for confusion matrices.")
@click.option("--objective", type=click.Choice(["test_loss", "train_loss"]),
              default="test_loss", show_default=True)
@click.option("--raw-regressors", is_flag=True,
              help="Regress on raw epochs/lr/nodes instead of the "
                   "standardized log-lr design.")
@click.pass_context
def analyze(ctx, sweep_csv, features_csv, objective, raw_regressors):
    """OLS of loss on hyperparameters plus best-config confusion matrices."""
    cfg = _cfg(ctx)
    out = _out(ctx)
    try:
        result = read_sweep(sweep_csv)
        train_set, test_set = _split_features(features_csv, cfg)
        analysis = {}
        for kind in sorted({r.kind for r in result.rows}):
            fit = loss_regression(result, kind, objective=objective,
                                  raw_regressors=raw_regressors)
            e, l, n, mean_loss = best_config(result, kind, objective=objective)
            retrain_seed = min(
                r.seed for r in result.successful(kind)
                if (r.epochs, r.lr, r.nodes) == (e, l, n)
            )
            spec = _model_template(cfg, train_set.n_features, kind=kind, nodes=n)
            params, report = train(
                spec,
                (train_set.feature_matrix(), train_set.labels()),
                (test_set.feature_matrix(), test_set.labels()),
                epochs=e, lr=l, seed=retrain_seed,
            )
            cm = confusion(params, spec, test_set)
            svg_path = out / f"confusion-{kind}.svg"
            atomic_write_text(svg_path, confusion_heatmap(
                cm.counts, cm.class_names,
                f"{kind.upper()} confusion, epochs={e} lr={l:g} nodes={n}",
            ))
            click.echo(f"wrote {svg_path}", err=True)
            analysis[kind] = {
                "ols": fit.to_dict(),
                "best": {"epochs": e, "lr": l, "nodes": n,
                         "mean_loss": mean_loss, "objective": objective,
                         "retrain_seed": retrain_seed},
                "confusion": {
                    "class_names": list(cm.class_names),
                    "counts": cm.counts.tolist(),
                    "accuracy": cm.accuracy(),
                },
                "retrained_test_loss": report.final_test_loss,
                "retrained_test_accuracy": report.final_test_accuracy,
            }
        path = out / "analysis.json"
        atomic_write_text(path, _json_text(analysis))
    except (EegkanError, OSError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {path}", err=True)
    for kind, section in analysis.items():
        click.echo(f"{kind}: r_squared={section['ols']['r_squared']:.6f}")


@main.command()
@click.option("--sweep", "sweep_csv", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sweep CSV (default: <out>/sweep.csv).")
@click.option("--analysis", "analysis_json", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Analysis JSON (default: <out>/analysis.json).")
@click.pass_context
def report(ctx, sweep_csv, analysis_json):
    """Summarize sweep and analysis artifacts into report.json and report.md."""
    out = _out(ctx)
    sweep_path = Path(sweep_csv) if sweep_csv else out / "sweep.csv"
    analysis_path = Path(analysis_json) if analysis_json else out / "analysis.json"
    try:
        if not sweep_path.exists():
            raise click.ClickException(f"missing sweep CSV {sweep_path}; run sweep first")
        if not analysis_path.exists():
            raise click.ClickException(f"missing analysis {analysis_path}; run analyze first")
        result = read_sweep(sweep_path)
        analysis = json.loads(analysis_path.read_text(encoding="utf-8"))

        kinds = sorted(analysis)
        summary = {
            "kinds": {},
            "n_rows": len(result.rows),
            "n_failed": sum(1 for r in result.rows if r.status != "ok"),
        }
        for kind in kinds:
            section = analysis[kind]
            summary["kinds"][kind] = {
                "best": section["best"],
                "r_squared": section["ols"]["r_squared"],
                "test_accuracy": section["confusion"]["accuracy"],
            }
        if {"ann", "kan"} <= set(kinds):
            ann_r2 = analysis["ann"]["ols"]["r_squared"]
            kan_r2 = analysis["kan"]["ols"]["r_squared"]
            summary["r_squared_comparison"] = {
                "ann": ann_r2,
                "kan": kan_r2,
                "ann_minus_kan": ann_r2 - kan_r2,
                "ann_exceeds_kan": ann_r2 > kan_r2,
            }

        json_path = out / "report.json"
        atomic_write_text(json_path, _json_text(summary))

        lines = ["# Experiment report", ""]
        lines.append(f"Sweep rows: {summary['n_rows']} "
                     f"({summary['n_failed']} failed)")
        lines.append("")
        lines.append("| kind | best epochs | best lr | best nodes | mean loss | "
                     "test accuracy | OLS R^2 |")
        lines.append("|------|------------:|--------:|-----------:|----------:|"
                     "--------------:|--------:|")
        for kind in kinds:
            k = summary["kinds"][kind]
            b = k["best"]
            lines.append(
                f"| {kind} | {b['epochs']} | {b['lr']:g} | {b['nodes']} | "
                f"{b['mean_loss']:.6f} | {k['test_accuracy']:.4f} | "
                f"{k['r_squared']:.6f} |"
            )
        if "r_squared_comparison" in summary:
            c = summary["r_squared_comparison"]
            relation = ">" if c["ann_exceeds_kan"] else "<="
            lines.append("")
            lines.append(
                f"Hyperparameters explain more ANN loss variance than KAN loss "
                f"variance: R^2 {c['ann']:.6f} {relation} {c['kan']:.6f}."
            )
        md_path = out / "report.md"
        atomic_write_text(md_path, "\n".join(lines) + "\n")
    except (EegkanError, OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {json_path}", err=True)
    click.echo(f"wrote {md_path}", err=True)
