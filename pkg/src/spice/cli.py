"""Command-line front end.

Subcommands: synth, train-self, select, train-semi, kmeans, eval, pipeline.
Settings resolve in three layers: built-in defaults, then an INI config
file (sections [run], [data], [self], [select], [semi]), then explicit
command-line flags. Every run writes a JSON report whose config echo is
sufficient to reproduce the run; the metrics section is byte-stable for a
fixed seed.

Exit codes: 0 success, 2 configuration/input errors, 3 runtime failures.
"""

from __future__ import annotations

import argparse
import configparser
import copy
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import EmbeddingDataset, load_embeddings, save_embeddings, synth_gmm, TransformConfig
from .errors import (
    ClusterStarvationError,
    ConfigError,
    NumericFailureError,
    ParseError,
    SpiceError,
)
from .head import save_head, load_head
from .kmeans import kmeans
from .metrics import evaluate
from .numeric import make_rng
from .pseudolabel import PseudoLabelConfig
from .reliability import save_reliable, load_reliable, select_reliable, subset_purity
from .selftrain import SelfTrainConfig, train_self, predict
from .semitrain import SemiTrainConfig, train_semi, save_semi_head

_STREAM_SYNTH = 100

_DEFAULTS = {
    "run": {"seed": 0},
    "data": {
        "path": "",
        "format": "binary",
        "k": 10,
        "d": 64,
        "n_per_cluster": 500,
        "sep": 6.0,
        "sigma": 1.0,
    },
    "self": {
        "epochs": 30,
        "heads": 10,
        "r": 0.5,
        "assignment": "overlap",
        "loss": "ds_ce",
        "entropy_weight": 0.0,
        "tce_temperature": 0.2,
        "m": 0,  # 0 = auto: min(N, max(100*k, 1000))
        "m1": 0,  # 0 = whole batch at once
        "m2": 128,
        "lr": 1e-3,
        "optimizer": "adaptive-moments",
        "weak_sigma": 0.0,
        "strong_sigma": -1.0,  # -1 = auto: 0.1 x per-dim feature std
        "dropout": 0.1,
    },
    "select": {"n_s": 100, "tau_c": 0.95},
    "semi": {
        "b": 64,
        "mu": 7,
        "tau": 0.95,
        "epochs": 30,
        "hidden": 512,
        "lr": 1e-3,
        "weak_sigma": -1.0,  # -1 = auto: 0.02 x per-dim feature std
        "strong_sigma": -1.0,
        "dropout": 0.1,
    },
}

# CLI attribute -> (section, key), per subcommand overlay.
_COMMON_OVERLAY = {
    "seed": ("run", "seed"),
    "data": ("data", "path"),
    "data_format": ("data", "format"),
    "k": ("data", "k"),
    "d": ("data", "d"),
    "n_per_cluster": ("data", "n_per_cluster"),
    "sep": ("data", "sep"),
    "sigma": ("data", "sigma"),
    "epochs": ("self", "epochs"),
    "heads": ("self", "heads"),
    "r": ("self", "r"),
    "assignment": ("self", "assignment"),
    "loss": ("self", "loss"),
    "entropy_weight": ("self", "entropy_weight"),
    "m": ("self", "m"),
    "m1": ("self", "m1"),
    "m2": ("self", "m2"),
    "lr": ("self", "lr"),
    "optimizer": ("self", "optimizer"),
    "n_s": ("select", "n_s"),
    "tau_c": ("select", "tau_c"),
    "b": ("semi", "b"),
    "mu": ("semi", "mu"),
    "tau": ("semi", "tau"),
    "semi_epochs": ("semi", "epochs"),
    "hidden": ("semi", "hidden"),
    "semi_lr": ("semi", "lr"),
}


def _convert(raw: str, default, where: str):
    try:
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r}: {exc}") from exc


def load_settings(config_path: str | None) -> dict:
    """Built-in defaults overlaid with an INI config file, if given."""
    settings = copy.deepcopy(_DEFAULTS)
    if not config_path:
        return settings
    cp = configparser.ConfigParser()
    read = cp.read(config_path)
    if not read:
        raise ConfigError(f"config file not found: {config_path}")
    for section in cp.sections():
        if section not in settings:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in cp.items(section):
            if key not in settings[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            settings[section][key] = _convert(
                raw, _DEFAULTS[section][key], f"[{section}] {key}"
            )
    return settings


def overlay_args(settings: dict, args: argparse.Namespace) -> dict:
    for attr, (section, key) in _COMMON_OVERLAY.items():
        value = getattr(args, attr, None)
        if value is not None:
            settings[section][key] = value
    for key in ("assignment", "loss"):
        settings["self"][key] = settings["self"][key].replace("-", "_")
    return settings


def settings_to_ini(settings: dict) -> str:
    """Round-trip helper: render resolved settings as a config file."""
    cp = configparser.ConfigParser()
    for section, values in settings.items():
        cp[section] = {k: repr(v) if isinstance(v, float) else str(v) for k, v in values.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _self_transform_cfg(s: dict) -> TransformConfig:
    strong = None if s["strong_sigma"] < 0 else s["strong_sigma"]
    return TransformConfig(
        weak_noise_sigma=max(s["weak_sigma"], 0.0),
        strong_noise_sigma=strong,
        strong_dropout_rate=s["dropout"],
    )


def _semi_transform_cfg(s: dict) -> TransformConfig | None:
    if s["weak_sigma"] < 0 and s["strong_sigma"] < 0 and s["dropout"] == 0.1:
        return None
    return TransformConfig(
        weak_noise_sigma=max(s["weak_sigma"], 0.0),
        strong_noise_sigma=None if s["strong_sigma"] < 0 else s["strong_sigma"],
        strong_dropout_rate=s["dropout"],
    )


def make_self_config(settings: dict) -> SelfTrainConfig:
    s = settings["self"]
    k = settings["data"]["k"]
    pcfg = PseudoLabelConfig(
        k=k, confident_ratio=s["r"], assignment_mode=s["assignment"]
    )
    return SelfTrainConfig(
        pseudo_cfg=pcfg,
        transform_cfg=_self_transform_cfg(s),
        batch_size=s["m"] or None,
        infer_chunk=s["m1"] or None,
        train_batch=s["m2"],
        epochs=s["epochs"],
        num_heads=s["heads"],
        loss_variant=s["loss"],
        tce_temperature=s["tce_temperature"],
        entropy_weight=s["entropy_weight"],
        optimizer=s["optimizer"],
        learning_rate=s["lr"],
        seed=settings["run"]["seed"],
    )


def make_semi_config(settings: dict) -> SemiTrainConfig:
    s = settings["semi"]
    return SemiTrainConfig(
        labeled_batch=s["b"],
        unlabeled_ratio=s["mu"],
        tau=s["tau"],
        epochs=s["epochs"],
        hidden_width=s["hidden"],
        transform_cfg=_semi_transform_cfg(s),
        learning_rate=s["lr"],
        seed=settings["run"]["seed"],
    )


def get_dataset(settings: dict) -> EmbeddingDataset:
    d = settings["data"]
    if d["path"]:
        return load_embeddings(d["path"], d["format"])
    return synth_gmm(
        k=d["k"],
        d=d["d"],
        n_per_cluster=d["n_per_cluster"],
        center_separation=d["sep"],
        within_sigma=d["sigma"],
        rng=make_rng(settings["run"]["seed"], _STREAM_SYNTH),
    )


def save_labels(path, labels) -> None:
    with open(path, "w") as fh:
        for v in np.asarray(labels, dtype=np.int64):
            fh.write(f"{int(v)}\n")


def load_labels(path):
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(int(line))
        except ValueError as exc:
            raise ParseError(path, f"line {lineno}", f"bad label: {exc}") from exc
    if not out:
        raise ParseError(path, "line 1", "no labels")
    return np.asarray(out, dtype=np.int64)


def _metrics_entry(truth, labels) -> dict:
    if truth is None:
        return {"acc": None, "nmi": None, "ari": None}
    ev = evaluate(truth, labels)
    return {"acc": ev.acc, "nmi": ev.nmi, "ari": ev.ari}


def _write_report(report: dict, out_dir: Path) -> Path:
    path = out_dir / "report.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _print_metrics(tag: str, entry: dict) -> None:
    if entry.get("acc") is None:
        print(f"[{tag}] (no ground-truth labels)")
        return
    print(
        f"[{tag}] acc={entry['acc']:.4f} nmi={entry['nmi']:.4f} ari={entry['ari']:.4f}"
    )


def cmd_synth(args) -> int:
    settings = overlay_args(load_settings(args.config), args)
    settings["data"]["path"] = ""  # synth always generates
    ds = get_dataset(settings)
    out = Path(args.out)
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    save_embeddings(ds, out, args.out_format)
    print(f"wrote {ds.n} x {ds.d} embeddings ({ds.k_hint} clusters) to {out}")
    return 0


def cmd_train_self(args) -> int:
    settings = overlay_args(load_settings(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = get_dataset(settings)
    if settings["data"]["k"] != ds.k_hint and ds.k_hint is not None and args.k is None:
        settings["data"]["k"] = ds.k_hint
    cfg = make_self_config(settings)
    t0 = time.perf_counter()
    result = train_self(ds, cfg)
    elapsed = time.perf_counter() - t0
    save_head(result.pool.best(), out_dir / "head_best.bin")
    save_labels(out_dir / "labels_self.txt", result.labels)
    if not settings["data"]["path"]:
        save_embeddings(ds, out_dir / "dataset.bin", "binary")
    report = {
        "command": "train-self",
        "config": settings,
        "stages": {"train_self": {"wall_time_s": elapsed}},
        "per_head_losses": result.pool.per_head_loss,
        "selected_head": result.pool.selected,
        "epoch_losses": result.epoch_losses,
        "degeneracy_events": len(result.degeneracy_events),
        "metrics": {"self": _metrics_entry(ds.true_labels, result.labels)},
        "artifacts": {
            "head": str(out_dir / "head_best.bin"),
            "labels": str(out_dir / "labels_self.txt"),
        },
    }
    path = _write_report(report, out_dir)
    _print_metrics("self", report["metrics"]["self"])
    print(f"selected head {result.pool.selected}; report: {path}")
    return 0


def cmd_select(args) -> int:
    settings = overlay_args(load_settings(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = get_dataset(settings)
    head = load_head(args.head)
    labels, _ = predict(head, ds)
    rel = select_reliable(
        ds.features,
        labels,
        n_s=settings["select"]["n_s"],
        tau_c=settings["select"]["tau_c"],
        k=head.k,
    )
    save_reliable(rel, out_dir / "reliable.txt")
    save_labels(out_dir / "labels_self.txt", labels)
    info = {
        "n_selected": len(rel),
        "coverage": rel.coverage,
        "per_cluster": [int(c) for c in rel.per_cluster_counts()],
        "starved_clusters": rel.starved_clusters,
    }
    report = {
        "command": "select",
        "config": settings,
        "reliable": info,
        "artifacts": {"reliable": str(out_dir / "reliable.txt")},
    }
    path = _write_report(report, out_dir)
    print(
        f"selected {len(rel)}/{rel.n_total} samples "
        f"(coverage {rel.coverage:.3f}); report: {path}"
    )
    if rel.starved:
        print(f"warning: clusters {rel.starved_clusters} have no reliable samples")
    return 0


def cmd_train_semi(args) -> int:
    settings = overlay_args(load_settings(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = get_dataset(settings)
    rel = load_reliable(args.reliable, n_total=ds.n)
    cfg = make_semi_config(settings)
    t0 = time.perf_counter()
    result = train_semi(ds, rel, cfg)
    elapsed = time.perf_counter() - t0
    save_semi_head(result.model, out_dir / "semi_head.bin")
    save_labels(out_dir / "labels_semi.txt", result.labels)
    report = {
        "command": "train-semi",
        "config": settings,
        "stages": {"train_semi": {"wall_time_s": elapsed}},
        "epoch_losses": result.epoch_losses,
        "metrics": {"semi": _metrics_entry(ds.true_labels, result.labels)},
        "artifacts": {
            "semi_head": str(out_dir / "semi_head.bin"),
            "labels": str(out_dir / "labels_semi.txt"),
        },
    }
    path = _write_report(report, out_dir)
    _print_metrics("semi", report["metrics"]["semi"])
    print(f"report: {path}")
    return 0


def cmd_kmeans(args) -> int:
    settings = overlay_args(load_settings(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = get_dataset(settings)
    # explicit --k wins; otherwise trust labeled data, else the config value
    if args.k is None and ds.k_hint is not None:
        settings["data"]["k"] = ds.k_hint
    k = settings["data"]["k"]
    rng = make_rng(settings["run"]["seed"], 50)
    result = kmeans(
        ds,
        k,
        max_iter=args.max_iter,
        n_init=args.n_init,
        rng=rng,
        normalize=args.normalize,
    )
    save_labels(out_dir / "labels_kmeans.txt", result.labels)
    report = {
        "command": "kmeans",
        "config": settings,
        "kmeans": {"inertia": result.inertia, "iterations": result.iterations},
        "metrics": {"kmeans": _metrics_entry(ds.true_labels, result.labels)},
        "artifacts": {"labels": str(out_dir / "labels_kmeans.txt")},
    }
    path = _write_report(report, out_dir)
    _print_metrics("kmeans", report["metrics"]["kmeans"])
    print(f"inertia={result.inertia:.6g}; report: {path}")
    return 0


def cmd_eval(args) -> int:
    settings = overlay_args(load_settings(args.config), args)
    ds = get_dataset(settings)
    if ds.true_labels is None:
        raise ConfigError("eval needs a dataset with ground-truth labels")
    labels = load_labels(args.labels)
    if labels.shape[0] != ds.n:
        raise ConfigError(
            f"labels file has {labels.shape[0]} entries for {ds.n} samples"
        )
    entry = _metrics_entry(ds.true_labels, labels)
    print(json.dumps({args.name: entry}, indent=2, sort_keys=True))
    return 0


def cmd_pipeline(args) -> int:
    settings = overlay_args(load_settings(args.config), args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stages: dict[str, dict] = {}
    metrics: dict[str, dict | None] = {}

    ds = get_dataset(settings)
    if not settings["data"]["path"]:
        save_embeddings(ds, out_dir / "dataset.bin", "binary")
    if ds.k_hint is not None and args.k is None:
        settings["data"]["k"] = ds.k_hint

    cfg = make_self_config(settings)
    t0 = time.perf_counter()
    self_result = train_self(ds, cfg)
    stages["train_self"] = {"wall_time_s": time.perf_counter() - t0}
    save_head(self_result.pool.best(), out_dir / "head_best.bin")
    save_labels(out_dir / "labels_self.txt", self_result.labels)
    metrics["self"] = _metrics_entry(ds.true_labels, self_result.labels)

    t0 = time.perf_counter()
    rel = select_reliable(
        ds.features,
        self_result.labels,
        n_s=settings["select"]["n_s"],
        tau_c=settings["select"]["tau_c"],
        k=settings["data"]["k"],
    )
    stages["select"] = {"wall_time_s": time.perf_counter() - t0}
    save_reliable(rel, out_dir / "reliable.txt")
    reliable_info = {
        "n_selected": len(rel),
        "coverage": rel.coverage,
        "per_cluster": [int(c) for c in rel.per_cluster_counts()],
        "starved_clusters": rel.starved_clusters,
    }
    if ds.true_labels is not None and len(rel) > 0:
        mapping = _metrics_mapping(ds.true_labels, self_result.labels)
        mapped = np.array([mapping.get(int(c), -1) for c in rel.labels])
        reliable_info["purity"] = float(
            np.mean(mapped == ds.true_labels[rel.indices])
        )

    semi_skipped = None
    if rel.starved or len(rel) == 0:
        semi_skipped = (
            f"clusters without reliable samples: {rel.starved_clusters}"
            if rel.starved
            else "empty reliable set"
        )
        metrics["semi"] = None
    else:
        semi_cfg = make_semi_config(settings)
        t0 = time.perf_counter()
        semi_result = train_semi(ds, rel, semi_cfg)
        stages["train_semi"] = {"wall_time_s": time.perf_counter() - t0}
        save_semi_head(semi_result.model, out_dir / "semi_head.bin")
        save_labels(out_dir / "labels_semi.txt", semi_result.labels)
        metrics["semi"] = _metrics_entry(ds.true_labels, semi_result.labels)

    report = {
        "command": "pipeline",
        "config": settings,
        "stages": stages,
        "per_head_losses": self_result.pool.per_head_loss,
        "selected_head": self_result.pool.selected,
        "degeneracy_events": len(self_result.degeneracy_events),
        "reliable": reliable_info,
        "semi_skipped": semi_skipped,
        "metrics": metrics,
        "artifacts": {
            "out_dir": str(out_dir),
            "head": str(out_dir / "head_best.bin"),
            "reliable": str(out_dir / "reliable.txt"),
        },
    }
    path = _write_report(report, out_dir)
    _print_metrics("self", metrics["self"])
    if metrics["semi"] is not None:
        _print_metrics("semi", metrics["semi"])
    elif semi_skipped:
        print(f"[semi] skipped: {semi_skipped}")
    print(f"report: {path}")
    return 0


def _metrics_mapping(truth, labels) -> dict:
    from .metrics import accuracy

    _, mapping = accuracy(truth, labels)
    return mapping


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spice",
        description="Progressive self/semi-supervised clustering on embedding features.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, out_dir=True):
        sp.add_argument("--config", help="INI config file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--data", default=None, help="embeddings file (omit to synthesize)")
        sp.add_argument(
            "--data-format", default=None, choices=("binary", "csv"), dest="data_format"
        )
        if out_dir:
            sp.add_argument("--out-dir", default="spice-out", dest="out_dir")

    def add_synth_params(sp):
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--d", type=int, default=None)
        sp.add_argument("--n-per-cluster", type=int, default=None, dest="n_per_cluster")
        sp.add_argument("--sep", type=float, default=None)
        sp.add_argument("--sigma", type=float, default=None)

    sp = sub.add_parser("synth", help="generate a synthetic labeled embedding file")
    sp.add_argument("--config", help="INI config file")
    sp.add_argument("--seed", type=int, default=None)
    add_synth_params(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--out-format", default="binary", choices=("binary", "csv"))
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("train-self", help="multi-head pseudo-label self-training")
    add_common(sp)
    add_synth_params(sp)
    sp.add_argument("--epochs", type=int, default=None)
    sp.add_argument("--heads", type=int, default=None)
    sp.add_argument("--r", type=float, default=None, help="confident ratio")
    sp.add_argument(
        "--assignment", default=None, choices=("overlap", "non-overlap", "non_overlap")
    )
    sp.add_argument("--loss", default=None, choices=("ds-ce", "ds_ce", "ce", "tce"))
    sp.add_argument("--entropy-weight", type=float, default=None, dest="entropy_weight")
    sp.add_argument("--m", type=int, default=None, help="pseudo-label batch size")
    sp.add_argument("--m1", type=int, default=None, help="forward chunk size")
    sp.add_argument("--m2", type=int, default=None, help="gradient minibatch size")
    sp.add_argument("--lr", type=float, default=None)
    sp.add_argument("--optimizer", default=None, choices=("adaptive-moments", "sgd-momentum"))
    sp.set_defaults(func=cmd_train_self)

    sp = sub.add_parser("select", help="pick the reliable subset from a trained head")
    add_common(sp)
    add_synth_params(sp)
    sp.add_argument("--head", required=True, help="head checkpoint from train-self")
    sp.add_argument("--n-s", type=int, default=None, dest="n_s")
    sp.add_argument("--tau-c", type=float, default=None, dest="tau_c")
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("train-semi", help="semi-supervised boosting from a reliable set")
    add_common(sp)
    add_synth_params(sp)
    sp.add_argument("--reliable", required=True, help="reliable set file from select")
    sp.add_argument("--b", type=int, default=None, help="labeled batch size")
    sp.add_argument("--mu", type=int, default=None, help="unlabeled:labeled ratio")
    sp.add_argument("--tau", type=float, default=None, help="confidence gate")
    sp.add_argument("--epochs", type=int, default=None, dest="semi_epochs")
    sp.add_argument("--hidden", type=int, default=None)
    sp.add_argument("--lr", type=float, default=None, dest="semi_lr")
    sp.set_defaults(func=cmd_train_semi)

    sp = sub.add_parser("kmeans", help="k-means baseline on the same features")
    add_common(sp)
    add_synth_params(sp)
    sp.add_argument("--n-init", type=int, default=10, dest="n_init")
    sp.add_argument("--max-iter", type=int, default=100, dest="max_iter")
    sp.add_argument("--normalize", action="store_true")
    sp.set_defaults(func=cmd_kmeans)

    sp = sub.add_parser("eval", help="score a labels file against ground truth")
    add_common(sp, out_dir=False)
    add_synth_params(sp)
    sp.add_argument("--labels", required=True, help="one predicted label per line")
    sp.add_argument("--name", default="eval", help="metrics key in the output")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("pipeline", help="synth/load -> train-self -> select -> train-semi -> eval")
    add_common(sp)
    add_synth_params(sp)
    sp.add_argument("--epochs", type=int, default=None)
    sp.add_argument("--heads", type=int, default=None)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument(
        "--assignment", default=None, choices=("overlap", "non-overlap", "non_overlap")
    )
    sp.add_argument("--loss", default=None, choices=("ds-ce", "ds_ce", "ce", "tce"))
    sp.add_argument("--entropy-weight", type=float, default=None, dest="entropy_weight")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--m2", type=int, default=None)
    sp.add_argument("--lr", type=float, default=None)
    sp.add_argument("--n-s", type=int, default=None, dest="n_s")
    sp.add_argument("--tau-c", type=float, default=None, dest="tau_c")
    sp.add_argument("--b", type=int, default=None)
    sp.add_argument("--mu", type=int, default=None)
    sp.add_argument("--tau", type=float, default=None)
    sp.add_argument("--semi-epochs", type=int, default=None, dest="semi_epochs")
    sp.add_argument("--hidden", type=int, default=None)
    sp.set_defaults(func=cmd_pipeline)

    return p


def cli_main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ClusterStarvationError, NumericFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SpiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
