"""swarmforge command line: ingest, synth, featurize, split, eval, run."""

from __future__ import annotations

import argparse
import sys

from .errors import SwarmForgeError
from .pipeline import (
    EvalSpec,
    FeatureSpec,
    IngestSpec,
    RunConfig,
    SplitSpec,
    StageLog,
    SynthSpec,
    run_eval,
    run_featurize,
    run_ingest,
    run_pipeline,
    run_split,
    run_synth,
    write_run_config,
)


def _parse_floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None, help="stage seed (default: config seed or 0)")
    sub.add_argument("--config", default=None, help="RunConfig file (.json or .toml) used as defaults")
    sub.add_argument("--jobs", type=int, default=1, help="parallel workers (output is bit-identical)")
    sub.add_argument("--json", action="store_true", help="machine-readable JSON log lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmforge",
        description="Deterministic synthetic mosquito-swarm audio toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a chunk bank from per-species sources")
    p.add_argument("--src", required=True, help="directory with <SPECIES_CODE>/*.wav subfolders")
    p.add_argument("--bank", required=True, help="bank output directory")
    _common(p)

    p = sub.add_parser("synth", help="generate a labeled synthetic swarm dataset")
    p.add_argument("--bank", required=True)
    p.add_argument("--out", required=True, help="dataset output directory")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--mode", choices=["detailed", "eq3"], default="detailed")
    p.add_argument("--window-s", type=float, default=5.0)
    p.add_argument("--chunks-min", type=int, default=None)
    p.add_argument("--chunks-max", type=int, default=None)
    p.add_argument("--max-species", type=int, default=None)
    p.add_argument("--snr-min", type=float, default=20.0)
    p.add_argument("--snr-max", type=float, default=40.0)
    _common(p)

    p = sub.add_parser("featurize", help="render log-mel spectrogram PNGs for a dataset")
    p.add_argument("--in", dest="dataset", required=True, help="dataset directory (with manifest.jsonl)")
    p.add_argument("--out", default=None, help="feature output root (default: dataset directory)")
    p.add_argument("--n-mels", type=int, default=128)
    p.add_argument("--img", type=int, default=224)
    p.add_argument("--fft-size", type=int, default=512)
    p.add_argument("--window-len", type=int, default=400)
    p.add_argument("--hop", type=int, default=160)
    p.add_argument("--f-min", type=float, default=0.0)
    p.add_argument("--f-max", type=float, default=8000.0)
    p.add_argument("--floor-db", type=float, default=-80.0)
    _common(p)

    p = sub.add_parser("split", help="stratified train/val/test split on label cardinality")
    p.add_argument("--manifest", required=True)
    p.add_argument("--ratios", type=_parse_floats, default=(0.70, 0.15, 0.15))
    p.add_argument(
        "--group-by-source",
        action="store_true",
        help="reserved: source-grouped splitting to avoid chunk leakage (not implemented)",
    )
    _common(p)

    p = sub.add_parser("eval", help="score a predictions CSV against manifest labels")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pred", required=True, help="predictions CSV")
    p.add_argument("--split", default="TEST", help="TRAIN, VAL, TEST, or ALL")
    p.add_argument("--taus", type=_parse_floats, default=(0.3, 0.5, 0.7))
    p.add_argument("--report", default=None, help="write the report JSON here")
    _common(p)

    p = sub.add_parser("run", help="run every configured stage in order")
    p.add_argument("--out", default=None, help="override the config's dataset directory")
    p.add_argument("--force", action="store_true", help="re-run stages even if up to date")
    _common(p)

    return parser


def _base_config(args) -> RunConfig | None:
    return RunConfig.load(args.config) if args.config else None


def _dispatch(args, log: StageLog) -> None:
    base = _base_config(args)
    if args.command == "ingest":
        config = RunConfig(
            out=base.out if base else ".",
            bank=args.bank,
            seed=args.seed if args.seed is not None else (base.seed if base else 0),
            jobs=args.jobs,
            ingest=IngestSpec(src=args.src, seed=args.seed),
        )
        run_ingest(config, log, force=True)
        write_run_config(config, args.bank)

    elif args.command == "synth":
        spec = SynthSpec(
            count=args.count,
            seed=args.seed,
            mode=args.mode,
            window_s=args.window_s,
            chunks_min=args.chunks_min,
            chunks_max=args.chunks_max,
            max_species=args.max_species,
            snr_min_db=args.snr_min,
            snr_max_db=args.snr_max,
        )
        config = RunConfig(
            out=args.out,
            bank=args.bank,
            seed=args.seed if args.seed is not None else (base.seed if base else 0),
            jobs=args.jobs,
            synth=spec,
        )
        run_synth(config, log, force=True)
        write_run_config(config, args.out)

    elif args.command == "featurize":
        spec = FeatureSpec(
            fft_size=args.fft_size,
            window_len=args.window_len,
            hop=args.hop,
            n_mels=args.n_mels,
            f_min=args.f_min,
            f_max=args.f_max,
            floor_db=args.floor_db,
            image_size=args.img,
        )
        config = RunConfig(out=args.dataset, bank=".", jobs=args.jobs, features=spec)
        from .pipeline import featurize_dataset

        updated = featurize_dataset(args.dataset, spec, jobs=args.jobs, out_dir=args.out)
        log.emit("featurize", "done", images=len(updated))

    elif args.command == "split":
        if args.group_by_source:
            raise SwarmForgeError(
                "--group-by-source is reserved but not implemented; "
                "the default chunk-level split can leak source material across splits"
            )
        from .store import read_manifest, split_counts, stratified_split, write_manifest

        records = read_manifest(args.manifest)
        seed = args.seed if args.seed is not None else 0
        updated, _ = stratified_split(records, args.ratios, seed)
        write_manifest(updated, args.manifest)
        log.emit("split", "done", **split_counts(updated))

    elif args.command == "eval":
        from .pipeline import evaluate_predictions
        import json as _json

        payload = evaluate_predictions(args.manifest, args.pred, args.split, args.taus)
        if args.report:
            with open(args.report, "w") as f:
                _json.dump(payload, f, indent=1)
                f.write("\n")
        for rep in payload["reports"]:
            log.emit(
                "eval",
                "report",
                tau=rep["tau"],
                accuracy=round(rep["multilabel_accuracy"], 4),
                macro_f1=round(rep["macro_f1"], 4),
                macro_precision=round(rep["macro_precision"], 4),
                macro_recall=round(rep["macro_recall"], 4),
            )

    elif args.command == "run":
        if base is None:
            raise SwarmForgeError("run requires --config with the stage sections to execute")
        if args.out is not None:
            base = RunConfig.from_json({**base.to_json(), "out": args.out})
        if args.seed is not None:
            base = RunConfig.from_json({**base.to_json(), "seed": args.seed})
        if args.jobs != 1:
            base = RunConfig.from_json({**base.to_json(), "jobs": args.jobs})
        run_pipeline(base, log, force=args.force)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log = StageLog(as_json=args.json)
    try:
        _dispatch(args, log)
    except (SwarmForgeError, FileNotFoundError, ValueError) as exc:
        stage = args.command
        log.emit(stage, "error", message=str(exc))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
