"""Command-line front end.

Subcommands: augment, gen-scene, estimate, metrics, verify.
Exit codes: 0 success, 1 augmentation/verification failure, 2 usage error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import shutil
import sys

import numpy as np

from . import io as foa_io
from .channels_first import apply_channels_first
from .doa import (
    DEFAULT_ACTIVITY_THRESHOLD,
    doa_error,
    estimate_doa,
    estimates_from_labels,
    estimates_to_labels,
    frame_recall,
)
from .errors import FoaAugmentError, LabelFileError, NoCoactiveFramesError, ScenarioError, WavError
from .labels_first import ElevationMode, ElevationRangePolicy, apply_labels_first
from .patterns import apply_pattern, random_pattern
from .scene import build_scene, parse_scenario, scenario_length

log = logging.getLogger("foa_augment")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
METHODS = ("patterns16", "labels_first", "channels_first")
AUG_SUFFIX = "_aug1"
DEFAULT_ELEVATION_LIMITS = {"label-range": (-40.0, 40.0), "fixed-range": (-20.0, 20.0)}


class UsageError(Exception):
    pass


def file_seed(seed: int, name: str) -> int:
    """64-bit per-file seed; independent of processing order."""
    digest = hashlib.sha256(f"{seed}\x00{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def _probability(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("probability must be in [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foa-augment", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    aug = sub.add_parser("augment", help="augment every (wav, csv) pair in a directory")
    aug.add_argument("--method", choices=METHODS, required=True)
    aug.add_argument("--probability", type=_probability, default=0.5)
    aug.add_argument("--seed", type=int, default=0)
    aug.add_argument("--elevation-mode", choices=sorted(DEFAULT_ELEVATION_LIMITS), default="label-range")
    aug.add_argument("--elevation-min", type=float, help="degrees")
    aug.add_argument("--elevation-max", type=float, help="degrees")
    aug.add_argument("--in", dest="input_dir", required=True)
    aug.add_argument("--out", dest="output_dir", required=True)
    aug.add_argument("--manifest", help="default: <out>/manifest.json")

    gen = sub.add_parser("gen-scene", help="render a scenario file to a (wav, csv) fixture")
    gen.add_argument("--in", dest="scenario", required=True)
    gen.add_argument("--out", dest="output", required=True, help="output path without extension")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--sample-rate", type=int, default=foa_io.DEFAULT_SAMPLE_RATE)
    gen.add_argument("--length", type=float, help="seconds; default: end of the last source")
    gen.add_argument("--frame-hop-ms", type=float, default=foa_io.DEFAULT_FRAME_HOP_MS)

    est = sub.add_parser("estimate", help="intensity-vector DOA estimate of a wav file")
    est.add_argument("--in", dest="wav", required=True)
    est.add_argument("--out", dest="csv", required=True)
    est.add_argument("--frame-hop-ms", type=float, default=foa_io.DEFAULT_FRAME_HOP_MS)
    est.add_argument("--threshold", type=float, default=DEFAULT_ACTIVITY_THRESHOLD)

    met = sub.add_parser("metrics", help="DOA error and frame recall of an estimate")
    met.add_argument("--in", dest="estimate", required=True, help="estimated label csv")
    met.add_argument("--ref", required=True, help="reference label csv")
    met.add_argument("--jsonl", action="store_true", help="also print a JSON record line")

    ver = sub.add_parser("verify", help="run the oracle-equivalence suite on synthetic scenes")
    ver.add_argument("--scenes", type=int, default=100)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--jsonl", action="store_true")
    return parser


def _policy(args) -> ElevationRangePolicy:
    low, high = DEFAULT_ELEVATION_LIMITS[args.elevation_mode]
    low = low if args.elevation_min is None else args.elevation_min
    high = high if args.elevation_max is None else args.elevation_max
    if low > high:
        raise UsageError("--elevation-min exceeds --elevation-max")
    return ElevationRangePolicy(ElevationMode(args.elevation_mode), math.radians(low), math.radians(high))


def _augment_one(method, policy, sig, labels, rng):
    """Apply ``method``; returns (signal, labels, manifest fields)."""
    if method == "patterns16":
        p = random_pattern(rng)
        out, new = apply_pattern(sig, labels, p)
        return out, new, {"pattern": str(p)}
    if method == "labels_first":
        out, new, draw = apply_labels_first(sig, labels, policy, rng)
        return out, new, {"alpha_deg": math.degrees(draw.alpha), "beta_deg": math.degrees(draw.beta)}
    out, new, r = apply_channels_first(sig, labels, rng)
    return out, new, {"rotation": [format(float(v), ".17g") for v in r.ravel()]}


def cmd_augment(args) -> int:
    policy = _policy(args)
    if not os.path.isdir(args.input_dir):
        raise FileNotFoundError(f"input directory {args.input_dir!r} not found")
    os.makedirs(args.output_dir, exist_ok=True)
    same_dir = os.path.samefile(args.input_dir, args.output_dir)
    pairs = foa_io.pair_files(args.input_dir)
    entries = []
    failed = 0
    for stem, wav_path, csv_path in pairs:
        seed = file_seed(args.seed, stem)
        rng = np.random.default_rng(seed)
        entry = {"input": os.path.basename(wav_path), "labels": os.path.basename(csv_path), "seed": seed}
        outputs = []
        if not same_dir:
            for src in (wav_path, csv_path):
                shutil.copyfile(src, os.path.join(args.output_dir, os.path.basename(src)))
                outputs.append(os.path.basename(src))
        if rng.random() < args.probability:
            sig = foa_io.read_foa_wav(wav_path)
            labels = foa_io.read_labels_csv(csv_path)
            try:
                out, new, fields = _augment_one(args.method, policy, sig, labels, rng)
            except FoaAugmentError as exc:
                log.error("%s: %s", stem, exc)
                entry.update(method="none", error=str(exc))
                failed += 1
            else:
                wav_name, csv_name = stem + AUG_SUFFIX + ".wav", stem + AUG_SUFFIX + ".csv"
                foa_io.write_foa_wav(out, os.path.join(args.output_dir, wav_name))
                foa_io.write_labels_csv(new, os.path.join(args.output_dir, csv_name), sig.sample_rate)
                outputs += [wav_name, csv_name]
                entry.update(method=args.method, **fields)
        else:
            entry["method"] = "none"
        entry["outputs"] = outputs
        entries.append(entry)

    manifest = {
        "method": args.method,
        "probability": args.probability,
        "seed": args.seed,
        "elevation_policy": {
            "mode": policy.mode.value,
            "min_deg": math.degrees(policy.range_min),
            "max_deg": math.degrees(policy.range_max),
        },
        "files": entries,
    }
    manifest_path = args.manifest or os.path.join(args.output_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    augmented = sum(e["method"] != "none" for e in entries)
    log.info("%d of %d files augmented with %s", augmented, len(entries), args.method)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_gen_scene(args) -> int:
    with open(args.scenario, encoding="utf-8") as fh:
        scenario = parse_scenario(fh.read())
    if args.length is not None:
        length = int(round(args.length * args.sample_rate))
    else:
        length = scenario_length(scenario, args.sample_rate)
    if length <= 0:
        raise UsageError("scene length is zero; give --length or a source")
    rng = np.random.default_rng(args.seed)
    sig, labels = build_scene(scenario, args.sample_rate, length, args.frame_hop_ms / 1000.0, rng)
    parent = os.path.dirname(args.output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    foa_io.write_foa_wav(sig, args.output + ".wav")
    foa_io.write_labels_csv(labels, args.output + ".csv", args.sample_rate)
    return EXIT_OK


def cmd_estimate(args) -> int:
    if not args.frame_hop_ms > 0:
        raise UsageError("--frame-hop-ms must be positive")
    sig = foa_io.read_foa_wav(args.wav)
    hop = args.frame_hop_ms / 1000.0
    est = estimate_doa(sig, hop, args.threshold)
    foa_io.write_labels_csv(estimates_to_labels(est, hop), args.csv, sig.sample_rate)
    return EXIT_OK


def cmd_metrics(args) -> int:
    est = estimates_from_labels(foa_io.read_labels_csv(args.estimate))
    ref = foa_io.read_labels_csv(args.ref)
    fr = frame_recall(est, ref)
    try:
        er = doa_error(est, ref)
    except NoCoactiveFramesError:
        er = float("nan")
    print(f"{'Er(deg)':>10} {'FR(%)':>10}")
    print(f"{er:10.4f} {100.0 * fr:10.4f}")
    if args.jsonl:
        print(json.dumps({"doa_error_deg": None if math.isnan(er) else er, "frame_recall": fr}))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run_all

    if args.scenes < 1:
        raise UsageError("--scenes must be at least 1")
    results = run_all(args.seed, args.scenes)
    for r in results:
        print(r.line())
        if args.jsonl:
            print(json.dumps({"check": r.name, "passed": r.passed, "worst": r.worst, "tolerance": r.tolerance}))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


COMMANDS = {
    "augment": cmd_augment,
    "gen-scene": cmd_gen_scene,
    "estimate": cmd_estimate,
    "metrics": cmd_metrics,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"foa-augment: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, WavError, LabelFileError, ScenarioError) as exc:
        print(f"foa-augment: {exc}", file=sys.stderr)
        return EXIT_IO
    except FoaAugmentError as exc:
        print(f"foa-augment: {exc}", file=sys.stderr)
        return EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
