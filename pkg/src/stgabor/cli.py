"""Command-line front end: kernel dumps, single convolutions, tuning curves,
batch feature extraction, and cross-validated classification.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.

Every subcommand accepts ``--config FILE``, a flat ``key = value`` text file
('#' starts a comment). Keys are the subcommand's long option names with
dashes replaced by underscores. Precedence: command-line flags, then config
file, then built-in defaults.
"""

import argparse
import csv
import hashlib
import multiprocessing
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as volio
from .classify import METRICS, CvReport, LabeledDataset, cross_validate
from .convolve import BACKENDS, ConvolutionOptions, convolve
from .errors import (
    DataFormatError,
    IncompatibleFeaturesError,
    InvalidParameterError,
    NumericError,
    StgaborError,
)
from .features import (
    BankConfig,
    NORMALIZATIONS,
    config_fingerprint,
    direction_grid,
    extract_features,
    speed_grid,
)
from .kernel import (
    ENVELOPE_MODES,
    FilterParams,
    KernelSupport,
    default_support,
    derive_params,
    sample_kernel,
)
from .stimuli import StimulusSpec, direction_tuning, speed_tuning
from .volume import Volume

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

DIRECTION_COUNTS = (4, 8)

# Enforced after the config merge so a --config file can supply them.
REQUIRED_OPTIONS = {
    "kernel": ("v", "theta", "out"),
    "convolve": ("video", "kernel", "out"),
    "tune": ("axis", "out"),
    "extract": ("manifest", "out", "speeds"),
    "classify": ("features",),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for a batch extraction run."""

    bank: BankConfig
    opts: ConvolutionOptions
    normalize: str
    manifest: Path
    output: Path
    pattern: str
    count: int | None
    crop: tuple | None
    jobs: int


def _parse_speeds(text: str) -> tuple[float, ...]:
    """Speed grid: 'start:stop:step' or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            return speed_grid(start, stop, step)
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise InvalidParameterError(f"cannot parse speeds {text!r}") from None


def _parse_extent(text: str) -> tuple[int, int, int]:
    try:
        w, h, t = (int(part) for part in text.lower().split("x"))
        return (w, h, t)
    except ValueError:
        raise InvalidParameterError(
            f"cannot parse extent {text!r}, expected WxHxT"
        ) from None


def _parse_crop(text: str):
    """Crop ranges 'X0:X1,Y0:Y1,T0:T1'; empty bounds keep the full axis."""
    parts = text.split(",")
    if len(parts) != 3:
        raise InvalidParameterError(f"cannot parse crop {text!r}")
    ranges = []
    for part in parts:
        bounds = part.split(":")
        if len(bounds) != 2:
            raise InvalidParameterError(f"cannot parse crop range {part!r}")
        lo = int(bounds[0]) if bounds[0] else None
        hi = int(bounds[1]) if bounds[1] else None
        ranges.append((lo, hi))
    return tuple(ranges)


def _load_video_arg(path_str: str, pattern: str, count: int | None,
                    crop) -> Volume:
    path = Path(path_str)
    if path.is_dir():
        video = volio.load_video(
            volio.FrameSequenceSource(path, pattern=pattern, count=count)
        )
    else:
        video = volio.load_volume(path)
    if crop:
        slices = tuple(slice(lo, hi) for lo, hi in crop)
        video = Volume(video.data[slices], origin=video.origin)
    return video


def _params_fingerprint(params: FilterParams) -> str:
    return hashlib.sha256(repr(params).encode("ascii")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_kernel(args) -> int:
    params = derive_params(args.v, args.theta, args.phi, args.envelope)
    if args.sigma is not None:
        from dataclasses import replace
        params = replace(params, sigma=args.sigma)
    if args.halfwidth is not None or args.frames is not None:
        base = default_support(params)
        support = KernelSupport(
            args.halfwidth if args.halfwidth is not None else base.spatial_halfwidth,
            args.frames if args.frames is not None else base.temporal_length,
        )
    else:
        support = default_support(params)
    vol = sample_kernel(params, support)
    out = Path(args.out)
    volio.save_volume(vol, out)
    fingerprint = _params_fingerprint(params)
    for t in range(vol.frames):
        slice_path = out.with_name(f"{out.stem}_t{t:03d}.txt")
        np.savetxt(
            slice_path,
            vol.data[:, :, t].T,  # rows are y, columns are x
            fmt="%.17g",
            header=(
                f"config_fingerprint={fingerprint} t={t} v={params.v!r} "
                f"theta={params.theta!r} phi={params.phi!r} v_c={params.v_c!r} "
                f"sigma={params.sigma!r} wavelength={params.wavelength!r}"
            ),
        )
    print(f"kernel {vol.shape[0]}x{vol.shape[1]}x{vol.shape[2]} "
          f"origin {vol.origin} -> {out} (+{vol.frames} slice files)")
    print(f"config_fingerprint={fingerprint}")
    return EXIT_OK


def _cmd_convolve(args) -> int:
    video = _load_video_arg(args.video, args.pattern, args.count, args.crop)
    kernel = volio.load_volume(args.kernel)
    opts = ConvolutionOptions(backend=args.backend)
    result = convolve(video, kernel, opts)
    volio.save_volume(result, args.out)
    print(f"convolved {video.shape} with {kernel.shape} -> {args.out}")
    return EXIT_OK


def _cmd_tune(args) -> int:
    if args.axis == "direction":
        kind = args.stim_kind or "bar"
        stim_speed = args.stim_speed if args.stim_speed is not None else 1.0
        spec = StimulusSpec(kind, args.stim_direction, stim_speed,
                            geometry=args.geometry, extent=args.extent)
        directions = direction_grid(args.directions)
        curve = direction_tuning(args.filter_speed, directions, spec,
                                 args.envelope)
        bank = BankConfig(speeds=(args.filter_speed,), directions=directions,
                          envelope_mode=args.envelope)
    else:
        kind = args.stim_kind or "edge"
        stim_speed = args.stim_speed if args.stim_speed is not None else 2.0
        spec = StimulusSpec(kind, args.stim_direction, stim_speed,
                            geometry=args.geometry, extent=args.extent)
        speeds = _parse_speeds(args.speeds)
        curve = speed_tuning(args.filter_direction, speeds, spec,
                             args.envelope)
        bank = BankConfig(speeds=speeds, directions=(args.filter_direction,),
                          envelope_mode=args.envelope)

    fingerprint = config_fingerprint(bank)
    with open(args.out, "w", newline="") as fh:
        fh.write(f"# config_fingerprint={fingerprint}\n")
        fh.write(
            f"# stimulus kind={spec.kind} direction={spec.direction!r} "
            f"speed={spec.speed!r} geometry={spec.geometry!r} "
            f"extent={spec.extent[0]}x{spec.extent[1]}x{spec.extent[2]} "
            f"contrast={spec.contrast[0]!r}/{spec.contrast[1]!r} "
            f"envelope={args.envelope}\n"
        )
        writer = csv.writer(fh)
        writer.writerow([curve.axis, "energy"])
        for param, value in curve.samples:
            writer.writerow([repr(param), repr(value)])
    peak = curve.argmax()
    print(f"{curve.axis} tuning: {len(curve.samples)} samples, "
          f"peak at {peak:g} -> {args.out}")
    return EXIT_OK


def _read_manifest(path: Path) -> list[tuple[str, str]]:
    entries = []
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise DataFormatError(f"cannot open manifest {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        for record in reader:
            if not record or (record[0].startswith("#")):
                continue
            if [field.strip() for field in record[:2]] == ["path", "label"]:
                continue  # optional header row
            if len(record) != 2:
                raise DataFormatError(
                    f"{path}: line {reader.line_num}: expected 'path,label', "
                    f"got {len(record)} fields"
                )
            entries.append((record[0].strip(), record[1].strip()))
    if not entries:
        raise DataFormatError(f"{path}: manifest lists no videos")
    return entries


def _extract_one(task):
    """Worker for one video; returns (source, values or None, error or None)."""
    source, pattern, count, crop, bank, normalize, backend = task
    try:
        video = _load_video_arg(source, pattern, count, crop)
        vector = extract_features(video, bank,
                                  ConvolutionOptions(backend=backend),
                                  normalize)
        return source, vector.values.tolist(), None
    except (StgaborError, OSError) as exc:
        return source, None, str(exc)


def _cmd_extract(args) -> int:
    bank = BankConfig(
        speeds=_parse_speeds(args.speeds),
        directions=direction_grid(args.directions),
        envelope_mode=args.envelope,
    )
    config = RunConfig(
        bank=bank,
        opts=ConvolutionOptions(backend=args.backend),
        normalize=args.normalize,
        manifest=Path(args.manifest),
        output=Path(args.out),
        pattern=args.pattern,
        count=args.count,
        crop=args.crop,
        jobs=args.jobs,
    )
    fingerprint = config_fingerprint(config.bank, config.normalize)
    columns = volio.feature_column_names(config.bank)
    entries = _read_manifest(config.manifest)

    done: dict[str, list[float]] = {}
    if config.output.exists():
        old_fp, old_columns, old_rows = volio.read_features_csv(config.output)
        if old_fp != fingerprint or old_columns != columns:
            raise DataFormatError(
                f"{config.output}: existing file was produced by a different "
                f"configuration (fingerprint {old_fp}, expected {fingerprint}); "
                "remove it or choose another output path"
            )
        done = {source: values.tolist() for source, _, values in old_rows}

    pending = [
        (source, config.pattern, config.count, config.crop, config.bank,
         config.normalize, args.backend)
        for source, _ in entries if source not in done
    ]
    if pending:
        if config.jobs > 1:
            with multiprocessing.Pool(config.jobs) as pool:
                results = pool.map(_extract_one, pending)
        else:
            results = [_extract_one(task) for task in pending]
    else:
        results = []

    failures = [(source, error) for source, _, error in results if error]
    for source, values, error in results:
        if error is None:
            done[source] = values

    rows = [(source, label, done[source])
            for source, label in entries if source in done]
    volio.write_features_csv(config.output, fingerprint, columns, rows)

    print(f"extracted {len(rows)}/{len(entries)} videos "
          f"({len(entries) - len(pending)} reused) -> {config.output}")
    print(f"config_fingerprint={fingerprint}")
    if failures:
        for source, error in failures:
            print(f"FAILED {source}: {error}", file=sys.stderr)
        print(f"{len(failures)} video(s) failed", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def _format_report(report: CvReport) -> str:
    return (f"{100.0 * report.mean_accuracy:.2f}"
            f"({100.0 * report.std_dev:.2f})")


def _cmd_classify(args) -> int:
    try:
        items = volio.features_from_csv(args.features)
        data = LabeledDataset(tuple(items))
    except InvalidParameterError as exc:
        raise DataFormatError(f"{args.features}: {exc}") from None
    report = cross_validate(data, folds=args.folds, seed=args.seed,
                            metric=args.metric, zscore=args.zscore)

    confusion_out = (Path(args.confusion_out) if args.confusion_out
                     else Path(str(args.features) + ".confusion.csv"))
    with open(confusion_out, "w", newline="") as fh:
        fh.write(f"# config_fingerprint={data.fingerprint}\n")
        writer = csv.writer(fh)
        writer.writerow(["true\\predicted", *report.class_labels])
        for label, row in zip(report.class_labels, report.confusion):
            writer.writerow([label, *[int(n) for n in row]])

    print(_format_report(report))
    print("fold accuracies: "
          + " ".join(f"{a:.4f}" for a in report.fold_accuracies))
    print(f"folds={len(report.fold_accuracies)} seed={report.seed} "
          f"stratified={'yes' if report.stratified else 'no'} "
          f"metric={report.metric} zscore={'yes' if report.zscore else 'no'}")
    print(f"confusion matrix -> {confusion_out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parsers():
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="flat key=value file supplying option defaults")

    parser = _Parser(
        prog="stgabor",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}

    p = sub.add_parser("kernel", parents=[common], allow_abbrev=False,
                       help="synthesize one filter kernel to a volume file "
                            "plus per-frame text slices")
    p.add_argument("--v", type=float, help="speed, pixels/frame (required)")
    p.add_argument("--theta", type=float, help="direction, radians (required)")
    p.add_argument("--phi", type=float, default=0.0, help="carrier phase, radians")
    p.add_argument("--envelope", choices=ENVELOPE_MODES, default="moving")
    p.add_argument("--sigma", type=float, default=None,
                   help="override the derived envelope width")
    p.add_argument("--halfwidth", type=int, default=None,
                   help="override the spatial half-width of the grid")
    p.add_argument("--frames", type=int, default=None,
                   help="override the temporal length of the grid")
    p.add_argument("--out", help="output .vol path (required)")
    p.set_defaults(func=_cmd_kernel)
    parsers["kernel"] = p

    p = sub.add_parser("convolve", parents=[common], allow_abbrev=False,
                       help="convolve one video with one kernel volume")
    p.add_argument("--video",
                   help=".vol file or directory of numbered frames (required)")
    p.add_argument("--kernel", help="kernel .vol file (required)")
    p.add_argument("--pattern", default="frame_%04d.png",
                   help="frame filename pattern for directory inputs")
    p.add_argument("--count", type=int, default=None,
                   help="expected frame count for directory inputs")
    p.add_argument("--crop", type=_parse_crop, default=None,
                   metavar="X0:X1,Y0:Y1,T0:T1")
    p.add_argument("--backend", choices=BACKENDS, default="auto")
    p.add_argument("--out", help="output .vol path (required)")
    p.set_defaults(func=_cmd_convolve)
    parsers["convolve"] = p

    p = sub.add_parser("tune", parents=[common], allow_abbrev=False,
                       help="emit a tuning curve as two-column CSV")
    p.add_argument("--axis", choices=("direction", "speed"),
                   help="tuning axis (required)")
    p.add_argument("--stim-kind", choices=("bar", "edge", "grating"),
                   default=None, help="default: bar for direction, edge for speed")
    p.add_argument("--stim-direction", type=float, default=0.0)
    p.add_argument("--stim-speed", type=float, default=None,
                   help="default: 1 for direction axis, 2 for speed axis")
    p.add_argument("--geometry", type=float, default=None,
                   help="bar width / edge polarity / grating wavelength")
    p.add_argument("--extent", type=_parse_extent, default=(64, 64, 16),
                   metavar="WxHxT")
    p.add_argument("--filter-speed", type=float, default=1.0,
                   help="filter speed for the direction axis")
    p.add_argument("--filter-direction", type=float, default=0.0,
                   help="filter direction for the speed axis")
    p.add_argument("--directions", type=int, choices=DIRECTION_COUNTS, default=8,
                   help="direction count for the direction axis")
    p.add_argument("--speeds", default="0.5:4.0:0.5",
                   help="speed sweep for the speed axis: start:stop:step or list")
    p.add_argument("--envelope", choices=ENVELOPE_MODES, default="moving")
    p.add_argument("--out", help="output CSV path (required)")
    p.set_defaults(func=_cmd_tune)
    parsers["tune"] = p

    p = sub.add_parser("extract", parents=[common], allow_abbrev=False,
                       help="extract feature vectors for every video in a manifest")
    p.add_argument("--manifest",
                   help="CSV of path,label rows; paths are .vol files or frame "
                        "directories (required)")
    p.add_argument("--out", help="output feature CSV (required)")
    p.add_argument("--speeds",
                   help="bank speeds: start:stop:step or comma list (required)")
    p.add_argument("--directions", type=int, choices=DIRECTION_COUNTS, default=8)
    p.add_argument("--envelope", choices=ENVELOPE_MODES, default="moving")
    p.add_argument("--normalize", choices=NORMALIZATIONS, default="none")
    p.add_argument("--backend", choices=BACKENDS, default="auto")
    p.add_argument("--pattern", default="frame_%04d.png")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--crop", type=_parse_crop, default=None,
                   metavar="X0:X1,Y0:Y1,T0:T1")
    p.add_argument("--jobs", type=int, default=1,
                   help="videos processed in parallel")
    p.set_defaults(func=_cmd_extract)
    parsers["extract"] = p

    p = sub.add_parser("classify", parents=[common], allow_abbrev=False,
                       help="10-fold nearest-neighbor evaluation of a feature CSV")
    p.add_argument("--features", help="feature CSV from extract (required)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", choices=METRICS, default="euclidean")
    p.add_argument("--zscore", action="store_true",
                   help="standardize dimensions using training folds only")
    p.add_argument("--confusion-out", default=None,
                   help="confusion matrix CSV (default: <features>.confusion.csv)")
    p.set_defaults(func=_cmd_classify)
    parsers["classify"] = p

    return parser, parsers


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataFormatError(f"cannot read config {path}: {exc}") from None
    for num, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataFormatError(f"{path}: line {num}: expected key = value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _explicit_on_cli(argv: list[str], option_strings) -> bool:
    for opt in option_strings:
        for arg in argv:
            if arg == opt or arg.startswith(opt + "="):
                return True
    return False


def _apply_config(args, argv: list[str], subparser) -> None:
    config = _load_config_file(args.config)
    actions = {action.dest: action for action in subparser._actions}
    for key, raw in config.items():
        if key == "config":
            continue
        action = actions.get(key)
        if action is None:
            raise _UsageError(
                f"config key {key!r} is not an option of this subcommand"
            )
        if _explicit_on_cli(argv, action.option_strings):
            continue  # flags beat the config file
        if isinstance(action, (argparse._StoreTrueAction,
                               argparse._StoreFalseAction)):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif action.choices is not None and all(
                isinstance(c, int) for c in action.choices):
            value = int(raw)
        elif action.type is not None:
            value = action.type(raw)
        else:
            value = raw
        if action.choices is not None and value not in action.choices:
            raise _UsageError(
                f"config key {key!r}: {value!r} is not one of "
                f"{tuple(action.choices)}"
            )
        setattr(args, key, value)


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser, parsers = _build_parsers()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            _apply_config(args, list(argv), parsers[args.command])
        missing = [dest for dest in REQUIRED_OPTIONS[args.command]
                   if getattr(args, dest) is None]
        if missing:
            raise _UsageError(
                f"stgabor {args.command}: missing required option(s): "
                + " ".join(f"--{d.replace('_', '-')}" for d in missing)
            )
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, IncompatibleFeaturesError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
