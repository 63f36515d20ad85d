import argparse
import logging
import operator
import pathlib
import re
import sys
from typing import Any, Callable, NamedTuple, Optional

from ._config import TrackerConfig, Variant
from ._eval import MetricsReport, evaluate, format_table, outputs_by_frame, to_csv
from ._exceptions import (
    ConfigErrors,
    EvaluationError,
    FrameOrderError,
    ParseErrors,
    SequenceError,
)
from ._io import (
    annotate,
    list_frames,
    read_config,
    read_detections,
    read_image,
    read_tracks,
    write_pgm,
    write_results,
)
from ._models import FrameInput, TrackOutput
from ._synth import PRESETS, generate, preset, write_scenario
from ._tracker import Tracker, track_sequence

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2

COMPARISONS: dict[str, Callable[[float, float], bool]] = {
    ">=": operator.ge,
    "<=": operator.le,
}


class Assertion(NamedTuple):
    metric: str
    op: str
    value: float

    def check(self, report: MetricsReport) -> bool:
        return COMPARISONS[self.op](report.value(self.metric), self.value)

    def __str__(self) -> str:
        return f"{self.metric}{self.op}{self.value:g}"


def parse_assertion(text: str) -> Assertion:
    m = re.fullmatch(r"\s*([A-Za-z_0-9]+)\s*(>=|<=)\s*(\S+)\s*", text)
    if m is None:
        raise argparse.ArgumentTypeError(
            f"invalid assertion {text!r} (expected METRIC>=VALUE or METRIC<=VALUE)"
        )
    metric, op, raw = m.groups()
    if metric.lower() not in MetricsReport._fields:
        raise argparse.ArgumentTypeError(f"unknown metric {metric!r}")
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid threshold {raw!r}")
    return Assertion(metric.lower(), op, value)


def main() -> None:
    cli = CLI()
    ret = cli.main(sys.argv[1:])
    sys.exit(ret)


class CLI:
    def main(self, argv: list[str]) -> int:
        parser = self._make_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_USAGE if exc.code else EXIT_OK

        self._configure_logging(args.verbose)

        try:
            return args.handler(args)
        except ConfigErrors as exc:
            for c_exc in exc.errors:
                self._report(str(c_exc), lineno=c_exc.lineno)
        except ParseErrors as exc:
            for p_exc in exc.errors:
                self._report(p_exc.message, lineno=p_exc.lineno)
        except (SequenceError, EvaluationError, FrameOrderError) as exc:
            self._report(exc.message)
        except (OSError, ValueError) as exc:
            self._report(str(exc))
        return EXIT_USAGE

    def _make_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog="gentrack")
        parser.add_argument(
            "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
        )
        commands = parser.add_subparsers(dest="command", required=True)

        track = commands.add_parser("track", help="track an image sequence")
        track.add_argument("--frames", required=True, type=pathlib.Path)
        track.add_argument("--dets", required=True, type=pathlib.Path)
        track.add_argument("--config", required=True, type=pathlib.Path)
        track.add_argument("--out", required=True, type=pathlib.Path)
        track.add_argument("--variant", choices=[v.value for v in Variant])
        track.add_argument("--seed", type=int)
        track.add_argument("--workers", type=int)
        track.add_argument("--annotate", type=pathlib.Path)
        track.set_defaults(handler=self.track)

        synth = commands.add_parser("synth", help="write a synthetic scenario")
        synth.add_argument("--preset", required=True, choices=sorted(PRESETS))
        synth.add_argument("--out", required=True, type=pathlib.Path)
        synth.add_argument("--seed", type=int, default=0)
        synth.set_defaults(handler=self.synth)

        scoring = commands.add_parser("eval", help="score tracks against truth")
        scoring.add_argument("--gt", required=True, type=pathlib.Path)
        scoring.add_argument("--hyp", required=True, type=pathlib.Path)
        self._add_metric_options(scoring)
        scoring.set_defaults(handler=self.score)

        bench = commands.add_parser("bench", help="compare variants on a preset")
        bench.add_argument("--preset", required=True, choices=sorted(PRESETS))
        bench.add_argument("--seeds", type=int, default=1)
        bench.add_argument("--seed", type=int, default=0)
        bench.add_argument("--config", type=pathlib.Path)
        self._add_metric_options(bench)
        bench.set_defaults(handler=self.bench)

        return parser

    def _add_metric_options(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--iou-thresh", type=float, default=0.5)
        parser.add_argument("--csv", type=pathlib.Path)
        parser.add_argument(
            "--assert",
            dest="assertions",
            action="append",
            default=[],
            type=parse_assertion,
            metavar="METRIC>=VALUE",
        )

    def _configure_logging(self, verbosity: int) -> None:
        level = logging.WARNING
        if verbosity == 1:
            level = logging.INFO
        elif verbosity >= 2:
            level = logging.DEBUG
        logging.basicConfig(
            level=level,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )

    def _load_config(
        self, path: Optional[pathlib.Path], **overrides: Any
    ) -> TrackerConfig:
        cfg = read_config(path) if path is not None else TrackerConfig()
        given = {key: value for key, value in overrides.items() if value is not None}
        if given:
            cfg = cfg.with_overrides(**given)
            cfg.validate()
        return cfg

    def track(self, args: argparse.Namespace) -> int:
        variant = Variant(args.variant) if args.variant is not None else None
        cfg = self._load_config(
            args.config, variant=variant, seed=args.seed, workers=args.workers
        )
        paths = list_frames(args.frames)
        detections = read_detections(args.dets)
        beyond = [frame for frame in detections if frame >= len(paths)]
        if beyond:
            logger.warning("ignoring detections past the last frame: %d", len(beyond))

        if args.annotate is not None:
            args.annotate.mkdir(parents=True, exist_ok=True)

        tracker = Tracker(cfg)
        outputs: list[TrackOutput] = []
        for index, path in enumerate(paths):
            image = read_image(path)
            frame = FrameInput(index, image, tuple(detections.get(index, ())))
            step_outputs = tracker.step(frame)
            outputs.extend(out for out in step_outputs if out.reportable)
            if args.annotate is not None:
                unmatched = tracker.state.unmatched_detections
                canvas = annotate(image, step_outputs, unmatched)
                write_pgm(args.annotate / path.with_suffix(".pgm").name, canvas)

        write_results(args.out, outputs)
        logger.info(
            "tracked %d frames: %d boxes, %d ids",
            len(paths),
            len(outputs),
            len({out.id for out in outputs}),
        )
        return EXIT_OK

    def synth(self, args: argparse.Namespace) -> int:
        sequence = generate(preset(args.preset, seed=args.seed))
        write_scenario(args.out, sequence)
        logger.info(
            "wrote %s (%d frames) to %s", args.preset, len(sequence.frames), args.out
        )
        return EXIT_OK

    def score(self, args: argparse.Namespace) -> int:
        gt = read_tracks(args.gt)
        hyp = read_tracks(args.hyp)
        reports = {args.hyp.name: evaluate(gt, hyp, args.iou_thresh)}
        return self._publish(reports, args)

    def bench(self, args: argparse.Namespace) -> int:
        base = self._load_config(args.config)
        reports = {}
        for seed in range(args.seed, args.seed + args.seeds):
            sequence = generate(preset(args.preset, seed=seed))
            frames = sequence.frame_inputs()
            for variant in Variant:
                cfg = base.with_overrides(variant=variant, seed=seed)
                cfg.validate()
                outputs = track_sequence(cfg, frames)
                report = evaluate(
                    sequence.ground_truth, outputs_by_frame(outputs), args.iou_thresh
                )
                reports[f"{variant.value}/seed={seed}"] = report
        return self._publish(reports, args)

    def _publish(
        self, reports: dict[str, MetricsReport], args: argparse.Namespace
    ) -> int:
        print(format_table(reports), end="")
        if args.csv is not None:
            args.csv.write_text(to_csv(reports))

        failed = False
        for name, report in reports.items():
            for assertion in args.assertions:
                if not assertion.check(report):
                    actual = report.value(assertion.metric)
                    message = f"{name}: assertion {assertion} failed ({actual:g})"
                    print(message, file=sys.stderr)
                    failed = True
        return EXIT_ASSERTION if failed else EXIT_OK

    def _report(self, message: str, *, lineno: Optional[int] = None) -> None:
        where = f"[line {lineno}] " if lineno is not None else ""
        print(f"{where}error: {message}", file=sys.stderr)
