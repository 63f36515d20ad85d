"""
MOT-style CSV files.

Every line reads `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z`.
Frames are 1-indexed on disk and 0-indexed in memory; boxes are corner form
on disk and center form in memory.
"""
import logging
import pathlib
from collections import defaultdict
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .._exceptions import ParseError, ParseErrors
from .._models import BBox, Detection, TrackOutput

logger = logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]

MIN_COLUMNS = 7
TRAILER = "-1,-1,-1"


class TrackRecord(NamedTuple):
    frame: int
    id: int
    bbox: BBox
    conf: float = 1.0


def format_number(value: float) -> str:
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    if text in ("-0", ""):
        return "0"
    return text


def _format_line(frame: int, id: int, bbox: BBox, conf: float) -> str:
    left, top, width, height = bbox.to_corners()
    fields = [str(frame + 1), str(id)] + [
        format_number(x) for x in (left, top, width, height, conf)
    ]
    return ",".join(fields) + "," + TRAILER + "\n"


def _parse_line(line: str, lineno: int) -> TrackRecord:
    parts = [part.strip() for part in line.split(",")]
    if len(parts) < MIN_COLUMNS:
        raise ParseError(
            lineno, f"expected at least {MIN_COLUMNS} columns, got {len(parts)}"
        )

    try:
        frame = int(float(parts[0]))
        id = int(float(parts[1]))
        left, top, width, height, conf = (float(x) for x in parts[2:7])
    except ValueError:
        raise ParseError(lineno, f"non-numeric field in {line.strip()!r}")

    if frame < 1:
        raise ParseError(lineno, f"frame numbers start at 1, got {frame}")
    if not (width > 0 and height > 0):
        raise ParseError(
            lineno, f"box size must be positive, got {width:g}x{height:g}"
        )

    bbox = BBox.from_corners(left, top, width, height)
    return TrackRecord(frame=frame - 1, id=id, bbox=bbox, conf=conf)


def _parse_file(path: PathLike) -> list[tuple[int, TrackRecord]]:
    records = []
    errors = []

    text = pathlib.Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            records.append((lineno, _parse_line(line, lineno)))
        except ParseError as exc:
            errors.append(exc)

    if errors:
        raise ParseErrors(errors)

    return records


def read_detections(path: PathLike) -> dict[int, list[Detection]]:
    detections: dict[int, list[Detection]] = defaultdict(list)
    for lineno, record in _parse_file(path):
        conf = record.conf
        if not 0.0 <= conf <= 1.0:
            clamped = min(1.0, max(0.0, conf))
            logger.warning(
                "line %d: confidence %g clamped to %g", lineno, conf, clamped
            )
            conf = clamped
        detections[record.frame].append(Detection(record.bbox, conf))
    return dict(detections)


def read_tracks(path: PathLike) -> dict[int, list[TrackRecord]]:
    tracks: dict[int, list[TrackRecord]] = defaultdict(list)
    for _, record in _parse_file(path):
        tracks[record.frame].append(record)
    return dict(tracks)


def write_results(path: PathLike, outputs: Iterable[TrackOutput]) -> None:
    ordered = sorted(outputs, key=lambda out: (out.frame, out.id))
    with open(path, "w", newline="") as f:
        for out in ordered:
            f.write(_format_line(out.frame, out.id, out.bbox, 1.0 - out.penalty))


def write_ground_truth(path: PathLike, records: Iterable[TrackRecord]) -> None:
    ordered = sorted(records, key=lambda record: (record.frame, record.id))
    with open(path, "w", newline="") as f:
        for record in ordered:
            f.write(_format_line(record.frame, record.id, record.bbox, record.conf))


def write_detections(
    path: PathLike, detections: Mapping[int, Sequence[Detection]]
) -> None:
    with open(path, "w", newline="") as f:
        for frame in sorted(detections):
            for det in detections[frame]:
                f.write(_format_line(frame, -1, det.bbox, det.conf))
