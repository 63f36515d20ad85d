"""
CLEAR MOT and identity metrics.

Ground truth and hypotheses are matched per frame on IoU. Pairings from the
previous frame are kept while their IoU stays above the threshold; the rest
is assigned with the Hungarian algorithm on `1 - IoU`.
"""
import io
from collections import defaultdict
from typing import Iterable, Mapping, NamedTuple, Protocol, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._exceptions import EvaluationError
from ._models import BBox, TrackOutput, boxes_to_array, iou_matrix

UNMATCHABLE = 2.0


class Identified(Protocol):
    @property
    def id(self) -> int:
        ...

    @property
    def bbox(self) -> BBox:
        ...


Frames = Mapping[int, Sequence[Identified]]


class MetricsReport(NamedTuple):
    mota: float
    motp: float
    idf1: float
    idp: float
    idr: float
    idsw: int
    tp: int
    fp: int
    fn: int
    num_gt: int
    num_hyp: int
    num_frames: int

    @property
    def mota_negative(self) -> bool:
        return self.mota < 0

    def value(self, metric: str) -> float:
        metric = metric.lower()
        if metric not in self._fields:
            raise KeyError(metric)
        return float(getattr(self, metric))


def outputs_by_frame(
    outputs: Iterable[TrackOutput], *, reportable_only: bool = True
) -> dict[int, list[TrackOutput]]:
    frames: dict[int, list[TrackOutput]] = defaultdict(list)
    for out in outputs:
        if out.reportable or not reportable_only:
            frames[out.frame].append(out)
    return dict(frames)


class _Accumulator:
    def __init__(self, iou_threshold: float) -> None:
        self.iou_threshold = iou_threshold
        self.tp = 0
        self.fp = 0
        self.fn = 0
        self.idsw = 0
        self.num_gt = 0
        self.num_hyp = 0
        self.sum_iou = 0.0
        # gt id -> hyp id of its last match.
        self.last_match: dict[int, int] = {}
        # (gt id, hyp id) -> frames where they overlap above threshold.
        self.overlaps: dict[tuple[int, int], int] = defaultdict(int)

    def update(self, gt: Sequence[Identified], hyp: Sequence[Identified]) -> None:
        gt = sorted(gt, key=lambda item: item.id)
        hyp = sorted(hyp, key=lambda item: item.id)
        self.num_gt += len(gt)
        self.num_hyp += len(hyp)

        ious = iou_matrix(
            boxes_to_array([item.bbox for item in gt]),
            boxes_to_array([item.bbox for item in hyp]),
        )
        above = ious >= self.iou_threshold

        for g, p in zip(*np.nonzero(above)):
            self.overlaps[(gt[g].id, hyp[p].id)] += 1

        matches: dict[int, int] = {}
        hyp_index = {item.id: p for p, item in enumerate(hyp)}
        for g, item in enumerate(gt):
            if item.id not in self.last_match:
                continue
            p = hyp_index.get(self.last_match[item.id])
            if p is not None and above[g, p] and p not in matches.values():
                matches[g] = p

        free_gt = [g for g in range(len(gt)) if g not in matches]
        used = set(matches.values())
        free_hyp = [p for p in range(len(hyp)) if p not in used]
        if free_gt and free_hyp:
            sub = ious[np.ix_(free_gt, free_hyp)]
            cost = np.where(sub >= self.iou_threshold, 1.0 - sub, UNMATCHABLE)
            rows, cols = linear_sum_assignment(cost)
            for r, c in zip(rows, cols):
                if cost[r, c] < UNMATCHABLE:
                    matches[free_gt[r]] = free_hyp[c]

        for g, p in matches.items():
            gt_id, hyp_id = gt[g].id, hyp[p].id
            previous = self.last_match.get(gt_id)
            if previous is not None and previous != hyp_id:
                self.idsw += 1
            self.last_match[gt_id] = hyp_id
            self.sum_iou += float(ious[g, p])

        self.tp += len(matches)
        self.fn += len(gt) - len(matches)
        self.fp += len(hyp) - len(matches)

    def identity_true_positives(self) -> int:
        if not self.overlaps:
            return 0
        gt_ids = sorted({g for g, _ in self.overlaps})
        hyp_ids = sorted({h for _, h in self.overlaps})
        counts = np.zeros((len(gt_ids), len(hyp_ids)), dtype=np.int64)
        gt_pos = {g: i for i, g in enumerate(gt_ids)}
        hyp_pos = {h: j for j, h in enumerate(hyp_ids)}
        for (g, h), n in self.overlaps.items():
            counts[gt_pos[g], hyp_pos[h]] = n
        rows, cols = linear_sum_assignment(-counts)
        return int(counts[rows, cols].sum())

    def report(self, num_frames: int) -> MetricsReport:
        errors = self.fn + self.fp + self.idsw
        if self.num_gt > 0:
            mota = 100.0 * (1.0 - errors / self.num_gt)
        else:
            mota = 100.0 if errors == 0 else -100.0 * errors

        motp = 100.0 * self.sum_iou / self.tp if self.tp else 0.0

        idtp = self.identity_true_positives()
        idp = 100.0 * idtp / self.num_hyp if self.num_hyp else 0.0
        idr = 100.0 * idtp / self.num_gt if self.num_gt else 0.0
        total = self.num_gt + self.num_hyp
        idf1 = 100.0 * 2 * idtp / total if total else 100.0

        return MetricsReport(
            mota=mota,
            motp=motp,
            idf1=idf1,
            idp=idp,
            idr=idr,
            idsw=self.idsw,
            tp=self.tp,
            fp=self.fp,
            fn=self.fn,
            num_gt=self.num_gt,
            num_hyp=self.num_hyp,
            num_frames=num_frames,
        )


def evaluate(gt: Frames, hyp: Frames, iou_threshold: float = 0.5) -> MetricsReport:
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"IoU threshold must lie in (0, 1], got {iou_threshold}")

    gt_frames = [frame for frame, items in gt.items() if items]
    hyp_frames = [frame for frame, items in hyp.items() if items]
    if not gt_frames and not hyp_frames:
        return _Accumulator(iou_threshold).report(0)
    if not gt_frames:
        raise EvaluationError("hypotheses given but the ground truth is empty")

    first, last = min(gt_frames), max(gt_frames)
    outside = sorted(f for f in hyp_frames if not first <= f <= last)
    if outside:
        raise EvaluationError(
            f"hypothesis frames {outside[0] + 1}..{outside[-1] + 1} lie outside "
            f"the ground-truth range {first + 1}..{last + 1}"
        )

    acc = _Accumulator(iou_threshold)
    for frame in range(first, last + 1):
        acc.update(gt.get(frame, ()), hyp.get(frame, ()))
    return acc.report(last - first + 1)


COLUMNS = [
    ("MOTA", "mota"),
    ("IDF1", "idf1"),
    ("IDSW", "idsw"),
    ("MOTP", "motp"),
    ("IDP", "idp"),
    ("IDR", "idr"),
    ("TP", "tp"),
    ("FP", "fp"),
    ("FN", "fn"),
    ("GT", "num_gt"),
    ("HYP", "num_hyp"),
    ("FRAMES", "num_frames"),
]


def _cell(value: float) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.2f}"


def format_table(reports: Mapping[str, MetricsReport]) -> str:
    header = [""] + [title for title, _ in COLUMNS]
    rows = [header]
    for name, report in reports.items():
        rows.append([name] + [_cell(getattr(report, key)) for _, key in COLUMNS])

    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    for name, report in reports.items():
        if report.mota_negative:
            lines.append(f"note: {name} MOTA is negative ({report.mota:.2f})")
    return "\n".join(lines) + "\n"


def to_csv(reports: Mapping[str, MetricsReport]) -> str:
    out = io.StringIO()
    keys = [key for _, key in COLUMNS]
    out.write(",".join(["name"] + keys + ["mota_negative"]) + "\n")
    for name, report in reports.items():
        values = [_cell(getattr(report, key)) for key in keys]
        flag = "1" if report.mota_negative else "0"
        out.write(",".join([name] + values + [flag]) + "\n")
    return out.getvalue()
