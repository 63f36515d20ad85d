from .config import parse_config, read_config
from .detections import (
    TrackRecord,
    format_number,
    read_detections,
    read_tracks,
    write_detections,
    write_ground_truth,
    write_results,
)
from .images import list_frames, load_frames, natural_key, read_image, write_pgm
from .render import annotate

__all__ = [
    "annotate",
    "format_number",
    "list_frames",
    "load_frames",
    "natural_key",
    "parse_config",
    "read_config",
    "read_detections",
    "read_image",
    "read_tracks",
    "TrackRecord",
    "write_detections",
    "write_ground_truth",
    "write_pgm",
    "write_results",
]
