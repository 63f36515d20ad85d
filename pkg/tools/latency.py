"""
Measure the median per-frame latency of the tracker on synthetic frames.
"""

import argparse
import statistics
import time

from gentrack import Tracker, TrackerConfig, Variant, generate
from gentrack._synth import Scenario, TargetSpec


def make_scenario(size: int, targets: int, frames: int) -> Scenario:
    lane = size / (targets + 1)
    specs = []
    for k in range(targets):
        v = lane * (k + 1)
        path = ((40.0, v), (size - 40.0, v))
        if k % 2:
            path = path[::-1]
        specs.append(TargetSpec(0, frames, path, (32, 48), 300 + k))
    return Scenario(width=size, height=size, duration=frames, targets=tuple(specs))


def measure(cfg: TrackerConfig, scenario: Scenario) -> list[float]:
    tracker = Tracker(cfg)
    timings = []
    for frame in generate(scenario).frame_inputs():
        start = time.perf_counter()
        tracker.step(frame)
        timings.append(time.perf_counter() - start)
    return timings


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--variant", default="basic", choices=[v.value for v in Variant])
    parser.add_argument("--particles", type=int, default=8)
    parser.add_argument("--targets", type=int, default=10)
    parser.add_argument("--size", type=int, default=640)
    parser.add_argument("--frames", type=int, default=60)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    cfg = TrackerConfig(
        variant=Variant(args.variant), particles=args.particles, workers=args.workers
    )
    scenario = make_scenario(args.size, args.targets, args.frames)
    # The first frame only spawns tracks.
    timings = measure(cfg, scenario)[1:]

    median_ms = 1000 * statistics.median(timings)
    print(
        f"{args.variant}: {args.targets} targets, S={cfg.swarm_size}, "
        f"{args.size}x{args.size}: median {median_ms:.2f} ms over {len(timings)} frames"
    )
