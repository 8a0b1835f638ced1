#!/usr/bin/env python3
"""Full calibration battery: 100 seeded repetitions of the derangement,
Spearman, and sample-frequency tests under the hash-counter generator,
written out as a JSON report."""

import argparse
from pathlib import Path

from randaudit.audit import calibration


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", default="calibration-v1")
    parser.add_argument("--repetitions", type=int, default=100)
    parser.add_argument("--out", type=Path, default=Path("calibration_report.json"))
    args = parser.parse_args()

    report = calibration(args.seed, repetitions=args.repetitions)
    args.out.write_text(report.to_json() + "\n", encoding="utf-8")
    rej = report.observed["rejections"]
    print(
        f"rejections: {report.observed['rejections_total']} "
        f"(derangement={rej['derangement']}, spearman={rej['spearman']}, "
        f"sample_frequency={rej['sample_frequency']}) "
        f"over {3 * args.repetitions} tests at alpha={report.config['alpha']}"
    )
    print(f"passed: {report.passed}  report: {args.out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
