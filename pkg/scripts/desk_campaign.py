"""Run the desk-scale campaign on the vendored datasets and print the tables.

    python scripts/desk_campaign.py --config configs/desk.cfg
"""

import argparse
import logging

from bdscv.bench import CampaignConfig, emit, run_campaign


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/desk.cfg")
    ap.add_argument("--strip-timing", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    report = run_campaign(CampaignConfig.from_file(args.config))
    for path in emit(report, strip_timing=args.strip_timing):
        print("wrote", path)
    print("\nlowest-EPE / lowest-variance wins")
    for row in report.wins():
        print(f"  {row['classifier']:14s} {row['procedure']:16s} {row['epe_wins']:3d} {row['variance_wins']:3d}")
    print("\ngroup means (Average = mean of group means)")
    for row in report.table4():
        if row["group"] == "Average":
            v = "n/a" if row["value"] is None else f"{100 * row['value']:.2f}%"
            print(f"  {row['panel']} {row['comparison']:22s} {row['classifier']:14s} {row['metric']:13s} {v}")
    if report.failures:
        print("\nfailed cells:", *report.failures, sep="\n  ")


if __name__ == "__main__":
    main()
