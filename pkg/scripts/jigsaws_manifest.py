"""Write a skillassess manifest for a JIGSAWS Suturing directory.

    python scripts/jigsaws_manifest.py path/to/Suturing > path/to/Suturing/manifest.csv
    skillassess evaluate --data-dir path/to/Suturing --config jigsaws.json

The config needs ``{"schema": {"columns": [38, 39, 40, 57, 58, 59], "delimiter": null}}``
so the 76-column kinematics files are read correctly.
"""
from __future__ import annotations

import argparse
import sys

from skillassess.ingest import format_manifest
from skillassess.jigsaws import build_metas


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("task_dir")
    p.add_argument("--rule", choices=["grs", "self"], default="grs",
                   help="label by mean GRS per surgeon or by self-reported level")
    p.add_argument("--threshold", type=float,
                   help="GRS cut for experts (default: median of surgeon means)")
    args = p.parse_args(argv)
    sys.stdout.write(format_manifest(build_metas(args.task_dir, args.rule, args.threshold)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
