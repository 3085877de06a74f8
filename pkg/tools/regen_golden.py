"""Rewrite the golden surface files and their checksums.

Run after an intentional change to a transcription; the test suite
compares freshly built examples against these files.
"""

import json
from pathlib import Path

from flatsys.extremal import NAMES, golden_checksum, named_example
from flatsys.surface import save_surface

DATA = Path(__file__).resolve().parents[1] / "src" / "flatsys" / "data"


def main():
    sums = {}
    for name in NAMES:
        s = named_example(name)
        save_surface(s, DATA / f"{name}.tsf")
        sums[name] = golden_checksum(s)
    (DATA / "checksums.json").write_text(json.dumps(sums, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
