#!/usr/bin/env python3
"""Regenerate the bench files shipped in hwassure/data from their recipes.

c17 is a verbatim classic and is not touched.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hwassure.benchgen import BUNDLED_RECIPES, build_recipe
from hwassure.netlist import write_bench


def main() -> None:
    out_dir = os.path.join(os.path.dirname(__file__), "..", "src", "hwassure", "data")
    for name in sorted(BUNDLED_RECIPES):
        circuit = build_recipe(name)
        path = os.path.join(out_dir, f"{name}.bench")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {name}: generated benchmark (see hwassure.benchgen)\n")
            fh.write(write_bench(circuit))
        print(f"wrote {path}: {circuit!r}")


if __name__ == "__main__":
    main()
