"""Write the dense coding families (and their forbidden refinements) as JSON files.

    python scripts/make_family_files.py [outdir]

The files feed ``histloc check-family``.
"""

import sys
from pathlib import Path

from histloc.scenarios import dense_f2_family, dense_f3_family

FAMILIES = {
    "f2.json": lambda: dense_f2_family(),
    "f2_with_b_at_t8.json": lambda: dense_f2_family(b_at_t8=True),
    "f3.json": lambda: dense_f3_family(),
    "f3_c_z_at_t7.json": lambda: dense_f3_family(c_z_at_t7=True),
}


def main(outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for name, make in FAMILIES.items():
        path = outdir / name
        path.write_text(make().to_json(sort_keys=True) + "\n")
        print(f"wrote {path} ({path.stat().st_size // 1024} KiB)")


if __name__ == "__main__":
    default = Path(__file__).resolve().parent.parent / "data" / "families"
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else default)
