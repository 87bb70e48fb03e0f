"""Regenerate tests/golden/*.  Run from the repository root: python3 tests/regen_goldens.py"""

from pathlib import Path

from golden_cases import CASES

from confhess.cli import run


def main() -> None:
    out_dir = Path(__file__).resolve().parent / "golden"
    out_dir.mkdir(exist_ok=True)
    for name, argv in sorted(CASES.items()):
        status, text, _ = run(argv)
        if status != 0:
            raise SystemExit(f"{name}: exit status {status}: {text}")
        suffix = ".csv" if "--csv" in argv else ".json"
        path = out_dir / f"{name}{suffix}"
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
