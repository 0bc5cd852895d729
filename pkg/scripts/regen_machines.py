"""Rewrite src/ipsim/machines/*.vm from the builders in ipsim.zoo."""
from pathlib import Path

from ipsim.core import dump_machine, parse_machine
from ipsim.zoo import bundled_machines

OUT = Path(__file__).resolve().parent.parent / "src" / "ipsim" / "machines"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, spec in bundled_machines().items():
        text = dump_machine(spec)
        parse_machine(text)  # round-trip guard
        (OUT / f"{name}.vm").write_text(text, encoding="utf-8")
        print(f"wrote {name}.vm")


if __name__ == "__main__":
    main()
