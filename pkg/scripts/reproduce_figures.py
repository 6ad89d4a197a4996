"""Write every figure dataset (fig3a, fig3b, fig4, fig5) into one directory."""

import argparse

from heraldshape.figures import FIGURES, reproduce_figure
from heraldshape.io import Units


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/figures")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--unit", default="t_c")
    ap.add_argument("--tc", type=float, default=1.0)
    args = ap.parse_args()
    for fig in FIGURES:
        path = reproduce_figure(fig, args.out, args.format, Units(args.unit, args.tc))
        print(path)


if __name__ == "__main__":
    main()
