"""Translated overlap of windowed heralded shapes against an interior reference.

Shows where heralded shapes are identical up to translation (interior
heralds) and where the window edges distort them.
"""

import argparse

import numpy as np

from heraldshape.filters import lorentzian
from heraldshape.heralding import apply_filter, conditional_shape, translated_overlap
from heraldshape.io import write_table
from heraldshape.sources import FiniteWindowExponential, default_window_grid, joint_amplitude


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tu", type=float, default=150.0)
    ap.add_argument("--tm", type=float, default=10.0)
    ap.add_argument("--step", type=float, default=0.125)
    ap.add_argument("--every", type=float, default=1.0, help="herald spacing")
    ap.add_argument("--out", default="out/shape_invariance")
    args = ap.parse_args()

    model = FiniteWindowExponential(1.0, args.tu)
    joint = joint_amplitude(model, default_window_grid(model, args.step))
    filtered = apply_filter(joint, lorentzian(args.tm))
    ref = conditional_shape(filtered, round(2 * args.tu / 3 / args.step) * args.step)
    heralds = np.arange(0.0, args.tu + args.step / 2, args.every)
    overlaps = np.array([translated_overlap(ref, conditional_shape(filtered, h)) for h in heralds])
    for h, o in zip(heralds, overlaps):
        print(f"{h:8.3f}  {o:.6f}")
    print(write_table(args.out, ["herald", "overlap"], [heralds, overlaps]))


if __name__ == "__main__":
    main()
