"""Numerical peak excitation versus eps = t_m/t_c, next to the closed forms.

For each eps the closed-form CW heralded shape drives an atom whose
lifetime is matched to the filter; the table lists the numerical p_max, its
time, e/(e+1/2) and the heralding probability (2e+1)/(e+1)^2.
"""

import argparse
import warnings

import numpy as np

from heraldshape.atom import AtomModel, excitation_curve, p_max_closed_form
from heraldshape.heralding import cw_conditional_shape, cw_heralding_probability
from heraldshape.io import write_table
from heraldshape.numerics import ComplexEnvelope
from heraldshape.scenario import cw_grid


def sweep(eps_values, step: float = 0.125):
    rows = []
    for eps in eps_values:
        g = cw_grid(0.0, 1.0, eps, step=min(step, eps / 16))
        psi = ComplexEnvelope(g, cw_conditional_shape(g.times, 0.0, 1.0, eps)).normalized()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            curve = excitation_curve(psi, AtomModel(eps))
        rows.append((eps, curve.p_max, curve.t_peak, p_max_closed_form(eps),
                     cw_heralding_probability(1.0, eps)))
    return np.array(rows)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, nargs="*",
                    default=[0.5, 1, 2, 5, 10, 20, 50, 100])
    ap.add_argument("--step", type=float, default=0.125)
    ap.add_argument("--out", default="out/sweep_epsilon")
    args = ap.parse_args()
    data = sweep(args.eps, args.step)
    cols = ["epsilon", "p_max_numeric", "t_peak", "p_max", "R"]
    print("  ".join(f"{c:>13}" for c in cols))
    for row in data:
        print("  ".join(f"{v:13.6g}" for v in row))
    print(write_table(args.out, cols, data.T))


if __name__ == "__main__":
    main()
