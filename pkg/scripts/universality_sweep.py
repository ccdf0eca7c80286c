"""Whole-window averages of mu_t(Delta) for random finite models.

Cases I and II should return |Delta| for every model and interval; case III
depends on the model.
"""
import argparse

import numpy as np

from herglotz_flow import fixtures as fx
from herglotz_flow.averaging import global_average
from herglotz_flow.rankone import universality_check
from herglotz_flow.sl2 import BOOST, ROTATION, UNIPOTENT


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--models", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--T-cut", type=float, default=1e4)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    print("model,interval,width,eigen_sweep,unipotent,rotation,boost")
    for k in range(args.models):
        model = fx.random_model(rng)
        lo, hi = np.sort(rng.uniform(-4, 4, size=2))
        iv = (float(lo), float(hi))
        sweep = universality_check(model, iv, args.T_cut).value
        vals = [global_average(X, model, iv, T_cut=args.T_cut).value
                for X in (UNIPOTENT, ROTATION, BOOST)]
        print(f"{k},({lo:.3f} {hi:.3f}),{hi - lo:.6f},{sweep:.6f}," + ",".join(f"{v:.6f}" for v in vals))


if __name__ == "__main__":
    main()
