"""Spectral-shift density profile by winding, with the closed form alongside.

    python scripts/xi_profile.py --fixture two_level --t1 -1 --t2 2 --out xi.csv
"""
import argparse
import math

import numpy as np

from herglotz_flow import fixtures as fx
from herglotz_flow.herglotz import boundary_value
from herglotz_flow.sl2 import LieElement
from herglotz_flow.winding import xi_closed_form, xi_density


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fixture", default="two_level", choices=sorted(fx.FIXTURES))
    p.add_argument("--generator", type=float, nargs=3, default=(0.0, 0.0, 1.0),
                   metavar=("ALPHA", "BETA", "GAMMA"))
    p.add_argument("--t1", type=float, default=-1.0)
    p.add_argument("--t2", type=float, default=2.0)
    p.add_argument("--lo", type=float, default=-3.0)
    p.add_argument("--hi", type=float, default=4.0)
    p.add_argument("--n", type=int, default=141)
    p.add_argument("--out")
    args = p.parse_args()

    X = LieElement(*args.generator)
    M0 = fx.FIXTURES[args.fixture]()
    lams = np.linspace(args.lo, args.hi, args.n)
    sample = xi_density(X, M0, args.t1, args.t2, lams)
    closed = np.full(lams.shape, math.nan)
    if X.gamma > 0 and args.t1 < 0 < args.t2:
        for k, lam in enumerate(lams):
            bv = boundary_value(M0, lam)
            if bv.converged:
                closed[k] = xi_closed_form(X, bv.value, args.t1, args.t2)

    lines = [f"# fixture={args.fixture} X={tuple(args.generator)} t1={args.t1} t2={args.t2}",
             "lambda,xi_winding,xi_closed_form,converged"]
    lines += [f"{lam!r},{xi!r},{c!r},{int(ok)}"
              for lam, xi, c, ok in zip(lams.tolist(), sample.xi_values.tolist(), closed.tolist(),
                                        sample.converged.tolist())]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    gap = np.nanmax(np.abs(sample.xi_values - closed)) if np.isfinite(closed).any() else math.nan
    print(f"# max |winding - closed form| where both exist: {gap:.3e}")


if __name__ == "__main__":
    main()
