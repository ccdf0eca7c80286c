"""Case III: swept average, winding density and the printed variant side by side.

For X = (1, 0, 1) and M0 = i the sweep and the winding density give |Delta|/2
while the (pi m + 2w)/(pi m - 2w) variant gives about 0.639 |Delta|.
"""
import math

from herglotz_flow import fixtures as fx
from herglotz_flow.averaging import global_average, integrate_xi_global, printed_global_density
from herglotz_flow.sl2 import BOOST, LieElement


def main():
    cases = [("boost, M0 = i", BOOST, fx.constant_i()),
             ("X(2, 0, 0.5), M0 = i", LieElement(2.0, 0.0, 0.5), fx.constant_i()),
             ("boost, uniform [0, 1]", BOOST, fx.uniform01())]
    print(f"{'case':28s} {'interval':>12s} {'sweep':>10s} {'winding':>10s} {'printed':>10s}")
    for label, X, M0 in cases:
        for iv in [(0.0, 1.0), (-2.0, 3.0)]:
            sweep = global_average(X, M0, iv).value
            wind = abs(X.gamma) * integrate_xi_global(X, M0, iv)
            printed = abs(X.gamma) * printed_global_density(X, M0, iv)
            print(f"{label:28s} {str(iv):>12s} {sweep:10.6f} {wind:10.6f} {printed:10.6f}")
    print(f"\nexact printed value per unit length for M0 = i: {2 * math.atan(math.pi / 2) / math.pi:.6f}")


if __name__ == "__main__":
    main()
