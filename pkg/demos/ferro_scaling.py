"""Why the finite-size criteria refuse the Heisenberg ferromagnet.

The spin-1/2 ferromagnetic chain is frustration free but gapless in the
bulk: its open-chain gap is 1 - cos(pi/n) ~ (pi^2/2) n^-2, which closes
with the same n^-2 power as the certification threshold 6/(n(n+1)) but
with a smaller constant (pi^2/2 = 4.93 < 6).  So the gap sits below the
threshold at every n, the margin stays negative, and no subsystem size
ever certifies -- exactly the behaviour a sound criterion must show on
a gapless model.  The power-law fit makes the exponent visible.

Run:  python3 demos/ferro_scaling.py
"""

import numpy as np

from gapcert.criteria import fit_power_law, subsystem_gap, threshold_gm
from gapcert.models import heisenberg_ferro


def main():
    model = heisenberg_ferro()
    ns = list(range(4, 11))
    print("open-chain gaps, Heisenberg ferromagnet (d = 2)")
    print(f"{'n':>3} {'gamma_n':>16} {'threshold_gm':>16} {'margin':>16} {'exact':>12}")
    gaps = []
    for n in ns:
        gap = subsystem_gap(model, 1, n).gap
        gaps.append(gap)
        exact = 1.0 - np.cos(np.pi / n)
        print(
            f"{n:>3} {gap:>16.12f} {threshold_gm(n):>16.12f} "
            f"{gap - threshold_gm(n):>16.12f} {exact:>12.8f}"
        )

    fit = fit_power_law(ns, gaps)
    print()
    print(
        f"fit gamma_n ~ C n^-alpha: alpha = {fit.exponent:.6f}, "
        f"C = {fit.prefactor:.6f}, r^2 = {fit.r_squared:.9f}"
    )
    print("threshold_gm(n) = 6/(n(n+1)) ~ 6 n^-2: same power, larger constant,")
    print("so every margin above is negative and no n certifies.  Correct: the")
    print("bulk model is gapless, and a finite-size certificate must not exist.")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
