#!/usr/bin/env python3
"""Two-qubit star dynamics: trajectories, velocities, entanglement profiles.

Two one-parameter flows are exported:

* pair flow  exp(-i b H) with H = (H(2,3) + H(0,2))/sqrt(2), which drives
  |00> to cos(b)|00> + sin(b)/sqrt(2)(|01>+|10>): one star pinned at the
  north pole, the other sweeping a full meridian loop;
* half XY exchange H = -(XxY + YxX)/2, which drives |00> to
  cos(b)|00> - sin(b)|11>: two mirror stars meeting at the south pole at
  b = pi/2, with star velocity anticorrelated with the barycentric
  measure.
"""

import argparse
import math
import pathlib

import numpy as np

import stellar as st

FLOWS = {
    "pair": ("1/sqrt(2)*H(2,3) + 1/sqrt(2)*H(0,2)", (0.002, math.pi)),
    "xyhalf": ("-0.5*X x Y + -0.5*Y x X", (0.0, math.pi / 2)),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=1201, help="beta grid size")
    parser.add_argument("--out", default="out", help="output directory")
    args = parser.parse_args()

    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, (source, (b0, b1)) in FLOWS.items():
        h = st.build_matrix(st.parse(source))
        traj = st.evolve(h, st.dicke_state(2, 0), np.linspace(b0, b1, args.points))
        profile = st.velocity_profile(traj)
        for suffix, text in (
            ("trajectory", st.dynamics.trajectory_to_csv(traj)),
            ("velocity", st.dynamics.velocity_to_csv(profile)),
        ):
            path = outdir / f"{name}_{suffix}.csv"
            path.write_text(text)
            print(path)
        eb = st.e_b_profile(traj)
        path = outdir / f"{name}_eb.csv"
        path.write_text(
            "beta,e_b\n" + "\n".join(f"{b:.17g},{v:.17g}" for b, v in eb) + "\n"
        )
        print(path)


if __name__ == "__main__":
    main()
