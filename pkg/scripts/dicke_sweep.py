#!/usr/bin/env python3
"""Barycentric and geometric measures of Dicke states versus excitation number.

Writes one CSV per qubit count with columns n,k,E_B,E_G,E_G_closed_form.
"""

import argparse
import pathlib

import stellar as st


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[10, 11], help="qubit counts")
    parser.add_argument("--out", default="out", help="output directory")
    args = parser.parse_args()

    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for n in args.n:
        rows = ["n,k,E_B,E_G,E_G_closed_form"]
        for k in range(n + 1):
            state = st.dicke_state(n, k)
            eb = st.e_b(state)
            eg = st.e_g(state).value
            closed = st.e_g_dicke(n, k).value
            rows.append(f"{n},{k},{eb:.17g},{eg:.17g},{closed:.17g}")
        path = outdir / f"dicke_measures_n{n}.csv"
        path.write_text("\n".join(rows) + "\n")
        print(path)


if __name__ == "__main__":
    main()
