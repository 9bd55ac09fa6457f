"""Tabulate the minimal subsets carrying a one-qubit channel at every time step.

    python scripts/sweep_channel_location.py [--grid 64] [--seed 42]

Covers the teleportation input and the two message qubits of dense coding,
each fed through the circuit with every other qubit starting in |0>.
"""

import argparse

from histloc.circuit import dense_coding_circuit, teleportation_circuit
from histloc.infoloc import default_lambda_grid, locate_channel
from histloc.qmath import basis_ket

CASES = (
    ("teleportation", teleportation_circuit, 0),
    ("dense coding, a", dense_coding_circuit, 0),
    ("dense coding, abar", dense_coding_circuit, 1),
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    grid = default_lambda_grid(args.grid, args.seed)

    for label, make, q_in in CASES:
        circuit = make()
        env = basis_ket("0" * (circuit.n_qubits - 1))
        print(f"\n{label} ({len(grid)} grid bases)")
        for t in circuit.times:
            report = locate_channel(circuit, q_in, env, t, grid, grid_seed=args.seed)
            cells = ["{" + ",".join(s) + "}" for s in report.minimal_names()]
            print(f"  {t}: {' '.join(cells) or '-'}")


if __name__ == "__main__":
    main()
