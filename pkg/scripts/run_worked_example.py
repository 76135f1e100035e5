#!/usr/bin/env python3
"""End-to-end worked example for the bundled fractional plant.

Designs the PD^delta controller for poles -1 +- 6i at 4% steady-state
error, checks the closed-loop poles, simulates the unit-step response,
and repeats the design at 2% to show how the weak-integrator controller
(delta < 0) picks up an extra right-half-plane pole.

Usage: python scripts/run_worked_example.py [out_dir]
"""

import sys
from pathlib import Path

from fracreg import (
    DesignSpecPd,
    Plant,
    SimConfig,
    build_pd_model,
    char_poly_pd,
    design_pd_fractional,
    design_pd_integer,
    find_roots,
    simulate_state_space,
    steady_state_estimate,
)
from fracreg.cli import write_trajectory_csv


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    out_dir.mkdir(parents=True, exist_ok=True)

    plant = Plant(a0=1.0, a1=0.5, a2=0.8, alpha=2.2, beta=0.9)
    pole = -1 + 6j

    ctrl = design_pd_fractional(DesignSpecPd(plant=plant, pole=pole, ess_percent=4.0))
    print(f"PD^delta (4% ess):  K={ctrl.K:g}  Td={ctrl.Td:.5f}  delta={ctrl.delta:.5f}")

    report = find_roots(char_poly_pd(plant, ctrl))
    print(f"closed-loop poles ({report.method}, {report.verdict}):")
    for r in report.roots:
        print(f"  {r.value.real:+.6f} {r.value.imag:+.6f}i   |residual| = {r.residual:.2e}")

    traj = simulate_state_space(build_pd_model(plant, ctrl), SimConfig(step=0.001, t_end=12.0))
    mean, spread = steady_state_estimate(traj, window=2.0)
    csv_path = out_dir / "golden_pd_trajectory.csv"
    write_trajectory_csv(csv_path, traj)
    print(f"unit-step response -> {csv_path}  (steady state {mean:.4f} +- {spread:.2e})")

    ctrl_int = design_pd_integer(DesignSpecPd(plant=plant, pole=pole))
    print(f"integer PD:         K={ctrl_int.K:.4f}  Td={ctrl_int.Td:.4f}")

    ctrl2 = design_pd_fractional(DesignSpecPd(plant=plant, pole=pole, ess_percent=2.0))
    report2 = find_roots(char_poly_pd(plant, ctrl2))
    extra = [r.value for r in report2.roots if r.value.real > 0]
    print(f"PD^delta (2% ess):  K={ctrl2.K:g}  Td={ctrl2.Td:.5f}  delta={ctrl2.delta:.5f}")
    print(f"verdict: {report2.verdict}; right-half-plane poles: {extra}")


if __name__ == "__main__":
    main()
