#!/usr/bin/env python3
"""Mean error vs network size in the shrinking-signal regime.

Sweeps N over ER giant components while the infection size scales like
3*N^0.3, the true-reporting probability like N^-0.2 and the noise ratio
like N^0.3, classifying with a radius-2 ball detector that fires on any
reporter seeing two others. Writes the standard sweep CSV.
"""

import argparse

from hotspot.detector import DetectorConfig
from hotspot.harness import ExperimentSpec, ScenarioRule, TopologySpec, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="1000,2000,4000,8000")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default="error_decay.csv")
    args = ap.parse_args()

    spec = ExperimentSpec(
        topology=TopologySpec(kind="er", n=1000, giant=True),
        scenario=ScenarioRule(alpha=3.0, q=1.0, f=1.0,
                              alpha_exp=-0.7, q_exp=-0.2, f_exp=0.3),
        detector=DetectorConfig.ball_mode(l=2, s=2, t=0.5),
        sweep_name="n",
        sweep_values=tuple(int(v) for v in args.sizes.split(",")),
        trials_per_point=args.trials,
        master_seed=args.seed)
    result = run_sweep(spec)
    result.to_csv(args.out)
    print(result.to_csv_text(), end="")


if __name__ == "__main__":
    main()
