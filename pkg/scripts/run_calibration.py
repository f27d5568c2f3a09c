#!/usr/bin/env python3
"""Scan the balancing constant and report how the selected lambda and the
oracle factor respond on the regular instance (b=2, r=1/2, R=1, sigma=0.3).

This is the calibration run recorded in the decisions notes: with
bal_factor=20 the thresholds dominate every pairwise norm, the selector
saturates at lambda = 1, and the oracle factor sits around 19-20; values
around 2 put the selector in its responsive regime.
"""

import argparse

import numpy as np

from lepskii.balancing import BalancingConfig
from lepskii.experiments import ExperimentConfig, run_experiment
from lepskii.estimators import TIKHONOV
from lepskii.synthetic import polynomial_spectrum_model


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1024)
    parser.add_argument("--replications", type=int, default=20)
    parser.add_argument("--seed-base", type=int, default=0)
    parser.add_argument("--factors", type=float, nargs="+", default=[1.0, 2.0, 5.0, 10.0, 20.0])
    args = parser.parse_args()

    model = polynomial_spectrum_model(b=2.0, size=1000, r=0.5, R=1.0, sigma=0.3)
    print("bal_factor  median_lambda_hat  median_oracle_factor_s12  median_err_s12")
    for bal in args.factors:
        cfg = ExperimentConfig(
            model=model,
            n_values=(args.n,),
            replications=args.replications,
            seed_base=args.seed_base,
            grid_q=2.0,
            balancing=BalancingConfig(s=0.5, eta=0.1, sigma=0.3, M_bound=0.3, bal_factor=bal),
            filters=(TIKHONOV,),
            lambda0_mode="model",
        )
        rows = [r for r in run_experiment(cfg) if not r.error]
        hats = np.median([r.lambda_hat_half for r in rows])
        factor = np.median([r.err_s12_at_hat / r.err_min_over_grid_s12 for r in rows])
        err = np.median([r.err_s12_at_hat for r in rows])
        print(f"{bal:10.1f}  {hats:17.6g}  {factor:24.3f}  {err:14.5f}")


if __name__ == "__main__":
    main()
