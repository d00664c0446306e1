"""
Convergence-rate sweep for the small-noise Gaussian model
=========================================================

Runs a seeded Monte Carlo sweep over noise levels, fits the log-log slope
of the RMSE, and compares it with the theoretical exponent 1/H.
"""

from cusploc import CuspModelSpec, ExperimentConfig, constant, run_rate_experiment

# Cusp signal at theta0 = 1 observed on [0, 2] in additive white noise.
spec = CuspModelSpec(variant="gaussian_signal", kappa=0.25, theta0=1.0,
                     alpha=0.5, beta=1.5, a=1.0, h=constant(1.0), T=2.0,
                     epsilon=0.1)

# 80 replications per noise level keeps this demo around a minute; the
# acceptance suite runs the same sweep at 400.
config = ExperimentConfig(model=spec, asymptotic_grid=(0.1, 0.05, 0.025),
                          replications=80, master_seed=42, estimators=("mle",))
fit = run_rate_experiment(config)

print(f"{'epsilon':>9} {'RMSE':>12}")
for row in fit.table:
    print(f"{row.grid_value:9.4f} {row.rmse_mle:12.3e}")
print(f"\nfitted slope {fit.slope:.3f} +- {fit.slope_stderr:.3f} "
      f"(theory {fit.theoretical_exponent:.3f} = 1/H)")
