"""Simulation of the coupled map, epoch segmentation and decay fits."""
from . import backend
from .epochs import (EpochSeries, GrowthRate, ShadowRun, cycle_valleys, epoch_growth_rate, extract_epochs, run_epochs,
                     shadow_length, shadow_run)
from .fit import FitResult, fit_decay, fit_single
from .simulate import SimParams, Trajectory, eigenvector_ic, make_rng, perturbed_ic, simulate, step, step_log

__all__ = [
    "EpochSeries", "FitResult", "cycle_valleys", "GrowthRate", "ShadowRun", "SimParams", "Trajectory", "backend",
    "eigenvector_ic", "epoch_growth_rate", "extract_epochs", "fit_decay", "fit_single", "make_rng",
    "perturbed_ic", "run_epochs", "shadow_length", "shadow_run", "simulate", "step", "step_log",
]
