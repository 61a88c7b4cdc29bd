"""Goodness-of-fit tests for count time series via the probability
generating function.

The test compares the empirical PGF of an observed series against the PGF
implied by a fitted null family (Poisson INAR(1), Poisson INARCH(1), or
Poisson INAR(2)), integrating the squared distance over u in [0, 1] under
a u**a weight. P-values come from a parametric bootstrap with refitting.

Typical use::

    from countgof import Inar1, Poisson, simulate, TestConfig, bootstrap_test
    y = simulate(Inar1(0.6, Poisson(4.0)), 200, seed=1)
    result = bootstrap_test(y, TestConfig(family="poisson-inar1", seed=7))
    print(result.p_value)
"""

from ._rng import RandomStream, child_seed
from .bootstrap import TestConfig, TestResult, bootstrap_test
from .estimate import (DegenerateSeries, FitResult, cls_inar1, cls_inar2,
                       cls_inarch1, fit_family)
from .mc import (HarnessAbort, MCConfig, MCResult, MCRow, emit_power_curve,
                 load_config, read_power_curve, run_experiment, write_summary)
from .models import (CountSeries, DiracZeroMixture, EmptySeries, Inar1, Inar2,
                     Inarch1, Inarch1LevelShift, Ingarch11, NegBinomial,
                     Poisson, PoissonMixture, SeriesTooShort, model_from_dict,
                     model_to_dict, read_series, simulate, write_series)
from .pgf import (FAMILIES, INAR1, INAR2, INARCH1, NullEstimate,
                  empirical_joint_pgf, empirical_pgf, null_pgf)
from .statistic import (NonConvergence, QuadratureRule, WeightSpec,
                        integral_I, integral_J, statistic_for_fit)

__version__ = "0.1.0"

__all__ = [
    "RandomStream", "child_seed",
    "TestConfig", "TestResult", "bootstrap_test",
    "DegenerateSeries", "FitResult", "cls_inar1", "cls_inar2", "cls_inarch1",
    "fit_family",
    "HarnessAbort", "MCConfig", "MCResult", "MCRow", "emit_power_curve",
    "load_config", "read_power_curve", "run_experiment", "write_summary",
    "CountSeries", "DiracZeroMixture", "EmptySeries", "Inar1", "Inar2",
    "Inarch1", "Inarch1LevelShift", "Ingarch11", "NegBinomial", "Poisson",
    "PoissonMixture", "SeriesTooShort", "model_from_dict", "model_to_dict",
    "read_series", "simulate", "write_series",
    "FAMILIES", "INAR1", "INAR2", "INARCH1", "NullEstimate",
    "empirical_joint_pgf", "empirical_pgf", "null_pgf",
    "NonConvergence", "QuadratureRule", "WeightSpec", "integral_I",
    "integral_J", "statistic_for_fit",
    "__version__",
]
