"""Discretisation of continuous LTI models by Loewner interpolation of
holder-weighted frequency data, with projection onto stable models."""
from .baselines import discretize_baseline, impulse_invariant, tustin, zoh
from .exceptions import (DiscretisationError, NumericFailure,
                         UnsupportedCombinationError)
from .loewner import (FrequencyDataSet, build_dataset, holder_transfer,
                      numerical_rank, project, realify)
from .metrics import ErrorReport, freq_error, order_sweep, time_error_l2
from .models import (ContinuousStateSpace, DescriptorModel, DiscreteStateSpace,
                     TimeDelayModel, eval_continuous, eval_discrete, is_stable,
                     load_model, poles)
from .pipeline import DiscretizationResult, LoewnerFit, loewner_discretize
from .plants import fourth_order_plant, named_plant, network_tds
from .stabilize import l2_truncate, nehari_project, split_stable_antistable

__version__ = "0.1.0"
