"""Robust over-the-air computation with type-based multiple access.

Simulates TBMA aggregation under Byzantine attacks, robust type correction,
a direct-aggregation baseline and a small federated-learning use case.
"""
from .aggregate import AggregationFn, nmse, oracle, psi
from .attack import AttackSpec, Strategy, choose_target
from .channel import ChannelModel, add_awgn, csi_invert, draw_gains, snr_to_sigma2
from .core import Scheme, SystemConfig, dequantize, quantize
from .da import da_aggregate
from .experiment import DataLaw, ExperimentConfig, Method, run_sweep, run_trial
from .robust import (RobustParams, local_outlier_compensate, median_from_type,
                     percentile_truncate, robust_correct, threshold_noise)
from .tbma import NoisyType, corrupt_type, form_type_symbol, form_type_waveform
from .waveform import matched_filter_bank, synthesize

__version__ = "0.1.0"
