"""maskspectra: bounds on the peak DFT magnitude of Bernoulli sampling
masks, Monte Carlo validation, and an iterative-thresholding recovery demo.
"""

from .bounds import (
    BoundReport,
    BoundSpec,
    GaussianModel,
    bound_report,
    dirichlet_closed_form,
    gaussian_bound,
    gaussian_bound_approx,
    q_function,
    q_inverse,
    ratio_approximation,
    sigma_bound,
    worst_case_bound,
)
from .masks import Mask, MaskConfig, generate_mask, is_prime, mask_from_text, mask_to_text, worst_case_mask
from .montecarlo import (
    ExperimentSpec,
    RunningStats,
    TrialStats,
    exceedance_rate,
    figure_curves,
    noise_ratio_curve,
    run_experiment,
    table1_report,
)
from .recovery import (
    RecoverySpec,
    SignalSpec,
    hard_threshold,
    recover,
    sample_random,
    snr_db,
    synthesize_signal,
)
from .spectrum import Spectrum, dft_direct, dft_fast, max_nonzero_bin, spectrum_of_mask

__version__ = "0.1.0"

__all__ = [
    "Mask",
    "MaskConfig",
    "generate_mask",
    "worst_case_mask",
    "is_prime",
    "mask_to_text",
    "mask_from_text",
    "Spectrum",
    "dft_direct",
    "dft_fast",
    "spectrum_of_mask",
    "max_nonzero_bin",
    "BoundSpec",
    "GaussianModel",
    "BoundReport",
    "worst_case_bound",
    "dirichlet_closed_form",
    "ratio_approximation",
    "q_function",
    "q_inverse",
    "gaussian_bound",
    "gaussian_bound_approx",
    "sigma_bound",
    "bound_report",
    "ExperimentSpec",
    "TrialStats",
    "RunningStats",
    "run_experiment",
    "exceedance_rate",
    "table1_report",
    "figure_curves",
    "noise_ratio_curve",
    "SignalSpec",
    "RecoverySpec",
    "synthesize_signal",
    "sample_random",
    "hard_threshold",
    "snr_db",
    "recover",
    "__version__",
]
