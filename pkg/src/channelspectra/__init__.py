"""Spectra of random quantum channels with Hermitian Kraus operators.

Simulates the empirical spectral distribution of the centered, rescaled
channel matrix built from random Hermitian Kraus families, and predicts
its limit exactly through free-probability combinatorics: the dilated
tensor convolution of the marginal laws at fixed Kraus count, the
semicircle law when the Kraus count grows.
"""

from .channel import (
    AnalyticGUEExpectation,
    AnalyticTwirlExpectation,
    DeltaOperator,
    EmpiricalExpectation,
    KrausSet,
    ZeroExpectation,
    apply_channel,
    build_channel_matrix,
    build_delta,
    expected_channel_map_gue,
    expected_tensor_empirical,
    expected_tensor_gue,
    expected_tensor_twirl,
    hermitian_split,
    kraus_defects,
)
from .densities import (
    DensitySpec,
    km_cdf,
    km_density,
    km_dilated_cdf,
    km_dilated_density,
    semicircle_cdf,
    semicircle_density,
)
from .ensembles import (
    EnsembleSpec,
    MatrixSample,
    sample,
    sample_family,
    sample_ginibre,
    sample_gue,
    sample_haar_unitary,
    sample_rotated_deterministic,
    sample_rotated_rademacher,
    sample_wishart_centered,
)
from .experiment import ConfigError, ExperimentConfig, run_simulation
from .freemoments import (
    CumulantSequence,
    FixedD,
    GrowingD,
    MarginalLaw,
    centered_mp_law,
    free_word_moment,
    law_from_moments,
    moments_to_free_cumulants,
    predict_limit_moments,
    rademacher_law,
    semicircle_law,
    tensor_convolution_moment,
)
from .linalg import (
    MatFreeOperator,
    NumericalError,
    ResourceGuardError,
    entrywise_conj,
    hermitian_eigenvalues,
    hutchinson_normalized_trace_power,
    kron,
    matfree_apply,
    normalized_trace,
)
from .partitions import (
    SetPartition,
    enumerate_pair_partitions,
    enumerate_partitions,
    is_noncrossing,
    nc2_count,
    noncrossing_partitions,
    partition_class_count,
)
from .seeding import Seed
from .stats import (
    ESD,
    KSReport,
    MomentReport,
    aggregate_trials,
    compare_report,
    empirical_moments,
    esd_from_spectrum,
    ks_distance,
    pool_esds,
)

__version__ = "0.1.0"
