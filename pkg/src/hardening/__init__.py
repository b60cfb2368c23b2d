"""Channel hardening of ray-based MIMO channels.

Monte-Carlo and closed-form tools for the coefficient of variation of the
channel gain ``||H||_F^2`` when ``H`` is a sum of planar-wavefront rays.
"""

__version__ = "0.1.0"

from .geometry import (
    ArrayTopology,
    make_array,
    make_uca,
    make_ula,
    make_upa,
    steering_correlation,
    steering_vector,
)
from .montecarlo import MomentAccumulator, MomentEstimate, NonFiniteTrialError, SeedSpec, run_blocks, run_trials
from .rays import (
    ChannelRealization,
    ComplexGaussianGains,
    EqualPowerGains,
    FixedAmplitudeGains,
    FixedDirections,
    Ray,
    RayDistribution,
    RaySet,
    UniformSphere,
    assemble_channel,
    capacity_equal_power,
    channel_gain,
    sample_rayset,
)
from .stats import (
    HardeningReport,
    alpha2,
    cv2_closed_form,
    cv2_conditional_closed_form,
    cv2_from_samples,
    cv2_illustration,
    e2_estimate,
    e2_uniform_sphere,
    fourth_moment_oracle,
    iid_gaussian_moments,
    large_scale_term,
    rayleigh_cv2,
    simulate_cv2,
)
