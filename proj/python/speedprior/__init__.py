"""Speed prior estimation on the REF-1 reference machine."""

from ._core import (
    SUITES,
    PriorEngine,
    adversarial_sequence,
    computes,
    decoder_km,
    decoder_mass,
    decoder_run,
    enumerate,
    first_phase,
    km_complexity,
    kt_complexity,
    measure,
    naive_step_count,
    output_interval,
    predict,
    verify,
)

__all__ = [
    "SUITES",
    "PriorEngine",
    "adversarial_sequence",
    "computes",
    "decoder_km",
    "decoder_mass",
    "decoder_run",
    "enumerate",
    "first_phase",
    "km_complexity",
    "kt_complexity",
    "measure",
    "naive_step_count",
    "output_interval",
    "predict",
    "verify",
]
