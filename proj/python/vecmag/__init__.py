"""Collective-spin vector DC magnetometry.

Thin Python layer over the C++ core: build a :class:`SchemeConfig`, then ask
for signals, precisions, QFI, spectra or recovered fields.
"""

from ._core import (
    AmbiguousSign,
    DimensionMismatch,
    Error,
    InvalidArgument,
    NumericalError,
    OutOfRegime,
    SchemeConfig,
    UnderResolved,
    UnsupportedBranch,
    __version__,
    analytic_delta_b,
    analytic_jz,
    chain_sign,
    collective_operator,
    delta_b_numeric,
    extract_peaks,
    fidelity_f1,
    fidelity_f2,
    final_state,
    ghz_state,
    minimize_delta_b,
    precision_report,
    qfi_analytic,
    qfi_numeric,
    recover_field,
    sample_signal,
    scaling_fit,
    scs_state,
    simulated_jz,
    spectrum,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
