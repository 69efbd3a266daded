from ._core import (
    CdvError,
    __version__,
    check_density_1d,
    hopf_lax,
    radial_oracle,
    sigma,
    tau,
    verify_all,
    wasserstein,
)

__all__ = [
    "CdvError",
    "check_density_1d",
    "hopf_lax",
    "radial_oracle",
    "sigma",
    "tau",
    "verify_all",
    "wasserstein",
]
