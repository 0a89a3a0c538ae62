"""redusim: deterministic packet-level simulation of SLA-aware flow redundancy
(divert / clone / replicate) over base routing in data-center networks."""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND
