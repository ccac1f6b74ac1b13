"""Non-Markovian dynamics of a qubit under exponential memory kernels.

Closed-form post-Markovian and memory-kernel solutions, the exact
Lorentzian-bath solution, a brute-force Volterra oracle, and positivity
analysis of the resulting dynamical maps.
"""
from .damping_basis import BathParams, LiouvillianSpectrum, apply_liouvillian, markovian_map, spectrum
from .exact_jc import (
    LorentzianBath,
    correlation_kernel_closed,
    correlation_kernel_quadrature,
    exact_amplitude,
    exact_excited_population,
    exact_map,
    spectral_density,
)
from .kernel_solutions import (
    CoherenceArgMode,
    memory_kernel_map,
    post_markovian_map,
    r_of,
    xi_memory_kernel,
    xi_post_markovian,
    xi_post_markovian_eq5,
)
from .maps import Method, dynamical_map, map_factors
from .positivity import PositivityReport, choi_cp_check, first_violation, map_positivity, scan_plane
from .qubit_state import AffineBlochMap, BlochVector, QubitState, apply_map, from_bloch, min_eigenvalue, to_bloch
from .volterra import OracleSolution, VolterraForm, VolterraProblem, richardson_check, solve

__version__ = "0.1.0"
