"""Dense-statevector imaginary-time evolution, QITE and adaptive compressed QITE."""
from .statespace import (DenseOperator, PauliString, StateVector, expectation, herm_exp,
                         normalize, overlap_fidelity, pauli_basis)
from .hamiltonian import (LocalTerm, SpinChainModel, Spectrum, build_tfim, decompose_local,
                          exact_spectrum)
from .evolution import (db_qite_step, double_bracket_generator, ite_evolve, ite_step,
                        ite_trajectory, wick_residual)
from .qite import QiteGenerator, domain_window, qite_sweep, solve_generator, sum_generators
from .acq import (AcqRecord, StepPolicy, acq_run, compressed_unitary, energy_derivatives,
                  line_search_stop, newton_step, product_unitary, qite_run, variance_bound_step)
from .geometry import (Trajectory, fs_distance, geodesic_point, piecewise_geodesic,
                       rank2_geodesic_time, suzuki_shift_time, trajectory_distance)

__version__ = "0.1.0"
