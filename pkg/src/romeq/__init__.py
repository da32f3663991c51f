"""Reduced-order surrogate models for parameter-dependent matrix equations."""

from ._version import __version__
from .affine import (AffineFamily, ThetaDomainError, ThetaMonomial,
                     affine_product, assemble, evaluate_theta,
                     transpose_family)
from .basis import (PodBasis, SnapshotSet, build_snapshots, greedy_basis, lift,
                    pod_basis, project, randomized_basis)
from .benchmarks import BENCH_DEFAULTS, benchmark_problem
from .fom import (FomSolution, SolverError, fom_solve,
                  hamiltonian_riccati_oracle, kronecker_oracle_solve,
                  newton_kleinman, solve_continuous_lyapunov,
                  solve_continuous_riccati, solve_coupled_lyapunov,
                  solve_discrete_lyapunov, solve_problem)
from .intrusive import (intrusive_rom, project_linear_ops,
                        project_quadratic_op, quadratic_galerkin_operator)
from .opinf import (RankDeficiencyError, ReducedModel, TrainingData,
                    assemble_data_matrix, assemble_training,
                    rank_diagnostics, select_hyperparameters,
                    solve_regularized_lsq, train)
from .problems import (KINDS, ProblemDefinition, ThetaGroups,
                       derive_theta_groups, validate)
from .rom import (RomSolveReport, avg_relative_error, predict_full,
                  reduced_operators_at, rom_solve, truncate)
from .vectorize import (pair_index, sym_square, sym_square_jacobian,
                        sym_square_len, unvec, vec)
