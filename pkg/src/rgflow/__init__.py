"""RG flows of the nonequilibrium and PT-symmetric sine-Gordon models.

Beta functions, an adaptive Dormand-Prince integrator with pole and
runaway detection, closed-form first integrals, the self-energy spectra,
and flow-portrait serialization.
"""
from .errors import (DegenerateA, DomainLog, DomainZero, EiOverflow, InvalidBracket,
                     InvalidControl, InvalidGrid, InvariantSingular, NonFiniteInput,
                     RGFlowError, SingularDenominator, ZeroGr)
from .systems import (DEFAULT_CONFIG, EngineConfig, NeqCouplings, PTCouplings, RotationLabel,
                      RotationMatrix, beta_neq, beta_pt, beta_pt_reduced, keldysh_rotation,
                      neq_denominator, neq_field, pt_field, pt_invariant, pt_reduced_field)
from .integrate import StepControl, Termination, Trajectory, integrate
from .portrait import FlowPortrait, GridSpec, System, flow_portrait, run_cell
from .special import ei
from .closedform import (ImplicitRelation, KTRegime, RelationKind, hermitian_kt_limit_check,
                         residual_jpar_nuf, residual_jperp_nuf, residual_pt_solution)
from .spectra import (PTSelfEnergyParams, SelfEnergyMatrix, SigmaPhase, SigmaPT, build_m,
                      degeneracy_locus, pt_separatrix, sigma_pt)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
