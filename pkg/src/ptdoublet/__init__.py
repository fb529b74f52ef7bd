"""Exact doublet spectra of a PT-symmetric Natanzon-class model.

A complexified Eckart well on a shifted contour maps, through the change
of variables sinh r = -i e^{i xi} and a Liouville transformation, onto a
partner potential whose bound states come in pairs: two normalizable
states with distinct real energies but the same nodal count N, selected
by the two positive roots of a cubic. This package evaluates both models
in closed form, certifies the states (residuals, decay, PT symmetry,
node counting by the argument principle), and confirms the doublets with
an independent finite-difference eigensolver on the same contour.
"""

from .branching import continuous_angle, continuous_log, continuous_power, continuous_sqrt
from .contour import (
    ContourGrid,
    ContourPoint,
    ContourReport,
    EpsilonProfile,
    build_grid,
    d2xi_dr2,
    d3xi_dr3,
    default_grid,
    dr_dt,
    dxi_dr,
    r_of_t,
    validate_contour,
    xi_ddot,
    xi_dot,
    xi_of_r,
    xi_of_t,
)
from .errors import (
    AsymmetricGrid,
    BadParameters,
    BranchUndefined,
    ContourTooCloseToSingularity,
    DegenerateCubic,
    DenseCapExceeded,
    GridTooCoarse,
    InadmissibleN,
    InvalidDelta,
    NoBoundStates,
    NoConvergence,
    PtDoubletError,
    ShiftIsEigenvalue,
    SingularPoint,
    TailTooShort,
    WindingNotInteger,
)
from .numeric import (
    DiscreteOperator,
    EigenMatch,
    discretize,
    eigen_all,
    eigen_near,
    eigenvector_nodes,
    match_spectrum,
    richardson,
    select_bound_states,
    verify_doublet,
)
from .polys import hyp2f1_terminating, jacobi_coeffs, jacobi_deriv, jacobi_poly, jacobi_roots
from .potentials import (
    EckartParams,
    NatanzonParams,
    liouville_residual,
    liouville_residual_max,
    v_d_in_r,
    v_eckart,
    v_natanzon,
    v_natanzon_r,
)
from .spectrum import (
    COMPLEX_PAIR,
    NEGATIVE_REAL,
    POSITIVE_REAL,
    DeltaRoots,
    Doublet,
    EckartLevel,
    NoDoublet,
    SingleLevel,
    c_min,
    cubic_discriminant,
    delta_cubic_coeffs,
    doublet,
    eckart_levels,
    solve_delta,
    spectrum_report,
)
from .wavefn import (
    UVParams,
    WaveSamples,
    count_nodes,
    decay_rate,
    derive_uv,
    eckart_state,
    natanzon_state,
    node_count_sweep,
    polynomial_zero_positions,
    polynomial_zeros_in_strip,
    psi_eckart,
    psi_natanzon,
    pt_symmetry_defect,
    schrodinger_residual,
)

__version__ = "0.1.0"
