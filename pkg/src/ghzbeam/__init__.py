"""Classical-optics simulation of a tripartite non-separable laser beam.

The beam carries three two-valued degrees of freedom (path, polarization,
first-order transverse mode). This package prepares the non-separable
target state on an optical bench, compiles bench descriptions to
three-wire circuits, models the parity-routing interferometer, evaluates
the Mermin quantity under ideal and imperfect optics, and renders the
physical output-port images.
"""
from .bench import BenchParseError, BenchProgram, Statement, parse
from .circuit import CircuitIR, Equivalence, Gate, cnot, cz, equivalent, h, p_phi, u2
from .compiler import CompileError, RULES, RewriteRule, compile_bench, mzim_gates, rewrite
from .elements import (
    ElementOp,
    TotalBlockageError,
    beam_splitter,
    block_path,
    dove_prism,
    hwp,
    mirror_pair,
    phase_shifter,
    s_waveplate,
    s_waveplate_state,
    s_waveplate_unitary,
    splitter,
)
from .mermin import (
    SETTINGS,
    FitInfeasibleError,
    FrameMeasurement,
    ImperfectionConfig,
    MerminResult,
    TABLE1_TARGETS,
    algebraic_mermin,
    assignment_value,
    basis_change,
    classical_bound_scan,
    fidelity_with_target,
    fit_table1,
    frames_csv,
    measure_setting,
    mermin_m,
    output_state,
    prepare_ghz,
    run_experiment,
    summary_text,
    table1_preset,
)
from .mzim import (
    MeasurementError,
    MzimModel,
    PortIntensities,
    calibrate,
    mzim_unitary,
    phi_sweep,
    read_ports,
)
from .render import (
    IntensityImage,
    field_intensity,
    integrate,
    mode_functions,
    render_port,
    sample_circle,
    subtract_background,
    write_composite_pgm,
    write_pgm,
)
from .state import (
    Gate2,
    Operator8,
    TriState,
    apply,
    basis_state,
    controlled,
    expectation,
    fidelity,
    ghz_state,
    lift,
    pauli_string,
    random_state,
)

__version__ = "0.1.0"
