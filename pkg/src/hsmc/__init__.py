"""Model checking of Halpern-Shoham interval temporal logic fragments over
finite Kripke structures, based on bounded track representatives."""

from .checker import Verdict, check, mod_check
from .conp import (
    check_exists,
    concat_descr,
    exists_witness,
    provide_counterex,
    realize_element,
    val,
    witnessed_elements,
)
from .descriptor import (
    BkDescriptor,
    Cluster,
    DescriptorElement,
    DescriptorSequence,
    build_bk_descriptor,
    clusters,
    descriptor_element,
    descriptor_sequence,
    epsilon,
    rt,
    scan,
    tau,
)
from .errors import (
    BoundWarning,
    FormulaError,
    FragmentError,
    HsmcError,
    MissingEdgeError,
    ModelError,
    ResourceLimitError,
)
from .formula import (
    Formula,
    FragmentClass,
    Modality,
    classify,
    desugar,
    expand,
    make_ell,
    matches_exists_grammar,
    matches_forall_grammar,
    nest_b,
    normalize,
    parse_formula,
    to_exists_dual,
    to_text,
)
from .kripke import (
    KripkeStructure,
    StateId,
    Track,
    concat,
    parse_kripke,
    serialize_kripke,
    track_label,
)
from .oracle import OracleConfig, all_tracks, oracle_eval, oracle_mod_check
from .reductions import (
    CnfFormula,
    Qbf,
    parse_dimacs,
    parse_qbf,
    qbf_to_kripke,
    random_cnf,
    random_qbf,
    sat_to_kripke,
)
from .unravel import Direction, UnravelRequest, unravel

__version__ = "0.1.0"

__all__ = [
    "BkDescriptor",
    "BoundWarning",
    "CnfFormula",
    "Cluster",
    "DescriptorElement",
    "DescriptorSequence",
    "Direction",
    "Formula",
    "FormulaError",
    "FragmentClass",
    "FragmentError",
    "HsmcError",
    "KripkeStructure",
    "MissingEdgeError",
    "Modality",
    "ModelError",
    "OracleConfig",
    "Qbf",
    "ResourceLimitError",
    "StateId",
    "Track",
    "UnravelRequest",
    "Verdict",
    "all_tracks",
    "build_bk_descriptor",
    "check",
    "check_exists",
    "classify",
    "clusters",
    "concat",
    "concat_descr",
    "descriptor_element",
    "descriptor_sequence",
    "desugar",
    "epsilon",
    "exists_witness",
    "expand",
    "make_ell",
    "matches_exists_grammar",
    "matches_forall_grammar",
    "mod_check",
    "nest_b",
    "normalize",
    "oracle_eval",
    "oracle_mod_check",
    "parse_dimacs",
    "parse_formula",
    "parse_kripke",
    "parse_qbf",
    "provide_counterex",
    "qbf_to_kripke",
    "random_cnf",
    "random_qbf",
    "realize_element",
    "rt",
    "sat_to_kripke",
    "scan",
    "serialize_kripke",
    "tau",
    "to_exists_dual",
    "to_text",
    "track_label",
    "unravel",
    "val",
    "witnessed_elements",
]
