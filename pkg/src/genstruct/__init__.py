"""Symbolic computation in the generic structure of a finite signature.

Flat diagrams, finitely presented structures with normal-form universes,
amalgamation, and decision procedures for independence relations.
"""

from .amalgamation import (
    Amalgam,
    HypothesisFailed,
    NotEmbedding,
    disjoint_amalgam,
    fibered_coproduct,
    inclusion,
    independence_amalgam,
    realize_extension,
)
from .core import (
    App,
    ArityMismatch,
    DuplicateName,
    GenstructError,
    Leaf,
    ParseError,
    RewriteSystem,
    Signature,
    Term,
    UnboundName,
    UnknownSymbol,
    normalize,
    parse_signature,
    parse_term,
    render_signature,
    render_term,
)
from .diagrams import (
    EmptyVariableSet,
    ExtensionDiagram,
    FlatDiagram,
    FunEq,
    NegRel,
    Rel,
    check_complete,
    check_consistent,
    complete,
    is_extension_diagram,
    parse_formula,
    phi_delta,
    psi_delta,
    render_formula,
)
from .flattening import NotSatisfied, flatten
from .formats import parse_document
from .independence import (
    BoundTooLargeForBudget,
    IndepVerdict,
    Kind,
    alg_indep,
    kim_indep_proxy,
    m_indep_bounded,
    tensor_indep,
)
from .structures import (
    BaseNotContained,
    FinStructure,
    GeneratorClosure,
    IncompleteDiagram,
    InconsistentDiagram,
    Presentation,
    RedundantTuple,
    StructureMap,
    UnknownGenerator,
    diag_f,
    eval_term,
    generated_closure,
    holds,
    qf_type_equal,
    realize,
)
from .witnesses import (
    PreconditionFailed,
    SignatureLacksFunction,
    base_monotonicity_failure,
    fork_not_divide_demo,
    tp2_array,
)

__version__ = "0.1.0"

__all__ = [
    "alg_indep",
    "Amalgam",
    "App",
    "ArityMismatch",
    "base_monotonicity_failure",
    "BaseNotContained",
    "BoundTooLargeForBudget",
    "check_complete",
    "check_consistent",
    "complete",
    "diag_f",
    "disjoint_amalgam",
    "DuplicateName",
    "EmptyVariableSet",
    "eval_term",
    "ExtensionDiagram",
    "fibered_coproduct",
    "FinStructure",
    "FlatDiagram",
    "flatten",
    "fork_not_divide_demo",
    "FunEq",
    "generated_closure",
    "GeneratorClosure",
    "GenstructError",
    "holds",
    "HypothesisFailed",
    "inclusion",
    "IncompleteDiagram",
    "InconsistentDiagram",
    "independence_amalgam",
    "IndepVerdict",
    "is_extension_diagram",
    "kim_indep_proxy",
    "Kind",
    "Leaf",
    "m_indep_bounded",
    "NegRel",
    "normalize",
    "NotEmbedding",
    "NotSatisfied",
    "parse_document",
    "parse_formula",
    "parse_signature",
    "parse_term",
    "ParseError",
    "phi_delta",
    "PreconditionFailed",
    "Presentation",
    "psi_delta",
    "qf_type_equal",
    "realize",
    "realize_extension",
    "RedundantTuple",
    "Rel",
    "render_formula",
    "render_signature",
    "render_term",
    "RewriteSystem",
    "Signature",
    "SignatureLacksFunction",
    "StructureMap",
    "tensor_indep",
    "Term",
    "tp2_array",
    "UnboundName",
    "UnknownGenerator",
    "UnknownSymbol",
]
