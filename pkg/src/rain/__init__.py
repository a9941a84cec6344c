"""rain: a compliance engine for contextualized norms.

Policies decompose into a graph of values, stakeholders, features, and
norms; an application's socio-technical context activates the norms that
concern it; graded assessments aggregate onto values, stakeholders,
features, and external policies under a worst-score threshold model.
"""

from .algorithms import (
    BatchAnswerSource,
    ExpansionReport,
    IssueSource,
    TemplateIssueSource,
    covers_features,
    covers_policy,
    decompose,
    expand,
)
from .errors import (
    AmbiguousAliasError,
    BindingError,
    CorruptionError,
    IntegrityError,
    NotFoundError,
    PreconditionError,
    RainError,
    RevisionConflictError,
    ScaleMismatchError,
    UnknownEntityError,
)
from .graph import GraphDelta, diff_graphs, merge_entity, merge_norm, validate_graph
from .model import (
    AssessmentCriterion,
    FailOn,
    Feature,
    MaturityScale,
    Norm,
    RainGraph,
    ReviewedIntersection,
    Stakeholder,
    TestKind,
    Value,
    make_graph,
)
from .results import (
    GroupReport,
    aggregate_by,
    aggregate_value,
    bundle_json,
    is_ethical_compliant,
    project,
    report_bundle,
    what_if,
)
from .session import (
    INCOMPLETE,
    Activation,
    AssessmentItem,
    NormStatus,
    Outcome,
    Presence,
    Question,
    Session,
    active_norms,
    activated_values,
    assert_context,
    assessment_items,
    new_session,
    next_questions,
    norm_violation,
    record_answer,
)
from .store import ReplayResult, Revision, Store

__version__ = "0.1.0"
