"""Typed domain model for KnowsRecord v0.9.

Every entity and metadata block of the sidecar format is represented by an
immutable dataclass.  Enumerated fields are stored as plain strings so that a
record loaded from disk can carry out-of-vocabulary values for the linter to
report; the closed vocabularies themselves live in the ``*_VALUES`` frozensets
below and in the corresponding ``enum.Enum`` classes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Optional

from .errors import MalformedError, UnknownPrefixError

SCHEMA_URI = "https://knows.dev/schema/record-0.9.json"

# ID prefixes and the entity class each one names.
ID_PREFIXES = ("art", "stmt", "ev", "rel", "act", "rep")
PREFIX_CLASS = {
    "art": "artifact",
    "stmt": "statement",
    "ev": "evidence",
    "rel": "relation",
    "act": "action",
    "rep": "representation",
}


class ArtifactType(str, Enum):
    PAPER = "paper"
    REPOSITORY = "repository"
    DATASET = "dataset"
    MODEL = "model"
    BENCHMARK = "benchmark"
    SOFTWARE = "software"
    WEBSITE = "website"
    OTHER = "other"


class ArtifactRole(str, Enum):
    SUBJECT = "subject"
    SUPPORTING = "supporting"
    CITED = "cited"


class StatementType(str, Enum):
    CLAIM = "claim"
    ASSUMPTION = "assumption"
    LIMITATION = "limitation"
    METHOD = "method"
    QUESTION = "question"
    DEFINITION = "definition"


class StatementStatus(str, Enum):
    ASSERTED = "asserted"
    RETRACTED = "retracted"
    SUPERSEDED = "superseded"
    UNDER_REVIEW = "under_review"


class Modality(str, Enum):
    EMPIRICAL = "empirical"
    THEORETICAL = "theoretical"
    DESCRIPTIVE = "descriptive"
    NORMATIVE = "normative"


class EvidenceType(str, Enum):
    TABLE_RESULT = "table_result"
    FIGURE = "figure"
    EXPERIMENT_RUN = "experiment_run"
    CITATION_BACKED = "citation_backed"
    ARTIFACT_RUN = "artifact_run"
    PROOF = "proof"
    CASE_STUDY = "case_study"
    CLINICAL_TRIAL = "clinical_trial"
    SURVEY_RESULT = "survey_result"
    QUALITATIVE_ANALYSIS = "qualitative_analysis"
    STATISTICAL_TEST = "statistical_test"
    OBSERVATION = "observation"
    SIMULATION = "simulation"
    OTHER = "other"


class Predicate(str, Enum):
    SUPPORTED_BY = "supported_by"
    CHALLENGED_BY = "challenged_by"
    DEPENDS_ON = "depends_on"
    LIMITED_BY = "limited_by"
    USES = "uses"
    EVALUATES_ON = "evaluates_on"
    IMPLEMENTS = "implements"
    DOCUMENTS = "documents"
    CITES = "cites"
    SAME_AS = "same_as"
    SUPERSEDES = "supersedes"
    RETRACTS = "retracts"


class CitationIntent(str, Enum):
    SUPPORTS = "supports"
    EXTENDS = "extends"
    USES_METHOD = "uses_method"
    COMPARES_TO = "compares_to"
    CONTRADICTS = "contradicts"
    REVIEWS = "reviews"
    CITES_DATA = "cites_data"
    BACKGROUND = "background"
    OTHER = "other"


class ActionType(str, Enum):
    DOWNLOAD = "download"
    RUN = "run"
    QUERY = "query"
    DEPLOY = "deploy"
    OTHER = "other"


class SideEffects(str, Enum):
    NONE = "none"
    TEMPORARY_FILES_ONLY = "temporary_files_only"
    PERSISTENT = "persistent"
    EXTERNAL = "external"


class InterfaceKind(str, Enum):
    HTTP = "http"
    CLI = "cli"
    OTHER = "other"


class Origin(str, Enum):
    AUTHOR = "author"
    THIRD_PARTY = "third_party"
    MACHINE = "machine"
    OTHER = "other"


class ActorType(str, Enum):
    PERSON = "person"
    ORGANIZATION = "organization"
    AGENT = "agent"


class ConfidenceLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class UpdatePolicy(str, Enum):
    VERSIONED = "versioned"
    LIVING = "living"
    FROZEN = "frozen"


class LocatorType(str, Enum):
    PATH = "path"
    URL = "url"


class AnchorLocatorType(str, Enum):
    SECTION = "section"
    TABLE = "table"
    FIGURE = "figure"
    PAGE = "page"
    EQUATION = "equation"
    OTHER = "other"


class CoverageStatements(str, Enum):
    NONE = "none"
    PARTIAL = "partial"
    MAIN_CLAIMS_ONLY = "main_claims_only"
    FULL = "full"


class CoverageEvidence(str, Enum):
    NONE = "none"
    PARTIAL = "partial"
    KEY_EVIDENCE_ONLY = "key_evidence_only"
    FULL = "full"


class RecordStatus(str, Enum):
    ACTIVE = "active"
    SUPERSEDED = "superseded"
    RETRACTED = "retracted"


class MetadataStandard(str, Enum):
    DATACITE = "datacite"
    CODEMETA = "codemeta"
    CITATION_CFF = "citation_cff"
    CROISSANT = "croissant"
    MODEL_CARD = "model_card"
    RO_CRATE = "ro_crate"


def enum_values(cls: type[Enum]) -> frozenset[str]:
    return frozenset(m.value for m in cls)


# ---------------------------------------------------------------------------
# Identifiers and references


@dataclass(frozen=True)
class EntityId:
    """A prefixed local identifier, rendered ``<prefix>:<local>``."""

    prefix: str
    local: str

    def __str__(self) -> str:
        return f"{self.prefix}:{self.local}"

    @property
    def entity_class(self) -> str:
        return PREFIX_CLASS[self.prefix]


@dataclass(frozen=True)
class Ref:
    """A local entity reference, or a remote one qualified by a record_id."""

    entity: EntityId
    record_id: Optional[str] = None

    @property
    def is_remote(self) -> bool:
        return self.record_id is not None

    def __str__(self) -> str:
        if self.record_id is not None:
            return f"{self.record_id}#{self.entity}"
        return str(self.entity)


_LOCAL_FORBIDDEN = re.compile(r"[#\s]")


def parse_entity_id(text: str) -> EntityId:
    """Parse ``<prefix>:<local>`` into an :class:`EntityId`.

    Raises :class:`UnknownPrefixError` for a prefix outside the closed set and
    :class:`MalformedError` for a missing colon, empty local part, embedded
    whitespace, or an embedded ``#``.
    """
    if not isinstance(text, str) or ":" not in text:
        raise MalformedError(f"entity id must be '<prefix>:<local>': {text!r}")
    prefix, _, local = text.partition(":")
    if not local or _LOCAL_FORBIDDEN.search(local):
        raise MalformedError(f"bad local part in entity id: {text!r}")
    if prefix not in ID_PREFIXES:
        raise UnknownPrefixError(f"unknown id prefix {prefix!r} in {text!r}")
    return EntityId(prefix, local)


def parse_ref(text: str) -> Ref:
    """Parse a local or ``record_id#local_id`` cross-record reference."""
    if not isinstance(text, str):
        raise MalformedError(f"reference must be a string: {text!r}")
    if text.count("#") > 1:
        raise MalformedError(f"reference admits at most one '#': {text!r}")
    if "#" in text:
        record_id, _, local = text.partition("#")
        if not record_id:
            raise MalformedError(f"empty record_id in reference: {text!r}")
        return Ref(parse_entity_id(local), record_id=record_id)
    return Ref(parse_entity_id(text))


@dataclass(frozen=True)
class SpecVersion:
    major: int
    minor: int
    patch: int

    def __str__(self) -> str:
        return f"{self.major}.{self.minor}.{self.patch}"


_SEMVER_RE = re.compile(r"^(\d+)\.(\d+)\.(\d+)$")


def parse_spec_version(text: str) -> SpecVersion:
    m = _SEMVER_RE.match(text) if isinstance(text, str) else None
    if m is None:
        raise MalformedError(f"version must be a dotted triple 'M.m.p': {text!r}")
    return SpecVersion(int(m.group(1)), int(m.group(2)), int(m.group(3)))


def reader_accepts(record_version: SpecVersion, reader_version: SpecVersion) -> bool:
    """A reader refuses records whose major version exceeds its own."""
    return record_version.major <= reader_version.major


@dataclass(frozen=True)
class Profile:
    name: str
    major: int

    def __str__(self) -> str:
        return f"{self.name}@{self.major}"


def parse_profile(text: str) -> Profile:
    """Parse ``<name>@<major>``; the major version must be a positive integer."""
    if not isinstance(text, str) or "@" not in text:
        raise MalformedError(f"profile must be '<name>@<major>': {text!r}")
    name, _, major_text = text.rpartition("@")
    if not name:
        raise MalformedError(f"empty profile name: {text!r}")
    if not major_text.isdigit() or int(major_text) < 1:
        raise MalformedError(f"profile major must be a positive integer: {text!r}")
    return Profile(name, int(major_text))


# ---------------------------------------------------------------------------
# Entity building blocks


@dataclass(frozen=True)
class Identifiers:
    doi: Optional[str] = None
    arxiv: Optional[str] = None
    isbn: Optional[str] = None
    url: Optional[str] = None

    def any_present(self) -> bool:
        return any(v is not None for v in (self.doi, self.arxiv, self.isbn, self.url))


@dataclass(frozen=True)
class Locator:
    type: str
    value: str


@dataclass(frozen=True)
class Representation:
    id: EntityId
    media_type: str
    locator: Locator


@dataclass(frozen=True)
class SourceAnchor:
    representation_ref: EntityId
    locator_type: str
    locator: str


@dataclass(frozen=True)
class Confidence:
    claim_strength: str
    extraction_fidelity: str


@dataclass(frozen=True)
class Observation:
    metric: str
    value: Optional[float] = None
    unit: Optional[str] = None
    qualitative_value: Optional[str] = None


@dataclass(frozen=True)
class Actor:
    name: str
    type: str


@dataclass(frozen=True)
class Provenance:
    origin: str
    actor: Actor
    generated_at: str
    method: Optional[str] = None
    verification: Optional[str] = None
    x_extensions: Optional[dict[str, Any]] = None


@dataclass(frozen=True)
class SafetyPolicy:
    sandbox_required: bool
    network: bool
    secrets_required: bool
    side_effects: str


@dataclass(frozen=True)
class ActionInterface:
    kind: str
    locator: str


@dataclass(frozen=True)
class Artifact:
    id: EntityId
    artifact_type: str
    role: str
    title: str
    identifiers: Optional[Identifiers] = None
    representations: tuple[Representation, ...] = ()
    x_extensions: Optional[dict[str, Any]] = None


@dataclass(frozen=True)
class Statement:
    id: EntityId
    statement_type: str
    text: str
    about_ref: Ref
    status: str
    modality: Optional[str] = None
    source_anchors: tuple[SourceAnchor, ...] = ()
    confidence: Optional[Confidence] = None
    provenance: Optional[Provenance] = None
    x_extensions: Optional[dict[str, Any]] = None


@dataclass(frozen=True)
class Evidence:
    id: EntityId
    evidence_type: str
    summary: str
    source_anchors: tuple[SourceAnchor, ...] = ()
    observations: tuple[Observation, ...] = ()
    provenance: Optional[Provenance] = None
    x_extensions: Optional[dict[str, Any]] = None


@dataclass(frozen=True)
class Relation:
    id: EntityId
    subject_ref: Ref
    predicate: str
    object_ref: Ref
    citation_intent: Optional[str] = None
    x_extensions: Optional[dict[str, Any]] = None


@dataclass(frozen=True)
class Action:
    id: EntityId
    action_type: str
    label: str
    target_ref: Ref
    interface: ActionInterface
    safety: SafetyPolicy
    x_extensions: Optional[dict[str, Any]] = None


# ---------------------------------------------------------------------------
# Record-level metadata


@dataclass(frozen=True)
class VersionTriple:
    spec: SpecVersion
    record: str
    source: str


@dataclass(frozen=True)
class Freshness:
    as_of: str
    update_policy: str
    stale_after: Optional[str] = None


@dataclass(frozen=True)
class Coverage:
    statements: str
    evidence: str


@dataclass(frozen=True)
class Author:
    name: str
    affiliation: Optional[str] = None
    role: Optional[str] = None
    orcid: Optional[str] = None


@dataclass(frozen=True)
class ExternalMetadataRef:
    standard: str
    locator: str


# Root fields in canonical order.  The first seventeen are required; the rest
# are optional.  The root rejects any key outside this set.
ROOT_REQUIRED_FIELDS = (
    "$schema",
    "knows_version",
    "record_id",
    "profile",
    "subject_ref",
    "title",
    "summary",
    "authors",
    "license",
    "coverage",
    "artifacts",
    "statements",
    "evidence",
    "relations",
    "provenance",
    "version",
    "freshness",
)
ROOT_OPTIONAL_FIELDS = (
    "abstract",
    "venue",
    "year",
    "keywords",
    "record_status",
    "replaces",
    "actions",
    "resources",
    "external_metadata_refs",
    "extensions",
)
ROOT_FIELDS = ROOT_REQUIRED_FIELDS + ROOT_OPTIONAL_FIELDS


@dataclass(frozen=True)
class KnowsRecord:
    """Root sidecar document.

    Instances are value objects: two records loaded from differently ordered
    YAML compare equal.  The originating document tree (used by lint check 1)
    rides along outside the value via :mod:`knows_sidecar.serialization`.
    """

    schema_uri: str
    knows_version: SpecVersion
    record_id: str
    profile: Profile
    subject_ref: EntityId
    title: str
    summary: str
    authors: tuple[Author, ...]
    license: str
    coverage: Coverage
    artifacts: tuple[Artifact, ...]
    statements: tuple[Statement, ...]
    evidence: tuple[Evidence, ...]
    relations: tuple[Relation, ...]
    provenance: Provenance
    version: VersionTriple
    freshness: Freshness
    abstract: Optional[str] = None
    venue: Optional[str] = None
    year: Optional[int] = None
    keywords: tuple[str, ...] = ()
    record_status: Optional[str] = None
    replaces: Optional[str] = None
    actions: tuple[Action, ...] = ()
    resources: tuple[Any, ...] = ()
    external_metadata_refs: tuple[ExternalMetadataRef, ...] = ()
    extensions: Optional[dict[str, Any]] = None

    def all_entity_ids(self) -> list[tuple[EntityId, str]]:
        """Every entity ID in the record with the path of its owner."""
        out: list[tuple[EntityId, str]] = []
        for i, art in enumerate(self.artifacts):
            out.append((art.id, f"artifacts/{i}"))
            for j, rep in enumerate(art.representations):
                out.append((rep.id, f"artifacts/{i}/representations/{j}"))
        for i, stmt in enumerate(self.statements):
            out.append((stmt.id, f"statements/{i}"))
        for i, ev in enumerate(self.evidence):
            out.append((ev.id, f"evidence/{i}"))
        for i, rel in enumerate(self.relations):
            out.append((rel.id, f"relations/{i}"))
        for i, act in enumerate(self.actions):
            out.append((act.id, f"actions/{i}"))
        return out

    def entity_index(self) -> dict[str, Any]:
        """Rendered entity ID -> entity, first occurrence wins."""
        index: dict[str, Any] = {}
        entities: list[Any] = list(self.artifacts)
        for art in self.artifacts:
            entities.extend(art.representations)
        entities.extend(self.statements)
        entities.extend(self.evidence)
        entities.extend(self.relations)
        entities.extend(self.actions)
        for entity in entities:
            index.setdefault(str(entity.id), entity)
        return index

    def subject_artifact(self) -> Optional[Artifact]:
        for art in self.artifacts:
            if str(art.id) == str(self.subject_ref):
                return art
        return None


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC 3339 timestamp; raises :class:`MalformedError`."""
    if not isinstance(text, str):
        raise MalformedError(f"timestamp must be a string: {text!r}")
    try:
        return datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise MalformedError(f"bad timestamp {text!r}") from exc


def is_timestamp(text: Any) -> bool:
    try:
        parse_timestamp(text)
    except MalformedError:
        return False
    return True
