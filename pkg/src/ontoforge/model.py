"""Core data model: the ontology triple of concepts, typed relations, and glossary.

An ontology is held as an immutable, validated value. Concepts are the
vertices of a directed labeled multigraph (the "ontograph"); edges carry a
relation type. Hierarchical relation types point from the more specific
concept to the more general one, and the subgraph they induce must be
acyclic so that concepts can be stratified into generalization levels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping

__all__ = [
    "Abstraction",
    "BUILTIN_RELATIONS",
    "Cardinality",
    "Composition",
    "Concept",
    "ConceptKind",
    "DanglingEdgeEndpointError",
    "Definition",
    "DuplicateConceptIdError",
    "DuplicateEdgeError",
    "Edge",
    "EmptyConceptSetError",
    "Generality",
    "HierarchicalCycleError",
    "Ontology",
    "OntologyError",
    "RelationType",
    "SelfLoopError",
    "UnknownConceptError",
    "UnknownRelationError",
    "build_ontology",
    "leaves",
    "roots",
    "slugify",
]


# --------------------------------------------------------------------------
# Identifier derivation

# Cyrillic-to-Latin table applied after casefolding. Soft/hard signs vanish.
_TRANSLIT = {
    "а": "a", "б": "b", "в": "v", "г": "g", "д": "d", "е": "e", "ё": "e",
    "ж": "zh", "з": "z", "и": "i", "й": "j", "к": "k", "л": "l", "м": "m",
    "н": "n", "о": "o", "п": "p", "р": "r", "с": "s", "т": "t", "у": "u",
    "ф": "f", "х": "h", "ц": "c", "ч": "ch", "ш": "sh", "щ": "shch",
    "ъ": "", "ы": "y", "ь": "", "э": "e", "ю": "yu", "я": "ya",
}

_NON_SLUG = re.compile(r"[^a-z0-9]+")


def slugify(name: str) -> str:
    """Derive a stable identifier from a concept name.

    Lowercases, transliterates Cyrillic, and collapses every other run of
    non-alphanumeric characters (whitespace, punctuation) into a single
    hyphen: ``"Цифровая ВМ"`` becomes ``"cifrovaya-vm"``.
    """
    folded = name.casefold()
    latin = "".join(_TRANSLIT.get(ch, ch) for ch in folded)
    return _NON_SLUG.sub("-", latin).strip("-")


# --------------------------------------------------------------------------
# Concept classification axes

class Generality(str, Enum):
    GENERIC = "generic"
    SPECIFIC = "specific"
    UNSPECIFIED = "unspecified"


class Composition(str, Enum):
    WHOLE = "whole"
    PART = "part"
    UNSPECIFIED = "unspecified"


class Cardinality(str, Enum):
    SINGULAR = "singular"
    GENERAL = "general"
    UNSPECIFIED = "unspecified"


class Abstraction(str, Enum):
    CONCRETE = "concrete"
    ABSTRACT = "abstract"
    UNSPECIFIED = "unspecified"


@dataclass(frozen=True)
class ConceptKind:
    """Classification of a concept along four independent axes.

    Every axis defaults to ``unspecified``; classifying a concept is
    optional.
    """

    generality: Generality = Generality.UNSPECIFIED
    composition: Composition = Composition.UNSPECIFIED
    cardinality: Cardinality = Cardinality.UNSPECIFIED
    abstraction: Abstraction = Abstraction.UNSPECIFIED

    def is_unspecified(self) -> bool:
        return self == ConceptKind()


UNSPECIFIED_KIND = ConceptKind()


# --------------------------------------------------------------------------
# Domain types

@dataclass(frozen=True)
class Concept:
    """A vertex of the ontograph.

    ``id`` is derived from ``name`` via :func:`slugify` when omitted.
    ``is_category`` marks membership in the categorical-level fragment
    through which independently built fragments are joined. ``defined`` is
    synchronized with the glossary by :func:`build_ontology`.
    """

    name: str
    id: str = ""
    kind: ConceptKind = UNSPECIFIED_KIND
    attributes: tuple[str, ...] = ()
    is_category: bool = False
    defined: bool = False

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise ValueError("concept name must be non-empty")
        if not self.id:
            object.__setattr__(self, "id", slugify(self.name))
        if not self.id:
            raise ValueError(f"cannot derive an id from name {self.name!r}")
        # attributes behave as an order-preserving set
        deduped = tuple(dict.fromkeys(self.attributes))
        if deduped != self.attributes:
            object.__setattr__(self, "attributes", deduped)


@dataclass(frozen=True)
class RelationType:
    """A typed relation between concepts.

    ``is_hierarchical`` relations participate in above-below ranking and
    always point from the more specific to the more general concept.
    ``is_partial_order`` relations additionally carry attribute
    inheritance; a partial order is hierarchical by definition, so the
    flag is promoted automatically.
    """

    id: str
    label: str
    is_partial_order: bool = False
    is_hierarchical: bool = False

    def __post_init__(self) -> None:
        if self.is_partial_order and not self.is_hierarchical:
            object.__setattr__(self, "is_hierarchical", True)


@dataclass(frozen=True)
class Edge:
    """A directed typed arc. For hierarchical relation types ``source`` is
    the more specific concept and ``target`` the more general one."""

    source: str
    target: str
    relation: str

    def triple(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.relation)


@dataclass(frozen=True)
class Definition:
    """A glossary entry: the interpretation of one concept.

    ``referenced`` lists the ids of other concepts detected in the
    definition text, ordered by first occurrence; it never contains the
    concept's own id. ``manual`` marks a definition authored by the
    ontology developer rather than sourced from a dictionary.
    """

    concept_id: str
    text: str
    referenced: tuple[str, ...] = ()
    attributes: tuple[str, ...] = ()
    manual: bool = False

    def __post_init__(self) -> None:
        cleaned = tuple(
            dict.fromkeys(r for r in self.referenced if r != self.concept_id)
        )
        if cleaned != self.referenced:
            object.__setattr__(self, "referenced", cleaned)


# Registry order follows the toolkit's public contract; the first four are
# hierarchical (they carry above-below ranking), and only genus_species is
# a partial order (attribute inheritance).
BUILTIN_RELATIONS: tuple[RelationType, ...] = (
    RelationType("genus_species", "род-вид", is_partial_order=True, is_hierarchical=True),
    RelationType("whole_part", "целое-часть", is_partial_order=False, is_hierarchical=True),
    RelationType("categorical", "категорное_отношение", is_partial_order=False, is_hierarchical=True),
    RelationType("set_element", "множество-элемент", is_partial_order=False, is_hierarchical=True),
    RelationType("participant", "участник"),
    RelationType("regulates", "регламентировать"),
    RelationType("is_characteristic_of", "быть_характеристикой"),
    RelationType("developed_by", "разработать"),
    RelationType("contained_in", "содержаться_в"),
)

_BUILTIN_IDS = frozenset(r.id for r in BUILTIN_RELATIONS)


# --------------------------------------------------------------------------
# Errors

class OntologyError(Exception):
    """Base class for validation failures.

    ``code`` is a stable machine-readable identifier; ``spans`` optionally
    carries (line, column) source positions attached by the DSL layer.
    """

    code = "OntologyError"

    def __init__(self, message: str):
        super().__init__(message)
        self.spans: tuple[tuple[int, int], ...] = ()


class EmptyConceptSetError(OntologyError):
    code = "EmptyConceptSet"

    def __init__(self) -> None:
        super().__init__("the concept set must be non-empty")


class DuplicateConceptIdError(OntologyError):
    code = "DuplicateConceptId"

    def __init__(self, concept_id: str):
        super().__init__(f"duplicate concept id {concept_id!r}")
        self.concept_id = concept_id


class UnknownRelationError(OntologyError):
    code = "UnknownRelation"

    def __init__(self, relation_id: str, edge: Edge | None = None):
        super().__init__(f"unknown relation type {relation_id!r}")
        self.relation_id = relation_id
        self.edge = edge


class SelfLoopError(OntologyError):
    code = "SelfLoop"

    def __init__(self, edge: Edge):
        super().__init__(
            f"edge {edge.source!r} -{edge.relation}-> {edge.target!r} loops on itself"
        )
        self.edge = edge


class DanglingEdgeEndpointError(OntologyError):
    code = "DanglingEdgeEndpoint"

    def __init__(self, edge: Edge, endpoint: str):
        super().__init__(
            f"edge endpoint {endpoint!r} does not name a known concept"
        )
        self.edge = edge
        self.endpoint = endpoint


class DuplicateEdgeError(OntologyError):
    code = "DuplicateEdge"

    def __init__(self, edge: Edge):
        super().__init__(
            f"duplicate edge {edge.source!r} -{edge.relation}-> {edge.target!r}"
        )
        self.edge = edge


class HierarchicalCycleError(OntologyError):
    code = "HierarchicalCycle"

    def __init__(self, cycle: tuple[str, ...]):
        super().__init__(
            "hierarchical relations form a cycle: " + " -> ".join(cycle)
        )
        self.cycle = cycle


class UnknownConceptError(OntologyError):
    code = "UnknownConcept"

    def __init__(self, concept_id: str):
        super().__init__(f"unknown concept id {concept_id!r}")
        self.concept_id = concept_id


# --------------------------------------------------------------------------
# The ontology value

@dataclass(frozen=True)
class Ontology:
    """The validated triple: concept set, typed edge set, relation registry,
    and glossary. Instances are immutable and safe to share across threads;
    construct them through :func:`build_ontology`."""

    name: str
    concepts: tuple[Concept, ...]
    edges: tuple[Edge, ...]
    relations: tuple[RelationType, ...]
    glossary: tuple[Definition, ...]

    @cached_property
    def concepts_by_id(self) -> dict[str, Concept]:
        return {c.id: c for c in self.concepts}

    @cached_property
    def relations_by_id(self) -> dict[str, RelationType]:
        return {r.id: r for r in self.relations}

    @cached_property
    def glossary_by_id(self) -> dict[str, Definition]:
        return {d.concept_id: d for d in self.glossary}

    @cached_property
    def hierarchical_edges(self) -> tuple[Edge, ...]:
        return tuple(
            e for e in self.edges if self.relations_by_id[e.relation].is_hierarchical
        )

    @cached_property
    def partial_order_edges(self) -> tuple[Edge, ...]:
        return tuple(
            e for e in self.edges if self.relations_by_id[e.relation].is_partial_order
        )

    @property
    def extra_relations(self) -> tuple[RelationType, ...]:
        """Relation types declared beyond the built-in registry."""
        return tuple(r for r in self.relations if r.id not in _BUILTIN_IDS)

    def concept(self, concept_id: str) -> Concept:
        try:
            return self.concepts_by_id[concept_id]
        except KeyError:
            raise UnknownConceptError(concept_id) from None


# --------------------------------------------------------------------------
# Construction and validation

def _find_hierarchical_cycle(
    concept_ids: list[str], hier_edges: list[Edge]
) -> tuple[str, ...] | None:
    """Kahn elimination over the hierarchical subgraph; on failure, walk the
    residue to extract one concrete cycle path (first and last id equal)."""
    targets: dict[str, list[str]] = {cid: [] for cid in concept_ids}
    outdeg: dict[str, int] = {cid: 0 for cid in concept_ids}
    for e in hier_edges:
        targets[e.source].append(e.target)
        outdeg[e.source] += 1
    # eliminate nodes whose every outgoing hierarchical arc leads to an
    # already eliminated node
    incoming: dict[str, list[str]] = {cid: [] for cid in concept_ids}
    for e in hier_edges:
        incoming[e.target].append(e.source)
    ready = [cid for cid in concept_ids if outdeg[cid] == 0]
    seen = 0
    while ready:
        node = ready.pop()
        seen += 1
        for src in incoming[node]:
            outdeg[src] -= 1
            if outdeg[src] == 0:
                ready.append(src)
    if seen == len(concept_ids):
        return None
    residue = {cid for cid in concept_ids if outdeg[cid] > 0}
    # every residue node has an outgoing arc into the residue: follow them
    start = sorted(residue)[0]
    path = [start]
    index = {start: 0}
    node = start
    while True:
        node = next(t for t in sorted(targets[node]) if t in residue)
        if node in index:
            return tuple(path[index[node]:] + [node])
        index[node] = len(path)
        path.append(node)


def build_ontology(
    name: str,
    concepts: Iterable[Concept],
    edges: Iterable[Edge] = (),
    glossary: Mapping[str, Definition] | None = None,
    extra_relations: Iterable[RelationType] = (),
) -> Ontology:
    """Validate and assemble an :class:`Ontology`.

    Checks run in a fixed order so that each malformed input maps to
    exactly one error: empty concept set, duplicate concept ids, then per
    edge (in input order) unknown relation / self loop / dangling endpoint
    / duplicate triple, then glossary keys, then hierarchical acyclicity.

    The result is canonical: concepts, edges, relations, and glossary
    entries are stored sorted, ``defined`` flags mirror the glossary, and
    re-validating an accepted ontology reproduces it unchanged.
    """
    concept_list = list(concepts)
    edge_list = list(edges)
    glossary = dict(glossary or {})

    if not concept_list:
        raise EmptyConceptSetError()

    seen_ids: set[str] = set()
    for c in concept_list:
        if c.id in seen_ids:
            raise DuplicateConceptIdError(c.id)
        seen_ids.add(c.id)

    registry: dict[str, RelationType] = {r.id: r for r in BUILTIN_RELATIONS}
    for r in extra_relations:
        if r.id in registry and registry[r.id] != r:
            raise ValueError(f"relation type {r.id!r} conflicts with an existing declaration")
        registry[r.id] = r

    seen_triples: set[tuple[str, str, str]] = set()
    for e in edge_list:
        if e.relation not in registry:
            raise UnknownRelationError(e.relation, e)
        if e.source == e.target:
            raise SelfLoopError(e)
        for endpoint in (e.source, e.target):
            if endpoint not in seen_ids:
                raise DanglingEdgeEndpointError(e, endpoint)
        if e.triple() in seen_triples:
            raise DuplicateEdgeError(e)
        seen_triples.add(e.triple())

    for key, definition in glossary.items():
        if key not in seen_ids:
            raise UnknownConceptError(key)
        if definition.concept_id != key:
            raise ValueError(
                f"glossary key {key!r} does not match definition of {definition.concept_id!r}"
            )

    hier = [e for e in edge_list if registry[e.relation].is_hierarchical]
    cycle = _find_hierarchical_cycle([c.id for c in concept_list], hier)
    if cycle is not None:
        raise HierarchicalCycleError(cycle)

    synced = tuple(
        replace(c, defined=(c.id in glossary)) if c.defined != (c.id in glossary) else c
        for c in sorted(concept_list, key=lambda c: c.id)
    )
    return Ontology(
        name=name,
        concepts=synced,
        edges=tuple(sorted(edge_list, key=Edge.triple)),
        relations=tuple(sorted(registry.values(), key=lambda r: r.id)),
        glossary=tuple(sorted(glossary.values(), key=lambda d: d.concept_id)),
    )


def roots(ontology: Ontology) -> list[str]:
    """Concepts with no concept above them: no outgoing hierarchical edge.
    Sorted by id."""
    below = {e.source for e in ontology.hierarchical_edges}
    return sorted(c.id for c in ontology.concepts if c.id not in below)


def leaves(ontology: Ontology) -> list[str]:
    """Concepts with no concept below them: no incoming hierarchical edge.
    Sorted by id."""
    above = {e.target for e in ontology.hierarchical_edges}
    return sorted(c.id for c in ontology.concepts if c.id not in above)
