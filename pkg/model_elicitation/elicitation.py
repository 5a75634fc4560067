"""
Elicitation sessions: ask the queries of a plan, resolve each answer through
its inference table and return the localized model.
"""
import json
import logging
import uuid
from dataclasses import dataclass, field

from .annotated import concretize, presence_label
from .exceptions import (
    IncompleteElicitation,
    InconsistentOracle,
    OracleAborted,
)
from .oracle.answers import downgrade
from .query_gen import generate_all
from .signals import (
    question_answered,
    session_aborted,
    session_completed,
    session_started,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TranscriptEntry:
    query: object
    answer: object
    assignments: dict

    def to_dict(self, position):
        return {
            "position": position,
            "kind": self.query.kind,
            "category": self.query.category,
            "targets": [str(c) for c in self.query.targets],
            "answer": self.answer.kind,
            "answer_plan": (
                [str(k) for k in self.answer.plan]
                if self.answer.plan is not None
                else None
            ),
            "assignments": {
                str(c): presence_label(v) for c, v in self.assignments.items()
            },
        }


@dataclass
class Transcript:
    token: uuid.UUID = field(default_factory=uuid.uuid4)
    entries: list = field(default_factory=list)
    selection: dict = field(default_factory=dict)

    @property
    def counts(self):
        counts = {"val": 0, "plan": 0, "template": 0}
        for entry in self.entries:
            counts[entry.query.category] += 1
        return counts

    def __len__(self):
        return len(self.entries)

    def to_text(self):
        parts = []
        for number, entry in enumerate(self.entries, 1):
            parts.append("[question {}]\n".format(number))
            parts.append(entry.query.to_text())
            parts.append("answer: {}\n".format(entry.answer))
            for condition, value in sorted(
                entry.assignments.items(), key=lambda item: item[0].sort_key
            ):
                parts.append("  {} {}\n".format(presence_label(value), condition))
            parts.append("\n")
        parts.append("final:\n")
        for condition, value in sorted(
            self.selection.items(), key=lambda item: item[0].sort_key
        ):
            parts.append("  {} {}\n".format(presence_label(value), condition))
        return "".join(parts)

    def to_jsonl(self):
        return "".join(
            json.dumps(entry.to_dict(number), sort_keys=True) + "\n"
            for number, entry in enumerate(self.entries, 1)
        )


@dataclass(frozen=True)
class ElicitedModel:
    model: object
    transcript: Transcript

    @property
    def selection(self):
        return self.model.selection


def infer(query, answer):
    return query.infer(answer)


def run_session(task, init_e, oracle, query_plan=None, order=None, oracle_name=""):
    """
    Ask every query of ``query_plan`` (generated when omitted) in the given
    order. ``order`` is an optional permutation of query indexes.
    """
    if query_plan is None:
        query_plan = generate_all(task, init_e)
    queries = list(query_plan.queries)
    if order is not None:
        queries = [queries[i] for i in order]

    transcript = Transcript()
    sender = oracle.__class__
    session_started.send(
        sender=sender,
        token=transcript.token,
        task=task,
        oracle_name=oracle_name or oracle.name,
    )
    logger.info(
        "Starting session %s with %d queries for %d conditions",
        transcript.token,
        len(queries),
        task.n,
    )
    try:
        for query in queries:
            if all(t in transcript.selection for t in query.targets):
                logger.debug("Skipping query, targets already assigned")
                continue
            answer = downgrade(oracle.answer(query), query.needs_plan)
            assignments = infer(query, answer)
            for condition, value in assignments.items():
                known = transcript.selection.get(condition)
                if known is not None and known != value:
                    raise InconsistentOracle(
                        query,
                        answer,
                        "{} was {} and is now {}".format(
                            condition, presence_label(known), presence_label(value)
                        ),
                    )
            transcript.selection.update(assignments)
            entry = TranscriptEntry(query, answer, assignments)
            transcript.entries.append(entry)
            question_answered.send(
                sender=sender,
                token=transcript.token,
                position=len(transcript.entries),
                entry=entry,
            )
        unassigned = [c for c in task.conditions if c not in transcript.selection]
        if unassigned:
            raise IncompleteElicitation(unassigned)
    except (OracleAborted, InconsistentOracle, IncompleteElicitation) as e:
        logger.warning("Session %s aborted: %s", transcript.token, e)
        session_aborted.send(
            sender=sender, token=transcript.token, transcript=transcript, error=e
        )
        raise
    finally:
        oracle.close()

    model = concretize(task, transcript.selection, label="elicited")
    session_completed.send(
        sender=sender, token=transcript.token, transcript=transcript, model=model
    )
    logger.info(
        "Session %s finished after %d questions", transcript.token, len(transcript)
    )
    return ElicitedModel(model=model, transcript=transcript)
