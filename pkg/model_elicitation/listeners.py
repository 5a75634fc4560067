import logging

from django.utils import timezone

from .conf import get_setting
from .exceptions import InconsistentOracle
from .models import (
    ElicitationSession,
    ExperimentResult,
    QuestionRecord,
    SessionStatus,
)

logger = logging.getLogger(__name__)


def recording_enabled():
    return get_setting("ELICITATION_RECORD_SESSIONS")


def _selection_data(selection):
    return {str(c): bool(v) for c, v in selection.items()}


def start_session(sender=None, token=None, task=None, oracle_name="", **kwargs):
    if not recording_enabled():
        return
    ElicitationSession.objects.create(
        token=token,
        domain_name=task.domain.name,
        problem_name=task.problem.name,
        oracle_name=oracle_name,
        possible_count=task.n,
    )
    logger.info("Recording elicitation session %s", token)


def record_question(sender=None, token=None, position=None, entry=None, **kwargs):
    if not recording_enabled():
        return
    session = ElicitationSession.objects.filter(token=token).first()
    if session is None:
        logger.warning("Question for unknown session %s", token)
        return
    data = entry.to_dict(position)
    QuestionRecord.objects.create(
        session=session,
        position=position,
        kind=data["kind"],
        category=data["category"],
        targets=" ".join(data["targets"]),
        query=entry.query.to_dict(),
        answer_kind=data["answer"],
        answer_plan=data["answer_plan"],
        assignments=data["assignments"],
    )


def complete_session(sender=None, token=None, transcript=None, **kwargs):
    if not recording_enabled():
        return
    counts = transcript.counts
    ElicitationSession.objects.filter(token=token).update(
        status=SessionStatus.COMPLETE,
        finished=timezone.now(),
        selection=_selection_data(transcript.selection),
        val_count=counts["val"],
        plan_count=counts["plan"],
        template_count=counts["template"],
    )


def abort_session(sender=None, token=None, transcript=None, error=None, **kwargs):
    if not recording_enabled():
        return
    status = SessionStatus.ABORTED
    if isinstance(error, InconsistentOracle):
        status = SessionStatus.INCONSISTENT
    ElicitationSession.objects.filter(token=token).update(
        status=status,
        finished=timezone.now(),
        selection=_selection_data(transcript.selection),
        error=str(error),
    )


def store_experiment(sender=None, config=None, row=None, **kwargs):
    if not recording_enabled():
        return
    ExperimentResult.objects.create(
        domain=row.domain,
        possible_count=row.possible_count,
        avg_queries=row.avg_queries,
        avg_val=row.avg_val,
        avg_plan=row.avg_plan,
        avg_template=row.avg_template,
        avg_seconds=row.avg_seconds,
        seeds=list(row.seeds),
        merges=row.merges,
    )
