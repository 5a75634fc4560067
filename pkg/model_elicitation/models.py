import uuid

from django.db import models
from django.utils import timezone
from django.utils.translation import gettext_lazy as _


class SessionStatus(models.TextChoices):
    RUNNING = "running", _("running")
    COMPLETE = "complete", _("complete")
    ABORTED = "aborted", _("aborted")
    INCONSISTENT = "inconsistent", _("inconsistent oracle")


class ElicitationSession(models.Model):
    token = models.UUIDField(default=uuid.uuid4, db_index=True, unique=True)
    created = models.DateTimeField(default=timezone.now, editable=False)
    finished = models.DateTimeField(null=True, blank=True)

    domain_name = models.CharField(max_length=256)
    problem_name = models.CharField(max_length=256, blank=True)
    oracle_name = models.CharField(max_length=64, blank=True)
    status = models.CharField(
        max_length=20, choices=SessionStatus.choices, default=SessionStatus.RUNNING
    )
    possible_count = models.PositiveIntegerField(default=0)
    selection = models.JSONField(default=dict, blank=True)
    error = models.TextField(blank=True)

    val_count = models.PositiveIntegerField(default=0)
    plan_count = models.PositiveIntegerField(default=0)
    template_count = models.PositiveIntegerField(default=0)

    class Meta:
        ordering = ("-created",)
        verbose_name = _("elicitation session")
        verbose_name_plural = _("elicitation sessions")

    def __str__(self):
        return "{} ({})".format(self.domain_name, self.get_status_display())

    @property
    def question_count(self):
        return self.val_count + self.plan_count + self.template_count


class QuestionRecord(models.Model):
    session = models.ForeignKey(
        ElicitationSession, on_delete=models.CASCADE, related_name="questions"
    )
    position = models.PositiveIntegerField()
    kind = models.CharField(max_length=20)
    category = models.CharField(max_length=20)
    targets = models.TextField(blank=True)
    query = models.JSONField(default=dict)
    answer_kind = models.CharField(max_length=20)
    answer_plan = models.JSONField(null=True, blank=True)
    assignments = models.JSONField(default=dict)
    created = models.DateTimeField(default=timezone.now, editable=False)

    class Meta:
        ordering = ("session", "position")
        constraints = [
            models.UniqueConstraint(
                fields=("session", "position"), name="question_unique_position"
            ),
        ]

    def __str__(self):
        return "#{} {} -> {}".format(self.position, self.kind, self.answer_kind)


class ExperimentResult(models.Model):
    created = models.DateTimeField(default=timezone.now, editable=False)
    domain = models.CharField(max_length=256)
    possible_count = models.PositiveIntegerField()
    avg_queries = models.FloatField()
    avg_val = models.FloatField()
    avg_plan = models.FloatField()
    avg_template = models.FloatField()
    avg_seconds = models.FloatField()
    seeds = models.JSONField(default=list)
    merges = models.PositiveIntegerField(default=0)

    class Meta:
        ordering = ("domain", "possible_count", "-created")

    def __str__(self):
        return "{} |p|={}".format(self.domain, self.possible_count)

    def as_row(self):
        return {
            "domain": self.domain,
            "possible_count": self.possible_count,
            "avg_queries": self.avg_queries,
            "avg_val": self.avg_val,
            "avg_plan": self.avg_plan,
            "avg_template": self.avg_template,
            "avg_seconds": self.avg_seconds,
        }
