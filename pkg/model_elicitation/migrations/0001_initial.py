import uuid

import django.db.models.deletion
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ElicitationSession",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "token",
                    models.UUIDField(db_index=True, default=uuid.uuid4, unique=True),
                ),
                (
                    "created",
                    models.DateTimeField(
                        default=django.utils.timezone.now, editable=False
                    ),
                ),
                ("finished", models.DateTimeField(blank=True, null=True)),
                ("domain_name", models.CharField(max_length=256)),
                ("problem_name", models.CharField(blank=True, max_length=256)),
                ("oracle_name", models.CharField(blank=True, max_length=64)),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("running", "running"),
                            ("complete", "complete"),
                            ("aborted", "aborted"),
                            ("inconsistent", "inconsistent oracle"),
                        ],
                        default="running",
                        max_length=20,
                    ),
                ),
                ("possible_count", models.PositiveIntegerField(default=0)),
                ("selection", models.JSONField(blank=True, default=dict)),
                ("error", models.TextField(blank=True)),
                ("val_count", models.PositiveIntegerField(default=0)),
                ("plan_count", models.PositiveIntegerField(default=0)),
                ("template_count", models.PositiveIntegerField(default=0)),
            ],
            options={
                "verbose_name": "elicitation session",
                "verbose_name_plural": "elicitation sessions",
                "ordering": ("-created",),
            },
        ),
        migrations.CreateModel(
            name="ExperimentResult",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "created",
                    models.DateTimeField(
                        default=django.utils.timezone.now, editable=False
                    ),
                ),
                ("domain", models.CharField(max_length=256)),
                ("possible_count", models.PositiveIntegerField()),
                ("avg_queries", models.FloatField()),
                ("avg_val", models.FloatField()),
                ("avg_plan", models.FloatField()),
                ("avg_template", models.FloatField()),
                ("avg_seconds", models.FloatField()),
                ("seeds", models.JSONField(default=list)),
                ("merges", models.PositiveIntegerField(default=0)),
            ],
            options={
                "ordering": ("domain", "possible_count", "-created"),
            },
        ),
        migrations.CreateModel(
            name="QuestionRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("position", models.PositiveIntegerField()),
                ("kind", models.CharField(max_length=20)),
                ("category", models.CharField(max_length=20)),
                ("targets", models.TextField(blank=True)),
                ("query", models.JSONField(default=dict)),
                ("answer_kind", models.CharField(max_length=20)),
                ("answer_plan", models.JSONField(blank=True, null=True)),
                ("assignments", models.JSONField(default=dict)),
                (
                    "created",
                    models.DateTimeField(
                        default=django.utils.timezone.now, editable=False
                    ),
                ),
                (
                    "session",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="questions",
                        to="model_elicitation.elicitationsession",
                    ),
                ),
            ],
            options={
                "ordering": ("session", "position"),
            },
        ),
        migrations.AddConstraint(
            model_name="questionrecord",
            constraint=models.UniqueConstraint(
                fields=("session", "position"),
                name="question_unique_position",
            ),
        ),
    ]
