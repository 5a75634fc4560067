from django.contrib import admin
from django.contrib.admin.filters import SimpleListFilter
from django.core.exceptions import PermissionDenied
from django.utils.translation import gettext_lazy as _

from .experiments import CSV_COLUMNS
from .models import ElicitationSession, ExperimentResult, QuestionRecord
from .utils import dicts_to_csv_response


class FinishedFilter(SimpleListFilter):
    title = _("finished")
    parameter_name = "finished"

    def lookups(self, request, model_admin):
        return (
            ("yes", _("Finished")),
            ("no", _("Still running")),
        )

    def queryset(self, request, queryset):
        if self.value() == "yes":
            return queryset.filter(finished__isnull=False)
        if self.value() == "no":
            return queryset.filter(finished__isnull=True)
        return queryset


class QuestionRecordInline(admin.TabularInline):
    model = QuestionRecord
    extra = 0
    readonly_fields = (
        "position",
        "kind",
        "category",
        "targets",
        "answer_kind",
        "answer_plan",
        "assignments",
    )
    exclude = ("query",)
    can_delete = False


class ElicitationSessionAdmin(admin.ModelAdmin):
    list_display = (
        "domain_name",
        "problem_name",
        "oracle_name",
        "status",
        "possible_count",
        "question_count",
        "created",
        "finished",
    )
    list_filter = (
        "status",
        "oracle_name",
        "domain_name",
        FinishedFilter,
    )
    search_fields = ("domain_name", "problem_name", "token")
    date_hierarchy = "created"
    readonly_fields = ("token", "created", "finished", "selection", "error")
    inlines = [QuestionRecordInline]
    actions = ["export_sessions"]

    def question_count(self, obj):
        return obj.question_count

    question_count.short_description = _("questions")

    def export_sessions(self, request, queryset):
        if not self.has_view_permission(request):
            raise PermissionDenied

        def get_rows(queryset):
            for session in queryset:
                yield {
                    "token": str(session.token),
                    "domain": session.domain_name,
                    "problem": session.problem_name,
                    "oracle": session.oracle_name,
                    "status": session.status,
                    "possible_count": session.possible_count,
                    "val": session.val_count,
                    "plan": session.plan_count,
                    "template": session.template_count,
                    "created": session.created.isoformat(),
                }

        return dicts_to_csv_response(get_rows(queryset), name="sessions.csv")

    export_sessions.short_description = _("Export sessions as CSV")


class QuestionRecordAdmin(admin.ModelAdmin):
    raw_id_fields = ("session",)
    list_display = ("session", "position", "kind", "category", "answer_kind")
    list_filter = ("kind", "category", "answer_kind")
    search_fields = ("targets",)


class ExperimentResultAdmin(admin.ModelAdmin):
    list_display = CSV_COLUMNS + ("merges", "created")
    list_filter = ("domain",)
    date_hierarchy = "created"
    actions = ["export_csv"]

    def export_csv(self, request, queryset):
        if not self.has_view_permission(request):
            raise PermissionDenied
        return dicts_to_csv_response(
            (result.as_row() for result in queryset), name="experiments.csv"
        )

    export_csv.short_description = _("Export rows as CSV")


admin.site.register(ElicitationSession, ElicitationSessionAdmin)
admin.site.register(QuestionRecord, QuestionRecordAdmin)
admin.site.register(ExperimentResult, ExperimentResultAdmin)
