from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class ModelElicitationConfig(AppConfig):
    name = "model_elicitation"
    verbose_name = _("Model Elicitation")
    default_auto_field = "django.db.models.BigAutoField"

    def ready(self):
        from .listeners import (
            abort_session,
            complete_session,
            record_question,
            start_session,
            store_experiment,
        )
        from .signals import (
            experiment_finished,
            question_answered,
            session_aborted,
            session_completed,
            session_started,
        )

        session_started.connect(start_session)
        question_answered.connect(record_question)
        session_completed.connect(complete_session)
        session_aborted.connect(abort_session)
        experiment_finished.connect(store_experiment)
