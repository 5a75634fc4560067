from django.dispatch import Signal

session_started = Signal()
question_answered = Signal()
session_completed = Signal()
session_aborted = Signal()
experiment_finished = Signal()
