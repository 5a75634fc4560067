from django.conf import settings

DEFAULTS = {
    "ELICITATION_SEARCH_BUDGET": 1_000_000,
    "ELICITATION_CHECK_BUDGET": 20_000,
    "ELICITATION_HEURISTIC": "hmax",
    "ELICITATION_ORDERING_MODEL": "con",
    "ELICITATION_INSTANCE_CANDIDATES": 4,
    "ELICITATION_MERGE_CHECK_LIMIT": 64,
    "ELICITATION_SYNTHETIC_FALLBACK": True,
    "ELICITATION_ORACLES": {
        "simulated": ("model_elicitation.oracle.SimulatedOracle", {}),
        "interactive": ("model_elicitation.oracle.InteractiveOracle", {}),
    },
    "ELICITATION_RECORD_SESSIONS": False,
    "ELICITATION_TRANSCRIPT_LOG": "",
    "ELICITATION_INJECT_RATIO": 0.5,
}


def get_setting(name):
    # The algorithmic modules run without a Django project, too.
    if not settings.configured:
        return DEFAULTS[name]
    return getattr(settings, name, DEFAULTS[name])
