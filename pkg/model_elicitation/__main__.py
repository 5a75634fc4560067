import sys

import django
from django.conf import settings
from django.core.management import execute_from_command_line


def configure():
    settings.configure(
        INSTALLED_APPS=["model_elicitation"],
        TEMPLATES=[
            {
                "BACKEND": "django.template.backends.django.DjangoTemplates",
                "APP_DIRS": True,
            }
        ],
        USE_TZ=True,
        LOGGING={
            "version": 1,
            "disable_existing_loggers": False,
            "handlers": {"console": {"class": "logging.StreamHandler"}},
            "loggers": {"model_elicitation": {"handlers": ["console"]}},
        },
    )
    django.setup()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    configure()
    execute_from_command_line(["model_elicitation", "elicit", *argv])


if __name__ == "__main__":
    main()
