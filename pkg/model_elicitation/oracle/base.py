from django.utils.module_loading import import_string

from ..conf import get_setting


class BaseOracle:
    """
    Answers queries on behalf of the hidden model.
    """

    name = ""

    def __init__(self, task=None, **kwargs):
        self.task = task

    def answer(self, query):
        raise NotImplementedError

    def close(self):
        pass


def oracle_factory(name, **kwargs):
    oracles = get_setting("ELICITATION_ORACLES")
    try:
        path, config = oracles[name]
    except KeyError:
        raise ValueError("Unknown oracle %s" % name) from None
    oracle_class = import_string(path)
    options = dict(config)
    options.update(kwargs)
    return oracle_class(**options)
