class ElicitationError(Exception):
    pass


class PDDLSyntaxError(ElicitationError):
    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        super().__init__("{} (line {}, column {})".format(message, line, column))


class DomainError(ElicitationError):
    pass


class PartialSelection(ElicitationError):
    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__(
            "Selection misses %d condition(s): %s"
            % (len(self.missing), ", ".join(str(c) for c in self.missing))
        )


class UnknownCondition(ElicitationError):
    pass


class UnknownElement(ElicitationError):
    pass


class PreconditionViolated(ElicitationError):
    def __init__(self, action, missing):
        self.action = action
        self.missing = frozenset(missing)
        super().__init__(
            "{} is not applicable, missing {}".format(
                action, " ".join(str(a) for a in sorted(self.missing))
            )
        )


class SearchBudgetExceeded(ElicitationError):
    def __init__(self, expanded):
        self.expanded = expanded
        super().__init__("Search budget exceeded after %d expansions" % expanded)


class UnsolvableTask(ElicitationError):
    pass


class UnqueryableCondition(ElicitationError):
    def __init__(self, condition, reason):
        self.condition = condition
        self.reason = reason
        super().__init__("{}: {}".format(condition, reason))


class ScaleExceeded(ElicitationError):
    pass


class IllegalAnswer(ElicitationError):
    pass


class InconsistentOracle(ElicitationError):
    def __init__(self, query, answer, message=""):
        self.query = query
        self.answer = answer
        super().__init__(
            message or "Answer {} matches no inference row".format(answer)
        )


class OracleAborted(ElicitationError):
    pass


class IncompleteElicitation(ElicitationError):
    def __init__(self, unassigned):
        self.unassigned = tuple(unassigned)
        super().__init__(
            "No answer resolved: %s" % ", ".join(str(c) for c in self.unassigned)
        )


class InsufficientAtoms(ElicitationError):
    pass


class RecoveryFailure(ElicitationError):
    def __init__(self, seed, expected, elicited, message=""):
        self.seed = seed
        self.expected = expected
        self.elicited = elicited
        super().__init__(message or "Seed %s did not recover the hidden model" % seed)


class QueryBudgetExceeded(RecoveryFailure):
    def __init__(self, seed, queries, conditions, expected=None, elicited=None):
        self.queries = queries
        self.conditions = conditions
        super().__init__(
            seed,
            expected,
            elicited,
            "Seed %s asked %d queries for %d conditions" % (seed, queries, conditions),
        )
