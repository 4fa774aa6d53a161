"""Exception hierarchy.

Every error raised on bad input derives from :class:`EquiteamError` so the CLI
can turn it into a diagnostic and a nonzero exit status.
"""


class EquiteamError(Exception):
    """Base class for all package errors."""


class ContractError(EquiteamError, ValueError):
    """An operation was called with input violating its precondition."""


# survey

class SurveyError(EquiteamError, ValueError):
    """A response row failed validation.

    ``line`` is the 1-based line in the source file when known.
    """

    def __init__(self, roll, message, line=None):
        self.roll = roll
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}roll {roll!r}: {message}")


class DuplicateRoll(SurveyError):
    def __init__(self, roll, line=None):
        super().__init__(roll, "duplicate roll", line)


class MissingAnswer(SurveyError):
    def __init__(self, roll, question, line=None):
        self.question = question
        super().__init__(roll, f"missing answer to question {question}", line)


class InvalidCode(SurveyError):
    def __init__(self, roll, question, value, line=None):
        self.question = question
        self.value = value
        super().__init__(roll, f"invalid code {value!r} for question {question}", line)


class OptOutWithAnswers(SurveyError):
    def __init__(self, roll, line=None):
        super().__init__(roll, "opted out (1a) but carries socio-economic answers", line)


class InvalidRubric(EquiteamError, ValueError):
    pass


# partition

class PartitionError(EquiteamError, ValueError):
    pass


class InvalidTeamSize(PartitionError):
    pass


class CohortTooSmall(PartitionError):
    pass


class InstanceTooLarge(PartitionError):
    pass


# analytics

class AnalyticsError(EquiteamError, ValueError):
    pass


class EmptyInput(AnalyticsError):
    pass


class InvalidThresholds(AnalyticsError):
    pass


class DegenerateAxis(AnalyticsError):
    pass


# io

class FormatError(EquiteamError, ValueError):
    """A file does not match its documented layout."""
