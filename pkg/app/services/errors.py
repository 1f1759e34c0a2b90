from __future__ import annotations


class StepCrnError(Exception):
    """Base class for every error the toolchain reports to its callers."""


class NetlistError(StepCrnError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            position = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{position}: {message}"
        super().__init__(message)


class CircuitValidationError(StepCrnError):
    pass


class EncodingError(StepCrnError):
    pass


class AlphabetMismatchError(StepCrnError):
    pass


class RuleNotApplicableError(StepCrnError):
    pass


class StepBudgetExceededError(StepCrnError):
    pass


class StateCapExceededError(StepCrnError):
    pass


class DecodeError(StepCrnError):
    AMBIGUOUS = "AMBIGUOUS"
    MISSING = "MISSING"

    def __init__(self, kind: str, output: int):
        self.kind = kind
        self.output = output
        super().__init__(f"{kind}({output})")


class CompilationError(StepCrnError):
    pass


class DemandOverflowError(CompilationError):
    def __init__(self, gate: int, demand: int, capacity: int):
        self.gate = gate
        self.demand = demand
        self.capacity = capacity
        super().__init__(f"gate {gate} needs {demand} copies, above count capacity {capacity}")


class ProgramFormatError(StepCrnError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SFunctionSpecError(StepCrnError):
    pass


class CorpusSpecError(StepCrnError):
    pass
