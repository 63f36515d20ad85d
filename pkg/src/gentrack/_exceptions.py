from typing import Optional


class ConfigError(RuntimeError):
    def __init__(self, key: str, message: str, *, lineno: Optional[int] = None) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message
        self.lineno = lineno


class ConfigErrors(RuntimeError):
    def __init__(self, errors: list[ConfigError]) -> None:
        super().__init__("; ".join(str(error) for error in errors))
        self.errors = errors


class ParseError(RuntimeError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(message)
        self.lineno = lineno
        self.message = message


class ParseErrors(RuntimeError):
    def __init__(self, errors: list[ParseError]) -> None:
        super().__init__("; ".join(f"line {e.lineno}: {e.message}" for e in errors))
        self.errors = errors


class SequenceError(RuntimeError):
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class FrameOrderError(RuntimeError):
    def __init__(self, index: int, last_index: int) -> None:
        message = f"frame {index} does not follow frame {last_index}"
        super().__init__(message)
        self.index = index
        self.last_index = last_index
        self.message = message


class EvaluationError(RuntimeError):
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message
