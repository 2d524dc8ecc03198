"""Exception hierarchy shared across the package."""


class FloorplanError(Exception):
    pass


# core-model / ingest
class InstanceEmpty(FloorplanError):
    pass


class FormatError(FloorplanError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CountMismatch(FloorplanError):
    pass


class NonRectangularBlock(FloorplanError):
    def __init__(self, name: str):
        super().__init__(f"block {name!r} is not an axis-aligned rectangle")
        self.name = name


class DuplicateId(FloorplanError):
    def __init__(self, block_id: str):
        super().__init__(f"duplicate block id {block_id!r}")
        self.block_id = block_id


class ModeMismatch(FloorplanError):
    def __init__(self, block_id: str | None, message: str = ""):
        text = message or f"block {block_id!r} is incompatible with the instance mode"
        super().__init__(text)
        self.block_id = block_id


class BadDimension(FloorplanError):
    def __init__(self, block_id: str, message: str = ""):
        super().__init__(message or f"block {block_id!r} has a non-positive dimension")
        self.block_id = block_id


# solver driver
class BackendUnavailable(FloorplanError):
    pass


class ProtocolError(FloorplanError):
    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class IncompleteModel(FloorplanError):
    def __init__(self, symbol: str):
        super().__init__(f"symbol {symbol!r} missing from solver model")
        self.symbol = symbol


class EncodingBug(FloorplanError):
    """Raised when the solver contradicts a property the encoding guarantees."""


class StrategyError(FloorplanError):
    """A minimization strategy was requested for an instance it cannot handle."""


# validator
class InstanceMismatch(FloorplanError):
    pass


class OracleTooLarge(FloorplanError):
    pass
