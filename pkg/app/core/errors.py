from typing import Optional


class TreeShapeError(ValueError):
    """Root of every domain error; the CLI maps it to exit status 1."""


class StructuralError(TreeShapeError):
    """Input has the wrong shape: unequal vector lengths, non-square or non-triangular matrix."""


class ConstraintViolation(TreeShapeError):
    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        self.detail = detail
        message = f"constraint {constraint} violated"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class EdgeNotPresent(TreeShapeError):
    def __init__(self, edge: int):
        self.edge = edge
        super().__init__(f"edge ({edge},{edge + 1}) is not present in the tree")


class CapExceeded(TreeShapeError):
    def __init__(self, n_tips: int, cap: int, what: str = "exhaustive generation"):
        self.n_tips = n_tips
        self.cap = cap
        super().__init__(f"N={n_tips} exceeds the {what} cap of {cap}; raise the cap in the config file")


class ParseError(TreeShapeError):
    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at byte offset {offset}"
        super().__init__(message)


class ConfigError(TreeShapeError):
    pass
