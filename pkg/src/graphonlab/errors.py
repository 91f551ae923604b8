class GraphonLabError(Exception):
    """Base class for all package errors."""


class SizeError(GraphonLabError, ValueError):
    pass


class WordError(GraphonLabError, ValueError):
    pass


class DomainError(GraphonLabError, ValueError):
    pass


class PreconditionError(GraphonLabError, ValueError):
    pass


class RegularityError(GraphonLabError, ValueError):
    """The graphon fails a sampled regularity check (D' > 0, bounds, ...)."""


class FamilyError(GraphonLabError, ValueError):
    """Motifs of a family disagree on the subgraph induced by the labels."""


class ExplosionGuardError(GraphonLabError, ValueError):
    """An enumeration would exceed its configured size cap."""


class ConfigError(GraphonLabError, ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        self.bare = message
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
