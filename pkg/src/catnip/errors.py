"""Exception hierarchy shared by all catnip modules."""


class CatnipError(Exception):
    """Base class for all errors raised by this package."""


class MalformedJson(CatnipError):
    """The input file is not parseable JSON (or not a readable zip)."""


class NotAScratchProject(CatnipError):
    """The JSON does not follow the Scratch 3 project schema."""


class NoStage(CatnipError):
    """The project defines no target with ``isStage`` set."""


class UnserializableNode(CatnipError):
    """A synthesized node has no valid Scratch block representation."""


class ReservedLabel(CatnipError):
    """A tree node carries the reserved dummy label ``*``."""


class ParamMismatch(CatnipError):
    """Two profiles built with different (p, q) parameters were combined."""


class SchemaError(CatnipError):
    """A test-report file violates the report JSON schema."""


class DuplicateProjectId(SchemaError):
    """The same project id occurs twice in one report file."""


class EmptyReport(SchemaError):
    """A report contains no non-skipped test outcomes."""


class NoCandidates(CatnipError):
    """No pool entry satisfies the pass-rate threshold."""


class StaleHint(CatnipError):
    """A hint references a node that does not exist in the given program."""


class ZeroVariance(CatnipError):
    """Correlation requested on a sample with zero variance."""
