"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI reports.
"""


class CondGeoError(Exception):
    code = "error"


class InputError(CondGeoError, ValueError):
    code = "bad_input"


class MalformedInputError(InputError):
    code = "malformed_json"


class ShapeMismatchError(InputError):
    code = "shape_mismatch"


class FieldMismatchError(InputError):
    code = "field_mismatch"


class SingularInputError(CondGeoError, ValueError):
    code = "singular_input"


class SingularNodeError(SingularInputError):
    code = "singular_node"


class RankDeficientError(SingularInputError):
    code = "rank_deficient"


class MultipleSigmaError(CondGeoError):
    """The smallest singular value is not simple within the cluster tolerance.

    When raised mid-integration, ``exit_time`` and ``path`` hold the point of
    exit and the partial trajectory.
    """

    code = "multiple_sigma"

    def __init__(self, msg, exit_time=None, path=None):
        super().__init__(msg)
        self.exit_time = exit_time
        self.path = path


class ClusterCollisionError(CondGeoError):
    code = "cluster_collision"

    def __init__(self, msg, time=None):
        super().__init__(msg)
        self.time = time


class StepFailureError(CondGeoError):
    code = "step_failure"

    def __init__(self, msg, time=None):
        super().__init__(msg)
        self.time = time


class NotNearUnitaryError(CondGeoError):
    code = "not_near_unitary"


class SeedSingularError(SingularInputError):
    code = "seed_singular"


class NoConvergenceError(CondGeoError):
    """Optimizer stopped before reaching its tolerance; ``result`` is the best iterate."""

    code = "no_convergence"

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class NotConvergedError(CondGeoError):
    code = "not_converged"


class GridTooIrregularError(InputError):
    code = "grid_too_irregular"


class FlowEscapeError(CondGeoError):
    code = "flow_escape"


class DegenerateLinearPartError(SingularInputError):
    code = "degenerate_linear_part"
