class TreePcaError(Exception):
    def __init__(self, value):
        self.value = value

    def __str__(self):
        return repr(self.value)


class StructureError(TreePcaError):
    """
    Invalid dimension tree, custom node list or active set
    """

    def __init__(self, value, node=None):
        super(StructureError, self).__init__(value)
        self.node = node


class FeatureSpaceError(TreePcaError):
    pass


class UnisolvenceError(TreePcaError):
    """
    The greedy magic point selection hit a pivot below the threshold
    """

    def __init__(self, value, step=None):
        super(UnisolvenceError, self).__init__(value)
        self.step = step


class RankError(TreePcaError):
    pass


class EvaluationError(TreePcaError):
    def __init__(self, value, point=None):
        super(EvaluationError, self).__init__(value)
        self.point = point


class DenseCapError(TreePcaError):
    pass


class NotOrthonormalError(TreePcaError):
    pass


class UndefinedRelativeErrorError(TreePcaError):
    pass


class ConfigurationError(TreePcaError):
    pass


class EvaluationCountError(TreePcaError):
    """
    The evaluations counted by the black box differ from the predicted count
    """
