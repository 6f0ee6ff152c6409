class EdgeCamoError(ValueError):
    """Base class for every error raised by this package."""


class GridError(EdgeCamoError):
    pass


class ShapeMismatchError(GridError):
    pass


class AutodiffError(EdgeCamoError):
    pass


class ConfigError(EdgeCamoError):
    pass


class DatasetError(EdgeCamoError):
    pass


class ImageFormatError(EdgeCamoError):
    pass


class CheckpointError(EdgeCamoError):
    pass


class TrainingError(EdgeCamoError):
    pass
