# constants_loss.py

class LOSS_ERRORS:
    NON_BINARY = '[ERROR] Boundary weights need a binary mask; found values outside {{0, 1}}'
    EMPTY_SCALES = '[ERROR] Loss needs at least one scale'
    SCALE_RANGE = '[ERROR] Loss scale {scale} outside (0, 1]'
    WEIGHT_RANGE = '[ERROR] Loss scale weight {weight} must be positive'
    SCALE_WEIGHT_COUNT = '[ERROR] {scales} scales but {weights} scale weights'
    NEGATIVE_LAMBDA = '[ERROR] Loss coefficient {name} must be non-negative, got {value}'
    POOL_SIZE = '[ERROR] Boundary pool size must be odd and positive, got {k}'
