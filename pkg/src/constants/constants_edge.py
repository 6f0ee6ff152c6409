# constants_edge.py

class EDGE_LOGS:
    EXTRACTED = '[EDGE] Extracted {operator} prior for {height}x{width} image (mean={mean:.4f})'
    CACHE_HIT = '[EDGE] Loaded cached prior {path}'
    CACHE_STORE = '[EDGE] Cached prior to {path}'
    SAVED = '[EDGE] Prior written to {path}'

class EDGE_ERRORS:
    CHANNEL_MISMATCH = '[ERROR] Image channels differ in size: R={r}, G={g}, B={b}'
    OUT_OF_RANGE = '[ERROR] Image channel {channel} has values outside [0, 1]'
    OPERATOR_NAME = '[ERROR] Edge operator name must be a string, got {name!r}'
    UNKNOWN_OPERATOR = '[ERROR] Unknown edge operator {name!r}; expected one of {choices}'
    BAD_PARAMETER = '[ERROR] Edge operator parameter {name} must be positive, got {value}'
    CANNY_THRESHOLDS = '[ERROR] Canny thresholds need 0 < low < high, got low={low}, high={high}'
    BAD_TAU = '[ERROR] Sanitize threshold tau must lie in [0, 1), got {tau}'
    NEGATIVE_LAMBDA = '[ERROR] lambda_inj must be non-negative, got {value}'
    NOT_BOOLEAN = '[ERROR] Injection flag {name} must be true or false, got {value!r}'
    BAD_CHANNELS = '[ERROR] Channel count must be at least 1, got {channels}'
