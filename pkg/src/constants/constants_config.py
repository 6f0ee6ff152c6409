# constants_config.py

class CONFIG_LOGS:
    LOADED = '[CONFIG] Loaded {path}'
    DEFAULTS = '[CONFIG] No config file given; using defaults'
    WRITTEN = '[CONFIG] Resolved configuration written to {path}'

class CONFIG_ERRORS:
    UNREADABLE = '[ERROR] Cannot read config {path}: {error}'
    MALFORMED = '[ERROR] Malformed JSON in {path} at line {line}, column {column}: {message}'
    NOT_OBJECT = '[ERROR] Config section {section} must be a JSON object'
    UNKNOWN_SECTION = '[ERROR] Unknown config section {section!r}; expected one of {choices}'
    UNKNOWN_KEY = '[ERROR] Unknown key {key!r} in config section {section!r}; expected one of {choices}'
    BAD_VALUE = '[ERROR] Invalid value in config section {section!r}: {error}'
