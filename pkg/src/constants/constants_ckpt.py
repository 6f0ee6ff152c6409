# constants_ckpt.py

class CKPT_LOGS:
    SAVED = '[CKPT] Saved {arrays} arrays ({size} bytes) to {path}'
    LOADED = '[CKPT] Loaded checkpoint {path} (version {version})'

class CKPT_ERRORS:
    TOO_SMALL = '[ERROR] Checkpoint too small: {size} bytes, expected at least {expected}'
    BAD_MAGIC = '[ERROR] Not a checkpoint file (magic {magic!r})'
    BAD_VERSION = '[ERROR] Unsupported checkpoint version {version}, expected {expected}'
    INCOMPLETE = '[ERROR] Incomplete checkpoint: expected {expected} payload bytes, got {actual}'
    CHECKSUM = '[ERROR] Checkpoint checksum verification failed for {path}'
    CORRUPT = '[ERROR] Corrupt checkpoint payload: {error}'
    UNREADABLE = '[ERROR] Cannot read checkpoint {path}: {error}'
