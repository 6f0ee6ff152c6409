# constants_data.py

class DATA_LOGS:
    SYNTHETIC = '[DATA] Generated {count} synthetic {height}x{width} samples ({family}, delta={delta}, seed={seed})'
    LOADED = '[DATA] Loaded {count} sample(s) from {root}'
    NO_IMAGES = '[DATA] No images under {path}'
    SPLIT = '[DATA] Split {total} samples into {train} train / {test} held-out'
    PNG_WRITTEN = '[DATA] Wrote {path}'
    AREA_RETRY = '[DATA] Sample {index}: mask area {area:.3f} outside band, regenerating'

class DATA_ERRORS:
    MISSING_ROOT = '[ERROR] Dataset directory {root} does not exist'
    MISSING_GT = '[ERROR] No ground-truth mask for image stem {stem} under {gt_dir}'
    SIZE_MISMATCH = '[ERROR] Image {stem} is {image_size} but its mask is {mask_size}'
    UNREADABLE = '[ERROR] Cannot read image {path}: {error}'
    BIT_DEPTH = '[ERROR] Unsupported PNG bit depth {bitdepth} in {path}; only 8-bit images are supported'
    UNSUPPORTED_SUFFIX = '[ERROR] Unsupported image type {suffix} for {path}'
    BAD_SYNTHETIC = '[ERROR] Synthetic config {name} invalid: {value}'
    UNKNOWN_FAMILY = '[ERROR] Unknown shape family {family!r}; expected one of {choices}'
    AREA_BAND = '[ERROR] Could not place a mask inside the area band {band} for sample {index}'
    BAD_HOLDOUT = '[ERROR] Held-out count {holdout} must leave at least one of {total} samples on each side'
    NON_BINARY_MASK = '[ERROR] Mask for {stem} must be binary'
    WRITE_RANGE = '[ERROR] Grid values must lie in [0, 1] to be written as PNG'
