# constants_numeric.py

class NUMERIC_ERRORS:
    NOT_2D = '[ERROR] {name} must be a 2-D grid, got shape {shape}'
    NOT_3D = '[ERROR] {name} must be a C x H x W feature map, got shape {shape}'
    EMPTY = '[ERROR] {name} must be non-empty, got shape {shape}'
    NON_FINITE = '[ERROR] {name} contains NaN or Inf values'
    KERNEL_SHAPE = '[ERROR] Kernel must be 3x3, got shape {shape}'
    EVEN_POOL = '[ERROR] Pooling window must be an odd positive integer, got {k}'
    BAD_TARGET = '[ERROR] Resize target must be positive, got {height}x{width}'
    SHAPE_MISMATCH = '[ERROR] Shape mismatch: {left} vs {right}'
    NON_SCALAR_ROOT = '[ERROR] backward() needs a scalar root, got shape {shape}'
    CHANNEL_MISMATCH = '[ERROR] conv2d expects {expected} input channels, got {actual}'
