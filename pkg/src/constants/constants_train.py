# constants_train.py

class TRAIN_LOGS:
    START = '[TRAIN] {samples} samples, {epochs} epochs x {batches} batches ({steps} steps), seed {seed}'
    STEP = '[TRAIN] step {step} epoch {epoch} t={t:.1f} lr={lr:.3e} loss={loss:.6f}'
    EPOCH = '[TRAIN] epoch {epoch} mean loss {loss:.6f}'
    DONE = '[TRAIN] Finished after {steps} steps; final loss {loss:.6f}'
    LOG_WRITTEN = '[TRAIN] Training log written to {path}'

class TRAIN_ERRORS:
    EMPTY_DATASET = '[ERROR] Training needs at least one sample'
    NON_FINITE = '[ERROR] Non-finite loss at step {step} (epoch {epoch}, t={t}); terms: {terms}'
    BAD_VALUE = '[ERROR] Trainer {name} must be positive, got {value}'
    BAD_BETAS = '[ERROR] Adam betas must lie in [0, 1), got {betas}'
    BAD_FLOOR = '[ERROR] Learning-rate floor {floor} must lie in [0, {lr}]'
    STATE_MISMATCH = '[ERROR] Optimizer state does not match parameter {name}'

class DIFFUSION_LOGS:
    SAMPLE_START = '[SAMPLE] {steps} steps over timesteps {first}..{last}'
    SAMPLE_DONE = '[SAMPLE] {stem}: mean probability {mean:.4f}'

class DIFFUSION_ERRORS:
    BAD_T = '[ERROR] Schedule length T must be at least 1, got {T}'
    T_RANGE = '[ERROR] Timestep {t} outside [1, {T}]'
    BAD_STEPS = '[ERROR] Sampling steps must lie in [1, {T}], got {steps}'
    NON_BINARY = '[ERROR] Forward corruption needs a binary mask'
    BAD_WIDTHS = '[ERROR] Denoiser needs 2 to 4 positive stage widths, got {widths}'
    BAD_EMBED = '[ERROR] Timestep embedding dimension must be even and positive, got {dim}'
    INPUT_SHAPE = '[ERROR] Denoiser inputs disagree: x_t {x_shape}, image {image_shape}, prior {prior_shape}'
    MISSING_PARAM = '[ERROR] State dict is missing parameter {name}'
    UNEXPECTED_PARAM = '[ERROR] State dict has unexpected parameter {name}'
    PARAM_SHAPE = '[ERROR] Parameter {name} expects shape {expected}, got {actual}'
