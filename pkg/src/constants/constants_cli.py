# constants_cli.py

class CLI_LOGS:
    EDGE_DONE = '[EDGE] {operator} prior for {image} written to {out}'
    TRAIN_DONE = '[TRAIN] Checkpoint {checkpoint}, log {log}'
    SAMPLE_DONE = '[SAMPLE] Wrote {count} prediction(s) to {out}'
    EVAL_DONE = '[EVAL] Evaluated {count} pair(s)'
    CSV_WRITTEN = '[ABLATE] Results written to {path}'

class CLI_ERRORS:
    FAILED = '[ERROR] {command} failed: {error}'
    NO_IMAGES = '[ERROR] No input images found in {path}'
    NOT_A_DIRECTORY = '[ERROR] {path} is not a directory'

class ABLATE_LOGS:
    ROW_START = '[ABLATE] Running {tag} ({index}/{total})'
    ROW_DONE = '[ABLATE] {tag}: S_m={s:.4f} E_m={e:.4f} F_w={f:.4f} MAE={mae:.4f} edge={edge:.4f}'