# constants_eval.py

class EVAL_LOGS:
    START = '[EVAL] Evaluating {count} prediction(s) with {workers} worker(s)'
    REPORT = '[EVAL] {config}: S_m={s:.4f} E_m={e:.4f} F_w={f:.4f} MAE={mae:.4f} over {count} image(s)'
    CSV_WRITTEN = '[EVAL] Metrics CSV written to {path}'

class EVAL_ERRORS:
    LENGTH_MISMATCH = '[ERROR] {preds} predictions but {gts} ground-truth masks'
    EMPTY_SET = '[ERROR] Nothing to evaluate'
    PRED_RANGE = '[ERROR] Prediction values must lie in [0, 1]'
    NON_BINARY_GT = '[ERROR] Ground-truth mask must be binary'
    MISSING_PREDICTION = '[ERROR] No prediction found for ground-truth stem {stem}'
