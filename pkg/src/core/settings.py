# Numerical floor used by the Sobel magnitude and the focal BCE denominator
EPSILON = 1e-6

# Edge operators
SOBEL = 'sobel'
PREWITT = 'prewitt'
LAPLACIAN = 'laplacian'
LOG = 'log'
CANNY = 'canny'
EDGE_OPERATORS = (PREWITT, LAPLACIAN, CANNY, LOG, SOBEL)  # ablation row order

LOG_SIGMA = 1.4         # Marr-Hildreth smoothing
CANNY_SIGMA = 1.0
CANNY_LOW = 0.1         # on magnitude normalised to [0, 1]
CANNY_HIGH = 0.2

# Grayscale conversion weights (R, G, B)
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

# Boundary injection
LAMBDA_INJ = 0.075
LAPLACIAN_PREFILTER = True

# Loss suite
FOCAL_GAMMA = 2.0
BOUNDARY_ALPHA = 5.0
BOUNDARY_POOL_K = 31
EDGE_TAU = 0.25
LAMBDA_GT_EDGE = 0.01
LAMBDA_UAL = 0.01
LAMBDA_RGB = 0.005
LOSS_SCALES = (1.0, 0.5, 0.25)
LOSS_SCALE_WEIGHTS = (1.0, 0.25, 0.125)
PROB_CLAMP = 1e-7       # clamp of y_hat inside p_t

# Diffusion
TIMESTEPS = 1000
COSINE_OFFSET = 0.008
ALPHA_BAR_MARGIN = 1e-5
SAMPLING_STEPS = 30

# Denoiser
STAGE_WIDTHS = (16, 32, 64)
TIME_EMBED_DIM = 64     # timestep embedding width

# Trainer (AdamW + cosine annealing)
LEARNING_RATE = 5e-5
EPOCHS = 150
BATCH_SIZE = 32
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8
WEIGHT_DECAY = 0.01
LR_FLOOR = 0.0

# Synthetic data
SYNTH_COUNT = 200
SYNTH_SIZE = 64
SYNTH_DELTA = 0.08
SYNTH_OCTAVES = 4
SHAPE_FAMILIES = ('blob', 'elongated', 'multi-pronged')
MASK_AREA_BAND = (0.02, 0.60)
HOLDOUT = 40

# Dataset layout
IMAGES_DIR = 'Images'
GT_DIR = 'GT'
IMAGE_SUFFIXES = ('.png', '.jpg', '.jpeg')
GT_THRESHOLD = 128      # of 255

# Checkpoint file
CHECKPOINT_MAGIC = b'ECDF'
CHECKPOINT_VERSION = 1

# CSV
METRICS_HEADER = ('config', 'S_m', 'E_m', 'F_w', 'MAE')
CSV_FLOAT_FORMAT = '{:.6f}'
