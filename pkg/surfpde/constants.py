"""
Supported operators, surfaces, file formats and problem presets
"""

OPERATORS = ['identity', 'laplacian', 'gradient', 'directional', 'laplacian_power']

SURFACES = ['sphere', 'torus', 'tooth', 'dziuk', 'bumpy_sphere', 'rose']

POINT_CLOUD_FORMATS = ['csv', 'ply']

PROBLEMS = ['poisson', 'heat', 'advect', 'turing', 'moving']

SOLVERS = ['auto', 'direct', 'bicgstab']

SPECTRUM_MODES = ['dense_full', 'extremal']

# Largest system size solved with a sparse LU when method='auto'
DIRECT_SOLVE_LIMIT = 20000

# Largest matrix handed to a dense eigensolver
DENSE_SPECTRUM_LIMIT = 6000

DEFAULT_PHS_DEGREE = 5
DEFAULT_POLY_DEGREE = 2
DEFAULT_EPS_NORMAL = 0.1

# Relative pivot threshold of the stencil saddle-point factorization
PIVOT_TOLERANCE = 1e-14

# Relative singular value threshold for the polynomial block
RANK_TOLERANCE = 1e-11

# Admitted operator image of polynomials vanishing on a stencil, relative to
# the largest polynomial image
NULLSPACE_TOLERANCE = 1e-6

# Admitted Laplacian row sum relative to the absolute row weight
ROW_SUM_TOLERANCE = 1e-8

# Spacing of the coarse pass that sizes implicit-surface node sets by count
CALIBRATION_SPACING = 0.2

# Fibonacci nodes per unit area relative to the grid width squared on a
# moving sphere
MOVING_NODE_DENSITY = 2.24
