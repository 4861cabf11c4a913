"""winoconv: minimal-filtering convolution engine and benchmark toolkit.

The package computes small-filter convolutional layers four ways and keeps
them honest against each other:

* ``direct``: the slicing-loop oracle with a selectable accumulator.
* ``engine``: whole-layer minimal filtering (tile, transform, batched
  matrix multiply, inverse transform), plus both training gradients.
* ``fftconv``: tiled overlap-and-save FFT convolution with Hermitian
  accounting and the 3-real-multiply complex product.
* ``toomcook``: exact rational generation of the transform matrices for
  any F(m, r).

``complexity`` prices all of the above analytically and ``cli``/``service``
expose accuracy, complexity, bench, and gen commands over HTTP and the
command line.
"""

from winoconv.tensors import Precision, Tensor4, fill_uniform, max_abs_error, quantize_fp16
from winoconv.direct import LayerConfig, direct_forward, direct_grad_inputs, direct_grad_weights, gflops_direct
from winoconv.winograd import TransformCountsUnknown, WinogradAlgorithm, builtin
from winoconv.toomcook import PointSet, default_points, generate, max_transform_magnitude, verify_algorithm

__version__ = "0.1.0"

__all__ = [
    "Precision",
    "Tensor4",
    "fill_uniform",
    "quantize_fp16",
    "max_abs_error",
    "LayerConfig",
    "direct_forward",
    "direct_grad_inputs",
    "direct_grad_weights",
    "gflops_direct",
    "TransformCountsUnknown",
    "WinogradAlgorithm",
    "builtin",
    "PointSet",
    "default_points",
    "generate",
    "max_transform_magnitude",
    "verify_algorithm",
    "FilterCache",
    "TileGrid",
    "tile_count",
    "multiply_stage_flops",
    "winograd_forward",
    "winograd_grad_inputs",
    "winograd_grad_weights",
    "complex_mul_3",
    "fast_cgemm",
    "fft_forward_layer",
    "hermitian_unique_count",
    "ComplexityProfile",
    "winograd_profile",
    "fft_multiply_complexity",
    "fft_table_constants",
    "layer_total_complexity",
    "max_speedup",
    "__version__",
]

from winoconv.engine import (FilterCache, TileGrid, multiply_stage_flops, tile_count,
                             winograd_forward, winograd_grad_inputs, winograd_grad_weights)
from winoconv.fftconv import complex_mul_3, fast_cgemm, fft_forward_layer, hermitian_unique_count
from winoconv.complexity import (ComplexityProfile, fft_multiply_complexity, fft_table_constants,
                                 layer_total_complexity, max_speedup, winograd_profile)
