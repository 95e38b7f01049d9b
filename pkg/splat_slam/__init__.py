"""
Splat SLAM - map-centric SLAM on a set of anisotropic 3D Gaussians.

Provides:
- SE(3) geometry and pinhole projection (geometry)
- Gaussian map storage, insertion and pruning (gaussians)
- CPU tile rasterizer with an analytic backward pass (rendering)
- Losses and Adam parameter groups (optim)
- Tracking, keyframing, mapping and the pipeline driver (slam)
- TUM RGB-D reader and synthetic scenes (datasets)
- ATE, PSNR/SSIM and the convergence funnel (evaluation)
"""

__version__ = "0.1.0"
