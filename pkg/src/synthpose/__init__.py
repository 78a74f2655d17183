"""synthpose: synthetic human pose dataset generation and evaluation.

Core layers:

- rig / camera / geometry: forward kinematics, pinhole projection, skinning,
  BVH ray casting, and software instance rasterization
- simulate: scripted and seeded-random character movement drivers
- annotate: per-frame 3D/2D/COCO keypoint annotations with occlusion flags,
  occlusion-aware masks and boxes, and the boundary/redundancy filters
- dataset: COCO JSON, 3D sidecars, mask PNGs, calibration, manifest, splits
- metrics: MPJPE, PA-MPJPE, per-joint MPJPE, OKS AP/AR, mask IoU
- pipeline / service / cli: generation and evaluation jobs, a FastAPI
  wrapper, and a thin CLI client
"""

__version__ = "0.1.0"
