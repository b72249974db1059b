"""Hand ROI prediction from sparse body keypoints.

Implements the incumbent geometric ROI heuristic, a trained micro-MLP
replacement (plus the hybrid of the two), and a rotated-box evaluation
harness with IoU, center/scale/rotation errors, win rates, and histograms.
"""

__version__ = "0.1.0"
