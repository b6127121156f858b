"""Monocular spacecraft pose estimation toolkit.

Subpackages and modules:
    geometry  - rotation representations, conversions, pinhole projection
    metrics   - per-sample pose errors and dataset-level score aggregation
    heatmap   - DSNT coordinate extraction and keypoint-side training losses
    augment   - domain-randomization augmentation engine
    scenegen  - synthetic 11-keypoint scene generator with JSONL persistence
    pem       - attention-based pose regressor with hand-rolled training
    cli       - command-line entry point
"""

__version__ = "0.1.0"
