# Core utilities for the tree-shape toolkit
