"""Gaussian map storage, insertion, pruning and PLY persistence."""
