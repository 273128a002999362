"""Services: evaluation, transformations, bounds, the approximation pipeline, oracles, generators and the bench harness."""
