"""Storage layer: file codecs and the benchmark results store."""
