"""REE frontiers of two-qubit states against C, N and CHSH nonlocality."""
